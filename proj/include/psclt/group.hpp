#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace psclt {

using Letter = std::int32_t;
using Word = std::vector<Letter>;

/// Reserved label token for identity-labeled edges into the 0 vertex.
inline constexpr Letter kIdentityLabel = -1;
inline constexpr std::string_view kIdentityToken = "<id>";

/// Ordered generating set S u S^-1 with a fixed-point-free inversion.
/// The letter order is the shortlex order used for normal forms.
class Alphabet {
 public:
  Alphabet() = default;
  Alphabet(std::vector<std::string> names, std::vector<Letter> inverse);

  /// a, A, b, B, ... (upper case is the inverse).
  static Alphabet free(int rank);
  /// a1, A1, b1, B1, a2, ... for the relator [a1,b1]...[ag,bg].
  static Alphabet surface(int genus);

  std::size_t size() const { return names_.size(); }
  const std::string& name(Letter x) const { return names_.at(static_cast<std::size_t>(x)); }
  Letter inverse(Letter x) const { return inverse_.at(static_cast<std::size_t>(x)); }
  const std::vector<std::string>& names() const { return names_; }
  Letter find(std::string_view name) const;  // -1 if absent

  /// Accepts whitespace-separated tokens, or greedy longest-match on a packed string.
  Word parse(std::string_view text) const;
  std::string format(const Word& w) const;
  Word invert(const Word& w) const;

  bool operator==(const Alphabet&) const = default;

 private:
  std::vector<std::string> names_;
  std::vector<Letter> inverse_;
};

struct GroupSpec {
  enum class Kind { free, surface };
  Kind kind = Kind::free;
  int param = 2;  // rank or genus

  static GroupSpec free_group(int rank) { return {Kind::free, rank}; }
  static GroupSpec surface_group(int genus) { return {Kind::surface, genus}; }

  Alphabet alphabet() const;
  std::string describe() const;
  bool operator==(const GroupSpec&) const = default;
};

Word free_reduce(const Word& w, const Alphabet& alphabet);
bool is_freely_reduced(const Word& w, const Alphabet& alphabet);

/// Shortlex comparison (length first, then letter order).
bool shortlex_less(const Word& u, const Word& v);

/// Geodesic normal form: free reduction for free groups, Dehn reduction with
/// shortlex tie-breaking for surface groups.
Word normal_form(const GroupSpec& group, const Word& w);
bool is_normal_form(const GroupSpec& group, const Word& w);

/// Normal form of the product u*v.
Word multiply(const GroupSpec& group, const Word& u, const Word& v);

}  // namespace psclt
