#include "psclt/group.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "psclt/error.hpp"
#include "psclt/surface_group.hpp"

namespace psclt {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotNonElementary: return "NotNonElementary";
    case ErrorCode::NotHyperbolic: return "NotHyperbolic";
    case ErrorCode::CodingBug: return "CodingBug";
    case ErrorCode::AlreadyAugmented: return "AlreadyAugmented";
    case ErrorCode::NotGeodesic: return "NotGeodesic";
    case ErrorCode::NotAPath: return "NotAPath";
    case ErrorCode::RadiusTooLarge: return "RadiusTooLarge";
    case ErrorCode::GroupCodingViolation: return "GroupCodingViolation";
    case ErrorCode::DegenerateSpectrum: return "DegenerateSpectrum";
    case ErrorCode::NullState: return "NullState";
    case ErrorCode::TrivialHomomorphism: return "TrivialHomomorphism";
    case ErrorCode::InvalidMetric: return "InvalidMetric";
    case ErrorCode::InvalidOrigin: return "InvalidOrigin";
    case ErrorCode::NotWindowLocal: return "NotWindowLocal";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::DegenerateVariance: return "DegenerateVariance";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

Alphabet::Alphabet(std::vector<std::string> names, std::vector<Letter> inverse)
    : names_(std::move(names)), inverse_(std::move(inverse)) {
  if (names_.size() != inverse_.size() || names_.empty() || names_.size() % 2 != 0)
    throw Error(ErrorCode::InvalidArgument, "alphabet must have even, nonzero size");
  std::set<std::string> seen;
  for (std::size_t i = 0; i < names_.size(); ++i) {
    const Letter j = inverse_[i];
    if (j < 0 || static_cast<std::size_t>(j) >= names_.size())
      throw Error(ErrorCode::InvalidArgument, "inverse out of range for " + names_[i]);
    if (static_cast<std::size_t>(j) == i)
      throw Error(ErrorCode::InvalidArgument, "letter is its own inverse: " + names_[i]);
    if (inverse_[static_cast<std::size_t>(j)] != static_cast<Letter>(i))
      throw Error(ErrorCode::InvalidArgument, "inverse is not an involution at " + names_[i]);
    if (names_[i].empty() || names_[i] == kIdentityToken || !seen.insert(names_[i]).second)
      throw Error(ErrorCode::InvalidArgument, "bad or duplicate letter name '" + names_[i] + "'");
  }
}

Alphabet Alphabet::free(int rank) {
  if (rank < 1 || rank > 26) throw Error(ErrorCode::InvalidArgument, "free rank out of range");
  std::vector<std::string> names;
  std::vector<Letter> inv;
  for (int i = 0; i < rank; ++i) {
    names.emplace_back(1, static_cast<char>('a' + i));
    names.emplace_back(1, static_cast<char>('A' + i));
    inv.push_back(2 * i + 1);
    inv.push_back(2 * i);
  }
  return Alphabet(std::move(names), std::move(inv));
}

Alphabet Alphabet::surface(int genus) {
  if (genus < 1) throw Error(ErrorCode::InvalidArgument, "genus out of range");
  std::vector<std::string> names;
  std::vector<Letter> inv;
  for (int j = 1; j <= genus; ++j) {
    const std::string idx = std::to_string(j);
    for (const char* base : {"a", "b"}) {
      const std::string lower = base + idx;
      std::string upper = lower;
      upper[0] = static_cast<char>(std::toupper(upper[0]));
      const auto at = static_cast<Letter>(names.size());
      names.push_back(lower);
      names.push_back(upper);
      inv.push_back(at + 1);
      inv.push_back(at);
    }
  }
  return Alphabet(std::move(names), std::move(inv));
}

Letter Alphabet::find(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return static_cast<Letter>(i);
  return -1;
}

Word Alphabet::parse(std::string_view text) const {
  Word out;
  const bool spaced = text.find_first_of(" \t,") != std::string_view::npos;
  std::size_t pos = 0;
  while (pos < text.size()) {
    if (std::isspace(static_cast<unsigned char>(text[pos])) || text[pos] == ',') {
      ++pos;
      continue;
    }
    if (spaced) {
      const std::size_t end = text.find_first_of(" \t,", pos);
      const auto token = text.substr(pos, end == std::string_view::npos ? text.size() - pos : end - pos);
      const Letter x = find(token);
      if (x < 0) throw Error(ErrorCode::InvalidArgument, "unknown letter '" + std::string(token) + "'");
      out.push_back(x);
      pos += token.size();
      continue;
    }
    std::size_t best_len = 0;
    Letter best = -1;
    for (std::size_t i = 0; i < names_.size(); ++i) {
      const auto& n = names_[i];
      if (n.size() > best_len && text.substr(pos, n.size()) == n) {
        best_len = n.size();
        best = static_cast<Letter>(i);
      }
    }
    if (best < 0) throw Error(ErrorCode::InvalidArgument, "cannot parse word at '" + std::string(text.substr(pos)) + "'");
    out.push_back(best);
    pos += best_len;
  }
  return out;
}

std::string Alphabet::format(const Word& w) const {
  std::string out;
  for (Letter x : w) out += name(x);
  return out;
}

Word Alphabet::invert(const Word& w) const {
  Word out(w.rbegin(), w.rend());
  for (auto& x : out) x = inverse(x);
  return out;
}

Alphabet GroupSpec::alphabet() const {
  return kind == Kind::free ? Alphabet::free(param) : Alphabet::surface(param);
}

std::string GroupSpec::describe() const {
  return (kind == Kind::free ? "free rank " : "surface genus ") + std::to_string(param);
}

Word free_reduce(const Word& w, const Alphabet& alphabet) {
  Word out;
  out.reserve(w.size());
  for (Letter x : w) {
    if (!out.empty() && alphabet.inverse(out.back()) == x)
      out.pop_back();
    else
      out.push_back(x);
  }
  return out;
}

bool is_freely_reduced(const Word& w, const Alphabet& alphabet) {
  for (std::size_t i = 1; i < w.size(); ++i)
    if (alphabet.inverse(w[i - 1]) == w[i]) return false;
  return true;
}

bool shortlex_less(const Word& u, const Word& v) {
  if (u.size() != v.size()) return u.size() < v.size();
  return u < v;
}

Word normal_form(const GroupSpec& group, const Word& w) {
  if (group.kind == GroupSpec::Kind::free) return free_reduce(w, group.alphabet());
  return SurfacePresentation(group.param).normal_form(w);
}

bool is_normal_form(const GroupSpec& group, const Word& w) {
  const auto alphabet = group.alphabet();
  for (Letter x : w)
    if (x < 0 || static_cast<std::size_t>(x) >= alphabet.size()) return false;
  if (!is_freely_reduced(w, alphabet)) return false;
  if (group.kind == GroupSpec::Kind::free) return true;
  return normal_form(group, w) == w;
}

Word multiply(const GroupSpec& group, const Word& u, const Word& v) {
  Word uv = u;
  uv.insert(uv.end(), v.begin(), v.end());
  return normal_form(group, uv);
}

}  // namespace psclt
