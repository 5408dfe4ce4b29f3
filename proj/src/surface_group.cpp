#include "psclt/surface_group.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numbers>
#include <set>
#include <unordered_map>

#include "psclt/error.hpp"

namespace psclt {

SurfacePresentation::SurfacePresentation(int genus) : genus_(genus), alphabet_(Alphabet::surface(genus)) {
  if (genus < 2) throw Error(ErrorCode::NotHyperbolic, "surface genus must be >= 2");
  for (int j = 0; j < genus; ++j) {
    const Letter a = 4 * j, a_inv = 4 * j + 1, b = 4 * j + 2, b_inv = 4 * j + 3;
    relator_.insert(relator_.end(), {a, b, a_inv, b_inv});
  }
  const Word inverse = alphabet_.invert(relator_);
  for (const Word* base : {static_cast<const Word*>(&relator_), &inverse}) {
    for (std::size_t shift = 0; shift < base->size(); ++shift) {
      Word r(base->begin() + static_cast<std::ptrdiff_t>(shift), base->end());
      r.insert(r.end(), base->begin(), base->begin() + static_cast<std::ptrdiff_t>(shift));
      cyclic_.push_back(std::move(r));
    }
  }
}

Word SurfacePresentation::dehn_reduce(const Word& w) const {
  Word cur = free_reduce(w, alphabet_);
  const std::size_t len = relator_.size();
  const std::size_t half = len / 2;
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < cur.size() && !changed; ++i) {
      for (const Word& r : cyclic_) {
        std::size_t m = 0;
        while (m < len && i + m < cur.size() && cur[i + m] == r[m]) ++m;
        if (m <= half) continue;
        // cur[i, i+m) == r[0, m) and r == 1, so the piece equals the inverse of r[m, len).
        Word rest(r.begin() + static_cast<std::ptrdiff_t>(m), r.end());
        Word next(cur.begin(), cur.begin() + static_cast<std::ptrdiff_t>(i));
        const Word replacement = alphabet_.invert(rest);
        next.insert(next.end(), replacement.begin(), replacement.end());
        next.insert(next.end(), cur.begin() + static_cast<std::ptrdiff_t>(i + m), cur.end());
        cur = free_reduce(next, alphabet_);
        changed = true;
        break;
      }
    }
  }
  return cur;
}

bool SurfacePresentation::equal(const Word& u, const Word& v) const {
  Word w = u;
  const Word v_inv = alphabet_.invert(v);
  w.insert(w.end(), v_inv.begin(), v_inv.end());
  return is_identity(w);
}

Word SurfacePresentation::normal_form(const Word& w, std::size_t budget) const {
  const std::size_t half = relator_.size() / 2;
  Word cur = dehn_reduce(w);
restart:
  std::set<Word> seen{cur};
  std::deque<Word> queue{cur};
  Word best = cur;
  while (!queue.empty()) {
    const Word u = std::move(queue.front());
    queue.pop_front();
    for (std::size_t i = 0; i + half <= u.size(); ++i) {
      for (const Word& r : cyclic_) {
        if (!std::equal(r.begin(), r.begin() + static_cast<std::ptrdiff_t>(half), u.begin() + static_cast<std::ptrdiff_t>(i)))
          continue;
        const Word other = alphabet_.invert(Word(r.begin() + static_cast<std::ptrdiff_t>(half), r.end()));
        Word v(u.begin(), u.begin() + static_cast<std::ptrdiff_t>(i));
        v.insert(v.end(), other.begin(), other.end());
        v.insert(v.end(), u.begin() + static_cast<std::ptrdiff_t>(i + half), u.end());
        v = dehn_reduce(v);
        if (v.size() < u.size()) {
          cur = std::move(v);
          goto restart;
        }
        if (seen.insert(v).second) {
          if (seen.size() > budget)
            throw Error(ErrorCode::BudgetExceeded, "half-relator swap closure exceeds budget");
          if (shortlex_less(v, best)) best = v;
          queue.push_back(std::move(v));
        }
      }
    }
  }
  return best;
}

// ---------------------------------------------------------------------------

namespace {

using Matrix = FuchsianModel::Matrix;
using Complex = FuchsianModel::Complex;

Matrix rotation(double angle) { return {std::polar(1.0, angle / 2.0), Complex{}}; }
Matrix translation(double distance) {
  return {Complex{std::cosh(distance / 2.0), 0.0}, Complex{std::sinh(distance / 2.0), 0.0}};
}

}  // namespace

FuchsianModel::FuchsianModel(int genus) {
  if (genus < 2) throw Error(ErrorCode::NotHyperbolic, "surface genus must be >= 2");
  const int sides = 4 * genus;
  const double inradius = std::acosh(1.0 / std::tan(std::numbers::pi / sides));
  separation_ = 2.0 * inradius;
  auto side_angle = [&](int i) { return 2.0 * std::numbers::pi * i / sides; };
  // Maps side i onto side j, carrying the polygon across side j.
  auto pairing = [&](int i, int j) {
    return multiply(multiply(rotation(side_angle(j) - std::numbers::pi), translation(-separation_)),
                    rotation(-side_angle(i)));
  };
  auto inverse = [](const Matrix& m) { return Matrix{std::conj(m.alpha), -m.beta}; };
  gens_.resize(static_cast<std::size_t>(sides));
  for (int j = 0; j < genus; ++j) {
    const Matrix a = pairing(4 * j + 2, 4 * j);
    const Matrix b = pairing(4 * j + 1, 4 * j + 3);
    gens_[static_cast<std::size_t>(4 * j)] = a;
    gens_[static_cast<std::size_t>(4 * j + 1)] = inverse(a);
    gens_[static_cast<std::size_t>(4 * j + 2)] = b;
    gens_[static_cast<std::size_t>(4 * j + 3)] = inverse(b);
  }
  const Matrix rel = evaluate(SurfacePresentation(genus).relator());
  if (std::abs(std::abs(rel.alpha) - 1.0) > 1e-9 || std::abs(rel.beta) > 1e-9 || std::abs(rel.alpha.imag()) > 1e-9)
    throw Error(ErrorCode::CodingBug, "octagon side pairings do not satisfy the surface relator");
}

Matrix FuchsianModel::multiply(const Matrix& a, const Matrix& b) {
  return {a.alpha * b.alpha + a.beta * std::conj(b.beta), a.alpha * b.beta + a.beta * std::conj(b.alpha)};
}

Matrix FuchsianModel::evaluate(const Word& w) const {
  Matrix m;
  for (Letter x : w) m = multiply(m, generator(x));
  return m;
}

std::array<double, 3> FuchsianModel::orbit_point(const Matrix& m) {
  const Complex ab = 2.0 * m.alpha * m.beta;
  return {std::norm(m.alpha) + std::norm(m.beta), ab.real(), ab.imag()};
}

// ---------------------------------------------------------------------------

bool WordAcceptor::accepts(const Word& w) const {
  int state = 0;
  for (Letter x : w) {
    if (x < 0 || static_cast<std::size_t>(x) >= alphabet_size) return false;
    state = transitions[static_cast<std::size_t>(state)][static_cast<std::size_t>(x)];
    if (state < 0) return false;
  }
  return true;
}

WordAcceptor minimize(const WordAcceptor& dfa) {
  // Moore refinement; the implicit failure state is its own class.
  const std::size_t n = dfa.state_count();
  std::vector<int> block(n, 0);
  std::size_t blocks = 1;
  while (true) {
    std::map<std::vector<int>, int> signature_ids;
    std::vector<int> next(n);
    for (std::size_t s = 0; s < n; ++s) {
      std::vector<int> sig{block[s]};
      for (int t : dfa.transitions[s]) sig.push_back(t < 0 ? -1 : block[static_cast<std::size_t>(t)]);
      auto [it, inserted] = signature_ids.emplace(std::move(sig), static_cast<int>(signature_ids.size()));
      next[s] = it->second;
    }
    const std::size_t count = signature_ids.size();
    block = std::move(next);
    if (count == blocks) break;
    blocks = count;
  }
  // Renumber so that the start state is 0 and states appear in BFS order.
  std::vector<int> order(blocks, -1);
  std::vector<std::size_t> representative;
  std::deque<std::size_t> queue{0};
  order[static_cast<std::size_t>(block[0])] = 0;
  representative.push_back(0);
  while (!queue.empty()) {
    const std::size_t s = queue.front();
    queue.pop_front();
    for (int t : dfa.transitions[s]) {
      if (t < 0) continue;
      auto& slot = order[static_cast<std::size_t>(block[static_cast<std::size_t>(t)])];
      if (slot < 0) {
        slot = static_cast<int>(representative.size());
        representative.push_back(static_cast<std::size_t>(t));
        queue.push_back(static_cast<std::size_t>(t));
      }
    }
  }
  WordAcceptor out;
  out.alphabet_size = dfa.alphabet_size;
  for (std::size_t rep : representative) {
    std::vector<int> row;
    for (int t : dfa.transitions[rep])
      row.push_back(t < 0 ? -1 : order[static_cast<std::size_t>(block[static_cast<std::size_t>(t)])]);
    out.transitions.push_back(std::move(row));
  }
  return out;
}


namespace {

/// Shortlex ball of the surface group, numbered in shortlex order of normal forms:
/// spheres are scanned in order and extended letter by letter, so the first
/// discovery of an element is through its shortlex-least representative.
class ShortlexBall {
 public:
  ShortlexBall(const FuchsianModel& model, std::size_t letters, int radius) : letters_(letters) {
    cell_ = model.orbit_separation() / 2.0;
    add(Matrix{}, -1, -1, 0);
    for (std::size_t node = 0; node < size() && length_[node] < radius; ++node) {
      for (std::size_t x = 0; x < letters; ++x) {
        const Matrix m = FuchsianModel::multiply(mats_[node], model.generator(static_cast<Letter>(x)));
        if (find(m) < 0) add(m, static_cast<int>(node), static_cast<Letter>(x), length_[node] + 1);
      }
    }
  }

  std::size_t size() const { return mats_.size(); }
  int length(std::size_t node) const { return length_[node]; }
  int parent(std::size_t node) const { return parent_[node]; }
  Letter last(std::size_t node) const { return last_[node]; }
  const Matrix& matrix(std::size_t node) const { return mats_[node]; }

  /// Nodes along the normal form of `node`, from the identity.
  std::vector<int> prefixes(std::size_t node) const {
    std::vector<int> out;
    for (int at = static_cast<int>(node); at >= 0; at = parent_[static_cast<std::size_t>(at)]) out.push_back(at);
    std::reverse(out.begin(), out.end());
    return out;
  }

  int find(const Matrix& m) const {
    const auto p = FuchsianModel::orbit_point(m);
    std::array<std::int64_t, 3> cell{};
    std::array<int, 3> near{};
    for (std::size_t i = 0; i < 3; ++i) {
      const double scaled = p[i] / cell_;
      cell[i] = static_cast<std::int64_t>(std::floor(scaled));
      const double frac = scaled - std::floor(scaled);
      near[i] = frac < 1e-3 ? -1 : (frac > 1.0 - 1e-3 ? 1 : 0);
    }
    const double tol = 1e-6 * (1.0 + p[0]);
    for (int dx = 0; dx <= std::abs(near[0]); ++dx)
      for (int dy = 0; dy <= std::abs(near[1]); ++dy)
        for (int dz = 0; dz <= std::abs(near[2]); ++dz) {
          const std::array<std::int64_t, 3> c{cell[0] + dx * near[0], cell[1] + dy * near[1], cell[2] + dz * near[2]};
          auto it = head_.find(key(c));
          for (int id = it == head_.end() ? -1 : it->second; id >= 0; id = next_[static_cast<std::size_t>(id)]) {
            const auto q = FuchsianModel::orbit_point(mats_[static_cast<std::size_t>(id)]);
            if (std::abs(p[0] - q[0]) < tol && std::abs(p[1] - q[1]) < tol && std::abs(p[2] - q[2]) < tol) return id;
          }
        }
    return -1;
  }

 private:
  static std::uint64_t key(const std::array<std::int64_t, 3>& c) {
    std::uint64_t h = 1469598103934665603ull;
    for (auto v : c) h = (h ^ static_cast<std::uint64_t>(v)) * 1099511628211ull;
    return h;
  }

  void add(const Matrix& m, int parent, Letter x, int length) {
    const auto p = FuchsianModel::orbit_point(m);
    std::array<std::int64_t, 3> c{};
    for (std::size_t i = 0; i < 3; ++i) c[i] = static_cast<std::int64_t>(std::floor(p[i] / cell_));
    const int id = static_cast<int>(mats_.size());
    auto [it, inserted] = head_.emplace(key(c), id);
    next_.push_back(inserted ? -1 : it->second);
    if (!inserted) it->second = id;
    mats_.push_back(m);
    length_.push_back(length);
    parent_.push_back(parent);
    last_.push_back(x);
  }

  std::size_t letters_;
  double cell_ = 1.0;
  std::vector<Matrix> mats_;
  std::vector<int> length_;
  std::vector<int> parent_;
  std::vector<Letter> last_;
  std::unordered_map<std::uint64_t, int> head_;
  std::vector<int> next_;
};

Matrix inverse_of(const Matrix& m) { return {std::conj(m.alpha), -m.beta}; }

enum Status : int { kLess = 0, kGreater = 1, kEnded = 2 };

}  // namespace

WordAcceptor build_surface_shortlex_acceptor(int genus, const ShortlexBuildOptions& options) {
  if (genus < 2) throw Error(ErrorCode::NotHyperbolic, "surface genus must be >= 2");
  if (options.ball_radius < 2) throw Error(ErrorCode::InvalidArgument, "ball_radius must be >= 2");
  const FuchsianModel model(genus);
  const std::size_t letters = static_cast<std::size_t>(4 * genus);
  const ShortlexBall ball(model, letters, options.ball_radius);

  // Word differences of the minimal shortlex equations u.x = nf(u.x), u normal.
  std::map<int, int> diff_index;  // ball node -> difference id
  std::vector<int> diffs;
  auto intern = [&](int node) {
    auto [it, inserted] = diff_index.emplace(node, static_cast<int>(diffs.size()));
    if (inserted) diffs.push_back(node);
    return it->second;
  };
  intern(0);
  for (std::size_t u = 0; u < ball.size() && ball.length(u) < options.ball_radius; ++u) {
    std::vector<int> lhs;  // prefix nodes of u.x, the last being nf(u.x)
    for (std::size_t x = 0; x < letters; ++x) {
      const int target = ball.find(FuchsianModel::multiply(ball.matrix(u), model.generator(static_cast<Letter>(x))));
      if (target < 0) throw Error(ErrorCode::CodingBug, "ball lookup failed inside the ball");
      if (ball.parent(static_cast<std::size_t>(target)) == static_cast<int>(u) &&
          ball.last(static_cast<std::size_t>(target)) == static_cast<Letter>(x))
        continue;  // u.x is itself normal
      lhs = ball.prefixes(u);
      lhs.push_back(target);
      const std::vector<int> rhs = ball.prefixes(static_cast<std::size_t>(target));
      for (std::size_t i = 0; i < lhs.size(); ++i) {
        const int v_node = rhs[std::min(i, rhs.size() - 1)];
        const Matrix d = FuchsianModel::multiply(inverse_of(ball.matrix(static_cast<std::size_t>(v_node))),
                                                 ball.matrix(static_cast<std::size_t>(lhs[i])));
        const int id = ball.find(d);
        if (id < 0) throw Error(ErrorCode::CodingBug, "word difference outside the ball; increase ball_radius");
        intern(id);
      }
    }
  }

  // Difference transitions d -> y^-1 d x (both letters read) and d -> d x (competitor ended).
  const std::size_t nd = diffs.size();
  std::vector<int> step(nd * letters * letters, -1);
  std::vector<int> tail_step(nd * letters, -1);
  for (std::size_t d = 0; d < nd; ++d) {
    const Matrix& md = ball.matrix(static_cast<std::size_t>(diffs[d]));
    for (std::size_t x = 0; x < letters; ++x) {
      const Matrix dx = FuchsianModel::multiply(md, model.generator(static_cast<Letter>(x)));
      if (const int id = ball.find(dx); id >= 0 && diff_index.count(id)) tail_step[d * letters + x] = diff_index[id];
      for (std::size_t y = 0; y < letters; ++y) {
        const Matrix e = FuchsianModel::multiply(inverse_of(model.generator(static_cast<Letter>(y))), dx);
        if (const int id = ball.find(e); id >= 0 && diff_index.count(id))
          step[(d * letters + x) * letters + y] = diff_index[id];
      }
    }
  }

  // Subset construction. A state is the sorted set of (difference, status) pairs
  // reachable by competitor words v; the trivial competitor v = w is implicit.
  using Pair = std::pair<int, int>;
  std::map<std::vector<Pair>, int> state_ids;
  std::vector<std::vector<Pair>> states;
  auto state_of = [&](std::vector<Pair> s) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    // (d, greater) is dominated by (d, less).
    std::vector<Pair> pruned;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i].second == kGreater && i > 0 && s[i - 1] == Pair{s[i].first, kLess}) continue;
      pruned.push_back(s[i]);
    }
    auto [it, inserted] = state_ids.emplace(pruned, static_cast<int>(states.size()));
    if (inserted) states.push_back(std::move(pruned));
    return it->second;
  };
  state_of({});
  WordAcceptor dfa;
  dfa.alphabet_size = letters;
  const std::size_t max_states = 2000000;
  for (std::size_t s = 0; s < states.size(); ++s) {
    if (states.size() > max_states) throw Error(ErrorCode::BudgetExceeded, "acceptor subset construction too large");
    std::vector<int> row(letters, -1);
    for (std::size_t x = 0; x < letters; ++x) {
      std::vector<Pair> next;
      bool reducible = false;
      auto push = [&](int d, int status) {
        if (d < 0) return;
        if (d == 0 && status != kGreater) reducible = true;
        if (d == 0 && status == kGreater) return;  // dominated by the trivial competitor
        next.emplace_back(d, status);
      };
      // Trivial competitor: diverge now, or stop now.
      for (std::size_t y = 0; y < letters; ++y) {
        if (y == x) continue;
        push(step[(0 * letters + x) * letters + y], y < x ? kLess : kGreater);
      }
      push(tail_step[0 * letters + x], kEnded);
      for (const auto& [d, status] : states[s]) {
        const auto ud = static_cast<std::size_t>(d);
        if (status == kEnded) {
          push(tail_step[ud * letters + x], kEnded);
          continue;
        }
        for (std::size_t y = 0; y < letters; ++y) push(step[(ud * letters + x) * letters + y], status);
        push(tail_step[ud * letters + x], kEnded);
      }
      if (!reducible) row[x] = state_of(std::move(next));
    }
    dfa.transitions.push_back(std::move(row));
  }
  return minimize(dfa);
}

}  // namespace psclt
