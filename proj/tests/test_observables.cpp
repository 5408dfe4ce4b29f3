#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "psclt/error.hpp"
#include "psclt/observables.hpp"

using namespace psclt;

namespace {

template <class F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no psclt::Error thrown";
  return ErrorCode::Io;
}

const GroupSpec f2 = GroupSpec::free_group(2);

Word to_word(const std::vector<int>& w) { return Word(w.begin(), w.end()); }

std::vector<int> reduce(std::vector<int> w) {
  std::vector<int> out;
  for (int x : w) {
    if (!out.empty() && out.back() == oracle::inv(x)) out.pop_back();
    else out.push_back(x);
  }
  return out;
}

}  // namespace

TEST(Homomorphism, WeightsAndLattice) {
  const auto h = make_homomorphism(f2, {{"a", 1.0}, {"b", 0.5}});
  EXPECT_EQ(h.weights, (std::vector<double>{1.0, -1.0, 0.5, -0.5}));
  ASSERT_TRUE(h.quantum);
  EXPECT_DOUBLE_EQ(*h.quantum, 0.5);
  EXPECT_EQ(h.window, 1);
  EXPECT_DOUBLE_EQ(evaluate(h, f2.alphabet().parse("aab")), 2.5);
}

TEST(Homomorphism, TrivialWarns) {
  const auto h = make_homomorphism(f2, {{"a", 0.0}, {"b", 0.0}});
  ASSERT_FALSE(h.warnings.empty());
  EXPECT_NE(h.warnings.front().find("TrivialHomomorphism"), std::string::npos);
}

TEST(Homomorphism, InconsistentInverse) {
  EXPECT_EQ(code_of([] { make_homomorphism(f2, {{"a", 1.0}, {"A", 1.0}}); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([] { make_homomorphism(f2, {{"c", 1.0}}); }), ErrorCode::InvalidArgument);
}

TEST(Brooks, MatchesOracleCountOnAllShortWords) {
  for (const char* text : {"ab", "aab", "abA"}) {
    const Word w = f2.alphabet().parse(text);
    const auto obs = make_brooks(f2, w);
    const std::vector<int> ow(w.begin(), w.end());
    for (int n = 0; n <= 6; ++n)
      for (const auto& u : oracle::reduced_words(2, n))
        ASSERT_DOUBLE_EQ(evaluate(obs, to_word(u)), static_cast<double>(oracle::brooks_count(u, ow)))
            << text << " on " << f2.alphabet().format(to_word(u));
  }
}

TEST(Brooks, Errors) {
  EXPECT_EQ(code_of([] { make_brooks(f2, f2.alphabet().parse("aA")); }), ErrorCode::NotGeodesic);
  EXPECT_EQ(code_of([] { make_brooks(f2, f2.alphabet().parse("a")); }), ErrorCode::InvalidArgument);
}

TEST(Brooks, SampledDefectWithinExhaustiveBound) {
  const Word w = f2.alphabet().parse("ab");
  const std::vector<int> ow(w.begin(), w.end());
  // Exhaustive defect over pairs of reduced words of length <= 4.
  std::vector<std::vector<int>> words;
  for (int n = 0; n <= 4; ++n)
    for (const auto& u : oracle::reduced_words(2, n)) words.push_back(u);
  long bound = 0;
  for (const auto& g : words)
    for (const auto& h : words) {
      std::vector<int> gh = g;
      gh.insert(gh.end(), h.begin(), h.end());
      const long d = oracle::brooks_count(reduce(gh), ow) - oracle::brooks_count(g, ow) - oracle::brooks_count(h, ow);
      bound = std::max(bound, std::abs(d));
    }
  EXPECT_GT(bound, 0);
  const auto obs = make_brooks(f2, w);
  const auto r = condition2_check(build_free_automaton(2), obs, 500, 12, 3);
  EXPECT_LE(r.defect, static_cast<double>(bound));
  EXPECT_LE(r.left_constant, 1.0);
  EXPECT_LE(r.right_constant, 1.0);
}

TEST(WeightedLength, Values) {
  const auto l = make_weighted_length(f2, {{"a", 1.0}, {"b", 2.0}});
  EXPECT_EQ(l.weights, (std::vector<double>{1.0, 1.0, 2.0, 2.0}));
  EXPECT_DOUBLE_EQ(evaluate(l, f2.alphabet().parse("aBB")), 5.0);
  EXPECT_EQ(code_of([] { make_weighted_length(f2, {{"a", 1.0}, {"b", 0.0}}); }), ErrorCode::InvalidMetric);
  EXPECT_EQ(code_of([] { make_weighted_length(f2, {{"a", 1.0}}); }), ErrorCode::InvalidMetric);
}

TEST(Evaluate, RejectsNonGeodesic) {
  const auto l = make_weighted_length(f2, {{"a", 1.0}, {"b", 1.0}});
  EXPECT_EQ(code_of([&] { evaluate(l, f2.alphabet().parse("abBa")); }), ErrorCode::NotGeodesic);
  EXPECT_DOUBLE_EQ(evaluate_unchecked(l, f2.alphabet().parse("abBa")), 4.0);
}

TEST(Schottky, AxisTranslation) {
  const auto s = default_schottky();
  const Alphabet a = s.alphabet;
  // diag(2, 1/2) moves i to 4i along the imaginary axis.
  for (int n = 1; n <= 40; ++n)
    EXPECT_NEAR(evaluate(s, Word(static_cast<std::size_t>(n), a.find("a"))), n * std::log(4.0), 1e-9 * n);
  // The conjugate of diag(4, 1/4) by a rotation about i has translation length log 16 and fixes the axis through i.
  EXPECT_NEAR(evaluate(s, Word(3, a.find("B"))), 3 * std::log(16.0), 1e-9);
  EXPECT_NEAR(evaluate(s, {}), 0.0, 1e-12);
}

TEST(Schottky, LargeWordsDoNotOverflow) {
  const auto s = default_schottky();
  DisplacementAccumulator acc(s);
  for (int i = 0; i < 2000; ++i) acc.push(s.alphabet.find("a"));
  EXPECT_NEAR(acc.value(), 2000 * std::log(4.0), 1e-6);
}

TEST(Schottky, OriginIsConjugatedAway) {
  const Mat2 a{2.0, 0.0, 0.0, 0.5};
  const Mat2 b{1.0, 1.0, 0.0, 1.0};
  const auto at_i = make_schottky_displacement(f2, {{"a", a}, {"b", b}}, {0.0, 1.0});
  const auto at_2i = make_schottky_displacement(f2, {{"a", a}, {"b", b}}, {0.0, 2.0});
  // a commutes with z -> 2z, so the a-displacement does not depend on the origin on its axis.
  EXPECT_NEAR(evaluate(at_i, {0}), evaluate(at_2i, {0}), 1e-12);
  // The parabolic b moves 2i less than i.
  EXPECT_LT(evaluate(at_2i, {2}), evaluate(at_i, {2}));
}

TEST(Schottky, Errors) {
  const Mat2 a{2.0, 0.0, 0.0, 0.5};
  EXPECT_EQ(code_of([&] { make_schottky_displacement(f2, {{"a", a}, {"b", a}}, {0.0, -1.0}); }), ErrorCode::InvalidOrigin);
  EXPECT_EQ(code_of([&] { make_schottky_displacement(f2, {{"a", {2, 0, 0, 1}}, {"b", a}}, {0.0, 1.0}); }),
            ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([&] { make_schottky_displacement(f2, {{"a", a}}, {0.0, 1.0}); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([] { window_lift(build_free_automaton(2), default_schottky()); }), ErrorCode::NotWindowLocal);
}

TEST(ObservableJson, Kinds) {
  const auto h = observable_from_json(f2, {{"kind", "homomorphism"}, {"weights", {{"a", 1}}}});
  EXPECT_EQ(h.kind, Observable::Kind::homomorphism);
  const auto l = observable_from_json(f2, {{"kind", "word_length"}});
  EXPECT_EQ(l.weights, std::vector<double>(4, 1.0));
  const auto b = observable_from_json(f2, {{"kind", "brooks"}, {"word", "ab"}});
  EXPECT_EQ(b.window, 2);
  const auto s = observable_from_json(f2, {{"kind", "schottky_displacement"}});
  EXPECT_FALSE(s.window);
  EXPECT_EQ(code_of([] { observable_from_json(f2, {{"kind", "banana"}}); }), ErrorCode::InvalidConfig);
  EXPECT_EQ(code_of([] { observable_from_json(f2, {{"weights", 1}}); }), ErrorCode::InvalidConfig);
  EXPECT_EQ(code_of([] { observable_from_json(GroupSpec::free_group(3), {{"kind", "schottky_displacement"}}); }),
            ErrorCode::InvalidConfig);
  EXPECT_EQ(h.to_json()["kind"], "homomorphism");
}

TEST(WindowLift, PathSumEqualsEvaluateOnAllShortWords) {
  const auto m = augment(build_free_automaton(2));
  const std::vector<Observable> observables{
      make_homomorphism(f2, {{"a", 1.0}, {"b", -2.0}}), make_weighted_length(f2, {{"a", 1.0}, {"b", 2.0}}),
      make_brooks(f2, f2.alphabet().parse("ab")), make_brooks(f2, f2.alphabet().parse("aab"))};
  for (const auto& obs : observables) {
    const auto p = window_lift(m, obs);
    for (int n = 0; n <= 6; ++n)
      for (const auto& u : oracle::reduced_words(2, n))
        ASSERT_DOUBLE_EQ(p.path_sum(to_word(u)), evaluate(obs, to_word(u))) << obs.describe();
  }
}

TEST(WindowLift, BrooksHistoryStates) {
  const auto m = augment(build_free_automaton(2));
  const auto p = window_lift(m, make_brooks(f2, f2.alphabet().parse("ab")));
  // * plus (letter vertex, last letter) and (letter vertex, last two letters) histories.
  std::size_t full = 0;
  for (const auto& h : p.history)
    if (h.size() == 2) ++full;
  EXPECT_EQ(full, 12u);
  EXPECT_EQ(p.size(), 1u + 4u + 12u);
  EXPECT_EQ(p.name(m, 0), "*|");
  EXPECT_EQ(code_of([&] { p.path_sum(f2.alphabet().parse("aA")); }), ErrorCode::NotAPath);
}

TEST(Condition2, HomomorphismConstants) {
  const auto h = make_homomorphism(f2, {{"a", 1.0}, {"b", 0.0}});
  const auto r = condition2_check(build_free_automaton(2), h, 200, 10, 1);
  EXPECT_DOUBLE_EQ(r.left_constant, 1.0);
  EXPECT_DOUBLE_EQ(r.right_constant, 1.0);
  EXPECT_DOUBLE_EQ(r.defect, 0.0);
}
