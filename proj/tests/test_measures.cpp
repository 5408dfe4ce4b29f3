#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>

#include "psclt/error.hpp"
#include "psclt/fixtures.hpp"
#include "psclt/measures.hpp"

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

const CodingModel& free2() {
  static const CodingModel m = analyze(build_free_automaton(2), Arithmetic::rational);
  return m;
}

// Every letter path of length n from *.
void for_each_path(const MarkovAutomaton& m, int n, const std::function<void(const Path&)>& f) {
  Path p{m.start()};
  std::function<void()> rec = [&] {
    if (static_cast<int>(p.size()) == n + 1) {
      f(p);
      return;
    }
    for (int e : m.out(p.back())) {
      const auto& edge = m.edges()[static_cast<std::size_t>(e)];
      if (edge.label == kIdentityLabel) continue;
      p.push_back(edge.to);
      rec();
      p.pop_back();
    }
  };
  rec();
}

}  // namespace

TEST(CylinderMeasure, DepthMassesSumToOneExactly) {
  const CylinderMeasure nu(free2());
  for (int n = 1; n <= 10; ++n) {
    Rational total = 0;
    for_each_path(free2().automaton, n, [&](const Path& p) { total += nu.mass_exact(p); });
    EXPECT_EQ(total, 1) << "n = " << n;
  }
}

TEST(CylinderMeasure, SingleCylinderMass) {
  const CylinderMeasure nu(free2());
  const auto& m = free2().automaton;
  const Word w = m.alphabet().parse("abAB");
  for (std::size_t n = 1; n <= w.size(); ++n) {
    const Path p = encode(m, Word(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(n)));
    Rational expect(1, 4);
    for (std::size_t k = 1; k < n; ++k) expect /= 3;
    EXPECT_EQ(nu.mass_exact(p), expect);
    EXPECT_NEAR(nu.mass(p), expect.get_d(), 1e-15);
  }
}

TEST(CylinderMeasure, Errors) {
  const CylinderMeasure nu(free2());
  EXPECT_EQ(code_of([&] { nu.mass({1}); }), ErrorCode::NotAPath);
  EXPECT_EQ(code_of([&] { nu.mass({0, 1, 2}); }), ErrorCode::NotAPath);
  EXPECT_EQ(code_of([&] { nu.next_step(free2().automaton.zero()); }), ErrorCode::NullState);
  const auto row = nu.next_step(1);
  EXPECT_DOUBLE_EQ(row[1], 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(row[2], 0.0);
}

TEST(RayStream, DeterministicAndDistinct) {
  auto a = ray_stream(42, 7), b = ray_stream(42, 7), c = ray_stream(42, 8), d = ray_stream(43, 7);
  const auto x = a();
  EXPECT_EQ(x, b());
  EXPECT_NE(x, c());
  EXPECT_NE(x, d());
  auto r = ray_stream(1, 0);
  for (int i = 0; i < 1000; ++i) {
    const double u = uniform01(r);
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

TEST(SampleRay, FollowsEdgesAndIsReproducible) {
  const auto& model = free2();
  const auto a = sample_ray(model, RayKind::boundary, 50, 9, 10);
  const auto b = sample_ray(model, RayKind::boundary, 50, 9, 10);
  EXPECT_EQ(a.path, b.path);
  ASSERT_EQ(a.path.size(), 51u);
  EXPECT_EQ(a.path.front(), 0);
  for (std::size_t i = 1; i < a.path.size(); ++i) EXPECT_TRUE(model.automaton.has_edge(a.path[i - 1], a.path[i]));
  EXPECT_EQ(a.checkpoints.size(), 5u);
  EXPECT_NO_THROW(decode(model.automaton, a.path));
  const auto inv = sample_ray(model, RayKind::invariant, 20, 3);
  EXPECT_NE(inv.path.front(), 0);
}

TEST(ChainSampler, FirstStepFrequencies) {
  const auto& model = free2();
  const ChainSampler s(model.measure);
  std::vector<int> counts(model.automaton.size(), 0);
  const int draws = 200000;
  auto rng = ray_stream(5, 0);
  for (int i = 0; i < draws; ++i) ++counts[static_cast<std::size_t>(s.step(0, rng))];
  for (int v = 1; v <= 4; ++v) EXPECT_NEAR(counts[static_cast<std::size_t>(v)] / double(draws), 0.25, 0.005);
}

TEST(Pushforward, AlphaIsOneOnFreeRankTwo) {
  const auto t = pushforward_table(free2(), 20);
  ASSERT_TRUE(t.alpha_exact);
  for (int k = 1; k <= 20; ++k)
    for (int v = 1; v <= 4; ++v) {
      EXPECT_EQ((*t.alpha_exact)[static_cast<std::size_t>(k) * t.n + static_cast<std::size_t>(v)], 1);
      EXPECT_EQ((*t.nu_exact)[static_cast<std::size_t>(k) * t.n + static_cast<std::size_t>(v)], Rational(1, 4));
    }
  EXPECT_DOUBLE_EQ(pushforward_coefficient(free2(), 3, 2), 1.0);
}

TEST(CesaroTv, ExactlyOneOverN) {
  const auto series = cesaro_tv_series(free2(), 512);
  ASSERT_EQ(series.size(), 512u);
  for (int n = 1; n <= 512; ++n) {
    const auto& v = series[static_cast<std::size_t>(n - 1)];
    ASSERT_TRUE(v.exact);
    EXPECT_EQ(*v.exact * n, 1) << "n = " << n;
  }
  EXPECT_DOUBLE_EQ(cesaro_tv_depth1(free2(), 9).value, 1.0 / 9.0);
}

TEST(TruncationTail, ZeroOnFreeRankTwo) {
  for (int n = 1; n <= 20; ++n) {
    const auto t = truncation_tail(free2(), n);
    ASSERT_TRUE(t.exact);
    EXPECT_EQ(*t.exact, 0);
  }
}

TEST(TruncationTail, GeometricDecayOnTransientChain) {
  const auto model = analyze(transient_chain_fixture(), Arithmetic::rational);
  for (int n = 0; n < 3; ++n) EXPECT_GT(truncation_tail(model, n).value, 0.0);
  double prev = 1.0;
  for (int n = 0; n <= 40; ++n) {
    const double t = truncation_tail(model, n).value;
    EXPECT_LE(t, prev + 1e-15);
    prev = t;
  }
  // Decay ratio (lambda - delta) / lambda with a radius-2 transient block under lambda = 3.
  const double ratio = truncation_tail(model, 41).value / truncation_tail(model, 40).value;
  EXPECT_NEAR(ratio, 2.0 / 3.0, 0.01);
}

TEST(SeriesCsv, Format) {
  const auto path = (std::filesystem::temp_directory_path() / "psclt_series.csv").string();
  write_series_csv(path, {{1, 0.5}, {2, 0.25}});
  std::ifstream in(path);
  std::string header, line;
  std::getline(in, header);
  std::getline(in, line);
  EXPECT_EQ(header, "n,value");
  EXPECT_EQ(line.substr(0, 2), "1,");
}
