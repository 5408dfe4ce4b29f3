#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "psclt/error.hpp"
#include "psclt/fixtures.hpp"
#include "psclt/subshift.hpp"

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

}  // namespace

TEST(TransitionMatrix, FreeRankTwoEntries) {
  const auto m = augment(build_free_automaton(2));
  const auto t = transition_matrix(m, TransitionMatrix::Variant::full);
  ASSERT_EQ(t.n, 6u);
  EXPECT_EQ(t.row_sum(0), 4);  // * has no identity edge
  for (std::size_t i = 1; i <= 4; ++i) EXPECT_EQ(t.row_sum(i), 4);
  EXPECT_EQ(t(5, 5), 1);
  const auto p = transition_matrix(m, TransitionMatrix::Variant::prime);
  EXPECT_EQ(p.n, 5u);
  EXPECT_EQ(code_of([] { transition_matrix(build_free_automaton(2), TransitionMatrix::Variant::full); }),
            ErrorCode::InvalidArgument);
}

TEST(GrowthRate, FreeGroups) {
  for (int k = 2; k <= 4; ++k) {
    const auto t = transition_matrix(build_free_automaton(k), TransitionMatrix::Variant::prime);
    const auto g = growth_rate(t);
    EXPECT_NEAR(g.lambda, 2.0 * k - 1.0, 1e-10);
    EXPECT_FALSE(g.elementary);
  }
}

TEST(GrowthRate, SurfaceGenusTwoMatchesGrowthSeriesRoot) {
  const auto t = transition_matrix(build_surface_automaton(2), TransitionMatrix::Variant::prime);
  EXPECT_NEAR(growth_rate(t).lambda, oracle::genus2_growth(), 1e-9);
}

TEST(GrowthRate, CycleIsElementary) {
  const TransitionMatrix t({{0, 1, 0}, {0, 0, 1}, {0, 1, 0}});
  const auto g = growth_rate(t);
  EXPECT_NEAR(g.lambda, 1.0, 1e-12);
  EXPECT_TRUE(g.elementary);
}

TEST(Decompose, FreeRankTwo) {
  const auto t = transition_matrix(augment(build_free_automaton(2)), TransitionMatrix::Variant::full);
  const auto c = decompose(t, 3.0, true);
  ASSERT_EQ(c.components.size(), 3u);
  EXPECT_EQ(c.maximal(), std::vector<int>{1});
  EXPECT_EQ(c.components[1].vertices, (std::vector<int>{1, 2, 3, 4}));
  EXPECT_FALSE(c.in_maximal(0));
  EXPECT_TRUE(c.in_maximal(3));
  EXPECT_TRUE(c.reaches[0][1]);
  EXPECT_FALSE(c.reaches[1][0]);
}

TEST(Decompose, ConnectedMaximalComponentsRejected) {
  const auto m = augment(two_block_fixture(true));
  const auto t = transition_matrix(m, TransitionMatrix::Variant::full);
  EXPECT_EQ(code_of([&] { decompose(t, 3.0, true); }), ErrorCode::GroupCodingViolation);
  EXPECT_NO_THROW(decompose(t, 3.0, false));
  EXPECT_EQ(code_of([] { analyze(two_block_fixture(true), Arithmetic::rational); }),
            ErrorCode::GroupCodingViolation);
}

TEST(Decompose, AllGroupCodingsPassDisjointness) {
  for (const auto& m : {build_free_automaton(2), build_free_automaton(3), build_surface_automaton(2)}) {
    const auto t = transition_matrix(augment(m), TransitionMatrix::Variant::full);
    EXPECT_NO_THROW(decompose(t, growth_rate(t).lambda, true));
  }
}

TEST(ComponentRadius, Blocks) {
  const auto m = augment(transient_chain_fixture());
  const auto t = transition_matrix(m, TransitionMatrix::Variant::full);
  const auto c = decompose(t, 3.0, true);
  int radius3 = 0, radius2 = 0;
  for (const auto& comp : c.components) {
    if (std::abs(comp.radius - 3.0) < 1e-9) ++radius3;
    if (std::abs(comp.radius - 2.0) < 1e-9) ++radius2;
  }
  EXPECT_EQ(radius3, 1);
  EXPECT_EQ(radius2, 1);
}

TEST(CesaroProject, ConvergesToEigenvector) {
  const auto t = transition_matrix(augment(build_free_automaton(2)), TransitionMatrix::Variant::full);
  const auto r = cesaro_project(t, std::vector<double>(6, 1.0), 3.0, 4000);
  // A p = 3 p on the letter block; the Cesaro mean converges at rate 1/n.
  for (std::size_t i = 1; i <= 4; ++i) EXPECT_NEAR(r.value[i], 1.5, 1e-3);
  EXPECT_NEAR(r.value[0], 2.0, 1e-3);
  EXPECT_NEAR(r.value[5], 0.0, 1e-3);
}

TEST(SpectralData, FreeRankTwoExact) {
  const auto model = analyze(build_free_automaton(2), Arithmetic::rational);
  ASSERT_TRUE(model.exact());
  const auto& e = *model.spectrum.exact;
  EXPECT_EQ(e.lambda, 3);
  EXPECT_EQ(e.p_one[0], 2);
  for (int i = 1; i <= 4; ++i) EXPECT_EQ(e.p_one[static_cast<std::size_t>(i)], Rational(3, 2));
  EXPECT_EQ(e.p_one[5], 0);
  EXPECT_EQ(e.r_vstar[0], 0);
  for (int i = 1; i <= 4; ++i) EXPECT_EQ(e.r_vstar[static_cast<std::size_t>(i)], Rational(1, 3));
  EXPECT_EQ(e.r_vstar[5], Rational(2, 3));
}

TEST(SpectralData, FloatAgreesWithRational) {
  const auto exact = analyze(build_free_automaton(3), Arithmetic::rational);
  const auto flt = analyze(build_free_automaton(3), Arithmetic::floating);
  ASSERT_FALSE(flt.exact());
  for (std::size_t i = 0; i < exact.spectrum.p_one.size(); ++i) {
    EXPECT_NEAR(flt.spectrum.p_one[i], exact.spectrum.p_one[i], 1e-9);
    EXPECT_NEAR(flt.spectrum.r_vstar[i], exact.spectrum.r_vstar[i], 1e-9);
  }
}

TEST(MarkovMeasure, FreeRankTwoIsNonBacktrackingWalk) {
  const auto model = analyze(build_free_automaton(2), Arithmetic::rational);
  const auto& mu = model.measure;
  for (std::size_t i = 1; i <= 4; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < mu.n; ++j) row += mu(i, j);
    EXPECT_NEAR(row, 1.0, 1e-15);
    for (std::size_t j = 1; j <= 4; ++j) EXPECT_DOUBLE_EQ(mu(i, j), model.a(i, j) ? 1.0 / 3.0 : 0.0);
    EXPECT_EQ(mu.exact->rho[i], Rational(1, 4));
  }
  EXPECT_EQ(mu.exact->N(0, 1), Rational(1, 4));
  EXPECT_EQ(mu.exact->N(5, 5), 1);
  ASSERT_EQ(mu.alpha.size(), 1u);
  EXPECT_EQ(mu.exact->alpha[0], 1);
}

TEST(MarkovMeasure, TwoBlocksSplitMassEvenly) {
  const auto model = analyze(two_block_fixture(false), Arithmetic::rational);
  ASSERT_EQ(model.measure.alpha.size(), 2u);
  EXPECT_EQ(model.measure.exact->alpha[0], Rational(1, 2));
  EXPECT_EQ(model.measure.exact->alpha[1], Rational(1, 2));
}

TEST(MarkovMeasure, SurfaceRowsStochastic) {
  const auto model = analyze(build_surface_automaton(2), Arithmetic::rational);
  EXPECT_FALSE(model.exact());  // irrational growth rate
  EXPECT_FALSE(model.growth.warnings.empty());
  const auto& mu = model.measure;
  for (std::size_t i = 0; i < mu.n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < mu.n; ++j) {
      EXPECT_GE(mu(i, j), 0.0);
      row += mu(i, j);
    }
    EXPECT_NEAR(row, 1.0, 1e-9);
  }
  double rho = 0.0;
  for (double v : mu.rho) rho += v;
  EXPECT_NEAR(rho, 1.0, 1e-9);
  ASSERT_EQ(mu.alpha.size(), 1u);
  EXPECT_NEAR(mu.alpha[0], 1.0, 1e-9);
}

TEST(SpectrumJson, Fields) {
  const auto j = spectrum_to_json(analyze(build_free_automaton(2), Arithmetic::rational));
  EXPECT_DOUBLE_EQ(j["lambda"].get<double>(), 3.0);
  EXPECT_TRUE(j.contains("components"));
  EXPECT_TRUE(j.contains("alpha"));
}
