#include <gtest/gtest.h>

#include <random>

#include "oracle.hpp"
#include "racs/approx_layered.hpp"

using namespace racs;

namespace {

using Layers = std::vector<std::pair<int, Rational>>;

// Repeatedly subtract the smallest positive remaining probability from every
// survivor, one pass per distinct level.
Layers iterative_subtraction(std::vector<Rational> p) {
  Layers out;
  for (;;) {
    Rational smallest = 2;
    int alive = 0;
    for (const auto& x : p) {
      if (x > 0) {
        ++alive;
        if (x < smallest) smallest = x;
      }
    }
    if (alive == 0) return out;
    out.emplace_back(alive, smallest);
    for (auto& x : p) {
      if (x > 0) x -= smallest;
    }
  }
}

Layers as_pairs(const LayerDecomposition<Rational>& dec) {
  Layers out;
  for (const auto& l : dec.layers) out.emplace_back(l.n_k, l.r_k);
  return out;
}

}  // namespace

TEST(DecomposeLayers, Examples) {
  const std::vector<double> bi{0.05, 0.95, 0.95};
  const auto d = decompose_layers(bi);
  ASSERT_EQ(d.layers.size(), 2u);
  EXPECT_EQ(d.layers[0].n_k, 3);
  EXPECT_DOUBLE_EQ(d.layers[0].r_k, 0.05);
  EXPECT_EQ(d.layers[1].n_k, 2);
  EXPECT_NEAR(d.layers[1].r_k, 0.90, 1e-15);
  EXPECT_EQ(d.depth, (std::vector<int>{1, 2, 2}));

  const std::vector<double> flat{0.4, 0.4, 0.4};
  const auto f = decompose_layers(flat);
  ASSERT_EQ(f.layers.size(), 1u);
  EXPECT_EQ(f.layers[0].n_k, 3);
  EXPECT_EQ(f.layers[0].r_k, 0.4);

  const auto exact = decompose_layers(oracle::fracs({"0.1", "0.2", "0.4"}));
  EXPECT_EQ(as_pairs(exact), (Layers{{3, Rational(1, 10)}, {2, Rational(1, 10)}, {1, Rational(1, 5)}}));
}

TEST(DecomposeLayers, ZeroPlayersHaveNoLayers) {
  const auto d = decompose_layers(oracle::fracs({"0", "1/2", "0"}));
  EXPECT_EQ(d.depth, (std::vector<int>{0, 1, 0}));
  EXPECT_EQ(as_pairs(d), (Layers{{1, Rational(1, 2)}}));
}

TEST(DecomposeLayers, Errors) {
  const std::vector<double> none;
  EXPECT_THROW(decompose_layers(none), DomainError);
  const std::vector<double> bad{0.5, 1.5};
  EXPECT_THROW(decompose_layers(bad), DomainError);
}

TEST(DecomposeLayers, MatchesIterativeSubtraction) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> size(1, 12);
  std::uniform_int_distribution<int> num(0, 20);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Rational> p;
    const int n = size(rng);
    for (int j = 0; j < n; ++j) p.emplace_back(num(rng), 20);
    const auto dec = decompose_layers(p);
    ASSERT_EQ(as_pairs(dec), iterative_subtraction(p));
    for (int j = 0; j < n; ++j) {
      Rational rebuilt = 0;
      for (int k = 0; k < dec.depth[static_cast<std::size_t>(j)]; ++k) rebuilt += dec.layers[static_cast<std::size_t>(k)].r_k;
      ASSERT_EQ(rebuilt, p[static_cast<std::size_t>(j)]);
    }
    ASSERT_LE(dec.layers.size(), p.size());
    for (std::size_t k = 1; k < dec.layers.size(); ++k) ASSERT_LT(dec.layers[k].n_k, dec.layers[k - 1].n_k);
  }
}

TEST(LayerShapley, Examples) {
  EXPECT_NEAR(layer_shapley({3, 0.05}), 0.0475417, 1e-7);
  EXPECT_NEAR(layer_shapley({2, 0.90}), 0.495, 1e-15);
  for (int n = 1; n <= 6; ++n) EXPECT_DOUBLE_EQ(layer_shapley({n, 1.0}), 1.0 / n);
  EXPECT_THROW(layer_shapley({0, 0.5}), DomainError);
  EXPECT_THROW(layer_shapley({2, 0.0}), DomainError);
}

TEST(ShapleyLayered, Examples) {
  const std::vector<double> bi{0.05, 0.95, 0.95};
  const auto lit = shapley_layered(bi, LayerVariant::literal);
  EXPECT_NEAR(lit.values[0], 0.00713125, 1e-8);
  EXPECT_NEAR(lit.values[1], 0.898131, 1e-6);
  EXPECT_EQ(lit.values[1], lit.values[2]);

  const auto unw = shapley_layered(bi);
  EXPECT_NEAR(unw.values[0], 0.047542, 1e-6);
  EXPECT_NEAR(unw.values[1], 0.542542, 1e-6);
  EXPECT_EQ(unw.method, Method::layered);
}

TEST(ShapleyLayered, HomogeneousDegeneracy) {
  for (int n = 1; n <= 50; n += 7) {
    const std::vector<double> p(static_cast<std::size_t>(n), 0.23);
    const auto v = shapley_layered(p);
    for (double x : v.values) EXPECT_NEAR(x, shapley_homogeneous(n, 0.23), 1e-12);
    // the weighted combination carries an extra factor n r
    const auto w = shapley_layered(p, LayerVariant::literal);
    EXPECT_NEAR(w.values[0], 0.23 * (1 - std::pow(0.77, n)), 1e-12);
  }
}

TEST(ShapleyLayered, NormalizationTargets) {
  const std::vector<double> p{0.05, 0.95, 0.95};
  for (auto variant : {LayerVariant::literal, LayerVariant::unweighted}) {
    const auto te = shapley_layered(p, variant, Normalize::te);
    EXPECT_NEAR(te.values[0] + te.values[1] + te.values[2], 0.997625, 1e-12);
    const auto one = shapley_layered(p, variant, Normalize::one);
    EXPECT_NEAR(one.values[0] + one.values[1] + one.values[2], 1.0, 1e-12);
  }
}

TEST(SecondOrderDiagnostic, Examples) {
  const std::vector<double> two{0.02, 0.03};
  const auto d = second_order_diagnostic(two, 0);
  EXPECT_NEAR(d.linearized, 0.0197, 1e-15);
  EXPECT_NEAR(d.linearized, oracle::d(oracle::shapley(oracle::fracs({"0.02", "0.03"}), 0)), 5e-5);
  EXPECT_FALSE(d.out_of_validity);

  const std::vector<double> pair{0.35, 0.35};
  EXPECT_NEAR(second_order_diagnostic(pair, 1).linearized, shapley_homogeneous(2, 0.35), 1e-15);

  const std::vector<double> seven{0.2, 0.5, 0.7, 0.3, 0.1, 0.9, 0.4};
  const auto s = second_order_diagnostic(seven, 0);
  EXPECT_NEAR(s.linearized, -0.09, 1e-15);
  EXPECT_TRUE(s.out_of_validity);
}

TEST(WorstCaseRelativeError, Examples) {
  const std::vector<double> half{0.5, 0.5};
  EXPECT_DOUBLE_EQ(worst_case_relative_error(half, 0), 1.0);
  const std::vector<double> sure{1.0, 0.3, 0.2};
  EXPECT_EQ(worst_case_relative_error(sure, 0), 0.0);
  const std::vector<double> bi{0.05, 0.95, 0.95};
  EXPECT_NEAR(worst_case_relative_error(bi, 0), 0.904762, 1e-6);
  const std::vector<double> alone{0.4, 0.0};
  EXPECT_TRUE(std::isinf(worst_case_relative_error(alone, 0)));
}
