#include <gtest/gtest.h>

#include "oracle.hpp"
#include "racs/exact_engine.hpp"

using namespace racs;

namespace {

BernoulliGame game_of(std::initializer_list<std::string_view> p) { return BernoulliGame::from_strings(p); }

const BernoulliGame& seven() {
  static const auto g = game_of({"0.2", "0.5", "0.7", "0.3", "0.1", "0.9", "0.4"});
  return g;
}

}  // namespace

TEST(ExactEnum, SymmetricGameIsExact) {
  const auto g = BernoulliGame::homogeneous(6, Probability::parse("1/2"));
  for (int i = 0; i < 6; ++i) EXPECT_EQ(shapley_exact_enum<Rational>(g, i), Rational(21, 128));
}

TEST(ExactEnum, MatchesOracleExactly) {
  for (auto probs : {std::vector<std::string_view>{"1/2", "1/3", "1/6"},
                     std::vector<std::string_view>{"0.05", "0.95", "0.95"},
                     std::vector<std::string_view>{"0.2", "0.5", "0.7", "0.3", "0.1", "0.9", "0.4"}}) {
    const auto g = BernoulliGame::from_strings(std::span<const std::string_view>{probs});
    const auto p = g.exact_probabilities();
    for (int i = 0; i < g.size(); ++i) EXPECT_EQ(shapley_exact_enum<Rational>(g, i), oracle::shapley(p, i));
  }
}

TEST(ExactEnum, FrozenExamples) {
  const auto net = exact_shapley_values<double>(game_of({"1/2", "1/3", "1/6"}), Method::exact_enum);
  EXPECT_NEAR(net[0], 0.384259, 1e-6);
  EXPECT_NEAR(net[1], 0.231481, 1e-6);
  EXPECT_NEAR(net[2], 0.106481, 1e-6);

  const auto bi = exact_shapley_values<double>(game_of({"0.05", "0.95", "0.95"}), Method::exact_enum);
  EXPECT_NEAR(bi[0], 0.017542, 1e-6);
  EXPECT_NEAR(bi[1], 0.490042, 1e-6);
  EXPECT_NEAR(bi[0] + bi[1] + bi[2], 0.997625, 1e-12);
}

TEST(ExactEnum, SizeLimit) {
  const auto g = BernoulliGame::homogeneous(25, Probability::parse("0.1"));
  EXPECT_THROW(shapley_exact_enum(g, 0), SizeLimitError);
  EXPECT_THROW(shapley_exact_enum(game_of({"0.1", "0.2", "0.3"}), 0, 2), SizeLimitError);
  EXPECT_THROW(shapley_exact_enum(game_of({"0.1"}), 1), DomainError);
}

TEST(ExactCapacity, AgreesWithEnumeration) {
  const auto cap = build_capacity_table(seven());
  for (int i = 0; i < 7; ++i) {
    EXPECT_NEAR(static_cast<double>(shapley_exact_capacity(cap, i)), shapley_exact_enum(seven(), i), 1e-12);
  }
}

TEST(ExactCapacity, UnanimityGame) {
  const Subset carrier = 0b01101;
  const auto cap = unanimity_game(5, carrier);
  for (int i = 0; i < 5; ++i) {
    const double expected = (carrier >> i) & 1 ? 1.0 / 3.0 : 0.0;
    EXPECT_NEAR(static_cast<double>(shapley_exact_capacity(cap, i)), expected, 1e-15) << i;
  }
}

TEST(PermutationOracle, Examples) {
  EXPECT_NEAR(static_cast<double>(shapley_permutation_oracle(build_capacity_table(game_of({"0.3"})), 0)), 0.3, 1e-15);
  EXPECT_NEAR(static_cast<double>(shapley_permutation_oracle(build_capacity_table(game_of({"0.4", "0.6"})), 0)), 0.28,
              1e-15);
  EXPECT_NEAR(static_cast<double>(shapley_permutation_oracle(build_capacity_table(game_of({"1/2", "1/3", "1/6"})), 0)),
              0.384259, 1e-6);
  const auto nine = BernoulliGame::homogeneous(9, Probability::parse("0.1"));
  EXPECT_THROW(shapley_permutation_oracle(build_capacity_table(nine), 0), SizeLimitError);
}

TEST(PermutationOracle, MatchesOrderOracle) {
  const auto p = seven().exact_probabilities();
  const auto cap = build_capacity_table(seven());
  for (int i = 0; i < 7; ++i) {
    EXPECT_NEAR(static_cast<double>(shapley_permutation_oracle(cap, i)), oracle::d(oracle::shapley_by_orders(p, i)),
                1e-13);
  }
}

TEST(Homogeneous, Examples) {
  EXPECT_EQ(shapley_homogeneous<Rational>(6, Rational(1, 2)), Rational(21, 128));
  EXPECT_EQ(shapley_homogeneous<Rational>(6, Rational(3, 5)), Rational(5187, 31250));
  EXPECT_NEAR(shapley_homogeneous(6, 0.6), 0.165984, 1e-6);
  for (int n = 1; n <= 10; ++n) EXPECT_DOUBLE_EQ(shapley_homogeneous(n, 1.0), 1.0 / n);
  EXPECT_DOUBLE_EQ(shapley_homogeneous(1, 0.37), 0.37);
  EXPECT_THROW(shapley_homogeneous(0, 0.5), DomainError);
  EXPECT_THROW(shapley_homogeneous(3, 1.5), DomainError);
}

TEST(Homogeneous, NeedsIdenticalProbabilities) {
  EXPECT_THROW(exact_shapley_values<double>(seven(), Method::homogeneous), DomainError);
  const auto v = exact_shapley_values<Rational>(BernoulliGame::homogeneous(4, Probability::parse("1/3")),
                                                Method::homogeneous);
  EXPECT_EQ(v[3], oracle::shapley(oracle::fracs({"1/3", "1/3", "1/3", "1/3"}), 3));
}

TEST(SymmetricSums, Examples) {
  const std::vector<double> none;
  const auto e0 = elementary_symmetric_sums<double>(std::span<const double>{none});
  ASSERT_EQ(e0.size(), 1u);
  EXPECT_EQ(e0[0], 1.0);

  const std::vector<double> two{0.8, 0.5};
  const auto e2 = elementary_symmetric_sums<double>(std::span<const double>{two});
  EXPECT_DOUBLE_EQ(e2[0], 1.0);
  EXPECT_DOUBLE_EQ(e2[1], 1.3);
  EXPECT_DOUBLE_EQ(e2[2], 0.4);

  const std::vector<double> six{0.8, 0.5, 0.3, 0.7, 0.1, 0.6};
  const auto e6 = elementary_symmetric_sums<double>(std::span<const double>{six});
  EXPECT_NEAR(e6[2], 3.58, 1e-13);
  EXPECT_NEAR(e6[6], 0.00504, 1e-15);
}

TEST(SymmetricSums, TruncatedDegree) {
  const std::vector<double> v{0.1, 0.2, 0.3};
  const auto e = elementary_symmetric_sums<double>(std::span<const double>{v}, 1);
  ASSERT_EQ(e.size(), 2u);
  EXPECT_NEAR(e[1], 0.6, 1e-15);
  EXPECT_THROW(elementary_symmetric_sums<double>(std::span<const double>{v}, 4), DomainError);
}

TEST(SymmetricMeans, EqualSumsOverBinomials) {
  const auto q = oracle::fracs({"0.8", "0.5", "0.3", "0.7", "0.1", "0.6"});
  const auto e = elementary_symmetric_sums<Rational>(std::span<const Rational>{q});
  const auto m = elementary_symmetric_means<Rational>(std::span<const Rational>{q});
  for (std::size_t k = 0; k <= q.size(); ++k) {
    EXPECT_EQ(m[k] * Rational{detail::binomial(6, static_cast<int>(k))}, e[k]) << k;
  }
}

TEST(ExactSymmetric, Examples) {
  EXPECT_NEAR(shapley_exact_symmetric(game_of({"1/2", "1/3", "1/6"}), 0), 0.384259, 1e-6);
  EXPECT_NEAR(shapley_exact_symmetric(seven(), 4), 0.027318, 1e-6);
  const auto g = BernoulliGame::homogeneous(9, Probability::parse("0.37"));
  EXPECT_EQ(shapley_exact_symmetric<Rational>(g, 2), shapley_homogeneous<Rational>(9, Rational(37, 100)));
  EXPECT_NEAR(shapley_exact_symmetric(g, 2), shapley_homogeneous(9, 0.37), 1e-15);
}

TEST(ExactSymmetric, FrozenSevenPlayerValues) {
  const double expected[] = {0.055997, 0.152453, 0.229360333, 0.086231, 0.027318333, 0.325833, 0.118271333};
  const auto p = seven().exact_probabilities();
  double sum = 0;
  for (int i = 0; i < 7; ++i) {
    const double v = shapley_exact_symmetric(seven(), i);
    EXPECT_NEAR(v, expected[i], 5e-7) << i;
    EXPECT_NEAR(v, oracle::d(oracle::shapley(p, i)), 1e-15) << i;
    EXPECT_EQ(shapley_exact_symmetric<Rational>(seven(), i), oracle::shapley(p, i));
    sum += v;
  }
  EXPECT_NEAR(sum, 0.995464, 1e-10);
}

TEST(ExactIntegral, Examples) {
  EXPECT_NEAR(shapley_exact_integral(game_of({"0.4", "0.6"}), 0), 0.28, 1e-15);
  EXPECT_NEAR(shapley_exact_integral(game_of({"1/2", "1/3", "1/6"}), 0), 0.384259, 1e-6);
  EXPECT_EQ(shapley_exact_integral(game_of({"0", "0.5", "0.9"}), 0), 0.0);
  const auto p = seven().exact_probabilities();
  for (int i = 0; i < 7; ++i) EXPECT_EQ(shapley_exact_integral<Rational>(seven(), i), oracle::shapley(p, i));
}

TEST(OneVsMeanReference, Examples) {
  EXPECT_NEAR(shapley_one_vs_mean_reference(0.3, 0.3, 5), shapley_homogeneous(5, 0.3), 1e-15);
  EXPECT_NEAR(shapley_one_vs_mean_reference(0.5, 1.0 / 3.0, 3), 0.259259, 1e-6);
  // not exact off the diagonal
  EXPECT_NEAR(oracle::d(oracle::shapley(oracle::fracs({"1/2", "1/3", "1/3"}), 0)), 0.351852, 1e-6);
  EXPECT_DOUBLE_EQ(shapley_one_vs_mean_reference(1.0, 0.42, 4), 0.25);
  EXPECT_THROW(shapley_one_vs_mean_reference(0.5, 0.5, 0), DomainError);
}

TEST(ExactWrappers, MethodsAgree) {
  const auto a = exact_shapley(seven(), Method::exact_enum);
  const auto b = exact_shapley(seven(), Method::exact_symmetric);
  const auto c = exact_shapley(seven(), Method::exact_integral);
  const auto d = permutation_shapley(seven());
  for (int i = 0; i < 7; ++i) {
    EXPECT_NEAR(a.values[i], b.values[i], 1e-14);
    EXPECT_NEAR(a.values[i], c.values[i], 1e-14);
    EXPECT_NEAR(a.values[i], d.values[i], 1e-14);
  }
  EXPECT_EQ(b.method, Method::exact_symmetric);
  EXPECT_THROW(exact_shapley(seven(), Method::racs), DomainError);
}

TEST(ExactSymmetric, LargeGameStaysFiniteAndEfficient) {
  std::vector<double> p;
  for (int k = 1; k <= 200; ++k) p.push_back(1.0 / (k + 1));
  const auto g = BernoulliGame::from_doubles(std::span<const double>{p});
  const auto v = exact_shapley_values<double>(g, Method::exact_symmetric);
  long double sum = 0;
  for (double x : v) {
    ASSERT_TRUE(std::isfinite(x));
    ASSERT_GE(x, 0);
    sum += x;
  }
  EXPECT_NEAR(static_cast<double>(sum), static_cast<double>(total_capacity(g)), 1e-12);
}
