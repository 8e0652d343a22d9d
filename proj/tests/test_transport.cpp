#include <cmath>
#include <random>
#include <vector>

#include <boost/math/distributions/normal.hpp>
#include <gtest/gtest.h>

#include "fairot/synth.hpp"
#include "fairot/transport.hpp"
#include "support.hpp"

using fairot::EmpiricalDistribution;
using fairot::FairnessProfile;
using fairot::from_samples;

namespace {

FairnessProfile profile_of(std::vector<EmpiricalDistribution> ds, std::vector<double> w) {
  std::vector<fairot::GroupDistribution> g;
  for (std::size_t s = 0; s < ds.size(); ++s) g.push_back({static_cast<int>(s) + 1, w[s], ds[s]});
  return FairnessProfile(std::move(g));
}

// mu1 = {(0, 1/2), (1, 1/2)}, mu2 = {(0, 1/3), (2, 2/3)}
FairnessProfile two_atom_profile() {
  return profile_of({from_samples(std::vector<double>{0, 1}),
                     from_samples(std::vector<double>{0, 2}, std::vector<double>{1, 2})},
                    {0.5, 0.5});
}

std::vector<double> gaussian_sample(double mean, std::size_t n, std::uint64_t seed) {
  fairot::Rng rng(seed);
  std::vector<double> out(n);
  for (auto& x : out) x = mean + fairot::standard_normal(rng);
  return out;
}

}  // namespace

TEST(FairnessProfile, Validation) {
  const auto d = EmpiricalDistribution::point_mass(0);
  EXPECT_THROW(FairnessProfile({}), fairot::InputError);
  EXPECT_THROW(FairnessProfile({{1, 0.5, d}, {1, 0.5, d}}), fairot::InputError);
  EXPECT_THROW(FairnessProfile({{1, 0.5, d}, {2, 0.6, d}}), fairot::NumericalError);
  EXPECT_THROW(FairnessProfile({{1, 1.0, d}, {2, 0.0, d}}), fairot::NumericalError);
  const FairnessProfile p({{3, 0.25, d}, {7, 0.75, d}});
  EXPECT_EQ(p.require_index(7), 1u);
  EXPECT_THROW(p.require_index(2), fairot::InputError);
}

TEST(W2Squared, PointMasses) {
  EXPECT_DOUBLE_EQ(fairot::w2_squared(EmpiricalDistribution::point_mass(1.5), EmpiricalDistribution::point_mass(-2)),
                   12.25);
}

TEST(W2Squared, IdentityIsZero) {
  const auto d = from_samples(std::vector<double>{0.3, 1, 7, 7, 9});
  EXPECT_EQ(fairot::w2_squared(d, d), 0.0);
}

TEST(W2Squared, TwoAtomMatchesPermutationOracle) {
  const auto oracle = fairot::testing::w2_squared_by_permutations({0, 2}, {1, 3});
  EXPECT_DOUBLE_EQ(oracle, 1.0);
  EXPECT_DOUBLE_EQ(fairot::w2_squared(from_samples(std::vector<double>{0, 2}), from_samples(std::vector<double>{1, 3})),
                   oracle);
}

TEST(W2Squared, UniformMeasuresMatchPermutationOracle) {
  std::mt19937_64 gen(3);
  std::normal_distribution<double> nd(0, 2);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> a(5), b(5);
    for (auto& x : a) x = nd(gen);
    for (auto& x : b) x = nd(gen);
    EXPECT_NEAR(fairot::w2_squared(from_samples(a), from_samples(b)),
                fairot::testing::w2_squared_by_permutations(a, b), 1e-12);
  }
}

TEST(ComonotoneCoupling, SingleMarginalReproducesIt) {
  const auto d = from_samples(std::vector<double>{1, 4, 4, 9});
  const auto c = fairot::comonotone_coupling(profile_of({d}, {1.0}));
  ASSERT_EQ(c.size(), d.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    EXPECT_EQ(c[i].values[0], d.value(i));
    EXPECT_EQ(c[i].barycenter_value, d.value(i));
  }
  EXPECT_EQ(fairot::multimarginal_cost(c), 0.0);
  EXPECT_EQ(fairot::barycenter(c), d);
}

TEST(ComonotoneCoupling, PointMasses) {
  const auto p = profile_of({EmpiricalDistribution::point_mass(0), EmpiricalDistribution::point_mass(4)}, {0.5, 0.5});
  const auto c = fairot::comonotone_coupling(p);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c[0].level_lo, 0.0);
  EXPECT_EQ(c[0].level_hi, 1.0);
  EXPECT_EQ(c[0].values, (std::vector<double>{0, 4}));
  EXPECT_EQ(c[0].barycenter_value, 2.0);
  EXPECT_EQ(fairot::multimarginal_cost(c), 4.0);
  EXPECT_EQ(fairot::barycenter(p), EmpiricalDistribution::point_mass(2));
}

TEST(ComonotoneCoupling, TwoAtomExample) {
  const auto c = fairot::comonotone_coupling(two_atom_profile());
  ASSERT_EQ(c.size(), 3u);
  const double lo[] = {0, 1.0 / 3.0, 0.5};
  const double hi[] = {1.0 / 3.0, 0.5, 1};
  const std::vector<double> vals[] = {{0, 0}, {0, 2}, {1, 2}};
  const double bary[] = {0, 1, 1.5};
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_DOUBLE_EQ(c[i].level_lo, lo[i]);
    EXPECT_DOUBLE_EQ(c[i].level_hi, hi[i]);
    EXPECT_EQ(c[i].values, vals[i]);
    EXPECT_DOUBLE_EQ(c[i].barycenter_value, bary[i]);
  }
  // 1/3 * 0 + 1/6 * 1 + 1/2 * 1/4
  EXPECT_NEAR(fairot::multimarginal_cost(c), 7.0 / 24.0, 1e-15);
}

TEST(ComonotoneCoupling, SegmentLookup) {
  const auto c = fairot::comonotone_coupling(two_atom_profile());
  EXPECT_EQ(c.segment_index(0.1), 0u);
  EXPECT_EQ(c.segment_index(1.0 / 3.0), 0u);
  EXPECT_EQ(c.segment_index(0.4), 1u);
  EXPECT_EQ(c.segment_index(0.5), 1u);
  EXPECT_EQ(c.segment_index(1.0), 2u);
  EXPECT_THROW(c.segment_index(1.1), fairot::InputError);
}

TEST(MultimarginalCoupling, RejectsGaps) {
  std::vector<fairot::CouplingSegment> segs{{0, 0.5, {1}, 1}, {0.6, 1, {2}, 2}};
  EXPECT_THROW(fairot::MultimarginalCoupling(segs, {1.0}), fairot::NumericalError);
}

TEST(Barycenter, IdenticalInputs) {
  const auto d = from_samples(std::vector<double>{-1, 0.5, 2, 2});
  EXPECT_EQ(fairot::barycenter(profile_of({d, d, d}, {0.2, 0.3, 0.5})), d);
}

TEST(Barycenter, GaussianLargeSample) {
  const auto p = profile_of({from_samples(gaussian_sample(0, 100000, 1)), from_samples(gaussian_sample(4, 100000, 2))},
                            {0.5, 0.5});
  const auto bary = fairot::barycenter(p);
  EXPECT_LT(std::sqrt(fairot::synth::w2_squared_to_gaussian(bary, 2.0, 1.0)), 0.05);
}

// Checks the closed-form Gaussian W2 used by the test above against midpoint
// quadrature of the quantile difference.
TEST(Barycenter, GaussianW2ClosedFormMatchesQuadrature) {
  const auto d = from_samples(std::vector<double>{-1.2, -0.1, 0.4, 0.9, 2.5}, std::vector<double>{1, 2, 3, 2, 1});
  const boost::math::normal nd(0.3, 1.1);
  const int n = 2000000;
  double quad = 0.0;
  for (int i = 0; i < n; ++i) {
    const double t = (i + 0.5) / n;
    const double diff = d.quantile(t) - boost::math::quantile(nd, t);
    quad += diff * diff / n;
  }
  EXPECT_NEAR(fairot::synth::w2_squared_to_gaussian(d, 0.3, 1.1), quad, 1e-5);
}

// ---- properties ----

TEST(TransportProperties, SquaredMetricAxioms) {
  std::mt19937_64 gen(17);
  for (int trial = 0; trial < 500; ++trial) {
    const auto p = fairot::testing::random_distribution(gen, 6);
    const auto q = fairot::testing::random_distribution(gen, 6);
    const auto r = fairot::testing::random_distribution(gen, 6);
    const double pq = fairot::w2_squared(p, q);
    EXPECT_GE(pq, 0.0);
    EXPECT_EQ(pq, fairot::w2_squared(q, p));
    EXPECT_EQ(pq == 0.0, p == q);
    EXPECT_LE(std::sqrt(pq), std::sqrt(fairot::w2_squared(p, r)) + std::sqrt(fairot::w2_squared(r, q)) + 1e-9);
  }
}

TEST(TransportProperties, AffineScaling) {
  std::mt19937_64 gen(19);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int trial = 0; trial < 200; ++trial) {
    const auto p = fairot::testing::random_distribution(gen, 6);
    const auto q = fairot::testing::random_distribution(gen, 6);
    double a = u(gen);
    if (a == 0.0) a = 1.0;
    const double c = u(gen);
    auto push = [&](const EmpiricalDistribution& d) {
      std::vector<double> v;
      for (double x : d.values()) v.push_back(a * x + c);
      return from_samples(v, d.weights());
    };
    EXPECT_NEAR(fairot::w2_squared(push(p), push(q)), a * a * fairot::w2_squared(p, q), 1e-9);
  }
}

TEST(TransportProperties, MarginalsReassembleExactly) {
  std::mt19937_64 gen(23);
  for (int trial = 0; trial < 300; ++trial) {
    const auto profile = fairot::testing::random_profile(gen, 4, 6);
    const auto c = fairot::comonotone_coupling(profile);
    for (std::size_t s = 0; s < profile.size(); ++s)
      EXPECT_EQ(fairot::coupling_marginal(c, s), profile[s].distribution);
    double total = 0.0;
    for (const auto& seg : c.segments()) {
      EXPECT_NEAR(seg.barycenter_value, fairot::barycenter_map(c.weights(), seg.values), 0.0);
      total += seg.length();
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(TransportProperties, CostEqualsWeightedW2ToBarycenter) {
  std::mt19937_64 gen(29);
  for (int trial = 0; trial < 300; ++trial) {
    const auto profile = fairot::testing::random_profile(gen, 4, 6);
    const auto c = fairot::comonotone_coupling(profile);
    EXPECT_NEAR(fairot::multimarginal_cost(c), fairot::weighted_w2_cost(profile, fairot::barycenter(c)), 1e-9);
  }
}

TEST(TransportProperties, BarycenterBeatsRandomCandidates) {
  std::mt19937_64 gen(31);
  for (int trial = 0; trial < 50; ++trial) {
    const auto profile = fairot::testing::random_profile(gen, 4, 5);
    const double cost = fairot::multimarginal_cost(fairot::comonotone_coupling(profile));
    for (int c = 0; c < 100; ++c) {
      const auto candidate = fairot::testing::random_distribution(gen, 8);
      EXPECT_LE(cost, fairot::weighted_w2_cost(profile, candidate) + 1e-12);
    }
  }
}
