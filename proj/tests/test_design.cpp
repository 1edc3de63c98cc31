#include <cmath>
#include <filesystem>

#include <gtest/gtest.h>

#include "semibayes/design.hpp"
#include "semibayes/rng.hpp"

using namespace semibayes;

namespace {

DesignMatrix random_design(Eigen::Index n, Eigen::Index p, std::uint64_t seed) {
  return gen_design(n, p, {}, seed);
}

// Brute-force psi(2)^2 over unit vectors on each coordinate pair.
double grid_psi2(const Eigen::MatrixXd &g) {
  double best = g.diagonal().minCoeff();
  const int steps = 200000;
  for (int a = 0; a < g.rows(); ++a)
    for (int b = a + 1; b < g.rows(); ++b)
      for (int k = 0; k < steps; ++k) {
        const double t = M_PI * k / steps;
        const double c = std::cos(t), s = std::sin(t);
        best = std::min(best, c * c * g(a, a) + 2 * c * s * g(a, b) + s * s * g(b, b));
      }
  return best;
}

// Brute-force phi(2)^2 over the l1 sphere of 2-sparse vectors.
double grid_phi2(const Eigen::MatrixXd &g) {
  double best = g.diagonal().minCoeff();
  const int steps = 200000;
  for (int a = 0; a < g.rows(); ++a)
    for (int b = a + 1; b < g.rows(); ++b)
      for (double sign : {1.0, -1.0})
        for (int k = 1; k < steps; ++k) {
          const double u = static_cast<double>(k) / steps, v = sign * (1.0 - u);
          best = std::min(best, 2.0 * (u * u * g(a, a) + 2 * u * v * g(a, b) + v * v * g(b, b)));
        }
  return best;
}

}  // namespace

TEST(Design, IdentityBlockHasIdentityGram) {
  const DesignMatrix x = gen_design(2, 2, {DesignKind::kIdentityBlock, 0.0}, 0);
  EXPECT_TRUE(x.gram().isApprox(Eigen::MatrixXd::Identity(2, 2), 1e-15));
}

TEST(Design, SeedDeterminism) {
  const DesignMatrix a = random_design(100, 50, 7), b = random_design(100, 50, 7);
  EXPECT_TRUE(a.x().allFinite());
  EXPECT_EQ(a.x(), b.x());
  EXPECT_NE(a.x(), random_design(100, 50, 8).x());
}

TEST(Design, GramMatchesEntries) {
  const DesignMatrix x = random_design(30, 12, 3);
  const Eigen::MatrixXd g = x.x().transpose() * x.x() / 30.0;
  EXPECT_LE((g - x.gram()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_EQ(x.gram(), x.gram().transpose());
}

TEST(Design, RejectsBadArguments) {
  EXPECT_THROW(gen_design(0, 3, {}, 1), ParameterError);
  EXPECT_THROW(gen_design(10, 4, {DesignKind::kEquicorrelated, 1.0}, 1), ParameterError);
  EXPECT_THROW(gen_design(10, 4, {DesignKind::kEquicorrelated, -0.5}, 1), ParameterError);
  Eigen::MatrixXd bad = Eigen::MatrixXd::Ones(2, 2);
  bad(0, 0) = std::nan("");
  EXPECT_THROW(DesignMatrix{bad}, ParameterError);
}

TEST(Design, EntryBoundExamples) {
  EXPECT_EQ(entry_bound_constant(DesignMatrix(Eigen::MatrixXd::Zero(3, 4))), 0.0);
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(3, 4);
  x(1, 2) = 2.0 * std::sqrt(std::log(4.0));
  EXPECT_NEAR(entry_bound_constant(DesignMatrix(x)), 2.0, 1e-15);
  EXPECT_THROW(entry_bound_constant(DesignMatrix(Eigen::MatrixXd::Ones(3, 1))), ParameterError);
}

TEST(Design, EntryBoundRangeOverSeeds) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const double m = entry_bound_constant(random_design(100, 100, seed));
    EXPECT_GE(m, 0.5);
    EXPECT_LE(m, 3.0);
  }
}

TEST(Regularity, IdentityGramGivesOne) {
  const Eigen::MatrixXd g = Eigen::MatrixXd::Identity(6, 6);
  for (int s = 1; s <= 3; ++s) {
    EXPECT_EQ(restricted_eigenvalue(g, s), 1.0);
    EXPECT_EQ(compatibility(g, s), 1.0);
  }
}

TEST(Regularity, EquicorrelatedClosedForm) {
  Eigen::MatrixXd g = Eigen::MatrixXd::Constant(6, 6, 0.5);
  g.diagonal().setOnes();
  const double psi = restricted_eigenvalue(g, 3);
  EXPECT_NEAR(psi * psi, 0.5, 1e-10);
}

TEST(Regularity, OneDimensional) {
  Eigen::MatrixXd g(1, 1);
  g << 2.5;
  const double phi = compatibility(g, 1);
  EXPECT_NEAR(phi * phi, 2.5, 1e-14);
}

TEST(Regularity, MatchesGridSearch) {
  const DesignMatrix x = random_design(8, 6, 11);
  const double psi = restricted_eigenvalue(x.gram(), 2);
  const double phi = compatibility(x.gram(), 2);
  EXPECT_NEAR(psi, std::sqrt(grid_psi2(x.gram())), 1e-4);
  EXPECT_NEAR(phi, std::sqrt(grid_phi2(x.gram())), 1e-4);
}

TEST(Regularity, PsiBelowPhiOnRandomDesigns) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const DesignMatrix x = random_design(8, 6, 1000 + seed);
    for (int s = 1; s <= 3; ++s) {
      const RegularityReport r = regularity(x, s);
      EXPECT_LE(r.psi, r.phi + 1e-12) << "seed " << seed << " s " << s;
    }
  }
}

TEST(Regularity, MonotoneAndScaleCovariant) {
  const DesignMatrix x = random_design(10, 6, 5);
  const DesignMatrix y(3.0 * x.x());
  double prev_phi = INFINITY, prev_psi = INFINITY;
  for (int s = 1; s <= 4; ++s) {
    const RegularityReport r = regularity(x, s);
    EXPECT_LE(r.phi, prev_phi + 1e-12);
    EXPECT_LE(r.psi, prev_psi + 1e-12);
    prev_phi = r.phi;
    prev_psi = r.psi;
    const RegularityReport q = regularity(y, s);
    EXPECT_NEAR(q.phi, 3.0 * r.phi, 1e-10);
    EXPECT_NEAR(q.psi, 3.0 * r.psi, 1e-10);
  }
}

TEST(Regularity, SingularBlockGivesZeroPhi) {
  Eigen::MatrixXd x(4, 3);
  x << 1, 1, 0, 2, 2, 1, 0, 0, 3, 1, 1, 1;
  const RegularityReport r = regularity(DesignMatrix(x), 2);
  EXPECT_NEAR(r.phi, 0.0, 1e-7);
  EXPECT_EQ(r.phi_argmin_support, (Support{0, 1}));
}

TEST(Regularity, CapacityGuard) {
  const Eigen::MatrixXd g = Eigen::MatrixXd::Identity(2000, 2000);
  EXPECT_THROW(restricted_eigenvalue(g, 3), CapacityError);
  EXPECT_THROW(compatibility(g, 0), ParameterError);
}

TEST(Regularity, SampledModeOverestimates) {
  const DesignMatrix x = random_design(12, 10, 2);
  const RegularityReport exact = regularity(x, 2);
  const RegularityReport sampled = regularity_sampled(x, 2, 20, 9);
  EXPECT_FALSE(sampled.exact);
  EXPECT_GE(sampled.psi, exact.psi - 1e-12);
  EXPECT_GE(sampled.phi, exact.phi - 1e-12);
}

TEST(Design, CsvRoundTrip) {
  const DesignMatrix x = random_design(5, 3, 4);
  const auto path = std::filesystem::temp_directory_path() / "semibayes_design_test.csv";
  write_design_csv(x, path);
  EXPECT_EQ(read_design_csv(path).x(), x.x());
  std::filesystem::remove(path);
}
