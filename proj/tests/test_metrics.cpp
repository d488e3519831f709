#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "hawkes/metrics.hpp"
#include "oracles.hpp"

using namespace hawkes;

namespace {

Matrix random_matrix(std::mt19937_64& rng, Eigen::Index d, double sparsity) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  return Matrix::NullaryExpr(d, d, [&]() { return unit(rng) < sparsity ? 0.0 : unit(rng); });
}

}  // namespace

TEST_CASE("hamming distance on supports") {
  Matrix truth(2, 2);
  truth << 1.0, 0.5, 0.2, 0.7;
  CHECK(metrics::hamming(truth, truth) == 0.0);
  CHECK(metrics::hamming(truth, Matrix::Zero(2, 2)) == 1.0);

  // A 6%-dense truth against the null estimate scores exactly its density.
  Matrix sparse = Matrix::Zero(10, 10);
  sparse(0, 1) = 0.3;
  sparse(2, 5) = 0.4;
  sparse(3, 3) = 0.1;
  sparse(6, 2) = 0.9;
  sparse(7, 8) = 0.2;
  sparse(9, 0) = 0.6;
  CHECK(metrics::hamming(sparse, Matrix::Zero(10, 10)) == doctest::Approx(0.06));

  // Same support, different values: the support metric ignores magnitudes,
  // the literal variant does not.
  CHECK(metrics::hamming(truth, 2.0 * truth) == 0.0);
  CHECK(metrics::hamming_values(truth, 2.0 * truth) == 1.0);

  CHECK_THROWS_AS(metrics::hamming(truth, Matrix::Zero(3, 3)), std::invalid_argument);
}

TEST_CASE("hamming is symmetric and zero only on equal supports") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const Matrix a = random_matrix(rng, 4, 0.5);
    const Matrix b = random_matrix(rng, 4, 0.5);
    CHECK(metrics::hamming(a, b) == metrics::hamming(b, a));
    const bool same_support = ((a.array() != 0.0) == (b.array() != 0.0)).all();
    CHECK((metrics::hamming(a, b) == 0.0) == same_support);
  }
}

TEST_CASE("relative error") {
  CHECK(metrics::rel_err(Matrix::Constant(1, 1, 2.0), Matrix::Constant(1, 1, 2.0)) == 0.0);
  CHECK(metrics::rel_err(Matrix::Constant(1, 1, 2.0), Matrix::Constant(1, 1, 1.0)) ==
        doctest::Approx(0.5));
  CHECK(metrics::rel_err(Matrix::Zero(1, 1), Matrix::Constant(1, 1, 0.3)) ==
        doctest::Approx(0.3));

  SUBCASE("invariant under simultaneous permutations") {
    std::mt19937_64 rng(9);
    const Matrix a = random_matrix(rng, 4, 0.3);
    const Matrix b = random_matrix(rng, 4, 0.3);
    Eigen::PermutationMatrix<Eigen::Dynamic> perm(4);
    perm.setIdentity();
    std::shuffle(perm.indices().data(), perm.indices().data() + 4, rng);
    const Matrix pa = perm * a * perm.transpose();
    const Matrix pb = perm * b * perm.transpose();
    CHECK(metrics::rel_err(pa, pb) == doctest::Approx(metrics::rel_err(a, b)).epsilon(1e-14));
  }
}

TEST_CASE("kendall rank correlation") {
  SUBCASE("identical distinct rows correlate fully") {
    Matrix a(2, 4);
    a << 1.0, 2.0, 3.0, 4.0, 0.4, 0.1, 0.9, 0.2;
    CHECK(metrics::rank_corr(a, a) == doctest::Approx(1.0));
  }
  SUBCASE("reversing the order statistics flips the sign") {
    Matrix a(1, 4);
    a << 1.0, 2.0, 3.0, 4.0;
    Matrix b(1, 4);
    b << 4.0, 3.0, 2.0, 1.0;
    CHECK(metrics::rank_corr(a, b) == doctest::Approx(-1.0));
  }
  SUBCASE("constant rows contribute zero") {
    Matrix a(1, 3);
    a << 1.0, 1.0, 1.0;
    Matrix b(1, 3);
    b << 0.1, 0.5, 0.2;
    CHECK(metrics::rank_corr(a, b) == 0.0);
  }
  SUBCASE("matches the pair-counting oracle on random pairs") {
    std::mt19937_64 rng(13);
    std::uniform_int_distribution<int> coarse(0, 3);  // plenty of ties
    for (int trial = 0; trial < 100; ++trial) {
      Vector x(5);
      Vector y(5);
      for (Eigen::Index i = 0; i < 5; ++i) {
        x[i] = static_cast<double>(coarse(rng));
        y[i] = static_cast<double>(coarse(rng));
      }
      const double mine = metrics::kendall_tau_b(x, y);
      const double oracle = oracles::kendall_tau_b_bruteforce(x, y);
      CHECK(mine == doctest::Approx(oracle).epsilon(1e-12));
    }
  }
  SUBCASE("invariant under strictly increasing rowwise transforms") {
    std::mt19937_64 rng(17);
    const Matrix a = random_matrix(rng, 4, 0.4);
    const Matrix b = random_matrix(rng, 4, 0.4);
    const Matrix ta = (a.array() * 3.0 + 1.0).matrix();      // affine increasing
    const Matrix tb = b.array().exp().matrix();              // exp is increasing
    CHECK(metrics::rank_corr(ta, tb) == doctest::Approx(metrics::rank_corr(a, b)));
  }
  SUBCASE("range stays within [-1, 1]") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 50; ++trial) {
      const Matrix a = random_matrix(rng, 5, 0.6);
      const Matrix b = random_matrix(rng, 5, 0.6);
      const double tau = metrics::rank_corr(a, b);
      CHECK(tau >= -1.0);
      CHECK(tau <= 1.0);
    }
  }
}

TEST_CASE("report bundles the three metrics") {
  Matrix truth(2, 2);
  truth << 0.5, 0.0, 0.3, 0.9;
  const metrics::MetricReport r = metrics::report(truth, truth);
  CHECK(r.hamming == 0.0);
  CHECK(r.rel_err == 0.0);
  CHECK(r.rank_corr == doctest::Approx(1.0));
}
