#include <catch2/catch_amalgamated.hpp>

#include <limits>

#include "hpca/hpca.hpp"

using namespace hpca;
using Catch::Approx;

namespace {

Matrix random_square(RngStream& rng, Index p, bool symmetric = false) {
  Matrix m = rng.gaussian_matrix(p, p);
  if (symmetric) m = 0.5 * (m + m.transpose()).eval();
  return m;
}

}  // namespace

TEST_CASE("svd_top_r basics") {
  SECTION("identity") {
    const SvdFactors f = svd_top_r(Matrix::Identity(3, 3), 2);
    REQUIRE(f.singular_values(0) == Approx(1.0));
    REQUIRE(f.singular_values(1) == Approx(1.0));
    REQUIRE(max_abs(f.u.matrix().transpose() * f.u.matrix() - Matrix::Identity(2, 2)) <
            1e-10);
  }
  SECTION("diagonal matrix") {
    Matrix d = Matrix::Zero(3, 3);
    d.diagonal() << 3, 2, 1;
    const SvdFactors f = svd_top_r(d, 1);
    REQUIRE(f.singular_values(0) == Approx(3.0));
    REQUIRE(f.u.matrix()(0, 0) == Approx(1.0));
    REQUIRE(std::abs(f.u.matrix()(1, 0)) < 1e-12);
  }
  SECTION("permutation matrix against characteristic polynomial") {
    // M^T M = I, so both singular values are 1.
    Matrix perm(2, 2);
    perm << 0, 1, 1, 0;
    const SvdFactors g = svd_top_r(perm, 2);
    REQUIRE(g.singular_values(0) == Approx(1.0));
    REQUIRE(g.singular_values(1) == Approx(1.0));
    const Matrix rebuilt =
        g.u.matrix() * g.singular_values.asDiagonal() * g.v.matrix().transpose();
    REQUIRE(max_abs(rebuilt - perm) < 1e-12);
  }
}

TEST_CASE("svd sign convention and determinism") {
  RngStream rng(11);
  for (int t = 0; t < 20; ++t) {
    const Matrix m = rng.gaussian_matrix(6, 4);
    const SvdFactors f = svd_top_r(m, 3);
    for (Index k = 0; k < 3; ++k) {
      Index arg = 0;
      for (Index i = 1; i < 6; ++i) {
        if (std::abs(f.u.matrix()(i, k)) > std::abs(f.u.matrix()(arg, k))) arg = i;
      }
      REQUIRE(f.u.matrix()(arg, k) >= 0.0);
    }
    // Identical input bits -> identical output bits.
    const SvdFactors f2 = svd_top_r(m, 3);
    REQUIRE(f.u.matrix() == f2.u.matrix());
    REQUIRE(f.singular_values == f2.singular_values);
    REQUIRE(f.v.matrix() == f2.v.matrix());
  }
  REQUIRE_THROWS_AS(svd_top_r(Matrix::Identity(3, 3), 4), ParameterError);
  REQUIRE_THROWS_AS(svd_top_r(Matrix::Identity(3, 3), 0), ParameterError);
}

TEST_CASE("rank_r_truncation") {
  RngStream rng(12);
  SECTION("rank-1 input reproduced") {
    const Matrix a = rng.gaussian_matrix(5, 1) * rng.gaussian_matrix(1, 4);
    REQUIRE(max_abs(rank_r_truncation(a, 1) - a) < 1e-10);
  }
  SECTION("diagonal truncation") {
    Matrix d = Matrix::Zero(3, 3);
    d.diagonal() << 3, 2, 1;
    Matrix expected = d;
    expected(2, 2) = 0;
    REQUIRE(max_abs(rank_r_truncation(d, 2) - expected) < 1e-12);
  }
  SECTION("Eckart-Young residual equals tail singular values") {
    for (int t = 0; t < 25; ++t) {
      const Matrix m = rng.gaussian_matrix(4, 4);
      const SvdFactors f = svd_top_r(m, 4);
      const double expected = std::sqrt(f.singular_values(2) * f.singular_values(2) +
                                        f.singular_values(3) * f.singular_values(3));
      const double got = frobenius_norm(m - rank_r_truncation(m, 2));
      REQUIRE(got == Approx(expected).epsilon(1e-9));
    }
  }
}

TEST_CASE("qr_orthonormalize") {
  SECTION("orthonormal input is a fixed point") {
    const OrthonormalBasis q0 = construct_incoherent_basis(6, 2);
    const OrthonormalBasis q = qr_orthonormalize(q0.matrix());
    REQUIRE(max_abs(q.matrix() - q0.matrix()) < 1e-12);
  }
  SECTION("scaling removed") {
    Matrix a = Matrix::Zero(3, 1);
    a(0, 0) = 2.0;
    const OrthonormalBasis q = qr_orthonormalize(a);
    REQUIRE(q.matrix()(0, 0) == Approx(1.0));
    REQUIRE(std::abs(q.matrix()(1, 0)) < 1e-14);
  }
  SECTION("hand Gram-Schmidt") {
    Matrix a(3, 2);
    a << 1, 1, 1, 0, 0, 1;
    const OrthonormalBasis q = qr_orthonormalize(a);
    const double s2 = 1.0 / std::sqrt(2.0);
    const double s15 = 1.0 / std::sqrt(1.5);
    Matrix expected(3, 2);
    expected << s2, 0.5 * s15, s2, -0.5 * s15, 0, 1.0 * s15;
    REQUIRE(max_abs(q.matrix() - expected) < 1e-12);
    REQUIRE(max_abs(q.matrix().transpose() * q.matrix() - Matrix::Identity(2, 2)) <
            1e-12);
    // Column span preserved: projecting a onto q reproduces a.
    REQUIRE(max_abs(q.matrix() * (q.matrix().transpose() * a) - a) < 1e-12);
  }
  SECTION("errors") {
    Matrix rank_deficient(3, 2);
    rank_deficient << 1, 2, 1, 2, 1, 2;
    REQUIRE_THROWS_AS(qr_orthonormalize(rank_deficient), DegeneracyError);
    REQUIRE_THROWS_AS(qr_orthonormalize(Matrix::Identity(2, 3)), ParameterError);
  }
}

TEST_CASE("off_diagonal and diag_part") {
  REQUIRE(max_abs(off_diagonal(Matrix::Identity(4, 4))) == 0.0);
  REQUIRE(max_abs(diag_part(Matrix::Identity(4, 4)) - Matrix::Identity(4, 4)) == 0.0);

  const Matrix ones = Matrix::Ones(3, 3);
  REQUIRE(off_diagonal(ones)(0, 0) == 0.0);
  REQUIRE(off_diagonal(ones)(0, 1) == 1.0);

  RngStream rng(13);
  for (int t = 0; t < 20; ++t) {
    const Matrix a = random_square(rng, 5);
    REQUIRE(off_diagonal(a) + diag_part(a) == a);  // bit-exact partition
  }
  REQUIRE_THROWS_AS(off_diagonal(Matrix::Zero(2, 3)), ParameterError);
  REQUIRE_THROWS_AS(diag_part(Matrix::Zero(2, 3)), ParameterError);
}

TEST_CASE("sharp family ratios") {
  // M = 1 1^T - (p/2) I: |Delta(M)| / |M| = 2 - 2/p exactly.
  const Matrix m = Matrix::Ones(4, 4) - 2.0 * Matrix::Identity(4, 4);
  const Matrix dm = off_diagonal(m);
  REQUIRE(max_abs(dm - (Matrix::Ones(4, 4) - Matrix::Identity(4, 4))) == 0.0);
  REQUIRE(spectral_norm(dm) == Approx(3.0).margin(1e-12));
  REQUIRE(spectral_norm(m) == Approx(2.0).margin(1e-12));
  REQUIRE(spectral_norm(dm) / spectral_norm(m) == Approx(1.5).margin(1e-12));

  for (Index p : {2, 4, 8, 16}) {
    REQUIRE(delta_sharp_family_ratio(p) ==
            Approx(2.0 - 2.0 / static_cast<double>(p)).margin(1e-10));
  }
}

TEST_CASE("spectral and frobenius norms") {
  Matrix d = Matrix::Zero(2, 2);
  d.diagonal() << 3, 2;
  REQUIRE(spectral_norm(d) == Approx(3.0));
  REQUIRE(spectral_norm(Matrix::Zero(3, 3)) == 0.0);
  REQUIRE(spectral_norm(Matrix::Ones(4, 4) - Matrix::Identity(4, 4)) ==
          Approx(3.0).margin(1e-12));
  REQUIRE(frobenius_norm(d) == Approx(std::sqrt(13.0)));
}

TEST_CASE("delta norm bound over random matrices") {
  RngStream rng(14);
  for (int t = 0; t < 1000; ++t) {
    const Index p = 2 + static_cast<Index>(rng.next_u64() % 19);
    const Matrix m = random_square(rng, p, t % 2 == 0);
    REQUIRE(spectral_norm(off_diagonal(m)) <= 2.0 * spectral_norm(m) + 1e-12);
  }
}

TEST_CASE("mask_part and CorruptionSet") {
  RngStream rng(15);
  const Matrix a = random_square(rng, 4);
  SECTION("diagonal set reduces to diag_part") {
    REQUIRE(mask_part(a, CorruptionSet::diagonal(4)) == diag_part(a));
    REQUIRE(gamma_part(a, CorruptionSet::diagonal(4)) == off_diagonal(a));
  }
  SECTION("empty set") {
    const CorruptionSet empty(4, 4, {});
    REQUIRE(max_abs(mask_part(a, empty)) == 0.0);
    REQUIRE(gamma_part(a, empty) == a);
    REQUIRE(empty.sparsity_b() == 0);
  }
  SECTION("single pair") {
    const CorruptionSet g(4, 4, {{0, 1}});
    const Matrix masked = mask_part(a, g);
    REQUIRE(masked(0, 1) == a(0, 1));
    REQUIRE(masked.cwiseAbs().sum() == std::abs(a(0, 1)));
    REQUIRE(g.sparsity_b() == 1);
    REQUIRE_FALSE(g.is_symmetric());
  }
  SECTION("validation") {
    REQUIRE_THROWS_AS(CorruptionSet(4, 4, {{4, 0}}), ParameterError);
    REQUIRE_THROWS_AS(mask_part(a, CorruptionSet::diagonal(5)), ParameterError);
    REQUIRE(CorruptionSet(4, 4, {{0, 1}, {1, 0}}).is_symmetric());
    REQUIRE(CorruptionSet::diagonal(4).is_symmetric());
  }
  SECTION("b-sparse masking of low-rank matrices") {
    for (int t = 0; t < 200; ++t) {
      const Index p = 5 + static_cast<Index>(rng.next_u64() % 16);
      const Index r = 1 + static_cast<Index>(rng.next_u64() % 3);
      const Matrix low = rng.gaussian_matrix(p, r) * rng.gaussian_matrix(r, p);
      const CorruptionSet g =
          verify_detail::random_sparse_set(p, 1 + (t % 3), rng, false);
      const double b = static_cast<double>(g.sparsity_b());
      REQUIRE(spectral_norm(mask_part(low, g)) <=
              std::sqrt(std::min(b, static_cast<double>(r))) * spectral_norm(low) +
                  1e-10);
    }
  }
}

TEST_CASE("eta_upper_bound") {
  REQUIRE(eta_upper_bound(CorruptionSet::diagonal(5), 3) == Approx(1.0));
  const CorruptionSet g(6, 6, {{0, 1}, {1, 0}, {0, 2}, {2, 0}, {1, 2}, {2, 1}});
  REQUIRE(g.sparsity_b() == 2);
  REQUIRE(eta_upper_bound(g, 1) == Approx(std::sqrt(2.0)));
  REQUIRE(eta_upper_bound(g, 3) == Approx(std::sqrt(2.0)));
}

TEST_CASE("construct_incoherent_basis") {
  SECTION("p divisible by r") {
    const OrthonormalBasis q = construct_incoherent_basis(6, 2);
    for (Index i = 0; i < 6; ++i) {
      REQUIRE(q.matrix().row(i).squaredNorm() == Approx(1.0 / 3.0).margin(1e-14));
    }
    REQUIRE(incoherence_constant(q) == Approx(1.0).margin(1e-12));
  }
  SECTION("p equals r") {
    const OrthonormalBasis q = construct_incoherent_basis(3, 3);
    REQUIRE(max_abs(q.matrix() - Matrix::Identity(3, 3)) == 0.0);
  }
  SECTION("remainder block") {
    const OrthonormalBasis q = construct_incoherent_basis(5, 2);
    REQUIRE(q.matrix().rowwise().squaredNorm().maxCoeff() <= 0.5 + 1e-14);
  }
  SECTION("lemma bound over a grid") {
    for (Index p = 2; p <= 24; ++p) {
      for (Index r = 1; r <= std::min<Index>(p, 5); ++r) {
        const OrthonormalBasis q = construct_incoherent_basis(p, r);
        const double bound = 1.0 / static_cast<double>(p / r);
        REQUIRE(q.matrix().rowwise().squaredNorm().maxCoeff() <= bound + 1e-14);
      }
    }
  }
  REQUIRE_THROWS_AS(construct_incoherent_basis(2, 3), ParameterError);
}

TEST_CASE("finite validation") {
  Matrix bad = Matrix::Identity(2, 2);
  bad(0, 1) = std::numeric_limits<double>::quiet_NaN();
  REQUIRE_THROWS_AS(svd_top_r(bad, 1), ParameterError);
  REQUIRE_THROWS_AS(spectral_norm(bad), ParameterError);
}
