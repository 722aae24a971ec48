#ifndef HPCA_MODELS_HPP_
#define HPCA_MODELS_HPP_

#include <cmath>
#include <utility>

#include "hpca/estimators.hpp"
#include "hpca/matrix.hpp"
#include "hpca/rng.hpp"
#include "hpca/subspace.hpp"
#include "hpca/svd.hpp"

namespace hpca {

/// Noise-variance profile for the spiked covariance samplers.
struct SigmaProfile {
  enum class Kind {
    kUniform01,  // sigma_i ~ Unif[0,1], variance sigma_i^2
    kAlpha,      // sigma_i^2 = total * v_i^alpha / sum v^alpha, v ~ Unif[0,1]
  };
  Kind kind = Kind::kUniform01;
  double alpha = 0.0;
  // Used by kAlpha; <= 0 means the default 0.1 * p.
  double total = -1.0;

  static SigmaProfile uniform01() { return SigmaProfile{}; }
  static SigmaProfile alpha_profile(double a, double total = -1.0) {
    return SigmaProfile{Kind::kAlpha, a, total};
  }
};

struct SpikedCovSpec {
  Index p = 0;
  Index n = 0;
  Index r = 0;
  double loading_weight_power = 1.0;
  SigmaProfile sigma_profile;
};

struct DenoisingSpec {
  Index p1 = 0;
  Index p2 = 0;
  Index r = 0;
  double sigma0 = 0.0;
  // Signal amplitude; <= 0 means the default (p1*p2)^(1/4).
  double signal_scale = -1.0;
};

struct PoissonSpec {
  Index p1 = 0;
  Index p2 = 0;
  Index r = 0;
  double lambda_strength = 1.0;
};

struct MissingSpec {
  DenoisingSpec base;
  double theta = 0.0;  // observation probability, in (0, 1)
};

namespace detail {

inline Matrix row_weighted(const Matrix& m, const Vector& weights, double power) {
  Matrix out = m;
  for (Index i = 0; i < m.rows(); ++i) out.row(i) *= std::pow(weights(i), power);
  return out;
}

}  // namespace detail

/// Random loading basis: QR of a standard Gaussian ensemble with rows scaled
/// by w_i^power, w ~ Unif[0,1]. power = 0 gives the plain Gaussian QR; larger
/// powers concentrate the basis on fewer coordinates. On the measure-zero
/// event of a rank-deficient draw, redraws once and then fails.
inline OrthonormalBasis gen_loading_matrix(Index p, Index r, double weight_power,
                                           RngStream& rng) {
  if (r < 1 || p < r) throw ParameterError("gen_loading_matrix: need p >= r >= 1");
  for (int attempt = 0; attempt < 2; ++attempt) {
    const Matrix u0 = rng.gaussian_matrix(p, r);
    const Vector w = rng.uniform_vector(p);
    try {
      return qr_orthonormalize(detail::row_weighted(u0, w, weight_power));
    } catch (const DegeneracyError&) {
      if (attempt == 1) throw;
    }
  }
  throw DegeneracyError("gen_loading_matrix: unreachable");
}

/// Noise variances sigma_k^2 = total * v_k^alpha / sum_i v_i^alpha with
/// v ~ Unif[0,1] i.i.d. The variances always sum to `total` (default 0.1*p);
/// alpha = 0 gives the homoskedastic profile total/p per coordinate.
inline Vector sigma_profile_alpha(Index p, double alpha, RngStream& rng,
                                  double total = -1.0) {
  if (p < 1) throw ParameterError("sigma_profile_alpha: need p >= 1");
  if (!(alpha >= 0.0)) throw ParameterError("sigma_profile_alpha: alpha >= 0");
  if (total <= 0.0) total = 0.1 * static_cast<double>(p);
  const Vector v = rng.uniform_vector(p);
  Vector powered(p);
  for (Index i = 0; i < p; ++i) powered(i) = std::pow(v(i), alpha);
  const double denom = powered.sum();
  return (total / denom) * powered;
}

/// Noise variances for the uniform01 profile: sigma_i ~ Unif[0,1] squared.
inline Vector sigma_uniform01(Index p, RngStream& rng) {
  Vector v = rng.uniform_vector(p);
  return v.cwiseProduct(v);
}

inline Vector sigma_from_profile(const SigmaProfile& profile, Index p, RngStream& rng) {
  if (profile.kind == SigmaProfile::Kind::kUniform01) return sigma_uniform01(p, rng);
  return sigma_profile_alpha(p, profile.alpha, rng, profile.total);
}

/// Spiked-model sample matrix Y = U diag(sqrt(lambda)) G + E with G an r x n
/// standard Gaussian and E_ik ~ N(0, noise_variances_i), all independent.
inline Matrix sample_spiked(const OrthonormalBasis& u, const Vector& lambda,
                            const Vector& noise_variances, Index n, RngStream& rng) {
  const Index p = u.p(), r = u.rank();
  if (lambda.size() != r) throw ParameterError("sample_spiked: lambda size != r");
  if (noise_variances.size() != p) throw ParameterError("sample_spiked: sigma size != p");
  if (lambda.minCoeff() < 0.0) throw ParameterError("sample_spiked: lambda must be >= 0");
  if (noise_variances.minCoeff() < 0.0) {
    throw ParameterError("sample_spiked: variances must be >= 0");
  }
  const Matrix scores = rng.gaussian_matrix(r, n);
  Matrix y = u.matrix() * lambda.cwiseSqrt().asDiagonal() * scores;
  const Vector sd = noise_variances.cwiseSqrt();
  for (Index i = 0; i < p; ++i) {
    for (Index k = 0; k < n; ++k) y(i, k) += sd(i) * rng.normal();
  }
  return y;
}

struct SpikedSample {
  Matrix y;                // p x n observation matrix
  OrthonormalBasis u;      // factor loadings (the estimation target)
  Vector noise_variances;  // per-coordinate noise variances
};

/// Spiked covariance draw: unit spike eigenvalues on a random weighted
/// loading basis, plus independent per-coordinate Gaussian noise from the
/// configured variance profile.
inline SpikedSample gen_spiked(const SpikedCovSpec& spec, RngStream& rng) {
  if (spec.n < 2) throw ParameterError("gen_spiked: need n >= 2");
  OrthonormalBasis u =
      gen_loading_matrix(spec.p, spec.r, spec.loading_weight_power, rng);
  Vector variances = sigma_from_profile(spec.sigma_profile, spec.p, rng);
  Matrix y = sample_spiked(u, Vector::Ones(spec.r), variances, spec.n, rng);
  return SpikedSample{std::move(y), std::move(u), std::move(variances)};
}

struct DenoisingSample {
  Matrix x;            // rank-r signal
  Matrix y;            // x + heteroskedastic Gaussian noise
  OrthonormalBasis u;  // left singular subspace of x
  OrthonormalBasis v;  // right singular subspace of x
  Vector v1, v2;       // noise profile draws; entry (i,j) has sd sigma0 * v1_i^4 v2_j^4
};

/// Low-rank signal X = scale * U V^T with U the QR of a w^4-row-weighted
/// Gaussian ensemble (spiky rows), plus noise E_ij ~ N(0, sigma0^2 *
/// (v1_i^4 v2_j^4)^2) drawn entrywise.
inline DenoisingSample gen_denoising(const DenoisingSpec& spec, RngStream& rng) {
  if (spec.r < 1 || spec.p1 < spec.r || spec.p2 < spec.r) {
    throw ParameterError("gen_denoising: need p1, p2 >= r >= 1");
  }
  if (spec.sigma0 < 0.0) throw ParameterError("gen_denoising: sigma0 >= 0");
  const Matrix u0 = rng.gaussian_matrix(spec.p1, spec.r);
  const Matrix v0 = rng.gaussian_matrix(spec.p2, spec.r);
  const Vector w = rng.uniform_vector(spec.p1);
  const Vector v1 = rng.uniform_vector(spec.p1);
  const Vector v2 = rng.uniform_vector(spec.p2);
  OrthonormalBasis u = qr_orthonormalize(detail::row_weighted(u0, w, 4.0));
  OrthonormalBasis v = qr_orthonormalize(v0);
  const double scale = spec.signal_scale > 0.0
                           ? spec.signal_scale
                           : std::pow(static_cast<double>(spec.p1 * spec.p2), 0.25);
  Matrix x = scale * u.matrix() * v.matrix().transpose();
  Matrix y = x;
  for (Index i = 0; i < spec.p1; ++i) {
    const double wi = std::pow(v1(i), 4.0);
    for (Index j = 0; j < spec.p2; ++j) {
      const double sigma_ij = wi * std::pow(v2(j), 4.0);
      y(i, j) += spec.sigma0 * sigma_ij * rng.normal();
    }
  }
  return DenoisingSample{std::move(x), std::move(y), std::move(u), std::move(v),
                         std::move(v1), std::move(v2)};
}

struct PoissonSample {
  Matrix x;            // nonnegative rank-r rate matrix
  Matrix y;            // integer counts, Y_ij ~ Poisson(X_ij)
  OrthonormalBasis u;  // left singular subspace of x
};

/// Count model: X = lambda * (p1 p2)^(1/4) * |W U0| |V0|^T with W the w^4 row
/// weighting; entries of X are nonnegative rates and Y is drawn entrywise
/// Poisson. The evaluation target is the left singular subspace of X, which
/// equals the orthonormalization of the nonnegative left factor.
inline PoissonSample gen_poisson(const PoissonSpec& spec, RngStream& rng) {
  if (spec.r < 1 || spec.p1 < spec.r || spec.p2 < spec.r) {
    throw ParameterError("gen_poisson: need p1, p2 >= r >= 1");
  }
  if (!(spec.lambda_strength > 0.0)) {
    throw ParameterError("gen_poisson: lambda_strength must be > 0");
  }
  const Matrix u0 = rng.gaussian_matrix(spec.p1, spec.r);
  const Matrix v0 = rng.gaussian_matrix(spec.p2, spec.r);
  const Vector w = rng.uniform_vector(spec.p1);
  const Matrix u_factor = detail::row_weighted(u0, w, 4.0).cwiseAbs();
  const Matrix v_factor = v0.cwiseAbs();
  const double scale =
      spec.lambda_strength * std::pow(static_cast<double>(spec.p1 * spec.p2), 0.25);
  Matrix x = scale * u_factor * v_factor.transpose();
  Matrix y(spec.p1, spec.p2);
  for (Index i = 0; i < spec.p1; ++i) {
    for (Index j = 0; j < spec.p2; ++j) {
      y(i, j) = static_cast<double>(rng.poisson(x(i, j)));
    }
  }
  OrthonormalBasis u = qr_orthonormalize(u_factor);
  return PoissonSample{std::move(x), std::move(y), std::move(u)};
}

struct MaskedSample {
  Matrix y_tilde;  // y with unobserved entries zeroed
  Matrix r_mask;   // observation indicators in {0, 1}
};

struct MissingSample {
  Matrix y_tilde;
  Matrix r_mask;
  OrthonormalBasis u;  // left singular subspace of the underlying signal
};

/// Independent Bernoulli(theta) observation mask applied entrywise.
inline MaskedSample apply_mask(const Matrix& y, double theta, RngStream& rng) {
  require_finite(y, "apply_mask");
  if (!(theta > 0.0 && theta < 1.0)) {
    throw ParameterError("apply_mask: theta must lie strictly inside (0, 1)");
  }
  Matrix mask(y.rows(), y.cols());
  for (Index i = 0; i < y.rows(); ++i) {
    for (Index j = 0; j < y.cols(); ++j) {
      mask(i, j) = rng.uniform() < theta ? 1.0 : 0.0;
    }
  }
  return MaskedSample{y.cwiseProduct(mask), std::move(mask)};
}

/// Denoising sample observed through a Bernoulli(theta) mask.
inline MissingSample gen_missing(const MissingSpec& spec, RngStream& rng) {
  DenoisingSample d = gen_denoising(spec.base, rng);
  MaskedSample m = apply_mask(d.y, spec.theta, rng);
  return MissingSample{std::move(m.y_tilde), std::move(m.r_mask), std::move(d.u)};
}

}  // namespace hpca

#endif  // HPCA_MODELS_HPP_
