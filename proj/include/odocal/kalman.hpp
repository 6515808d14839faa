#pragma once

// Dimension-generic EKF/UKF building blocks. Angle-valued components are
// marked with a bit mask (bit i set: component i is an angle); their
// differences are wrapped and their means are circular.

#include <array>
#include <cmath>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "odocal/kinematics.hpp"

namespace odocal {

template <int N>
using Vec = Eigen::Matrix<double, N, 1>;
template <int R, int C = R>
using Mat = Eigen::Matrix<double, R, C>;

using AngleMask = unsigned;

template <int N>
struct Belief {
  Vec<N> mean = Vec<N>::Zero();
  Mat<N> cov = Mat<N>::Zero();
};

template <int N>
Vec<N> wrap_components(Vec<N> v, AngleMask mask) {
  for (int i = 0; i < N; ++i) {
    if (mask & (1u << i)) {
      v[i] = wrap_angle(v[i]);
    }
  }
  return v;
}

template <int N>
Mat<N> symmetrize(const Mat<N>& m) {
  return 0.5 * (m + m.transpose());
}

/// Scaled unscented transform parameters. lambda = alpha^2 (n + kappa) - n.
struct UkfConfig {
  double alpha = 1e-3;
  double beta = 2.0;
  double kappa = 0.0;

  double lambda(int n) const { return alpha * alpha * (n + kappa) - n; }
};

/// Throws std::invalid_argument when alpha is outside (0, 1] or n + lambda == 0.
inline void validate(const UkfConfig& config, int n) {
  if (!(config.alpha > 0.0 && config.alpha <= 1.0)) {
    throw std::invalid_argument("UKF alpha must lie in (0, 1]");
  }
  if (n + config.lambda(n) == 0.0) {
    throw std::invalid_argument("UKF scaling gives n + lambda == 0");
  }
}

template <int N>
struct SigmaSet {
  static constexpr int kCount = 2 * N + 1;
  std::array<Vec<N>, kCount> points;
  std::array<double, kCount> wm;
  std::array<double, kCount> wc;
};

/// 2N+1 sigma points: the mean, then mean +/- columns of the lower Cholesky
/// factor of (N + lambda) P. A failed factorization is retried once with
/// 1e-12 I added; a second failure throws std::domain_error.
template <int N>
SigmaSet<N> sigma_points(const Belief<N>& belief, const UkfConfig& config,
                         AngleMask mask = 0) {
  validate(config, N);
  const double lambda = config.lambda(N);
  const double scale = N + lambda;
  Mat<N> scaled = scale * belief.cov;
  Eigen::LLT<Mat<N>> llt(scaled);
  if (llt.info() != Eigen::Success) {
    scaled += 1e-12 * Mat<N>::Identity();
    llt.compute(scaled);
    if (llt.info() != Eigen::Success) {
      throw std::domain_error("sigma points: covariance is not positive semi-definite");
    }
  }
  const Mat<N> root = llt.matrixL();

  SigmaSet<N> set;
  set.points[0] = belief.mean;
  set.wm[0] = lambda / scale;
  set.wc[0] = set.wm[0] + (1.0 - config.alpha * config.alpha + config.beta);
  const double w = 1.0 / (2.0 * scale);
  for (int i = 0; i < N; ++i) {
    set.points[1 + i] = wrap_components<N>(belief.mean + root.col(i), mask);
    set.points[1 + N + i] = wrap_components<N>(belief.mean - root.col(i), mask);
    set.wm[1 + i] = set.wm[1 + N + i] = w;
    set.wc[1 + i] = set.wc[1 + N + i] = w;
  }
  return set;
}

/// Weighted mean of sigma-point images, accumulated relative to the first
/// point so the large negative centre weight does not cancel digits.
template <int M, std::size_t K>
Vec<M> weighted_mean(const std::array<Vec<M>, K>& pts, const std::array<double, K>& wm,
                     AngleMask mask) {
  Vec<M> mean;
  for (int j = 0; j < M; ++j) {
    const double ref = pts[0][j];
    if (mask & (1u << j)) {
      double s = 0.0;
      double c = 1.0;
      for (std::size_t i = 1; i < K; ++i) {
        const double d = wrap_angle(pts[i][j] - ref);
        const double half = std::sin(0.5 * d);
        s += wm[i] * std::sin(d);
        c -= wm[i] * 2.0 * half * half;
      }
      mean[j] = wrap_angle(ref + std::atan2(s, c));
    } else {
      double acc = 0.0;
      for (std::size_t i = 1; i < K; ++i) {
        acc += wm[i] * (pts[i][j] - ref);
      }
      mean[j] = ref + acc;
    }
  }
  return mean;
}

template <int N>
struct UpdateOutcome {
  Belief<N> belief;
  bool skipped = false;  // innovation covariance was not invertible
};

/// Linearized predict: mean -> predicted_mean, P -> A P A' + Q.
template <int N>
Belief<N> ekf_predict_linearized(const Belief<N>& belief, const Vec<N>& predicted_mean,
                                 const Mat<N>& a, const Mat<N>& q) {
  Belief<N> out;
  out.mean = predicted_mean;
  out.cov = symmetrize<N>(a * belief.cov * a.transpose() + q);
  return out;
}

/// Kalman update with a linearized measurement h(x) ~ predicted + C dx and a
/// Joseph-form covariance.
template <int N, int M>
UpdateOutcome<N> ekf_update_linearized(const Belief<N>& belief, const Vec<M>& z,
                                       const Vec<M>& predicted, const Mat<M, N>& c,
                                       const Mat<M>& r, AngleMask state_mask,
                                       AngleMask meas_mask) {
  UpdateOutcome<N> out{belief, false};
  const Mat<M> s = symmetrize<M>(c * belief.cov * c.transpose() + r);
  const Eigen::LLT<Mat<M>> llt(s);
  if (llt.info() != Eigen::Success || !s.allFinite()) {
    out.skipped = true;
    return out;
  }
  const Mat<N, M> gain = llt.solve(c * belief.cov).transpose();
  const Vec<M> innovation = wrap_components<M>(z - predicted, meas_mask);
  out.belief.mean = wrap_components<N>(belief.mean + gain * innovation, state_mask);
  const Mat<N> ikc = Mat<N>::Identity() - gain * c;
  out.belief.cov =
      symmetrize<N>(ikc * belief.cov * ikc.transpose() + gain * r * gain.transpose());
  return out;
}

/// Unscented predict through x -> f(x) with additive process noise q.
template <int N, class F>
Belief<N> ukf_predict_generic(const Belief<N>& belief, F&& f, const Mat<N>& q,
                              const UkfConfig& config, AngleMask mask) {
  const SigmaSet<N> sigma = sigma_points<N>(belief, config, mask);
  std::array<Vec<N>, SigmaSet<N>::kCount> images;
  for (int i = 0; i < SigmaSet<N>::kCount; ++i) {
    images[i] = f(sigma.points[i]);
  }
  Belief<N> out;
  out.mean = weighted_mean<N>(images, sigma.wm, mask);
  Mat<N> cov = q;
  for (int i = 0; i < SigmaSet<N>::kCount; ++i) {
    const Vec<N> d = wrap_components<N>(images[i] - out.mean, mask);
    cov += sigma.wc[i] * d * d.transpose();
  }
  out.cov = symmetrize<N>(cov);
  return out;
}

/// Unscented update for z = h(x) + v, v ~ N(0, r).
template <int N, int M, class H>
UpdateOutcome<N> ukf_update_generic(const Belief<N>& belief, const Vec<M>& z, H&& h,
                                    const Mat<M>& r, const UkfConfig& config,
                                    AngleMask state_mask, AngleMask meas_mask) {
  UpdateOutcome<N> out{belief, false};
  const SigmaSet<N> sigma = sigma_points<N>(belief, config, state_mask);
  std::array<Vec<M>, SigmaSet<N>::kCount> images;
  for (int i = 0; i < SigmaSet<N>::kCount; ++i) {
    images[i] = h(sigma.points[i]);
  }
  const Vec<M> z_mean = weighted_mean<M>(images, sigma.wm, meas_mask);
  Mat<M> pzz = r;
  Mat<N, M> pxz = Mat<N, M>::Zero();
  for (int i = 0; i < SigmaSet<N>::kCount; ++i) {
    const Vec<M> dz = wrap_components<M>(images[i] - z_mean, meas_mask);
    const Vec<N> dx = wrap_components<N>(sigma.points[i] - belief.mean, state_mask);
    pzz += sigma.wc[i] * dz * dz.transpose();
    pxz += sigma.wc[i] * dx * dz.transpose();
  }
  pzz = symmetrize<M>(pzz);
  const Eigen::LLT<Mat<M>> llt(pzz);
  if (llt.info() != Eigen::Success || !pzz.allFinite()) {
    out.skipped = true;
    return out;
  }
  const Mat<N, M> gain = llt.solve(pxz.transpose()).transpose();
  const Vec<M> innovation = wrap_components<M>(z - z_mean, meas_mask);
  out.belief.mean = wrap_components<N>(belief.mean + gain * innovation, state_mask);
  out.belief.cov = symmetrize<N>(belief.cov - gain * pzz * gain.transpose());
  return out;
}

}  // namespace odocal
