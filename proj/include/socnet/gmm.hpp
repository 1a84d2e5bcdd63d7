// Gaussian mixture EM in two dimensions, templated on the scalar type.
//
// The covariance update carries a ridge psi*I scaled by the component's
// effective size, Sigma_k = (S_k + psi*I) / N_k. This is the MAP update under
// an improper inverse-Wishart prior p(Sigma) ~ exp(-tr(psi Sigma^-1) / 2), so
// EM is monotone in the penalized objective
//   sum_i log sum_k w_k N(x_i | mu_k, Sigma_k) - psi/2 sum_k tr(Sigma_k^-1).
#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "socnet/rng.hpp"

namespace socnet::gmm {

template <typename Scalar>
using Vec2 = Eigen::Matrix<Scalar, 2, 1>;
template <typename Scalar>
using Mat2 = Eigen::Matrix<Scalar, 2, 2>;
template <typename Scalar>
using Points = Eigen::Matrix<Scalar, Eigen::Dynamic, 2>;

template <typename Scalar>
struct Component {
  Vec2<Scalar> mean = Vec2<Scalar>::Zero();
  Mat2<Scalar> cov = Mat2<Scalar>::Identity();
  Scalar weight = 1;
};

struct EmOptions {
  double ridge = 1e-6;
  int max_iter = 500;
  double tol = 1e-10;
};

template <typename Scalar>
struct MixtureFit {
  std::vector<Component<Scalar>> components;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> resp;  // n x k
  Scalar loglik = 0;
  Scalar objective = 0;
  std::vector<Scalar> trace;  // objective after every iteration of the final run
  int iterations = 0;
  int reseeds = 0;
  int dropped = 0;
  bool degenerate = false;  // ridge dominated some covariance
};

template <typename Scalar>
Scalar log_density(const Component<Scalar>& c, const Vec2<Scalar>& x) {
  Eigen::LLT<Mat2<Scalar>> llt(c.cov);
  const Vec2<Scalar> d = x - c.mean;
  const Vec2<Scalar> y = llt.matrixL().solve(d);
  const Scalar log_det = 2 * (std::log(llt.matrixL()(0, 0)) + std::log(llt.matrixL()(1, 1)));
  return -std::log(2 * std::numbers::pi_v<Scalar>) - Scalar(0.5) * log_det - Scalar(0.5) * y.squaredNorm();
}

/// Row i holds log(w_k) + log N(x_i | component k).
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> weighted_log_densities(
    const std::vector<Component<Scalar>>& comps, const Points<Scalar>& x) {
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out(x.rows(), static_cast<Eigen::Index>(comps.size()));
  for (std::size_t k = 0; k < comps.size(); ++k) {
    const Scalar lw = std::log(comps[k].weight);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      out(i, static_cast<Eigen::Index>(k)) = lw + log_density(comps[k], Vec2<Scalar>(x.row(i).transpose()));
    }
  }
  return out;
}

template <typename Derived>
typename Derived::Scalar log_sum_exp(const Eigen::MatrixBase<Derived>& row) {
  using Scalar = typename Derived::Scalar;
  const Scalar m = row.maxCoeff();
  if (!std::isfinite(m)) return m;
  return m + std::log((row.array() - m).exp().sum());
}

/// Total log-likelihood of the points under the mixture.
template <typename Scalar>
Scalar loglik(const std::vector<Component<Scalar>>& comps, const Points<Scalar>& x) {
  const auto lp = weighted_log_densities(comps, x);
  Scalar total = 0;
  for (Eigen::Index i = 0; i < lp.rows(); ++i) total += log_sum_exp(lp.row(i));
  return total;
}

namespace detail {

template <typename Scalar>
std::vector<Vec2<Scalar>> kmeanspp(const Points<Scalar>& x, int k, Rng& rng) {
  std::vector<Vec2<Scalar>> centers;
  centers.push_back(x.row(static_cast<Eigen::Index>(uniform_below(rng, x.rows()))).transpose());
  std::vector<Scalar> d2(static_cast<std::size_t>(x.rows()));
  while (static_cast<int>(centers.size()) < k) {
    Scalar total = 0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      Scalar best = std::numeric_limits<Scalar>::max();
      for (const auto& c : centers) best = std::min(best, (x.row(i).transpose() - c).squaredNorm());
      d2[static_cast<std::size_t>(i)] = best;
      total += best;
    }
    Eigen::Index pick = 0;
    if (total <= 0) {
      pick = static_cast<Eigen::Index>(uniform_below(rng, x.rows()));
    } else {
      Scalar r = static_cast<Scalar>(uniform01(rng)) * total;
      for (Eigen::Index i = 0; i < x.rows(); ++i) {
        r -= d2[static_cast<std::size_t>(i)];
        pick = i;
        if (r < 0) break;
      }
    }
    centers.push_back(x.row(pick).transpose());
  }
  return centers;
}

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> hard_assign(const Points<Scalar>& x,
                                                                  const std::vector<Vec2<Scalar>>& centers) {
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> r =
      Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(x.rows(), static_cast<Eigen::Index>(centers.size()));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    std::size_t best = 0;
    Scalar bd = std::numeric_limits<Scalar>::max();
    for (std::size_t c = 0; c < centers.size(); ++c) {
      const Scalar d = (x.row(i).transpose() - centers[c]).squaredNorm();
      if (d < bd) {
        bd = d;
        best = c;
      }
    }
    r(i, static_cast<Eigen::Index>(best)) = 1;
  }
  return r;
}

// M-step; returns false when some component has less than one point of mass.
template <typename Scalar>
bool maximize(const Points<Scalar>& x, const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& resp,
              Scalar ridge, std::vector<Component<Scalar>>& comps, bool& degenerate, int& empty_index) {
  const auto n = static_cast<Scalar>(x.rows());
  comps.resize(static_cast<std::size_t>(resp.cols()));
  for (Eigen::Index k = 0; k < resp.cols(); ++k) {
    const Scalar nk = resp.col(k).sum();
    if (nk < Scalar(1)) {
      empty_index = static_cast<int>(k);
      return false;
    }
    Component<Scalar>& c = comps[static_cast<std::size_t>(k)];
    c.weight = nk / n;
    c.mean = (x.transpose() * resp.col(k)) / nk;
    Mat2<Scalar> s = Mat2<Scalar>::Zero();
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      const Vec2<Scalar> d = x.row(i).transpose() - c.mean;
      s.noalias() += resp(i, k) * d * d.transpose();
    }
    if ((s / nk).determinant() < ridge * ridge) degenerate = true;
    c.cov = (s + ridge * Mat2<Scalar>::Identity()) / nk;
  }
  return true;
}

template <typename Scalar>
Scalar penalty(const std::vector<Component<Scalar>>& comps, Scalar ridge) {
  Scalar p = 0;
  for (const auto& c : comps) p += c.cov.inverse().trace();
  return -ridge / 2 * p;
}

}  // namespace detail

/// EM from k-means++ seeding. A component that loses all mass is reseeded
/// once (fresh seeding of every component); if that happens again it is
/// dropped and EM continues with one fewer component.
template <typename Scalar>
MixtureFit<Scalar> em_fit(const Points<Scalar>& x, int k, Rng& rng, const EmOptions& opt = {}) {
  if (k < 1) throw std::invalid_argument("em_fit: k must be at least 1");
  if (x.rows() < k) throw std::invalid_argument("em_fit: fewer points than components");
  const auto ridge = static_cast<Scalar>(opt.ridge);
  MixtureFit<Scalar> fit;

  auto resp = detail::hard_assign(x, detail::kmeanspp(x, k, rng));
  int empty = -1;
  while (true) {
    fit.trace.clear();
    bool ok = detail::maximize(x, resp, ridge, fit.components, fit.degenerate, empty);
    Scalar previous = -std::numeric_limits<Scalar>::infinity();
    for (int it = 0; ok && it < opt.max_iter; ++it) {
      // E-step.
      const auto lp = weighted_log_densities(fit.components, x);
      Scalar total = 0;
      for (Eigen::Index i = 0; i < lp.rows(); ++i) {
        const Scalar lse = log_sum_exp(lp.row(i));
        total += lse;
        resp.row(i) = (lp.row(i).array() - lse).exp().matrix();
      }
      const Scalar objective = total + detail::penalty(fit.components, ridge);
      fit.loglik = total;
      fit.objective = objective;
      fit.trace.push_back(objective);
      fit.iterations = it + 1;
      if (it > 0 && std::fabs(objective - previous) <= static_cast<Scalar>(opt.tol) * (1 + std::fabs(objective))) break;
      previous = objective;
      ok = detail::maximize(x, resp, ridge, fit.components, fit.degenerate, empty);
    }
    if (ok) break;
    if (fit.reseeds == 0) {
      ++fit.reseeds;
      resp = detail::hard_assign(x, detail::kmeanspp(x, static_cast<int>(resp.cols()), rng));
      continue;
    }
    // Drop the empty column and renormalize.
    ++fit.dropped;
    const Eigen::Index cols = resp.cols() - 1;
    if (cols < 1) throw std::runtime_error("em_fit: all components collapsed");
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> next(resp.rows(), cols);
    for (Eigen::Index c = 0, j = 0; c < resp.cols(); ++c)
      if (c != empty) next.col(j++) = resp.col(c);
    for (Eigen::Index i = 0; i < next.rows(); ++i) {
      const Scalar s = next.row(i).sum();
      if (s > 0) next.row(i) /= s;
      else next.row(i).setConstant(Scalar(1) / static_cast<Scalar>(cols));
    }
    resp = std::move(next);
  }
  fit.resp = resp;
  return fit;
}

}  // namespace socnet::gmm
