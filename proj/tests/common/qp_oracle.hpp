#pragma once

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "likefarm/classify.hpp"

namespace test {

/// Dense log-barrier solver for the scaled nu-SVM dual
///   min 1/2 a^T Q a,  0 <= a <= 1,  sum_{+} a = sum_{-} a = nu l / 2.
/// Needs a strictly feasible start, i.e. nu below its feasibility bound.
inline double qp_oracle(const Eigen::MatrixXd& q, const std::vector<int>& y, double nu) {
  const Eigen::Index l = q.rows();
  Eigen::Index n_pos = 0;
  for (int v : y) n_pos += v > 0;
  const double budget = nu * static_cast<double>(l) / 2.0;
  Eigen::VectorXd a(l);
  for (Eigen::Index i = 0; i < l; ++i) {
    a(i) = budget / static_cast<double>(y[static_cast<std::size_t>(i)] > 0 ? n_pos : l - n_pos);
  }
  Eigen::MatrixXd eq = Eigen::MatrixXd::Zero(2, l);
  for (Eigen::Index i = 0; i < l; ++i) eq(y[static_cast<std::size_t>(i)] > 0 ? 0 : 1, i) = 1.0;

  // Steps stay in the null space of the equality constraints.
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(eq.transpose());
  const Eigen::MatrixXd z = (qr.householderQ() * Eigen::MatrixXd::Identity(l, l)).rightCols(l - 2);

  const auto phi = [&](const Eigen::VectorXd& x, double t) {
    double v = 0.5 * t * x.dot(q * x);
    for (Eigen::Index i = 0; i < l; ++i) v -= std::log(x(i)) + std::log(1.0 - x(i));
    return v;
  };
  for (double t = 1.0; t <= 1e13; t *= 4.0) {
    for (int step = 0; step < 200; ++step) {
      Eigen::VectorXd grad = t * (q * a);
      Eigen::MatrixXd hess = t * q;
      for (Eigen::Index i = 0; i < l; ++i) {
        grad(i) += -1.0 / a(i) + 1.0 / (1.0 - a(i));
        hess(i, i) += 1.0 / (a(i) * a(i)) + 1.0 / ((1.0 - a(i)) * (1.0 - a(i)));
      }
      const Eigen::VectorXd gz = z.transpose() * grad;
      const Eigen::MatrixXd hz = z.transpose() * hess * z;
      const Eigen::VectorXd dx = z * hz.ldlt().solve(-gz);
      const double decrement = -grad.dot(dx);
      if (!(decrement > 1e-14)) break;
      double s = 1.0;
      for (Eigen::Index i = 0; i < l; ++i) {
        if (dx(i) < 0.0) s = std::min(s, -0.99 * a(i) / dx(i));
        if (dx(i) > 0.0) s = std::min(s, 0.99 * (1.0 - a(i)) / dx(i));
      }
      const double base = phi(a, t);
      while (phi(a + s * dx, t) > base - 0.25 * s * decrement && s > 1e-16) s *= 0.5;
      a += s * dx;
    }
  }
  return 0.5 * a.dot(q * a);
}

/// Q_ij = y_i y_j K_ij from a row-major kernel.
inline Eigen::MatrixXd signed_kernel(const std::vector<double>& k, const std::vector<int>& y) {
  const Eigen::Index l = static_cast<Eigen::Index>(y.size());
  Eigen::MatrixXd q(l, l);
  for (Eigen::Index i = 0; i < l; ++i) {
    for (Eigen::Index j = 0; j < l; ++j) {
      q(i, j) = y[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(j)] *
                k[static_cast<std::size_t>(i * l + j)];
    }
  }
  return q;
}

/// Largest per-class KKT violation of a dual point: within each class the
/// gradient of every variable below its upper bound must not undercut the
/// gradient of any variable above its lower bound.
inline double kkt_violation(const Eigen::MatrixXd& q, const std::vector<int>& y,
                            const std::vector<double>& alpha) {
  const Eigen::Index l = q.rows();
  Eigen::VectorXd a(l);
  for (Eigen::Index i = 0; i < l; ++i) a(i) = alpha[static_cast<std::size_t>(i)];
  const Eigen::VectorXd g = q * a;
  double worst = 0.0;
  for (int cls : {1, -1}) {
    double up = std::numeric_limits<double>::infinity();
    double low = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < l; ++i) {
      if (y[static_cast<std::size_t>(i)] != cls) continue;
      if (a(i) < 1.0) up = std::min(up, g(i));
      if (a(i) > 0.0) low = std::max(low, g(i));
    }
    worst = std::max(worst, low - up);
  }
  return worst;
}

struct TinyInstance {
  std::vector<double> kernel;
  std::vector<int> y;
  double nu = 0.0;
};

/// Random RBF instance with l <= 12 points in d <= 4 dimensions and nu
/// strictly inside its feasible range.
inline TinyInstance tiny_instance(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::size_t l = std::uniform_int_distribution<std::size_t>(4, 12)(rng);
  const std::size_t d = std::uniform_int_distribution<std::size_t>(1, 4)(rng);
  std::uniform_real_distribution<double> coord(-1.0, 1.0);
  std::vector<std::vector<double>> x(l, std::vector<double>(d));
  for (auto& row : x) {
    for (double& v : row) v = coord(rng);
  }
  TinyInstance inst;
  std::size_t pos = 0;
  for (std::size_t i = 0; i < l; ++i) {
    int v = std::bernoulli_distribution(0.5)(rng) ? 1 : -1;
    if (i == 0) v = 1;
    if (i == 1) v = -1;
    inst.y.push_back(v);
    pos += v > 0;
  }
  const double gammas[] = {0.25, 1.0, 4.0};
  const double gamma = gammas[std::uniform_int_distribution<int>(0, 2)(rng)];
  inst.kernel.resize(l * l);
  for (std::size_t i = 0; i < l; ++i) {
    for (std::size_t j = 0; j < l; ++j) inst.kernel[i * l + j] = likefarm::rbf_kernel(x[i], x[j], gamma);
  }
  const double nu_max = likefarm::max_feasible_nu(pos, l - pos);
  inst.nu = std::uniform_real_distribution<double>(0.1, 0.9)(rng) * nu_max;
  return inst;
}

}  // namespace test
