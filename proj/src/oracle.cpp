// Copyright 2026 The stgraph Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "stgraph/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>

#include "stgraph/error.hpp"
#include "stgraph/tensor_file.hpp"

namespace stgraph::oracle {

namespace {

Eigen::VectorXd random_unit(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = g(rng);
  return v.normalized();
}

}  // namespace

Eigen::MatrixXd to_dense(const FeatureMatrix& f) {
  Eigen::MatrixXd out(f.rows(), f.cols());
  for (std::size_t i = 0; i < f.rows(); ++i) {
    for (std::size_t j = 0; j < f.cols(); ++j) out(i, j) = f(i, j);
  }
  return out;
}

ExplicitGraph build_explicit(const MotionGraph& g, const FeatureMatrix& f, double lambda) {
  const std::size_t n = g.n();
  if (n > kMaxDenseNodes) {
    throw Error(ErrorCode::kTooLarge, std::to_string(n) + " nodes exceeds the dense cap of " +
                                          std::to_string(kMaxDenseNodes));
  }
  if (f.rows() != n) throw Error(ErrorCode::kDimensionMismatch, "features do not match graph");

  ExplicitGraph out;
  out.M = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t a = 0; a < n; ++a) {
    const auto nb = g.neighbors(static_cast<NodeId>(a));
    const auto wt = g.weights(static_cast<NodeId>(a));
    for (std::size_t k = 0; k < nb.size(); ++k) out.M(a, nb[k]) = wt[k];
  }

  const Eigen::MatrixXd F = to_dense(f);
  Eigen::MatrixXd gram = F.transpose() * F;
  gram.diagonal().array() += lambda;
  // Pivoted LDLT here; the production path uses an unpivoted Cholesky.
  const Eigen::MatrixXd coef = gram.ldlt().solve(F.transpose());
  out.P = F * coef;
  // P M P grouped as F (C M F) C so it costs n^2 d rather than n^3.
  const Eigen::MatrixXd inner = coef * (out.M * F);
  out.A = (F * inner) * coef;
  return out;
}

PowerResult dense_power_iteration(const Eigen::MatrixXd& a, const Eigen::VectorXd& x0,
                                  int max_iters, double tol, bool check_gap) {
  PowerResult res;
  Eigen::VectorXd x = x0.normalized();
  for (int it = 1; it <= max_iters; ++it) {
    const Eigen::VectorXd y = a * x;
    const double theta = x.dot(y);
    const double residual = (y - theta * x).norm();
    res.vector = x;
    res.value = theta;
    res.residual = residual;
    res.iterations = it;
    if (residual <= std::max(tol * std::abs(theta), 1e-12)) {
      res.converged = true;
      break;
    }
    const double norm = y.norm();
    if (norm == 0.0) break;
    x = y / norm;
  }

  if (check_gap && res.converged && res.value != 0.0) {
    // Largest magnitude left after removing the found pair.
    const Eigen::MatrixXd rest = a - res.value * res.vector * res.vector.transpose();
    Eigen::VectorXd z = random_unit(a.rows(), 0x5eed);
    double second = 0.0;
    for (int it = 0; it < 500; ++it) {
      const Eigen::VectorXd y = rest * z;
      second = y.norm();
      if (second == 0.0) break;
      z = y / second;
    }
    res.gap_ok = second < (1.0 - 1e-6) * std::abs(res.value);
  }
  return res;
}

double SpectrumReport::eigengap() const {
  return eigenvalues.size() < 2 ? std::numeric_limits<double>::infinity()
                                : eigenvalues[0] - eigenvalues[1];
}

double SpectrumReport::ratio() const {
  // A second eigenvalue at roundoff level counts as zero.
  if (eigenvalues.size() < 2 || eigenvalues[1] <= 1e-12 * std::abs(eigenvalues[0])) {
    return std::numeric_limits<double>::infinity();
  }
  return eigenvalues[0] / eigenvalues[1];
}

SpectrumReport spectrum(const Eigen::MatrixXd& a, int k) {
  if (k < 1 || k > a.rows()) throw Error(ErrorCode::kInvalidConfig, "need 1 <= k <= n");
  const Eigen::MatrixXd sym = 0.5 * (a + a.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  SpectrumReport report;
  report.converged = es.info() == Eigen::Success;
  if (!report.converged) return report;

  // Eigen returns ascending values; walk from the top.
  const Eigen::Index n = a.rows();
  const double scale = std::max(es.eigenvalues().cwiseAbs().maxCoeff(), 1e-300);
  for (int i = 0; i < k; ++i) {
    const double value = es.eigenvalues()[n - 1 - i];
    Eigen::VectorXd vec = es.eigenvectors().col(n - 1 - i);
    report.residuals.push_back((a * vec - value * vec).norm() / scale);
    report.eigenvalues.push_back(value);
    report.eigenvectors.push_back(std::move(vec));
  }
  return report;
}

PerturbationReport perturbation_bound(const Eigen::MatrixXd& a_star, const Eigen::MatrixXd& e) {
  if (a_star.rows() != e.rows() || a_star.cols() != e.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "A* and E must have the same shape");
  }
  PerturbationReport r;
  r.e_frobenius = e.norm();
  r.a_frobenius = a_star.norm();
  r.epsilon = r.a_frobenius > 0.0 ? 8.0 * r.e_frobenius / r.a_frobenius
                                  : std::numeric_limits<double>::infinity();
  if (r.e_frobenius == 0.0) r.epsilon = 0.0;
  return r;
}

Eigen::MatrixXd random_symmetric(std::size_t n, double frobenius, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd e(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      e(i, j) = g(rng);
      e(j, i) = e(i, j);
    }
  }
  const double norm = e.norm();
  return norm > 0.0 ? Eigen::MatrixXd(e * (frobenius / norm)) : e;
}

double rotation_angle(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double c = std::abs(a.dot(b)) / (a.norm() * b.norm());
  return std::acos(std::min(1.0, c));
}

std::vector<std::size_t> object_first_order(std::span<const std::uint8_t> labels) {
  std::vector<std::size_t> order(labels.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_partition(order.begin(), order.end(),
                        [&labels](std::size_t i) { return labels[i] != 0; });
  return order;
}

Eigen::MatrixXd reorder(const Eigen::MatrixXd& a, const std::vector<std::size_t>& order) {
  const auto n = static_cast<Eigen::Index>(order.size());
  Eigen::MatrixXd out(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) out(i, j) = a(order[i], order[j]);
  }
  return out;
}

void dump_matrix(const Eigen::MatrixXd& a, const std::filesystem::path& path) {
  Tensor t;
  t.dims = {static_cast<std::uint32_t>(a.rows()), static_cast<std::uint32_t>(a.cols())};
  t.values.reserve(a.size());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) t.values.push_back(static_cast<float>(a(i, j)));
  }
  write_tensor(path, t);
}

void write_eigenvalues_csv(const SpectrumReport& report, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out.precision(17);
  out << "index,eigenvalue\n";
  for (std::size_t i = 0; i < report.eigenvalues.size(); ++i) {
    out << i + 1 << ',' << report.eigenvalues[i] << '\n';
  }
}

}  // namespace stgraph::oracle
