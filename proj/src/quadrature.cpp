#include "hch/quadrature.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>

namespace hch {

namespace {

// Golub-Welsch: nodes are eigenvalues of the symmetric Jacobi matrix, weights
// are mu0 times the squared first eigenvector components.
QuadratureRule golub_welsch(const Eigen::VectorXd& offdiag, double mu0) {
  const auto q = static_cast<Eigen::Index>(offdiag.size() + 1);
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(q, q);
  for (Eigen::Index k = 0; k + 1 < q; ++k) {
    jac(k, k + 1) = offdiag(k);
    jac(k + 1, k) = offdiag(k);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
  if (es.info() != Eigen::Success) throw std::runtime_error("golub_welsch: eigensolver failed");
  QuadratureRule r;
  r.nodes.resize(static_cast<std::size_t>(q));
  r.weights.resize(static_cast<std::size_t>(q));
  for (Eigen::Index k = 0; k < q; ++k) {
    r.nodes[static_cast<std::size_t>(k)] = es.eigenvalues()(k);
    const double v = es.eigenvectors()(0, k);
    r.weights[static_cast<std::size_t>(k)] = mu0 * v * v;
  }
  // Symmetrize: both families are even, so pair up nodes to remove round-off asymmetry.
  for (std::size_t i = 0, j = r.nodes.size() - 1; i < j; ++i, --j) {
    const double x = 0.5 * (r.nodes[j] - r.nodes[i]);
    const double w = 0.5 * (r.weights[i] + r.weights[j]);
    r.nodes[i] = -x;
    r.nodes[j] = x;
    r.weights[i] = r.weights[j] = w;
  }
  if (r.nodes.size() % 2 == 1) r.nodes[r.nodes.size() / 2] = 0.0;
  return r;
}

}  // namespace

QuadratureRule gauss_hermite_normal(int q) {
  if (q < 1) throw std::invalid_argument("gauss_hermite_normal: q must be >= 1");
  if (q == 1) return {{0.0}, {1.0}};
  // Probabilists' Hermite recurrence: He_{k+1} = x He_k - k He_{k-1}.
  Eigen::VectorXd off(q - 1);
  for (int k = 1; k < q; ++k) off(k - 1) = std::sqrt(static_cast<double>(k));
  return golub_welsch(off, 1.0);
}

QuadratureRule gauss_legendre(int q) {
  if (q < 1) throw std::invalid_argument("gauss_legendre: q must be >= 1");
  if (q == 1) return {{0.0}, {2.0}};
  Eigen::VectorXd off(q - 1);
  for (int k = 1; k < q; ++k) {
    const double kk = k;
    off(k - 1) = kk / std::sqrt(4.0 * kk * kk - 1.0);
  }
  return golub_welsch(off, 2.0);
}

QuadratureRule gauss_legendre(int q, double a, double b) {
  QuadratureRule r = gauss_legendre(q);
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  for (std::size_t i = 0; i < r.nodes.size(); ++i) {
    r.nodes[i] = mid + half * r.nodes[i];
    r.weights[i] *= half;
  }
  return r;
}

}  // namespace hch
