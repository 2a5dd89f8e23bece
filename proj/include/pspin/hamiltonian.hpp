#pragma once

// H(sigma) = N^{-(p-1)/2} sum J_{i_1..i_p} sigma_{i_1}...sigma_{i_p} on the
// sphere of radius sqrt(N), and its Euclidean gradient.

#include <Eigen/Dense>

#include "pspin/disorder.hpp"
#include "pspin/rng.hpp"

namespace pspin {

/// A point on the sphere of radius sqrt(N).
class SpinConfiguration {
public:
  /// Projects v onto the sphere; v must be nonzero.
  explicit SpinConfiguration(const Eigen::VectorXd& v);

  static SpinConfiguration uniform(int n, Engine& rng);

  const Eigen::VectorXd& coords() const { return coords_; }
  int n() const { return static_cast<int>(coords_.size()); }

private:
  Eigen::VectorXd coords_;
};

/// R(sigma, sigma') = sigma . sigma' / N.
template <typename DerivedA, typename DerivedB>
double overlap(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  return a.dot(b) / static_cast<double>(a.size());
}

inline double overlap(const SpinConfiguration& a, const SpinConfiguration& b) {
  return overlap(a.coords(), b.coords());
}

double hamiltonian(const DisorderTensor& j, const Eigen::Ref<const Eigen::VectorXd>& sigma);
inline double hamiltonian(const DisorderTensor& j, const SpinConfiguration& sigma) {
  return hamiltonian(j, sigma.coords());
}

Eigen::VectorXd gradient(const DisorderTensor& j, const Eigen::Ref<const Eigen::VectorXd>& sigma);
inline Eigen::VectorXd gradient(const DisorderTensor& j, const SpinConfiguration& sigma) {
  return gradient(j, sigma.coords());
}

/// H is homogeneous of degree p, so H = sigma . grad / p.
struct EnergyGradient {
  double energy;
  Eigen::VectorXd grad;
};
EnergyGradient energy_and_gradient(const DisorderTensor& j, const Eigen::Ref<const Eigen::VectorXd>& sigma);

/// Symmetric matrix M = (J + J^T) / (2 sqrt N) with H = sigma^T M sigma (p = 2 only).
Eigen::MatrixXd coupling_matrix(const DisorderTensor& j);

}  // namespace pspin
