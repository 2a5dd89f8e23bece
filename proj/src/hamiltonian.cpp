#include "pspin/hamiltonian.hpp"

#include <cmath>
#include <stdexcept>

namespace pspin {

namespace {

using ConstMap = Eigen::Map<const Eigen::MatrixXd>;

void check_dims(const DisorderTensor& j, Eigen::Index n) {
  if (n != j.n()) throw std::invalid_argument("configuration dimension does not match the disorder tensor");
}

double scale(const DisorderTensor& j) { return std::pow(static_cast<double>(j.n()), -0.5 * (j.p() - 1)); }

// A row-major tensor with `rest * n` entries viewed column-major is an
// n x rest matrix whose columns run over the last index.
Eigen::VectorXd contract_last(const double* data, Eigen::Index n, Eigen::Index rest,
                              const Eigen::Ref<const Eigen::VectorXd>& sigma) {
  return ConstMap(data, n, rest).transpose() * sigma;
}

Eigen::VectorXd contract_first(const double* data, Eigen::Index n, Eigen::Index rest,
                               const Eigen::Ref<const Eigen::VectorXd>& sigma) {
  return ConstMap(data, rest, n) * sigma;
}

// Contracts every slot except `slot`, returning a length-n vector.
Eigen::VectorXd contract_all_but(const DisorderTensor& j, int slot, const Eigen::Ref<const Eigen::VectorXd>& sigma) {
  const Eigen::Index n = j.n();
  Eigen::Index size = static_cast<Eigen::Index>(j.size());
  Eigen::VectorXd buf;
  const double* data = j.entries().data();
  for (int k = j.p() - 1; k > slot; --k) {
    buf = contract_last(data, n, size / n, sigma);
    size /= n;
    data = buf.data();
  }
  for (int k = 0; k < slot; ++k) {
    Eigen::VectorXd next = contract_first(data, n, size / n, sigma);
    size /= n;
    buf.swap(next);
    data = buf.data();
  }
  if (buf.size() == 0) buf = Eigen::Map<const Eigen::VectorXd>(data, n);
  return buf;
}

}  // namespace

SpinConfiguration::SpinConfiguration(const Eigen::VectorXd& v) {
  const double norm = v.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) throw std::invalid_argument("cannot project a zero vector onto the sphere");
  coords_ = v * (std::sqrt(static_cast<double>(v.size())) / norm);
}

SpinConfiguration SpinConfiguration::uniform(int n, Engine& rng) {
  std::normal_distribution<double> normal;
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = normal(rng);
  return SpinConfiguration(v);
}

double hamiltonian(const DisorderTensor& j, const Eigen::Ref<const Eigen::VectorXd>& sigma) {
  check_dims(j, sigma.size());
  const Eigen::VectorXd v = contract_all_but(j, 0, sigma);
  return scale(j) * v.dot(sigma);
}

Eigen::VectorXd gradient(const DisorderTensor& j, const Eigen::Ref<const Eigen::VectorXd>& sigma) {
  check_dims(j, sigma.size());
  Eigen::VectorXd g = Eigen::VectorXd::Zero(j.n());
  for (int slot = 0; slot < j.p(); ++slot) g += contract_all_but(j, slot, sigma);
  return scale(j) * g;
}

EnergyGradient energy_and_gradient(const DisorderTensor& j, const Eigen::Ref<const Eigen::VectorXd>& sigma) {
  Eigen::VectorXd g = gradient(j, sigma);
  const double e = sigma.dot(g) / j.p();
  return {e, std::move(g)};
}

Eigen::MatrixXd coupling_matrix(const DisorderTensor& j) {
  if (j.p() != 2) throw std::invalid_argument("coupling_matrix: p must be 2");
  const Eigen::Index n = j.n();
  // Row-major J viewed column-major is J^T; the symmetrisation makes that moot.
  const ConstMap jt(j.entries().data(), n, n);
  return (jt + jt.transpose()) / (2.0 * std::sqrt(static_cast<double>(n)));
}

}  // namespace pspin
