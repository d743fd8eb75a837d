#include "dqma/random.hpp"

#include <Eigen/QR>

namespace dqma::rnd {

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t index) {
  return mix(mix(seed) ^ mix(index * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL));
}

PureState haar_state(Rng& rng, Index dim) {
  if (dim < 1) throw std::invalid_argument("haar_state: dimension must be positive");
  Vector v(dim);
  for (Index i = 0; i < dim; ++i) v(i) = rng.gaussian();
  const double norm = v.norm();
  if (norm == 0.0) return PureState::basis(dim, 0);
  return PureState::trusted(v / norm);
}

DensityMatrix ginibre_density(Rng& rng, Index dim, Index rank) {
  if (dim < 1) throw std::invalid_argument("ginibre_density: dimension must be positive");
  if (rank <= 0 || rank > dim) rank = dim;
  Matrix g(dim, rank);
  for (Index i = 0; i < dim; ++i)
    for (Index j = 0; j < rank; ++j) g(i, j) = rng.gaussian();
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return DensityMatrix::trusted((rho + rho.adjoint()) / 2.0);
}

Matrix random_psd_contraction(Rng& rng, Index dim) {
  Matrix g(dim, dim);
  for (Index i = 0; i < dim; ++i)
    for (Index j = 0; j < dim; ++j) g(i, j) = rng.gaussian();
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  Vector evals(dim);
  for (Index i = 0; i < dim; ++i) evals(i) = rng.uniform();
  return q * evals.asDiagonal() * q.adjoint();
}

std::vector<double> random_distribution(Rng& rng, std::size_t size) {
  if (size == 0) throw std::invalid_argument("random_distribution: empty support");
  std::vector<double> p(size);
  double total = 0.0;
  for (double& v : p) {
    v = rng.uniform() + 1e-12;
    total += v;
  }
  for (double& v : p) v /= total;
  return p;
}

}  // namespace dqma::rnd
