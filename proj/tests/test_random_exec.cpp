#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <set>
#include <vector>

#include "dqma/exec.hpp"
#include "dqma/random.hpp"

using namespace dqma;

TEST_CASE("derived streams are deterministic and distinct") {
  for (const std::uint64_t seed : {0ULL, 1ULL, 0xDEADBEEFULL}) {
    rnd::Rng a = rnd::Rng::stream(seed, 3);
    rnd::Rng b = rnd::Rng::stream(seed, 3);
    for (int i = 0; i < 16; ++i) CHECK(a.bits() == b.bits());
    // Different trial indices decorrelate immediately.
    rnd::Rng c = rnd::Rng::stream(seed, 4);
    CHECK(rnd::Rng::stream(seed, 3).bits() != c.bits());
  }
  CHECK(rnd::derive_stream(1, 2) == rnd::derive_stream(1, 2));
  CHECK(rnd::derive_stream(1, 2) != rnd::derive_stream(2, 1));
  CHECK(rnd::mix(0) != 0);
}

TEST_CASE("uniform and below stay in range") {
  rnd::Rng rng(17);
  for (int i = 0; i < 1000; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    const std::uint64_t k = rng.below(7);
    CHECK(k < 7);
  }
  // below(n) hits every residue eventually.
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 200; ++i) seen.insert(rng.below(5));
  CHECK(seen.size() == 5);
}

TEST_CASE("Haar states are normalized and vary") {
  rnd::Rng rng(18);
  const PureState a = rnd::haar_state(rng, 6);
  const PureState b = rnd::haar_state(rng, 6);
  CHECK(std::abs(a.amplitudes().norm() - 1.0) < 1e-12);
  CHECK(std::abs(b.amplitudes().norm() - 1.0) < 1e-12);
  CHECK(std::norm(a.amplitudes().dot(b.amplitudes())) < 1.0 - 1e-6);
}

TEST_CASE("Ginibre densities are valid states of the requested rank") {
  rnd::Rng rng(19);
  for (const Index rank : {Index{1}, Index{2}, Index{4}}) {
    const DensityMatrix rho = rnd::ginibre_density(rng, 4, rank);
    CHECK(std::abs(rho.matrix().trace().real() - 1.0) < 1e-12);
    CHECK((rho.matrix() - rho.matrix().adjoint()).cwiseAbs().maxCoeff() < 1e-12);
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho.matrix());
    CHECK(es.eigenvalues().minCoeff() > -1e-12);
    Index positive = 0;
    for (Index i = 0; i < 4; ++i)
      if (es.eigenvalues()[i] > 1e-12) ++positive;
    CHECK(positive == rank);
  }
}

TEST_CASE("random PSD contractions have spectrum inside [0, 1]") {
  rnd::Rng rng(20);
  for (int rep = 0; rep < 5; ++rep) {
    const Matrix m = rnd::random_psd_contraction(rng, 5);
    CHECK((m - m.adjoint()).cwiseAbs().maxCoeff() < 1e-10);
    Eigen::SelfAdjointEigenSolver<Matrix> es(m);
    CHECK(es.eigenvalues().minCoeff() > -1e-12);
    CHECK(es.eigenvalues().maxCoeff() < 1.0 + 1e-12);
  }
}

TEST_CASE("random distributions are normalized") {
  rnd::Rng rng(21);
  for (const std::size_t size : {std::size_t{1}, std::size_t{4}, std::size_t{9}}) {
    const std::vector<double> d = rnd::random_distribution(rng, size);
    CHECK(d.size() == size);
    double total = 0.0;
    for (double p : d) {
      CHECK(p >= 0.0);
      total += p;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("indexed kernels produce identical results in both modes") {
  const auto f = [](std::size_t i) {
    // Something rounding-sensitive: alternating signs and magnitudes.
    return (i % 2 ? 1.0 : -1.0) / static_cast<double>(3 * i + 1);
  };
  const double serial = exec::indexed_sum(10001, exec::Mode::serial, f);
  const double parallel = exec::indexed_sum(10001, exec::Mode::parallel, f);
  CHECK(serial == parallel);  // bitwise: the reduction order is fixed

  const auto mapped_serial = exec::indexed_map<double>(257, exec::Mode::serial, f);
  const auto mapped_parallel = exec::indexed_map<double>(257, exec::Mode::parallel, f);
  CHECK(mapped_serial == mapped_parallel);
  CHECK(exec::thread_count() >= 1);
}
