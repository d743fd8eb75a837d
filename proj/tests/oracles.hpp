#pragma once

// Test-side oracles implemented independently of the library internals:
// index-summation partial traces, SVD trace norms, a dense brute-force
// evaluation of the path protocol that materializes the full register space
// and simulates the register flow, generic embedded swap operators, and
// small combinatorial helpers.

#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "dqma/linalg.hpp"
#include "dqma/tree.hpp"

namespace oracles {

using dqma::Complex;
using dqma::Index;
using dqma::Matrix;

// Partial trace by direct index summation over row/column digit tuples.
inline Matrix partial_trace_sum(const Matrix& m, const std::vector<Index>& dims,
                                const std::vector<int>& keep) {
  const int n = static_cast<int>(dims.size());
  std::vector<bool> kept(n, false);
  for (int k : keep) kept[k] = true;
  Index keep_dim = 1, trace_dim = 1;
  for (int i = 0; i < n; ++i) (kept[i] ? keep_dim : trace_dim) *= dims[i];

  auto digits_of = [&](Index flat) {
    std::vector<Index> d(n);
    for (int i = n - 1; i >= 0; --i) {
      d[i] = flat % dims[i];
      flat /= dims[i];
    }
    return d;
  };
  auto flat_of = [&](const std::vector<Index>& d) {
    Index flat = 0;
    for (int i = 0; i < n; ++i) flat = flat * dims[i] + d[i];
    return flat;
  };
  auto kept_flat = [&](const std::vector<Index>& d) {
    Index flat = 0;
    for (int i = 0; i < n; ++i)
      if (kept[i]) flat = flat * dims[i] + d[i];
    return flat;
  };

  Matrix out = Matrix::Zero(keep_dim, keep_dim);
  const Index total = m.rows();
  for (Index row = 0; row < total; ++row) {
    const auto rd = digits_of(row);
    for (Index col = 0; col < total; ++col) {
      const auto cd = digits_of(col);
      bool diagonal = true;
      for (int i = 0; i < n; ++i)
        if (!kept[i] && rd[i] != cd[i]) diagonal = false;
      if (diagonal) out(kept_flat(rd), kept_flat(cd)) += m(row, col);
    }
  }
  (void)flat_of;
  return out;
}

// Trace norm as the sum of singular values.
inline double trace_norm_svd(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues().sum();
}

// Full-space operator acting as `op` on register `pos` of the given layout.
inline Matrix embed_single(const Matrix& op, const std::vector<Index>& dims, int pos) {
  Matrix acc = Matrix::Identity(1, 1);
  for (int i = 0; i < static_cast<int>(dims.size()); ++i) {
    const Matrix factor =
        (i == pos) ? op : Matrix(Matrix::Identity(dims[i], dims[i]));
    acc = dqma::kron(acc, factor);
  }
  return acc;
}

// Full-space SWAP of two (equal-dimension) registers, by index permutation.
inline Matrix embedded_swap(const std::vector<Index>& dims, int a, int b) {
  const int n = static_cast<int>(dims.size());
  Index total = 1;
  for (Index d : dims) total *= d;
  Matrix swap = Matrix::Zero(total, total);
  for (Index flat = 0; flat < total; ++flat) {
    std::vector<Index> digits(n);
    Index rest = flat;
    for (int i = n - 1; i >= 0; --i) {
      digits[i] = rest % dims[i];
      rest /= dims[i];
    }
    std::swap(digits[a], digits[b]);
    Index image = 0;
    for (int i = 0; i < n; ++i) image = image * dims[i] + digits[i];
    swap(image, flat) = 1.0;
  }
  return swap;
}

inline Matrix embedded_sym_projector(const std::vector<Index>& dims, int a, int b) {
  Index total = 1;
  for (Index d : dims) total *= d;
  return (Matrix::Identity(total, total) + embedded_swap(dims, a, b)) / 2.0;
}

// Which tests a coin string triggers on the path, derived by simulating the
// register flow: node j holds register j and sends it right when its coin is
// 0; a node that kept its own register and received one SWAP-tests the two;
// the rightmost node measures any register it received.
struct FlowTests {
  std::vector<std::pair<int, int>> swaps;  // (received register, own register)
  int povm_register = -1;
};

inline FlowTests path_flow_tests(std::uint32_t coins, int r) {
  FlowTests out;
  std::vector<int> incoming(r + 1, -1);
  for (int j = 0; j < r; ++j)
    if (((coins >> j) & 1u) == 0) incoming[j + 1] = j;
  for (int j = 1; j < r; ++j)
    if (((coins >> j) & 1u) == 1 && incoming[j] >= 0) out.swaps.push_back({incoming[j], j});
  if (incoming[r] >= 0) out.povm_register = incoming[r];
  return out;
}

// Brute-force acceptance of the path protocol on the full register space
// R_0..R_{r-1} (dimension m^r): average over coin strings of
// tr(product of embedded test operators * rho_full).
inline double dense_path_acceptance(int r, Index m, const Matrix& rho_full,
                                    const Matrix& povm_accept) {
  const std::vector<Index> dims(static_cast<std::size_t>(r), m);
  Index total = 1;
  for (int i = 0; i < r; ++i) total *= m;
  double acc = 0.0;
  for (std::uint32_t coins = 0; coins < (1u << r); ++coins) {
    const FlowTests tests = path_flow_tests(coins, r);
    Matrix op = Matrix::Identity(total, total);
    for (const auto& [left, right] : tests.swaps)
      op = op * embedded_sym_projector(dims, left, right);
    if (tests.povm_register >= 0)
      op = op * embed_single(povm_accept, dims, tests.povm_register);
    acc += (op * rho_full).trace().real();
  }
  return acc / static_cast<double>(1u << r);
}

// All-pairs shortest paths by Floyd-Warshall.
inline std::map<int, std::map<int, int>> floyd_warshall(const dqma::Network& net) {
  const int n = static_cast<int>(net.nodes.size());
  std::map<int, int> pos;
  for (int i = 0; i < n; ++i) pos[net.nodes[i]] = i;
  const int inf = 1 << 20;
  std::vector<std::vector<int>> d(n, std::vector<int>(n, inf));
  for (int i = 0; i < n; ++i) d[i][i] = 0;
  for (const auto& [a, b] : net.edges) d[pos.at(a)][pos.at(b)] = d[pos.at(b)][pos.at(a)] = 1;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
  std::map<int, std::map<int, int>> out;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out[net.nodes[i]][net.nodes[j]] = d[i][j];
  return out;
}

// Exact binomial tail P[Bin(k, eps) >= threshold] with rational-style
// accumulation of binomial coefficients.
inline double binomial_tail(int k, double eps, int threshold) {
  double total = 0.0;
  for (int j = threshold; j <= k; ++j) {
    double coeff = 1.0;
    for (int i = 0; i < j; ++i) coeff = coeff * (k - i) / (i + 1);
    double term = coeff;
    for (int i = 0; i < j; ++i) term *= eps;
    for (int i = 0; i < k - j; ++i) term *= (1.0 - eps);
    total += term;
  }
  return total;
}

}  // namespace oracles
