#include "dqma/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

namespace dqma {

namespace {

bool finite(const Matrix& m) { return m.allFinite(); }

double hermitian_deviation(const Matrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

double min_eigenvalue(const Matrix& hermitian) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("eigenvalue computation failed");
  return es.eigenvalues().minCoeff();
}

void require_psd(const Matrix& hermitian, const char* who) {
  if (min_eigenvalue(hermitian) < -kValidityTol)
    throw std::invalid_argument(std::string(who) + ": matrix is not positive semidefinite");
}

}  // namespace

void RegisterLayout::validate() const {
  if (registers.empty()) throw std::invalid_argument("RegisterLayout: no registers");
  std::set<RegisterId> seen;
  for (const auto& reg : registers) {
    if (reg.dim < 2)
      throw std::invalid_argument("RegisterLayout: local dimension must be at least 2");
    if (!seen.insert(reg.id).second)
      throw std::invalid_argument("RegisterLayout: duplicate register id " +
                                  std::to_string(reg.id));
  }
}

Index RegisterLayout::total_dim() const {
  Index total = 1;
  for (const auto& reg : registers) {
    if (total > (1LL << 40) / reg.dim)
      throw std::overflow_error("RegisterLayout: total dimension overflow");
    total *= reg.dim;
  }
  return total;
}

int RegisterLayout::position_of(RegisterId id) const {
  for (std::size_t i = 0; i < registers.size(); ++i)
    if (registers[i].id == id) return static_cast<int>(i);
  return -1;
}

PureState::PureState(Vector amplitudes) : amps_(std::move(amplitudes)) {
  if (amps_.size() == 0 || !amps_.allFinite())
    throw std::invalid_argument("PureState: empty or non-finite amplitude vector");
  const double norm = amps_.norm();
  if (std::abs(norm - 1.0) > kRepairTol)
    throw std::invalid_argument("PureState: norm " + std::to_string(norm) +
                                " too far from 1 to renormalize");
  amps_ /= norm;
}

PureState PureState::basis(Index dim, Index k) {
  if (k < 0 || k >= dim) throw std::out_of_range("PureState::basis: index out of range");
  Vector v = Vector::Zero(dim);
  v(k) = 1.0;
  return PureState(std::move(v), trusted_tag{});
}

PureState PureState::trusted(Vector amplitudes) {
  return PureState(std::move(amplitudes), trusted_tag{});
}

DensityMatrix PureState::to_density() const {
  return DensityMatrix::trusted(amps_ * amps_.adjoint());
}

DensityMatrix::DensityMatrix(Matrix m) : mat_(std::move(m)) {
  if (mat_.rows() != mat_.cols() || mat_.rows() == 0)
    throw std::invalid_argument("DensityMatrix: matrix must be square and nonempty");
  if (!finite(mat_)) throw std::invalid_argument("DensityMatrix: non-finite entries");
  if (hermitian_deviation(mat_) > kValidityTol)
    throw std::invalid_argument("DensityMatrix: matrix is not Hermitian");
  mat_ = ((mat_ + mat_.adjoint()) / 2.0).eval();  // exact Hermitian symmetrization
  const double tr = mat_.trace().real();
  if (std::abs(tr - 1.0) > kRepairTol)
    throw std::invalid_argument("DensityMatrix: trace " + std::to_string(tr) +
                                " too far from 1 to renormalize");
  mat_ /= tr;
  require_psd(mat_, "DensityMatrix");
}

DensityMatrix DensityMatrix::trusted(Matrix m) {
  if (m.rows() != m.cols() || m.rows() == 0)
    throw std::invalid_argument("DensityMatrix::trusted: matrix must be square");
  return DensityMatrix(std::move(m), trusted_tag{});
}

BinaryPOVM::BinaryPOVM(Matrix acc, Matrix rej) : accept(std::move(acc)), reject(std::move(rej)) {
  if (accept.rows() != accept.cols() || reject.rows() != reject.cols() ||
      accept.rows() != reject.rows())
    throw std::invalid_argument("BinaryPOVM: elements must be square and same-dimensional");
  if (!finite(accept) || !finite(reject))
    throw std::invalid_argument("BinaryPOVM: non-finite entries");
  if (hermitian_deviation(accept) > kValidityTol || hermitian_deviation(reject) > kValidityTol)
    throw std::invalid_argument("BinaryPOVM: elements must be Hermitian");
  require_psd(accept, "BinaryPOVM");
  require_psd(reject, "BinaryPOVM");
  Matrix sum = accept + reject;
  sum -= Matrix::Identity(accept.rows(), accept.cols());
  if (sum.cwiseAbs().maxCoeff() > kValidityTol)
    throw std::invalid_argument("BinaryPOVM: elements do not sum to the identity");
}

BinaryPOVM BinaryPOVM::from_accept(Matrix acc) {
  Matrix rej = Matrix::Identity(acc.rows(), acc.cols()) - acc;
  return BinaryPOVM(std::move(acc), std::move(rej));
}

BinaryPOVM BinaryPOVM::projective(const PureState& v) {
  return from_accept(v.amplitudes() * v.amplitudes().adjoint());
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

PureState tensor(const PureState& a, const PureState& b, Index dim_cap) {
  if (a.dim() > dim_cap / b.dim())
    throw cap_exceeded_error("tensor: product dimension " + std::to_string(a.dim()) + "x" +
                             std::to_string(b.dim()) + " exceeds cap " +
                             std::to_string(dim_cap));
  Vector out(a.dim() * b.dim());
  for (Index i = 0; i < a.dim(); ++i)
    out.segment(i * b.dim(), b.dim()) = a.amplitudes()(i) * b.amplitudes();
  return PureState::trusted(std::move(out));
}

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b, Index dim_cap) {
  if (a.dim() > dim_cap / b.dim())
    throw cap_exceeded_error("tensor: product dimension " + std::to_string(a.dim()) + "x" +
                             std::to_string(b.dim()) + " exceeds cap " +
                             std::to_string(dim_cap));
  return DensityMatrix::trusted(kron(a.matrix(), b.matrix()));
}

Matrix partial_trace(const Matrix& m, const RegisterLayout& layout,
                     const std::vector<RegisterId>& keep) {
  layout.validate();
  const Index total = layout.total_dim();
  if (m.rows() != total || m.cols() != total)
    throw std::invalid_argument("partial_trace: matrix dimension " + std::to_string(m.rows()) +
                                " does not match layout total " + std::to_string(total));
  const std::size_t n = layout.registers.size();
  std::vector<bool> kept(n, false);
  for (RegisterId id : keep) {
    int pos = layout.position_of(id);
    if (pos < 0)
      throw std::invalid_argument("partial_trace: register " + std::to_string(id) +
                                  " not in layout");
    kept[static_cast<std::size_t>(pos)] = true;
  }

  // Strides of each register in the flat index (most significant first).
  std::vector<Index> stride(n), dims(n);
  {
    Index s = 1;
    for (std::size_t i = n; i-- > 0;) {
      dims[i] = layout.registers[i].dim;
      stride[i] = s;
      s *= dims[i];
    }
  }
  Index kept_dim = 1, traced_dim = 1;
  std::vector<Index> kept_stride(n, 0);
  for (std::size_t i = n; i-- > 0;) {
    if (kept[i]) {
      kept_stride[i] = kept_dim;
      kept_dim *= dims[i];
    } else {
      traced_dim *= dims[i];
    }
  }
  (void)traced_dim;

  Matrix out = Matrix::Zero(kept_dim, kept_dim);
  for (Index row = 0; row < total; ++row) {
    // Decompose the row once; columns must agree on the traced digits, so we
    // enumerate columns by walking the same digit decomposition.
    std::vector<Index> rdig(n);
    for (std::size_t i = 0; i < n; ++i) rdig[i] = (row / stride[i]) % dims[i];
    Index krow = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (kept[i]) krow += rdig[i] * kept_stride[i];
    for (Index col = 0; col < total; ++col) {
      Index kcol = 0;
      bool diag = true;
      for (std::size_t i = 0; i < n; ++i) {
        const Index cd = (col / stride[i]) % dims[i];
        if (kept[i])
          kcol += cd * kept_stride[i];
        else if (cd != rdig[i]) {
          diag = false;
          break;
        }
      }
      if (diag) out(krow, kcol) += m(row, col);
    }
  }
  return out;
}

DensityMatrix partial_trace(const DensityMatrix& rho, const RegisterLayout& layout,
                            const std::vector<RegisterId>& keep) {
  return DensityMatrix::trusted(partial_trace(rho.matrix(), layout, keep));
}

double trace_norm(const Matrix& m) {
  if (m.rows() == m.cols() && hermitian_deviation(m) <= kValidityTol) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(((m + m.adjoint()) / 2.0).eval(),
                                             Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw std::runtime_error("trace_norm: eigensolver failed");
    return es.eigenvalues().cwiseAbs().sum();
  }
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues().sum();
}

double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim())
    throw std::invalid_argument("trace_distance: dimension mismatch");
  double d = 0.5 * trace_norm(rho.matrix() - sigma.matrix());
  return std::clamp(d, 0.0, 1.0);
}

double fidelity_via_purification(const PureState& psi, const PureState& phi,
                                 const RegisterLayout& layout, RegisterId traced_out) {
  if (layout.registers.size() != 2)
    throw std::invalid_argument("fidelity_via_purification: layout must be bipartite");
  if (!layout.contains(traced_out))
    throw std::invalid_argument("fidelity_via_purification: traced_out register not in layout");
  const Index total = layout.total_dim();
  if (psi.dim() != total || phi.dim() != total)
    throw std::invalid_argument("fidelity_via_purification: state dimension mismatch");
  std::vector<RegisterId> keep;
  for (const auto& reg : layout.registers)
    if (reg.id != traced_out) keep.push_back(reg.id);
  Matrix cross = phi.amplitudes() * psi.amplitudes().adjoint();  // |phi⟩⟨psi|
  return std::min(trace_norm(partial_trace(cross, layout, keep)), 1.0);
}

namespace {

Matrix swap_operator(Index d) {
  Matrix s = Matrix::Zero(d * d, d * d);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) s(j * d + i, i * d + j) = 1.0;
  return s;
}

}  // namespace

Matrix symmetric_projector(Index local_dim, Index dim_cap) {
  if (local_dim < 2) throw std::invalid_argument("symmetric_projector: local dim must be >= 2");
  if (local_dim > dim_cap / local_dim)
    throw cap_exceeded_error("symmetric_projector: pair dimension exceeds cap");
  const Index d2 = local_dim * local_dim;
  return (Matrix::Identity(d2, d2) + swap_operator(local_dim)) / 2.0;
}

Matrix antisymmetric_projector(Index local_dim, Index dim_cap) {
  if (local_dim < 2)
    throw std::invalid_argument("antisymmetric_projector: local dim must be >= 2");
  if (local_dim > dim_cap / local_dim)
    throw cap_exceeded_error("antisymmetric_projector: pair dimension exceeds cap");
  const Index d2 = local_dim * local_dim;
  return (Matrix::Identity(d2, d2) - swap_operator(local_dim)) / 2.0;
}

double measure_accept(const Matrix& accept, const DensityMatrix& rho) {
  if (accept.rows() != rho.dim())
    throw std::invalid_argument("measure_accept: dimension mismatch");
  const double p = (accept * rho.matrix()).trace().real();
  return std::clamp(p, 0.0, 1.0);
}

double measure_accept(const Matrix& accept, const PureState& psi) {
  if (accept.rows() != psi.dim())
    throw std::invalid_argument("measure_accept: dimension mismatch");
  const double p = (psi.amplitudes().adjoint() * accept * psi.amplitudes())(0).real();
  return std::clamp(p, 0.0, 1.0);
}

double measure_binary(const DensityMatrix& rho, const BinaryPOVM& povm) {
  return measure_accept(povm.accept, rho);
}

double swap_test_accept_probability(const DensityMatrix& pair_state,
                                    const RegisterLayout& pair_layout) {
  if (pair_layout.registers.size() != 2 ||
      pair_layout.registers[0].dim != pair_layout.registers[1].dim)
    throw std::invalid_argument(
        "swap_test_accept_probability: layout must hold two registers of equal dimension");
  const Index d = pair_layout.registers[0].dim;
  if (pair_state.dim() != d * d)
    throw std::invalid_argument("swap_test_accept_probability: state dimension mismatch");
  // tr(Π_sym ρ) = (1 + tr(Sρ))/2 with tr(Sρ) = Σ_{ij} ρ(i·d+j, j·d+i).
  Complex swap_trace = 0.0;
  const Matrix& rho = pair_state.matrix();
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) swap_trace += rho(i * d + j, j * d + i);
  return std::clamp(0.5 * (1.0 + swap_trace.real()), 0.0, 1.0);
}

double purity_overlap(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim())
    throw std::invalid_argument("purity_overlap: dimension mismatch");
  // tr(ρσ) = Σ_ij ρ(i,j)σ(j,i); real for Hermitian inputs.
  return (rho.matrix().cwiseProduct(sigma.matrix().transpose())).sum().real();
}

double swap_test_accept_product(const DensityMatrix& rho, const DensityMatrix& sigma) {
  return std::clamp(0.5 * (1.0 + purity_overlap(rho, sigma)), 0.0, 1.0);
}

double swap_test_accept_product(const PureState& psi, const PureState& phi) {
  if (psi.dim() != phi.dim())
    throw std::invalid_argument("swap_test_accept_product: dimension mismatch");
  const double overlap = std::norm(psi.amplitudes().dot(phi.amplitudes()));
  return std::clamp(0.5 + 0.5 * overlap, 0.0, 1.0);
}

}  // namespace dqma
