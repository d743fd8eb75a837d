#pragma once

// Dense complex linear algebra for finite-dimensional quantum states:
// pure states, density matrices, register layouts, tensor products, partial
// traces, trace norm / trace distance, the purification-based fidelity
// identity, symmetric/antisymmetric projectors and binary measurements,
// including the SWAP test.
//
// Conventions: registers are ordered most-significant first, i.e. the flat
// index of a basis state |i0, i1, ...⟩ is i0·(d1·d2·...) + i1·(d2·...) + ...,
// matching the Kronecker product order of `tensor`.

#include <cstdint>
#include <vector>

#include "dqma/common.hpp"

namespace dqma {

using RegisterId = std::int32_t;

// Ordered list of (register id, local dimension).
struct RegisterLayout {
  struct Register {
    RegisterId id;
    Index dim;
  };
  std::vector<Register> registers;

  RegisterLayout() = default;
  RegisterLayout(std::initializer_list<Register> regs) : registers(regs) { validate(); }
  explicit RegisterLayout(std::vector<Register> regs) : registers(std::move(regs)) { validate(); }

  void validate() const;
  Index total_dim() const;
  int position_of(RegisterId id) const;  // -1 if absent
  bool contains(RegisterId id) const { return position_of(id) >= 0; }
};

class DensityMatrix;

// Unit vector on a single (possibly composite) space.  The constructor
// renormalizes inputs whose norm is within kRepairTol of 1 and rejects
// anything farther off.
class PureState {
 public:
  explicit PureState(Vector amplitudes);
  static PureState basis(Index dim, Index k);
  static PureState trusted(Vector amplitudes);  // caller guarantees unit norm

  Index dim() const { return amps_.size(); }
  const Vector& amplitudes() const { return amps_; }
  DensityMatrix to_density() const;

 private:
  struct trusted_tag {};
  PureState(Vector amplitudes, trusted_tag) : amps_(std::move(amplitudes)) {}
  Vector amps_;
};

// Hermitian, unit-trace, positive-semidefinite matrix.  The constructor
// renormalizes the trace within kRepairTol and rejects matrices that are
// non-Hermitian beyond kValidityTol or have eigenvalues below -kValidityTol.
class DensityMatrix {
 public:
  explicit DensityMatrix(Matrix m);
  static DensityMatrix trusted(Matrix m);  // caller guarantees the invariants

  Index dim() const { return mat_.rows(); }
  const Matrix& matrix() const { return mat_; }

 private:
  struct trusted_tag {};
  DensityMatrix(Matrix m, trusted_tag) : mat_(std::move(m)) {}
  Matrix mat_;
};

// Two-outcome POVM {accept, reject}: both PSD, summing to the identity.
struct BinaryPOVM {
  Matrix accept;
  Matrix reject;

  BinaryPOVM(Matrix acc, Matrix rej);
  static BinaryPOVM from_accept(Matrix acc);          // reject = I - accept
  static BinaryPOVM projective(const PureState& v);   // accept = |v⟩⟨v|
  Index dim() const { return accept.rows(); }
};

// Kronecker products; throw cap_exceeded_error beyond dim_cap.
PureState tensor(const PureState& a, const PureState& b, Index dim_cap = kDefaultDimCap);
DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b,
                     Index dim_cap = kDefaultDimCap);
Matrix kron(const Matrix& a, const Matrix& b);

// Trace out every register not in `keep`; the result lives on the kept
// registers in their original layout order.  Defined for arbitrary (not
// necessarily Hermitian) matrices of the layout's total dimension.
Matrix partial_trace(const Matrix& m, const RegisterLayout& layout,
                     const std::vector<RegisterId>& keep);
DensityMatrix partial_trace(const DensityMatrix& rho, const RegisterLayout& layout,
                            const std::vector<RegisterId>& keep);

// Sum of singular values; for Hermitian input this is the sum of |eigenvalues|.
double trace_norm(const Matrix& m);

// (1/2)·||rho - sigma||_tr, in [0, 1].
double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma);

// ||tr_{traced_out}(|phi⟩⟨psi|)||_tr for a bipartite layout.  Equals the
// fidelity of the two reduced states obtained by tracing out the complement
// of `traced_out`; in particular it is 1 when psi == phi and 0 when the
// reductions on `traced_out` are orthogonal.
double fidelity_via_purification(const PureState& psi, const PureState& phi,
                                 const RegisterLayout& layout, RegisterId traced_out);

// Projectors onto the symmetric / antisymmetric subspace of H_d ⊗ H_d,
// with ranks d(d+1)/2 and d(d-1)/2.
Matrix symmetric_projector(Index local_dim, Index dim_cap = kDefaultDimCap);
Matrix antisymmetric_projector(Index local_dim, Index dim_cap = kDefaultDimCap);

// tr(accept · rho), clamped to [0, 1].
double measure_binary(const DensityMatrix& rho, const BinaryPOVM& povm);
double measure_accept(const Matrix& accept, const DensityMatrix& rho);
double measure_accept(const Matrix& accept, const PureState& psi);

// SWAP-test acceptance tr(Π_sym ρ) on a two-register state with equal local
// dimensions.  Evaluated through tr(S·ρ) without materializing the projector.
double swap_test_accept_probability(const DensityMatrix& pair_state,
                                    const RegisterLayout& pair_layout);
// Product-input shortcuts: 1/2 + tr(ρσ)/2, resp. 1/2 + |⟨ψ|φ⟩|²/2.
double swap_test_accept_product(const DensityMatrix& rho, const DensityMatrix& sigma);
double swap_test_accept_product(const PureState& psi, const PureState& phi);

double purity_overlap(const DensityMatrix& rho, const DensityMatrix& sigma);  // Re tr(ρσ)

}  // namespace dqma
