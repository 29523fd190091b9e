#pragma once

#include <optional>

#include "tqd/spectral.hpp"

namespace tqd {

enum class CorrectionKind { general, offdiag_formula, unitary_frame, closed_system };

// Superadiabatic correction generator to add to L(t). hamiltonian_part is
// populated only when the supermatrix is (detected to be) the commutator
// superoperator -i[H, .] of a Hermitian H.
struct CorrectionTerm {
    SuperMatrix supermatrix;
    std::optional<Operator> hamiltonian_part;
    CorrectionKind kind = CorrectionKind::general;
};

// Decomposition of a trace- and Hermiticity-preserving generator into a
// Hamiltonian part and a Kossakowski dissipator over the traceless basis
// elements. cp_conditional means min eig(K) >= -tol; suggested_damping is
// the minimal uniform shift restoring K >= 0.
struct CPReport {
    Operator hamiltonian_component; // traceless Hermitian
    Eigen::MatrixXcd kossakowski_matrix;
    double min_kossakowski_eigenvalue = 0.0;
    bool cp_conditional = true;
    double suggested_damping = 0.0;
    double reconstruction_error = 0.0;
};

struct EquivalenceReport {
    double transported_eigvec_residual = 0.0; // max chain-relation residual
    double offdiag_match_residual = 0.0;      // ||offdiag mismatch||_F
};

// d(C^{-1})/dt * C at grid point k by a central stencil of half-width h
// (h <= 0 selects 5e-6 * span). The stencil frames are decomposed fresh and
// aligned to the path frame at k with pinned gauge, so inter-cluster
// entries are gauge-clean and within-cluster entries are parallel
// transported (~0). k must be interior to the protocol span by h.
SuperMatrix cdot_c(const FramePath& path, int k, double h = 0.0);

// Exact structural split of M into its block-diagonal part w.r.t. the
// contiguous partition and the complementary inter-block part.
std::pair<SuperMatrix, SuperMatrix> split_diag_offdiag(const SuperMatrix& m,
                                                       const std::vector<int>& partition);

// L_tqd(t_k) = -C * offdiag(Cdot^{-1}C) * C^{-1}, with offdiag taken
// w.r.t. the eigenvalue-cluster partition. Checks the defining cancellation
// property before returning. detect_hamiltonian = false skips the
// commutator-form detection (hamiltonian_part stays unset).
CorrectionTerm general_l_tqd(const FramePath& path, int k, double h = 0.0,
                             bool detect_hamiltonian = true);

// Nonadiabatic coupling element [Cdot^{-1}C]_{ij} = <<dual_i|Ldot|vec_j>> /
// (lambda_i - lambda_j) for 1x1 blocks i != j. Throws near-degenerate when
// the gap is below gap_tol (default 1e-6 * max(1, max |lambda|)) and
// unsupported-defective when any block is nontrivial.
Complex offdiag_element(const SpectralFrame& frame, const SuperMatrix& ldot, int i, int j,
                        double gap_tol = 0.0);

// Assembles every gap-allowed i != j element; entries inside a degenerate
// cluster are left zero.
SuperMatrix offdiag_formula_matrix(const SpectralFrame& frame, const SuperMatrix& ldot,
                                   double gap_tol = 0.0);

// H = i Wdot W^dag of a unitary path, symmetrized; supermatrix is its
// commutator superoperator. asymmetry (if given) receives ||A - A^dag||_F
// before symmetrization. h <= 0 selects 1e-6 * max(1, |t|).
CorrectionTerm unitary_frame_correction(const std::function<Operator(double)>& u_of_t,
                                        double t, double h, const HermitianBasis& basis,
                                        double* asymmetry = nullptr);

// Counterdiabatic Hamiltonian of a Hermitian path with non-degenerate
// spectrum: H_tqd = i sum_{i != j} P_i Hdot P_j / (E_j - E_i).
CorrectionTerm closed_system_htqd(const std::function<Operator(double)>& h_of_t, double t,
                                  double h, const HermitianBasis& basis);

// Hamiltonian + Kossakowski decomposition; requires the pauli-kind basis
// (Hermitian elements with identity leading). tol gates cp_conditional.
CPReport cp_diagnostic(const SuperMatrix& g, const HermitianBasis& basis, double tol = 1e-9);

// Verifies the unitary-frame reduction at time t: (a) frame-transported
// t_start quasi-eigenvectors satisfy the instantaneous chain relations with
// unchanged eigenvalues; (b) the inter-cluster content of the commutator
// superoperator of i Wdot W^dag, expressed in the instantaneous frame,
// matches -offdiag(Cdot^{-1}C). Requires the protocol to declare a frame.
EquivalenceReport appendix_equivalence_check(const DrivingProtocol& protocol,
                                             const HermitianBasis& basis, double t,
                                             double h = 0.0);

} // namespace tqd
