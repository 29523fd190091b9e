#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "tqd/errors.hpp"

namespace tqd {

using Complex = std::complex<double>;
using Operator = Eigen::MatrixXcd;        // dense D x D complex matrix
using CoherenceVector = Eigen::VectorXcd; // length D^2 expansion coefficients
using SuperMatrix = Eigen::MatrixXcd;     // D^2 x D^2 action on coherence vectors

inline constexpr int kMaxDim = 8; // dense desk scale; larger dims are refused

enum class BasisKind { pauli, units };

// Orthonormal operator basis of a D-dimensional Hilbert space,
// Tr[sigma_i^dag sigma_j] = delta_ij.
//   pauli: normalized Pauli strings P/sqrt(D), lexicographic I<X<Y<Z per
//          site, identity direction first. Requires D a power of two.
//   units: matrix units |a><b| ordered (0,0),(0,1),...,(D-1,D-1).
struct HermitianBasis {
    int dim = 0;
    BasisKind kind = BasisKind::pauli;
    std::vector<Operator> elements;

    int size() const { return static_cast<int>(elements.size()); }
};

HermitianBasis build_basis(int dim, BasisKind kind);

// Expansion coefficients v_j = Tr[sigma_j^dag rho].
CoherenceVector vectorize(const Operator& rho, const HermitianBasis& basis);

// Inverse map rho = sum_j v_j sigma_j.
Operator devectorize(const CoherenceVector& v, const HermitianBasis& basis);

Operator kron(const Operator& a, const Operator& b);
Operator commutator(const Operator& a, const Operator& b);
Operator anticommutator(const Operator& a, const Operator& b);

// Single-qubit constants.
Operator pauli_x();
Operator pauli_y();
Operator pauli_z();
Operator pauli_id();

// a_x sigma_x + a_y sigma_y + a_z sigma_z.
Operator pauli_vector(double ax, double ay, double az);

// Predicates used by operation-boundary validation.
bool is_finite(const Operator& a);
double hermiticity_defect(const Operator& a);          // ||A - A^dag||_F
bool is_hermitian(const Operator& a, double tol = 1e-12);
bool is_unitary(const Operator& a, double tol = 1e-10);

void require_square(const Operator& a, const char* what);
void require_same_dim(const Operator& a, const Operator& b, const char* what);

} // namespace tqd
