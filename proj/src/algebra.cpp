#include "tqd/algebra.hpp"

#include <cmath>

#include <unsupported/Eigen/KroneckerProduct>

namespace tqd {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::ConfigInvalid: return "config-invalid";
        case ErrorCode::DimensionMismatch: return "dimension-mismatch";
        case ErrorCode::UnsupportedDimension: return "unsupported-dimension";
        case ErrorCode::InvalidOperator: return "invalid-operator";
        case ErrorCode::InvalidState: return "invalid-state";
        case ErrorCode::NegativeRate: return "negative-rate";
        case ErrorCode::OutOfRange: return "out-of-range";
        case ErrorCode::StencilOutOfRange: return "stencil-out-of-range";
        case ErrorCode::FrameSingular: return "frame-singular";
        case ErrorCode::DefectiveBeyondTolerance: return "defective-beyond-tolerance";
        case ErrorCode::TrackingLost: return "tracking-lost";
        case ErrorCode::DegeneracyCrossing: return "degeneracy-crossing";
        case ErrorCode::NearDegenerate: return "near-degenerate";
        case ErrorCode::UnsupportedDefective: return "unsupported-defective";
        case ErrorCode::NonUniqueSteadyState: return "non-unique-steady-state";
        case ErrorCode::NotAGenerator: return "not-a-generator";
        case ErrorCode::NotHermitianPreserving: return "not-hermitian-preserving";
        case ErrorCode::NotTracePreserving: return "not-trace-preserving";
        case ErrorCode::NonUnitaryFrame: return "non-unitary-frame";
        case ErrorCode::NumericalFailure: return "numerical-failure";
    }
    return "unknown";
}

Operator pauli_x() {
    Operator m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

Operator pauli_y() {
    Operator m(2, 2);
    m << 0, Complex(0, -1), Complex(0, 1), 0;
    return m;
}

Operator pauli_z() {
    Operator m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

Operator pauli_id() { return Operator::Identity(2, 2); }

Operator pauli_vector(double ax, double ay, double az) {
    return ax * pauli_x() + ay * pauli_y() + az * pauli_z();
}

bool is_finite(const Operator& a) { return a.allFinite(); }

double hermiticity_defect(const Operator& a) {
    return (a - a.adjoint()).norm();
}

bool is_hermitian(const Operator& a, double tol) {
    return a.rows() == a.cols() && hermiticity_defect(a) <= tol;
}

bool is_unitary(const Operator& a, double tol) {
    if (a.rows() != a.cols()) return false;
    Operator r = a.adjoint() * a - Operator::Identity(a.rows(), a.cols());
    return r.norm() <= tol;
}

void require_square(const Operator& a, const char* what) {
    if (a.rows() != a.cols() || a.rows() == 0)
        fail(ErrorCode::DimensionMismatch,
             std::string(what) + ": operator must be square and non-empty");
    if (!is_finite(a))
        fail(ErrorCode::InvalidOperator,
             std::string(what) + ": operator has non-finite entries");
}

void require_same_dim(const Operator& a, const Operator& b, const char* what) {
    require_square(a, what);
    require_square(b, what);
    if (a.rows() != b.rows())
        fail(ErrorCode::DimensionMismatch,
             std::string(what) + ": operand dimensions differ");
}

namespace {

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

int log2_int(int n) {
    int k = 0;
    while ((1 << k) < n) ++k;
    return k;
}

Operator one_qubit_pauli(int s) {
    switch (s) {
        case 0: return pauli_id();
        case 1: return pauli_x();
        case 2: return pauli_y();
        default: return pauli_z();
    }
}

} // namespace

HermitianBasis build_basis(int dim, BasisKind kind) {
    if (dim < 2 || dim > kMaxDim)
        fail(ErrorCode::UnsupportedDimension,
             "build_basis: dim must be in [2, " + std::to_string(kMaxDim) + "]");
    HermitianBasis basis;
    basis.dim = dim;
    basis.kind = kind;
    basis.elements.reserve(static_cast<size_t>(dim) * dim);
    if (kind == BasisKind::pauli) {
        if (!power_of_two(dim))
            fail(ErrorCode::UnsupportedDimension,
                 "build_basis: pauli basis needs a power-of-two dim, got " +
                     std::to_string(dim));
        const int sites = log2_int(dim);
        const double norm = 1.0 / std::sqrt(static_cast<double>(dim));
        const int count = dim * dim; // 4^sites
        for (int idx = 0; idx < count; ++idx) {
            // Base-4 digits of idx, most significant digit = leftmost site;
            // digit order 0..3 = I,X,Y,Z gives lexicographic string order.
            Operator m = Operator::Identity(1, 1);
            for (int site = 0; site < sites; ++site) {
                int digit = (idx >> (2 * (sites - 1 - site))) & 3;
                m = kron(m, one_qubit_pauli(digit)).eval();
            }
            basis.elements.push_back(norm * m);
        }
    } else {
        for (int a = 0; a < dim; ++a)
            for (int b = 0; b < dim; ++b) {
                Operator m = Operator::Zero(dim, dim);
                m(a, b) = 1.0;
                basis.elements.push_back(m);
            }
    }
    return basis;
}

CoherenceVector vectorize(const Operator& rho, const HermitianBasis& basis) {
    require_square(rho, "vectorize");
    if (rho.rows() != basis.dim)
        fail(ErrorCode::DimensionMismatch, "vectorize: operator dim " +
                                               std::to_string(rho.rows()) +
                                               " does not match basis dim " +
                                               std::to_string(basis.dim));
    CoherenceVector v(basis.size());
    for (int j = 0; j < basis.size(); ++j)
        v(j) = (basis.elements[j].adjoint() * rho).trace();
    return v;
}

Operator devectorize(const CoherenceVector& v, const HermitianBasis& basis) {
    if (v.size() != basis.size())
        fail(ErrorCode::DimensionMismatch,
             "devectorize: vector length " + std::to_string(v.size()) +
                 " does not match basis size " + std::to_string(basis.size()));
    if (!v.allFinite())
        fail(ErrorCode::InvalidState, "devectorize: non-finite components");
    Operator rho = Operator::Zero(basis.dim, basis.dim);
    for (int j = 0; j < basis.size(); ++j) rho += v(j) * basis.elements[j];
    return rho;
}

Operator kron(const Operator& a, const Operator& b) {
    if (a.size() == 0 || b.size() == 0)
        fail(ErrorCode::DimensionMismatch, "kron: empty operand");
    return Eigen::kroneckerProduct(a, b).eval();
}

Operator commutator(const Operator& a, const Operator& b) {
    require_same_dim(a, b, "commutator");
    return a * b - b * a;
}

Operator anticommutator(const Operator& a, const Operator& b) {
    require_same_dim(a, b, "anticommutator");
    return a * b + b * a;
}

} // namespace tqd
