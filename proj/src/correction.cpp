#include "tqd/correction.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace tqd {

namespace {

std::vector<int> cluster_partition(const SpectralFrame& frame) {
    std::vector<int> sizes;
    for (auto [start, size] : frame.cluster_column_ranges()) sizes.push_back(size);
    return sizes;
}

double default_stencil(double span) { return 5e-6 * span; }

} // namespace

SuperMatrix cdot_c(const FramePath& path, int k, double h) {
    if (path.frames.size() != path.times.size() || path.frames.empty())
        fail(ErrorCode::ConfigInvalid, "cdot_c: path carries no frames");
    if (k < 0 || k >= static_cast<int>(path.frames.size()))
        fail(ErrorCode::OutOfRange, "cdot_c: index outside the path grid");
    const SpectralFrame& ref = path.frames[static_cast<size_t>(k)];
    const double t = path.times[static_cast<size_t>(k)];
    if (h <= 0.0) h = default_stencil(path.protocol.span());
    if (t - h < path.protocol.t_start || t + h > path.protocol.t_end)
        fail(ErrorCode::StencilOutOfRange,
             "cdot_c: stencil of half-width " + std::to_string(h) +
                 " leaves the protocol span at t = " + std::to_string(t));
    auto aligned_frame = [&](double s) {
        SuperMatrix l = supermatrix(path.protocol.generator(s), path.basis);
        SpectralFrame f = spectral_frame(l, path.cluster_tol);
        f.t = s;
        return align_frame_to(ref, std::move(f), AlignmentMode::pin_gauge);
    };
    const SpectralFrame plus = aligned_frame(t + h);
    const SpectralFrame minus = aligned_frame(t - h);
    return ((plus.left - minus.left) / (2.0 * h)) * ref.right;
}

std::pair<SuperMatrix, SuperMatrix> split_diag_offdiag(const SuperMatrix& m,
                                                       const std::vector<int>& partition) {
    require_square(m, "split_diag_offdiag");
    int total = 0;
    for (int s : partition) {
        if (s <= 0)
            fail(ErrorCode::ConfigInvalid, "split_diag_offdiag: nonpositive block size");
        total += s;
    }
    if (total != m.rows())
        fail(ErrorCode::DimensionMismatch,
             "split_diag_offdiag: block sizes sum to " + std::to_string(total) +
                 ", matrix dimension is " + std::to_string(m.rows()));
    SuperMatrix diag = SuperMatrix::Zero(m.rows(), m.cols());
    int start = 0;
    for (int s : partition) {
        diag.block(start, start, s, s) = m.block(start, start, s, s);
        start += s;
    }
    return {diag, m - diag};
}

CorrectionTerm general_l_tqd(const FramePath& path, int k, double h, bool detect_hamiltonian) {
    const SpectralFrame& ref = path.frames.at(static_cast<size_t>(k));
    const SuperMatrix m = cdot_c(path, k, h);
    const std::vector<int> partition = cluster_partition(ref);
    const SuperMatrix off = split_diag_offdiag(m, partition).second;

    CorrectionTerm term;
    term.kind = CorrectionKind::general;
    term.supermatrix = -ref.right * off * ref.left;

    // Defining property: in the instantaneous frame the corrected generator
    // plus the frame-motion term has no inter-cluster coupling left.
    const SuperMatrix l = supermatrix(path.protocol.generator(path.times[static_cast<size_t>(k)]),
                                      path.basis);
    const SuperMatrix transformed = ref.left * (l + term.supermatrix) * ref.right + m;
    const SuperMatrix residual = split_diag_offdiag(transformed, partition).second;
    if (residual.norm() > 1e-7 * std::max(1.0, l.norm()))
        fail(ErrorCode::NumericalFailure,
             "general_l_tqd: inter-cluster cancellation residual " +
                 std::to_string(residual.norm()));

    if (detect_hamiltonian && path.basis.kind == BasisKind::pauli) {
        try {
            CPReport report = cp_diagnostic(term.supermatrix, path.basis, 1e-9);
            const SuperMatrix rebuilt =
                hamiltonian_superop(report.hamiltonian_component, path.basis);
            if (report.kossakowski_matrix.norm() <=
                    1e-7 * std::max(1.0, term.supermatrix.norm()) &&
                (rebuilt - term.supermatrix).norm() <= 1e-8)
                term.hamiltonian_part = report.hamiltonian_component;
        } catch (const Error&) {
            // Not of commutator form; leave hamiltonian_part unset.
        }
    }
    return term;
}

Complex offdiag_element(const SpectralFrame& frame, const SuperMatrix& ldot, int i, int j,
                        double gap_tol) {
    for (int s : frame.block_sizes)
        if (s != 1)
            fail(ErrorCode::UnsupportedDefective,
                 "offdiag_element: defined only for diagonalizable frames");
    const int n = frame.dim2();
    if (i < 0 || j < 0 || i >= n || j >= n)
        fail(ErrorCode::OutOfRange, "offdiag_element: index out of range");
    if (i == j)
        fail(ErrorCode::OutOfRange, "offdiag_element: indices must differ");
    if (ldot.rows() != n || ldot.cols() != n)
        fail(ErrorCode::DimensionMismatch, "offdiag_element: Ldot dimension mismatch");
    if (gap_tol <= 0.0)
        gap_tol = 1e-6 * std::max(1.0, frame.eigenvalues.cwiseAbs().maxCoeff());
    const Complex li = frame.eigenvalues(i);
    const Complex lj = frame.eigenvalues(j);
    if (std::abs(li - lj) < gap_tol)
        fail(ErrorCode::NearDegenerate,
             "offdiag_element: eigenvalue gap " + std::to_string(std::abs(li - lj)) +
                 " below tolerance " + std::to_string(gap_tol));
    const Complex num = (frame.left.row(i) * ldot * frame.right.col(j)).value();
    return num / (li - lj);
}

SuperMatrix offdiag_formula_matrix(const SpectralFrame& frame, const SuperMatrix& ldot,
                                   double gap_tol) {
    const int n = frame.dim2();
    SuperMatrix out = SuperMatrix::Zero(n, n);
    if (gap_tol <= 0.0)
        gap_tol = 1e-6 * std::max(1.0, frame.eigenvalues.cwiseAbs().maxCoeff());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            if (std::abs(frame.eigenvalues(i) - frame.eigenvalues(j)) < gap_tol) continue;
            out(i, j) = offdiag_element(frame, ldot, i, j, gap_tol);
        }
    return out;
}

CorrectionTerm unitary_frame_correction(const std::function<Operator(double)>& u_of_t,
                                        double t, double h, const HermitianBasis& basis,
                                        double* asymmetry) {
    if (!u_of_t)
        fail(ErrorCode::ConfigInvalid, "unitary_frame_correction: empty operator path");
    if (h <= 0.0) h = 1e-6 * std::max(1.0, std::abs(t));
    const Operator u0 = u_of_t(t);
    const Operator up = u_of_t(t + h);
    const Operator um = u_of_t(t - h);
    for (const Operator* u : {&u0, &up, &um}) {
        require_square(*u, "unitary_frame_correction");
        if (u->rows() != basis.dim)
            fail(ErrorCode::DimensionMismatch,
                 "unitary_frame_correction: operator/basis dimension mismatch");
        if (!is_unitary(*u, 1e-10))
            fail(ErrorCode::NonUnitaryFrame,
                 "unitary_frame_correction: frame is not unitary on the stencil");
    }
    const Operator udot = (up - um) / (2.0 * h);
    const Operator a = Complex(0.0, 1.0) * udot * u0.adjoint();
    if (asymmetry) *asymmetry = (a - a.adjoint()).norm();
    const Operator ham = 0.5 * (a + a.adjoint());
    CorrectionTerm term;
    term.kind = CorrectionKind::unitary_frame;
    term.hamiltonian_part = ham;
    term.supermatrix = hamiltonian_superop(ham, basis);
    return term;
}

CorrectionTerm closed_system_htqd(const std::function<Operator(double)>& h_of_t, double t,
                                  double h, const HermitianBasis& basis) {
    if (!h_of_t)
        fail(ErrorCode::ConfigInvalid, "closed_system_htqd: empty operator path");
    if (h <= 0.0) h = 1e-6 * std::max(1.0, std::abs(t));
    const Operator h0 = h_of_t(t);
    const Operator hp = h_of_t(t + h);
    const Operator hm = h_of_t(t - h);
    for (const Operator* x : {&h0, &hp, &hm}) {
        require_square(*x, "closed_system_htqd");
        if (x->rows() != basis.dim)
            fail(ErrorCode::DimensionMismatch,
                 "closed_system_htqd: operator/basis dimension mismatch");
        if (!is_hermitian(*x, 1e-10))
            fail(ErrorCode::InvalidOperator, "closed_system_htqd: H(t) is not Hermitian");
    }
    Operator hdot = (hp - hm) / (2.0 * h);
    hdot = 0.5 * (hdot + hdot.adjoint()).eval();

    Eigen::SelfAdjointEigenSolver<Operator> es(h0);
    if (es.info() != Eigen::Success)
        fail(ErrorCode::NumericalFailure, "closed_system_htqd: eigensolver failed");
    const Eigen::VectorXd e = es.eigenvalues();
    const Operator v = es.eigenvectors();
    const double gap_tol = 1e-6 * std::max(1.0, h0.norm());
    const int d = static_cast<int>(e.size());
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j)
            if (std::abs(e(j) - e(i)) < gap_tol)
                fail(ErrorCode::NearDegenerate,
                     "closed_system_htqd: spectral gap below tolerance");

    Operator out = Operator::Zero(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            if (i == j) continue;
            const Complex amp = (v.col(i).adjoint() * hdot * v.col(j)).value();
            out += Complex(0.0, 1.0) * amp / (e(j) - e(i)) * (v.col(i) * v.col(j).adjoint());
        }
    out = 0.5 * (out + out.adjoint()).eval();

    CorrectionTerm term;
    term.kind = CorrectionKind::closed_system;
    term.hamiltonian_part = out;
    term.supermatrix = hamiltonian_superop(out, basis);
    return term;
}

namespace {

// Column-stacked natural representation of the supermatrix: maps vec(rho)
// with vec(A rho B) = (B^T (x) A) vec(rho).
Eigen::MatrixXcd natural_representation(const SuperMatrix& g, const HermitianBasis& basis) {
    const int n = basis.size();
    Eigen::MatrixXcd vmat(n, n);
    for (int k = 0; k < n; ++k)
        vmat.col(k) = Eigen::Map<const Eigen::VectorXcd>(basis.elements[static_cast<size_t>(k)].data(), n);
    return vmat * g * vmat.adjoint();
}

} // namespace

CPReport cp_diagnostic(const SuperMatrix& g, const HermitianBasis& basis, double tol) {
    require_square(g, "cp_diagnostic");
    if (basis.kind != BasisKind::pauli)
        fail(ErrorCode::ConfigInvalid,
             "cp_diagnostic: requires the Hermitian (pauli-string) basis");
    const int n = basis.size();
    const int d = basis.dim;
    if (g.rows() != n)
        fail(ErrorCode::DimensionMismatch, "cp_diagnostic: supermatrix/basis size mismatch");
    const double scale = std::max(1.0, g.norm());
    if (g.row(0).norm() > 1e-8 * scale)
        fail(ErrorCode::NotTracePreserving,
             "cp_diagnostic: generator does not preserve the trace");
    if (g.imag().norm() > 1e-8 * scale)
        fail(ErrorCode::NotHermitianPreserving,
             "cp_diagnostic: generator does not preserve Hermiticity");

    const Eigen::MatrixXcd gnat = natural_representation(g, basis);
    Eigen::MatrixXcd c(n, n);
    for (int m = 0; m < n; ++m)
        for (int q = 0; q < n; ++q) {
            const Eigen::MatrixXcd k =
                kron(basis.elements[static_cast<size_t>(q)].transpose(),
                     basis.elements[static_cast<size_t>(m)]);
            c(m, q) = k.conjugate().cwiseProduct(gnat).sum();
        }
    c = 0.5 * (c + c.adjoint()).eval();

    const double sqrt_d = std::sqrt(static_cast<double>(d));
    Operator b = (c(0, 0) / (2.0 * d)) * Operator::Identity(d, d);
    for (int m = 1; m < n; ++m)
        b += (c(m, 0) / sqrt_d) * basis.elements[static_cast<size_t>(m)];
    Operator ham = Complex(0.0, 0.5) * (b - b.adjoint());
    ham -= (ham.trace() / static_cast<double>(d)) * Operator::Identity(d, d);
    ham = 0.5 * (ham + ham.adjoint()).eval();

    CPReport report;
    report.hamiltonian_component = ham;
    report.kossakowski_matrix = c.bottomRightCorner(n - 1, n - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(report.kossakowski_matrix);
    report.min_kossakowski_eigenvalue = es.eigenvalues().minCoeff();
    report.cp_conditional = report.min_kossakowski_eigenvalue >= -tol;
    report.suggested_damping = std::max(0.0, -report.min_kossakowski_eigenvalue);

    SuperMatrix rebuilt = hamiltonian_superop(ham, basis);
    for (int k = 0; k < n; ++k) {
        const Operator& sk = basis.elements[static_cast<size_t>(k)];
        Operator img = Operator::Zero(d, d);
        for (int m = 1; m < n; ++m)
            for (int q = 1; q < n; ++q) {
                const Operator& sm = basis.elements[static_cast<size_t>(m)];
                const Operator& sq = basis.elements[static_cast<size_t>(q)];
                img += report.kossakowski_matrix(m - 1, q - 1) *
                       (sm * sk * sq - 0.5 * (sq * sm * sk + sk * sq * sm));
            }
        rebuilt.col(k) += vectorize(img, basis);
    }
    report.reconstruction_error = (rebuilt - g).norm();
    return report;
}

EquivalenceReport appendix_equivalence_check(const DrivingProtocol& protocol,
                                             const HermitianBasis& basis, double t,
                                             double h) {
    protocol.validate("appendix_equivalence_check");
    if (!protocol.frame)
        fail(ErrorCode::ConfigInvalid,
             "appendix_equivalence_check: protocol declares no unitary frame");
    protocol.require_time(t);

    const Operator w = protocol.frame(t);
    if (!is_unitary(w, 1e-10))
        fail(ErrorCode::NonUnitaryFrame, "appendix_equivalence_check: frame is not unitary");

    // (a) Frame-transported start-time quasi-eigenvectors still satisfy the
    // chain relations of the instantaneous generator with the same
    // eigenvalues.
    const SuperMatrix l0 = supermatrix(protocol.generator(protocol.t_start), basis);
    const SpectralFrame f0 = spectral_frame(l0);
    const SuperMatrix lt = supermatrix(protocol.generator(t), basis);
    const int n = f0.dim2();
    Eigen::MatrixXcd transported(n, n);
    for (int j = 0; j < n; ++j) {
        const Operator x = devectorize(f0.right.col(j), basis);
        transported.col(j) = vectorize(w * x * w.adjoint(), basis);
    }
    EquivalenceReport report;
    int start = 0;
    for (int b = 0; b < f0.block_count(); ++b) {
        for (int k = 0; k < f0.block_sizes[static_cast<size_t>(b)]; ++k) {
            Eigen::VectorXcd r = lt * transported.col(start + k) -
                                 f0.eigenvalues(b) * transported.col(start + k);
            if (k > 0) r -= transported.col(start + k - 1);
            report.transported_eigvec_residual =
                std::max(report.transported_eigvec_residual,
                         r.norm() / std::max(1.0, transported.col(start + k).norm()));
        }
        start += f0.block_sizes[static_cast<size_t>(b)];
    }

    // (b) Inter-cluster content of the frame-motion commutator superoperator
    // matches -offdiag(Cdot^{-1}C) in the shared instantaneous frame.
    const double delta = 1e-4 * protocol.span();
    if (t - delta < protocol.t_start || t + delta > protocol.t_end)
        fail(ErrorCode::OutOfRange,
             "appendix_equivalence_check: t too close to the span boundary");
    const FramePath path =
        track_frames(protocol, basis, {t - delta, t, t + delta});
    const SuperMatrix m = cdot_c(path, 1, h);

    Operator hw;
    if (protocol.frame_derivative) {
        hw = Complex(0.0, 1.0) * protocol.frame_derivative(t) * w.adjoint();
        hw = 0.5 * (hw + hw.adjoint()).eval();
    } else {
        CorrectionTerm uf = unitary_frame_correction(protocol.frame, t, h, basis);
        hw = *uf.hamiltonian_part;
    }
    const SuperMatrix kw = hamiltonian_superop(hw, basis);
    const SpectralFrame& ref = path.frames[1];
    const std::vector<int> partition = cluster_partition(ref);
    const SuperMatrix conj = ref.left * kw * ref.right;
    const SuperMatrix mismatch =
        split_diag_offdiag(conj, partition).second + split_diag_offdiag(m, partition).second;
    report.offdiag_match_residual = mismatch.norm();
    return report;
}

} // namespace tqd
