#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "tqd/correction.hpp"
#include "tqd/dynamics.hpp"
#include "tqd/scenarios.hpp"

using namespace tqd;

namespace {

Operator random_matrix(std::mt19937& rng, int n) {
    std::normal_distribution<double> dist(0.0, 1.0);
    Operator m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = Complex(dist(rng), dist(rng));
    return m;
}

GeneratorSpec random_qubit_generator(std::mt19937& rng, int jumps = 2) {
    GeneratorSpec gen;
    const Operator a = random_matrix(rng, 2);
    gen.hamiltonian = 0.5 * (a + a.adjoint());
    std::normal_distribution<double> dist(0.0, 1.0);
    for (int j = 0; j < jumps; ++j)
        gen.jumps.push_back({random_matrix(rng, 2), std::abs(dist(rng)) + 0.05});
    return gen;
}

FramePath local_path(const DrivingProtocol& proto, const HermitianBasis& basis, double t) {
    return track_frames(proto, basis, {t});
}

} // namespace

TEST_CASE("split_diag_offdiag is an exact structural split") {
    std::mt19937 rng(41);
    const SuperMatrix m = random_matrix(rng, 6);
    const auto [diag, off] = split_diag_offdiag(m, {2, 3, 1});
    CHECK((diag + off - m).norm() < 1e-15);
    CHECK(diag.block(0, 2, 2, 4).norm() == 0.0);
    CHECK(off.block(0, 0, 2, 2).norm() == 0.0);
    CHECK(off.block(2, 2, 3, 3).norm() == 0.0);
    CHECK_THROWS_AS((void)split_diag_offdiag(m, {2, 3}), Error);
    CHECK_THROWS_AS((void)split_diag_offdiag(m, {2, 3, -1}), Error);
}

TEST_CASE("time-independent generator has zero correction") {
    std::mt19937 rng(42);
    const GeneratorSpec gen = random_qubit_generator(rng);
    DrivingProtocol proto;
    proto.t_start = 0.0;
    proto.t_end = 1.0;
    proto.dim = 2;
    proto.generator = [gen](double) { return gen; };
    const HermitianBasis basis = build_basis(2, BasisKind::pauli);
    const CorrectionTerm term = general_l_tqd(local_path(proto, basis, 0.5), 0);
    CHECK(term.supermatrix.norm() < 1e-7);
}

TEST_CASE("rotating correction equals the closed-form Hamiltonian generator") {
    const RotatingDissipationParams p{M_PI / 3, 2.0, 1.0};
    const DrivingProtocol proto = rotating_dissipation(p);
    const HermitianBasis basis = build_basis(2, BasisKind::pauli);
    for (double frac : {0.12, 0.37, 0.5, 0.81}) {
        const double t = proto.t_start + frac * proto.span();
        const CorrectionTerm term = general_l_tqd(local_path(proto, basis, t), 0);
        const SuperMatrix oracle =
            hamiltonian_superop(analytic_htqd_rotating(p, t), basis);
        CHECK((term.supermatrix - oracle).norm() < 1e-6);
        REQUIRE(term.hamiltonian_part.has_value());
        // Detected Hamiltonian matches the closed form up to a multiple of
        // the identity (commutator superoperators ignore trace shifts).
        Operator diff = *term.hamiltonian_part - analytic_htqd_rotating(p, t);
        diff -= (diff.trace() / 2.0) * Operator::Identity(2, 2);
        CHECK(diff.norm() < 1e-6);
    }
}

TEST_CASE("correction is independent of the reference frame gauge") {
    const RotatingDissipationParams p;
    const DrivingProtocol proto = rotating_dissipation(p);
    const HermitianBasis basis = build_basis(2, BasisKind::pauli);
    const double t = 0.4;
    // Route 1: frame decomposed directly at t.
    const CorrectionTerm direct = general_l_tqd(local_path(proto, basis, t), 0);
    // Route 2: frame at t reached by tracking from an earlier time, which
    // leaves a different per-column gauge.
    std::vector<double> grid;
    for (int i = 0; i <= 40; ++i) grid.push_back(0.1 + (t - 0.1) * i / 40.0);
    const FramePath tracked = track_frames(proto, basis, grid);
    const CorrectionTerm via_path = general_l_tqd(tracked, 40);
    CHECK((direct.supermatrix - via_path.supermatrix).norm() < 1e-6);
}

TEST_CASE("cdot_c stencil width does not matter over two decades") {
    const RotatingDissipationParams p;
    const DrivingProtocol proto = rotating_dissipation(p);
    const HermitianBasis basis = build_basis(2, BasisKind::pauli);
    const FramePath path = local_path(proto, basis, 0.3);
    const SuperMatrix a = cdot_c(path, 0, 1e-5);
    const SuperMatrix b = cdot_c(path, 0, 1e-7);
    CHECK((a - b).norm() < 1e-5 * std::max(1.0, a.norm()));
}

TEST_CASE("cdot_c rejects out-of-span stencils and bad indices") {
    const RotatingDissipationParams p;
    const DrivingProtocol proto = rotating_dissipation(p);
    const HermitianBasis basis = build_basis(2, BasisKind::pauli);
    const FramePath path = local_path(proto, basis, proto.t_start);
    CHECK_THROWS_AS((void)cdot_c(path, 0, 1e-4), Error);  // stencil leaves span
    CHECK_THROWS_AS((void)cdot_c(path, 3, 1e-4), Error);  // index outside grid
}

TEST_CASE("offdiag_element matches the finite-difference matrix entrywise") {
    const RotatingDissipationParams p;
    const DrivingProtocol proto = rotating_dissipation(p);
    const HermitianBasis basis = build_basis(2, BasisKind::pauli);
    const double t = 0.7;
    const FramePath path = local_path(proto, basis, t);
    const SpectralFrame& f = path.frames[0];
    const SuperMatrix m = cdot_c(path, 0);
    const SuperMatrix ldot =
        supermatrix_derivative(proto, t, basis, 0.0, DerivativeMode::analytic);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            if (i == j) continue;
            if (f.cluster_of_column(i) == f.cluster_of_column(j)) continue;
            const Complex e = offdiag_element(f, ldot, i, j);
            CHECK(std::abs(e - m(i, j)) < 1e-5 * std::max(1.0, std::abs(e)));
        }
    // Assembled matrix agrees wherever it is defined.
    const SuperMatrix assembled = offdiag_formula_matrix(f, ldot);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            if (i == j || f.cluster_of_column(i) == f.cluster_of_column(j)) continue;
            CHECK(std::abs(assembled(i, j) - m(i, j)) < 1e-5);
        }
}

TEST_CASE("offdiag_element error taxonomy") {
    const RotatingDissipationParams p;
    const DrivingProtocol proto = rotating_dissipation(p);
    const HermitianBasis basis = build_basis(2, BasisKind::pauli);
    const FramePath path = local_path(proto, basis, 0.7);
    const SpectralFrame& f = path.frames[0];
    const SuperMatrix ldot =
        supermatrix_derivative(proto, 0.7, basis, 0.0, DerivativeMode::analytic);
    CHECK_THROWS_AS((void)offdiag_element(f, ldot, 1, 1), Error);
    // The two equal decay rates sit in one cluster: gap below tolerance.
    int a = -1, b = -1;
    for (int i = 0; i < 4 && a < 0; ++i)
        for (int j = 0; j < 4; ++j)
            if (i != j && f.cluster_of_column(i) == f.cluster_of_column(j)) {
                a = i;
                b = j;
                break;
            }
    REQUIRE(a >= 0);
    CHECK_THROWS_AS((void)offdiag_element(f, ldot, a, b), Error);

    // Defective frames are refused.
    SuperMatrix nil(2, 2);
    nil << 0, 1, 0, 0;
    const SpectralFrame fd = spectral_frame(nil);
    CHECK_THROWS_AS((void)offdiag_element(fd, SuperMatrix::Identity(2, 2), 0, 1), Error);
}

TEST_CASE("offdiag_element is linear in the derivative argument") {
    const RotatingDissipationParams p;
    const DrivingProtocol proto = rotating_dissipation(p);
    const HermitianBasis basis = build_basis(2, BasisKind::pauli);
    const FramePath path = local_path(proto, basis, 0.7);
    const SpectralFrame& f = path.frames[0];
    std::mt19937 rng(43);
    const SuperMatrix m1 = random_matrix(rng, 4);
    const SuperMatrix m2 = random_matrix(rng, 4);
    const Complex e1 = offdiag_element(f, m1, 0, 1);
    const Complex e2 = offdiag_element(f, m2, 0, 1);
    const Complex e12 = offdiag_element(f, (2.0 * m1 + m2).eval(), 0, 1);
    CHECK(std::abs(e12 - (2.0 * e1 + e2)) < 1e-10 * std::max(1.0, std::abs(e12)));
}

TEST_CASE("unitary frame correction recovers the rotation generator") {
    const double omega = 1.7;
    const HermitianBasis basis = build_basis(2, BasisKind::pauli);
    auto u_of_t = [omega](double t) {
        Operator w = Operator::Zero(2, 2);
        w(0, 0) = std::exp(Complex(0, -omega * t / 2));
        w(1, 1) = std::exp(Complex(0, omega * t / 2));
        return w;
    };
    double asym = -1.0;
    const CorrectionTerm term = unitary_frame_correction(u_of_t, 0.9, 0.0, basis, &asym);
    REQUIRE(term.hamiltonian_part.has_value());
    CHECK((*term.hamiltonian_part - 0.5 * omega * pauli_z()).norm() < 1e-8);
    CHECK(asym >= 0.0);
    CHECK(asym < 1e-8);
    CHECK(term.kind == CorrectionKind::unitary_frame);

    auto not_unitary = [](double t) { return (1.0 + t) * pauli_x(); };
    CHECK_THROWS_AS((void)unitary_frame_correction(not_unitary, 0.5, 0.0, basis), Error);
}

TEST_CASE("closed-system counterdiabatic term for the precessing spin") {
    const ClosedSpinParams p;
    const DrivingProtocol proto = closed_spin(p);
    const HermitianBasis basis = build_basis(2, BasisKind::pauli);
    auto h_of_t = [&proto](double t) { return proto.generator(t).hamiltonian; };
    for (double t : {0.3, 1.1, 2.6}) {
        const CorrectionTerm term = closed_system_htqd(h_of_t, t, 0.0, basis);
        REQUIRE(term.hamiltonian_part.has_value());
        CHECK((*term.hamiltonian_part - analytic_htqd_closed(p, t)).norm() < 1e-8);
        CHECK(term.kind == CorrectionKind::closed_system);
    }
    // Degenerate Hamiltonian path is refused.
    auto degenerate = [](double) { return Operator::Zero(2, 2).eval(); };
    CHECK_THROWS_AS((void)closed_system_htqd(degenerate, 0.5, 0.0, basis), Error);
}

TEST_CASE("closed-system correction does not depend on the field strength") {
    ClosedSpinParams weak;
    weak.field = 0.3;
    ClosedSpinParams strong;
    strong.field = 30.0;
    const HermitianBasis basis = build_basis(2, BasisKind::pauli);
    const DrivingProtocol pw = closed_spin(weak);
    const DrivingProtocol ps = closed_spin(strong);
    auto hw = [&pw](double t) { return pw.generator(t).hamiltonian; };
    auto hs = [&ps](double t) { return ps.generator(t).hamiltonian; };
    const CorrectionTerm tw = closed_system_htqd(hw, 0.8, 0.0, basis);
    const CorrectionTerm ts = closed_system_htqd(hs, 0.8, 0.0, basis);
    CHECK((*tw.hamiltonian_part - *ts.hamiltonian_part).norm() < 1e-7);
}

TEST_CASE("cp diagnostic on amplitude damping") {
    const double gamma = 1.0;
    GeneratorSpec gen;
    gen.hamiltonian = Operator::Zero(2, 2);
    gen.jumps = {{spin_lower_along(0.0, 0.0), gamma}};
    const HermitianBasis basis = build_basis(2, BasisKind::pauli);
    const CPReport report = cp_diagnostic(supermatrix(gen, basis), basis);
    CHECK(report.cp_conditional);
    CHECK(report.reconstruction_error < 1e-10);
    CHECK(report.hamiltonian_component.norm() < 1e-10);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(report.kossakowski_matrix);
    std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + 3);
    std::sort(ev.begin(), ev.end());
    CHECK(std::abs(ev[0]) < 1e-9);
    CHECK(std::abs(ev[1]) < 1e-9);
    CHECK(std::abs(ev[2] - gamma) < 1e-9);
    CHECK(report.suggested_damping < 1e-9);
}

TEST_CASE("cp diagnostic on a pure commutator generator") {
    const HermitianBasis basis = build_basis(2, BasisKind::pauli);
    const Operator h = 0.3 * pauli_x() + 0.9 * pauli_z();
    const CPReport report = cp_diagnostic(hamiltonian_superop(h, basis), basis);
    CHECK(report.kossakowski_matrix.norm() < 1e-10);
    CHECK(report.min_kossakowski_eigenvalue > -1e-12);
    CHECK((report.hamiltonian_component - h).norm() < 1e-9);
    CHECK(report.cp_conditional);
}

TEST_CASE("cp diagnostic flags a negative channel and suggests damping") {
    const HermitianBasis basis = build_basis(2, BasisKind::pauli);
    GeneratorSpec plus;
    plus.hamiltonian = Operator::Zero(2, 2);
    plus.jumps = {{pauli_x(), 1.0}};
    GeneratorSpec minus;
    minus.hamiltonian = Operator::Zero(2, 2);
    minus.jumps = {{pauli_y(), 0.3}};
    // Supermatrix with one dissipator subtracted: not completely positive.
    const SuperMatrix g = supermatrix(plus, basis) - supermatrix(minus, basis);
    const CPReport report = cp_diagnostic(g, basis);
    CHECK_FALSE(report.cp_conditional);
    // The jump is an unnormalized pauli (HS norm sqrt(2)), so its weight in
    // the orthonormal-basis Kossakowski matrix is twice the rate.
    CHECK(report.min_kossakowski_eigenvalue == doctest::Approx(-0.6).epsilon(1e-8));
    CHECK(report.suggested_damping == doctest::Approx(0.6).epsilon(1e-8));
    CHECK(report.reconstruction_error < 1e-10);
}

TEST_CASE("cp diagnostic round-trips 50 random qubit generators") {
    std::mt19937 rng(44);
    const HermitianBasis basis = build_basis(2, BasisKind::pauli);
    for (int trial = 0; trial < 50; ++trial) {
        const GeneratorSpec gen = random_qubit_generator(rng, 1 + trial % 3);
        const SuperMatrix l = supermatrix(gen, basis);
        const CPReport report = cp_diagnostic(l, basis);
        CHECK(report.reconstruction_error < 1e-8);
        CHECK(report.min_kossakowski_eigenvalue > -1e-9);
        CHECK(report.cp_conditional);
    }
}

TEST_CASE("cp diagnostic input validation") {
    const HermitianBasis units = build_basis(2, BasisKind::units);
    const HermitianBasis pauli = build_basis(2, BasisKind::pauli);
    CHECK_THROWS_AS((void)cp_diagnostic(SuperMatrix::Zero(4, 4), units), Error);
    SuperMatrix bad_trace = SuperMatrix::Zero(4, 4);
    bad_trace(0, 1) = 1.0; // identity row sources trace growth
    CHECK_THROWS_AS((void)cp_diagnostic(bad_trace, pauli), Error);
    SuperMatrix complex_entry = SuperMatrix::Zero(4, 4);
    complex_entry(1, 2) = Complex(0.0, 0.5);
    CHECK_THROWS_AS((void)cp_diagnostic(complex_entry, pauli), Error);
}

TEST_CASE("bell correction carries only inter-cluster content of the frame generator") {
    const BellDraggingParams p;
    const DrivingProtocol proto = bell_dragging(p);
    const HermitianBasis basis = build_basis(4, BasisKind::pauli);
    for (double frac : {0.3, 0.6}) {
        const double t = proto.t_start + frac * proto.span();
        const CorrectionTerm term = general_l_tqd(local_path(proto, basis, t), 0);
        const SuperMatrix analytic =
            hamiltonian_superop(analytic_htqd_bell(bell_theta_dot(p, t)), basis);
        // The closed-form generator and the synthesized correction may
        // differ by cluster-diagonal content, which does not affect
        // transitionless tracking; their inter-cluster parts must agree.
        const FramePath lp = local_path(proto, basis, t);
        const SpectralFrame& f = lp.frames[0];
        std::vector<int> partition;
        for (auto [start, size] : f.cluster_column_ranges()) partition.push_back(size);
        const SuperMatrix da =
            split_diag_offdiag((f.left * analytic * f.right).eval(), partition).second;
        const SuperMatrix dg =
            split_diag_offdiag((f.left * term.supermatrix * f.right).eval(), partition)
                .second;
        CHECK((da - dg).norm() < 1e-6 * std::max(1.0, da.norm()));
    }
}

TEST_CASE("appendix equivalence holds for both open scenarios") {
    const HermitianBasis basis2 = build_basis(2, BasisKind::pauli);
    const HermitianBasis basis4 = build_basis(4, BasisKind::pauli);
    {
        const DrivingProtocol proto = rotating_dissipation(RotatingDissipationParams{});
        const EquivalenceReport rep =
            appendix_equivalence_check(proto, basis2, 0.4 * proto.span());
        CHECK(rep.transported_eigvec_residual < 1e-7);
        CHECK(rep.offdiag_match_residual < 1e-6);
    }
    {
        const DrivingProtocol proto = bell_dragging(BellDraggingParams{});
        const EquivalenceReport rep =
            appendix_equivalence_check(proto, basis4, 0.5 * proto.span());
        CHECK(rep.transported_eigvec_residual < 1e-7);
        CHECK(rep.offdiag_match_residual < 1e-6);
    }
    // A protocol without a declared frame cannot be checked.
    DrivingProtocol bare;
    bare.t_start = 0.0;
    bare.t_end = 1.0;
    bare.dim = 2;
    bare.generator = [](double) {
        GeneratorSpec gen;
        gen.hamiltonian = Operator::Zero(2, 2);
        gen.jumps = {{spin_lower_along(0.0, 0.0), 1.0}};
        return gen;
    };
    CHECK_THROWS_AS((void)appendix_equivalence_check(bare, basis2, 0.5), Error);
}
