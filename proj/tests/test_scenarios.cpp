#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tqd/dynamics.hpp"
#include "tqd/scenarios.hpp"
#include "tqd/spectral.hpp"

using namespace tqd;

namespace {
const Complex kI(0.0, 1.0);
}

TEST_CASE("damping axis geometry") {
    const double theta0 = 1.1, omega = 3.0;
    for (double t : {0.0, 0.4, 1.9}) {
        const Eigen::Vector3d n = rotating_axis(theta0, omega, t);
        const Eigen::Vector3d nd = rotating_axis_dot(theta0, omega, t);
        CHECK(n.norm() == doctest::Approx(1.0).epsilon(1e-13));
        CHECK(std::abs(n.dot(nd)) < 1e-13);  // rigid precession
        CHECK(n.z() == doctest::Approx(std::cos(theta0)).epsilon(1e-13));
        // Finite-difference check of the velocity.
        const double h = 1e-6;
        const Eigen::Vector3d fd =
            (rotating_axis(theta0, omega, t + h) - rotating_axis(theta0, omega, t - h)) /
            (2 * h);
        CHECK((nd - fd).norm() < 1e-8);
    }
}

TEST_CASE("lowering operator along a tilted axis") {
    // Equatorial axis at phi = 0: plus/minus states of sigma_x.
    const Operator lx = spin_lower_along(M_PI / 2, 0.0);
    const Operator want = 0.5 * (pauli_z() + kI * pauli_y());
    CHECK((lx - want).norm() < 1e-13);
    // Pole limit is the standard lowering operator up to the unavoidable
    // eigenvector phase (irrelevant inside a dissipator).
    const Operator lz = spin_lower_along(0.0, 0.0);
    CHECK(std::abs(std::abs(lz(1, 0)) - 1.0) < 1e-13);
    CHECK(std::abs(lz(0, 0)) + std::abs(lz(0, 1)) + std::abs(lz(1, 1)) < 1e-13);
    // Annihilates the lower state, maps upper to lower.
    for (double theta : {0.3, 1.2, 2.8}) {
        for (double phi : {0.0, 0.9}) {
            const Operator low = spin_lower_along(theta, phi);
            CHECK((low * low).norm() < 1e-13);
            CHECK(low.norm() == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("rotating scenario: dark state is the instantaneous fixed point") {
    const RotatingDissipationParams p{0.9, 4.0, 1.3};
    const DrivingProtocol proto = rotating_dissipation(p);
    for (int i = 0; i <= 6; ++i) {
        const double t = proto.t_start + proto.span() * i / 6.0;
        const Operator target = rotating_steady_state(p, t);
        CHECK(std::abs(target.trace() - 1.0) < 1e-13);
        CHECK(apply_lindblad(proto.generator(t), target).norm() < 1e-12);
    }
}

TEST_CASE("rotating scenario: declared frame conjugates the jump exactly") {
    const RotatingDissipationParams p{M_PI / 3, 5.0, 1.0};
    const DrivingProtocol proto = rotating_dissipation(p);
    const GeneratorSpec gen0 = proto.generator(proto.t_start);
    CHECK((proto.frame(proto.t_start) - Operator::Identity(2, 2)).norm() < 1e-13);
    for (double t : {0.17, 0.62, 1.01}) {
        const Operator w = proto.frame(t);
        CHECK(is_unitary(w, 1e-13));
        const GeneratorSpec gen = proto.generator(t);
        CHECK((gen.jumps[0].op - w * gen0.jumps[0].op * w.adjoint()).norm() < 1e-12);
        // Frame derivative hook is consistent: i Wdot W^dag = (omega/2) sz.
        const Operator hw = kI * proto.frame_derivative(t) * w.adjoint();
        CHECK((hw - 0.5 * p.omega * pauli_z()).norm() < 1e-12);
    }
}

TEST_CASE("rotating closed-form correction") {
    const double omega = 2.0;
    RotatingDissipationParams p;
    p.theta0 = M_PI / 2;
    p.omega = omega;
    // At the equator the correction is a constant z field of half the
    // rotation rate.
    for (double t : {0.0, 0.7}) {
        const Operator h = analytic_htqd_rotating(p, t);
        CHECK((h - 0.5 * omega * pauli_z()).norm() < 1e-13);
    }
    // Vanishes with omega.
    p.omega = 0.0;
    CHECK(analytic_htqd_rotating(p, 0.3).norm() < 1e-15);
}

TEST_CASE("bell rotation unitary properties") {
    for (double theta : {0.0, 0.2, M_PI / 4, 1.2}) {
        for (double phi : {0.0, 0.5}) {
            const Operator u = bell_unitary(theta, phi);
            CHECK(is_unitary(u, 1e-12));
            // Carries |00> onto the dark direction.
            Eigen::Vector4cd e00 = Eigen::Vector4cd::Zero();
            e00(0) = 1.0;
            Eigen::Vector4cd dark = Eigen::Vector4cd::Zero();
            dark(0) = std::cos(theta);
            dark(3) = std::sin(theta) * std::exp(kI * phi);
            CHECK(((u * e00) - dark).norm() < 1e-12);
        }
    }
    // Derivative hook matches finite differences.
    const double h = 1e-6;
    for (double theta : {0.3, 1.0}) {
        const Operator fd =
            (bell_unitary(theta + h, 0.0) - bell_unitary(theta - h, 0.0)) / (2 * h);
        CHECK((fd - d_bell_unitary_dtheta(theta, 0.0)).norm() < 1e-8);
    }
}

TEST_CASE("quarter-angle bell unitary is the bell-basis change") {
    // cos/sin at pi/4 make each image vector a uniform superposition pair.
    const Operator u = bell_unitary(M_PI / 4, 0.0);
    const double r = 1.0 / std::sqrt(2.0);
    Operator want(4, 4);
    want << r, 0, r, 0,
            0, r, 0, r,
            0, r, 0, -r,
            r, 0, -r, 0;
    CHECK((u - want).norm() < 1e-12);
}

TEST_CASE("bell schedule endpoints and smoothness") {
    const BellDraggingParams p{1.0, M_PI / 2, 2.0};
    CHECK(bell_theta(p, 0.0) == doctest::Approx(M_PI / 4).epsilon(1e-13));
    CHECK(bell_theta(p, p.duration) == doctest::Approx(p.theta_f).epsilon(1e-13));
    CHECK(std::abs(bell_theta_dot(p, 0.0)) < 1e-13);
    CHECK(std::abs(bell_theta_dot(p, p.duration)) < 1e-13);
    const double h = 1e-6;
    for (double t : {0.3, 1.0, 1.7}) {
        const double fd = (bell_theta(p, t + h) - bell_theta(p, t - h)) / (2 * h);
        CHECK(std::abs(fd - bell_theta_dot(p, t)) < 1e-8);
    }
}

TEST_CASE("bell scenario: dark state is a fixed point with simple zero mode") {
    const BellDraggingParams p;
    const DrivingProtocol proto = bell_dragging(p);
    const HermitianBasis basis = build_basis(4, BasisKind::pauli);
    for (double theta : {0.2, M_PI / 4, 1.2}) {
        // Invert the schedule: pick t so that theta(t) = theta when in
        // range, otherwise probe the generator directly via bell_target.
        const Operator u = bell_unitary(theta, 0.0);
        GeneratorSpec gen;
        gen.hamiltonian = Operator::Zero(4, 4);
        Operator g1 = Operator::Zero(4, 4);
        g1(0, 2) = 1.0;
        g1(1, 3) = 1.0;
        Operator g2 = Operator::Zero(4, 4);
        g2(0, 1) = 1.0;
        g2(2, 3) = 1.0;
        gen.jumps = {{(u * g1 * u.adjoint()).eval(), p.gamma},
                     {(u * g2 * u.adjoint()).eval(), p.gamma}};
        CHECK(apply_lindblad(gen, bell_target(theta)).norm() < 1e-12);
        // Zero eigenvalue multiplicity 1.
        const SpectralFrame f = spectral_frame(supermatrix(gen, basis));
        int zeros = 0;
        for (int b = 0; b < f.block_count(); ++b)
            if (std::abs(f.eigenvalues(b)) < 1e-8) ++zeros;
        CHECK(zeros == 1);
    }
    // The scheduled protocol itself keeps its declared target fixed.
    for (double t : {0.25, 0.5, 0.75}) {
        const Operator target = bell_target(bell_theta(p, t));
        CHECK(apply_lindblad(proto.generator(t), target).norm() < 1e-12);
    }
}

TEST_CASE("bell scenario: declared frame conjugates both jumps exactly") {
    const BellDraggingParams p;
    const DrivingProtocol proto = bell_dragging(p);
    const GeneratorSpec gen0 = proto.generator(proto.t_start);
    CHECK((proto.frame(proto.t_start) - Operator::Identity(4, 4)).norm() < 1e-13);
    for (double t : {0.21, 0.55, 0.83}) {
        const Operator w = proto.frame(t);
        CHECK(is_unitary(w, 1e-12));
        const GeneratorSpec gen = proto.generator(t);
        for (size_t j = 0; j < gen.jumps.size(); ++j)
            CHECK((gen.jumps[j].op - w * gen0.jumps[j].op * w.adjoint()).norm() < 1e-12);
    }
}

TEST_CASE("bell closed-form correction pattern") {
    CHECK(analytic_htqd_bell(0.0).norm() < 1e-15);
    const double td = 0.8;
    const Operator h = analytic_htqd_bell(td);
    CHECK(is_hermitian(h, 1e-13));
    CHECK(std::abs(h(0, 3) - Complex(0.0, -td)) < 1e-13);
    CHECK(std::abs(h(1, 2) - Complex(0.0, -td)) < 1e-13);
    CHECK(std::abs(h(2, 1) - Complex(0.0, td)) < 1e-13);
    CHECK(std::abs(h(3, 0) - Complex(0.0, td)) < 1e-13);
    double off_pattern = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            if (i + j != 3) off_pattern += std::abs(h(i, j));
    CHECK(off_pattern < 1e-13);
    // Matches the frame-derivative construction.
    const BellDraggingParams p;
    const DrivingProtocol proto = bell_dragging(p);
    const HermitianBasis basis = build_basis(4, BasisKind::pauli);
    for (double t : {0.3, 0.6}) {
        const CorrectionTerm term = unitary_frame_correction(proto.frame, t, 0.0, basis);
        CHECK((*term.hamiltonian_part - analytic_htqd_bell(bell_theta_dot(p, t))).norm() <
              1e-8);
    }
}

TEST_CASE("closed spin scenario") {
    const ClosedSpinParams p{1.5, 0.8, 2.5};
    const DrivingProtocol proto = closed_spin(p);
    CHECK(proto.generator(0.4).jumps.empty());
    const Operator h = proto.generator(0.4).hamiltonian;
    const Eigen::Vector3d n = rotating_axis(p.theta0, p.omega, 0.4);
    CHECK((h - 0.5 * p.field * pauli_vector(n.x(), n.y(), n.z())).norm() < 1e-13);
    // Target is the instantaneous ground state.
    const Operator target = proto.target_state(0.4);
    Eigen::SelfAdjointEigenSolver<Operator> es(h);
    const Operator proj = es.eigenvectors().col(0) * es.eigenvectors().col(0).adjoint();
    CHECK((target - proj).norm() < 1e-12);
    // Closed-form correction is field-free.
    CHECK((analytic_htqd_closed(p, 0.4) -
           analytic_htqd_rotating(RotatingDissipationParams{p.theta0, p.omega, 1.0}, 0.4))
              .norm() < 1e-13);
}

TEST_CASE("parameter validation") {
    RotatingDissipationParams rp;
    rp.gamma = 0.0;
    CHECK_THROWS_AS(rp.validate(), Error);
    rp = RotatingDissipationParams{};
    rp.theta0 = 0.0;
    CHECK_THROWS_AS(rp.validate(), Error);
    BellDraggingParams bp;
    bp.duration = -1.0;
    CHECK_THROWS_AS(bp.validate(), Error);
    ClosedSpinParams cp;
    cp.field = 0.0;
    CHECK_THROWS_AS(cp.validate(), Error);
}

TEST_CASE("protocol spans and time guards") {
    const RotatingDissipationParams p{M_PI / 3, 2.0, 1.0};
    const DrivingProtocol proto = rotating_dissipation(p);
    CHECK(proto.span() == doctest::Approx(M_PI).epsilon(1e-12));
    CHECK_THROWS_AS(proto.require_time(proto.t_end + 0.1), Error);
    CHECK_THROWS_AS(proto.require_time(proto.t_start - 0.1), Error);
}
