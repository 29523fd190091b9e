#include "tqd/scenarios.hpp"

#include <cmath>

namespace tqd {

namespace {

const Complex kI(0.0, 1.0);

// Symmetric half-phase gauge: exp(-i phi sigma_z / 2) carries the phi = 0
// eigenvectors onto these exactly, so frame conjugation of the jump holds
// as a matrix identity (not just up to phase).
Operator spin_upper_state(double theta, double phi) {
    Eigen::Vector2cd v;
    v << std::exp(-kI * (phi / 2.0)) * std::cos(theta / 2.0),
        std::exp(kI * (phi / 2.0)) * std::sin(theta / 2.0);
    return v;
}

Operator spin_lower_state(double theta, double phi) {
    Eigen::Vector2cd v;
    v << std::exp(-kI * (phi / 2.0)) * std::sin(theta / 2.0),
        -std::exp(kI * (phi / 2.0)) * std::cos(theta / 2.0);
    return v;
}

Operator rotation_frame_z(double angle) {
    Operator w = Operator::Zero(2, 2);
    w(0, 0) = std::exp(-kI * (angle / 2.0));
    w(1, 1) = std::exp(kI * (angle / 2.0));
    return w;
}

} // namespace

void RotatingDissipationParams::validate() const {
    if (!(theta0 > 0.0 && theta0 < M_PI))
        fail(ErrorCode::ConfigInvalid, "rotating: theta0 must lie in (0, pi)");
    if (!(gamma > 0.0))
        fail(ErrorCode::ConfigInvalid, "rotating: gamma must be > 0");
    if (!std::isfinite(omega))
        fail(ErrorCode::ConfigInvalid, "rotating: omega must be finite");
}

void BellDraggingParams::validate() const {
    if (!(gamma > 0.0))
        fail(ErrorCode::ConfigInvalid, "bell: gamma must be > 0");
    if (!(duration > 0.0))
        fail(ErrorCode::ConfigInvalid, "bell: duration must be > 0");
    if (!(theta_f > 0.0 && theta_f < M_PI))
        fail(ErrorCode::ConfigInvalid, "bell: theta_f must lie in (0, pi)");
}

void ClosedSpinParams::validate() const {
    if (!(field > 0.0))
        fail(ErrorCode::ConfigInvalid, "closed: field must be > 0");
    if (!(theta0 > 0.0 && theta0 < M_PI))
        fail(ErrorCode::ConfigInvalid, "closed: theta0 must lie in (0, pi)");
    if (!std::isfinite(omega))
        fail(ErrorCode::ConfigInvalid, "closed: omega must be finite");
}

Eigen::Vector3d rotating_axis(double theta0, double omega, double t) {
    return {std::sin(theta0) * std::cos(omega * t),
            std::sin(theta0) * std::sin(omega * t), std::cos(theta0)};
}

Eigen::Vector3d rotating_axis_dot(double theta0, double omega, double t) {
    return {-omega * std::sin(theta0) * std::sin(omega * t),
            omega * std::sin(theta0) * std::cos(omega * t), 0.0};
}

Operator spin_lower_along(double theta, double phi) {
    return spin_lower_state(theta, phi) * spin_upper_state(theta, phi).adjoint();
}

Operator rotating_steady_state(const RotatingDissipationParams& p, double t) {
    const Eigen::Vector3d n = rotating_axis(p.theta0, p.omega, t);
    return 0.5 * (pauli_id() - pauli_vector(n.x(), n.y(), n.z()));
}

Operator analytic_htqd_rotating(const RotatingDissipationParams& p, double t) {
    const Eigen::Vector3d n = rotating_axis(p.theta0, p.omega, t);
    const Eigen::Vector3d c = 0.5 * n.cross(rotating_axis_dot(p.theta0, p.omega, t));
    return pauli_vector(c.x(), c.y(), c.z());
}

Operator analytic_htqd_closed(const ClosedSpinParams& p, double t) {
    const Eigen::Vector3d n = rotating_axis(p.theta0, p.omega, t);
    const Eigen::Vector3d c = 0.5 * n.cross(rotating_axis_dot(p.theta0, p.omega, t));
    return pauli_vector(c.x(), c.y(), c.z());
}

DrivingProtocol rotating_dissipation(const RotatingDissipationParams& p) {
    p.validate();
    DrivingProtocol proto;
    proto.kind = ProtocolKind::rotating_dissipation;
    proto.t_start = 0.0;
    proto.t_end = 2.0 * M_PI / std::max(std::abs(p.omega), 1e-12);
    proto.dim = 2;
    proto.generator = [p](double t) {
        GeneratorSpec gen;
        gen.hamiltonian = Operator::Zero(2, 2);
        gen.jumps = {{spin_lower_along(p.theta0, p.omega * t), p.gamma}};
        return gen;
    };
    proto.generator_derivative = [p](double t) {
        // Gamma(t) = W Gamma0 W^dag with Wdot W^dag = -i(omega/2) sigma_z,
        // so Gammadot = -i(omega/2) [sigma_z, Gamma(t)].
        const Operator jump = spin_lower_along(p.theta0, p.omega * t);
        GeneratorSpec dgen;
        dgen.hamiltonian = Operator::Zero(2, 2);
        dgen.jumps = {{(-kI * (p.omega / 2.0) * commutator(pauli_z(), jump)).eval(), 0.0}};
        return dgen;
    };
    proto.frame = [p](double t) { return rotation_frame_z(p.omega * t); };
    proto.frame_derivative = [p](double t) {
        return (-kI * (p.omega / 2.0) * pauli_z() * rotation_frame_z(p.omega * t)).eval();
    };
    proto.analytic_htqd = [p](double t) { return analytic_htqd_rotating(p, t); };
    return proto;
}

Operator bell_unitary(double theta, double phi) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    const Complex em = std::exp(-kI * phi);
    const Complex ep = std::exp(kI * phi);
    Operator u = Operator::Zero(4, 4);
    u(0, 0) = c;
    u(0, 2) = em * s;
    u(1, 1) = c;
    u(1, 3) = em * s;
    u(2, 1) = ep * s;
    u(2, 3) = -c;
    u(3, 0) = ep * s;
    u(3, 2) = -c;
    return u;
}

Operator d_bell_unitary_dtheta(double theta, double phi) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    const Complex em = std::exp(-kI * phi);
    const Complex ep = std::exp(kI * phi);
    Operator u = Operator::Zero(4, 4);
    u(0, 0) = -s;
    u(0, 2) = em * c;
    u(1, 1) = -s;
    u(1, 3) = em * c;
    u(2, 1) = ep * c;
    u(2, 3) = s;
    u(3, 0) = ep * c;
    u(3, 2) = s;
    return u;
}

Operator bell_target(double theta) {
    Eigen::Vector4cd psi;
    psi << std::cos(theta), 0.0, 0.0, std::sin(theta);
    return psi * psi.adjoint();
}

double bell_theta(const BellDraggingParams& p, double t) {
    const double s = std::sin(M_PI * t / (2.0 * p.duration));
    return M_PI / 4.0 + (p.theta_f - M_PI / 4.0) * s * s;
}

double bell_theta_dot(const BellDraggingParams& p, double t) {
    return (p.theta_f - M_PI / 4.0) * (M_PI / (2.0 * p.duration)) *
           std::sin(M_PI * t / p.duration);
}

Operator analytic_htqd_bell(double theta_dot) {
    Operator h = Operator::Zero(4, 4);
    h(0, 3) = -kI * theta_dot;
    h(1, 2) = -kI * theta_dot;
    h(2, 1) = kI * theta_dot;
    h(3, 0) = kI * theta_dot;
    return h;
}

namespace {

std::pair<Operator, Operator> bell_raw_jumps() {
    Operator lower(2, 2);
    lower << 0, 1, 0, 0; // |0><1|
    const Operator id2 = Operator::Identity(2, 2);
    return {kron(lower, id2), kron(id2, lower)};
}

} // namespace

DrivingProtocol bell_dragging(const BellDraggingParams& p) {
    p.validate();
    DrivingProtocol proto;
    proto.kind = ProtocolKind::bell_dragging;
    proto.t_start = 0.0;
    proto.t_end = p.duration;
    proto.dim = 4;
    proto.generator = [p](double t) {
        const Operator u = bell_unitary(bell_theta(p, t), 0.0);
        auto [g1, g2] = bell_raw_jumps();
        GeneratorSpec gen;
        gen.hamiltonian = Operator::Zero(4, 4);
        gen.jumps = {{(u * g1 * u.adjoint()).eval(), p.gamma},
                     {(u * g2 * u.adjoint()).eval(), p.gamma}};
        return gen;
    };
    proto.generator_derivative = [p](double t) {
        const double theta = bell_theta(p, t);
        const double theta_dot = bell_theta_dot(p, t);
        const Operator u = bell_unitary(theta, 0.0);
        const Operator du = (theta_dot * d_bell_unitary_dtheta(theta, 0.0)).eval();
        auto [g1, g2] = bell_raw_jumps();
        GeneratorSpec dgen;
        dgen.hamiltonian = Operator::Zero(4, 4);
        dgen.jumps = {
            {(du * g1 * u.adjoint() + u * g1 * du.adjoint()).eval(), 0.0},
            {(du * g2 * u.adjoint() + u * g2 * du.adjoint()).eval(), 0.0}};
        return dgen;
    };
    const Operator u0 = bell_unitary(M_PI / 4.0, 0.0);
    proto.frame = [p, u0](double t) {
        return (bell_unitary(bell_theta(p, t), 0.0) * u0.adjoint()).eval();
    };
    proto.frame_derivative = [p, u0](double t) {
        return (bell_theta_dot(p, t) * d_bell_unitary_dtheta(bell_theta(p, t), 0.0) *
                u0.adjoint())
            .eval();
    };
    proto.analytic_htqd = [p](double t) {
        return analytic_htqd_bell(bell_theta_dot(p, t));
    };
    return proto;
}

DrivingProtocol closed_spin(const ClosedSpinParams& p) {
    p.validate();
    DrivingProtocol proto;
    proto.kind = ProtocolKind::closed_spin;
    proto.t_start = 0.0;
    proto.t_end = 2.0 * M_PI / std::max(std::abs(p.omega), 1e-12);
    proto.dim = 2;
    proto.generator = [p](double t) {
        const Eigen::Vector3d n = rotating_axis(p.theta0, p.omega, t);
        GeneratorSpec gen;
        gen.hamiltonian = 0.5 * p.field * pauli_vector(n.x(), n.y(), n.z());
        return gen;
    };
    proto.generator_derivative = [p](double t) {
        const Eigen::Vector3d nd = rotating_axis_dot(p.theta0, p.omega, t);
        GeneratorSpec dgen;
        dgen.hamiltonian = 0.5 * p.field * pauli_vector(nd.x(), nd.y(), nd.z());
        return dgen;
    };
    proto.frame = [p](double t) { return rotation_frame_z(p.omega * t); };
    proto.frame_derivative = [p](double t) {
        return (-kI * (p.omega / 2.0) * pauli_z() * rotation_frame_z(p.omega * t)).eval();
    };
    proto.target_state = [p](double t) {
        // Ground state of (B/2) n . sigma is |down_n><down_n|.
        const Eigen::Vector3d n = rotating_axis(p.theta0, p.omega, t);
        return (0.5 * (pauli_id() - pauli_vector(n.x(), n.y(), n.z()))).eval();
    };
    proto.analytic_htqd = [p](double t) { return analytic_htqd_closed(p, t); };
    return proto;
}

} // namespace tqd
