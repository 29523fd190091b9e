#pragma once

#include "tqd/liouvillian.hpp"

namespace tqd {

// Single qubit, H = 0, one jump sigma^-_n(t) with fixed rate; the damping
// axis n(theta0, phi = omega t) precesses rigidly about z.
struct RotatingDissipationParams {
    double theta0 = M_PI / 3; // polar angle, poles excluded
    double omega = 5.0;       // precession frequency
    double gamma = 1.0;       // damping rate, > 0

    void validate() const;
};

// Two qubits, two equal-rate jumps dragged by the Bell-rotation unitary
// U(theta(t), phi = 0); the dark state cos(theta)|00> + sin(theta)|11> is
// carried from the product state at theta = pi/4 toward theta_f.
struct BellDraggingParams {
    double gamma = 1.0;         // jump rate, > 0
    double theta_f = M_PI / 2;  // schedule endpoint
    double duration = 1.0;      // total drag time T

    void validate() const;
};

// Single qubit, H(t) = (B/2) n(t) . sigma, no jumps; target is the
// instantaneous ground state.
struct ClosedSpinParams {
    double field = 1.0; // level splitting B (spectral gap), > 0
    double theta0 = M_PI / 3;
    double omega = 2.0;

    void validate() const;
};

// Damping axis and its velocity.
Eigen::Vector3d rotating_axis(double theta0, double omega, double t);
Eigen::Vector3d rotating_axis_dot(double theta0, double omega, double t);

// Lowering operator |down_n><up_n| built from the eigenvectors of n . sigma
// at polar angle theta and azimuth phi (exact at the poles).
Operator spin_lower_along(double theta, double phi);

// Instantaneous steady state (1/2)(1 - n(t) . sigma).
Operator rotating_steady_state(const RotatingDissipationParams& p, double t);

// Closed-form correction Hamiltonians.
Operator analytic_htqd_rotating(const RotatingDissipationParams& p, double t);
Operator analytic_htqd_closed(const ClosedSpinParams& p, double t);

// Bell-rotation unitary (general rotation in the {|00>,|11>} / {|01>,|10>}
// planes followed by the basis swap; reduces to the Bell-basis change at
// theta = pi/4, phi = 0).
Operator bell_unitary(double theta, double phi);
Operator d_bell_unitary_dtheta(double theta, double phi);

// Dark state cos(theta)|00> + sin(theta)|11> as a projector.
Operator bell_target(double theta);

double bell_theta(const BellDraggingParams& p, double t);
double bell_theta_dot(const BellDraggingParams& p, double t);

// i Udot U^dag for the dragged Bell frame: antidiagonal +-i*theta_dot pattern.
Operator analytic_htqd_bell(double theta_dot);

// Protocol factories. Spans: one precession period for rotating/closed,
// [0, duration] for bell.
DrivingProtocol rotating_dissipation(const RotatingDissipationParams& p);
DrivingProtocol bell_dragging(const BellDraggingParams& p);
DrivingProtocol closed_spin(const ClosedSpinParams& p);

} // namespace tqd
