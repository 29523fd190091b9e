#pragma once

#include "tqd/correction.hpp"

namespace tqd {

enum class IntegrationMethod { rk4_fixed, rk45_adaptive };
enum class CorrectionMode { none, general, unitary_frame, analytic };

struct IntegratorConfig {
    IntegrationMethod method = IntegrationMethod::rk45_adaptive;
    double dt = 1e-3;    // rk4_fixed step size
    double rtol = 1e-9;  // rk45 relative tolerance
    double atol = 1e-12; // rk45 absolute tolerance
    CorrectionMode correction_mode = CorrectionMode::none;

    void validate() const;
};

// Sampled solution of the coherence-vector equation of motion plus tracking
// metrics against the instantaneous target state. trace_errors hold the
// raw |Tr rho - 1| before the per-sample renormalization.
struct Trajectory {
    std::vector<double> times;
    std::vector<CoherenceVector> states;
    std::vector<double> fidelities;
    std::vector<double> trace_distances;
    std::vector<double> trace_errors;
    std::vector<double> min_eigenvalues;

    double max_trace_error() const;
    double max_trace_distance() const;
    double min_fidelity() const;
};

// Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2 of density
// matrices; negative eigenvalue dust is clipped at zero.
double fidelity(const Operator& rho, const Operator& sigma);

// (1/2) ||rho - sigma||_1.
double trace_distance(const Operator& rho, const Operator& sigma);

// The protocol's declared target if present, otherwise the unique
// instantaneous steady state of L(t).
Operator instantaneous_target(const DrivingProtocol& protocol, const HermitianBasis& basis,
                              double t);

// Correction generator for a mode at one time (mode none gives zero).
// general builds a local three-point frame path around t; when t is within
// a stencil width of the span boundary it is evaluated at the nearest
// interior point instead.
CorrectionTerm evaluate_correction(const DrivingProtocol& protocol, const HermitianBasis& basis,
                                   CorrectionMode mode, double t,
                                   bool detect_hamiltonian = true);

// Integrate d|rho>>/dt = [L(t) + correction(t)] |rho>> from sample_times
// front to back, recording state and metrics at each sample time.
Trajectory integrate(const DrivingProtocol& protocol, const HermitianBasis& basis,
                     const Operator& rho0, const IntegratorConfig& config,
                     const std::vector<double>& sample_times);

// exp(l * t) v0 by dense matrix exponential; reference oracle for the
// time-independent case.
CoherenceVector expm_reference(const SuperMatrix& l, const CoherenceVector& v0, double t);

} // namespace tqd
