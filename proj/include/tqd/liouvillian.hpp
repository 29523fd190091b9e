#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tqd/algebra.hpp"

namespace tqd {

struct Jump {
    Operator op;
    double rate = 0.0;
};

// Hamiltonian plus weighted jump operators at a fixed time.
struct GeneratorSpec {
    Operator hamiltonian;
    std::vector<Jump> jumps;

    int dim() const { return static_cast<int>(hamiltonian.rows()); }

    // Enforced on physical generators (not on derivative carriers):
    // square/finite operators, Hermitian H to 1e-12, rates >= 0.
    void validate(const char* what = "generator") const;
};

enum class ProtocolKind { rotating_dissipation, bell_dragging, closed_spin, tabulated };

// Time-dependent generator over [t_start, t_end] with optional analytic
// hooks. frame W(t) satisfies Gamma_k(t) = W(t) Gamma_k(t_start) W(t)^dag
// (and W(t_start) = 1) when the scenario declares one; derivative hooks
// carry d/dt of H, Gamma_k, gamma_k entrywise.
struct DrivingProtocol {
    ProtocolKind kind = ProtocolKind::tabulated;
    double t_start = 0.0;
    double t_end = 1.0;
    int dim = 0;
    std::function<GeneratorSpec(double)> generator;
    std::function<GeneratorSpec(double)> generator_derivative; // optional
    std::function<Operator(double)> frame;                     // optional
    std::function<Operator(double)> frame_derivative;          // optional
    std::function<Operator(double)> target_state;              // optional (closed scenario)
    std::function<Operator(double)> analytic_htqd;             // optional closed form

    double span() const { return t_end - t_start; }
    void require_time(double t) const;
    void validate(const char* what = "protocol") const;
};

// Lindblad action
//   L[rho] = -i[H, rho] + 1/2 sum_j gamma_j (2 G_j rho G_j^dag
//            - {G_j^dag G_j, rho}).
Operator apply_lindblad(const GeneratorSpec& gen, const Operator& rho);

// Entrywise time derivative of the Lindblad action by the product rule;
// dgen carries (Hdot, Gdot_j, ratedot_j) and is exempt from rate-sign checks.
Operator apply_lindblad_derivative(const GeneratorSpec& gen, const GeneratorSpec& dgen,
                                   const Operator& rho);

// Supermatrix L_jk = Tr[sigma_j^dag L[sigma_k]].
SuperMatrix supermatrix(const GeneratorSpec& gen, const HermitianBasis& basis);

// Commutator superoperator of -i[H, .].
SuperMatrix hamiltonian_superop(const Operator& h, const HermitianBasis& basis);

GeneratorSpec generator_at(const DrivingProtocol& protocol, double t);

enum class DerivativeMode { automatic, finite_difference, analytic };

// dL/dt at time t. finite_difference uses the central stencil
// (L(t+h) - L(t-h)) / (2h); analytic uses the protocol's derivative hook.
// h <= 0 selects the default 1e-6 * (t_end - t_start).
SuperMatrix supermatrix_derivative(const DrivingProtocol& protocol, double t,
                                   const HermitianBasis& basis, double h = 0.0,
                                   DerivativeMode mode = DerivativeMode::automatic);

// Builds a tabulated protocol from generator samples on a uniform grid,
// interpolated entrywise with Catmull-Rom cubics. All samples must share
// the operator structure (same dim and jump count; rates interpolated too).
DrivingProtocol tabulated_protocol(const std::vector<double>& times,
                                   const std::vector<GeneratorSpec>& samples);

} // namespace tqd
