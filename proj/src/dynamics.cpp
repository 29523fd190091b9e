#include "tqd/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

namespace tqd {

void IntegratorConfig::validate() const {
    if (!(dt > 0.0))
        fail(ErrorCode::ConfigInvalid, "integrator: dt must be positive");
    if (!(rtol > 0.0) || !(atol > 0.0))
        fail(ErrorCode::ConfigInvalid, "integrator: tolerances must be positive");
}

namespace {

double vec_max(const std::vector<double>& v, double empty = 0.0) {
    return v.empty() ? empty : *std::max_element(v.begin(), v.end());
}

} // namespace

double Trajectory::max_trace_error() const { return vec_max(trace_errors); }
double Trajectory::max_trace_distance() const { return vec_max(trace_distances); }

double Trajectory::min_fidelity() const {
    return fidelities.empty() ? 1.0 : *std::min_element(fidelities.begin(), fidelities.end());
}

namespace {

Operator psd_sqrt(const Operator& a) {
    Eigen::SelfAdjointEigenSolver<Operator> es(0.5 * (a + a.adjoint()));
    if (es.info() != Eigen::Success)
        fail(ErrorCode::NumericalFailure, "psd_sqrt: eigensolver failed");
    Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

} // namespace

double fidelity(const Operator& rho, const Operator& sigma) {
    require_same_dim(rho, sigma, "fidelity");
    const Operator root = psd_sqrt(rho);
    Eigen::SelfAdjointEigenSolver<Operator> es(
        0.5 * ((root * sigma * root).eval() + (root * sigma * root).adjoint().eval()));
    if (es.info() != Eigen::Success)
        fail(ErrorCode::NumericalFailure, "fidelity: eigensolver failed");
    const double s = es.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
    return s * s;
}

double trace_distance(const Operator& rho, const Operator& sigma) {
    require_same_dim(rho, sigma, "trace_distance");
    Eigen::SelfAdjointEigenSolver<Operator> es(
        0.5 * ((rho - sigma) + (rho - sigma).adjoint()));
    if (es.info() != Eigen::Success)
        fail(ErrorCode::NumericalFailure, "trace_distance: eigensolver failed");
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

Operator instantaneous_target(const DrivingProtocol& protocol, const HermitianBasis& basis,
                              double t) {
    protocol.require_time(t);
    if (protocol.target_state) return protocol.target_state(t);
    return steady_state(supermatrix(protocol.generator(t), basis), basis);
}

CorrectionTerm evaluate_correction(const DrivingProtocol& protocol, const HermitianBasis& basis,
                                   CorrectionMode mode, double t, bool detect_hamiltonian) {
    switch (mode) {
    case CorrectionMode::none: {
        CorrectionTerm term;
        term.kind = CorrectionKind::general;
        term.supermatrix = SuperMatrix::Zero(basis.size(), basis.size());
        return term;
    }
    case CorrectionMode::general: {
        const double delta = 1e-4 * protocol.span();
        const double tc =
            std::clamp(t, protocol.t_start + delta, protocol.t_end - delta);
        const FramePath path = track_frames(protocol, basis, {tc});
        return general_l_tqd(path, 0, 0.0, detect_hamiltonian);
    }
    case CorrectionMode::unitary_frame: {
        if (!protocol.frame)
            fail(ErrorCode::ConfigInvalid,
                 "evaluate_correction: protocol declares no unitary frame");
        return unitary_frame_correction(protocol.frame, t, 0.0, basis);
    }
    case CorrectionMode::analytic: {
        if (!protocol.analytic_htqd)
            fail(ErrorCode::ConfigInvalid,
                 "evaluate_correction: protocol has no closed-form correction");
        Operator h = protocol.analytic_htqd(t);
        h = 0.5 * (h + h.adjoint()).eval();
        CorrectionTerm term;
        term.kind = protocol.kind == ProtocolKind::closed_spin ? CorrectionKind::closed_system
                                                               : CorrectionKind::general;
        term.hamiltonian_part = h;
        term.supermatrix = hamiltonian_superop(h, basis);
        return term;
    }
    }
    fail(ErrorCode::ConfigInvalid, "evaluate_correction: unknown mode");
}

namespace {

struct Stepper {
    const DrivingProtocol& protocol;
    const HermitianBasis& basis;
    const IntegratorConfig& config;
    std::map<double, SuperMatrix> cache;
    long evaluations = 0;

    SuperMatrix generator_matrix(double t) {
        SuperMatrix l = supermatrix(protocol.generator(t), basis);
        if (config.correction_mode != CorrectionMode::none) {
            auto it = cache.find(t);
            if (it == cache.end()) {
                it = cache
                         .emplace(t, evaluate_correction(protocol, basis,
                                                         config.correction_mode, t, false)
                                         .supermatrix)
                         .first;
            }
            l += it->second;
        }
        return l;
    }

    CoherenceVector rhs(double t, const CoherenceVector& y) {
        ++evaluations;
        if (evaluations > 20'000'000)
            fail(ErrorCode::NumericalFailure, "integrate: evaluation budget exhausted");
        return generator_matrix(t) * y;
    }

    void rk4_segment(double ta, double tb, CoherenceVector& y) {
        const double len = tb - ta;
        const int nsteps = std::max(1, static_cast<int>(std::ceil(len / config.dt)));
        const double h = len / nsteps;
        for (int s = 0; s < nsteps; ++s) {
            const double t = ta + s * h;
            const CoherenceVector k1 = rhs(t, y);
            const CoherenceVector k2 = rhs(t + 0.5 * h, y + 0.5 * h * k1);
            const CoherenceVector k3 = rhs(t + 0.5 * h, y + 0.5 * h * k2);
            const CoherenceVector k4 = rhs(t + h, y + h * k3);
            y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
    }

    // Dormand-Prince 5(4) embedded pair.
    void rk45_segment(double ta, double tb, CoherenceVector& y, double& h_live) {
        static constexpr double a21 = 1.0 / 5;
        static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
        static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
        static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                                a53 = 64448.0 / 6561, a54 = -212.0 / 729;
        static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                                a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                                a65 = -5103.0 / 18656;
        static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                                b5 = -2187.0 / 6784, b6 = 11.0 / 84;
        static constexpr double e1 = 35.0 / 384 - 5179.0 / 57600,
                                e3 = 500.0 / 1113 - 7571.0 / 16695,
                                e4 = 125.0 / 192 - 393.0 / 640,
                                e5 = -2187.0 / 6784 + 92097.0 / 339200,
                                e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;
        const double h_min = 1e-14 * std::max(1.0, protocol.span());
        double t = ta;
        while (tb - t > h_min) {
            if (h_live < h_min)
                fail(ErrorCode::NumericalFailure, "integrate: step size collapsed");
            const double h = std::min(h_live, tb - t);
            const CoherenceVector k1 = rhs(t, y);
            const CoherenceVector k2 = rhs(t + a21 * h, y + h * (a21 * k1));
            const CoherenceVector k3 =
                rhs(t + 0.3 * h, y + h * (a31 * k1 + a32 * k2));
            const CoherenceVector k4 =
                rhs(t + 0.8 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
            const CoherenceVector k5 = rhs(
                t + (8.0 / 9) * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
            const CoherenceVector k6 =
                rhs(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
            const CoherenceVector y5 =
                y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
            const CoherenceVector k7 = rhs(t + h, y5);
            const CoherenceVector err_vec =
                h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
            double err = 0.0;
            for (int i = 0; i < y.size(); ++i) {
                const double scale =
                    config.atol +
                    config.rtol * std::max(std::abs(y(i)), std::abs(y5(i)));
                err = std::max(err, std::abs(err_vec(i)) / scale);
            }
            if (err <= 1.0) {
                t += h;
                y = y5;
                const double grow = err == 0.0 ? 5.0 : 0.9 * std::pow(err, -0.2);
                h_live = h * std::clamp(grow, 0.2, 5.0);
            } else {
                h_live = h * std::max(0.2, 0.9 * std::pow(err, -0.2));
            }
        }
    }
};

} // namespace

Trajectory integrate(const DrivingProtocol& protocol, const HermitianBasis& basis,
                     const Operator& rho0, const IntegratorConfig& config,
                     const std::vector<double>& sample_times) {
    protocol.validate("integrate");
    config.validate();
    if (sample_times.size() < 2)
        fail(ErrorCode::ConfigInvalid, "integrate: need at least two sample times");
    for (size_t i = 0; i < sample_times.size(); ++i) {
        protocol.require_time(sample_times[i]);
        if (i > 0 && !(sample_times[i] > sample_times[i - 1]))
            fail(ErrorCode::ConfigInvalid, "integrate: sample times must increase strictly");
    }
    require_square(rho0, "integrate");
    if (rho0.rows() != basis.dim)
        fail(ErrorCode::DimensionMismatch, "integrate: state/basis dimension mismatch");
    if (!is_finite(rho0) || !is_hermitian(rho0, 1e-10))
        fail(ErrorCode::InvalidState, "integrate: initial state is not Hermitian");
    if (std::abs(rho0.trace() - Complex(1.0)) > 1e-8)
        fail(ErrorCode::InvalidState, "integrate: initial state trace differs from one");
    {
        Eigen::SelfAdjointEigenSolver<Operator> es(rho0);
        if (es.eigenvalues().minCoeff() < -1e-9)
            fail(ErrorCode::InvalidState, "integrate: initial state has a negative eigenvalue");
    }

    Stepper stepper{protocol, basis, config, {}, 0};
    Trajectory traj;
    CoherenceVector y = vectorize(rho0, basis);
    double h_live = std::max(1e-6 * protocol.span(),
                             (sample_times.back() - sample_times.front()) / 100.0);

    auto record = [&](double t) {
        Operator rho = devectorize(y, basis);
        rho = 0.5 * (rho + rho.adjoint()).eval();
        const double tr = rho.trace().real();
        const double tr_err = std::abs(tr - 1.0);
        if (tr < 0.5)
            fail(ErrorCode::NumericalFailure, "integrate: state trace collapsed");
        if (tr_err > 1e-12) {
            rho /= tr;
            y /= tr;
        }
        Eigen::SelfAdjointEigenSolver<Operator> es(rho);
        const Operator target = instantaneous_target(protocol, basis, t);
        traj.times.push_back(t);
        traj.states.push_back(y);
        traj.fidelities.push_back(fidelity(rho, target));
        traj.trace_distances.push_back(trace_distance(rho, target));
        traj.trace_errors.push_back(tr_err);
        traj.min_eigenvalues.push_back(es.eigenvalues().minCoeff());
    };

    record(sample_times.front());
    for (size_t i = 0; i + 1 < sample_times.size(); ++i) {
        const double ta = sample_times[i];
        const double tb = sample_times[i + 1];
        if (config.method == IntegrationMethod::rk4_fixed)
            stepper.rk4_segment(ta, tb, y);
        else
            stepper.rk45_segment(ta, tb, y, h_live);
        record(tb);
    }
    return traj;
}

CoherenceVector expm_reference(const SuperMatrix& l, const CoherenceVector& v0, double t) {
    require_square(l, "expm_reference");
    if (l.rows() != v0.size())
        fail(ErrorCode::DimensionMismatch, "expm_reference: dimension mismatch");
    return (l * t).exp() * v0;
}

} // namespace tqd
