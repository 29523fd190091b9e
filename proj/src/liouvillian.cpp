#include "tqd/liouvillian.hpp"

#include <cmath>

namespace tqd {

void GeneratorSpec::validate(const char* what) const {
    require_square(hamiltonian, what);
    if (!is_hermitian(hamiltonian, 1e-12))
        fail(ErrorCode::InvalidOperator,
             std::string(what) + ": hamiltonian is not Hermitian (defect " +
                 std::to_string(hermiticity_defect(hamiltonian)) + ")");
    for (const auto& j : jumps) {
        require_square(j.op, what);
        if (j.op.rows() != hamiltonian.rows())
            fail(ErrorCode::DimensionMismatch,
                 std::string(what) + ": jump dim does not match hamiltonian");
        if (!(j.rate >= 0.0) || !std::isfinite(j.rate))
            fail(ErrorCode::NegativeRate,
                 std::string(what) + ": jump rate must be finite and >= 0");
    }
}

void DrivingProtocol::require_time(double t) const {
    if (!(t >= t_start && t <= t_end))
        fail(ErrorCode::OutOfRange,
             "protocol: time " + std::to_string(t) + " outside [" +
                 std::to_string(t_start) + ", " + std::to_string(t_end) + "]");
}

void DrivingProtocol::validate(const char* what) const {
    if (!(t_start < t_end))
        fail(ErrorCode::ConfigInvalid, std::string(what) + ": t_start must be < t_end");
    if (!generator)
        fail(ErrorCode::ConfigInvalid, std::string(what) + ": missing generator");
    if (dim < 2)
        fail(ErrorCode::UnsupportedDimension, std::string(what) + ": dim must be >= 2");
}

Operator apply_lindblad(const GeneratorSpec& gen, const Operator& rho) {
    gen.validate("apply_lindblad");
    require_same_dim(gen.hamiltonian, rho, "apply_lindblad");
    const Complex i(0.0, 1.0);
    Operator out = -i * commutator(gen.hamiltonian, rho);
    for (const auto& j : gen.jumps) {
        const Operator gdg = j.op.adjoint() * j.op;
        out += 0.5 * j.rate *
               (2.0 * j.op * rho * j.op.adjoint() - anticommutator(gdg, rho));
    }
    return out;
}

Operator apply_lindblad_derivative(const GeneratorSpec& gen, const GeneratorSpec& dgen,
                                   const Operator& rho) {
    require_same_dim(gen.hamiltonian, rho, "apply_lindblad_derivative");
    if (dgen.dim() != gen.dim() || dgen.jumps.size() != gen.jumps.size())
        fail(ErrorCode::DimensionMismatch,
             "apply_lindblad_derivative: derivative spec mismatch");
    const Complex i(0.0, 1.0);
    Operator out = -i * commutator(dgen.hamiltonian, rho);
    for (size_t k = 0; k < gen.jumps.size(); ++k) {
        const Operator& g = gen.jumps[k].op;
        const Operator& dg = dgen.jumps[k].op;
        const double rate = gen.jumps[k].rate;
        const double drate = dgen.jumps[k].rate;
        const Operator gdg = g.adjoint() * g;
        out += 0.5 * drate * (2.0 * g * rho * g.adjoint() - anticommutator(gdg, rho));
        const Operator cross = dg.adjoint() * g + g.adjoint() * dg;
        out += 0.5 * rate *
               (2.0 * (dg * rho * g.adjoint() + g * rho * dg.adjoint()) -
                anticommutator(cross, rho));
    }
    return out;
}

namespace {

SuperMatrix superop_of(const std::function<Operator(const Operator&)>& action,
                       const HermitianBasis& basis) {
    const int n = basis.size();
    SuperMatrix m(n, n);
    for (int k = 0; k < n; ++k) {
        const Operator image = action(basis.elements[k]);
        for (int j = 0; j < n; ++j)
            m(j, k) = (basis.elements[j].adjoint() * image).trace();
    }
    return m;
}

} // namespace

SuperMatrix supermatrix(const GeneratorSpec& gen, const HermitianBasis& basis) {
    gen.validate("supermatrix");
    if (gen.dim() != basis.dim)
        fail(ErrorCode::DimensionMismatch, "supermatrix: basis dim mismatch");
    return superop_of([&](const Operator& x) { return apply_lindblad(gen, x); }, basis);
}

SuperMatrix hamiltonian_superop(const Operator& h, const HermitianBasis& basis) {
    require_square(h, "hamiltonian_superop");
    if (h.rows() != basis.dim)
        fail(ErrorCode::DimensionMismatch, "hamiltonian_superop: basis dim mismatch");
    const Complex i(0.0, 1.0);
    return superop_of([&](const Operator& x) { return (-i * commutator(h, x)).eval(); },
                      basis);
}

GeneratorSpec generator_at(const DrivingProtocol& protocol, double t) {
    protocol.validate("generator_at");
    protocol.require_time(t);
    GeneratorSpec gen = protocol.generator(t);
    gen.validate("generator_at");
    return gen;
}

SuperMatrix supermatrix_derivative(const DrivingProtocol& protocol, double t,
                                   const HermitianBasis& basis, double h,
                                   DerivativeMode mode) {
    protocol.validate("supermatrix_derivative");
    protocol.require_time(t);
    const bool want_analytic = mode == DerivativeMode::analytic ||
                               (mode == DerivativeMode::automatic &&
                                static_cast<bool>(protocol.generator_derivative));
    if (want_analytic) {
        if (!protocol.generator_derivative)
            fail(ErrorCode::ConfigInvalid,
                 "supermatrix_derivative: no analytic derivative hook");
        const GeneratorSpec gen = protocol.generator(t);
        const GeneratorSpec dgen = protocol.generator_derivative(t);
        return superop_of(
            [&](const Operator& x) { return apply_lindblad_derivative(gen, dgen, x); },
            basis);
    }
    if (h <= 0.0) h = 1e-6 * protocol.span();
    if (t - h < protocol.t_start || t + h > protocol.t_end)
        fail(ErrorCode::StencilOutOfRange,
             "supermatrix_derivative: stencil [t-h, t+h] leaves the protocol span");
    const SuperMatrix lp = supermatrix(protocol.generator(t + h), basis);
    const SuperMatrix lm = supermatrix(protocol.generator(t - h), basis);
    return (lp - lm) / (2.0 * h);
}

namespace {

// Catmull-Rom value at x in [x1, x2] given samples y0..y3 on a uniform grid.
Complex catmull_rom(Complex y0, Complex y1, Complex y2, Complex y3, double u) {
    const Complex a0 = y1;
    const Complex a1 = 0.5 * (y2 - y0);
    const Complex a2 = y0 - 2.5 * y1 + 2.0 * y2 - 0.5 * y3;
    const Complex a3 = -0.5 * y0 + 1.5 * y1 - 1.5 * y2 + 0.5 * y3;
    return a0 + u * (a1 + u * (a2 + u * a3));
}

} // namespace

DrivingProtocol tabulated_protocol(const std::vector<double>& times,
                                   const std::vector<GeneratorSpec>& samples) {
    if (times.size() < 2 || times.size() != samples.size())
        fail(ErrorCode::ConfigInvalid,
             "tabulated_protocol: need >= 2 aligned time/sample pairs");
    const double dt = times[1] - times[0];
    if (!(dt > 0))
        fail(ErrorCode::ConfigInvalid, "tabulated_protocol: times must increase");
    for (size_t k = 1; k < times.size(); ++k)
        if (std::abs(times[k] - times[k - 1] - dt) > 1e-12 * std::abs(dt))
            fail(ErrorCode::ConfigInvalid, "tabulated_protocol: grid must be uniform");
    const int dim = samples.front().dim();
    const size_t jumps = samples.front().jumps.size();
    for (const auto& s : samples) {
        s.validate("tabulated_protocol");
        if (s.dim() != dim || s.jumps.size() != jumps)
            fail(ErrorCode::DimensionMismatch,
                 "tabulated_protocol: samples must share operator structure");
    }

    DrivingProtocol p;
    p.kind = ProtocolKind::tabulated;
    p.t_start = times.front();
    p.t_end = times.back();
    p.dim = dim;
    const size_t n = times.size();
    p.generator = [times, samples, dt, n, jumps, dim](double t) {
        double pos = (t - times.front()) / dt;
        int k1 = static_cast<int>(std::floor(pos));
        k1 = std::max(0, std::min(static_cast<int>(n) - 2, k1));
        const double u = pos - k1;
        const int k0 = std::max(0, k1 - 1);
        const int k2 = k1 + 1;
        const int k3 = std::min(static_cast<int>(n) - 1, k1 + 2);
        auto interp = [&](auto&& getter) {
            Operator out(dim, dim);
            for (int r = 0; r < dim; ++r)
                for (int c = 0; c < dim; ++c)
                    out(r, c) = catmull_rom(getter(k0)(r, c), getter(k1)(r, c),
                                            getter(k2)(r, c), getter(k3)(r, c), u);
            return out;
        };
        GeneratorSpec gen;
        gen.hamiltonian = interp([&](int k) -> const Operator& {
            return samples[static_cast<size_t>(k)].hamiltonian;
        });
        gen.hamiltonian = 0.5 * (gen.hamiltonian + gen.hamiltonian.adjoint()).eval();
        gen.jumps.resize(jumps);
        for (size_t j = 0; j < jumps; ++j) {
            gen.jumps[j].op = interp([&](int k) -> const Operator& {
                return samples[static_cast<size_t>(k)].jumps[j].op;
            });
            const double r = catmull_rom(samples[static_cast<size_t>(k0)].jumps[j].rate,
                                         samples[static_cast<size_t>(k1)].jumps[j].rate,
                                         samples[static_cast<size_t>(k2)].jumps[j].rate,
                                         samples[static_cast<size_t>(k3)].jumps[j].rate, u)
                                 .real();
            gen.jumps[j].rate = std::max(0.0, r);
        }
        return gen;
    };
    return p;
}

} // namespace tqd
