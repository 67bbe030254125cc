#include "stirap/propagate.hpp"

#include <algorithm>
#include <cmath>

#include "stirap/errors.hpp"

namespace stirap {

IntegrationWindow default_window(const SystemSpec& spec, int samples, double tolerance,
                                 double pad) {
    double lo = 0.0, hi = 0.0;
    bool any = false;
    for (const auto& c : spec.couplings) {
        if (c.pulse.shape != PulseShape::Gaussian)
            continue;
        const double a = c.pulse.center - pad * c.pulse.width;
        const double b = c.pulse.center + pad * c.pulse.width;
        lo = any ? std::min(lo, a) : a;
        hi = any ? std::max(hi, b) : b;
        any = true;
    }
    if (!any)
        throw ConfigError("default_window: no gaussian pulses to size the window from");
    return {lo, hi, samples, tolerance};
}

Generator::Generator(SystemSpec spec, BasisPtr basis, Threads threads)
    : spec_(std::move(spec)), basis_(std::move(basis)), threads_(threads) {
    spec_.validate();
    kernel_ = build_kernel(spec_, *basis_);
}

Generator Generator::sector(int N) const {
    Generator out = *this;
    out.indices_ = excitation_sector(*basis_, N);
    if (out.indices_.empty())
        throw std::invalid_argument("Generator::sector: empty excitation sector");
    out.kernel_ = restrict_kernel(kernel_, out.indices_);
    return out;
}

void Generator::apply(double t, const Complex* x, Complex* y) const {
    eval_coefficients(spec_, t, coeffs_);
    const bool parallel = threads_ == Threads::Parallel ||
                          (threads_ == Threads::Auto && kernel_.dim >= 512);
    if (parallel)
        apply_parallel(kernel_, coeffs_, x, y);
    else
        apply_serial(kernel_, coeffs_, x, y);
}

Eigen::MatrixXd Generator::hamiltonian(double t) const {
    eval_coefficients(spec_, t, coeffs_);
    return dense_h(kernel_, coeffs_);
}

MatrixXc Generator::generator_matrix(double t) const {
    eval_coefficients(spec_, t, coeffs_);
    return dense_generator(kernel_, coeffs_);
}

VectorXc Generator::restrict_state(const VectorXc& full) const {
    if (!restricted())
        return full;
    VectorXc out(static_cast<Index>(indices_.size()));
    for (size_t i = 0; i < indices_.size(); ++i)
        out[static_cast<Index>(i)] = full[indices_[i]];
    return out;
}

VectorXc Generator::prolong_state(const VectorXc& reduced) const {
    if (!restricted())
        return reduced;
    VectorXc out = VectorXc::Zero(basis_->dim());
    for (size_t i = 0; i < indices_.size(); ++i)
        out[indices_[i]] = reduced[static_cast<Index>(i)];
    return out;
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double A21 = 1.0 / 5;
constexpr double A31 = 3.0 / 40, A32 = 9.0 / 40;
constexpr double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9;
constexpr double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561,
                 A54 = -212.0 / 729;
constexpr double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247,
                 A64 = 49.0 / 176, A65 = -5103.0 / 18656;
constexpr double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192,
                 B5 = -2187.0 / 6784, B6 = 11.0 / 84;
constexpr double E1 = 71.0 / 57600, E3 = -71.0 / 16695, E4 = 71.0 / 1920,
                 E5 = -17253.0 / 339200, E6 = 22.0 / 525, E7 = -1.0 / 40;
constexpr double C2 = 1.0 / 5, C3 = 3.0 / 10, C4 = 4.0 / 5, C5 = 8.0 / 9;

} // namespace

Trajectory integrate(const Generator& gen, const IntegrationWindow& window,
                     const VectorXc& psi0, double norm_tol) {
    if (window.samples < 2)
        throw ConfigError("integrate: need at least 2 samples");
    if (!(window.t_start < window.t_end))
        throw ConfigError("integrate: t_start must precede t_end");
    if (psi0.size() != gen.dim())
        throw std::invalid_argument("integrate: state dimension mismatch");
    const Index n = gen.dim();
    const double span = window.t_end - window.t_start;
    const double tol = window.tolerance;
    const bool check_norm = gen.lossless();

    Trajectory traj;
    traj.times = Eigen::VectorXd::LinSpaced(window.samples, window.t_start, window.t_end);
    traj.states.reserve(static_cast<size_t>(window.samples));
    traj.norms.resize(window.samples);

    VectorXc y = psi0, ynew(n), yerr(n);
    VectorXc k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n);
    double t = window.t_start;
    gen.apply(t, y.data(), k1.data());
    traj.stats.rhs_evals++;

    auto record = [&](int s) {
        traj.states.push_back(y);
        const double nrm = y.norm();
        traj.norms[s] = nrm;
        if (check_norm && std::abs(nrm - 1.0) > norm_tol)
            throw NumericalError("integrate: norm drift " + std::to_string(nrm - 1.0) +
                                 " in lossless run (integrator failure)");
        if (!check_norm && !std::isfinite(nrm))
            throw NumericalError("integrate: non-finite state");
    };
    record(0);

    double h = span / (window.samples - 1) / 8.0; // conservative start; adapts quickly
    const double h_min = span * 1e-15;
    int next_sample = 1;
    VectorXc tmp(n);

    while (next_sample < window.samples) {
        const double t_target = traj.times[next_sample];
        bool clipped = false;
        if (t + h >= t_target) {
            h = t_target - t;
            clipped = true;
        }
        if (h < h_min)
            throw NumericalError("integrate: step size underflow at t=" + std::to_string(t));

        // stages (FSAL: k1 is the derivative at (t, y))
        tmp = y + h * (A21 * k1);
        gen.apply(t + C2 * h, tmp.data(), k2.data());
        tmp = y + h * (A31 * k1 + A32 * k2);
        gen.apply(t + C3 * h, tmp.data(), k3.data());
        tmp = y + h * (A41 * k1 + A42 * k2 + A43 * k3);
        gen.apply(t + C4 * h, tmp.data(), k4.data());
        tmp = y + h * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4);
        gen.apply(t + C5 * h, tmp.data(), k5.data());
        tmp = y + h * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5);
        gen.apply(t + h, tmp.data(), k6.data());
        ynew = y + h * (B1 * k1 + B3 * k3 + B4 * k4 + B5 * k5 + B6 * k6);
        gen.apply(t + h, ynew.data(), k7.data());
        traj.stats.rhs_evals += 6;

        yerr = h * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7);
        double err2 = 0.0;
        for (Index i = 0; i < n; ++i) {
            const double scale = tol + tol * std::max(std::abs(ynew[i]), std::abs(y[i]));
            const double e = std::abs(yerr[i]) / scale;
            err2 += e * e;
        }
        const double err = std::sqrt(err2 / static_cast<double>(n));

        if (err <= 1.0) {
            t = clipped ? t_target : t + h;
            y.swap(ynew);
            k1.swap(k7);
            traj.stats.accepted++;
            if (clipped) {
                record(next_sample);
                ++next_sample;
            }
        } else {
            traj.stats.rejected++;
        }
        const double factor =
            std::clamp(0.9 * std::pow(std::max(err, 1e-10), -0.2), 0.2, 5.0);
        h = std::min(h * factor, span);
    }
    return traj;
}

PopulationTable populations(const Trajectory& traj, const Generator& gen,
                            std::span<const Index> watch_full_indices) {
    const ProductBasis& basis = *gen.basis();
    PopulationTable table;
    table.times = traj.times;
    const int s = static_cast<int>(traj.states.size());

    std::vector<Index> local;
    for (Index full : watch_full_indices) {
        if (full < 0 || full >= basis.dim())
            throw std::invalid_argument("populations: unknown basis label");
        if (gen.restricted()) {
            const auto& idx = gen.indices();
            const auto it = std::find(idx.begin(), idx.end(), full);
            if (it == idx.end())
                throw std::invalid_argument("populations: label outside the propagated sector");
            local.push_back(static_cast<Index>(it - idx.begin()));
        } else {
            local.push_back(full);
        }
        table.labels.push_back(basis.label_string(full));
    }

    table.values.resize(s, static_cast<Index>(local.size()));
    for (int r = 0; r < s; ++r)
        for (size_t c = 0; c < local.size(); ++c)
            table.values(r, static_cast<Index>(c)) =
                std::norm(traj.states[static_cast<size_t>(r)][local[c]]);

    if (!gen.restricted()) {
        table.mode_numbers.resize(s, basis.mode_count());
        for (int r = 0; r < s; ++r) {
            StateVector sv{gen.basis(), traj.states[static_cast<size_t>(r)]};
            table.mode_numbers.row(r) = mode_number_expectations(sv).transpose();
        }
    }
    return table;
}

double fidelity(const VectorXc& state, const VectorXc& target) {
    if (state.size() != target.size())
        throw std::invalid_argument("fidelity: dimension mismatch");
    return std::abs(target.dot(state));
}

double fidelity(const StateVector& state, const StateVector& target) {
    return std::abs(inner_product(target, state));
}

AdiabaticityReport adiabaticity_report(const Generator& gen, const IntegrationWindow& window,
                                       int grid) {
    AdiabaticityReport report;
    const SystemSpec& spec = gen.spec();
    for (size_t k = 0; k < spec.couplings.size(); ++k) {
        const auto& c = spec.couplings[k];
        PulseDiagnostic d;
        d.name = c.name.empty() ? "g" + std::to_string(k) : c.name;
        d.amplitude = std::abs(c.pulse.amplitude);
        if (c.pulse.shape == PulseShape::Gaussian) {
            d.width = c.pulse.width;
            d.adiabaticity = std::abs(c.pulse.amplitude) * c.pulse.width;
        }
        report.pulses.push_back(std::move(d));
    }

    double scale = 0.0;
    for (const auto& c : spec.couplings)
        scale = std::max(scale, std::abs(c.pulse.amplitude));
    Eigen::VectorXd coeffs;
    double min_gap = 0.0;
    bool seen = false;
    for (int i = 0; i < grid; ++i) {
        const double t =
            window.t_start + (window.t_end - window.t_start) * i / (grid - 1);
        eval_coefficients(spec, t, coeffs);
        if (coeffs.cwiseAbs().maxCoeff() <= 1e-12 * std::max(scale, 1.0))
            continue; // couplings off, no active block
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gen.hamiltonian(t),
                                                          Eigen::EigenvaluesOnly);
        // smallest nonzero |eigenvalue|: drop the dark eigenvalue(s) near zero
        Eigen::VectorXd mags = es.eigenvalues().cwiseAbs();
        std::sort(mags.data(), mags.data() + mags.size());
        const double floor = 1e-9 * std::max(scale, 1.0);
        for (Index j = 0; j < mags.size(); ++j) {
            if (mags[j] > floor) {
                min_gap = seen ? std::min(min_gap, mags[j]) : mags[j];
                seen = true;
                break;
            }
        }
    }
    if (seen)
        report.min_gap = min_gap;
    return report;
}

void add_bridge_ratio(AdiabaticityReport& report, const SystemSpec& spec,
                      const IntegrationWindow& window, const HConfigRoles& roles,
                      int grid) {
    const auto pulse = [&](int k) {
        return spec.couplings[static_cast<size_t>(k)].pulse;
    };
    double best = 0.0;
    for (int i = 0; i < grid; ++i) {
        const double t =
            window.t_start + (window.t_end - window.t_start) * i / (grid - 1);
        const double g1a = pulse_value(pulse(roles.g1a), t);
        const double g2a = pulse_value(pulse(roles.g2a), t);
        const double g1b = pulse_value(pulse(roles.g1b), t);
        const double g3b = pulse_value(pulse(roles.g3b), t);
        const double denom = g1a * g1a * g3b * g3b + g1b * g1b * g2a * g2a;
        if (denom <= 0.0)
            continue;
        best = std::max(best, g2a * g2a * g3b * g3b / denom);
    }
    report.bridge_ratio_max = best;
}

} // namespace stirap
