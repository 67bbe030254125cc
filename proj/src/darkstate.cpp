#include "stirap/darkstate.hpp"

#include <cmath>

#include "stirap/errors.hpp"

namespace stirap {

AdiabaticCoefficients two_mode_dark(double g1, double g2) {
    const double k2 = g1 * g1 + g2 * g2;
    if (k2 <= 0.0)
        throw std::invalid_argument("two_mode_dark: both couplings zero, dark state undefined");
    const double K = 1.0 / std::sqrt(k2);
    VectorXc c(2);
    c << K * g2, -K * g1;
    return {c, +1.0};
}

Eigen::VectorXd h_config_dark(double g1a, double g2a, double g1b, double g3b) {
    Eigen::VectorXd v(5);
    v << g1a * g3b, 0.0, -g2a * g3b, 0.0, g1b * g2a;
    const double n = v.norm();
    if (n <= 0.0)
        throw std::invalid_argument("h_config_dark: all coupling products zero");
    return v / n;
}

AdiabaticCoefficients h_config_adiabatic(double g1a, double g2a, double g1b, double g3b) {
    VectorXc c(3);
    c << -g2a * g3b, g1a * g3b, g1b * g2a;
    const double n = c.norm();
    if (n <= 0.0)
        throw std::invalid_argument("h_config_adiabatic: all coupling products zero");
    return {c / n, +1.0};
}

Eigen::VectorXd star_dark(double g_Ma, double g_a, int M) {
    if (M < 2)
        throw std::invalid_argument("star_dark: need M >= 2");
    if (g_Ma == 0.0 && g_a == 0.0)
        throw std::invalid_argument("star_dark: both couplings zero");
    Eigen::VectorXd v = Eigen::VectorXd::Zero(M + 1);
    for (int i = 0; i < M - 1; ++i)
        v[i] = -g_Ma;
    v[M - 1] = (M - 1) * g_a;
    return v / v.norm();
}

Eigen::VectorXd star_dark_perturbed(double g_Ma, double g_a, int M,
                                    std::span<const int> blocked) {
    if (M < 2)
        throw std::invalid_argument("star_dark_perturbed: need M >= 2");
    std::vector<bool> is_blocked(static_cast<size_t>(M - 1), false);
    for (int j : blocked) {
        if (j < 0 || j >= M - 1)
            throw std::invalid_argument("star_dark_perturbed: blocked cavity out of range");
        is_blocked[static_cast<size_t>(j)] = true;
    }
    const int open = M - 1 - static_cast<int>(blocked.size());
    Eigen::VectorXd v = Eigen::VectorXd::Zero(M + 1 + static_cast<int>(blocked.size()));
    for (int i = 0; i < M - 1; ++i)
        if (!is_blocked[static_cast<size_t>(i)])
            v[i] = -g_Ma;
    v[M - 1] = open * g_a;
    const double n = v.norm();
    if (n <= 0.0)
        throw std::invalid_argument("star_dark_perturbed: degenerate couplings");
    return v / n;
}

AdiabaticCoefficients star_adiabatic(double g_Ma, double g_a, int M) {
    const Eigen::VectorXd v = star_dark(g_Ma, g_a, M);
    return {v.head(M).cast<Complex>(), +1.0};
}

double commutator_residual(double g1, double g2, int n_max) {
    const double k2 = g1 * g1 + g2 * g2;
    if (k2 <= 0.0)
        throw std::invalid_argument("commutator_residual: both couplings zero");
    const double K = 1.0 / std::sqrt(k2);
    ProductBasis basis({ModeSpace{n_max}, ModeSpace{n_max}}, {});
    const SparseRd a1 = mode_lowering(basis, 0);
    const SparseRd a2 = mode_lowering(basis, 1);
    // B = K(g1 a1 + g2 a2), A† = K(g2 a1† - g1 a2†)
    const SparseRd B = K * (g1 * a1 + g2 * a2);
    const SparseRd Ad = K * (g2 * SparseRd(a1.transpose()) - g1 * SparseRd(a2.transpose()));
    const Eigen::MatrixXd C = Eigen::MatrixXd(B * Ad) - Eigen::MatrixXd(Ad * B);
    double residual = 0.0;
    for (Index r = 0; r < basis.dim(); ++r) {
        if (basis.digit(r, 0) == n_max || basis.digit(r, 1) == n_max)
            continue;
        for (Index c = 0; c < basis.dim(); ++c) {
            if (basis.digit(c, 0) == n_max || basis.digit(c, 1) == n_max)
                continue;
            residual = std::max(residual, std::abs(C(r, c)));
        }
    }
    return residual;
}

StateVector apply_adiabatic_function(const AdiabaticCoefficients& op,
                                     const VectorXc& fock_coeffs, BasisPtr basis) {
    const ProductBasis& b = *basis;
    if (op.coeffs.size() != b.mode_count())
        throw std::invalid_argument("apply_adiabatic_function: one coefficient per mode");
    const int n_top = static_cast<int>(fock_coeffs.size()) - 1;
    for (int m = 0; m < b.mode_count(); ++m)
        if (op.coeffs[m] != 0.0 && n_top > b.mode(m).n_max)
            throw TruncationError("apply_adiabatic_function: cutoff too small for f support");

    // ground product state
    VectorXc vac = VectorXc::Zero(b.dim());
    std::vector<int> ground(static_cast<size_t>(b.factor_count()), 0);
    vac[b.index_of(ground)] = 1.0;

    // accumulate sum_n f_n (A†)^n / sqrt(n!) |0>
    std::vector<SparseRd> creators;
    for (int m = 0; m < b.mode_count(); ++m)
        creators.push_back(SparseRd(mode_lowering(b, m).transpose()));
    VectorXc power = vac; // (A†)^n/sqrt(n!)|0>, normalized at every n
    VectorXc out = fock_coeffs[0] * vac;
    for (int n = 1; n <= n_top; ++n) {
        VectorXc next = VectorXc::Zero(b.dim());
        for (int m = 0; m < b.mode_count(); ++m)
            if (op.coeffs[m] != 0.0)
                next += op.coeffs[m] * (creators[static_cast<size_t>(m)] * power);
        power = next / std::sqrt(static_cast<double>(n));
        out += fock_coeffs[n] * power;
    }
    return {std::move(basis), std::move(out)};
}

double align_gauge(const Eigen::VectorXd& previous, Eigen::VectorXd& current) {
    if (previous.dot(current) < 0.0) {
        current = -current;
        return -1.0;
    }
    return +1.0;
}

namespace {

StateVector embed_modes(BasisPtr basis, const std::vector<VectorXc>& mode_amps) {
    const ProductBasis& b = *basis;
    std::vector<VectorXc> atoms;
    for (int a = 0; a < b.atom_count(); ++a)
        atoms.push_back(level_amplitudes(0, atom_dim(b.atom(a))));
    return product_state(std::move(basis), mode_amps, atoms);
}

std::vector<VectorXc> vacuum_modes(const ProductBasis& b) {
    std::vector<VectorXc> out;
    for (int m = 0; m < b.mode_count(); ++m)
        out.push_back(fock_amplitudes(0, b.mode(m)));
    return out;
}

void normalize(StateVector& s) {
    const double n = s.norm();
    if (n <= 0.0)
        throw std::invalid_argument("target state has zero norm");
    s.amps /= n;
}

} // namespace

StateVector target_epr(BasisPtr basis, int mode_i, int mode_j, int sign) {
    const ProductBasis& b = *basis;
    auto modes = vacuum_modes(b);
    auto m01 = modes, m10 = modes;
    m01[static_cast<size_t>(mode_j)] = fock_amplitudes(1, b.mode(mode_j));
    m10[static_cast<size_t>(mode_i)] = fock_amplitudes(1, b.mode(mode_i));
    StateVector out = embed_modes(basis, m01);
    out.amps += static_cast<double>(sign) * embed_modes(basis, m10).amps;
    normalize(out);
    return out;
}

StateVector target_w(BasisPtr basis, std::span<const int> modes) {
    const ProductBasis& b = *basis;
    StateVector out{basis, VectorXc::Zero(b.dim())};
    for (int m : modes) {
        auto amps = vacuum_modes(b);
        amps[static_cast<size_t>(m)] = fock_amplitudes(1, b.mode(m));
        out.amps += embed_modes(basis, amps).amps;
    }
    normalize(out);
    return out;
}

StateVector target_multinomial(BasisPtr basis, const AdiabaticCoefficients& op, int n) {
    VectorXc f = VectorXc::Zero(n + 1);
    f[n] = 1.0;
    return apply_adiabatic_function(op, f, std::move(basis));
}

StateVector target_cat(BasisPtr basis, int mode, Complex alpha, int sign) {
    const ProductBasis& b = *basis;
    auto plus = vacuum_modes(b), minus = vacuum_modes(b);
    plus[static_cast<size_t>(mode)] = coherent_state(alpha, b.mode(mode)).amps;
    minus[static_cast<size_t>(mode)] = coherent_state(-alpha, b.mode(mode)).amps;
    StateVector out = embed_modes(basis, plus);
    out.amps += static_cast<double>(sign) * embed_modes(basis, minus).amps;
    normalize(out);
    return out;
}

StateVector target_entangled_cat(BasisPtr basis, int mode_i, int mode_j, Complex beta,
                                 int parity) {
    const ProductBasis& b = *basis;
    auto first = vacuum_modes(b), second = vacuum_modes(b);
    first[static_cast<size_t>(mode_i)] = coherent_state(-beta, b.mode(mode_i)).amps;
    first[static_cast<size_t>(mode_j)] = coherent_state(beta, b.mode(mode_j)).amps;
    second[static_cast<size_t>(mode_i)] = coherent_state(beta, b.mode(mode_i)).amps;
    second[static_cast<size_t>(mode_j)] = coherent_state(-beta, b.mode(mode_j)).amps;
    StateVector out = embed_modes(basis, first);
    const double s = (parity % 2 == 0) ? 1.0 : -1.0;
    out.amps += s * embed_modes(basis, second).amps;
    normalize(out);
    return out;
}

StateVector target_psi_ij(BasisPtr basis, Complex alpha, int i, int j) {
    const ProductBasis& b = *basis;
    if (b.mode_count() != 3)
        throw std::invalid_argument("target_psi_ij: three modes required");
    const double si = (i % 2 == 0) ? 1.0 : -1.0;
    const double sj = (j % 2 == 0) ? 1.0 : -1.0;
    auto first = vacuum_modes(b), mid = vacuum_modes(b), last = vacuum_modes(b);
    first[0] = coherent_state(-alpha, b.mode(0)).amps;
    mid[1] = coherent_state(alpha, b.mode(1)).amps;
    last[2] = coherent_state(alpha, b.mode(2)).amps;
    StateVector out = embed_modes(basis, first);
    out.amps *= sj;
    out.amps += (si + si * sj) * embed_modes(basis, mid).amps;
    out.amps += embed_modes(basis, last).amps;
    normalize(out);
    return out;
}

} // namespace stirap
