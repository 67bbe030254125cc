#include "stirap/model.hpp"

#include <cmath>

#include "stirap/errors.hpp"

namespace stirap {

double pulse_value(const PulseSpec& pulse, double t) {
    switch (pulse.shape) {
    case PulseShape::Gaussian: {
        const double u = (t - pulse.center) / pulse.width;
        return pulse.sign * pulse.amplitude * std::exp(-u * u);
    }
    case PulseShape::Constant:
        return pulse.sign * pulse.amplitude;
    }
    return 0.0;
}

BasisPtr SystemSpec::make_basis() const {
    return std::make_shared<ProductBasis>(modes, atoms);
}

bool SystemSpec::lossless() const {
    for (const auto& l : losses)
        if (l.gamma != 0.0)
            return false;
    return true;
}

void SystemSpec::validate() const {
    if (detunings.size() != atoms.size())
        throw ConfigError("SystemSpec: one detuning per atom required");
    for (const auto& c : couplings) {
        if (c.atom < 0 || c.atom >= static_cast<int>(atoms.size()))
            throw ConfigError("SystemSpec: coupling atom index out of range");
        if (c.mode < 0 || c.mode >= static_cast<int>(modes.size()))
            throw ConfigError("SystemSpec: coupling mode index out of range");
        transition_ground_level(atoms[static_cast<size_t>(c.atom)], c.transition);
        if (c.pulse.shape == PulseShape::Gaussian && !(c.pulse.width > 0.0))
            throw ConfigError("SystemSpec: gaussian pulse needs width > 0");
        if (!std::isfinite(c.pulse.amplitude))
            throw ConfigError("SystemSpec: pulse amplitude must be finite");
    }
    for (const auto& l : losses) {
        if (l.mode < 0 || l.mode >= static_cast<int>(modes.size()))
            throw ConfigError("SystemSpec: loss mode index out of range");
        if (l.gamma < 0.0)
            throw ConfigError("SystemSpec: negative loss rate");
    }
    for (double d : detunings)
        if (!std::isfinite(d))
            throw ConfigError("SystemSpec: detuning must be finite");
}

int transition_ground_level(AtomKind kind, Transition t) {
    switch (kind) {
    case AtomKind::TwoLevel:
    case AtomKind::WithSpectator:
        if (t != Transition::Minus)
            throw ConfigError("transition requires a two-ground-level atom");
        return 0;
    case AtomKind::TwoGroundLevels:
        if (t == Transition::MinusI)
            return 0;
        if (t == Transition::MinusII)
            return 1;
        throw ConfigError("two-ground-level atom: transition must be I or II");
    }
    throw ConfigError("unknown atom kind");
}

SparseRd coupling_operator(const SystemSpec& spec, int coupling, const ProductBasis& basis) {
    if (coupling < 0 || coupling >= static_cast<int>(spec.couplings.size()))
        throw std::invalid_argument("coupling_operator: index out of range");
    const CouplingSpec& c = spec.couplings[static_cast<size_t>(coupling)];
    const AtomKind kind = spec.atoms[static_cast<size_t>(c.atom)];
    const int ground = transition_ground_level(kind, c.transition);
    const int excited = excited_level(kind);
    const int atom_factor = basis.mode_count() + c.atom;
    const Index mode_stride = basis.factor_stride(c.mode);
    const Index atom_stride = basis.factor_stride(atom_factor);

    // a_m |+><g|: |..., n, ..., g> -> sqrt(n) |..., n-1, ..., +>
    std::vector<Eigen::Triplet<double>> trips;
    for (Index idx = 0; idx < basis.dim(); ++idx) {
        if (basis.digit(idx, atom_factor) != ground)
            continue;
        const int n = basis.digit(idx, c.mode);
        if (n == 0)
            continue;
        const Index dst = idx - mode_stride + (excited - ground) * atom_stride;
        const double v = std::sqrt(static_cast<double>(n));
        trips.emplace_back(dst, idx, v);
        trips.emplace_back(idx, dst, v); // h.c.
    }
    SparseRd op(basis.dim(), basis.dim());
    op.setFromTriplets(trips.begin(), trips.end());
    return op;
}

Eigen::MatrixXd build_hamiltonian(const SystemSpec& spec, double t, const ProductBasis& basis) {
    if (basis.mode_count() != static_cast<int>(spec.modes.size()) ||
        basis.atom_count() != static_cast<int>(spec.atoms.size()))
        throw std::invalid_argument("build_hamiltonian: basis does not match spec");
    Eigen::MatrixXd H = detuning_diagonal(spec, basis).asDiagonal();
    for (int k = 0; k < static_cast<int>(spec.couplings.size()); ++k) {
        const double g = pulse_value(spec.couplings[static_cast<size_t>(k)].pulse, t);
        if (g == 0.0)
            continue;
        H += g * Eigen::MatrixXd(coupling_operator(spec, k, basis));
    }
    return H;
}

Eigen::VectorXd detuning_diagonal(const SystemSpec& spec, const ProductBasis& basis) {
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(basis.dim());
    for (int a = 0; a < basis.atom_count(); ++a) {
        const double delta = spec.detunings[static_cast<size_t>(a)];
        if (delta == 0.0)
            continue;
        const int factor = basis.mode_count() + a;
        const int excited = excited_level(basis.atom(a));
        for (Index idx = 0; idx < basis.dim(); ++idx)
            if (basis.digit(idx, factor) == excited)
                diag[idx] += delta;
    }
    return diag;
}

Eigen::VectorXd loss_generator(const SystemSpec& spec, const ProductBasis& basis) {
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(basis.dim());
    for (const auto& l : spec.losses) {
        if (l.gamma < 0.0)
            throw ConfigError("loss_generator: negative loss rate");
        if (l.gamma == 0.0)
            continue;
        for (Index idx = 0; idx < basis.dim(); ++idx)
            diag[idx] += 0.5 * l.gamma * basis.digit(idx, l.mode);
    }
    return diag;
}

std::vector<Index> excitation_sector(const ProductBasis& basis, int N) {
    std::vector<Index> out;
    for (Index idx = 0; idx < basis.dim(); ++idx)
        if (basis.excitation(idx) == N)
            out.push_back(idx);
    return out;
}

} // namespace stirap
