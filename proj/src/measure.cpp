#include "stirap/measure.hpp"

#include <cmath>

#include "stirap/errors.hpp"

namespace stirap {

namespace {
constexpr double kDegenerate = 1e-14;

BasisPtr drop_atom(const ProductBasis& basis, int atom) {
    std::vector<ModeSpace> modes;
    for (int m = 0; m < basis.mode_count(); ++m)
        modes.push_back(basis.mode(m));
    std::vector<AtomKind> atoms;
    for (int a = 0; a < basis.atom_count(); ++a)
        if (a != atom)
            atoms.push_back(basis.atom(a));
    return std::make_shared<ProductBasis>(std::move(modes), std::move(atoms));
}
} // namespace

AtomBasisVector chi_basis_vector(int atom, int sign) {
    VectorXc v(3);
    const double r = 1.0 / std::sqrt(2.0);
    v << r, 0.0, sign >= 0 ? r : -r; // levels (-, +, q)
    return {atom, v, sign >= 0 ? "chi+" : "chi-"};
}

AtomBasisVector ground_pair_basis_vector(int atom, int sign) {
    VectorXc v(3);
    const double r = 1.0 / std::sqrt(2.0);
    v << r, sign >= 0 ? r : -r, 0.0; // levels (I, II, +)
    return {atom, v, sign >= 0 ? "psi+" : "psi-"};
}

AtomBasisVector level_basis_vector(int atom, AtomKind kind, int level) {
    VectorXc v = VectorXc::Zero(atom_dim(kind));
    v[level] = 1.0;
    return {atom, v, level_name(kind, level)};
}

MeasurementBranch project_atom(const StateVector& state, const AtomBasisVector& b,
                               bool remove_atom) {
    const ProductBasis& basis = *state.basis;
    if (b.atom < 0 || b.atom >= basis.atom_count())
        throw std::invalid_argument("project_atom: atom index out of range");
    const int factor = basis.mode_count() + b.atom;
    const int d = basis.factor_dim(factor);
    if (b.amplitudes.size() != d)
        throw std::invalid_argument("project_atom: basis vector dimension mismatch");
    if (std::abs(b.amplitudes.norm() - 1.0) > 1e-10)
        throw std::invalid_argument("project_atom: basis vector not normalized");

    const Index stride = basis.factor_stride(factor);
    BasisPtr reduced_basis = drop_atom(basis, b.atom);
    VectorXc reduced = VectorXc::Zero(reduced_basis->dim());
    // contract <b| over the measured atom; remaining factors keep their order
    Index out = 0;
    for (Index blk = 0; blk < basis.dim(); blk += stride * d)
        for (Index off = 0; off < stride; ++off, ++out) {
            Complex acc = 0.0;
            for (int l = 0; l < d; ++l)
                acc += std::conj(b.amplitudes[l]) * state.amps[blk + off + stride * l];
            reduced[out] = acc;
        }

    MeasurementBranch branch;
    branch.outcome = b.label;
    branch.probability = reduced.squaredNorm();
    if (branch.probability < kDegenerate) {
        branch.degenerate = true;
        branch.post_state = {reduced_basis, VectorXc::Zero(reduced_basis->dim())};
        return branch;
    }
    reduced /= std::sqrt(branch.probability);
    if (remove_atom) {
        branch.post_state = {std::move(reduced_basis), std::move(reduced)};
    } else {
        VectorXc kept = VectorXc::Zero(basis.dim());
        Index in = 0;
        for (Index blk = 0; blk < basis.dim(); blk += stride * d)
            for (Index off = 0; off < stride; ++off, ++in)
                for (int l = 0; l < d; ++l)
                    kept[blk + off + stride * l] = b.amplitudes[l] * reduced[in];
        branch.post_state = {state.basis, std::move(kept)};
    }
    return branch;
}

std::vector<MeasurementBranch> branch_all(const StateVector& state, int atom,
                                          std::span<const AtomBasisVector> basis,
                                          bool remove_atom, const std::string& rest) {
    if (basis.empty())
        throw std::invalid_argument("branch_all: empty basis");
    for (size_t i = 0; i < basis.size(); ++i) {
        if (basis[i].atom != atom)
            throw std::invalid_argument("branch_all: basis vector for a different atom");
        for (size_t j = i + 1; j < basis.size(); ++j)
            if (std::abs(basis[i].amplitudes.dot(basis[j].amplitudes)) > 1e-10)
                throw std::invalid_argument("branch_all: basis not orthonormal");
    }
    std::vector<MeasurementBranch> branches;
    double covered = 0.0;
    for (const auto& b : basis) {
        branches.push_back(project_atom(state, b, remove_atom));
        covered += branches.back().probability;
    }
    MeasurementBranch remainder;
    remainder.outcome = rest;
    remainder.probability = std::max(0.0, state.amps.squaredNorm() - covered);
    remainder.degenerate = true;
    branches.push_back(std::move(remainder));
    return branches;
}

StateVector reassemble_branches(std::span<const MeasurementBranch> branches,
                                std::span<const AtomBasisVector> basis,
                                const StateVector& reference) {
    const ProductBasis& full = *reference.basis;
    StateVector out{reference.basis, VectorXc::Zero(full.dim())};
    for (size_t k = 0; k < basis.size(); ++k) {
        const auto& branch = branches[k];
        if (branch.degenerate)
            continue;
        const int factor = full.mode_count() + basis[k].atom;
        const Index stride = full.factor_stride(factor);
        const int d = full.factor_dim(factor);
        const double w = std::sqrt(branch.probability);
        Index in = 0;
        for (Index blk = 0; blk < full.dim(); blk += stride * d)
            for (Index off = 0; off < stride; ++off, ++in)
                for (int l = 0; l < d; ++l)
                    out.amps[blk + off + stride * l] +=
                        w * basis[k].amplitudes[l] * branch.post_state.amps[in];
    }
    return out;
}

} // namespace stirap
