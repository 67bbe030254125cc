#pragma once

#include <span>
#include <string>
#include <vector>

#include "stirap/fock.hpp"

namespace stirap {

/// Measurement vector on one atom's level space. Protocol bases live in the
/// ground manifold (zero amplitude on the excited level).
struct AtomBasisVector {
    int atom = 0;
    VectorXc amplitudes; // length = atom dimension, normalized
    std::string label;
};

/// chi_pm = (|-> pm |q>)/sqrt(2) on a WithSpectator atom.
AtomBasisVector chi_basis_vector(int atom, int sign);
/// (|->_I pm |->_II)/sqrt(2) on a TwoGroundLevels atom.
AtomBasisVector ground_pair_basis_vector(int atom, int sign);
/// Single-level projector vector.
AtomBasisVector level_basis_vector(int atom, AtomKind kind, int level);

struct MeasurementBranch {
    std::string outcome;
    double probability = 0.0;
    StateVector post_state; // normalized; meaningless when degenerate
    bool degenerate = false; // probability ~ 0, post state undefined
};

/// Projects one atom onto `b`. The measured atom is factored out of the
/// post-state basis when remove_atom is set (it no longer interacts);
/// otherwise it stays, collapsed to `b`.
MeasurementBranch project_atom(const StateVector& state, const AtomBasisVector& b,
                               bool remove_atom = true);

/// All branches for an orthonormal set on the measured atom, plus a final
/// remainder branch ("label `rest`") carrying whatever probability the set
/// does not cover (e.g. nonadiabatic excited-state leakage). Probabilities
/// over the returned list sum to 1 up to roundoff.
std::vector<MeasurementBranch> branch_all(const StateVector& state, int atom,
                                          std::span<const AtomBasisVector> basis,
                                          bool remove_atom = true,
                                          const std::string& rest = "leak");

/// Test helper: sum_b sqrt(p_b) |post_b> (x) |b>, phases retained, which must
/// reconstruct the pre-measurement state for a complete basis.
StateVector reassemble_branches(std::span<const MeasurementBranch> branches,
                                std::span<const AtomBasisVector> basis,
                                const StateVector& reference);

} // namespace stirap
