#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "stirap/measure.hpp"
#include "test_util.hpp"

using namespace stirap;
using test_util::uniform;

namespace {

BasisPtr three_mode_spectator(int n_max = 14) {
    return std::make_shared<ProductBasis>(std::vector<ModeSpace>(3, ModeSpace{n_max}),
                                          std::vector<AtomKind>{AtomKind::WithSpectator});
}

/// (|-a,0,0>|-> + |0,a,0>|q>)/sqrt(2) — the pre-measurement protocol state.
StateVector entangled_state(BasisPtr basis, double alpha) {
    auto vac = fock_amplitudes(0, basis->mode(0));
    StateVector first = product_state(
        basis, {coherent_state(-alpha, basis->mode(0), 1.0).amps, vac, vac},
        {level_amplitudes(0, 3)});
    StateVector second = product_state(
        basis, {vac, coherent_state(alpha, basis->mode(1), 1.0).amps, vac},
        {level_amplitudes(2, 3)});
    StateVector out{basis, (first.amps + second.amps) / std::sqrt(2.0)};
    return out;
}

} // namespace

TEST_CASE("product state measured in its own level basis") {
    auto basis = three_mode_spectator(4);
    StateVector psi = product_state(
        basis,
        {coherent_state(0.5, basis->mode(0), 1e-3).amps, fock_amplitudes(1, basis->mode(1)),
         fock_amplitudes(0, basis->mode(2))},
        {level_amplitudes(0, 3)});
    const auto minus = level_basis_vector(0, AtomKind::WithSpectator, 0);
    const auto branch = project_atom(psi, minus);
    CHECK(branch.probability == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_FALSE(branch.degenerate);
    // post state is the bare field
    StateVector field = product_state(
        branch.post_state.basis,
        {coherent_state(0.5, basis->mode(0), 1e-3).amps, fock_amplitudes(1, basis->mode(1)),
         fock_amplitudes(0, basis->mode(2))},
        {});
    CHECK((branch.post_state.amps - field.amps).norm() < 1e-12);

    const auto q = level_basis_vector(0, AtomKind::WithSpectator, 2);
    CHECK(project_atom(psi, q).probability == doctest::Approx(0.0));
    CHECK(project_atom(psi, q).degenerate);
}

TEST_CASE("chi branches of the entangled protocol state") {
    const double alpha = 1.0;
    auto basis = three_mode_spectator();
    const StateVector psi = entangled_state(basis, alpha);
    const double e = std::exp(-alpha * alpha);

    const auto plus = project_atom(psi, chi_basis_vector(0, +1));
    const auto minus = project_atom(psi, chi_basis_vector(0, -1));
    CHECK(plus.probability == doctest::Approx((1.0 + e) / 2.0).epsilon(1e-9));
    CHECK(minus.probability == doctest::Approx((1.0 - e) / 2.0).epsilon(1e-9));

    // post states proportional to |-a,0,0> +- |0,a,0>
    for (int sign : {+1, -1}) {
        const auto& branch = sign > 0 ? plus : minus;
        auto vac = fock_amplitudes(0, basis->mode(0));
        StateVector a = product_state(
            branch.post_state.basis,
            {coherent_state(-alpha, basis->mode(0), 1.0).amps, vac, vac}, {});
        StateVector b = product_state(
            branch.post_state.basis,
            {vac, coherent_state(alpha, basis->mode(1), 1.0).amps, vac}, {});
        StateVector expect{branch.post_state.basis, a.amps + sign * b.amps};
        expect.amps /= expect.norm();
        CHECK(std::abs(std::abs(inner_product(expect, branch.post_state)) - 1.0) < 1e-10);
    }
}

TEST_CASE("alpha = 0 makes the minus branch degenerate") {
    auto basis = three_mode_spectator(4);
    const StateVector psi = entangled_state(basis, 0.0);
    const auto plus = project_atom(psi, chi_basis_vector(0, +1));
    const auto minus = project_atom(psi, chi_basis_vector(0, -1));
    CHECK(plus.probability == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(minus.probability == doctest::Approx(0.0));
    CHECK(minus.degenerate);
}

TEST_CASE("branch_all: completeness, reconstruction, and remainder") {
    auto basis = three_mode_spectator(6);
    // random state across the ground manifold only
    StateVector psi{basis, VectorXc::Zero(basis->dim())};
    for (Index i = 0; i < basis->dim(); ++i)
        if (basis->digit(i, 3) != 1)
            psi.amps[i] = Complex(uniform(-1.0, 1.0), uniform(-1.0, 1.0));
    psi.amps /= psi.norm();

    const AtomBasisVector chis[] = {chi_basis_vector(0, +1), chi_basis_vector(0, -1)};
    const auto branches = branch_all(psi, 0, chis);
    REQUIRE(branches.size() == 3);
    double total = 0.0;
    for (const auto& b : branches)
        total += b.probability;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(branches[2].probability < 1e-12); // no excited amplitude to leak

    const StateVector rebuilt =
        reassemble_branches(std::span(branches).first(2), chis, psi);
    CHECK((rebuilt.amps - psi.amps).norm() < 1e-10);
}

TEST_CASE("remainder branch carries the excited leakage") {
    auto basis = three_mode_spectator(3);
    StateVector psi = product_state(
        basis,
        {fock_amplitudes(0, basis->mode(0)), fock_amplitudes(0, basis->mode(1)),
         fock_amplitudes(0, basis->mode(2))},
        {level_amplitudes(0, 3)});
    // mix in a small excited component
    StateVector exc = product_state(
        basis,
        {fock_amplitudes(1, basis->mode(0)), fock_amplitudes(0, basis->mode(1)),
         fock_amplitudes(0, basis->mode(2))},
        {level_amplitudes(1, 3)});
    const double eps = 1e-4;
    psi.amps = std::sqrt(1.0 - eps) * psi.amps + std::sqrt(eps) * exc.amps;
    const AtomBasisVector chis[] = {chi_basis_vector(0, +1), chi_basis_vector(0, -1)};
    const auto branches = branch_all(psi, 0, chis);
    CHECK(branches[2].probability == doctest::Approx(eps).epsilon(1e-9));
}

TEST_CASE("branch probabilities ignore a global phase") {
    auto basis = three_mode_spectator(6);
    const StateVector psi = entangled_state(basis, 0.8);
    StateVector rotated{basis, std::exp(Complex(0.0, 1.234)) * psi.amps};
    const auto a = project_atom(psi, chi_basis_vector(0, +1));
    const auto b = project_atom(rotated, chi_basis_vector(0, +1));
    CHECK(a.probability == doctest::Approx(b.probability).epsilon(1e-15));
}

TEST_CASE("measuring a spectator atom leaves field marginals unchanged") {
    auto basis = std::make_shared<ProductBasis>(
        std::vector<ModeSpace>{ModeSpace{4}},
        std::vector<AtomKind>{AtomKind::WithSpectator});
    StateVector psi = product_state(basis, {coherent_state(0.7, basis->mode(0), 1e-2).amps},
                                    {chi_basis_vector(0, +1).amplitudes});
    const auto nbar = mode_number_expectations(psi);
    const AtomBasisVector chis[] = {chi_basis_vector(0, +1), chi_basis_vector(0, -1)};
    const auto branches = branch_all(psi, 0, chis);
    double weighted = 0.0;
    for (const auto& b : branches)
        if (!b.degenerate)
            weighted += b.probability * mode_number_expectations(b.post_state)[0];
    CHECK(weighted == doctest::Approx(nbar[0]).epsilon(1e-12));
}

TEST_CASE("non-orthonormal bases are rejected") {
    auto basis = three_mode_spectator(2);
    const StateVector psi = entangled_state(basis, 0.3);
    const AtomBasisVector bad[] = {chi_basis_vector(0, +1), chi_basis_vector(0, +1)};
    CHECK_THROWS_AS(branch_all(psi, 0, bad), std::invalid_argument);
}

TEST_CASE("collapse can keep the measured atom in place") {
    auto basis = three_mode_spectator(4);
    const StateVector psi = entangled_state(basis, 0.9);
    const auto kept = project_atom(psi, chi_basis_vector(0, +1), false);
    CHECK(kept.post_state.basis->same_shape(*basis));
    CHECK(std::abs(kept.post_state.norm() - 1.0) < 1e-12);
    // the atom factor is exactly chi+: projecting onto chi- now gives zero
    const auto gone = project_atom(kept.post_state, chi_basis_vector(0, -1));
    CHECK(gone.probability < 1e-20);
}
