#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "stirap/darkstate.hpp"
#include "stirap/errors.hpp"
#include "stirap/propagate.hpp"
#include "test_util.hpp"

using namespace stirap;
using test_util::uniform;

namespace {

SystemSpec two_mode_constant(double g1, double g2, double delta = 0.0) {
    SystemSpec spec;
    spec.modes = {ModeSpace{1}, ModeSpace{1}};
    spec.atoms = {AtomKind::TwoLevel};
    spec.detunings = {delta};
    spec.couplings = {{0, 0, Transition::Minus, PulseSpec::constant(g1), "g1"},
                      {0, 1, Transition::Minus, PulseSpec::constant(g2), "g2"}};
    return spec;
}

} // namespace

TEST_CASE("zero hamiltonian leaves the state untouched") {
    SystemSpec spec = two_mode_constant(0.0, 0.0);
    const auto basis = spec.make_basis();
    Generator gen(spec, basis);
    VectorXc psi0 = VectorXc::Zero(basis->dim());
    psi0[basis->parse_label("1.0.-")] = 1.0;
    const Trajectory traj = integrate(gen, {0.0, 5.0, 11, 1e-9}, psi0);
    CHECK((traj.final_state() - psi0).norm() < 1e-12);
}

TEST_CASE("constant drive matches the matrix-exponential oracle") {
    const double g1 = 1.1, g2 = 0.6;
    SystemSpec spec = two_mode_constant(g1, g2);
    const auto basis = spec.make_basis();
    Generator gen = Generator(spec, basis).sector(1);
    VectorXc psi0 = VectorXc::Zero(3);
    const auto sector = excitation_sector(*basis, 1);
    // ascending sector order: |1,0,->, |0,1,->, |0,0,+>
    psi0[0] = 1.0;
    const double T = 3.0;
    const Trajectory traj = integrate(gen, {0.0, T, 301, 1e-10}, psi0);
    const VectorXc oracle = test_util::exp_product_oracle(gen, 0.0, T, 1, psi0);
    CHECK((traj.final_state() - oracle).norm() < 1e-8);

    // generalized Rabi frequency: the excited population oscillates at 2/K12
    const double omega = std::sqrt(g1 * g1 + g2 * g2);
    int excited_row = -1;
    for (size_t i = 0; i < sector.size(); ++i)
        if (basis->label_string(sector[i]) == "0.0.+")
            excited_row = static_cast<int>(i);
    REQUIRE(excited_row >= 0);
    for (int s = 0; s < traj.times.size(); ++s) {
        const double t = traj.times[s];
        const double expect =
            (g1 * g1 / (omega * omega)) * std::sin(omega * t) * std::sin(omega * t);
        CHECK(std::norm(traj.states[static_cast<size_t>(s)][excited_row]) ==
              doctest::Approx(expect).epsilon(1e-6));
    }
}

TEST_CASE("piecewise-exponential oracle agreement on random schedules") {
    // both routes run the same piecewise-constant schedule: adaptive stepping
    // within each slice vs the slice's matrix exponential
    for (int trial = 0; trial < 3; ++trial) {
        SystemSpec spec = test_util::random_h_spec();
        if (trial % 2 == 1)
            spec.losses = {{0, uniform(0.01, 0.5)}};
        const auto basis = spec.make_basis();
        Generator gen = Generator(spec, basis).sector(1);
        VectorXc psi0 = VectorXc::Zero(gen.dim());
        psi0[0] = 1.0;
        const IntegrationWindow window = default_window(spec, 101, 1e-9);
        const int slices = 500; // acceptance runs the full 2000
        const VectorXc stepped = test_util::piecewise_integrate(
            gen, window.t_start, window.t_end, slices, psi0);
        const VectorXc oracle = test_util::exp_product_oracle(
            gen, window.t_start, window.t_end, slices, psi0);
        CHECK((stepped - oracle).norm() < 1e-5);
    }
}

TEST_CASE("norm and excitation conservation in lossless runs") {
    SystemSpec spec = test_util::random_h_spec();
    const auto basis = spec.make_basis();
    Generator gen(spec, basis);
    VectorXc psi0 = VectorXc::Zero(basis->dim());
    psi0[basis->parse_label("0.1.0.-.-")] = 1.0;
    const IntegrationWindow window = default_window(spec, 201, 1e-9);
    const Trajectory traj = integrate(gen, window, psi0);
    for (Index s = 0; s < traj.norms.size(); ++s)
        CHECK(std::abs(traj.norms[s] - 1.0) <= 1e-6);
    for (const auto& state : traj.states) {
        double n = 0.0;
        for (Index i = 0; i < basis->dim(); ++i)
            n += std::norm(state[i]) * basis->excitation(i);
        CHECK(std::abs(n - 1.0) < 1e-8);
    }
}

TEST_CASE("sector closure: no leakage out of the initial excitation sector") {
    SystemSpec spec = test_util::random_h_spec();
    const auto basis = spec.make_basis();
    Generator gen(spec, basis); // full space on purpose
    VectorXc psi0 = VectorXc::Zero(basis->dim());
    psi0[basis->parse_label("0.1.0.-.-")] = 1.0;
    const Trajectory traj = integrate(gen, default_window(spec, 101, 1e-9), psi0);
    const auto sector = excitation_sector(*basis, 1);
    for (const auto& state : traj.states) {
        double out = state.squaredNorm();
        for (const Index i : sector)
            out -= std::norm(state[i]);
        CHECK(std::abs(out) < 1e-10);
    }
}

TEST_CASE("halving the tolerance moves fidelities by less than 1e-6") {
    SystemSpec spec = test_util::random_h_spec();
    const auto basis = spec.make_basis();
    Generator gen = Generator(spec, basis).sector(1);
    VectorXc psi0 = VectorXc::Zero(gen.dim());
    psi0[1] = 1.0;
    IntegrationWindow w1 = default_window(spec, 51, 1e-9);
    IntegrationWindow w2 = w1;
    w2.tolerance = 5e-10;
    const VectorXc a = integrate(gen, w1, psi0).final_state();
    const VectorXc b = integrate(gen, w2, psi0).final_state();
    VectorXc target = VectorXc::Zero(gen.dim());
    target[2] = 1.0;
    CHECK(std::abs(fidelity(a, target) - fidelity(b, target)) < 1e-6);
}

TEST_CASE("two frozen photons in a lossy mode decay at rate 2 gamma") {
    SystemSpec spec;
    spec.modes = {ModeSpace{2}};
    spec.atoms = {AtomKind::TwoLevel};
    spec.detunings = {0.0};
    const double gamma = 0.3;
    spec.losses = {{0, gamma}};
    const auto basis = spec.make_basis();
    Generator gen(spec, basis);
    VectorXc psi0 = VectorXc::Zero(basis->dim());
    psi0[basis->parse_label("2.-")] = 1.0;
    const double T = 2.0;
    const Trajectory traj = integrate(gen, {0.0, T, 21, 1e-10}, psi0);
    for (Index s = 0; s < traj.times.size(); ++s) {
        const double expect = std::exp(-2.0 * gamma * traj.times[s]); // squared norm
        CHECK(traj.norms[s] * traj.norms[s] == doctest::Approx(expect).epsilon(1e-8));
    }
}

TEST_CASE("population table is complete on the sector") {
    SystemSpec spec = test_util::random_h_spec();
    const auto basis = spec.make_basis();
    Generator gen = Generator(spec, basis).sector(1);
    VectorXc psi0 = VectorXc::Zero(gen.dim());
    psi0[0] = 1.0;
    const Trajectory traj = integrate(gen, default_window(spec, 101, 1e-9), psi0);
    const auto sector = excitation_sector(*basis, 1);
    const PopulationTable table = populations(traj, gen, sector);
    for (Index r = 0; r < table.values.rows(); ++r)
        CHECK(table.values.row(r).sum() == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(table.labels.size() == 5);
    CHECK_THROWS_AS(populations(traj, gen, std::vector<Index>{basis->dim() + 5}),
                    std::invalid_argument);
}

TEST_CASE("fidelity basics") {
    VectorXc a(2), b(2);
    a << 1.0, 0.0;
    b << 0.0, Complex(0.0, 1.0);
    CHECK(fidelity(a, a) == doctest::Approx(1.0));
    CHECK(fidelity(a, b) == doctest::Approx(0.0));
    const VectorXc c = Complex(0.0, 1.0) * a;
    CHECK(fidelity(a, c) == doctest::Approx(1.0)); // global phase dropped
}

TEST_CASE("window placement and integrator guards") {
    SystemSpec spec = two_mode_constant(1.0, 1.0);
    spec.couplings[0].pulse = PulseSpec::gaussian(2.0, -1.0, 0.5);
    spec.couplings[1].pulse = PulseSpec::gaussian(2.0, 2.0, 1.5);
    const IntegrationWindow w = default_window(spec);
    // per-pulse padding: every pulse keeps >= 4 sigma to both edges
    CHECK(w.t_start == doctest::Approx(-4.0));
    CHECK(w.t_end == doctest::Approx(8.0));
    for (const auto& c : spec.couplings) {
        CHECK(c.pulse.center - w.t_start >= 4.0 * c.pulse.width);
        CHECK(w.t_end - c.pulse.center >= 4.0 * c.pulse.width);
    }

    const auto basis = spec.make_basis();
    Generator gen(spec, basis);
    VectorXc psi0 = VectorXc::Zero(basis->dim());
    psi0[0] = 1.0;
    CHECK_THROWS_AS(integrate(gen, {1.0, 1.0, 11, 1e-9}, psi0), ConfigError);
    CHECK_THROWS_AS(integrate(gen, {0.0, 1.0, 1, 1e-9}, psi0), ConfigError);
}

TEST_CASE("adiabaticity report") {
    SUBCASE("pulse areas and gap for the four-pulse schedule") {
        SystemSpec spec;
        spec.modes = {ModeSpace{1}, ModeSpace{1}, ModeSpace{1}};
        spec.atoms = {AtomKind::TwoLevel, AtomKind::TwoLevel};
        spec.detunings = {0.0, 0.0};
        spec.couplings = {
            {0, 0, Transition::Minus, PulseSpec::gaussian(100.0, 1.78, 3.0), "g1a"},
            {0, 1, Transition::Minus, PulseSpec::gaussian(100.0, 5.28, 3.0), "g2a"},
            {1, 0, Transition::Minus, PulseSpec::gaussian(100.0, -1.72, 3.0), "g1b"},
            {1, 2, Transition::Minus, PulseSpec::gaussian(100.0, -5.22, 3.0), "g3b"},
        };
        const auto basis = spec.make_basis();
        Generator gen = Generator(spec, basis).sector(1);
        const IntegrationWindow w = default_window(spec, 101, 1e-9);
        AdiabaticityReport report = adiabaticity_report(gen, w);
        REQUIRE(report.pulses.size() == 4);
        for (const auto& p : report.pulses)
            CHECK(p.adiabaticity == doctest::Approx(300.0));
        CHECK(report.min_gap.has_value());
        CHECK(*report.min_gap > 0.0);
        add_bridge_ratio(report, spec, w, {0, 1, 2, 3});
        REQUIRE(report.bridge_ratio_max.has_value());
        CHECK(*report.bridge_ratio_max < 0.01); // middle cavity stays dim
    }
    SUBCASE("zero couplings give an empty gap report") {
        SystemSpec spec = two_mode_constant(0.0, 0.0);
        const auto basis = spec.make_basis();
        Generator gen(spec, basis);
        const AdiabaticityReport report =
            adiabaticity_report(gen, {0.0, 1.0, 11, 1e-9});
        CHECK_FALSE(report.min_gap.has_value());
    }
}
