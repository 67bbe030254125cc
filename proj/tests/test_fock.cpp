#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "stirap/errors.hpp"
#include "stirap/fock.hpp"
#include "test_util.hpp"

using namespace stirap;

TEST_CASE("index/label round trip is a bijection") {
    ProductBasis basis({ModeSpace{2}, ModeSpace{3}, ModeSpace{1}},
                       {AtomKind::WithSpectator, AtomKind::TwoLevel});
    REQUIRE(basis.dim() == 3 * 4 * 2 * 3 * 2);
    for (Index i = 0; i < basis.dim(); ++i) {
        const auto label = basis.label_of(i);
        CHECK(basis.index_of(label) == i);
        CHECK(basis.parse_label(basis.label_string(i)) == i);
    }
}

TEST_CASE("label strings use mode occupations then level names") {
    ProductBasis basis({ModeSpace{1}, ModeSpace{1}, ModeSpace{1}},
                       {AtomKind::TwoLevel, AtomKind::TwoLevel});
    const Index i = basis.parse_label("0.1.0.-.-");
    CHECK(basis.label_string(i) == "0.1.0.-.-");
    CHECK(basis.digit(i, 1) == 1);
    CHECK(basis.excitation(i) == 1);
    CHECK(basis.excitation(basis.parse_label("0.0.0.+.-")) == 1);

    ProductBasis pair({ModeSpace{2}}, {AtomKind::TwoGroundLevels});
    CHECK(pair.label_string(pair.parse_label("1.II")) == "1.II");
    CHECK(pair.excitation(pair.parse_label("0.+")) == 1);
    CHECK(pair.excitation(pair.parse_label("0.II")) == 0);
}

TEST_CASE("lowering operator on the smallest space") {
    ProductBasis basis({ModeSpace{1}}, {});
    const Eigen::MatrixXd a = Eigen::MatrixXd(mode_lowering(basis, 0));
    CHECK(a(0, 1) == doctest::Approx(1.0)); // a|1> = |0>
    CHECK(a.col(0).norm() == 0.0);          // a|0> = 0
}

TEST_CASE("number operator and truncated commutator") {
    const int n_max = 8;
    ProductBasis basis({ModeSpace{n_max}}, {});
    const Eigen::MatrixXd a = Eigen::MatrixXd(mode_lowering(basis, 0));
    const Eigen::MatrixXd num = a.transpose() * a;
    for (int n = 0; n <= n_max; ++n)
        CHECK(num(n, n) == doctest::Approx(n).epsilon(1e-14));
    // [a, a†] = 1 away from the cutoff row/column
    const Eigen::MatrixXd comm = a * a.transpose() - a.transpose() * a;
    for (int n = 0; n < n_max; ++n) {
        CHECK(comm(n, n) == doctest::Approx(1.0).epsilon(1e-14));
        for (int m = 0; m < n_max; ++m)
            if (m != n)
                CHECK(std::abs(comm(n, m)) < 1e-15);
    }
    CHECK(comm(n_max, n_max) == doctest::Approx(-n_max));
}

TEST_CASE("lowering reduces the excitation count by one") {
    ProductBasis basis({ModeSpace{3}, ModeSpace{2}}, {AtomKind::TwoLevel});
    const SparseRd a = mode_lowering(basis, 0);
    for (int outer = 0; outer < a.outerSize(); ++outer)
        for (SparseRd::InnerIterator it(a, outer); it; ++it)
            CHECK(basis.excitation(it.row()) == basis.excitation(it.col()) - 1);
}

TEST_CASE("coherent state amplitudes and tails") {
    const ModeSpace space{40};
    SUBCASE("alpha = 0 is vacuum") {
        const auto c = coherent_state(0.0, space);
        CHECK(std::abs(c.amps[0] - 1.0) < 1e-15);
        CHECK(c.amps.tail(40).norm() == 0.0);
        CHECK(c.tail == 0.0);
    }
    SUBCASE("amplitudes match the Poisson closed form") {
        const Complex alpha(0.8, -0.4);
        const auto c = coherent_state(alpha, space);
        double fact = 1.0;
        for (int n = 0; n <= 12; ++n) {
            if (n > 0)
                fact *= n;
            const Complex expect =
                std::exp(-0.5 * std::norm(alpha)) * std::pow(alpha, n) / std::sqrt(fact);
            CHECK(std::abs(c.amps[n] - expect) < 1e-12);
        }
    }
    SUBCASE("overlap <-a|a> = exp(-2a^2)") {
        auto basis = std::make_shared<ProductBasis>(
            std::vector<ModeSpace>{space}, std::vector<AtomKind>{});
        const double alpha = 1.0;
        StateVector plus{basis, coherent_state(alpha, space).amps};
        StateVector minus{basis, coherent_state(-alpha, space).amps};
        const Complex overlap = inner_product(minus, plus);
        CHECK(std::abs(overlap - std::exp(-2.0)) < 1e-12);
        CHECK(std::abs(std::abs(overlap) - 0.1353352832366127) < 1e-12);
    }
    SUBCASE("three-mode overlap <-a,0,0|0,a,0> = exp(-a^2)") {
        auto basis = std::make_shared<ProductBasis>(
            std::vector<ModeSpace>(3, ModeSpace{12}), std::vector<AtomKind>{});
        const double alpha = 1.0;
        auto vac = fock_amplitudes(0, basis->mode(0));
        StateVector a{basis, {}}, b{basis, {}};
        a = product_state(basis, {coherent_state(-alpha, basis->mode(0)).amps, vac, vac}, {});
        b = product_state(basis, {vac, coherent_state(alpha, basis->mode(1)).amps, vac}, {});
        CHECK(std::abs(inner_product(a, b) - std::exp(-1.0)) < 1e-10);
    }
    SUBCASE("tail bound enforced") {
        CHECK_THROWS_AS(coherent_state(3.0, ModeSpace{4}), TruncationError);
    }
}

TEST_CASE("displacement operator") {
    auto basis = std::make_shared<ProductBasis>(std::vector<ModeSpace>{ModeSpace{30}},
                                                std::vector<AtomKind>{});
    SUBCASE("D(beta)|0> = |beta>") {
        StateVector vac{basis, fock_amplitudes(0, basis->mode(0))};
        const Complex beta(0.7, 0.3);
        const StateVector displaced = displace(vac, 0, beta);
        StateVector target{basis, coherent_state(beta, basis->mode(0)).amps};
        CHECK(std::abs(inner_product(target, displaced)) == doctest::Approx(1.0).epsilon(1e-10));
    }
    SUBCASE("D(-b) D(b) = identity on well-truncated states") {
        StateVector psi{basis, coherent_state(Complex(0.5, -0.2), basis->mode(0)).amps};
        const Complex beta(1.0, 0.0);
        const StateVector back = displace(displace(psi, 0, beta), 0, -beta);
        CHECK((back.amps - psi.amps).norm() < 1e-8);
    }
    SUBCASE("phase convention of exp(b a† - b* a): D(b)|a> = exp(i Im(b a*)) |a+b>") {
        const Complex alpha(0.4, 0.6), beta(-0.3, 0.5);
        StateVector psi{basis, coherent_state(alpha, basis->mode(0)).amps};
        const StateVector displaced = displace(psi, 0, beta);
        StateVector target{basis, coherent_state(alpha + beta, basis->mode(0)).amps};
        const Complex phase = std::exp(Complex(0.0, std::imag(beta * std::conj(alpha))));
        CHECK((displaced.amps - phase * target.amps).norm() < 1e-9);
        // for real displacements (the only protocol use) the phase drops out
        const StateVector real_disp = displace(psi, 0, Complex(0.5, 0.0));
        StateVector real_target{
            basis, coherent_state(alpha + 0.5, basis->mode(0)).amps};
        const Complex ph2 =
            std::exp(Complex(0.0, std::imag(Complex(0.5, 0.0) * std::conj(alpha))));
        CHECK((real_disp.amps - ph2 * real_target.amps).norm() < 1e-9);
    }
    SUBCASE("truncation guard") {
        StateVector psi{basis, coherent_state(2.0, basis->mode(0)).amps};
        CHECK_THROWS_AS(displace(psi, 0, Complex(4.0, 0.0)), TruncationError);
    }
}

TEST_CASE("beam splitter") {
    auto basis = std::make_shared<ProductBasis>(std::vector<ModeSpace>(2, ModeSpace{16}),
                                                std::vector<AtomKind>{});
    SUBCASE("vacuum stays vacuum") {
        StateVector vac = product_state(
            basis, {fock_amplitudes(0, basis->mode(0)), fock_amplitudes(0, basis->mode(1))},
            {});
        const StateVector out = beam_splitter(vac, 0, 1);
        CHECK(std::abs(std::abs(out.amps[0]) - 1.0) < 1e-12);
    }
    SUBCASE("coherent map (b_i, b_j) -> (b_i c - b_j s, b_j c + b_i s)") {
        const Complex bi(0.4, 0.1), bj(-0.5, 0.3);
        const double theta = 0.78539816339744831;
        StateVector in = product_state(basis,
                                       {coherent_state(bi, basis->mode(0)).amps,
                                        coherent_state(bj, basis->mode(1)).amps},
                                       {});
        const StateVector out = beam_splitter(in, 0, 1, theta);
        const Complex c = std::cos(theta), s = std::sin(theta);
        StateVector expect = product_state(
            basis,
            {coherent_state(bi * c - bj * s, basis->mode(0)).amps,
             coherent_state(bj * c + bi * s, basis->mode(1)).amps},
            {});
        CHECK(std::abs(std::abs(inner_product(expect, out)) - 1.0) < 1e-9);
    }
    SUBCASE("total photon number conserved") {
        StateVector in = product_state(basis,
                                       {coherent_state(Complex(0.6, 0.2), basis->mode(0)).amps,
                                        fock_amplitudes(2, basis->mode(1))},
                                       {});
        const double n_before = mode_number_expectations(in).sum();
        const StateVector out = beam_splitter(in, 0, 1);
        CHECK(std::abs(mode_number_expectations(out).sum() - n_before) < 1e-8);
    }
    SUBCASE("mismatched cutoffs rejected") {
        auto uneven = std::make_shared<ProductBasis>(
            std::vector<ModeSpace>{ModeSpace{3}, ModeSpace{4}}, std::vector<AtomKind>{});
        StateVector vac = product_state(
            uneven, {fock_amplitudes(0, uneven->mode(0)), fock_amplitudes(0, uneven->mode(1))},
            {});
        CHECK_THROWS_AS(beam_splitter(vac, 0, 1), std::invalid_argument);
    }
}

TEST_CASE("inner product basics") {
    auto basis = std::make_shared<ProductBasis>(std::vector<ModeSpace>{ModeSpace{2}},
                                                std::vector<AtomKind>{AtomKind::TwoLevel});
    StateVector a{basis, VectorXc::Zero(basis->dim())};
    a.amps[0] = 1.0;
    StateVector b{basis, VectorXc::Zero(basis->dim())};
    b.amps[1] = 1.0;
    CHECK(std::abs(inner_product(a, a) - 1.0) < 1e-15);
    CHECK(std::abs(inner_product(a, b)) == 0.0);

    auto other = std::make_shared<ProductBasis>(std::vector<ModeSpace>{ModeSpace{3}},
                                                std::vector<AtomKind>{AtomKind::TwoLevel});
    StateVector c{other, VectorXc::Zero(other->dim())};
    CHECK_THROWS_AS(inner_product(a, c), std::invalid_argument);
}

TEST_CASE("mode number expectations and top-level population") {
    auto basis = std::make_shared<ProductBasis>(std::vector<ModeSpace>(2, ModeSpace{3}),
                                                std::vector<AtomKind>{});
    StateVector psi = product_state(
        basis, {fock_amplitudes(2, basis->mode(0)), fock_amplitudes(3, basis->mode(1))}, {});
    const auto nbar = mode_number_expectations(psi);
    CHECK(nbar[0] == doctest::Approx(2.0));
    CHECK(nbar[1] == doctest::Approx(3.0));
    CHECK(top_level_population(psi, 1) == doctest::Approx(1.0));
    CHECK(top_level_population(psi, 0) == doctest::Approx(0.0));
}
