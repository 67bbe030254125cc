// Timing comparison of the serial reference kernel against the OpenMP one,
// on the generator sizes the simulator actually uses.
#include <chrono>
#include <cstdio>
#include <random>

#include "stirap/kernels.hpp"
#include "stirap/propagate.hpp"
#include "stirap/scenarios.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace stirap;

namespace {

SystemSpec cat_spec(int n_max) {
    SystemSpec spec;
    spec.modes = {ModeSpace{n_max}, ModeSpace{n_max}, ModeSpace{n_max}};
    spec.atoms = {AtomKind::WithSpectator};
    spec.detunings = {0.0};
    spec.couplings = {
        {0, 0, Transition::Minus, PulseSpec::gaussian(15.0, -2.0, 3.0), "g1"},
        {0, 1, Transition::Minus, PulseSpec::gaussian(15.0, 2.0, 3.0), "g2"},
    };
    return spec;
}

double time_apply(const HamiltonianKernel& kernel, const Eigen::VectorXd& coeffs,
                  const VectorXc& x, VectorXc& y, bool parallel, int reps) {
    using clock = std::chrono::steady_clock;
    // warm up
    for (int r = 0; r < 3; ++r)
        parallel ? apply_parallel(kernel, coeffs, x.data(), y.data())
                 : apply_serial(kernel, coeffs, x.data(), y.data());
    const auto t0 = clock::now();
    for (int r = 0; r < reps; ++r)
        parallel ? apply_parallel(kernel, coeffs, x.data(), y.data())
                 : apply_serial(kernel, coeffs, x.data(), y.data());
    const auto t1 = clock::now();
    return std::chrono::duration<double>(t1 - t0).count() / reps;
}

} // namespace

int main(int argc, char** argv) {
    const int reps = argc > 1 ? std::atoi(argv[1]) : 200;
#ifdef _OPENMP
    std::printf("threads: %d\n", omp_get_max_threads());
#else
    std::printf("threads: 1 (OpenMP disabled)\n");
#endif

    std::printf("%8s %10s %12s %12s %8s\n", "n_max", "dim", "serial[us]", "openmp[us]",
                "speedup");
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (int n_max : {4, 8, 12, 16, 20}) {
        const SystemSpec spec = cat_spec(n_max);
        const auto basis = spec.make_basis();
        const HamiltonianKernel kernel = build_kernel(spec, *basis);
        Eigen::VectorXd coeffs;
        eval_coefficients(spec, 0.5, coeffs);
        VectorXc x(basis->dim()), y(basis->dim());
        for (Index i = 0; i < x.size(); ++i)
            x[i] = Complex(uni(rng), uni(rng));
        const double ts = time_apply(kernel, coeffs, x, y, false, reps);
        const double tp = time_apply(kernel, coeffs, x, y, true, reps);
        std::printf("%8d %10lld %12.2f %12.2f %8.2f\n", n_max,
                    static_cast<long long>(basis->dim()), ts * 1e6, tp * 1e6, ts / tp);
    }

    // end-to-end: one full coherent-transfer integration both ways
    {
        const SystemSpec spec = cat_spec(12);
        const auto basis = spec.make_basis();
        StateVector psi0 = product_state(
            basis,
            {coherent_state(1.0, basis->mode(0)).amps, fock_amplitudes(0, basis->mode(1)),
             fock_amplitudes(0, basis->mode(2))},
            {level_amplitudes(0, 3)});
        const IntegrationWindow window = default_window(spec, 51, 1e-9);
        using clock = std::chrono::steady_clock;
        for (auto mode : {Generator::Threads::Serial, Generator::Threads::Parallel}) {
            Generator gen(spec, basis, mode);
            const auto t0 = clock::now();
            const Trajectory traj = integrate(gen, window, psi0.amps);
            const auto t1 = clock::now();
            std::printf("integrate dim=%lld %s: %.2f s (%ld steps)\n",
                        static_cast<long long>(basis->dim()),
                        mode == Generator::Threads::Serial ? "serial " : "openmp ",
                        std::chrono::duration<double>(t1 - t0).count(),
                        traj.stats.accepted);
        }
    }
    return 0;
}
