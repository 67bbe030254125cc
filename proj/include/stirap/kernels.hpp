#pragma once

#include <span>
#include <vector>

#include "stirap/model.hpp"

namespace stirap {

/// Time-independent structure of H(t) = sum_k c_k(t) S_k + diag(detuning),
/// merged into one CSR matrix whose entries carry the term index k, plus the
/// loss diagonal. The propagator evaluates c_k(t) from the pulses and calls
/// one of the apply kernels below.
struct HamiltonianKernel {
    Index dim = 0;
    int term_count = 0;
    std::vector<Index> row_ptr; // size dim+1
    std::vector<Index> col;
    std::vector<double> val;
    std::vector<int> term;
    Eigen::VectorXd detuning; // real diagonal of H
    Eigen::VectorXd loss;     // gamma/2 * n per state, applied as -loss*x
};

HamiltonianKernel build_kernel(const SystemSpec& spec, const ProductBasis& basis);

/// Restriction to a basis subset (e.g. one excitation sector). Entries whose
/// row or column leaves the subset are dropped.
HamiltonianKernel restrict_kernel(const HamiltonianKernel& kernel,
                                  std::span<const Index> indices);

void eval_coefficients(const SystemSpec& spec, double t, Eigen::VectorXd& coeffs);

/// y = (-i H(t) - D) x. Reference single-thread implementation.
void apply_serial(const HamiltonianKernel& kernel, const Eigen::VectorXd& coeffs,
                  const Complex* x, Complex* y);

/// Same contract, OpenMP row-parallel. Bitwise identical to apply_serial for
/// any thread count (each row is summed by exactly one thread, in order).
void apply_parallel(const HamiltonianKernel& kernel, const Eigen::VectorXd& coeffs,
                    const Complex* x, Complex* y);

/// Dense H for small subsets and test oracles.
Eigen::MatrixXd dense_h(const HamiltonianKernel& kernel, const Eigen::VectorXd& coeffs);

/// Dense full generator -iH - D (what the ODE integrates).
MatrixXc dense_generator(const HamiltonianKernel& kernel, const Eigen::VectorXd& coeffs);

} // namespace stirap
