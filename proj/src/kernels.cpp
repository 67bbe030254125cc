#include "stirap/kernels.hpp"

#include <algorithm>
#include <unordered_map>

namespace stirap {

HamiltonianKernel build_kernel(const SystemSpec& spec, const ProductBasis& basis) {
    struct Entry {
        Index row, col;
        double val;
        int term;
    };
    std::vector<Entry> entries;
    for (int k = 0; k < static_cast<int>(spec.couplings.size()); ++k) {
        const SparseRd op = coupling_operator(spec, k, basis);
        for (int outer = 0; outer < op.outerSize(); ++outer)
            for (SparseRd::InnerIterator it(op, outer); it; ++it)
                entries.push_back({it.row(), it.col(), it.value(), k});
    }
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        return a.row != b.row ? a.row < b.row
                              : (a.col != b.col ? a.col < b.col : a.term < b.term);
    });

    HamiltonianKernel kernel;
    kernel.dim = basis.dim();
    kernel.term_count = static_cast<int>(spec.couplings.size());
    kernel.row_ptr.assign(static_cast<size_t>(kernel.dim) + 1, 0);
    kernel.col.reserve(entries.size());
    kernel.val.reserve(entries.size());
    kernel.term.reserve(entries.size());
    for (const auto& e : entries) {
        kernel.row_ptr[static_cast<size_t>(e.row) + 1]++;
        kernel.col.push_back(e.col);
        kernel.val.push_back(e.val);
        kernel.term.push_back(e.term);
    }
    for (size_t r = 1; r < kernel.row_ptr.size(); ++r)
        kernel.row_ptr[r] += kernel.row_ptr[r - 1];
    kernel.detuning = detuning_diagonal(spec, basis);
    kernel.loss = loss_generator(spec, basis);
    return kernel;
}

HamiltonianKernel restrict_kernel(const HamiltonianKernel& kernel,
                                  std::span<const Index> indices) {
    std::unordered_map<Index, Index> pos;
    pos.reserve(indices.size());
    for (size_t i = 0; i < indices.size(); ++i)
        pos.emplace(indices[i], static_cast<Index>(i));

    HamiltonianKernel out;
    out.dim = static_cast<Index>(indices.size());
    out.term_count = kernel.term_count;
    out.row_ptr.assign(indices.size() + 1, 0);
    out.detuning.resize(out.dim);
    out.loss.resize(out.dim);
    for (size_t i = 0; i < indices.size(); ++i) {
        const Index full = indices[i];
        out.detuning[static_cast<Index>(i)] = kernel.detuning[full];
        out.loss[static_cast<Index>(i)] = kernel.loss[full];
        for (Index e = kernel.row_ptr[static_cast<size_t>(full)];
             e < kernel.row_ptr[static_cast<size_t>(full) + 1]; ++e) {
            const auto hit = pos.find(kernel.col[static_cast<size_t>(e)]);
            if (hit == pos.end())
                continue;
            out.col.push_back(hit->second);
            out.val.push_back(kernel.val[static_cast<size_t>(e)]);
            out.term.push_back(kernel.term[static_cast<size_t>(e)]);
            out.row_ptr[i + 1]++;
        }
    }
    for (size_t r = 1; r < out.row_ptr.size(); ++r)
        out.row_ptr[r] += out.row_ptr[r - 1];
    return out;
}

void eval_coefficients(const SystemSpec& spec, double t, Eigen::VectorXd& coeffs) {
    coeffs.resize(static_cast<Index>(spec.couplings.size()));
    for (Index k = 0; k < coeffs.size(); ++k)
        coeffs[k] = pulse_value(spec.couplings[static_cast<size_t>(k)].pulse, t);
}

namespace {

inline Complex row_sum(const HamiltonianKernel& k, const Eigen::VectorXd& c, Index row,
                       const Complex* x) {
    Complex acc = 0.0;
    for (Index e = k.row_ptr[static_cast<size_t>(row)];
         e < k.row_ptr[static_cast<size_t>(row) + 1]; ++e) {
        const size_t ei = static_cast<size_t>(e);
        acc += c[k.term[ei]] * k.val[ei] * x[k.col[ei]];
    }
    acc += k.detuning[row] * x[row];
    // (-i H - D) x
    return Complex(0.0, -1.0) * acc - k.loss[row] * x[row];
}

} // namespace

void apply_serial(const HamiltonianKernel& kernel, const Eigen::VectorXd& coeffs,
                  const Complex* x, Complex* y) {
    for (Index row = 0; row < kernel.dim; ++row)
        y[row] = row_sum(kernel, coeffs, row, x);
}

void apply_parallel(const HamiltonianKernel& kernel, const Eigen::VectorXd& coeffs,
                    const Complex* x, Complex* y) {
#pragma omp parallel for schedule(static)
    for (Index row = 0; row < kernel.dim; ++row)
        y[row] = row_sum(kernel, coeffs, row, x);
}

Eigen::MatrixXd dense_h(const HamiltonianKernel& kernel, const Eigen::VectorXd& coeffs) {
    Eigen::MatrixXd H = kernel.detuning.asDiagonal();
    for (Index row = 0; row < kernel.dim; ++row)
        for (Index e = kernel.row_ptr[static_cast<size_t>(row)];
             e < kernel.row_ptr[static_cast<size_t>(row) + 1]; ++e) {
            const size_t ei = static_cast<size_t>(e);
            H(row, kernel.col[ei]) += coeffs[kernel.term[ei]] * kernel.val[ei];
        }
    return H;
}

MatrixXc dense_generator(const HamiltonianKernel& kernel, const Eigen::VectorXd& coeffs) {
    MatrixXc G = Complex(0.0, -1.0) * dense_h(kernel, coeffs);
    G -= MatrixXc(kernel.loss.cast<Complex>().asDiagonal());
    return G;
}

} // namespace stirap
