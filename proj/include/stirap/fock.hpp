#pragma once

#include <complex>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace stirap {

using Complex = std::complex<double>;
using Eigen::Index;
using VectorXc = Eigen::VectorXcd;
using MatrixXc = Eigen::MatrixXcd;
using SparseRd = Eigen::SparseMatrix<double>;

/// Single bosonic mode truncated at photon number n_max (inclusive).
struct ModeSpace {
    int n_max = 0;
    int dim() const { return n_max + 1; }
};

/// Atomic level structures used by the protocols.
///  TwoLevel:        |->, |+>
///  WithSpectator:   |->, |+>, |q>   (|q> never couples)
///  TwoGroundLevels: |->_I, |->_II, |+>
enum class AtomKind { TwoLevel, WithSpectator, TwoGroundLevels };

int atom_dim(AtomKind kind);
int excited_level(AtomKind kind);
int level_excitation(AtomKind kind, int level); // 1 for the excited level, else 0
const char* level_name(AtomKind kind, int level);

/// Tensor-product basis: modes first (ascending), then atoms (ascending),
/// little-endian mixed-radix index (mode 0 varies fastest).
class ProductBasis {
  public:
    ProductBasis(std::vector<ModeSpace> modes, std::vector<AtomKind> atoms);

    Index dim() const { return dim_; }
    int mode_count() const { return static_cast<int>(modes_.size()); }
    int atom_count() const { return static_cast<int>(atoms_.size()); }
    int factor_count() const { return static_cast<int>(dims_.size()); }
    const ModeSpace& mode(int m) const { return modes_[static_cast<size_t>(m)]; }
    AtomKind atom(int a) const { return atoms_[static_cast<size_t>(a)]; }
    int factor_dim(int f) const { return dims_[static_cast<size_t>(f)]; }
    Index factor_stride(int f) const { return strides_[static_cast<size_t>(f)]; }

    /// label = (n_0, ..., n_{M-1}, s_0, ..., s_{A-1})
    Index index_of(std::span<const int> label) const;
    std::vector<int> label_of(Index index) const;
    int digit(Index index, int factor) const;

    /// Printable label, e.g. "0.1.0.-.-"; round-trips through parse_label.
    std::string label_string(Index index) const;
    Index parse_label(const std::string& text) const;

    /// Total excitation number N of a basis state (photons + excited atoms).
    int excitation(Index index) const;

    bool same_shape(const ProductBasis& other) const;

  private:
    std::vector<ModeSpace> modes_;
    std::vector<AtomKind> atoms_;
    std::vector<int> dims_;
    std::vector<Index> strides_;
    Index dim_;
};

using BasisPtr = std::shared_ptr<const ProductBasis>;

/// Complex amplitudes over a ProductBasis. Plain value type; immutable by
/// convention once filled, so it is safe to share across threads.
struct StateVector {
    BasisPtr basis;
    VectorXc amps;

    double norm() const { return amps.norm(); }
};

/// Annihilation operator of one mode embedded in the product space.
/// |...,n,...> -> sqrt(n)|...,n-1,...>; the adjoint truncates the top level.
SparseRd mode_lowering(const ProductBasis& basis, int mode);

/// Truncated coherent-state amplitudes with the discarded Poisson weight.
struct CoherentState {
    VectorXc amps; // renormalized after truncation
    double tail;   // weight beyond n_max before renormalization
};
CoherentState coherent_state(Complex alpha, const ModeSpace& space,
                             double tail_tol = 1e-10);

/// <a|b> with conjugation on a. Throws on basis shape mismatch.
Complex inner_product(const StateVector& a, const StateVector& b);

/// D(beta) = exp(beta a† - beta* a) applied to one mode, computed by
/// eigendecomposition of the truncated generator.
StateVector displace(const StateVector& state, int mode, Complex beta,
                     double tail_tol = 1e-9);

/// exp[theta (a_i a_j† - a_i† a_j)] on a mode pair; theta = pi/4 is a 50/50
/// splitter. Coherent states map as (b_i, b_j) -> (b_i cos t - b_j sin t,
///                                                 b_j cos t + b_i sin t).
StateVector beam_splitter(const StateVector& state, int mode_i, int mode_j,
                          double theta = 0.78539816339744831);

/// Product state from per-mode amplitude vectors and per-atom amplitude
/// vectors (or use level_state for a single occupied level).
StateVector product_state(BasisPtr basis,
                          const std::vector<VectorXc>& mode_amps,
                          const std::vector<VectorXc>& atom_amps);

VectorXc fock_amplitudes(int n, const ModeSpace& space);
VectorXc level_amplitudes(int level, int dim);

/// Photon-number expectation per mode.
Eigen::VectorXd mode_number_expectations(const StateVector& state);

/// Population left in the top Fock level of one mode (truncation indicator).
double top_level_population(const StateVector& state, int mode);

} // namespace stirap
