#pragma once

#include <optional>
#include <string>
#include <vector>

#include "stirap/fock.hpp"

namespace stirap {

enum class PulseShape { Gaussian, Constant };

/// Coupling envelope. Gaussian: sign*G*exp(-(t-t0)^2/sigma^2); Constant: sign*G.
struct PulseSpec {
    PulseShape shape = PulseShape::Gaussian;
    double amplitude = 0.0; // G, units 1/T
    double center = 0.0;    // t0, units T (gaussian only)
    double width = 1.0;     // sigma > 0, units T (gaussian only)
    double sign = +1.0;

    static PulseSpec gaussian(double G, double t0, double sigma, double sign = +1.0) {
        return {PulseShape::Gaussian, G, t0, sigma, sign};
    }
    static PulseSpec constant(double G, double sign = +1.0) {
        return {PulseShape::Constant, G, 0.0, 1.0, sign};
    }
};

double pulse_value(const PulseSpec& pulse, double t);

/// Which ground level couples to |+>. Minus is the default two-level case;
/// MinusI / MinusII select the transition of a TwoGroundLevels atom.
enum class Transition { Minus, MinusI, MinusII };

struct CouplingSpec {
    int atom = 0;
    int mode = 0;
    Transition transition = Transition::Minus;
    PulseSpec pulse;
    std::string name; // optional, used in diagnostics
};

struct LossSpec {
    int mode = 0;
    double gamma = 0.0; // photon decay rate, units 1/T
};

/// Declarative system description in the interaction picture. Mode
/// frequencies are degenerate by assumption and never appear explicitly.
struct SystemSpec {
    std::vector<ModeSpace> modes;
    std::vector<AtomKind> atoms;
    std::vector<double> detunings; // Delta_nu per atom, units 1/T
    std::vector<CouplingSpec> couplings;
    std::vector<LossSpec> losses;

    BasisPtr make_basis() const;
    bool lossless() const;
    void validate() const; // throws std::invalid_argument / ConfigError
};

/// Ground level a coupling attaches to, resolved against the atom kind.
int transition_ground_level(AtomKind kind, Transition t);

/// a_mode |+><g| + h.c. embedded in the product space (unit amplitude;
/// the pulse supplies the time-dependent coefficient).
SparseRd coupling_operator(const SystemSpec& spec, int coupling, const ProductBasis& basis);

/// H(t) = sum_nu Delta_nu |+><+|_nu + sum_k g_k(t) (a_m sigma+ + h.c.),
/// matching the sector matrices used throughout: the excited-state diagonal
/// carries Delta_nu once. Real symmetric by construction.
Eigen::MatrixXd build_hamiltonian(const SystemSpec& spec, double t, const ProductBasis& basis);

/// Diagonal detuning part (Delta on excited-atom states).
Eigen::VectorXd detuning_diagonal(const SystemSpec& spec, const ProductBasis& basis);

/// Real diagonal D with D_kk = sum_j (gamma_j/2) n_j(k); evolution uses
/// dC/dt = -i H C - D C. Throws on negative gamma.
Eigen::VectorXd loss_generator(const SystemSpec& spec, const ProductBasis& basis);

/// Indices of basis states with total excitation N, ascending.
std::vector<Index> excitation_sector(const ProductBasis& basis, int N);

} // namespace stirap
