#pragma once

#include <functional>
#include <optional>
#include <string>

#include "stirap/kernels.hpp"

namespace stirap {

struct IntegrationWindow {
    double t_start = 0.0;
    double t_end = 1.0;
    int samples = 1001;      // >= 2, uniform sample grid
    double tolerance = 1e-9; // local error, absolute and relative
};

/// Window covering every gaussian pulse out to `pad` widths (default 4, where
/// the envelope is down to e^-16 of its peak).
IntegrationWindow default_window(const SystemSpec& spec, int samples = 1001,
                                 double tolerance = 1e-9, double pad = 4.0);

struct IntegratorStats {
    long accepted = 0;
    long rejected = 0;
    long rhs_evals = 0;
};

struct Trajectory {
    Eigen::VectorXd times;
    std::vector<VectorXc> states;
    Eigen::VectorXd norms;
    IntegratorStats stats;

    const VectorXc& final_state() const { return states.back(); }
};

/// Right-hand side y' = (-iH(t) - D) y over the full product space or a
/// sector restriction of it.
class Generator {
  public:
    enum class Threads { Serial, Parallel, Auto };

    Generator(SystemSpec spec, BasisPtr basis, Threads threads = Threads::Auto);

    /// Restriction to one excitation sector (indices into the full basis).
    Generator sector(int N) const;

    Index dim() const { return kernel_.dim; }
    const SystemSpec& spec() const { return spec_; }
    const BasisPtr& basis() const { return basis_; }
    const std::vector<Index>& indices() const { return indices_; }
    bool restricted() const { return !indices_.empty(); }
    bool lossless() const { return spec_.lossless(); }

    void apply(double t, const Complex* x, Complex* y) const;
    Eigen::MatrixXd hamiltonian(double t) const;
    MatrixXc generator_matrix(double t) const;

    /// Embed a full-basis state into the restriction (or pass through).
    VectorXc restrict_state(const VectorXc& full) const;
    VectorXc prolong_state(const VectorXc& reduced) const;

  private:
    SystemSpec spec_;
    BasisPtr basis_;
    HamiltonianKernel kernel_;
    std::vector<Index> indices_; // empty = full space
    Threads threads_;
    mutable Eigen::VectorXd coeffs_;
};

/// Adaptive embedded Runge-Kutta 5(4) propagation with snapshots on the
/// uniform sample grid (steps are clipped to land on sample times).
/// Lossless runs enforce |norm - 1| <= norm_tol at every sample.
Trajectory integrate(const Generator& gen, const IntegrationWindow& window,
                     const VectorXc& psi0, double norm_tol = 1e-6);

struct PopulationTable {
    Eigen::VectorXd times;
    std::vector<std::string> labels;
    Eigen::MatrixXd values;       // samples x labels, |C|^2
    Eigen::MatrixXd mode_numbers; // samples x modes, <n_j> (full-space runs)
};

/// |C_i(t)|^2 for the watched basis states (indices into the trajectory's
/// state space; labels resolved against the full basis when restricted).
PopulationTable populations(const Trajectory& traj, const Generator& gen,
                            std::span<const Index> watch_full_indices);

/// F = |<target|state>| (amplitude convention).
double fidelity(const VectorXc& state, const VectorXc& target);
double fidelity(const StateVector& state, const StateVector& target);

struct PulseDiagnostic {
    std::string name;
    double amplitude = 0.0;
    double width = 0.0;
    double adiabaticity = 0.0; // G*sigma, gaussian pulses only
};

struct AdiabaticityReport {
    std::vector<PulseDiagnostic> pulses;
    std::optional<double> min_gap; // min over the grid of the smallest nonzero
                                   // |eigenvalue| in the restricted block
    std::optional<double> bridge_ratio_max; // H config: peak of
                                            // (g2a g3b)^2 / ((g1a g3b)^2 + (g1b g2a)^2)
};

/// Gap scan uses `grid` points across the window and skips times where all
/// couplings are numerically off (empty report for a zero-coupling window).
AdiabaticityReport adiabaticity_report(const Generator& gen, const IntegrationWindow& window,
                                       int grid = 257);

/// Indices (within spec.couplings) of the four H-configuration roles
/// (g1a, g2a, g1b, g3b); fills bridge_ratio_max of an existing report.
struct HConfigRoles {
    int g1a = -1, g2a = -1, g1b = -1, g3b = -1;
};
void add_bridge_ratio(AdiabaticityReport& report, const SystemSpec& spec,
                      const IntegrationWindow& window, const HConfigRoles& roles,
                      int grid = 2049);

} // namespace stirap
