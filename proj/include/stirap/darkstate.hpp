#pragma once

#include <span>

#include "stirap/fock.hpp"

namespace stirap {

/// Per-mode coefficients of an adiabatic operator A† = sum_i c_i a_i†,
/// normalized to sum |c_i|^2 = 1 with a tracked gauge sign.
struct AdiabaticCoefficients {
    VectorXc coeffs;
    double gauge = +1.0;
};

/// Zero-eigenvalue state of the single-atom two-mode system:
/// coefficients (g2, -g1)/sqrt(g1^2+g2^2) over modes (1,2).
/// Throws std::invalid_argument when both couplings vanish.
AdiabaticCoefficients two_mode_dark(double g1, double g2);

/// Null vector of the 5x5 single-excitation H-configuration block, in chain
/// order (photon in 2, atom a excited, photon in 1, atom b excited, photon
/// in 3): K (g1a*g3b, 0, -g2a*g3b, 0, g1b*g2a).
Eigen::VectorXd h_config_dark(double g1a, double g2a, double g1b, double g3b);

/// Mode coefficients of the H-configuration adiabatic operator, mode order
/// (1, 2, 3): K (-g2a*g3b, g1a*g3b, g1b*g2a).
AdiabaticCoefficients h_config_adiabatic(double g1a, double g2a, double g1b, double g3b);

/// Null vector of the (M+1)-dimensional star block, order (cavity 1..M,
/// atom excited): K (-g_Ma, ..., -g_Ma, (M-1) g_a, 0). The first M-1
/// components are equal and the atomic component is exactly zero.
Eigen::VectorXd star_dark(double g_Ma, double g_a, int M);

/// Star block with extra ground-state atoms pinned to the cavities in
/// `blocked` (0-based, < M-1): those components are exactly zero. Order:
/// (cavity 1..M, main atom excited, one excited level per blocking atom).
Eigen::VectorXd star_dark_perturbed(double g_Ma, double g_a, int M,
                                    std::span<const int> blocked);

AdiabaticCoefficients star_adiabatic(double g_Ma, double g_a, int M);

/// Max-norm of [B, A†] on the subspace with every mode below its top Fock
/// level (two modes, cutoff n_max). Vanishes there; the truncation defect
/// lives only in the excluded top rows/columns.
double commutator_residual(double g1, double g2, int n_max);

/// f(A†)|vacuum, ground> with f given through its Fock coefficients:
/// sum_n f_n (A†)^n / sqrt(n!) |0>. With f the coefficients of a single-mode
/// state, this is the multimode image of that state under the dark channel.
StateVector apply_adiabatic_function(const AdiabaticCoefficients& op,
                                     const VectorXc& fock_coeffs, BasisPtr basis);

/// Sign continuity along a discretized schedule: flips `current` so that
/// <previous|current> >= 0; returns the applied sign.
double align_gauge(const Eigen::VectorXd& previous, Eigen::VectorXd& current);

// --- target states (normalized, atoms in their ground levels) ---

/// (|0,1> + sign |1,0>)/sqrt(2) across modes (i, j), vacuum elsewhere.
StateVector target_epr(BasisPtr basis, int mode_i, int mode_j, int sign);

/// Single excitation shared with equal weight and phase across `modes`.
StateVector target_w(BasisPtr basis, std::span<const int> modes);

/// n-quantum multinomial state (A†)^n/sqrt(n!)|0> for the given coefficients.
StateVector target_multinomial(BasisPtr basis, const AdiabaticCoefficients& op, int n);

/// N(|alpha> + sign |-alpha>) in one mode, vacuum elsewhere.
StateVector target_cat(BasisPtr basis, int mode, Complex alpha, int sign);

/// N(|-beta,beta> + (-1)^i |beta,-beta>) across modes (i,j), vacuum elsewhere.
StateVector target_entangled_cat(BasisPtr basis, int mode_i, int mode_j, Complex beta,
                                 int parity);

/// Branch states of the two-measurement protocol on three modes:
///   psi_00 ~  |-a,0,0> + 2|0,a,0> + |0,0,a>
///   psi_01 ~ -|-a,0,0> + |0,0,a>          (= psi_11)
///   psi_10 ~  |-a,0,0> - 2|0,a,0> + |0,0,a>
StateVector target_psi_ij(BasisPtr basis, Complex alpha, int i, int j);

} // namespace stirap
