// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "vqnegf/pauli.hpp"

namespace vqnegf {

struct PotentialSpec {
  enum class Kind { flat, logistic_barrier, samples };
  Kind kind = Kind::flat;
  double flat_value_ev = 0.0;
  // logistic_barrier: U_b * [sigma((x - x1)/w) - sigma((x - x2)/w)] sampled at
  // site centers x_i = (i + 1/2) a.
  double barrier_height_ev = 0.2;
  double x1_nm = 3.0;
  double x2_nm = 7.0;
  double width_nm = 0.5;
  std::vector<double> samples_ev;
};

struct DeviceSpec {
  int n_sites = 32;
  double length_nm = 10.0;
  double a_nm = 0.3125;          // length_nm / n_sites
  double m_rel = 0.4;
  double t0_ev = 0.0;            // hbar^2 / (2 m* a^2)
  std::vector<double> potential_ev;
  double contact_onsite_source_ev = 0.0;
  double contact_onsite_drain_ev = 0.0;
  double eta_ev = 1e-4;
};

struct EnergyGrid {
  std::vector<double> energies;
};

EnergyGrid uniform_grid(double min_ev, double max_ev, int count);

// Basis permutation-plus-Hadamards preparing |b> from |0...0>:
// U_b = pi o H where H acts on every bit of hadamard_mask and pi XORs
// flip_value into indices whose control_mask bits are all set (control_mask
// 0 flips unconditionally).
struct UbSpec {
  int n_qubits = 0;
  std::uint64_t hadamard_mask = 0;
  std::uint64_t control_mask = 0;
  std::uint64_t flip_value = 0;
};

enum class ColumnRole { source, drain };

struct AssembledSystem {
  int n_qubits = 0;
  OperatorSum A_sum;
  OperatorSum adaga_sum;          // Hermitian-flagged A^dag A
  Eigen::MatrixXcd A_dense;       // independent dense assembly (small registers)
  Eigen::VectorXcd b;             // normalized right-hand side
  double b_norm = 1.0;            // raw-to-normalized divisor
  std::int64_t b_basis_index = -1;  // -1 for composite right-hand sides
  UbSpec ub;
  bool is_block = false;
  int site_bits = 0;
  std::vector<double> energies;
  ColumnRole column = ColumnRole::source;
};

double hopping_energy(double m_rel, double a_nm);

// Semi-infinite 1D lead: Sigma = -t0 e^{ika} with E - U = 2 t0 (1 - cos ka);
// propagating branch has Im Sigma <= 0, evanescent branches are real.
Complex lead_self_energy(double E, double U_contact, double t0);

// Gamma = i (Sigma - Sigma^dag) = -2 Im Sigma.
double lead_broadening(double E, double U_contact, double t0);

std::vector<double> build_potential(const PotentialSpec& spec, int n_sites,
                                    double length_nm);

DeviceSpec make_device(int n_sites, double length_nm, double m_rel,
                       const PotentialSpec& potential, double source_onsite_ev,
                       double drain_onsite_ev, double eta_ev);

// Full diagonal of H - (kinetic part): potential everywhere, contact on-site
// offsets plus lead self-energies folded into sites 0 and n_sites - 1.
Eigen::VectorXcd device_diagonal(const DeviceSpec& device, double E);

// Direct dense A(E) = (E + i eta) I - H0 - diag(d); the verification route
// independent of the operator-sum builders.
Eigen::MatrixXcd assemble_dense(const DeviceSpec& device, double E);
Eigen::MatrixXcd assemble_block_dense(const DeviceSpec& device,
                                      const EnergyGrid& grid);

AssembledSystem assemble_system(const DeviceSpec& device, double E,
                                ColumnRole column);

// Energy-parallel system over (energy | column | site) with energy as the
// most significant bits; refuses more than 2^20 amplitudes.
AssembledSystem assemble_block_system(const DeviceSpec& device,
                                      const EnergyGrid& grid);

}  // namespace vqnegf
