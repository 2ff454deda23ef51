// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include <Eigen/Dense>

#include "vqnegf/device.hpp"

namespace vqnegf {

// Direct LU solve with row pivoting; refuses matrices whose smallest pivot
// falls below 1e-14 times the largest entry magnitude.
Eigen::VectorXcd solve_dense(const Eigen::MatrixXcd& A,
                             const Eigen::VectorXcd& b);

// Columns of the retarded Green's function: solutions of A(E) g = e_0 and
// A(E) g = e_{N-1}.
std::pair<Eigen::VectorXcd, Eigen::VectorXcd> green_columns(
    const DeviceSpec& device, double E);

// Single-channel reduction T = Gamma1 Gamma2 |G(0, N-1)|^2.
double transmission(const Eigen::VectorXcd& g_drain, double gamma1,
                    double gamma2);

// Spectral-injection form [Gamma1 |G(x,0)|^2 + Gamma2 |G(x,N-1)|^2] / (2 pi).
Eigen::VectorXd ldos(const Eigen::VectorXcd& g_source,
                     const Eigen::VectorXcd& g_drain, double gamma1,
                     double gamma2);

double fermi_occupation(double E, double mu, double temperature_k);

struct CurrentSpectrum {
  std::vector<double> j;    // T(E) * [f(E, mu1) - f(E, mu2)]
  double total_current_a = 0.0;  // (2q/h) * sum J dE
};
CurrentSpectrum current_spectrum(const std::vector<double>& transmission,
                                 const std::vector<double>& energies,
                                 double mu1, double mu2, double temperature_k);

double mse(const Eigen::VectorXcd& x, const Eigen::VectorXcd& y);

struct TransportResult {
  std::vector<double> energies;
  std::vector<double> gamma1;
  std::vector<double> gamma2;
  std::vector<double> transmission;
  CurrentSpectrum current;
  Eigen::MatrixXd ldos;           // n_sites x n_energies
  Eigen::MatrixXcd g_source;      // n_sites x n_energies
  Eigen::MatrixXcd g_drain;
};

TransportResult transport_sweep(const DeviceSpec& device,
                                const std::vector<double>& energies,
                                double mu1, double mu2, double temperature_k);

// Physical-scale solution of the energy-parallel system, assembled from
// per-energy dense solves in block layout order.
Eigen::VectorXcd block_oracle_vector(const DeviceSpec& device,
                                     const EnergyGrid& grid);

}  // namespace vqnegf
