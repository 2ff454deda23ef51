// SPDX-License-Identifier: Apache-2.0
#include "vqnegf/oracle.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "vqnegf/constants.hpp"

namespace vqnegf {

Eigen::VectorXcd solve_dense(const Eigen::MatrixXcd& A,
                             const Eigen::VectorXcd& b) {
  if (A.rows() != A.cols() || A.rows() != b.size()) {
    throw std::invalid_argument("solve_dense dimension mismatch");
  }
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
  const double max_entry = A.cwiseAbs().maxCoeff();
  const double min_pivot = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
  if (min_pivot < 1e-14 * max_entry) {
    throw std::runtime_error("matrix singular to pivot tolerance");
  }
  return lu.solve(b);
}

std::pair<Eigen::VectorXcd, Eigen::VectorXcd> green_columns(
    const DeviceSpec& device, double E) {
  const Eigen::MatrixXcd a = assemble_dense(device, E);
  const int n = device.n_sites;
  Eigen::VectorXcd e0 = Eigen::VectorXcd::Zero(n);
  Eigen::VectorXcd en = Eigen::VectorXcd::Zero(n);
  e0(0) = Complex(1.0, 0.0);
  en(n - 1) = Complex(1.0, 0.0);
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a);
  const double max_entry = a.cwiseAbs().maxCoeff();
  if (lu.matrixLU().diagonal().cwiseAbs().minCoeff() < 1e-14 * max_entry) {
    throw std::runtime_error("matrix singular to pivot tolerance");
  }
  return {lu.solve(e0), lu.solve(en)};
}

double transmission(const Eigen::VectorXcd& g_drain, double gamma1,
                    double gamma2) {
  if (gamma1 < 0.0 || gamma2 < 0.0) {
    throw std::invalid_argument("broadenings must be nonnegative");
  }
  return gamma1 * gamma2 * std::norm(g_drain(0));
}

Eigen::VectorXd ldos(const Eigen::VectorXcd& g_source,
                     const Eigen::VectorXcd& g_drain, double gamma1,
                     double gamma2) {
  const auto n = g_source.size();
  Eigen::VectorXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out(i) = (gamma1 * std::norm(g_source(i)) + gamma2 * std::norm(g_drain(i))) /
             (2.0 * std::numbers::pi);
  }
  return out;
}

double fermi_occupation(double E, double mu, double temperature_k) {
  if (temperature_k <= 0.0) {
    throw std::invalid_argument("temperature must be positive");
  }
  const double x = (E - mu) / (constants::boltzmann_ev_per_k * temperature_k);
  if (x > 40.0) return std::exp(-x);
  return 1.0 / (1.0 + std::exp(x));
}

CurrentSpectrum current_spectrum(const std::vector<double>& transmission,
                                 const std::vector<double>& energies,
                                 double mu1, double mu2, double temperature_k) {
  if (transmission.size() != energies.size()) {
    throw std::invalid_argument("current_spectrum length mismatch");
  }
  CurrentSpectrum out;
  out.j.resize(transmission.size());
  for (std::size_t k = 0; k < transmission.size(); ++k) {
    out.j[k] = transmission[k] * (fermi_occupation(energies[k], mu1, temperature_k) -
                                  fermi_occupation(energies[k], mu2, temperature_k));
  }
  if (energies.size() >= 2) {
    const double de = energies[1] - energies[0];
    double sum = 0.0;
    for (const double j : out.j) sum += j;
    out.total_current_a = constants::two_q_over_h_a_per_ev * sum * de;
  }
  return out;
}

double mse(const Eigen::VectorXcd& x, const Eigen::VectorXcd& y) {
  if (x.size() != y.size()) throw std::invalid_argument("mse length mismatch");
  return (x - y).squaredNorm() / static_cast<double>(x.size());
}

TransportResult transport_sweep(const DeviceSpec& device,
                                const std::vector<double>& energies,
                                double mu1, double mu2, double temperature_k) {
  TransportResult r;
  r.energies = energies;
  const auto n_e = static_cast<Eigen::Index>(energies.size());
  r.ldos.resize(device.n_sites, n_e);
  r.g_source.resize(device.n_sites, n_e);
  r.g_drain.resize(device.n_sites, n_e);
  r.gamma1.resize(energies.size());
  r.gamma2.resize(energies.size());
  r.transmission.resize(energies.size());
  for (Eigen::Index k = 0; k < n_e; ++k) {
    const double E = energies[k];
    const auto [gs, gd] = green_columns(device, E);
    const double g1 = lead_broadening(E, device.contact_onsite_source_ev, device.t0_ev);
    const double g2 = lead_broadening(E, device.contact_onsite_drain_ev, device.t0_ev);
    r.g_source.col(k) = gs;
    r.g_drain.col(k) = gd;
    r.gamma1[k] = g1;
    r.gamma2[k] = g2;
    r.transmission[k] = transmission(gd, g1, g2);
    r.ldos.col(k) = ldos(gs, gd, g1, g2);
  }
  r.current = current_spectrum(r.transmission, r.energies, mu1, mu2, temperature_k);
  return r;
}

Eigen::VectorXcd block_oracle_vector(const DeviceSpec& device,
                                     const EnergyGrid& grid) {
  const auto n_e = grid.energies.size();
  const int block = device.n_sites;
  Eigen::VectorXcd x(static_cast<Eigen::Index>(2 * n_e * block));
  for (std::size_t e = 0; e < n_e; ++e) {
    const auto [gs, gd] = green_columns(device, grid.energies[e]);
    x.segment(static_cast<Eigen::Index>((2 * e) * block), block) = gs;
    x.segment(static_cast<Eigen::Index>((2 * e + 1) * block), block) = gd;
  }
  return x;
}

}  // namespace vqnegf
