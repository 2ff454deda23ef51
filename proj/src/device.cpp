// SPDX-License-Identifier: Apache-2.0
#include "vqnegf/device.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

#include "vqnegf/constants.hpp"

namespace vqnegf {

namespace {

using std::uint64_t;

bool is_power_of_two(uint64_t x) { return x != 0 && (x & (x - 1)) == 0; }

double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

int log2_exact(uint64_t x) { return std::countr_zero(x); }

}  // namespace

EnergyGrid uniform_grid(double min_ev, double max_ev, int count) {
  if (count < 1) throw std::invalid_argument("grid needs at least one point");
  EnergyGrid grid;
  grid.energies.resize(count);
  if (count == 1) {
    grid.energies[0] = 0.5 * (min_ev + max_ev);
    return grid;
  }
  const double step = (max_ev - min_ev) / (count - 1);
  for (int k = 0; k < count; ++k) grid.energies[k] = min_ev + k * step;
  return grid;
}

double hopping_energy(double m_rel, double a_nm) {
  if (m_rel <= 0.0 || a_nm <= 0.0) {
    throw std::invalid_argument("mass and spacing must be positive");
  }
  return constants::hbar2_over_2m0_ev_nm2 / (m_rel * a_nm * a_nm);
}

Complex lead_self_energy(double E, double U_contact, double t0) {
  if (t0 <= 0.0) throw std::invalid_argument("t0 must be positive");
  const double z = 1.0 - (E - U_contact) / (2.0 * t0);  // cos(ka)
  if (z >= 1.0) {
    // At or below the band bottom: decaying branch with e^{ika} in (0, 1].
    return Complex(-t0 * (z - std::sqrt(z * z - 1.0)), 0.0);
  }
  if (z <= -1.0) {
    // At or above the band top: decaying branch with e^{ika} in [-1, 0).
    return Complex(-t0 * (z + std::sqrt(z * z - 1.0)), 0.0);
  }
  return -t0 * Complex(z, std::sqrt(1.0 - z * z));
}

double lead_broadening(double E, double U_contact, double t0) {
  return -2.0 * lead_self_energy(E, U_contact, t0).imag();
}

std::vector<double> build_potential(const PotentialSpec& spec, int n_sites,
                                    double length_nm) {
  std::vector<double> u(n_sites, 0.0);
  switch (spec.kind) {
    case PotentialSpec::Kind::flat:
      for (double& v : u) v = spec.flat_value_ev;
      break;
    case PotentialSpec::Kind::logistic_barrier: {
      if (spec.width_nm <= 0.0) throw std::invalid_argument("barrier width must be positive");
      if (spec.x2_nm <= spec.x1_nm) throw std::invalid_argument("barrier needs x2 > x1");
      const double a = length_nm / n_sites;
      for (int i = 0; i < n_sites; ++i) {
        const double x = (i + 0.5) * a;
        u[i] = spec.barrier_height_ev *
               (logistic((x - spec.x1_nm) / spec.width_nm) -
                logistic((x - spec.x2_nm) / spec.width_nm));
      }
      break;
    }
    case PotentialSpec::Kind::samples:
      if (static_cast<int>(spec.samples_ev.size()) != n_sites) {
        throw std::invalid_argument("sample count must equal n_sites");
      }
      u = spec.samples_ev;
      break;
  }
  return u;
}

DeviceSpec make_device(int n_sites, double length_nm, double m_rel,
                       const PotentialSpec& potential, double source_onsite_ev,
                       double drain_onsite_ev, double eta_ev) {
  if (n_sites < 4 || !is_power_of_two(static_cast<uint64_t>(n_sites))) {
    throw std::invalid_argument("n_sites must be a power of two >= 4");
  }
  if (length_nm <= 0.0) throw std::invalid_argument("length must be positive");
  if (eta_ev <= 0.0) throw std::invalid_argument("eta must be positive");
  DeviceSpec d;
  d.n_sites = n_sites;
  d.length_nm = length_nm;
  d.a_nm = length_nm / n_sites;
  d.m_rel = m_rel;
  d.t0_ev = hopping_energy(m_rel, d.a_nm);
  d.potential_ev = build_potential(potential, n_sites, length_nm);
  d.contact_onsite_source_ev = source_onsite_ev;
  d.contact_onsite_drain_ev = drain_onsite_ev;
  d.eta_ev = eta_ev;
  return d;
}

Eigen::VectorXcd device_diagonal(const DeviceSpec& device, double E) {
  const int n = device.n_sites;
  Eigen::VectorXcd d(n);
  for (int i = 0; i < n; ++i) d(i) = Complex(device.potential_ev[i], 0.0);
  d(0) += device.contact_onsite_source_ev +
          lead_self_energy(E, device.contact_onsite_source_ev, device.t0_ev);
  d(n - 1) += device.contact_onsite_drain_ev +
              lead_self_energy(E, device.contact_onsite_drain_ev, device.t0_ev);
  return d;
}

Eigen::MatrixXcd assemble_dense(const DeviceSpec& device, double E) {
  const int n = device.n_sites;
  const Eigen::VectorXcd d = device_diagonal(device, E);
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    a(i, i) = Complex(E, device.eta_ev) - 2.0 * device.t0_ev - d(i);
    if (i + 1 < n) {
      a(i, i + 1) = device.t0_ev;
      a(i + 1, i) = device.t0_ev;
    }
  }
  return a;
}

Eigen::MatrixXcd assemble_block_dense(const DeviceSpec& device,
                                      const EnergyGrid& grid) {
  const int n_e = static_cast<int>(grid.energies.size());
  const int block = device.n_sites;
  const int dim = 2 * n_e * block;
  if (dim > 4096) throw std::invalid_argument("dense block system too large");
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(dim, dim);
  for (int e = 0; e < n_e; ++e) {
    const Eigen::MatrixXcd ae = assemble_dense(device, grid.energies[e]);
    for (int c = 0; c < 2; ++c) {
      const int offset = (2 * e + c) * block;
      a.block(offset, offset, block, block) = ae;
    }
  }
  return a;
}

AssembledSystem assemble_system(const DeviceSpec& device, double E,
                                ColumnRole column) {
  const auto n_sites = static_cast<uint64_t>(device.n_sites);
  const int n = log2_exact(n_sites);
  AssembledSystem sys;
  sys.n_qubits = n;
  sys.site_bits = n;
  sys.is_block = false;
  sys.energies = {E};
  sys.column = column;

  const Eigen::VectorXcd d = device_diagonal(device, E);
  sys.A_sum = build_A(n, E, device.eta_ev, build_h0(n, device.t0_ev), d);
  sys.adaga_sum = build_AdagA(n, E, device.eta_ev, device.t0_ev, d);
  sys.A_dense = assemble_dense(device, E);

  const uint64_t index = column == ColumnRole::source ? 0 : n_sites - 1;
  sys.b = Eigen::VectorXcd::Zero(n_sites);
  sys.b(index) = Complex(1.0, 0.0);
  sys.b_norm = 1.0;
  sys.b_basis_index = static_cast<std::int64_t>(index);
  sys.ub = UbSpec{n, 0, 0, index};
  return sys;
}

AssembledSystem assemble_block_system(const DeviceSpec& device,
                                      const EnergyGrid& grid) {
  const auto n_sites = static_cast<uint64_t>(device.n_sites);
  const auto n_e = static_cast<uint64_t>(grid.energies.size());
  if (!is_power_of_two(n_e)) {
    throw std::invalid_argument("block assembly needs a power-of-two energy count");
  }
  const int site_bits = log2_exact(n_sites);
  const int energy_bits = log2_exact(n_e);
  const int n = site_bits + 1 + energy_bits;
  const uint64_t dim = uint64_t{1} << n;
  if (dim > (uint64_t{1} << 20)) {
    throw std::invalid_argument("block system exceeds 2^20 amplitudes");
  }

  AssembledSystem sys;
  sys.n_qubits = n;
  sys.site_bits = site_bits;
  sys.is_block = true;
  sys.energies = grid.energies;

  const uint64_t site_mask = n_sites - 1;
  Eigen::VectorXcd delta(dim);
  std::vector<std::pair<uint64_t, Complex>> spikes;
  for (uint64_t e = 0; e < n_e; ++e) {
    const double E = grid.energies[e];
    const Eigen::VectorXcd d = device_diagonal(device, E);
    for (uint64_t c = 0; c < 2; ++c) {
      const uint64_t offset = (e * 2 + c) << site_bits;
      for (uint64_t s = 0; s < n_sites; ++s) {
        delta(offset | s) = Complex(E, device.eta_ev) - d(s);
      }
      spikes.emplace_back(offset, delta(offset));
      spikes.emplace_back(offset | site_mask, delta(offset | site_mask));
    }
  }
  Eigen::VectorXcd delta_z = delta;
  for (const auto& [idx, v] : spikes) delta_z(idx) = Complex(0.0, 0.0);

  sys.A_sum.n_qubits = n;
  detail::append_diagonal_terms(sys.A_sum, n, delta_z, spikes, 1e-12,
                                Complex(1.0, 0.0));
  for (const OperatorTerm& t : build_h0_embedded(n, site_bits, device.t0_ev).terms) {
    OperatorTerm neg = t;
    neg.coeff = -t.coeff;
    sys.A_sum.terms.push_back(std::move(neg));
  }

  sys.adaga_sum.n_qubits = n;
  sys.adaga_sum.hermitian_hint = true;
  Eigen::VectorXcd delta_sq(dim);
  for (uint64_t i = 0; i < dim; ++i) delta_sq(i) = std::norm(delta_z(i));
  std::vector<std::pair<uint64_t, Complex>> spikes_sq;
  spikes_sq.reserve(spikes.size());
  for (const auto& [idx, v] : spikes) {
    spikes_sq.emplace_back(idx, Complex(std::norm(v), 0.0));
  }
  detail::append_diagonal_terms(sys.adaga_sum, n, delta_sq, spikes_sq, 1e-12,
                                Complex(1.0, 0.0));
  for (OperatorTerm& t : build_h0_squared_embedded(n, site_bits, device.t0_ev).terms) {
    sys.adaga_sum.terms.push_back(std::move(t));
  }
  detail::append_h0_cross_terms(sys.adaga_sum, n, site_bits, device.t0_ev, -1.0,
                                delta_z, spikes, 1e-12);

  if (n <= 12) sys.A_dense = assemble_block_dense(device, grid);

  sys.b = Eigen::VectorXcd::Zero(dim);
  for (uint64_t e = 0; e < n_e; ++e) {
    sys.b((e * 2) << site_bits) = Complex(1.0, 0.0);
    sys.b(((e * 2 + 1) << site_bits) | site_mask) = Complex(1.0, 0.0);
  }
  sys.b_norm = std::sqrt(2.0 * static_cast<double>(n_e));
  sys.b /= sys.b_norm;
  sys.b_basis_index = -1;

  const uint64_t high_mask = (dim - 1) & ~site_mask;
  sys.ub = UbSpec{n, high_mask, uint64_t{1} << site_bits, site_mask};
  return sys;
}

}  // namespace vqnegf
