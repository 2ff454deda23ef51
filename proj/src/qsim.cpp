// SPDX-License-Identifier: Apache-2.0
#include "vqnegf/qsim.hpp"

#include <bit>
#include <cmath>

namespace vqnegf {

namespace {

using std::uint64_t;

uint64_t window_mask(int base, int m) {
  return ((uint64_t{1} << m) - 1) << base;
}

uint64_t window_increment(uint64_t i, int base, int m) {
  const uint64_t mask = window_mask(base, m);
  const uint64_t w = (i & mask) >> base;
  const uint64_t span = (uint64_t{1} << m) - 1;
  return (i & ~mask) | (((w + 1) & span) << base);
}

uint64_t window_decrement(uint64_t i, int base, int m) {
  const uint64_t mask = window_mask(base, m);
  const uint64_t w = (i & mask) >> base;
  const uint64_t span = (uint64_t{1} << m) - 1;
  return (i & ~mask) | (((w + span) & span) << base);
}

struct TermMasks {
  uint64_t flip = 0;   // bits carrying X or Y
  uint64_t sign = 0;   // bits carrying Y or Z
  int y_count = 0;
};

TermMasks term_masks(const PauliString& p) {
  TermMasks m;
  for (int q = 0; q < p.n_qubits; ++q) {
    const uint64_t bit = uint64_t{1} << (p.n_qubits - 1 - q);
    switch (p.symbols[q]) {
      case PauliSymbol::I: break;
      case PauliSymbol::X: m.flip |= bit; break;
      case PauliSymbol::Y: m.flip |= bit; m.sign |= bit; ++m.y_count; break;
      case PauliSymbol::Z: m.sign |= bit; break;
    }
  }
  return m;
}

Complex i_power(int k) {
  switch (k & 3) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

void validate_gate(int n_qubits, const Gate& g) {
  if (g.target < 0 || g.target >= n_qubits) {
    throw std::invalid_argument("gate target out of range");
  }
  const bool controlled = g.kind == GateKind::CRY || g.kind == GateKind::CRZ;
  if (controlled) {
    if (g.control < 0 || g.control >= n_qubits) {
      throw std::invalid_argument("gate control out of range");
    }
    if (g.control == g.target) {
      throw std::invalid_argument("gate control equals target");
    }
  }
}

template <typename Body>
void for_target_pairs(int n_qubits, int target, int control, Body&& body) {
  const uint64_t dim = uint64_t{1} << n_qubits;
  const uint64_t tmask = uint64_t{1} << (n_qubits - 1 - target);
  const uint64_t cmask =
      control < 0 ? 0 : uint64_t{1} << (n_qubits - 1 - control);
  for (uint64_t i = 0; i < dim; ++i) {
    if (i & tmask) continue;
    if (cmask && !(i & cmask)) continue;
    body(i, i | tmask);
  }
}

}  // namespace

QState basis_state(int n_qubits, uint64_t index) {
  const uint64_t dim = uint64_t{1} << n_qubits;
  if (index >= dim) throw std::invalid_argument("basis index out of range");
  QState s;
  s.n_qubits = n_qubits;
  s.amplitudes = Eigen::VectorXcd::Zero(dim);
  s.amplitudes(index) = Complex(1.0, 0.0);
  return s;
}

QState state_from_vector(int n_qubits, Eigen::VectorXcd amplitudes) {
  if (static_cast<uint64_t>(amplitudes.size()) != (uint64_t{1} << n_qubits)) {
    throw std::invalid_argument("amplitude count mismatch");
  }
  return QState{n_qubits, std::move(amplitudes)};
}

bool gate_is_parameterized(GateKind kind) { return kind != GateKind::X; }

QState apply_circuit(const QState& state, const Circuit& circuit) {
  if (state.n_qubits != circuit.n_qubits) {
    throw std::invalid_argument("state and circuit qubit counts differ");
  }
  QState out{state.n_qubits, state.amplitudes};
  for (const Gate& g : circuit.gates) {
    detail::apply_gate_inplace(out.amplitudes, out.n_qubits, g);
  }
  return out;
}

QState apply_shift(const QState& state, int m, bool adjoint) {
  if (m < 1 || m > state.n_qubits) {
    throw std::invalid_argument("shift width out of range");
  }
  const int base = state.n_qubits - m;
  const uint64_t dim = uint64_t{1} << state.n_qubits;
  QState out{state.n_qubits, Eigen::VectorXcd(dim)};
  for (uint64_t i = 0; i < dim; ++i) {
    const uint64_t j = adjoint ? window_decrement(i, base, m)
                               : window_increment(i, base, m);
    out.amplitudes(j) = state.amplitudes(i);
  }
  return out;
}

Eigen::VectorXcd apply_operator_sum(const QState& state, const OperatorSum& op) {
  if (state.n_qubits != op.n_qubits) {
    throw std::invalid_argument("state and operator qubit counts differ");
  }
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(state.amplitudes.size());
  for (const OperatorTerm& t : op.terms) {
    detail::apply_term(out, state.amplitudes, state.n_qubits, t);
  }
  return out;
}

Complex expectation(const QState& state, const OperatorSum& op) {
  const Complex value = state.amplitudes.dot(apply_operator_sum(state, op));
  if (op.hermitian_hint) {
    if (std::abs(value.imag()) > 1e-8) {
      throw std::runtime_error(
          "Hermitian-flagged operator produced an imaginary expectation");
    }
    return Complex(value.real(), 0.0);
  }
  return value;
}

Complex transition_amplitude(const QState& bra, const OperatorSum& op,
                             const QState& ket) {
  if (bra.n_qubits != ket.n_qubits) {
    throw std::invalid_argument("bra and ket qubit counts differ");
  }
  return bra.amplitudes.dot(apply_operator_sum(ket, op));
}

namespace detail {

Eigen::Matrix2cd gate_matrix(GateKind kind, double angle) {
  Eigen::Matrix2cd m;
  const double c = std::cos(angle / 2.0);
  const double s = std::sin(angle / 2.0);
  switch (kind) {
    case GateKind::RX:
      m << Complex(c, 0.0), Complex(0.0, -s), Complex(0.0, -s), Complex(c, 0.0);
      break;
    case GateKind::RY:
    case GateKind::CRY:
      m << Complex(c, 0.0), Complex(-s, 0.0), Complex(s, 0.0), Complex(c, 0.0);
      break;
    case GateKind::RZ:
    case GateKind::CRZ:
      m << Complex(c, -s), Complex(0.0, 0.0), Complex(0.0, 0.0), Complex(c, s);
      break;
    case GateKind::X:
      m << Complex(0.0, 0.0), Complex(1.0, 0.0), Complex(1.0, 0.0),
          Complex(0.0, 0.0);
      break;
  }
  return m;
}

Eigen::Matrix2cd gate_matrix_derivative(GateKind kind, double angle) {
  if (!gate_is_parameterized(kind)) {
    throw std::invalid_argument("gate has no angle to differentiate");
  }
  Eigen::Matrix2cd m;
  const double c = 0.5 * std::cos(angle / 2.0);
  const double s = 0.5 * std::sin(angle / 2.0);
  switch (kind) {
    case GateKind::RX:
      m << Complex(-s, 0.0), Complex(0.0, -c), Complex(0.0, -c), Complex(-s, 0.0);
      break;
    case GateKind::RY:
    case GateKind::CRY:
      m << Complex(-s, 0.0), Complex(-c, 0.0), Complex(c, 0.0), Complex(-s, 0.0);
      break;
    default:
      m << Complex(-s, -c), Complex(0.0, 0.0), Complex(0.0, 0.0),
          Complex(-s, c);
      break;
  }
  return m;
}

void apply_gate_inplace(Eigen::VectorXcd& amps, int n_qubits, const Gate& g) {
  validate_gate(n_qubits, g);
  const bool controlled = g.kind == GateKind::CRY || g.kind == GateKind::CRZ;
  const Eigen::Matrix2cd u = gate_matrix(g.kind, g.angle);
  for_target_pairs(n_qubits, g.target, controlled ? g.control : -1,
                   [&](uint64_t i0, uint64_t i1) {
                     const Complex a = amps(i0);
                     const Complex b = amps(i1);
                     amps(i0) = u(0, 0) * a + u(0, 1) * b;
                     amps(i1) = u(1, 0) * a + u(1, 1) * b;
                   });
}

void apply_gate_adjoint_inplace(Eigen::VectorXcd& amps, int n_qubits,
                                const Gate& g) {
  validate_gate(n_qubits, g);
  const bool controlled = g.kind == GateKind::CRY || g.kind == GateKind::CRZ;
  const Eigen::Matrix2cd u = gate_matrix(g.kind, g.angle).adjoint();
  for_target_pairs(n_qubits, g.target, controlled ? g.control : -1,
                   [&](uint64_t i0, uint64_t i1) {
                     const Complex a = amps(i0);
                     const Complex b = amps(i1);
                     amps(i0) = u(0, 0) * a + u(0, 1) * b;
                     amps(i1) = u(1, 0) * a + u(1, 1) * b;
                   });
}

Eigen::VectorXcd apply_gate_derivative(const Eigen::VectorXcd& amps,
                                       int n_qubits, const Gate& g) {
  validate_gate(n_qubits, g);
  const bool controlled = g.kind == GateKind::CRY || g.kind == GateKind::CRZ;
  const Eigen::Matrix2cd du = gate_matrix_derivative(g.kind, g.angle);
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(amps.size());
  for_target_pairs(n_qubits, g.target, controlled ? g.control : -1,
                   [&](uint64_t i0, uint64_t i1) {
                     const Complex a = amps(i0);
                     const Complex b = amps(i1);
                     out(i0) = du(0, 0) * a + du(0, 1) * b;
                     out(i1) = du(1, 0) * a + du(1, 1) * b;
                   });
  return out;
}

void apply_hadamard_inplace(Eigen::VectorXcd& amps, int n_qubits, int bit) {
  if (bit < 0 || bit >= n_qubits) {
    throw std::invalid_argument("hadamard bit out of range");
  }
  const uint64_t dim = uint64_t{1} << n_qubits;
  const uint64_t mask = uint64_t{1} << bit;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (uint64_t i = 0; i < dim; ++i) {
    if (i & mask) continue;
    const Complex a = amps(i);
    const Complex b = amps(i | mask);
    amps(i) = (a + b) * inv_sqrt2;
    amps(i | mask) = (a - b) * inv_sqrt2;
  }
}

void apply_term(Eigen::VectorXcd& out, const Eigen::VectorXcd& in, int n_qubits,
                const OperatorTerm& term) {
  if (term.shift_m < 0 || term.shift_base < 0 ||
      term.shift_base + term.shift_m > n_qubits) {
    throw std::invalid_argument("term shift window out of range");
  }
  const uint64_t dim = uint64_t{1} << n_qubits;
  const TermMasks masks = term_masks(term.pauli);
  const Complex y_phase = i_power(masks.y_count);
  const int base = term.shift_base;
  const int m = term.shift_m;

  if (term.dyad) {
    const Dyad& d = *term.dyad;
    if (m > 0 && base + m > d.width) {
      throw std::invalid_argument("shift window exceeds dyad window");
    }
    const int high_bits = n_qubits - d.width;
    for (uint64_t h = 0; h < (uint64_t{1} << high_bits); ++h) {
      const uint64_t bra_full = (h << d.width) | d.bra;
      const uint64_t ket_full = (h << d.width) | d.ket;
      const uint64_t src = m > 0 ? window_decrement(bra_full, base, m) : bra_full;
      const Complex sign =
          std::popcount(ket_full & masks.sign) & 1 ? -1.0 : 1.0;
      const uint64_t flipped = ket_full ^ masks.flip;
      const uint64_t dst = m > 0 ? window_decrement(flipped, base, m) : flipped;
      out(dst) += term.coeff * y_phase * sign * in(src);
    }
    return;
  }

  for (uint64_t i = 0; i < dim; ++i) {
    const uint64_t j = m > 0 ? window_increment(i, base, m) : i;
    const Complex sign = std::popcount(j & masks.sign) & 1 ? -1.0 : 1.0;
    const uint64_t flipped = j ^ masks.flip;
    const uint64_t dst = m > 0 ? window_decrement(flipped, base, m) : flipped;
    out(dst) += term.coeff * y_phase * sign * in(i);
  }
}

}  // namespace detail

}  // namespace vqnegf
