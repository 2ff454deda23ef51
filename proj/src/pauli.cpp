// SPDX-License-Identifier: Apache-2.0
#include "vqnegf/pauli.hpp"

#include <bit>
#include <cmath>

namespace vqnegf {

namespace {

using std::uint64_t;

bool is_power_of_two(uint64_t x) { return x != 0 && (x & (x - 1)) == 0; }

uint64_t window_mask(int base, int m) {
  return ((uint64_t{1} << m) - 1) << base;
}

uint64_t window_increment(uint64_t i, int base, int m) {
  const uint64_t mask = window_mask(base, m);
  const uint64_t w = (i & mask) >> base;
  const uint64_t wrapped = (w + 1) & ((uint64_t{1} << m) - 1);
  return (i & ~mask) | (wrapped << base);
}

Eigen::Matrix2cd symbol_matrix(PauliSymbol s) {
  const Complex one(1.0, 0.0);
  const Complex im(0.0, 1.0);
  Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
  switch (s) {
    case PauliSymbol::I: m(0, 0) = one; m(1, 1) = one; break;
    case PauliSymbol::X: m(0, 1) = one; m(1, 0) = one; break;
    case PauliSymbol::Y: m(0, 1) = -im; m(1, 0) = im; break;
    case PauliSymbol::Z: m(0, 0) = one; m(1, 1) = -one; break;
  }
  return m;
}

Eigen::MatrixXcd dense_pauli(const PauliString& p) {
  // Qubit 0 is the most significant factor, so it must end up outermost:
  // process qubits from least significant upward.
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Ones(1, 1);
  for (int q = p.n_qubits - 1; q >= 0; --q) {
    const Eigen::Matrix2cd f = symbol_matrix(p.symbols[q]);
    Eigen::MatrixXcd next(m.rows() * 2, m.cols() * 2);
    next.topLeftCorner(m.rows(), m.cols()) = f(0, 0) * m;
    next.topRightCorner(m.rows(), m.cols()) = f(0, 1) * m;
    next.bottomLeftCorner(m.rows(), m.cols()) = f(1, 0) * m;
    next.bottomRightCorner(m.rows(), m.cols()) = f(1, 1) * m;
    m.swap(next);
  }
  return m;
}

Eigen::MatrixXcd dense_shift_window(int n, int base, int m) {
  const auto dim = uint64_t{1} << n;
  Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(dim, dim);
  for (uint64_t i = 0; i < dim; ++i) {
    s(window_increment(i, base, m), i) = Complex(1.0, 0.0);
  }
  return s;
}

Eigen::MatrixXcd dense_dyad(int n, const Dyad& d) {
  const auto dim = uint64_t{1} << n;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  const int high_bits = n - d.width;
  for (uint64_t h = 0; h < (uint64_t{1} << high_bits); ++h) {
    m((h << d.width) | d.ket, (h << d.width) | d.bra) = Complex(1.0, 0.0);
  }
  return m;
}

OperatorTerm adjoint_term(const OperatorTerm& t) {
  OperatorTerm out = t;
  out.coeff = std::conj(t.coeff);
  if (t.dyad) {
    if (!t.pauli.is_identity()) {
      throw std::logic_error("adjoint of a term mixing dyad and non-identity Pauli");
    }
    out.dyad = Dyad{t.dyad->bra, t.dyad->ket, t.dyad->width};
  }
  return out;
}

// X on the lowest integer bit times an I/Z string: local single-qubit product.
OperatorTerm x0_times_z_string(int n, uint64_t z_mask, Complex coeff, int base,
                               int m) {
  PauliString p = PauliString::z_from_bit_mask(n, z_mask);
  const auto prod = detail::pauli_mul(PauliSymbol::X, p.symbols[n - 1]);
  p.symbols[n - 1] = prod.symbol;
  return make_pauli_term(coeff * prod.phase, std::move(p), base, m);
}

}  // namespace

PauliString PauliString::identity(int n) {
  return PauliString{n, std::vector<PauliSymbol>(n, PauliSymbol::I)};
}

PauliString PauliString::z_from_bit_mask(int n, uint64_t bit_mask) {
  PauliString p = identity(n);
  for (int k = 0; k < n; ++k) {
    if ((bit_mask >> k) & 1u) p.symbols[n - 1 - k] = PauliSymbol::Z;
  }
  return p;
}

bool PauliString::is_identity() const {
  for (const PauliSymbol s : symbols) {
    if (s != PauliSymbol::I) return false;
  }
  return true;
}

OperatorTerm make_pauli_term(Complex coeff, PauliString pauli, int shift_base,
                             int shift_m) {
  OperatorTerm t;
  t.coeff = coeff;
  t.pauli = std::move(pauli);
  t.shift_base = shift_base;
  t.shift_m = shift_m;
  return t;
}

OperatorTerm make_dyad_term(Complex coeff, int n_qubits, uint64_t ket,
                            uint64_t bra, int width, int shift_base,
                            int shift_m) {
  if (width < 1 || width > n_qubits) {
    throw std::invalid_argument("dyad width out of range");
  }
  if (ket >= (uint64_t{1} << width) || bra >= (uint64_t{1} << width)) {
    throw std::invalid_argument("dyad index exceeds its window");
  }
  OperatorTerm t;
  t.coeff = coeff;
  t.pauli = PauliString::identity(n_qubits);
  t.shift_base = shift_base;
  t.shift_m = shift_m;
  t.dyad = Dyad{ket, bra, width};
  return t;
}

DiagonalDecomposition decompose_diagonal(const Eigen::VectorXcd& d,
                                         double rel_threshold) {
  const auto size = static_cast<uint64_t>(d.size());
  if (!is_power_of_two(size)) {
    throw std::invalid_argument("diagonal length not a power of two");
  }
  if (rel_threshold < 0.0 || rel_threshold >= 1.0) {
    throw std::invalid_argument("rel_threshold must be in [0, 1)");
  }
  const int n = std::countr_zero(size);

  Eigen::VectorXcd c = d;
  for (uint64_t len = 1; len < size; len <<= 1) {
    for (uint64_t i = 0; i < size; i += len << 1) {
      for (uint64_t j = i; j < i + len; ++j) {
        const Complex a = c(j);
        const Complex b = c(j + len);
        c(j) = a + b;
        c(j + len) = a - b;
      }
    }
  }
  c /= static_cast<double>(size);

  double max_mag = 0.0;
  for (uint64_t s = 0; s < size; ++s) max_mag = std::max(max_mag, std::abs(c(s)));
  const double cutoff = rel_threshold * max_mag;

  DiagonalDecomposition result;
  result.op.n_qubits = n;
  Eigen::VectorXcd dropped = Eigen::VectorXcd::Zero(size);
  for (uint64_t s = 0; s < size; ++s) {
    if (std::abs(c(s)) == 0.0) continue;
    if (std::abs(c(s)) < cutoff) {
      dropped(s) = c(s);
      continue;
    }
    result.op.terms.push_back(
        make_pauli_term(c(s), PauliString::z_from_bit_mask(n, s)));
  }

  if (dropped.squaredNorm() > 0.0) {
    for (uint64_t len = 1; len < size; len <<= 1) {
      for (uint64_t i = 0; i < size; i += len << 1) {
        for (uint64_t j = i; j < i + len; ++j) {
          const Complex a = dropped(j);
          const Complex b = dropped(j + len);
          dropped(j) = a + b;
          dropped(j + len) = a - b;
        }
      }
    }
    result.truncation_error = dropped.cwiseAbs().maxCoeff();
  }
  return result;
}

Eigen::VectorXcd shift_conjugate_diagonal(const Eigen::VectorXcd& d) {
  const auto size = static_cast<uint64_t>(d.size());
  if (!is_power_of_two(size)) {
    throw std::invalid_argument("diagonal length not a power of two");
  }
  return detail::shift_conjugate_diagonal_window(d, std::countr_zero(size));
}

OperatorSum build_h0(int n, double t0) { return build_h0_embedded(n, n, t0); }

OperatorSum build_h0_embedded(int n_total, int site_bits, double t0) {
  if (site_bits < 2) throw std::invalid_argument("site register needs >= 2 qubits");
  if (n_total < site_bits) throw std::invalid_argument("register smaller than site window");
  OperatorSum h0;
  h0.n_qubits = n_total;
  h0.hermitian_hint = true;

  PauliString x_low = PauliString::identity(n_total);
  x_low.symbols[n_total - 1] = PauliSymbol::X;

  h0.terms.push_back(make_pauli_term(2.0 * t0, PauliString::identity(n_total)));
  h0.terms.push_back(make_pauli_term(-t0, x_low));
  h0.terms.push_back(make_pauli_term(-t0, x_low, 0, site_bits));
  h0.terms.push_back(make_dyad_term(t0, n_total, 0, 1, site_bits, 0, site_bits));
  h0.terms.push_back(make_dyad_term(t0, n_total, 1, 0, site_bits, 0, site_bits));
  return h0;
}

OperatorSum build_h0_squared(int n, double t0) {
  return build_h0_squared_embedded(n, n, t0);
}

OperatorSum build_h0_squared_embedded(int n_total, int site_bits, double t0) {
  if (site_bits < 2) throw std::invalid_argument("site register needs >= 2 qubits");
  if (n_total < site_bits) throw std::invalid_argument("register smaller than site window");
  const double t2 = t0 * t0;
  const int r = site_bits;
  OperatorSum sq;
  sq.n_qubits = n_total;
  sq.hermitian_hint = true;

  PauliString x_bit0 = PauliString::identity(n_total);
  x_bit0.symbols[n_total - 1] = PauliSymbol::X;
  PauliString x_bit1 = PauliString::identity(n_total);
  x_bit1.symbols[n_total - 2] = PauliSymbol::X;

  sq.terms.push_back(make_pauli_term(6.0 * t2, PauliString::identity(n_total)));
  sq.terms.push_back(make_pauli_term(-4.0 * t2, x_bit0));
  sq.terms.push_back(make_pauli_term(-4.0 * t2, x_bit0, 0, r));
  sq.terms.push_back(make_dyad_term(4.0 * t2, n_total, 0, 1, r, 0, r));
  sq.terms.push_back(make_dyad_term(4.0 * t2, n_total, 1, 0, r, 0, r));
  sq.terms.push_back(make_dyad_term(-t2, n_total, 0, 0, r, 0, r));
  sq.terms.push_back(make_dyad_term(-t2, n_total, 1, 1, r, 0, r));
  sq.terms.push_back(make_pauli_term(t2, x_bit1));
  sq.terms.push_back(make_pauli_term(t2, x_bit1, 1, r - 1));
  sq.terms.push_back(make_dyad_term(-t2, n_total, 0, 2, r, 1, r - 1));
  sq.terms.push_back(make_dyad_term(-t2, n_total, 1, 3, r, 1, r - 1));
  sq.terms.push_back(make_dyad_term(-t2, n_total, 2, 0, r, 1, r - 1));
  sq.terms.push_back(make_dyad_term(-t2, n_total, 3, 1, r, 1, r - 1));
  return sq;
}

OperatorSum build_A(int n, double E, double eta, const OperatorSum& h0,
                    const Eigen::VectorXcd& d, double rel_threshold) {
  if (eta <= 0.0) throw std::invalid_argument("eta must be positive");
  const auto dim = uint64_t{1} << n;
  if (static_cast<uint64_t>(d.size()) != dim) {
    throw std::invalid_argument("diagonal length mismatch");
  }
  if (h0.n_qubits != n) throw std::invalid_argument("h0 register mismatch");

  OperatorSum a;
  a.n_qubits = n;
  a.terms.push_back(
      make_pauli_term(Complex(E, eta), PauliString::identity(n)));
  for (const OperatorTerm& t : h0.terms) {
    OperatorTerm neg = t;
    neg.coeff = -t.coeff;
    a.terms.push_back(std::move(neg));
  }

  std::vector<std::pair<uint64_t, Complex>> spikes{{0, d(0)},
                                                   {dim - 1, d(dim - 1)}};
  Eigen::VectorXcd zeroed = d;
  zeroed(0) = Complex(0.0, 0.0);
  zeroed(dim - 1) = Complex(0.0, 0.0);
  detail::append_diagonal_terms(a, n, zeroed, spikes, rel_threshold,
                                Complex(-1.0, 0.0));
  return a;
}

OperatorSum build_AdagA(int n, double E, double eta, double t0,
                        const Eigen::VectorXcd& d, double rel_threshold) {
  if (eta <= 0.0) throw std::invalid_argument("eta must be positive");
  const auto dim = uint64_t{1} << n;
  if (static_cast<uint64_t>(d.size()) != dim) {
    throw std::invalid_argument("diagonal length mismatch");
  }

  const Eigen::VectorXcd dtil = d.array() - Complex(0.0, eta);
  Eigen::VectorXcd dtil_z = dtil;
  dtil_z(0) = Complex(0.0, 0.0);
  dtil_z(dim - 1) = Complex(0.0, 0.0);
  const std::vector<std::pair<uint64_t, Complex>> spikes{
      {0, dtil(0)}, {dim - 1, dtil(dim - 1)}};

  OperatorSum q;
  q.n_qubits = n;
  q.hermitian_hint = true;

  q.terms.push_back(make_pauli_term(E * E, PauliString::identity(n)));
  for (const OperatorTerm& t : build_h0(n, t0).terms) {
    OperatorTerm scaled = t;
    scaled.coeff *= -2.0 * E;
    q.terms.push_back(std::move(scaled));
  }
  for (OperatorTerm& t : build_h0_squared(n, t0).terms) {
    q.terms.push_back(std::move(t));
  }

  Eigen::VectorXcd diag_pure(dim);
  for (uint64_t i = 0; i < dim; ++i) {
    diag_pure(i) = -2.0 * E * dtil_z(i).real() + std::norm(dtil_z(i));
  }
  std::vector<std::pair<uint64_t, Complex>> spikes_pure;
  spikes_pure.reserve(spikes.size());
  for (const auto& [idx, v] : spikes) {
    spikes_pure.emplace_back(idx, Complex(-2.0 * E * v.real() + std::norm(v), 0.0));
  }
  detail::append_diagonal_terms(q, n, diag_pure, spikes_pure, rel_threshold,
                                Complex(1.0, 0.0));
  detail::append_h0_cross_terms(q, n, n, t0, 1.0, dtil_z, spikes, rel_threshold);
  return q;
}

OperatorSum adjoint(const OperatorSum& op) {
  OperatorSum out;
  out.n_qubits = op.n_qubits;
  out.hermitian_hint = op.hermitian_hint;
  out.terms.reserve(op.terms.size());
  for (const OperatorTerm& t : op.terms) out.terms.push_back(adjoint_term(t));
  return out;
}

Eigen::MatrixXcd to_dense(const OperatorSum& op) {
  if (op.n_qubits > 12) throw std::invalid_argument("to_dense register too large");
  const auto dim = uint64_t{1} << op.n_qubits;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (const OperatorTerm& t : op.terms) {
    Eigen::MatrixXcd term = dense_pauli(t.pauli);
    if (t.dyad) term = term * dense_dyad(op.n_qubits, *t.dyad);
    if (t.shift_m > 0) {
      const Eigen::MatrixXcd s =
          dense_shift_window(op.n_qubits, t.shift_base, t.shift_m);
      term = s.adjoint() * term * s;
    }
    m += t.coeff * term;
  }
  return m;
}

namespace detail {

Eigen::VectorXcd shift_conjugate_diagonal_window(const Eigen::VectorXcd& d,
                                                 int window_bits) {
  const auto size = static_cast<uint64_t>(d.size());
  const uint64_t mask = (uint64_t{1} << window_bits) - 1;
  Eigen::VectorXcd out(d.size());
  for (uint64_t j = 0; j < size; ++j) {
    const uint64_t w = j & mask;
    const uint64_t src = (j & ~mask) | ((w + mask) & mask);
    out(j) = d(src);
  }
  return out;
}

SymbolProduct pauli_mul(PauliSymbol a, PauliSymbol b) {
  const Complex one(1.0, 0.0);
  const Complex im(0.0, 1.0);
  if (a == PauliSymbol::I) return {b, one};
  if (b == PauliSymbol::I) return {a, one};
  if (a == b) return {PauliSymbol::I, one};
  switch (a) {
    case PauliSymbol::X:
      return b == PauliSymbol::Y ? SymbolProduct{PauliSymbol::Z, im}
                                 : SymbolProduct{PauliSymbol::Y, -im};
    case PauliSymbol::Y:
      return b == PauliSymbol::Z ? SymbolProduct{PauliSymbol::X, im}
                                 : SymbolProduct{PauliSymbol::Z, -im};
    default:
      return b == PauliSymbol::X ? SymbolProduct{PauliSymbol::Y, im}
                                 : SymbolProduct{PauliSymbol::X, -im};
  }
}

void append_diagonal_terms(OperatorSum& out, int n_total,
                           const Eigen::VectorXcd& diag_zeroed,
                           const std::vector<std::pair<uint64_t, Complex>>& spikes,
                           double rel_threshold, Complex scale) {
  DiagonalDecomposition decomp = decompose_diagonal(diag_zeroed, rel_threshold);
  for (OperatorTerm& t : decomp.op.terms) {
    t.coeff *= scale;
    out.terms.push_back(std::move(t));
  }
  for (const auto& [idx, v] : spikes) {
    if (v == Complex(0.0, 0.0)) continue;
    out.terms.push_back(make_dyad_term(scale * v, n_total, idx, idx, n_total));
  }
}

void append_h0_cross_terms(OperatorSum& out, int n_total, int site_bits,
                           double t0, double prefactor,
                           const Eigen::VectorXcd& diag_zeroed,
                           const std::vector<std::pair<uint64_t, Complex>>& spikes,
                           double rel_threshold) {
  const size_t first = out.terms.size();
  const uint64_t site_mask = (uint64_t{1} << site_bits) - 1;

  DiagonalDecomposition plain = decompose_diagonal(diag_zeroed, rel_threshold);
  for (const OperatorTerm& t : plain.op.terms) {
    uint64_t z_mask = 0;
    for (int q = 0; q < n_total; ++q) {
      if (t.pauli.symbols[q] == PauliSymbol::Z) z_mask |= uint64_t{1} << (n_total - 1 - q);
    }
    out.terms.push_back(make_pauli_term(prefactor * 2.0 * t0 * t.coeff,
                                        t.pauli));
    out.terms.push_back(
        x0_times_z_string(n_total, z_mask, prefactor * -t0 * t.coeff, 0, 0));
  }

  const Eigen::VectorXcd shifted =
      shift_conjugate_diagonal_window(diag_zeroed, site_bits);
  DiagonalDecomposition conj_part = decompose_diagonal(shifted, rel_threshold);
  for (const OperatorTerm& t : conj_part.op.terms) {
    uint64_t z_mask = 0;
    for (int q = 0; q < n_total; ++q) {
      if (t.pauli.symbols[q] == PauliSymbol::Z) z_mask |= uint64_t{1} << (n_total - 1 - q);
    }
    out.terms.push_back(x0_times_z_string(
        n_total, z_mask, prefactor * -t0 * t.coeff, 0, site_bits));
  }

  for (const auto& [idx, v] : spikes) {
    const uint64_t site = idx & site_mask;
    if (site != 0 && site != site_mask) {
      throw std::logic_error("spike must sit at a contact site");
    }
    const uint64_t neighbor = (site == 0) ? idx + 1 : idx - 1;
    out.terms.push_back(
        make_dyad_term(prefactor * 2.0 * t0 * v, n_total, idx, idx, n_total));
    out.terms.push_back(
        make_dyad_term(prefactor * -t0 * v, n_total, neighbor, idx, n_total));
  }

  const size_t last = out.terms.size();
  for (size_t k = first; k < last; ++k) {
    OperatorTerm adj = out.terms[k];
    adj.coeff = std::conj(adj.coeff);
    if (adj.dyad) adj.dyad = Dyad{adj.dyad->bra, adj.dyad->ket, adj.dyad->width};
    out.terms.push_back(std::move(adj));
  }
}

}  // namespace detail

}  // namespace vqnegf
