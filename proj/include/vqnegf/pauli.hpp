// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace vqnegf {

using Complex = std::complex<double>;

// Basis-state convention used throughout: a basis index i in [0, 2^n) is read
// with qubit 0 as its most significant bit, so qubit q corresponds to integer
// bit (n - 1 - q).
enum class PauliSymbol : std::uint8_t { I, X, Y, Z };

struct PauliString {
  int n_qubits = 0;
  std::vector<PauliSymbol> symbols;  // symbols[q] acts on qubit q

  static PauliString identity(int n);
  // Z factors on every qubit whose integer bit is set in `bit_mask`.
  static PauliString z_from_bit_mask(int n, std::uint64_t bit_mask);
  bool is_identity() const;
};

// |ket><bra| acting on the low `width` integer bits, identity on the rest.
// width == n_qubits recovers a full-register dyad.
struct Dyad {
  std::uint64_t ket = 0;
  std::uint64_t bra = 0;
  int width = 0;
};

// One summand coeff * S_w^dag * P * Dy * S_w, where S_w is the cyclic
// increment on integer bits [shift_base, shift_base + shift_m) (shift_m == 0
// means no conjugation), P the Pauli string and Dy the optional dyad.
// "Shift on the top m qubits" of an n-qubit register is shift_base = n - m.
// Every dyad-carrying term in this artifact has an identity Pauli factor.
struct OperatorTerm {
  Complex coeff{0.0, 0.0};
  PauliString pauli;
  int shift_m = 0;
  int shift_base = 0;
  std::optional<Dyad> dyad;
};

struct OperatorSum {
  int n_qubits = 0;
  std::vector<OperatorTerm> terms;
  bool hermitian_hint = false;
};

struct DiagonalDecomposition {
  OperatorSum op;
  double truncation_error = 0.0;  // ||reconstruction - d||_inf
};

OperatorTerm make_pauli_term(Complex coeff, PauliString pauli, int shift_base = 0,
                             int shift_m = 0);
OperatorTerm make_dyad_term(Complex coeff, int n_qubits, std::uint64_t ket,
                            std::uint64_t bra, int width, int shift_base = 0,
                            int shift_m = 0);

// Walsh expansion of diag(d) over I/Z strings; coefficients with magnitude
// below rel_threshold * max|c| are dropped and reported as truncation error.
DiagonalDecomposition decompose_diagonal(const Eigen::VectorXcd& d,
                                         double rel_threshold);

// d'_j = d_{(j-1) mod 2^n}: the diagonal of S diag(d) S^dag.
Eigen::VectorXcd shift_conjugate_diagonal(const Eigen::VectorXcd& d);

// Open-boundary kinetic operator t0 * [2I - X_loc - S^dag X_loc S
// + S^dag (I0^{n-1} (x) X) S] acting on the low `site_bits` of an
// n_total-qubit register (site_bits == n_total for a bare device register).
OperatorSum build_h0(int n, double t0);
OperatorSum build_h0_embedded(int n_total, int site_bits, double t0);

// Closed-form decomposition of the square of build_h0.
OperatorSum build_h0_squared(int n, double t0);
OperatorSum build_h0_squared_embedded(int n_total, int site_bits, double t0);

// (E + i eta) I - h0 - diag(d), with d's contact spikes (indices 0 and
// 2^n - 1) carried as exact dyads instead of Walsh strings.
OperatorSum build_A(int n, double E, double eta, const OperatorSum& h0,
                    const Eigen::VectorXcd& d, double rel_threshold = 1e-12);

// Hermitian-flagged expansion of A^dag A for A = build_A(n, E, eta, ., d).
OperatorSum build_AdagA(int n, double E, double eta, double t0,
                        const Eigen::VectorXcd& d,
                        double rel_threshold = 1e-12);

// Termwise adjoint (valid for the term shapes produced by the builders).
OperatorSum adjoint(const OperatorSum& op);

// Dense reconstruction for verification; guarded at n_qubits <= 12.
Eigen::MatrixXcd to_dense(const OperatorSum& op);

namespace detail {

// Windowed variant of shift_conjugate_diagonal: decrements only the low
// `window_bits` of each index.
Eigen::VectorXcd shift_conjugate_diagonal_window(const Eigen::VectorXcd& d,
                                                 int window_bits);

// Single-qubit product a * b = phase * symbol.
struct SymbolProduct {
  PauliSymbol symbol;
  Complex phase;
};
SymbolProduct pauli_mul(PauliSymbol a, PauliSymbol b);

// Appends prefactor * (H0 Dz + Dz^dag H0) for the zeroed diagonal Dz plus the
// spike part prefactor * (H0 Ds + Ds^dag H0), where H0 acts on the low
// site_bits. Spikes are (index, value) pairs at site 0 or 2^site_bits - 1 of
// their block.
void append_h0_cross_terms(OperatorSum& out, int n_total, int site_bits,
                           double t0, double prefactor,
                           const Eigen::VectorXcd& diag_zeroed,
                           const std::vector<std::pair<std::uint64_t, Complex>>& spikes,
                           double rel_threshold);

// Appends Walsh strings of diag_zeroed plus one (i, i) dyad per spike.
void append_diagonal_terms(OperatorSum& out, int n_total,
                           const Eigen::VectorXcd& diag_zeroed,
                           const std::vector<std::pair<std::uint64_t, Complex>>& spikes,
                           double rel_threshold, Complex scale);

}  // namespace detail

}  // namespace vqnegf
