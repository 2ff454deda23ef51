// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "vqnegf/pauli.hpp"

namespace vqnegf {

// Immutable n-qubit statevector; qubit 0 is the most significant index bit.
struct QState {
  int n_qubits = 0;
  Eigen::VectorXcd amplitudes;
};

QState basis_state(int n_qubits, std::uint64_t index);
QState state_from_vector(int n_qubits, Eigen::VectorXcd amplitudes);

enum class GateKind : std::uint8_t { RX, RY, RZ, CRY, CRZ, X };

// Rotation conventions: R_y(a) = exp(-i a Y / 2), likewise R_x / R_z; CRY and
// CRZ rotate the target when the control qubit is |1>.
struct Gate {
  GateKind kind = GateKind::X;
  int target = 0;
  int control = -1;  // required for CRY / CRZ
  double angle = 0.0;
};

struct Circuit {
  int n_qubits = 0;
  std::vector<Gate> gates;
};

bool gate_is_parameterized(GateKind kind);

// Ordered application of every gate; norm preserved to machine precision.
QState apply_circuit(const QState& state, const Circuit& circuit);

// Cyclic increment on the m most significant qubits (decrement when adjoint).
QState apply_shift(const QState& state, int m, bool adjoint);

// Sum_k c_k T_k |state>, terms applied in ascending index order.
Eigen::VectorXcd apply_operator_sum(const QState& state, const OperatorSum& op);

// <state|op|state>. A Hermitian-flagged op with imaginary residue above 1e-8
// raises; residues below that are dropped and the real part returned.
Complex expectation(const QState& state, const OperatorSum& op);

// <bra|op|ket>.
Complex transition_amplitude(const QState& bra, const OperatorSum& op,
                             const QState& ket);

namespace detail {

// In-place building blocks for the optimizer's reverse sweeps; everything
// above this namespace treats states as immutable.
void apply_gate_inplace(Eigen::VectorXcd& amps, int n_qubits, const Gate& gate);
void apply_gate_adjoint_inplace(Eigen::VectorXcd& amps, int n_qubits,
                                const Gate& gate);
// d(gate unitary)/d(angle) applied to amps; the control-0 block of a
// controlled rotation's derivative is zero.
Eigen::VectorXcd apply_gate_derivative(const Eigen::VectorXcd& amps,
                                       int n_qubits, const Gate& gate);
void apply_term(Eigen::VectorXcd& out, const Eigen::VectorXcd& in, int n_qubits,
                const OperatorTerm& term);
void apply_hadamard_inplace(Eigen::VectorXcd& amps, int n_qubits, int bit);

Eigen::Matrix2cd gate_matrix(GateKind kind, double angle);
Eigen::Matrix2cd gate_matrix_derivative(GateKind kind, double angle);

}  // namespace detail

}  // namespace vqnegf
