// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace vqnegf::constants {

// CODATA 2018 values expressed in eV / nm / s / K units.
inline constexpr double hbar_c_ev_nm = 197.3269804;
inline constexpr double electron_mass_ev = 510998.95000;
inline constexpr double hbar2_over_2m0_ev_nm2 =
    hbar_c_ev_nm * hbar_c_ev_nm / (2.0 * electron_mass_ev);
inline constexpr double boltzmann_ev_per_k = 8.617333262e-5;
inline constexpr double planck_ev_s = 4.135667696e-15;
inline constexpr double elementary_charge_coulomb = 1.602176634e-19;

// 2q/h: converts an energy-integrated transmission (eV) into amperes.
inline constexpr double two_q_over_h_a_per_ev =
    2.0 * elementary_charge_coulomb / planck_ev_s;

}  // namespace vqnegf::constants
