// constants.hpp - physical constants (CODATA 2018)
#ifndef EVORTEX_CONSTANTS_HPP
#define EVORTEX_CONSTANTS_HPP

namespace evortex::constants {

// CODATA 2018 recommended values. SI units unless noted.
inline constexpr double speed_of_light_m_per_s = 299792458.0;          // exact
inline constexpr double planck_j_s = 6.62607015e-34;                   // exact
inline constexpr double hbar_j_s = 1.054571817e-34;
inline constexpr double elementary_charge_c = 1.602176634e-19;         // exact
inline constexpr double electron_mass_kg = 9.1093837015e-31;

// Derived, frozen here so every module sees identical digits.
inline constexpr double electron_rest_energy_ev = 510998.9499961642;   // m_e c^2 / e
inline constexpr double hc_ev_nm = 1239.8419843320025;                 // h c / e * 1e9

inline constexpr double pi = 3.14159265358979323846;

} // namespace evortex::constants

#endif
