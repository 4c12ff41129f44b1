#pragma once

// Internal unit system: nm, ns, eV, elementary charge e = 1.

namespace shuttle::units {

// CODATA 2018 exact / recommended values.
inline constexpr double elementary_charge = 1.602176634e-19;     // C
inline constexpr double boltzmann = 8.617333262e-5;              // eV/K
inline constexpr double boltzmann_si = 1.380649e-23;             // J/K
inline constexpr double vacuum_permittivity = 8.8541878128e-12;  // F/m
inline constexpr double pi = 3.14159265358979323846;

// 1 kg = 1 J s^2 / m^2 = (1/e) eV * (1e9 ns)^2 / (1e9 nm)^2
inline constexpr double kilogram = 1.0 / elementary_charge;  // eV ns^2 / nm^2
// 1 kg/s in eV ns / nm^2
inline constexpr double kilogram_per_second = kilogram * 1e-9;
inline constexpr double gigahertz = 1.0;  // 1/ns
inline constexpr double nanometre = 1.0;
inline constexpr double metre = 1e9;
inline constexpr double nanosecond = 1.0;
inline constexpr double volt = 1.0;  // with e = 1, 1 V moves one charge by 1 eV

}  // namespace shuttle::units
