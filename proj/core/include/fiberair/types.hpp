#pragma once

#include <complex>
#include <numbers>
#include <vector>

namespace fiberair {

using cplx = std::complex<double>;
using SymbolSeq = std::vector<cplx>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

namespace phys {
inline constexpr double kSpeedOfLight = 299792458.0;  // m/s
inline constexpr double kPlanck = 6.62607015e-34;     // J s
}  // namespace phys

// Unit helpers: everything inside the library is SI.
namespace units {
constexpr double km(double v) { return v * 1e3; }
constexpr double nm(double v) { return v * 1e-9; }
constexpr double ps(double v) { return v * 1e-12; }
constexpr double GHz(double v) { return v * 1e9; }
constexpr double mW(double v) { return v * 1e-3; }
/// ps/(nm km) -> s/m^2
constexpr double ps_per_nm_km(double v) { return v * 1e-12 / (1e-9 * 1e3); }
/// 1/(W km) -> 1/(W m)
constexpr double per_W_km(double v) { return v * 1e-3; }
/// ps^2/km -> s^2/m
constexpr double ps2_per_km(double v) { return v * 1e-24 / 1e3; }
double dbm_to_watt(double dbm);
double watt_to_dbm(double watt);
double db_to_linear(double db);
}  // namespace units

}  // namespace fiberair
