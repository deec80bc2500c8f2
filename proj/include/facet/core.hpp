#pragma once

// Core vocabulary shared by every module: linear-algebra typedefs, error
// types with source locations, physical constants, unit conversions, and
// the element table used for species validation and electron counting.

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace facet {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// ---------------------------------------------------------------------------
// errors

// Input that failed to parse.  `line` and `column` are 1-based positions in
// the offending source; `source` names the file or stream.
class parse_error : public std::runtime_error {
 public:
  parse_error(std::string source, int line, int column, const std::string& what)
      : std::runtime_error(format(source, line, column, what)),
        source_(std::move(source)),
        line_(line),
        column_(column) {}

  const std::string& source() const { return source_; }
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  static std::string format(const std::string& source, int line, int column,
                            const std::string& what);

  std::string source_;
  int line_;
  int column_;
};

// A request that is syntactically fine but physically or mathematically
// invalid (mismatched grids, non-lattice defect sites, unbalanced reactions).
class domain_error : public std::runtime_error {
 public:
  explicit domain_error(const std::string& what) : std::runtime_error(what) {}
};

// ---------------------------------------------------------------------------
// physical constants and unit conversions

namespace constants {

// CODATA 2018
inline constexpr double mu0_over_4pi_si = 1.00000000055e-7;  // T m / A
inline constexpr double g_electron = 2.00231930436256;
inline constexpr double bohr_magneton_si = 9.2740100783e-24;  // J / T
inline constexpr double planck_si = 6.62607015e-34;           // J s

inline constexpr double hartree_in_ev = 27.211386;
inline constexpr double bohr_in_angstrom = 0.5291772;
inline constexpr double debye_in_e_bohr = 0.3934303;
inline constexpr double inverse_fine_structure = 137.03604;
inline constexpr double atomic_time_in_seconds = 2.418884e-17;
inline constexpr double atomic_time_in_ns = 2.418884e-8;

// 4*pi*eps0 expressed in e^2 eV^-1 Angstrom^-1; divides charge products to
// turn e^2/Angstrom into eV.
inline constexpr double four_pi_eps0_e2_per_ev_angstrom = 0.069446;

// Madelung constant of the simple-cubic point-charge array.
inline constexpr double madelung_simple_cubic = 2.8373;

}  // namespace constants

inline double ev_to_hartree(double ev) { return ev / constants::hartree_in_ev; }
inline double hartree_to_ev(double ha) { return ha * constants::hartree_in_ev; }
inline double angstrom_to_bohr(double a) { return a / constants::bohr_in_angstrom; }
inline double bohr_to_angstrom(double b) { return b * constants::bohr_in_angstrom; }
inline double debye_to_e_bohr(double d) { return d * constants::debye_in_e_bohr; }
inline double e_bohr_to_debye(double eb) { return eb / constants::debye_in_e_bohr; }

// Defaults shared by modules and the CLI.  All overridable per call.
namespace defaults {

inline constexpr double diamond_lattice_constant = 3.56775;  // Angstrom
inline constexpr double bond_cutoff = 1.80;                  // Angstrom
inline constexpr double dielectric_constant = 5.69;          // static, diamond
inline constexpr double refractive_index = 2.42;             // diamond, visible
inline constexpr double band_gap_ev = 5.5;                   // diamond
inline constexpr double symmetry_tolerance = 1e-4;           // CSM acceptance

}  // namespace defaults

// ---------------------------------------------------------------------------
// elements

// Atomic number for a known element symbol (case-insensitive: "c", "C",
// "fe", "FE" all normalize).  Returns nullopt for unknown symbols.
std::optional<int> atomic_number(std::string_view symbol);

// Canonical capitalization ("C", "Fe").  Throws domain_error on unknown.
std::string normalize_species(std::string_view symbol);

// ---------------------------------------------------------------------------
// hashing

// FNV-1a 64-bit, used for report fingerprints.
std::uint64_t fnv1a64(std::string_view bytes);
std::string fingerprint_hex(std::string_view bytes);

}  // namespace facet
