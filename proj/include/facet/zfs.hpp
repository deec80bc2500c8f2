#pragma once

#include "facet/core.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace facet::zfs {

// Symmetric traceless zero-field-splitting tensor in GHz.
struct ZfsTensor {
  Mat3 matrix = Mat3::Zero();
  std::array<std::string, 3> frame = {"x", "y", "z"};

  void validate(double tol = 1e-9) const;
};

// Canonical (D, E) pair plus the principal axis system.  Columns of `axes`
// are the x, y, z principal directions; z carries the largest-|eigenvalue|
// component and the x/y order makes E non-negative.
struct ZfsParams {
  double d_ghz = 0.0;
  double e_ghz = 0.0;
  Mat3 axes = Mat3::Identity();
  bool isotropic = false;  // eigenvalues too close to define axes
};

// Point spins with dimensionless populations at fixed positions.
struct SpinSite {
  Vec3 position;  // Angstrom
  double population = 0.0;
};

struct SpinSiteModel {
  std::vector<SpinSite> sites;
  double g_factor = constants::g_electron;

  void validate() const;
};

// Symmetrize, remove the trace, diagonalize, and read off
// D = (3/2) D_zz, E = (D_xx - D_yy)/2 in the canonical axis order.
ZfsParams principal_params(const ZfsTensor& t, double isotropic_tol = 1e-9);

// diag(-d/3 + e, -d/3 - e, 2d/3) rotated into the given axes.
// Requires 0 <= e <= |d|/3 and orthonormal axes.
ZfsTensor tensor_from_params(const ZfsParams& p);

struct TripletLevels {
  std::array<double, 3> eigenvalues_ghz;   // ascending by m_s=0 first, then pair
  std::array<double, 2> transitions_ghz;   // d - e and d + e
};

// Spin-1 Hamiltonian D[S_z^2 - S^2/3] + E[S_x^2 - S_y^2] in the |m_s> basis:
// eigenvalues {-2d/3, d/3 - e, d/3 + e}, ODMR transitions d -+ e.
// Requires the canonical range 0 <= e <= |d|/3.
TripletLevels triplet_levels(double d_ghz, double e_ghz);

// Prefactor mu0 g^2 mu_B^2 / (4 pi h), in GHz * Angstrom^3: the dipolar
// coupling of two unit point spins at distance r has D_zz = -2 * pref / r^3.
double dipolar_prefactor_ghz_angstrom3(double g_factor = constants::g_electron);

// Pairwise point-spin dipolar tensor:
//   D_ab = -pref/2 * sum_{i<j} rho_i rho_j (3 r_a r_b - delta_ab r^2) / r^5
// normalized so two unit spins reproduce the two-electron dipolar coupling.
ZfsTensor point_dipole_tensor(const SpinSiteModel& m, int threads = 1);

}  // namespace facet::zfs
