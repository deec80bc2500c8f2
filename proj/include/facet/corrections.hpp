#pragma once

#include "facet/core.hpp"
#include "facet/structure.hpp"

#include <optional>

namespace facet::corr {

// Homogeneous dielectric screening: epsilon = 4*pi*eps0 * eps_r in the
// e^2 / (eV Angstrom) unit system.
struct DielectricModel {
  double eps_r = defaults::dielectric_constant;

  double epsilon() const {
    if (!(eps_r >= 1.0)) throw domain_error("relative permittivity must be >= 1");
    return constants::four_pi_eps0_e2_per_ev_angstrom * eps_r;
  }
};

// Monopole lattice correction q^2 alpha / (2 L epsilon) in eV.
double madelung_mm(double q, double l_angstrom, const DielectricModel& diel = {},
                   double alpha = constants::madelung_simple_cubic);

// Second moment integral(rho |r - r0|^2) over one minimum-image cell, e A^2.
// The origin is Cartesian and must lie inside the cell.
double quadrupole_moment(const VolumetricGrid& g, const Vec3& origin,
                         int threads = 1);

// First moment integral(rho (r - r0)) over one minimum-image cell, e A.
Vec3 dipole_moment(const VolumetricGrid& g, const Vec3& origin, int threads = 1);

// Monopole-quadrupole cross term 2 pi q (Q_q - Q_0) / (3 L^3 epsilon) in eV.
double mq_correction(double q, double quad_charged, double quad_neutral,
                     double l_angstrom, const DielectricModel& diel = {});

// Dipole-dipole lattice term 2 pi |mu|^2 / (3 L^3 epsilon) in eV.
double dd_correction(const Vec3& mu, double l_angstrom,
                     const DielectricModel& diel = {});

struct CorrectionReport {
  double e_raw_ev = 0.0;
  double q = 0.0;
  double l_angstrom = 0.0;
  double eps_r = defaults::dielectric_constant;
  double alpha = constants::madelung_simple_cubic;
  double e_mm_ev = 0.0;
  double e_mq_ev = 0.0;
  double e_dd_ev = 0.0;
  double e_corrected_ev = 0.0;
};

// Finite-size corrected total energy.  Charged cells (q != 0) take the
// monopole and monopole-quadrupole terms; neutral cells take the
// dipole-dipole term.  The two schemes are mutually exclusive: a dipole for
// a charged cell or a quadrupole for a neutral one is an error.
CorrectionReport corrected_energy(double e_raw_ev, double q, double l_angstrom,
                                  const DielectricModel& diel = {},
                                  std::optional<double> delta_quadrupole = {},
                                  std::optional<Vec3> dipole = {},
                                  double alpha = constants::madelung_simple_cubic);

}  // namespace facet::corr
