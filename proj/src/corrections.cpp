#include "facet/corrections.hpp"

#include "facet/reduce.hpp"

#include <cmath>
#include <numbers>

namespace facet::corr {

namespace {

void require_positive_edge(double l_angstrom) {
  if (!(l_angstrom > 0.0)) throw domain_error("cell edge must be positive");
}

void require_origin_inside(const VolumetricGrid& g, const Vec3& origin) {
  const Vec3 frac = g.cell.to_fractional(origin);
  for (int k = 0; k < 3; ++k)
    if (frac[k] < -1e-9 || frac[k] > 1.0 + 1e-9)
      throw domain_error("moment origin lies outside the cell");
}

}  // namespace

double madelung_mm(double q, double l_angstrom, const DielectricModel& diel,
                   double alpha) {
  require_positive_edge(l_angstrom);
  if (!(alpha > 0.0)) throw domain_error("Madelung constant must be positive");
  return q * q * alpha / (2.0 * l_angstrom * diel.epsilon());
}

double quadrupole_moment(const VolumetricGrid& g, const Vec3& origin, int threads) {
  if (g.size() == 0) throw domain_error("empty grid");
  require_origin_inside(g, origin);
  const double w = g.voxel_volume();
  const double sum = deterministic_sum(
      g.size(),
      [&](std::size_t flat) {
        const auto [ix, iy, iz] = g.unravel(flat);
        const Vec3 d = g.cell.min_image(g.sample_point(ix, iy, iz) - origin);
        return g.field_at(flat) * d.squaredNorm();
      },
      threads);
  return sum * w;
}

Vec3 dipole_moment(const VolumetricGrid& g, const Vec3& origin, int threads) {
  if (g.size() == 0) throw domain_error("empty grid");
  require_origin_inside(g, origin);
  const double w = g.voxel_volume();
  const auto sums = deterministic_sum_multi(
      g.size(), 3,
      [&](std::size_t flat, double* out) {
        const auto [ix, iy, iz] = g.unravel(flat);
        const Vec3 d = g.cell.min_image(g.sample_point(ix, iy, iz) - origin);
        const double rho = g.field_at(flat);
        out[0] = rho * d.x();
        out[1] = rho * d.y();
        out[2] = rho * d.z();
      },
      threads);
  return Vec3(sums[0], sums[1], sums[2]) * w;
}

double mq_correction(double q, double quad_charged, double quad_neutral,
                     double l_angstrom, const DielectricModel& diel) {
  require_positive_edge(l_angstrom);
  const double l3 = l_angstrom * l_angstrom * l_angstrom;
  return 2.0 * std::numbers::pi * q * (quad_charged - quad_neutral) /
         (3.0 * l3 * diel.epsilon());
}

double dd_correction(const Vec3& mu, double l_angstrom, const DielectricModel& diel) {
  require_positive_edge(l_angstrom);
  const double l3 = l_angstrom * l_angstrom * l_angstrom;
  return 2.0 * std::numbers::pi * mu.squaredNorm() / (3.0 * l3 * diel.epsilon());
}

CorrectionReport corrected_energy(double e_raw_ev, double q, double l_angstrom,
                                  const DielectricModel& diel,
                                  std::optional<double> delta_quadrupole,
                                  std::optional<Vec3> dipole, double alpha) {
  require_positive_edge(l_angstrom);
  if (!std::isfinite(e_raw_ev)) throw domain_error("raw energy must be finite");

  CorrectionReport r;
  r.e_raw_ev = e_raw_ev;
  r.q = q;
  r.l_angstrom = l_angstrom;
  r.eps_r = diel.eps_r;
  r.alpha = alpha;

  const bool charged = q != 0.0;
  if (charged && dipole)
    throw domain_error(
        "charged-cell and neutral-cell corrections are mutually exclusive; "
        "a charged cell takes no dipole term");
  if (!charged && delta_quadrupole)
    throw domain_error(
        "charged-cell and neutral-cell corrections are mutually exclusive; "
        "a neutral cell takes no quadrupole term");

  if (charged) {
    r.e_mm_ev = madelung_mm(q, l_angstrom, diel, alpha);
    if (delta_quadrupole)
      r.e_mq_ev = mq_correction(q, *delta_quadrupole, 0.0, l_angstrom, diel);
  } else if (dipole) {
    r.e_dd_ev = dd_correction(*dipole, l_angstrom, diel);
  }
  r.e_corrected_ev = e_raw_ev + r.e_mm_ev + r.e_mq_ev + r.e_dd_ev;
  return r;
}

}  // namespace facet::corr
