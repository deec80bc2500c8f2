#include "facet/zfs.hpp"

#include "facet/reduce.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace facet::zfs {

void ZfsTensor::validate(double tol) const {
  if (!matrix.allFinite()) throw domain_error("tensor has non-finite entries");
  const double scale = std::max(1.0, matrix.norm());
  if ((matrix - matrix.transpose()).norm() > tol * scale)
    throw domain_error("tensor is not symmetric");
  if (std::abs(matrix.trace()) > 1e-6 * std::max(1e-30, matrix.norm()))
    throw domain_error("tensor is not traceless");
}

void SpinSiteModel::validate() const {
  std::size_t populated = 0;
  for (const auto& s : sites) {
    if (!s.position.allFinite() || !std::isfinite(s.population))
      throw domain_error("spin site has non-finite data");
    if (s.population < 0.0) throw domain_error("spin populations must be >= 0");
    if (s.population > 0.0) ++populated;
  }
  if (populated < 2)
    throw domain_error("need at least two sites with nonzero spin population");
  if (!(g_factor > 0.0)) throw domain_error("g-factor must be positive");
}

ZfsParams principal_params(const ZfsTensor& t, double isotropic_tol) {
  if (!t.matrix.allFinite()) throw domain_error("tensor has non-finite entries");
  const double scale = std::max(1.0, t.matrix.norm());
  if ((t.matrix - t.matrix.transpose()).norm() > 1e-9 * scale)
    throw domain_error("tensor is not symmetric");

  Mat3 s = 0.5 * (t.matrix + t.matrix.transpose());
  s -= (s.trace() / 3.0) * Mat3::Identity();

  Eigen::SelfAdjointEigenSolver<Mat3> es(s);
  const Vec3 ev = es.eigenvalues();

  ZfsParams p;
  // Eigenvalues come sorted ascending; >= prefers the positive branch when
  // magnitudes tie at the e = |d|/3 boundary.
  double max_abs = -1.0;
  int iz = 0;
  for (int k = 0; k < 3; ++k)
    if (std::abs(ev[k]) >= max_abs) {
      max_abs = std::abs(ev[k]);
      iz = k;
    }
  if (max_abs <= isotropic_tol) {
    p.isotropic = true;
    return p;
  }

  // x gets the larger of the two remaining eigenvalues so that E >= 0.
  const int rest[2] = {(iz + 1) % 3, (iz + 2) % 3};
  const int ix = ev[rest[0]] >= ev[rest[1]] ? rest[0] : rest[1];
  const int iy = ev[rest[0]] >= ev[rest[1]] ? rest[1] : rest[0];

  p.d_ghz = 1.5 * ev[iz];
  p.e_ghz = 0.5 * (ev[ix] - ev[iy]);
  p.axes.col(0) = es.eigenvectors().col(ix);
  p.axes.col(2) = es.eigenvectors().col(iz);
  p.axes.col(1) = p.axes.col(2).cross(p.axes.col(0));
  return p;
}

ZfsTensor tensor_from_params(const ZfsParams& p) {
  if (!std::isfinite(p.d_ghz) || !std::isfinite(p.e_ghz))
    throw domain_error("parameters must be finite");
  if (p.e_ghz < 0.0 || p.e_ghz > std::abs(p.d_ghz) / 3.0 + 1e-12)
    throw domain_error("E must satisfy 0 <= E <= |D|/3");
  if ((p.axes * p.axes.transpose() - Mat3::Identity()).norm() > 1e-10)
    throw domain_error("principal axes are not orthonormal");

  const Vec3 diag(-p.d_ghz / 3.0 + p.e_ghz, -p.d_ghz / 3.0 - p.e_ghz,
                  2.0 * p.d_ghz / 3.0);
  ZfsTensor t;
  t.matrix = p.axes * diag.asDiagonal() * p.axes.transpose();
  return t;
}

TripletLevels triplet_levels(double d_ghz, double e_ghz) {
  if (!std::isfinite(d_ghz) || !std::isfinite(e_ghz))
    throw domain_error("parameters must be finite");
  if (e_ghz < 0.0 || e_ghz > std::abs(d_ghz) / 3.0 + 1e-12)
    throw domain_error("E must satisfy 0 <= E <= |D|/3");

  // Spin-1 Hamiltonian in the |+1>, |0>, |-1> basis.
  Mat3 h;
  h << d_ghz / 3.0, 0.0, e_ghz,
       0.0, -2.0 * d_ghz / 3.0, 0.0,
       e_ghz, 0.0, d_ghz / 3.0;

  Eigen::SelfAdjointEigenSolver<Mat3> es(h);
  const Vec3 ev = es.eigenvalues();

  // The m_s = 0 level is the eigenvector dominated by the middle basis state.
  int i0 = 0;
  double best = -1.0;
  for (int k = 0; k < 3; ++k) {
    const double w = std::abs(es.eigenvectors()(1, k));
    if (w > best) {
      best = w;
      i0 = k;
    }
  }
  std::array<double, 2> upper{};
  int n = 0;
  for (int k = 0; k < 3; ++k)
    if (k != i0) upper[n++] = ev[k];
  if (upper[0] > upper[1]) std::swap(upper[0], upper[1]);

  TripletLevels out;
  out.eigenvalues_ghz = {ev[i0], upper[0], upper[1]};
  out.transitions_ghz = {upper[0] - ev[i0], upper[1] - ev[i0]};
  return out;
}

double dipolar_prefactor_ghz_angstrom3(double g_factor) {
  // mu0 g^2 mu_B^2 / (4 pi h) in SI gives m^3/s; convert to GHz Angstrom^3.
  const double si = constants::mu0_over_4pi_si * g_factor * g_factor *
                    constants::bohr_magneton_si * constants::bohr_magneton_si /
                    constants::planck_si;
  return si * 1e30 * 1e-9;
}

ZfsTensor point_dipole_tensor(const SpinSiteModel& m, int threads) {
  m.validate();

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < m.sites.size(); ++i)
    for (std::size_t j = i + 1; j < m.sites.size(); ++j) {
      const double w = m.sites[i].population * m.sites[j].population;
      if (w == 0.0) continue;
      if ((m.sites[i].position - m.sites[j].position).norm() < 1e-9)
        throw domain_error("coincident spin sites with nonzero populations");
      pairs.emplace_back(i, j);
    }

  // Half the pair prefactor makes two unit spins at distance r give
  // |D_zz| = pref / r^3, the closed-form two-electron value.
  const double pref = 0.5 * dipolar_prefactor_ghz_angstrom3(m.g_factor);

  // Components ordered xx, yy, zz, xy, xz, yz.
  const auto sums = deterministic_sum_multi(
      pairs.size(), 6,
      [&](std::size_t k, double* out) {
        const auto& [i, j] = pairs[k];
        const Vec3 r = m.sites[j].position - m.sites[i].position;
        const double r2 = r.squaredNorm();
        const double inv_r5 = 1.0 / (r2 * r2 * std::sqrt(r2));
        const double w = m.sites[i].population * m.sites[j].population;
        out[0] = w * (3.0 * r.x() * r.x() - r2) * inv_r5;
        out[1] = w * (3.0 * r.y() * r.y() - r2) * inv_r5;
        out[2] = w * (3.0 * r.z() * r.z() - r2) * inv_r5;
        out[3] = w * 3.0 * r.x() * r.y() * inv_r5;
        out[4] = w * 3.0 * r.x() * r.z() * inv_r5;
        out[5] = w * 3.0 * r.y() * r.z() * inv_r5;
      },
      threads);

  ZfsTensor t;
  t.matrix << sums[0], sums[3], sums[4],
              sums[3], sums[1], sums[5],
              sums[4], sums[5], sums[2];
  t.matrix *= -pref;
  return t;
}

}  // namespace facet::zfs
