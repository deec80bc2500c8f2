#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "facet/corrections.hpp"

#include <chrono>
#include <cmath>

using namespace facet;
using namespace facet::corr;

namespace {

// Gaussian charge blob grid, integral q_total, centered at `center` (frac).
VolumetricGrid gaussian_grid(double edge, int n, const Vec3& center_frac,
                             double sigma, double q_total) {
  VolumetricGrid g = VolumetricGrid::zeros(UnitCell::cubic(edge), {n, n, n});
  double raw_sum = 0.0;
  for (int iz = 0; iz < n; ++iz)
    for (int iy = 0; iy < n; ++iy)
      for (int ix = 0; ix < n; ++ix) {
        const Vec3 d = g.cell.min_image(
            g.sample_point(ix, iy, iz) - g.cell.to_cartesian(center_frac));
        const double v = std::exp(-d.squaredNorm() / (2.0 * sigma * sigma));
        g.data[g.index(ix, iy, iz)] = v;
        raw_sum += v;
      }
  const double integral = raw_sum * g.voxel_volume();
  for (auto& v : g.data) v *= q_total / integral;
  return g;
}

}  // namespace

TEST_CASE("madelung monopole term reference values") {
  DielectricModel diel;
  diel.eps_r = 5.69;
  const double l = 2.0 * 3.56775 * 2.0;  // 4x4x4 primitive cube edge, 14.271 A

  const double e1 = madelung_mm(1.0, l, diel);
  const double e2 = madelung_mm(2.0, l, diel);
  CHECK(e1 == doctest::Approx(0.2516).epsilon(2e-3));
  CHECK(e2 == doctest::Approx(1.0063).epsilon(2e-3));

  // Exact pinned values of q^2 alpha / (2 L epsilon).
  CHECK(e1 == doctest::Approx(0.25157145053349067).epsilon(1e-12));
  CHECK(e2 == doctest::Approx(1.0062858021339627).epsilon(1e-12));
}

TEST_CASE("monopole term scales as q^2 and 1/L") {
  DielectricModel diel;
  diel.eps_r = 5.69;
  const double base = madelung_mm(1.0, 10.0, diel);
  CHECK(madelung_mm(3.0, 10.0, diel) == doctest::Approx(9.0 * base).epsilon(1e-12));
  CHECK(madelung_mm(-1.0, 10.0, diel) == doctest::Approx(base).epsilon(1e-12));
  CHECK(madelung_mm(1.0, 20.0, diel) == doctest::Approx(base / 2.0).epsilon(1e-12));

  // Stronger screening shrinks the correction.
  DielectricModel vacuum;
  vacuum.eps_r = 1.0;
  CHECK(madelung_mm(1.0, 10.0, vacuum) == doctest::Approx(base * 5.69).epsilon(1e-12));
}

TEST_CASE("invalid monopole inputs are rejected") {
  DielectricModel bad;
  bad.eps_r = 0.5;
  CHECK_THROWS_AS(madelung_mm(1.0, 10.0, bad), domain_error);
  CHECK_THROWS_AS(madelung_mm(1.0, 0.0, DielectricModel{}), domain_error);
  CHECK_THROWS_AS(madelung_mm(1.0, -5.0, DielectricModel{}), domain_error);
}

TEST_CASE("grid moments of a centered gaussian") {
  const double sigma = 0.8;
  const double edge = 12.0;
  const VolumetricGrid g = gaussian_grid(edge, 48, Vec3(0.5, 0.5, 0.5), sigma, 2.0);
  const Vec3 origin = g.cell.to_cartesian(Vec3(0.5, 0.5, 0.5));

  // A 3D gaussian of total charge q has second moment 3 q sigma^2 and zero
  // first moment about its center.
  const double quad = quadrupole_moment(g, origin);
  CHECK(quad == doctest::Approx(3.0 * 2.0 * sigma * sigma).epsilon(1e-3));
  CHECK(dipole_moment(g, origin).norm() < 1e-10);
}

TEST_CASE("dipole moment of a displaced gaussian points at the blob") {
  const double edge = 12.0;
  const Vec3 center_frac(0.5 + 1.5 / edge, 0.5, 0.5);
  const VolumetricGrid g = gaussian_grid(edge, 48, center_frac, 0.7, 1.0);
  const Vec3 origin = g.cell.to_cartesian(Vec3(0.5, 0.5, 0.5));

  const Vec3 mu = dipole_moment(g, origin);
  CHECK(mu.x() == doctest::Approx(1.5).epsilon(1e-3));
  CHECK(std::abs(mu.y()) < 1e-10);
  CHECK(std::abs(mu.z()) < 1e-10);
}

TEST_CASE("moments are thread-count invariant") {
  const VolumetricGrid g = gaussian_grid(10.0, 32, Vec3(0.4, 0.55, 0.5), 0.9, 1.5);
  const Vec3 origin = g.cell.to_cartesian(Vec3(0.5, 0.5, 0.5));
  CHECK(quadrupole_moment(g, origin, 1) == quadrupole_moment(g, origin, 8));
  const Vec3 m1 = dipole_moment(g, origin, 1);
  const Vec3 m8 = dipole_moment(g, origin, 8);
  CHECK((m1 - m8).norm() == 0.0);
}

TEST_CASE("monopole-quadrupole cross term formula") {
  DielectricModel diel;
  diel.eps_r = 5.69;
  const double got = mq_correction(2.0, 14.0, 11.0, 10.0, diel);
  const double expected = 2.0 * M_PI * 2.0 * (14.0 - 11.0) /
                          (3.0 * 1000.0 * diel.epsilon());
  CHECK(got == doctest::Approx(expected).epsilon(1e-12));
  // Sign flips with the charge and with the moment difference order.
  CHECK(mq_correction(-2.0, 14.0, 11.0, 10.0, diel) ==
        doctest::Approx(-expected).epsilon(1e-12));
  CHECK(mq_correction(2.0, 11.0, 14.0, 10.0, diel) ==
        doctest::Approx(-expected).epsilon(1e-12));
}

TEST_CASE("dipole-dipole term formula") {
  DielectricModel diel;
  diel.eps_r = 2.0;
  const Vec3 mu(0.3, -0.4, 1.2);
  const double got = dd_correction(mu, 11.0, diel);
  const double expected =
      2.0 * M_PI * mu.squaredNorm() / (3.0 * std::pow(11.0, 3) * diel.epsilon());
  CHECK(got == doctest::Approx(expected).epsilon(1e-12));
  CHECK(dd_correction(Vec3::Zero(), 11.0, diel) == 0.0);
}

TEST_CASE("corrected energy for a charged cell") {
  DielectricModel diel;
  diel.eps_r = 5.69;
  const double l = 14.2710;
  const CorrectionReport r = corrected_energy(-100.0, 2.0, l, diel, 3.0);
  CHECK(r.e_mm_ev == doctest::Approx(madelung_mm(2.0, l, diel)).epsilon(1e-14));
  CHECK(r.e_mq_ev == doctest::Approx(mq_correction(2.0, 3.0, 0.0, l, diel)).epsilon(1e-14));
  CHECK(r.e_dd_ev == 0.0);
  CHECK(r.e_corrected_ev ==
        doctest::Approx(-100.0 + r.e_mm_ev + r.e_mq_ev).epsilon(1e-14));
}

TEST_CASE("corrected energy for a neutral cell with a dipole") {
  DielectricModel diel;
  const Vec3 mu(0.0, 0.0, 0.9);
  const CorrectionReport r =
      corrected_energy(-50.0, 0.0, 10.0, diel, std::nullopt, mu);
  CHECK(r.e_mm_ev == 0.0);
  CHECK(r.e_mq_ev == 0.0);
  CHECK(r.e_dd_ev == doctest::Approx(dd_correction(mu, 10.0, diel)).epsilon(1e-14));
  CHECK(r.e_corrected_ev == doctest::Approx(-50.0 + r.e_dd_ev).epsilon(1e-14));
}

TEST_CASE("charged cells refuse dipole corrections and vice versa") {
  DielectricModel diel;
  CHECK_THROWS_AS(
      corrected_energy(0.0, 2.0, 10.0, diel, std::nullopt, Vec3(0, 0, 1)),
      domain_error);
  CHECK_THROWS_AS(corrected_energy(0.0, 0.0, 10.0, diel, 3.0), domain_error);
}

TEST_CASE("monopole correction evaluates fast") {
  // The whole report is closed-form; a generous bound guards against
  // accidental quadrature creeping in.
  const auto start = std::chrono::steady_clock::now();
  DielectricModel diel;
  diel.eps_r = 5.69;
  double acc = 0.0;
  for (int i = 0; i < 1000; ++i) acc += madelung_mm(1.0 + i % 3, 14.2710, diel);
  const auto elapsed = std::chrono::steady_clock::now() - start;
  CHECK(acc > 0.0);
  CHECK(std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count() < 1000);
}
