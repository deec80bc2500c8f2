#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "facet/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <set>

using namespace facet;
using namespace facet::lattice;

namespace {

int composition_count(const std::vector<std::pair<std::string, int>>& comp,
                      const std::string& species) {
  for (const auto& [sp, n] : comp)
    if (sp == species) return n;
  return 0;
}

}  // namespace

TEST_CASE("conventional supercell has 8 atoms per cubic cell") {
  const Structure s = build_diamond_supercell(2, 2, 2);
  CHECK(s.size() == 64);
  CHECK(s.cell.is_cubic());
  CHECK(s.cell.cubic_edge() == doctest::Approx(2 * 3.56775));
  s.validate();

  // Every atom of a perfect diamond crystal is 4-coordinated at 1.54488 A.
  const auto report = coordination(s);
  CHECK(report.count(SiteClass::four_fold) == 64);
  CHECK(report.dangling_count() == 0);
  for (const auto& site : report.sites) CHECK(site.neighbor_count == 4);
}

TEST_CASE("primitive supercell matches the fixture cell sizes") {
  const Structure ov_cell = build_diamond_primitive_supercell(4, 4, 4);
  CHECK(ov_cell.size() == 128);
  const Structure vov_cell = build_diamond_primitive_supercell(5, 5, 5);
  CHECK(vov_cell.size() == 250);

  // 4x4x4 primitive fcc cell vectors: (0,2a,2a),(2a,0,2a),(2a,2a,0).
  const double h = 2.0 * 3.56775;
  CHECK(ov_cell.cell.vectors(0, 0) == doctest::Approx(0.0));
  CHECK(ov_cell.cell.vectors(0, 1) == doctest::Approx(h));
  CHECK(ov_cell.cell.vectors(0, 2) == doctest::Approx(h));
  CHECK(ov_cell.cell.volume() ==
        doctest::Approx(128.0 / 8.0 * std::pow(3.56775, 3)).epsilon(1e-12));

  const auto report = coordination(ov_cell);
  CHECK(report.count(SiteClass::four_fold) == 128);
}

TEST_CASE("nearest-neighbor distance is the diamond bond length") {
  const Structure s = build_diamond_supercell(2, 2, 2);
  double min_dist = 1e9;
  for (std::size_t i = 1; i < s.size(); ++i)
    min_dist = std::min(min_dist, s.cell.distance(s.cartesian(0), s.cartesian(i)));
  CHECK(min_dist == doctest::Approx(3.56775 * std::sqrt(3.0) / 4.0).epsilon(1e-12));
  CHECK(min_dist == doctest::Approx(1.54488).epsilon(1e-4));
}

TEST_CASE("apply_defects substitutes, removes, and preserves ids") {
  const Structure s = build_diamond_supercell(1, 1, 1);
  DefectSpec spec;
  spec.edits.push_back(DefectEdit::substitute(0, "O"));
  spec.edits.push_back(DefectEdit::remove(3));
  spec.charge = 2;

  const Structure d = apply_defects(s, spec);
  CHECK(d.size() == 7);
  REQUIRE(d.index_of(0).has_value());
  CHECK(d.sites[*d.index_of(0)].species == "O");
  CHECK_FALSE(d.index_of(3).has_value());
  REQUIRE(d.index_of(7).has_value());
  CHECK(d.sites[*d.index_of(7)].species == "C");
}

TEST_CASE("apply_defects rejects bad edits") {
  const Structure s = build_diamond_supercell(1, 1, 1);

  DefectSpec unknown;
  unknown.edits.push_back(DefectEdit::remove(99));
  CHECK_THROWS_AS(apply_defects(s, unknown), domain_error);

  DefectSpec dup;
  dup.edits.push_back(DefectEdit::substitute(0, "O"));
  dup.edits.push_back(DefectEdit::remove(0));
  CHECK_THROWS_AS(apply_defects(s, dup), domain_error);
}

TEST_CASE("single vacancy creates four type II dangling bonds") {
  const Structure s = build_diamond_supercell(3, 3, 3);
  DefectSpec spec;
  spec.edits.push_back(DefectEdit::remove(0));
  const Structure d = apply_defects(s, spec);

  const auto report = coordination(d);
  // The four neighbors of a vacancy are mutually within second-neighbor
  // range, so each sees three other dangling carbons.
  CHECK(report.count(SiteClass::dangling_type_ii) == 4);
  CHECK(report.count(SiteClass::dangling_type_i) == 0);
  CHECK(report.count(SiteClass::four_fold) == static_cast<int>(d.size()) - 4);
}

TEST_CASE("oxygen-vacancy fixture coordination") {
  const DefectFixture fx = oxygen_vacancy_fixture();
  CHECK(fx.name == "oxygen-vacancy");
  CHECK(fx.point_group == "C3v");
  CHECK(fx.pristine.size() == 128);
  CHECK(fx.defective.size() == 127);
  CHECK(fx.spec.charge == 0);  // geometry fixture; charge applied downstream
  CHECK(fx.vacancy_positions.size() == 1);
  REQUIRE(fx.oxygen_id >= 0);

  const auto report = coordination(fx.defective);
  CHECK(report.count(SiteClass::dangling_type_i) == 3);
  CHECK(report.count(SiteClass::dangling_type_ii) == 0);
  CHECK(report.count(SiteClass::oxygen_adjacent) == 3);
  CHECK(report.count(SiteClass::four_fold) == 120);
  CHECK(report.count(SiteClass::unclassified) == 1);  // the oxygen itself
}

TEST_CASE("divacancy-oxygen fixture coordination") {
  const DefectFixture fx = divacancy_oxygen_fixture();
  CHECK(fx.name == "divacancy-oxygen");
  CHECK(fx.point_group == "C2v");
  CHECK(fx.pristine.size() == 250);
  CHECK(fx.defective.size() == 248);
  CHECK(fx.vacancy_positions.size() == 2);

  const auto report = coordination(fx.defective);
  CHECK(report.count(SiteClass::dangling_type_i) == 2);
  CHECK(report.count(SiteClass::dangling_type_ii) == 4);
  CHECK(report.count(SiteClass::oxygen_adjacent) == 2);
  CHECK(report.count(SiteClass::four_fold) == 239);
  CHECK(report.count(SiteClass::unclassified) == 1);
}

TEST_CASE("fixture orientations are orthonormal right-handed frames") {
  for (const auto& fx : {oxygen_vacancy_fixture(), divacancy_oxygen_fixture()}) {
    const Mat3 o = fx.orientation;
    CHECK((o.transpose() * o - Mat3::Identity()).norm() < 1e-12);
    CHECK(o.determinant() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("carve_cluster splits core from boundary consistently") {
  const DefectFixture fx = oxygen_vacancy_fixture();
  const auto carve = carve_cluster(fx.defective, fx.cluster_selection);
  CHECK(carve.core_ids == fx.cluster_selection);
  CHECK(std::is_sorted(carve.core_ids.begin(), carve.core_ids.end()));
  CHECK_FALSE(carve.boundary.empty());

  std::set<int> core(carve.core_ids.begin(), carve.core_ids.end());
  for (const auto& b : carve.boundary) {
    CHECK(core.count(b.external_id) == 0);
    CHECK_FALSE(b.core_ids.empty());
    for (int id : b.core_ids) CHECK(core.count(id) == 1);
  }
}

TEST_CASE("carve_cluster validates the selection") {
  const Structure s = build_diamond_supercell(1, 1, 1);
  CHECK_THROWS_AS(carve_cluster(s, {0, 99}), domain_error);
  CHECK_THROWS_AS(carve_cluster(s, {}), domain_error);
  CHECK_THROWS_AS(carve_cluster(s, {0, 0}), domain_error);
}

TEST_CASE("capped oxygen-vacancy cluster is C15O F12 O12") {
  const DefectFixture fx = oxygen_vacancy_fixture();
  const auto carve = carve_cluster(fx.defective, fx.cluster_selection);
  const auto cc = cap_cluster(fx.defective, carve, CapSide::cluster, fx.defect_center);

  CHECK(cc.formula() == "C15OF12O12");
  CHECK(composition_count(cc.core_composition(), "C") == 15);
  CHECK(composition_count(cc.core_composition(), "O") == 1);
  CHECK(composition_count(cc.cap_composition(), "F") == 12);
  CHECK(composition_count(cc.cap_composition(), "O") == 12);
  CHECK(cc.caps.size() == 24);

  // 15 C + 1 O core, 12 F + 12 O caps, charge +2 removed.
  const long electrons = 15 * 6 + 8 + cc.cap_electron_count() - 2;
  CHECK(cc.cap_electron_count() == 12 * 9 + 12 * 8);
  CHECK(electrons == 300);
  CHECK(electrons % 2 == 0);
}

TEST_CASE("capped divacancy cluster is C26O F18 O15") {
  const DefectFixture fx = divacancy_oxygen_fixture();
  const auto carve = carve_cluster(fx.defective, fx.cluster_selection);
  const auto cc = cap_cluster(fx.defective, carve, CapSide::cluster, fx.defect_center);

  CHECK(cc.formula() == "C26OF18O15");
  CHECK(cc.caps.size() == 33);
  const long electrons = 26 * 6 + 8 + cc.cap_electron_count() - 2;
  CHECK(electrons == 444);
  CHECK(electrons % 2 == 0);
}

TEST_CASE("cluster and environment caps mirror each other") {
  const DefectFixture fx = oxygen_vacancy_fixture();
  const auto carve = carve_cluster(fx.defective, fx.cluster_selection);
  const auto cl = cap_cluster(fx.defective, carve, CapSide::cluster, fx.defect_center);
  const auto env = cap_cluster(fx.defective, carve, CapSide::environment);

  CHECK(env.core.size() + cl.core.size() == fx.defective.size());

  // Each side caps the same cut bonds, so total cap electrons are even and
  // both sides together close every dangling valence.
  CHECK((cl.cap_electron_count() + env.cap_electron_count()) % 2 == 0);

  // The environment caps sit on core atom positions of the cluster side and
  // vice versa: every cap's source id belongs to the opposite core.
  std::set<int> cluster_core(carve.core_ids.begin(), carve.core_ids.end());
  for (const auto& cap : env.caps) CHECK(cluster_core.count(cap.source_id) == 1);
  for (const auto& cap : cl.caps) CHECK(cluster_core.count(cap.source_id) == 0);
}

TEST_CASE("cap multiplicity matches the kind and element") {
  const DefectFixture fx = divacancy_oxygen_fixture();
  const auto carve = carve_cluster(fx.defective, fx.cluster_selection);
  const auto cc = cap_cluster(fx.defective, carve, CapSide::cluster, fx.defect_center);
  for (const auto& cap : cc.caps) {
    switch (cap.multiplicity) {
      case 1:
        CHECK(cap.element == "F");
        CHECK(cap.kind == CapKind::terminal);
        break;
      case 2:
        CHECK(cap.element == "O");
        CHECK(cap.kind == CapKind::bridging);
        break;
      case 3:
        CHECK(cap.element == "B");
        CHECK(cap.kind == CapKind::trivalent);
        break;
      default:
        FAIL("unexpected cap multiplicity ", cap.multiplicity);
    }
  }
}

TEST_CASE("unwrapped cluster geometry preserves bond lengths") {
  const DefectFixture fx = oxygen_vacancy_fixture();
  const auto carve = carve_cluster(fx.defective, fx.cluster_selection);
  const auto cc = cap_cluster(fx.defective, carve, CapSide::cluster, fx.defect_center);

  // In the unwrapped molecule, core-core and core-cap contacts that were
  // bonds in the crystal must still be at crystal bond length.
  int bonds = 0;
  std::vector<Vec3> pts;
  for (const auto& a : cc.core) pts.push_back(a.position);
  for (const auto& c : cc.caps) pts.push_back(c.position);
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const double d = (pts[i] - pts[j]).norm();
      CHECK(d > 1.0);  // nothing collapses
      if (d < 1.80) {
        CHECK(d == doctest::Approx(1.54488).epsilon(1e-3));
        ++bonds;
      }
    }
  CHECK(bonds > 0);
}

TEST_CASE("selection spanning the whole cell cannot be unwrapped") {
  // A 1x1x1 conventional cell selection covers the full periodic cell, so
  // unwrapping into a finite molecule must fail loudly.
  const Structure s = build_diamond_supercell(1, 1, 1);
  std::vector<int> all;
  for (const auto& site : s.sites) all.push_back(site.id);
  const auto carve = carve_cluster(s, all);
  CHECK(carve.boundary.empty());
  CHECK_THROWS_AS(cap_cluster(s, carve, CapSide::cluster), domain_error);
}

TEST_CASE("select_defect_cluster reproduces the fixture selections") {
  const DefectFixture ov = oxygen_vacancy_fixture();
  CHECK(select_defect_cluster(ov.defective, ov.vacancy_positions) ==
        ov.cluster_selection);
  CHECK(ov.cluster_selection.size() == 16);

  const DefectFixture vov = divacancy_oxygen_fixture();
  CHECK(select_defect_cluster(vov.defective, vov.vacancy_positions) ==
        vov.cluster_selection);
  CHECK(vov.cluster_selection.size() == 27);
}
