#pragma once

// Diamond supercell construction, point-defect editing, coordination
// analysis, cluster carving, and valence-complementary capping.
//
// Capping rule: an external lattice site bonded to m core atoms receives a
// cap of valence m placed exactly at the lattice position: F for m=1
// (terminal), O for m=2 (bridging), B for m=3 (trivalent).  The same rule
// serves both the cluster side and the environment side of a partition, so
// the union of both cap sets always has an even electron count.

#include "facet/core.hpp"
#include "facet/structure.hpp"

#include <optional>
#include <string>
#include <vector>

namespace facet::lattice {

// Conventional cubic diamond supercell: 8 carbon atoms per cubic cell,
// n1*n2*n3 cells, edges n_i*a0.
Structure build_diamond_supercell(int n1, int n2, int n3,
                                  double a0 = defaults::diamond_lattice_constant);

// Supercell of the two-atom fcc primitive cell (2*n1*n2*n3 carbon atoms).
// The 128- and 250-atom models are 4x4x4 and 5x5x5 of these.
Structure build_diamond_primitive_supercell(
    int n1, int n2, int n3, double a0 = defaults::diamond_lattice_constant);

// ---------------------------------------------------------------------------
// defects

struct DefectEdit {
  enum class Kind { substitute, remove };
  Kind kind;
  int site_id;
  std::string species;  // substitute only

  static DefectEdit substitute(int site_id, std::string species) {
    return {Kind::substitute, site_id, std::move(species)};
  }
  static DefectEdit remove(int site_id) { return {Kind::remove, site_id, {}}; }
};

struct DefectSpec {
  std::vector<DefectEdit> edits;
  int charge = 0;
};

// Substitutes and removes sites.  Ids of surviving sites are preserved.
// Throws domain_error on unknown ids or duplicate edits of one site.
Structure apply_defects(const Structure& s, const DefectSpec& d);

// ---------------------------------------------------------------------------
// coordination

enum class SiteClass {
  unclassified,      // non-carbon or unusual coordination
  four_fold,         // fully coordinated carbon
  dangling_type_i,   // 3-coordinated carbon, two 3-coordinated carbons nearby
  dangling_type_ii,  // 3-coordinated carbon, three 3-coordinated carbons nearby
  oxygen_adjacent,   // carbon bonded to an oxygen site
};

const char* to_string(SiteClass c);

struct SiteCoordination {
  int site_id;
  std::string species;
  int neighbor_count;
  SiteClass cls;
};

struct CoordinationReport {
  std::vector<SiteCoordination> sites;  // same order as the input structure
  int count(SiteClass c) const;
  int dangling_count() const {
    return count(SiteClass::dangling_type_i) + count(SiteClass::dangling_type_ii);
  }
};

// Neighbor counting under periodic minimum image.  A 3-coordinated carbon is
// type II when at least three other 3-coordinated carbons sit within
// `dangling_pair_cutoff` (second-neighbor range), type I otherwise; carbons
// bonded to oxygen are flagged separately.
CoordinationReport coordination(const Structure& s,
                                double bond_cutoff = defaults::bond_cutoff,
                                double dangling_pair_cutoff = 2.70);

// ---------------------------------------------------------------------------
// carving and capping

struct BoundarySite {
  int external_id;            // site of the source structure, not in the core
  std::vector<int> core_ids;  // core atoms it bonds to (multiplicity = size)
};

struct CarveResult {
  std::vector<int> core_ids;          // sorted ascending
  std::vector<BoundarySite> boundary; // sorted by external_id
};

// Splits the structure into the selected core and its boundary bonds.
CarveResult carve_cluster(const Structure& s, const std::vector<int>& selection,
                          double bond_cutoff = defaults::bond_cutoff);

enum class CapKind { terminal, bridging, trivalent };
enum class CapSide { cluster, environment };

const char* to_string(CapKind k);
const char* to_string(CapSide s);

struct ClusterAtom {
  int source_id;
  std::string species;
  Vec3 position;  // Cartesian Angstrom, unwrapped around the cluster
};

struct Cap {
  int source_id;  // external lattice site the cap replaces
  std::string element;
  CapKind kind;
  int multiplicity;
  Vec3 position;  // Cartesian Angstrom, the lattice position itself
};

struct CappedCluster {
  CapSide side = CapSide::cluster;
  std::vector<ClusterAtom> core;
  std::vector<Cap> caps;

  std::vector<std::pair<std::string, int>> core_composition() const;
  std::vector<std::pair<std::string, int>> cap_composition() const;
  // "C15OF12O12" style: core part (C first) then caps ordered F, O, B.
  std::string formula() const;
  long cap_electron_count() const;
};

// Places valence-matched caps on every boundary site.  `unwrap_center`
// anchors the Cartesian unwrapping; defaults to the first core atom.
CappedCluster cap_cluster(const Structure& s, const CarveResult& carve, CapSide side,
                          std::optional<Vec3> unwrap_center = std::nullopt,
                          double bond_cutoff = defaults::bond_cutoff);

// ---------------------------------------------------------------------------
// cluster selection and shipped fixtures

// Membership rule used for the shipped fixtures: start from every atom
// within bond_cutoff of a vacancy position, add their bonded neighbors, then
// absorb any outside atom bonded to three or more selected atoms until no
// such atom remains.  Returns sorted site ids.
std::vector<int> select_defect_cluster(const Structure& defective,
                                       const std::vector<Vec3>& vacancy_positions,
                                       double bond_cutoff = defaults::bond_cutoff);

struct DefectFixture {
  std::string name;
  std::string point_group;  // "C3v" or "C2v"
  Structure pristine;
  Structure defective;
  DefectSpec spec;
  int oxygen_id = -1;
  std::vector<Vec3> vacancy_positions;  // Cartesian Angstrom
  Vec3 defect_center = Vec3::Zero();    // Cartesian Angstrom
  std::vector<int> cluster_selection;   // sorted site ids into `defective`
  // Columns are the x', y', z' axes of the defect frame (z' = principal
  // axis); orients canonical point-group operations onto the defect.
  Mat3 orientation = Mat3::Identity();
};

// Substitutional oxygen adjacent to one vacancy in the 128-atom cell
// (3-fold axis along the O-vacancy direction).
DefectFixture oxygen_vacancy_fixture(double a0 = defaults::diamond_lattice_constant);

// Vacancy-oxygen-vacancy chain in the 250-atom cell (2-fold axis along
// [001], mirrors through the (110) and (1-10) planes).
DefectFixture divacancy_oxygen_fixture(double a0 = defaults::diamond_lattice_constant);

}  // namespace facet::lattice
