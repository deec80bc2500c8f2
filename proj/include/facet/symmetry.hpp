#pragma once

// Point-group machinery: operation sets with class labels, character tables
// (embedded, overridable from a plain-text format), irrep products, state
// labels from orbital occupations, the continuous symmetry measure with
// optimal same-species assignment, point-group detection with axis search,
// and irrep classification of grid-sampled functions.

#include "facet/core.hpp"
#include "facet/structure.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace facet::sym {

// ---------------------------------------------------------------------------
// groups and tables

struct SymOp {
  Mat3 matrix;              // orthogonal, det +-1
  std::string class_label;  // matches a character-table class ("E", "C3", ...)
};

struct CharacterTable {
  struct ClassInfo {
    std::string label;
    int size = 1;
  };
  struct IrrepRow {
    std::string name;
    std::vector<double> characters;  // one per class
  };

  std::string group;
  std::vector<ClassInfo> classes;
  std::vector<IrrepRow> irreps;

  int order() const;
  std::size_t class_index(const std::string& label) const;   // throws domain_error
  std::size_t irrep_index(const std::string& name) const;    // case-insensitive
  double character(const std::string& irrep, const std::string& cls) const;
  int dimension(const std::string& irrep) const;  // chi(E)
  // Name of the totally symmetric irrep (all characters +1).
  const std::string& identity_irrep() const;
};

struct PointGroup {
  std::string name;
  std::vector<SymOp> ops;  // canonical orientation, identity first
  CharacterTable table;

  int order() const { return static_cast<int>(ops.size()); }
  // Same abstract group with every operation conjugated into the frame whose
  // x', y', z' axes are the columns of `frame` (an orthogonal matrix).
  PointGroup oriented(const Mat3& frame) const;
};

// Groups available by name: C1, Cs, C2, C2v, C3v, D3d, Td.
PointGroup make_point_group(const std::string& name);
std::vector<std::string> known_group_names();

// Plain-text character-table format: group name line; class header row
// (optionally with multiplicity prefixes like "2C3"); one row per irrep.
// Blank lines separate tables; '#' starts a comment.
std::vector<CharacterTable> parse_character_tables(const std::string& text,
                                                   const std::string& source);

// Replaces the embedded table of the matching group after checking that the
// override's classes agree with the group's operations.
PointGroup with_table_override(PointGroup g, const CharacterTable& table);

// ---------------------------------------------------------------------------
// irrep algebra

struct ProductResult {
  std::vector<std::string> irreps;  // with multiplicity (names repeat)
  bool reducible = false;
  std::string str() const;  // "A2" or "A1+A2+E"
};

// Character-wise product decomposed against the table rows.  One-dimensional
// inputs always reduce to a single irrep; products involving degenerate
// irreps come back flagged reducible.
ProductResult irrep_product(const std::string& a, const std::string& b,
                            const PointGroup& g);

struct Orbital {
  std::string label;  // "3a1" style, informational
  std::string irrep;
  int occupation = 0;  // 0, 1, or 2
};

struct ElectronConfiguration {
  std::vector<Orbital> orbitals;
  double spin = 0.0;  // total S
};

struct StateLabel {
  int multiplicity = 1;
  std::vector<std::string> irreps;
  bool reducible = false;
  std::string str() const;  // "1B2", "3(A1+A2+E)"
};

// Spatial irrep = product over singly occupied orbitals (closed shells
// contribute the identity); multiplicity = 2S+1.
StateLabel assign_state_irrep(const ElectronConfiguration& cfg, const PointGroup& g);

// ---------------------------------------------------------------------------
// continuous symmetry measure

struct PointSet {
  std::vector<Vec3> points;           // Cartesian
  std::vector<std::string> species;   // same length; restricts assignments
};

struct CsmResult {
  double s_prime = 0.0;
  // Per op (group order), the largest normalized displacement between a
  // point and its symmetry image.
  std::vector<double> op_max_displacement;
  // Nearest exactly symmetric configuration, in the input frame and scale.
  std::vector<Vec3> nearest_points;
};

// Normalized mean-square displacement from the nearest group-symmetric
// configuration: points are centered (centroid or explicit center), scaled
// by the largest radius, matched per operation by minimum-cost same-species
// assignment, and folded through the group average.
CsmResult csm(const PointSet& ps, const PointGroup& g,
              std::optional<Vec3> center = std::nullopt);

// Same measure with exhaustive per-operation assignment; factorial cost,
// intended as a test oracle for small point sets.
CsmResult csm_brute_force(const PointSet& ps, const PointGroup& g,
                          std::optional<Vec3> center = std::nullopt);

// ---------------------------------------------------------------------------
// detection

struct DetectionOptions {
  double threshold = defaults::symmetry_tolerance;
  bool refine = true;       // local orientation refinement on the best seed
  int max_seeds = 200;      // cap on candidate axis directions
};

struct CandidateScore {
  std::string group;
  double s_prime = 0.0;
  Mat3 orientation = Mat3::Identity();
};

struct DetectionResult {
  std::string group;  // highest-order candidate within threshold
  Mat3 orientation = Mat3::Identity();
  CsmResult csm;
  std::vector<CandidateScore> candidates;  // best score per candidate group
};

// Scores every candidate group over axis seeds (inertia eigenvectors, atom
// directions, pair directions and midpoints), refines the best orientation,
// and picks the highest-order group with S' at or below the threshold.
DetectionResult detect_point_group(
    const PointSet& ps,
    const std::vector<std::string>& candidates = known_group_names(),
    const DetectionOptions& options = {});

// ---------------------------------------------------------------------------
// grid-function classification

// Irrep weights w of a scalar field under an oriented group:
// w_irrep = (dim/|G|) * sum_ops chi(op) <f, f.op> / <f, f>, with resampling
// by periodic trilinear interpolation.  `center_frac` defaults to the cell
// center.  Returns (irrep, weight) pairs in table order.
std::vector<std::pair<std::string, double>> classify_grid_function(
    const VolumetricGrid& grid, const PointGroup& g,
    std::optional<Vec3> center_frac = std::nullopt, int threads = 1);

}  // namespace facet::sym
