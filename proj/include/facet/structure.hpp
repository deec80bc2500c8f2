#pragma once

// Shared geometry data layer: periodic cells, atomic structures, and
// volumetric grids.  Structures store wrapped fractional coordinates plus a
// stable integer id per site; Cartesian Angstrom values are derived through
// the cell.  Grids are x-fastest scalar fields sampled at voxel centers.

#include "facet/core.hpp"

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace facet {

// Lattice vectors are the rows of `vectors`: row i is lattice vector a_i in
// Angstrom.  `periodic` marks which directions wrap (clusters use none).
struct UnitCell {
  Mat3 vectors = Mat3::Identity();
  std::array<bool, 3> periodic = {true, true, true};

  static UnitCell cubic(double a);
  // Non-periodic bounding box for molecular/cluster data.
  static UnitCell box(double a);

  double volume() const;
  bool is_cubic(double tol = 1e-6) const;
  // Edge length of a cubic cell; throws domain_error otherwise.
  double cubic_edge(double tol = 1e-6) const;

  Vec3 to_cartesian(const Vec3& frac) const { return vectors.transpose() * frac; }
  Vec3 to_fractional(const Vec3& cart) const;

  // Shortest image of the Cartesian displacement under the periodic
  // directions.  Exact for reduced cells (searches neighbor images).
  Vec3 min_image(const Vec3& cart_delta) const;
  double distance(const Vec3& cart_a, const Vec3& cart_b) const {
    return min_image(cart_b - cart_a).norm();
  }
};

// Wraps each fractional component into [0,1) along periodic directions.
Vec3 wrap_fractional(const Vec3& frac, const std::array<bool, 3>& periodic);

struct Site {
  int id = 0;
  std::string species;  // canonical element symbol
  Vec3 frac = Vec3::Zero();
};

struct Structure {
  UnitCell cell;
  std::vector<Site> sites;
  std::string comment;

  std::size_t size() const { return sites.size(); }
  Vec3 cartesian(std::size_t index) const { return cell.to_cartesian(sites[index].frac); }

  // Index into `sites` for a site id; nullopt when absent.
  std::optional<std::size_t> index_of(int site_id) const;

  // Counts per species in first-appearance order, the way POSCAR groups them.
  std::vector<std::pair<std::string, int>> species_counts() const;

  // Sum of atomic numbers minus `charge`: electron count for closed-shell
  // checks.
  long electron_count(int charge = 0) const;

  // Enforces the type invariants: unique ids, known species, wrapped
  // fractional coordinates, no two sites closer than `min_separation`
  // (minimum image).  Throws domain_error on violation.
  void validate(double min_separation = 0.5) const;
};

// How stored numbers relate to the physical scalar field f(r):
//   raw_values          stored = f at the sample point
//   times_cell_volume   stored = f * cell volume (CHGCAR convention)
enum class GridScale { raw_values, times_cell_volume };

// Scalar field on a regular fractional grid.  Storage is x-fastest:
// flat = ix + nx*(iy + ny*iz).  The sample point of voxel (ix,iy,iz) is the
// voxel center, fractional ((ix+.5)/nx, (iy+.5)/ny, (iz+.5)/nz), and every
// voxel carries the uniform quadrature weight cellvolume/N.
struct VolumetricGrid {
  UnitCell cell;
  std::array<int, 3> shape = {0, 0, 0};
  GridScale scale = GridScale::raw_values;
  std::vector<double> data;

  static VolumetricGrid zeros(const UnitCell& cell, std::array<int, 3> shape);

  std::size_t size() const { return data.size(); }
  std::size_t index(int ix, int iy, int iz) const {
    return static_cast<std::size_t>(ix) +
           static_cast<std::size_t>(shape[0]) *
               (static_cast<std::size_t>(iy) +
                static_cast<std::size_t>(shape[1]) * static_cast<std::size_t>(iz));
  }
  std::array<int, 3> unravel(std::size_t flat) const {
    const int nx = shape[0], ny = shape[1];
    const int ix = static_cast<int>(flat % nx);
    const int iy = static_cast<int>((flat / nx) % ny);
    const int iz = static_cast<int>(flat / (static_cast<std::size_t>(nx) * ny));
    return {ix, iy, iz};
  }
  Vec3 fractional_sample_point(int ix, int iy, int iz) const {
    return Vec3((ix + 0.5) / shape[0], (iy + 0.5) / shape[1], (iz + 0.5) / shape[2]);
  }
  Vec3 sample_point(int ix, int iy, int iz) const {
    return cell.to_cartesian(fractional_sample_point(ix, iy, iz));
  }
  double voxel_volume() const { return cell.volume() / static_cast<double>(size()); }

  // Physical field value at a stored sample (undoes the storage scale).
  double field_at(std::size_t flat) const {
    return scale == GridScale::raw_values ? data[flat] : data[flat] / cell.volume();
  }

  // Periodic trilinear interpolation of the physical field at a fractional
  // point.
  double sample_fractional(const Vec3& frac) const;

  bool compatible_with(const VolumetricGrid& other, double cell_tol = 1e-8) const;
};

// Throws domain_error unless both grids share shape and cell.
void require_compatible(const VolumetricGrid& a, const VolumetricGrid& b,
                        const char* context);

}  // namespace facet
