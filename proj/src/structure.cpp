#include "facet/structure.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace facet {

UnitCell UnitCell::cubic(double a) {
  UnitCell c;
  c.vectors = Mat3::Identity() * a;
  return c;
}

UnitCell UnitCell::box(double a) {
  UnitCell c = cubic(a);
  c.periodic = {false, false, false};
  return c;
}

double UnitCell::volume() const { return std::abs(vectors.determinant()); }

bool UnitCell::is_cubic(double tol) const {
  const double a = vectors(0, 0);
  Mat3 ideal = Mat3::Identity() * a;
  return a > 0 && (vectors - ideal).cwiseAbs().maxCoeff() <= tol;
}

double UnitCell::cubic_edge(double tol) const {
  if (!is_cubic(tol))
    throw domain_error("operation requires a cubic cell (axis-aligned, equal edges)");
  return vectors(0, 0);
}

Vec3 UnitCell::to_fractional(const Vec3& cart) const {
  return vectors.transpose().inverse() * cart;
}

Vec3 UnitCell::min_image(const Vec3& cart_delta) const {
  Vec3 frac = to_fractional(cart_delta);
  for (int k = 0; k < 3; ++k)
    if (periodic[k]) frac[k] -= std::round(frac[k]);
  Vec3 best = to_cartesian(frac);
  double best2 = best.squaredNorm();
  // Rounding each fractional component is not always shortest in a skewed
  // cell; scan the surrounding images along the periodic directions.
  for (int i = -1; i <= 1; ++i)
    for (int j = -1; j <= 1; ++j)
      for (int k = -1; k <= 1; ++k) {
        if ((i != 0 && !periodic[0]) || (j != 0 && !periodic[1]) ||
            (k != 0 && !periodic[2]))
          continue;
        Vec3 cand = to_cartesian(frac + Vec3(i, j, k));
        double d2 = cand.squaredNorm();
        if (d2 < best2) {
          best2 = d2;
          best = cand;
        }
      }
  return best;
}

Vec3 wrap_fractional(const Vec3& frac, const std::array<bool, 3>& periodic) {
  Vec3 out = frac;
  for (int k = 0; k < 3; ++k) {
    if (!periodic[k]) continue;
    out[k] -= std::floor(out[k]);
    if (out[k] >= 1.0) out[k] = 0.0;  // guards the 0.9999999999999999 case
  }
  return out;
}

std::optional<std::size_t> Structure::index_of(int site_id) const {
  for (std::size_t i = 0; i < sites.size(); ++i)
    if (sites[i].id == site_id) return i;
  return std::nullopt;
}

std::vector<std::pair<std::string, int>> Structure::species_counts() const {
  std::vector<std::pair<std::string, int>> counts;
  for (const auto& site : sites) {
    auto it = std::find_if(counts.begin(), counts.end(),
                           [&](const auto& p) { return p.first == site.species; });
    if (it == counts.end())
      counts.emplace_back(site.species, 1);
    else
      ++it->second;
  }
  return counts;
}

long Structure::electron_count(int charge) const {
  long n = 0;
  for (const auto& site : sites) {
    auto z = atomic_number(site.species);
    if (!z) throw domain_error("unknown element symbol: '" + site.species + "'");
    n += *z;
  }
  return n - charge;
}

void Structure::validate(double min_separation) const {
  std::set<int> ids;
  for (const auto& site : sites) {
    if (!ids.insert(site.id).second) {
      std::ostringstream os;
      os << "duplicate site id " << site.id;
      throw domain_error(os.str());
    }
    if (!atomic_number(site.species))
      throw domain_error("unknown element symbol: '" + site.species + "'");
    for (int k = 0; k < 3; ++k) {
      if (!std::isfinite(site.frac[k]))
        throw domain_error("non-finite fractional coordinate");
      if (cell.periodic[k] && (site.frac[k] < 0.0 || site.frac[k] >= 1.0)) {
        std::ostringstream os;
        os << "site " << site.id << " fractional coordinate " << site.frac[k]
           << " outside [0,1)";
        throw domain_error(os.str());
      }
    }
  }
  if (cell.volume() <= 0.0) throw domain_error("cell volume must be positive");
  for (std::size_t i = 0; i < sites.size(); ++i)
    for (std::size_t j = i + 1; j < sites.size(); ++j) {
      double d = cell.distance(cartesian(i), cartesian(j));
      if (d < min_separation) {
        std::ostringstream os;
        os << "sites " << sites[i].id << " and " << sites[j].id << " are " << d
           << " Angstrom apart (minimum " << min_separation << ")";
        throw domain_error(os.str());
      }
    }
}

VolumetricGrid VolumetricGrid::zeros(const UnitCell& cell, std::array<int, 3> shape) {
  if (shape[0] <= 0 || shape[1] <= 0 || shape[2] <= 0)
    throw domain_error("grid shape must be positive in every direction");
  VolumetricGrid g;
  g.cell = cell;
  g.shape = shape;
  g.data.assign(static_cast<std::size_t>(shape[0]) * shape[1] * shape[2], 0.0);
  return g;
}

double VolumetricGrid::sample_fractional(const Vec3& frac) const {
  double w[3][2];
  int i0[3], i1[3];
  for (int k = 0; k < 3; ++k) {
    const int n = shape[k];
    // Continuous voxel coordinate: sample j sits at fractional (j+.5)/n.
    double u = frac[k] * n - 0.5;
    double base = std::floor(u);
    double t = u - base;
    long lo = static_cast<long>(base);
    auto wrap = [n](long v) {
      long m = v % n;
      return static_cast<int>(m < 0 ? m + n : m);
    };
    i0[k] = wrap(lo);
    i1[k] = wrap(lo + 1);
    w[k][0] = 1.0 - t;
    w[k][1] = t;
  }
  double acc = 0.0;
  for (int dz = 0; dz < 2; ++dz)
    for (int dy = 0; dy < 2; ++dy)
      for (int dx = 0; dx < 2; ++dx) {
        std::size_t flat =
            index(dx ? i1[0] : i0[0], dy ? i1[1] : i0[1], dz ? i1[2] : i0[2]);
        acc += w[0][dx] * w[1][dy] * w[2][dz] * field_at(flat);
      }
  return acc;
}

bool VolumetricGrid::compatible_with(const VolumetricGrid& other, double cell_tol) const {
  if (shape != other.shape) return false;
  return (cell.vectors - other.cell.vectors).cwiseAbs().maxCoeff() <= cell_tol;
}

void require_compatible(const VolumetricGrid& a, const VolumetricGrid& b,
                        const char* context) {
  if (!a.compatible_with(b))
    throw domain_error(std::string(context) + ": grids have mismatched shape or cell");
}

}  // namespace facet
