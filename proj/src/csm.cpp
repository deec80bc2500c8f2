#include "facet/hungarian.hpp"
#include "facet/reduce.hpp"
#include "facet/symmetry.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>

namespace facet::sym {

namespace {

struct NormalizedPoints {
  std::vector<Vec3> q;  // centered, scaled
  Vec3 center = Vec3::Zero();
  double scale = 1.0;
  std::vector<std::vector<std::size_t>> blocks;  // same-species index blocks
};

NormalizedPoints normalize_points(const PointSet& ps, const std::optional<Vec3>& center) {
  const std::size_t n = ps.points.size();
  if (n < 2) throw domain_error("symmetry measure needs at least two points");
  if (ps.species.size() != n)
    throw domain_error("species list length does not match point count");

  NormalizedPoints np;
  np.center = center.value_or(
      std::accumulate(ps.points.begin(), ps.points.end(), Vec3(0, 0, 0)) /
      static_cast<double>(n));

  np.q.resize(n);
  double max_r = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    np.q[i] = ps.points[i] - np.center;
    max_r = std::max(max_r, np.q[i].norm());
  }
  if (max_r < 1e-12)
    throw domain_error("all points coincide with the center; measure undefined");
  np.scale = max_r;
  for (auto& v : np.q) v /= max_r;

  std::map<std::string, std::size_t> block_of;
  for (std::size_t i = 0; i < n; ++i) {
    auto [it, fresh] = block_of.try_emplace(ps.species[i], np.blocks.size());
    if (fresh) np.blocks.emplace_back();
    np.blocks[it->second].push_back(i);
  }
  return np;
}

// Minimum-cost matching of transformed points onto original points within
// one species block; returns global indices.  For an involutive operation
// the cost matrix is mathematically symmetric, so an assignment and its
// inverse always tie; the entries are symmetrized to make the tie exact in
// floating point and the lexicographically smaller of the pair is returned,
// keeping the fast and exhaustive solvers in agreement.
std::vector<std::size_t> match_block(const std::vector<Vec3>& transformed,
                                     const std::vector<Vec3>& q,
                                     const std::vector<std::size_t>& block,
                                     bool exhaustive, bool involutive) {
  const std::size_t m = block.size();
  std::vector<std::size_t> out(m);
  if (m == 1) {
    out[0] = block[0];
    return out;
  }

  std::vector<double> cost(m * m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      cost[i * m + j] = (transformed[block[i]] - q[block[j]]).squaredNorm();
  if (involutive) {
    // Make C_ij and C_ji bitwise equal; doubling keeps the minimizers.
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = i + 1; j < m; ++j) {
        const double v = cost[i * m + j] + cost[j * m + i];
        cost[i * m + j] = v;
        cost[j * m + i] = v;
      }
  }

  std::vector<std::size_t> perm(m);
  if (exhaustive) {
    std::vector<std::size_t> trial(m);
    std::iota(trial.begin(), trial.end(), 0);
    double best_cost = std::numeric_limits<double>::infinity();
    do {
      double c = 0.0;
      for (std::size_t i = 0; i < m; ++i) c += cost[i * m + trial[i]];
      if (c < best_cost) {
        best_cost = c;
        perm = trial;
      }
    } while (std::next_permutation(trial.begin(), trial.end()));
  } else {
    perm = solve_assignment(cost, m);
  }

  if (involutive) {
    // The inverse sums the same symmetrized entries, so it is optimal too.
    std::vector<std::size_t> inverse(m);
    for (std::size_t i = 0; i < m; ++i) inverse[perm[i]] = i;
    if (inverse < perm) perm = inverse;
  }
  for (std::size_t i = 0; i < m; ++i) out[i] = block[perm[i]];
  return out;
}

CsmResult csm_impl(const PointSet& ps, const PointGroup& g,
                   const std::optional<Vec3>& center, bool exhaustive) {
  if (exhaustive)
    for (const auto& block_size : [&] {
          std::map<std::string, std::size_t> c;
          for (const auto& s : ps.species) ++c[s];
          std::vector<std::size_t> out;
          for (const auto& [k, v] : c) out.push_back(v);
          return out;
        }())
      if (block_size > 10)
        throw domain_error("exhaustive assignment limited to blocks of 10 points");

  const auto np = normalize_points(ps, center);
  const std::size_t n = np.q.size();

  CsmResult result;
  result.op_max_displacement.assign(g.ops.size(), 0.0);
  std::vector<Vec3> folded(n, Vec3::Zero());

  std::vector<Vec3> transformed(n);
  for (std::size_t k = 0; k < g.ops.size(); ++k) {
    const Mat3& m = g.ops[k].matrix;
    for (std::size_t i = 0; i < n; ++i) transformed[i] = m * np.q[i];
    const bool involutive =
        (m * m - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-12;

    std::vector<std::size_t> match(n);
    for (const auto& block : np.blocks) {
      const auto matched =
          match_block(transformed, np.q, block, exhaustive, involutive);
      for (std::size_t i = 0; i < block.size(); ++i) match[block[i]] = matched[i];
    }

    double max_disp = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const Vec3 unfolded = m.transpose() * np.q[match[i]];
      folded[i] += unfolded;
      max_disp = std::max(max_disp, (np.q[i] - unfolded).norm());
    }
    result.op_max_displacement[k] = max_disp;
  }

  double acc = 0.0;
  result.nearest_points.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    folded[i] /= static_cast<double>(g.ops.size());
    acc += (np.q[i] - folded[i]).squaredNorm();
    result.nearest_points[i] = np.center + np.scale * folded[i];
  }
  result.s_prime = acc / static_cast<double>(n);
  return result;
}

}  // namespace

CsmResult csm(const PointSet& ps, const PointGroup& g, std::optional<Vec3> center) {
  return csm_impl(ps, g, center, false);
}

CsmResult csm_brute_force(const PointSet& ps, const PointGroup& g,
                          std::optional<Vec3> center) {
  return csm_impl(ps, g, center, true);
}

// ---------------------------------------------------------------------------
// detection

namespace {

Mat3 frame_from(const Vec3& z_axis, const Vec3& x_hint) {
  const Vec3 z = z_axis.normalized();
  Vec3 x = x_hint - x_hint.dot(z) * z;
  if (x.norm() < 1e-9) {
    // Hint parallel to the axis; take any perpendicular direction.
    x = std::abs(z.x()) < 0.9 ? Vec3(1, 0, 0) : Vec3(0, 1, 0);
    x -= x.dot(z) * z;
  }
  x.normalize();
  Mat3 f;
  f.col(0) = x;
  f.col(1) = z.cross(x);
  f.col(2) = z;
  return f;
}

void add_seed(std::vector<Vec3>& seeds, const Vec3& v, std::size_t cap) {
  if (seeds.size() >= cap) return;
  const double norm = v.norm();
  if (norm < 1e-9) return;
  const Vec3 u = v / norm;
  for (const auto& s : seeds)
    if (std::abs(s.dot(u)) > 1.0 - 1e-8) return;
  seeds.push_back(u);
}

std::vector<Vec3> axis_seeds(const std::vector<Vec3>& pts, const Vec3& center,
                             std::size_t cap) {
  std::vector<Vec3> q(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) q[i] = pts[i] - center;

  std::vector<Vec3> seeds;
  Mat3 inertia = Mat3::Zero();
  for (const auto& v : q)
    inertia += v.squaredNorm() * Mat3::Identity() - v * v.transpose();
  Eigen::SelfAdjointEigenSolver<Mat3> es(inertia);
  for (int k = 0; k < 3; ++k) add_seed(seeds, es.eigenvectors().col(k), cap);

  for (const auto& v : q) add_seed(seeds, v, cap);
  if (q.size() <= 16) {
    for (std::size_t i = 0; i < q.size(); ++i)
      for (std::size_t j = i + 1; j < q.size(); ++j) {
        add_seed(seeds, q[i] - q[j], cap);
        add_seed(seeds, q[i] + q[j], cap);
      }
  }
  return seeds;
}

// Plain Nelder-Mead on a 3-vector; good enough to polish an axis-angle
// perturbation of an already close orientation.
Vec3 nelder_mead3(const std::function<double(const Vec3&)>& f, double step,
                  int iterations) {
  std::array<Vec3, 4> x = {Vec3::Zero(), Vec3(step, 0, 0), Vec3(0, step, 0),
                           Vec3(0, 0, step)};
  std::array<double, 4> y;
  for (int i = 0; i < 4; ++i) y[i] = f(x[i]);

  auto order = [&] {
    std::array<int, 4> idx = {0, 1, 2, 3};
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return y[a] < y[b]; });
    std::array<Vec3, 4> xs;
    std::array<double, 4> ys;
    for (int i = 0; i < 4; ++i) {
      xs[i] = x[idx[i]];
      ys[i] = y[idx[i]];
    }
    x = xs;
    y = ys;
  };

  for (int it = 0; it < iterations; ++it) {
    order();
    if (y[3] - y[0] < 1e-18) break;
    const Vec3 centroid = (x[0] + x[1] + x[2]) / 3.0;
    const Vec3 refl = centroid + (centroid - x[3]);
    const double fr = f(refl);
    if (fr < y[0]) {
      const Vec3 expand = centroid + 2.0 * (centroid - x[3]);
      const double fe = f(expand);
      x[3] = fe < fr ? expand : refl;
      y[3] = std::min(fe, fr);
    } else if (fr < y[2]) {
      x[3] = refl;
      y[3] = fr;
    } else {
      const Vec3 contract = centroid + 0.5 * (x[3] - centroid);
      const double fc = f(contract);
      if (fc < y[3]) {
        x[3] = contract;
        y[3] = fc;
      } else {
        for (int i = 1; i < 4; ++i) {
          x[i] = x[0] + 0.5 * (x[i] - x[0]);
          y[i] = f(x[i]);
        }
      }
    }
  }
  order();
  return x[0];
}

Mat3 axis_angle_rotation(const Vec3& w) {
  const double angle = w.norm();
  if (angle < 1e-15) return Mat3::Identity();
  return Eigen::AngleAxisd(angle, w / angle).toRotationMatrix();
}

// Cyclic rotation subgroup used to pre-score candidate principal axes.
PointGroup rotor_group(int fold) {
  PointGroup g;
  g.name = "_rotor";
  g.ops.push_back({Mat3::Identity(), "E"});
  for (int k = 1; k < fold; ++k) {
    const double angle = 2.0 * std::numbers::pi * k / fold;
    g.ops.push_back(
        {Eigen::AngleAxisd(angle, Vec3(0, 0, 1)).toRotationMatrix(), "Cn"});
  }
  return g;
}

struct SearchOutcome {
  double s_prime = std::numeric_limits<double>::infinity();
  Mat3 frame = Mat3::Identity();
};

double score(const PointSet& ps, const PointGroup& g, const Mat3& frame) {
  return csm(ps, g.oriented(frame)).s_prime;
}

void consider(SearchOutcome& best, const PointSet& ps, const PointGroup& g,
              const Mat3& frame) {
  const double s = score(ps, g, frame);
  if (s < best.s_prime) {
    best.s_prime = s;
    best.frame = frame;
  }
}

// Secondary in-plane directions perpendicular to a fixed axis.
std::vector<Vec3> azimuth_seeds(const std::vector<Vec3>& seeds, const Vec3& z,
                                std::size_t cap) {
  std::vector<Vec3> out;
  for (const auto& s : seeds) {
    Vec3 p = s - s.dot(z) * z;
    add_seed(out, p, cap);
    if (out.size() >= cap) break;
  }
  if (out.empty()) {
    Vec3 x = std::abs(z.x()) < 0.9 ? Vec3(1, 0, 0) : Vec3(0, 1, 0);
    out.push_back((x - x.dot(z) * z).normalized());
  }
  return out;
}

std::vector<Vec3> top_axes_by_rotor(const PointSet& ps, const std::vector<Vec3>& seeds,
                                    int fold, std::size_t keep) {
  const PointGroup rotor = rotor_group(fold);
  std::vector<std::pair<double, Vec3>> scored;
  scored.reserve(seeds.size());
  for (const auto& a : seeds)
    scored.emplace_back(score(ps, rotor, frame_from(a, Vec3(1, 0, 0))), a);
  std::stable_sort(scored.begin(), scored.end(),
                   [](const auto& l, const auto& r) { return l.first < r.first; });
  std::vector<Vec3> out;
  for (std::size_t i = 0; i < scored.size() && i < keep; ++i)
    out.push_back(scored[i].second);
  return out;
}

SearchOutcome search_orientation(const PointSet& ps, const PointGroup& g,
                                 const std::vector<Vec3>& seeds) {
  SearchOutcome best;
  const std::string& name = g.name;

  if (name == "C1") {
    best.s_prime = 0.0;
    return best;
  }

  if (name == "Cs" || name == "C2") {
    // Single generator fixed by the z' direction alone.
    for (const auto& a : seeds) consider(best, ps, g, frame_from(a, Vec3(1, 0, 0)));
    return best;
  }

  if (name == "C2v" || name == "C3v" || name == "D3d") {
    const int fold = name == "C2v" ? 2 : 3;
    for (const auto& axis : top_axes_by_rotor(ps, seeds, fold, 4)) {
      for (const auto& s : azimuth_seeds(seeds, axis, 16)) {
        consider(best, ps, g, frame_from(axis, s));
        consider(best, ps, g, frame_from(axis, s.cross(axis)));
      }
    }
    return best;
  }

  if (name == "Td") {
    // Orthogonal pairs of two-fold axes fix the frame.  Two-fold axes also
    // arise as sums of adjacent three-fold (body-diagonal) directions.
    auto c2_axes = top_axes_by_rotor(ps, seeds, 2, 8);
    const auto c3_axes = top_axes_by_rotor(ps, seeds, 3, 4);
    std::vector<Vec3> pool = c2_axes;
    for (std::size_t i = 0; i < c3_axes.size(); ++i)
      for (std::size_t j = i + 1; j < c3_axes.size(); ++j) {
        add_seed(pool, c3_axes[i] + c3_axes[j], 24);
        add_seed(pool, c3_axes[i] - c3_axes[j], 24);
      }
    for (std::size_t i = 0; i < pool.size(); ++i)
      for (std::size_t j = 0; j < pool.size(); ++j) {
        if (i == j || std::abs(pool[i].dot(pool[j])) > 0.3) continue;
        consider(best, ps, g, frame_from(pool[i], pool[j]));
      }
    if (!std::isfinite(best.s_prime))
      for (const auto& a : pool) consider(best, ps, g, frame_from(a, Vec3(1, 0, 0)));
    return best;
  }

  throw domain_error("unknown point group: '" + name + "'");
}

}  // namespace

DetectionResult detect_point_group(const PointSet& ps,
                                   const std::vector<std::string>& candidates,
                                   const DetectionOptions& options) {
  if (candidates.empty()) throw domain_error("candidate group list is empty");
  if (ps.points.empty()) throw domain_error("no points given");

  DetectionResult result;

  // A single point is invariant under everything.
  if (ps.points.size() == 1) {
    int best_order = 0;
    for (const auto& name : candidates) {
      const auto g = make_point_group(name);
      result.candidates.push_back({name, 0.0, Mat3::Identity()});
      if (g.order() > best_order) {
        best_order = g.order();
        result.group = name;
      }
    }
    return result;
  }

  const Vec3 center =
      std::accumulate(ps.points.begin(), ps.points.end(), Vec3(0, 0, 0)) /
      static_cast<double>(ps.points.size());
  const auto seeds =
      axis_seeds(ps.points, center, static_cast<std::size_t>(options.max_seeds));

  int best_order = -1;
  double best_s = std::numeric_limits<double>::infinity();
  bool any_within = false;

  auto evaluate = [&](const std::string& name) {
    const PointGroup g = make_point_group(name);
    SearchOutcome outcome = search_orientation(ps, g, seeds);

    if (options.refine && name != "C1" && outcome.s_prime > 1e-13 &&
        std::isfinite(outcome.s_prime)) {
      const Mat3 base = outcome.frame;
      const auto objective = [&](const Vec3& w) {
        return score(ps, g, axis_angle_rotation(w) * base);
      };
      const Vec3 w = nelder_mead3(objective, 0.02, 200);
      const Mat3 refined = axis_angle_rotation(w) * base;
      const double s = score(ps, g, refined);
      if (s < outcome.s_prime) outcome = {s, refined};
    }

    result.candidates.push_back({name, outcome.s_prime, outcome.frame});
    const int order = g.order();
    if (outcome.s_prime <= options.threshold &&
        (order > best_order || (order == best_order && outcome.s_prime < best_s))) {
      any_within = true;
      best_order = order;
      best_s = outcome.s_prime;
      result.group = name;
      result.orientation = outcome.frame;
    }
  };

  for (const auto& name : candidates) evaluate(name);
  // Everything is at least C1-symmetric; fall back when nothing qualifies.
  if (!any_within) {
    result.group = "C1";
    result.orientation = Mat3::Identity();
  }
  result.csm = csm(ps, make_point_group(result.group).oriented(result.orientation));
  return result;
}

// ---------------------------------------------------------------------------
// grid-function classification

std::vector<std::pair<std::string, double>> classify_grid_function(
    const VolumetricGrid& grid, const PointGroup& g, std::optional<Vec3> center_frac,
    int threads) {
  if (grid.size() == 0) throw domain_error("empty grid");
  const Vec3 cf = center_frac.value_or(Vec3(0.5, 0.5, 0.5));
  const Vec3 center = grid.cell.to_cartesian(cf);
  const Mat3 to_frac = grid.cell.vectors.transpose().inverse();

  const std::size_t nops = g.ops.size();
  // Slot 0 accumulates <f,f>; slot k+1 accumulates <f, f.op_k>.
  const auto sums = deterministic_sum_multi(
      grid.size(), nops + 1,
      [&](std::size_t flat, double* out) {
        const auto [ix, iy, iz] = grid.unravel(flat);
        const double f = grid.field_at(flat);
        const Vec3 r = grid.sample_point(ix, iy, iz);
        out[0] = f * f;
        for (std::size_t k = 0; k < nops; ++k) {
          const Vec3 rp = center + g.ops[k].matrix * (r - center);
          out[k + 1] = f * grid.sample_fractional(to_frac * rp);
        }
      },
      threads);

  const double norm = sums[0];
  if (!(norm > 0.0)) throw domain_error("zero-norm grid function");

  std::vector<std::pair<std::string, double>> weights;
  for (const auto& row : g.table.irreps) {
    const double dim = row.characters[g.table.class_index("E")];
    double acc = 0.0;
    for (std::size_t k = 0; k < nops; ++k) {
      const double chi = row.characters[g.table.class_index(g.ops[k].class_label)];
      acc += chi * sums[k + 1];
    }
    weights.emplace_back(row.name, dim * acc / (norm * static_cast<double>(nops)));
  }
  return weights;
}

}  // namespace facet::sym
