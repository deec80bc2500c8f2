#include "facet/embed.hpp"

#include "facet/reduce.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <thread>

namespace facet::embed {

namespace {

constexpr double kPi = std::numbers::pi;

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Coefficient of x^m in (x + pa)^i (x + pb)^j.
double poly_coefficient(int m, int i, int j, double pa, double pb) {
  double acc = 0.0;
  for (int q = std::max(0, m - j); q <= std::min(m, i); ++q)
    acc += binomial(i, q) * binomial(j, m - q) * std::pow(pa, i - q) *
           std::pow(pb, j - (m - q));
  return acc;
}

// One-dimensional overlap factor for powers i, j about centers offset by
// pa, pb from the Gaussian product center, combined exponent gamma.
double overlap_1d(int i, int j, double pa, double pb, double gamma) {
  double acc = 0.0;
  for (int k = 0; 2 * k <= i + j; ++k)
    acc += poly_coefficient(2 * k, i, j, pa, pb) * odd_double_factorial(k) /
           std::pow(2.0 * gamma, k);
  return acc * std::sqrt(kPi / gamma);
}

// sqrt((2 alpha/pi)^{3/2} (4 alpha)^l): the component-independent part of the
// primitive norm.
double primitive_norm_base(double alpha, int l) {
  return std::sqrt(std::pow(2.0 * alpha / kPi, 1.5) * std::pow(4.0 * alpha, l));
}

// Contraction normalization shared by all components of a shell.
double contraction_norm(const GtoShell& s) {
  double acc = 0.0;
  for (const auto& p : s.primitives)
    for (const auto& q : s.primitives) {
      const double gamma = p.exponent + q.exponent;
      acc += p.coefficient * q.coefficient * primitive_norm_base(p.exponent, s.l) *
             primitive_norm_base(q.exponent, s.l) * std::pow(kPi / gamma, 1.5) /
             std::pow(2.0 * gamma, s.l);
    }
  if (!(acc > 0.0)) throw domain_error("shell contraction has no norm");
  return 1.0 / std::sqrt(acc);
}

}  // namespace

void GtoShell::validate() const {
  if (l < 0 || l > 3) throw domain_error("shell angular momentum must be 0..3");
  if (primitives.empty()) throw domain_error("shell needs at least one primitive");
  if (!center.allFinite()) throw domain_error("shell center must be finite");
  for (const auto& p : primitives) {
    if (!(p.exponent > 0.0)) throw domain_error("exponents must be positive");
    if (!std::isfinite(p.coefficient))
      throw domain_error("contraction coefficients must be finite");
  }
}

std::vector<std::array<int, 3>> cartesian_components(int l) {
  if (l < 0 || l > 3) throw domain_error("angular momentum must be 0..3");
  std::vector<std::array<int, 3>> out;
  for (int a = l; a >= 0; --a)
    for (int b = l - a; b >= 0; --b) out.push_back({a, b, l - a - b});
  return out;
}

double odd_double_factorial(int n) {
  double r = 1.0;
  for (int k = 2 * n - 1; k > 1; k -= 2) r *= k;
  return r;
}

double primitive_norm(double alpha, int a, int b, int c) {
  const double d = odd_double_factorial(a) * odd_double_factorial(b) *
                   odd_double_factorial(c);
  return primitive_norm_base(alpha, a + b + c) / std::sqrt(d);
}

double primitive_overlap(double alpha, const Vec3& a_bohr,
                         const std::array<int, 3>& powers_a, double beta,
                         const Vec3& b_bohr, const std::array<int, 3>& powers_b) {
  const double gamma = alpha + beta;
  const Vec3 p = (alpha * a_bohr + beta * b_bohr) / gamma;
  const Vec3 ab = a_bohr - b_bohr;
  const double pre = std::exp(-alpha * beta / gamma * ab.squaredNorm());
  double s = pre;
  for (int axis = 0; axis < 3; ++axis)
    s *= overlap_1d(powers_a[axis], powers_b[axis], p[axis] - a_bohr[axis],
                    p[axis] - b_bohr[axis], gamma);
  return s;
}

double contracted_overlap(const GtoShell& sa, const std::array<int, 3>& pa,
                          const GtoShell& sb, const std::array<int, 3>& pb) {
  const Vec3 a_bohr = sa.center / constants::bohr_in_angstrom;
  const Vec3 b_bohr = sb.center / constants::bohr_in_angstrom;
  double acc = 0.0;
  for (const auto& p : sa.primitives)
    for (const auto& q : sb.primitives)
      acc += p.coefficient * q.coefficient *
             primitive_norm(p.exponent, pa[0], pa[1], pa[2]) *
             primitive_norm(q.exponent, pb[0], pb[1], pb[2]) *
             primitive_overlap(p.exponent, a_bohr, pa, q.exponent, b_bohr, pb);
  return acc * contraction_norm(sa) * contraction_norm(sb);
}

BasisSet BasisSet::build(std::vector<GtoShell> shells) {
  BasisSet b;
  b.shells_ = std::move(shells);
  for (std::size_t s = 0; s < b.shells_.size(); ++s) {
    b.shells_[s].validate();
    const double norm = contraction_norm(b.shells_[s]);
    for (const auto& powers : cartesian_components(b.shells_[s].l)) {
      b.functions_.push_back({s, powers});
      b.norms_.push_back(norm);
    }
  }
  return b;
}

std::string BasisSet::fingerprint() const {
  std::ostringstream os;
  os << "cart6d";
  char buf[64];
  for (const auto& s : shells_) {
    os << '|' << s.element << ' ' << s.l;
    for (int k = 0; k < 3; ++k) {
      std::snprintf(buf, sizeof buf, " %.17g", s.center[k]);
      os << buf;
    }
    for (const auto& p : s.primitives) {
      std::snprintf(buf, sizeof buf, " %.17g %.17g", p.exponent, p.coefficient);
      os << buf;
    }
  }
  return fingerprint_hex(os.str());
}

Eigen::MatrixXd overlap_matrix(const BasisSet& basis) {
  const auto& f = basis.functions();
  Eigen::MatrixXd s(f.size(), f.size());
  for (std::size_t i = 0; i < f.size(); ++i)
    for (std::size_t j = i; j < f.size(); ++j) {
      const double v = contracted_overlap(basis.shells()[f[i].shell], f[i].powers,
                                          basis.shells()[f[j].shell], f[j].powers);
      s(i, j) = v;
      s(j, i) = v;
    }
  return s;
}

namespace {

// Radius (bohr) beyond which every primitive of the shell, including the
// polynomial prefactor, stays below the screening threshold.
double screening_radius(const GtoShell& s, double contraction, double threshold) {
  double r_max = 0.0;
  for (const auto& p : s.primitives) {
    const double amp =
        std::abs(contraction * p.coefficient * primitive_norm_base(p.exponent, s.l));
    double t = std::log(std::max(amp, 1e-300) / threshold);
    if (t <= 0.0) continue;
    double r = std::sqrt(t / p.exponent);
    for (int it = 0; it < 3; ++it)
      r = std::sqrt((t + s.l * std::log(std::max(r, 1.0))) / p.exponent);
    r_max = std::max(r_max, r);
  }
  return r_max * 1.2 + 0.5;
}

}  // namespace

std::vector<std::vector<double>> eval_basis_on_grid(const GtoShell& shell,
                                                    const VolumetricGrid& grid,
                                                    const GridEvalOptions& options) {
  shell.validate();
  if (grid.size() == 0) throw domain_error("empty grid");

  if (!options.wrap) {
    const Vec3 frac = grid.cell.to_fractional(shell.center);
    for (int k = 0; k < 3; ++k)
      if (frac[k] < -1e-9 || frac[k] >= 1.0 + 1e-9)
        throw domain_error(
            "shell center lies outside the grid cell; enable wrapping to use "
            "periodic images");
  }

  const auto comps = cartesian_components(shell.l);
  const double contraction = contraction_norm(shell);
  const double r_cut = screening_radius(shell, contraction, options.screen_threshold);
  const double r_cut2 = r_cut * r_cut;

  std::vector<double> expo(shell.primitives.size()), coef(shell.primitives.size());
  for (std::size_t p = 0; p < shell.primitives.size(); ++p) {
    expo[p] = shell.primitives[p].exponent;
    coef[p] = shell.primitives[p].coefficient *
              primitive_norm_base(shell.primitives[p].exponent, shell.l);
  }
  std::vector<double> comp_pref(comps.size());
  for (std::size_t c = 0; c < comps.size(); ++c)
    comp_pref[c] = contraction / std::sqrt(odd_double_factorial(comps[c][0]) *
                                           odd_double_factorial(comps[c][1]) *
                                           odd_double_factorial(comps[c][2]));

  std::vector<std::vector<double>> values(comps.size(),
                                          std::vector<double>(grid.size(), 0.0));

  for (std::size_t flat = 0; flat < grid.size(); ++flat) {
    const auto [ix, iy, iz] = grid.unravel(flat);
    Vec3 d = grid.sample_point(ix, iy, iz) - shell.center;
    if (options.wrap) d = grid.cell.min_image(d);
    d /= constants::bohr_in_angstrom;
    const double r2 = d.squaredNorm();
    if (r2 > r_cut2) continue;

    double radial = 0.0;
    for (std::size_t p = 0; p < expo.size(); ++p)
      radial += coef[p] * std::exp(-expo[p] * r2);

    double xp[4] = {1, d.x(), d.x() * d.x(), d.x() * d.x() * d.x()};
    double yp[4] = {1, d.y(), d.y() * d.y(), d.y() * d.y() * d.y()};
    double zp[4] = {1, d.z(), d.z() * d.z(), d.z() * d.z() * d.z()};
    for (std::size_t c = 0; c < comps.size(); ++c)
      values[c][flat] =
          comp_pref[c] * xp[comps[c][0]] * yp[comps[c][1]] * zp[comps[c][2]] * radial;
  }

  if (!options.wrap) {
    const auto [nx, ny, nz] = grid.shape;
    double worst = 0.0;
    for (int iz = 0; iz < nz; ++iz)
      for (int iy = 0; iy < ny; ++iy)
        for (int ix = 0; ix < nx; ++ix) {
          if (ix != 0 && ix != nx - 1 && iy != 0 && iy != ny - 1 && iz != 0 &&
              iz != nz - 1)
            continue;
          const std::size_t flat = grid.index(ix, iy, iz);
          for (const auto& comp : values)
            worst = std::max(worst, std::abs(comp[flat]));
        }
    if (worst > options.boundary_threshold) {
      std::ostringstream msg;
      msg << "shell support is truncated at the cell boundary (amplitude " << worst
          << " > " << options.boundary_threshold
          << "); enlarge the cell or enable wrapping";
      throw domain_error(msg.str());
    }
  }
  return values;
}

EmbeddingMatrix project_potential(const VolumetricGrid& v, const BasisSet& basis,
                                  const ProjectOptions& options) {
  if (basis.size() == 0) throw domain_error("empty basis");
  if (v.size() == 0) throw domain_error("empty grid");

  // Per-function voxel values, one shell at a time.
  std::vector<std::vector<double>> func_values(basis.size());
  std::size_t next = 0;
  for (std::size_t s = 0; s < basis.shells().size(); ++s) {
    auto comps = eval_basis_on_grid(basis.shells()[s], v, options.eval);
    for (auto& comp : comps) func_values[next++] = std::move(comp);
  }

  std::vector<double> field(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) field[k] = v.field_at(k);

  const double bohr3 = constants::bohr_in_angstrom * constants::bohr_in_angstrom *
                       constants::bohr_in_angstrom;
  const double weight = v.voxel_volume() / bohr3;

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < basis.size(); ++i)
    for (std::size_t j = i; j < basis.size(); ++j) pairs.emplace_back(i, j);

  EmbeddingMatrix m;
  m.values.resize(basis.size(), basis.size());
  m.basis_fingerprint = basis.fingerprint();
  {
    std::ostringstream os;
    os << v.shape[0] << 'x' << v.shape[1] << 'x' << v.shape[2] << ':'
       << (v.scale == GridScale::raw_values ? "raw" : "cellvolume");
    os.write(reinterpret_cast<const char*>(v.cell.vectors.data()),
             sizeof(double) * 9);
    os.write(reinterpret_cast<const char*>(v.data.data()),
             static_cast<std::streamsize>(sizeof(double) * v.data.size()));
    m.grid_fingerprint = fingerprint_hex(os.str());
  }

  const auto compute_pair = [&](std::size_t p) {
    const auto [i, j] = pairs[p];
    const auto& fi = func_values[i];
    const auto& fj = func_values[j];
    const double s =
        deterministic_sum(
            v.size(), [&](std::size_t k) { return fi[k] * fj[k] * field[k]; }, 1) *
        weight;
    m.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = s;
    m.values(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = s;
  };

  const int nthreads = std::max(1, options.threads);
  if (nthreads == 1 || pairs.size() < 2) {
    for (std::size_t p = 0; p < pairs.size(); ++p) compute_pair(p);
  } else {
    std::atomic<std::size_t> cursor{0};
    std::vector<std::thread> workers;
    const int use = static_cast<int>(
        std::min<std::size_t>(pairs.size(), static_cast<std::size_t>(nthreads)));
    workers.reserve(use);
    for (int t = 0; t < use; ++t)
      workers.emplace_back([&] {
        for (std::size_t p = cursor.fetch_add(1); p < pairs.size();
             p = cursor.fetch_add(1))
          compute_pair(p);
      });
    for (auto& w : workers) w.join();
  }
  return m;
}

ResidualReport density_residual(const VolumetricGrid& rho_cl,
                                const VolumetricGrid& rho_env,
                                const VolumetricGrid& rho_caps,
                                const VolumetricGrid& rho_full, int threads) {
  require_compatible(rho_cl, rho_env, "density residual");
  require_compatible(rho_cl, rho_caps, "density residual");
  require_compatible(rho_cl, rho_full, "density residual");
  if (rho_env.scale != rho_cl.scale || rho_caps.scale != rho_cl.scale ||
      rho_full.scale != rho_cl.scale)
    throw domain_error(
        "density residual: grids use different storage conventions");

  ResidualReport r;
  r.residual = rho_cl;
  for (std::size_t k = 0; k < r.residual.data.size(); ++k)
    r.residual.data[k] =
        rho_cl.data[k] + rho_env.data[k] - rho_caps.data[k] - rho_full.data[k];

  const double w = r.residual.voxel_volume();
  const auto sums = deterministic_sum_multi(
      r.residual.size(), 2,
      [&](std::size_t k, double* out) {
        const double f = r.residual.field_at(k);
        out[0] = std::abs(f);
        out[1] = f;
      },
      threads);
  r.l1 = sums[0] * w;
  r.integrated = sums[1] * w;
  for (std::size_t k = 0; k < r.residual.size(); ++k)
    r.linf = std::max(r.linf, std::abs(r.residual.field_at(k)));
  return r;
}

double wu_yang_value(double e_cl_ev, double e_env_ev, const VolumetricGrid& v,
                     const VolumetricGrid& rho_full, const VolumetricGrid& rho_caps,
                     int threads) {
  if (!std::isfinite(e_cl_ev) || !std::isfinite(e_env_ev))
    throw domain_error("component energies must be finite");
  require_compatible(v, rho_full, "functional evaluation");
  require_compatible(v, rho_caps, "functional evaluation");

  const double integral =
      deterministic_sum(
          v.size(),
          [&](std::size_t k) {
            return v.field_at(k) * (rho_full.field_at(k) + rho_caps.field_at(k));
          },
          threads) *
      v.voxel_volume();
  return e_cl_ev + e_env_ev - hartree_to_ev(integral);
}

}  // namespace facet::embed
