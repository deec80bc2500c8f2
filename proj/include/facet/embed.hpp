#pragma once

#include "facet/core.hpp"
#include "facet/structure.hpp"

#include <array>
#include <string>
#include <vector>

namespace facet::embed {

struct Primitive {
  double exponent = 1.0;      // bohr^-2
  double coefficient = 1.0;   // contraction coefficient
};

// Contracted Cartesian Gaussian shell.  Every Cartesian component
// x^a y^b z^c (a+b+c = l) is normalized to unit self-overlap; the redundant
// d/f components are kept (6d/10f convention).
struct GtoShell {
  std::string element;  // anchor label, informational
  Vec3 center = Vec3::Zero();  // Angstrom
  int l = 0;
  std::vector<Primitive> primitives;

  void validate() const;
  int component_count() const { return (l + 1) * (l + 2) / 2; }
};

// Cartesian power triples for angular momentum l, ordered by descending x
// power, then descending y power: l=2 gives xx, xy, xz, yy, yz, zz.
std::vector<std::array<int, 3>> cartesian_components(int l);

// (2n-1)!! with (-1)!! = 1.
double odd_double_factorial(int n);

// Normalization constant of a single primitive x^a y^b z^c exp(-alpha r^2)
// with r in bohr.
double primitive_norm(double alpha, int a, int b, int c);

// Analytic overlap of two unnormalized primitives at centers a_bohr, b_bohr.
double primitive_overlap(double alpha, const Vec3& a_bohr,
                         const std::array<int, 3>& powers_a, double beta,
                         const Vec3& b_bohr, const std::array<int, 3>& powers_b);

// Analytic overlap of two normalized contracted components.
double contracted_overlap(const GtoShell& sa, const std::array<int, 3>& pa,
                          const GtoShell& sb, const std::array<int, 3>& pb);

struct BasisFunction {
  std::size_t shell = 0;
  std::array<int, 3> powers = {0, 0, 0};
};

// Flattened basis: shells in input (atom) order, components in
// cartesian_components order within each shell.
class BasisSet {
 public:
  static BasisSet build(std::vector<GtoShell> shells);

  const std::vector<GtoShell>& shells() const { return shells_; }
  const std::vector<BasisFunction>& functions() const { return functions_; }
  std::size_t size() const { return functions_.size(); }
  // Contraction normalization for function i (applied on top of the
  // per-primitive norms).
  double function_norm(std::size_t i) const { return norms_[i]; }
  std::string fingerprint() const;

 private:
  std::vector<GtoShell> shells_;
  std::vector<BasisFunction> functions_;
  std::vector<double> norms_;
};

// Analytic overlap matrix of the basis.
Eigen::MatrixXd overlap_matrix(const BasisSet& basis);

struct GridEvalOptions {
  bool wrap = false;                  // minimum-image tails instead of erroring
  double boundary_threshold = 1e-12;  // max |phi| allowed at the cell boundary
  double screen_threshold = 1e-14;    // primitives below this are skipped
};

// Values of every Cartesian component of the shell at the grid sample
// points; outer index is the component.  Without wrapping, amplitude above
// boundary_threshold on a boundary voxel is an error.
std::vector<std::vector<double>> eval_basis_on_grid(
    const GtoShell& shell, const VolumetricGrid& grid,
    const GridEvalOptions& options = {});

struct EmbeddingMatrix {
  Eigen::MatrixXd values;  // hartree
  std::string basis_fingerprint;
  std::string grid_fingerprint;
};

struct ProjectOptions {
  int threads = 1;
  GridEvalOptions eval;
};

// M_ij = sum_voxels phi_i phi_j v * (cellvolume / Nvoxels), computed once
// per unordered pair in a fixed order, so the result is exactly symmetric
// and thread-count independent.
EmbeddingMatrix project_potential(const VolumetricGrid& v, const BasisSet& basis,
                                  const ProjectOptions& options = {});

struct ResidualReport {
  VolumetricGrid residual;
  double l1 = 0.0;          // integral |residual|, electrons
  double linf = 0.0;        // max |residual| density
  double integrated = 0.0;  // signed integral, electrons
};

// residual = rho_cl + rho_env - rho_caps - rho_full, the density-matching
// defect of the partition and the gradient direction of the embedding
// functional with respect to the potential.
ResidualReport density_residual(const VolumetricGrid& rho_cl,
                                const VolumetricGrid& rho_env,
                                const VolumetricGrid& rho_caps,
                                const VolumetricGrid& rho_full, int threads = 1);

// W = e_cl + e_env - integral v (rho_full + rho_caps), in eV; v is in
// hartree and the densities in electrons per cubic Angstrom.
double wu_yang_value(double e_cl_ev, double e_env_ev, const VolumetricGrid& v,
                     const VolumetricGrid& rho_full,
                     const VolumetricGrid& rho_caps, int threads = 1);

}  // namespace facet::embed
