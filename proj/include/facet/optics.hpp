#pragma once

#include "facet/core.hpp"

#include <optional>
#include <string>
#include <vector>

namespace facet::optics {

// One electronic transition: vertical excitation energy plus transition
// dipole, with the degeneracies of the two states and the host refractive
// index.  The dipole is given either as components or as a magnitude, in
// debye.
struct TransitionRecord {
  std::string label_i;
  std::string label_j;
  double vee_ev = 0.0;
  std::optional<Vec3> mu_components_debye;
  double mu_magnitude_debye = 0.0;
  int g_i = 1;
  int g_j = 1;
  double n_r = defaults::refractive_index;

  // Resolved dipole magnitude in debye (norm of components when present).
  double mu_debye() const;
  void validate() const;
};

struct OpticalResult {
  double f_total = 0.0;      // degeneracy-summed oscillator strength
  double f_per_state = 0.0;  // f_total * g_i / g_j
  bool dark = false;         // no radiative decay channel
  std::optional<double> tau_ns;            // absent for dark transitions
  std::optional<double> einstein_a_per_ns; // 1/tau
  std::optional<Vec3> polarization;        // unit vector, when components given
};

// Euclidean norm of dipole components.
double mu_magnitude(const Vec3& components_debye);

// f_total = (2/3) (g_j/g_i) VEE[hartree] |mu|^2 [e*bohr], and the per-state
// value with the degeneracy ratio divided back out.
std::pair<double, double> oscillator_strength(const TransitionRecord& t);

// tau[ns] = 2.418884e-8 c^3 / (2 n_r VEE^2 f_per_state), VEE in hartree,
// c = 137.03604.  A zero oscillator strength marks the transition dark.
OpticalResult evaluate(const TransitionRecord& t);

// The product tau * VEE^2 * f_per_state * n_r shared by every radiative
// transition (in ns * hartree^2).
double lifetime_invariant();

// One state in a manifold of computed total energies.
struct LedgerState {
  std::string label;
  double energy_ev = 0.0;
  int multiplicity = 1;
};

// One row of the excitation table referenced to the true ground state.
struct VeeEntry {
  std::string label;
  double vee_ev = 0.0;
  int multiplicity = 1;
  int g_j = 1;  // 2 when two near-degenerate roots were averaged
};

// Reference all states to the ground state.  States sharing the ground
// multiplicity use direct energy differences; the other manifold is
// referenced to its own lowest state and shifted by the given splitting.
// Roots of one manifold closer than degeneracy_window_ev are averaged
// pairwise into a single g_j = 2 row.
std::vector<VeeEntry> vee_ledger(const std::vector<LedgerState>& states,
                                 std::size_t ground_index,
                                 std::optional<double> splitting_ev = std::nullopt,
                                 double degeneracy_window_ev = 1e-3);

}  // namespace facet::optics
