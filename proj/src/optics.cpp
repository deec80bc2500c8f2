#include "facet/optics.hpp"

#include <algorithm>
#include <cmath>

namespace facet::optics {

double mu_magnitude(const Vec3& components_debye) {
  if (!components_debye.allFinite())
    throw domain_error("dipole components must be finite");
  return components_debye.norm();
}

double TransitionRecord::mu_debye() const {
  return mu_components_debye ? mu_magnitude(*mu_components_debye)
                             : mu_magnitude_debye;
}

void TransitionRecord::validate() const {
  if (!(vee_ev > 0.0) || !std::isfinite(vee_ev))
    throw domain_error("excitation energy must be positive");
  if (g_i < 1 || g_j < 1) throw domain_error("degeneracies must be >= 1");
  const double mu = mu_debye();
  if (!(mu >= 0.0) || !std::isfinite(mu))
    throw domain_error("dipole magnitude must be finite and non-negative");
  if (!(n_r > 0.0)) throw domain_error("refractive index must be positive");
}

std::pair<double, double> oscillator_strength(const TransitionRecord& t) {
  t.validate();
  const double vee_ha = ev_to_hartree(t.vee_ev);
  const double mu_eb = debye_to_e_bohr(t.mu_debye());
  const double f_per_state = (2.0 / 3.0) * vee_ha * mu_eb * mu_eb;
  const double f_total =
      f_per_state * static_cast<double>(t.g_j) / static_cast<double>(t.g_i);
  return {f_total, f_per_state};
}

double lifetime_invariant() {
  const double c = constants::inverse_fine_structure;
  return constants::atomic_time_in_ns * c * c * c / 2.0;
}

OpticalResult evaluate(const TransitionRecord& t) {
  OpticalResult r;
  std::tie(r.f_total, r.f_per_state) = oscillator_strength(t);

  if (t.mu_components_debye) {
    const double mu = mu_magnitude(*t.mu_components_debye);
    if (mu > 0.0) r.polarization = *t.mu_components_debye / mu;
  }

  if (r.f_per_state == 0.0) {
    r.dark = true;
    return r;
  }
  const double vee_ha = ev_to_hartree(t.vee_ev);
  const double tau = lifetime_invariant() / (t.n_r * vee_ha * vee_ha * r.f_per_state);
  r.tau_ns = tau;
  r.einstein_a_per_ns = 1.0 / tau;
  return r;
}

std::vector<VeeEntry> vee_ledger(const std::vector<LedgerState>& states,
                                 std::size_t ground_index,
                                 std::optional<double> splitting_ev,
                                 double degeneracy_window_ev) {
  if (ground_index >= states.size()) throw domain_error("ground index out of range");
  for (const auto& s : states) {
    if (!std::isfinite(s.energy_ev))
      throw domain_error("state '" + s.label + "' has a non-finite energy");
    if (s.multiplicity < 1)
      throw domain_error("state '" + s.label + "' has multiplicity < 1");
  }

  const LedgerState& ground = states[ground_index];

  // The lowest state of the other spin manifold anchors its shifted ladder.
  bool has_other = false;
  double other_min = 0.0;
  for (const auto& s : states) {
    if (s.multiplicity == ground.multiplicity) continue;
    if (!has_other || s.energy_ev < other_min) other_min = s.energy_ev;
    has_other = true;
  }
  if (has_other && !splitting_ev)
    throw domain_error(
        "states of a second spin multiplicity are present but no splitting was given");

  std::vector<VeeEntry> table;
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (i == ground_index) continue;
    const auto& s = states[i];
    double vee;
    if (s.multiplicity == ground.multiplicity)
      vee = s.energy_ev - ground.energy_ev;
    else
      vee = (s.energy_ev - other_min) + *splitting_ev;
    if (vee < -1e-9)
      throw domain_error("state '" + s.label +
                         "' lies below the declared ground state");
    table.push_back({s.label, vee, s.multiplicity, 1});
  }

  std::stable_sort(table.begin(), table.end(),
                   [](const VeeEntry& a, const VeeEntry& b) {
                     return a.vee_ev < b.vee_ev;
                   });

  // Average near-degenerate pairs within one manifold into a g_j = 2 row.
  std::vector<VeeEntry> merged;
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (i + 1 < table.size() && table[i + 1].multiplicity == table[i].multiplicity &&
        table[i + 1].vee_ev - table[i].vee_ev <= degeneracy_window_ev) {
      VeeEntry pair = table[i];
      pair.label += "/" + table[i + 1].label;
      pair.vee_ev = 0.5 * (table[i].vee_ev + table[i + 1].vee_ev);
      pair.g_j = 2;
      merged.push_back(pair);
      ++i;
    } else {
      merged.push_back(table[i]);
    }
  }
  return merged;
}

}  // namespace facet::optics
