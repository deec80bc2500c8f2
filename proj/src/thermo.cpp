#include "facet/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace facet::thermo {

void LedgerEntry::validate() const {
  if (label.empty()) throw domain_error("ledger entry has an empty label");
  if (!std::isfinite(energy_ev))
    throw domain_error("ledger entry '" + label + "' has a non-finite energy");
  for (const auto& [element, count] : composition) {
    if (normalize_species(element) != element)
      throw domain_error("ledger entry '" + label + "' uses non-canonical symbol '" +
                         element + "'");
    if (count <= 0)
      throw domain_error("ledger entry '" + label + "' has a non-positive count for " +
                         element);
  }
}

void EnergyLedger::add(LedgerEntry entry) {
  entry.validate();
  if (index_.count(entry.label))
    throw domain_error("duplicate ledger label '" + entry.label + "'");
  index_[entry.label] = entries_.size();
  entries_.push_back(std::move(entry));
}

bool EnergyLedger::contains(const std::string& label) const {
  return index_.count(label) != 0;
}

const LedgerEntry& EnergyLedger::at(const std::string& label) const {
  const auto it = index_.find(label);
  if (it == index_.end()) throw domain_error("unknown ledger label '" + label + "'");
  return entries_[it->second];
}

namespace {

struct SideTotals {
  std::map<std::string, long long> atoms;
  long long charge = 0;
};

SideTotals total_side(const EnergyLedger& ledger, const std::vector<Term>& side) {
  SideTotals t;
  for (const auto& term : side) {
    if (term.coefficient <= 0)
      throw domain_error("stoichiometric coefficient for '" + term.label +
                         "' must be positive");
    const LedgerEntry& e = ledger.at(term.label);
    for (const auto& [element, count] : e.composition)
      t.atoms[element] += static_cast<long long>(term.coefficient) * count;
    t.charge += static_cast<long long>(term.coefficient) * e.charge;
  }
  return t;
}

}  // namespace

void validate_reaction(const EnergyLedger& ledger, const Reaction& rxn) {
  if (rxn.lhs.empty() || rxn.rhs.empty())
    throw domain_error("reaction needs at least one species on each side");
  const SideTotals lhs = total_side(ledger, rxn.lhs);
  const SideTotals rhs = total_side(ledger, rxn.rhs);

  std::map<std::string, std::pair<long long, long long>> by_element;
  for (const auto& [el, n] : lhs.atoms) by_element[el].first = n;
  for (const auto& [el, n] : rhs.atoms) by_element[el].second = n;
  for (const auto& [el, counts] : by_element) {
    if (counts.first != counts.second) {
      std::ostringstream msg;
      msg << "reaction does not balance: element " << el << " appears "
          << counts.first << " time(s) on the left and " << counts.second
          << " on the right";
      throw domain_error(msg.str());
    }
  }
  if (lhs.charge != rhs.charge) {
    std::ostringstream msg;
    msg << "reaction does not balance: total charge is " << lhs.charge
        << " on the left and " << rhs.charge << " on the right";
    throw domain_error(msg.str());
  }
}

double reaction_energy(const EnergyLedger& ledger, const Reaction& rxn) {
  validate_reaction(ledger, rxn);
  double e = 0.0;
  for (const auto& term : rxn.rhs)
    e += term.coefficient * ledger.at(term.label).energy_ev;
  for (const auto& term : rxn.lhs)
    e -= term.coefficient * ledger.at(term.label).energy_ev;
  return e;
}

double ie_ladder(double delta_e_ct_ev, double anchor_ev) {
  if (!std::isfinite(delta_e_ct_ev) || !std::isfinite(anchor_ev))
    throw domain_error("ladder inputs must be finite");
  return delta_e_ct_ev + anchor_ev;
}

double ea_complement(double ie_plus_cbm_ev, double e_gap_ev) {
  if (!std::isfinite(ie_plus_cbm_ev) || !std::isfinite(e_gap_ev))
    throw domain_error("level inputs must be finite");
  return e_gap_ev - ie_plus_cbm_ev;
}

LevelDiagram build_level_diagram(
    const std::vector<std::pair<std::string, double>>& ie_levels, double e_gap_ev) {
  if (ie_levels.empty()) throw domain_error("level diagram needs at least one level");

  LevelDiagram d;
  d.e_gap_ev = e_gap_ev;
  for (const auto& [label, ie] : ie_levels)
    d.levels.push_back({label, ie, ea_complement(ie, e_gap_ev)});
  std::stable_sort(d.levels.begin(), d.levels.end(),
                   [](const Level& a, const Level& b) {
                     return a.ie_plus_cbm_ev < b.ie_plus_cbm_ev;
                   });

  // A cheaper-to-ionize species can hand its electron to any species whose
  // level lies strictly higher on the (IE + e_CBM) scale.
  for (const auto& donor : d.levels)
    for (const auto& acceptor : d.levels)
      if (donor.ie_plus_cbm_ev < acceptor.ie_plus_cbm_ev)
        d.viable_pairs.push_back({donor.label, acceptor.label});
  return d;
}

}  // namespace facet::thermo
