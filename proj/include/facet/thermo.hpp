#pragma once

#include "facet/core.hpp"

#include <map>
#include <string>
#include <vector>

namespace facet::thermo {

// One species with its composition, charge state, and total energy.
struct LedgerEntry {
  std::string label;
  std::map<std::string, int> composition;  // element -> atom count
  int charge = 0;
  double energy_ev = 0.0;
  bool corrected = false;

  void validate() const;
};

// Label-keyed collection of species energies.  Labels are unique.
class EnergyLedger {
 public:
  void add(LedgerEntry entry);
  bool contains(const std::string& label) const;
  const LedgerEntry& at(const std::string& label) const;
  const std::vector<LedgerEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

 private:
  std::vector<LedgerEntry> entries_;
  std::map<std::string, std::size_t> index_;
};

struct Term {
  std::string label;
  int coefficient = 1;
};

struct Reaction {
  std::vector<Term> lhs;
  std::vector<Term> rhs;
};

// Verifies label resolution, positive coefficients, and element-multiset plus
// charge balance; throws domain_error naming the first imbalance found.
void validate_reaction(const EnergyLedger& ledger, const Reaction& rxn);

// Sum(rhs) - Sum(lhs) of total energies for a balanced reaction, eV.
double reaction_energy(const EnergyLedger& ledger, const Reaction& rxn);

inline constexpr double default_ladder_anchor_ev = 3.09;

// Ionization level referenced to the conduction band minimum:
// (IE + e_CBM) = delta_E_CT + anchor.
double ie_ladder(double delta_e_ct_ev,
                 double anchor_ev = default_ladder_anchor_ev);

// Complementary electron affinity referenced to the valence band maximum:
// (EA - e_VBM) = E_gap - (IE + e_CBM).  Exact by construction.
double ea_complement(double ie_plus_cbm_ev,
                     double e_gap_ev = defaults::band_gap_ev);

struct Level {
  std::string label;
  double ie_plus_cbm_ev = 0.0;
  double ea_minus_vbm_ev = 0.0;
};

struct ChargeTransferPair {
  std::string donor;
  std::string acceptor;
};

struct LevelDiagram {
  double e_gap_ev = defaults::band_gap_ev;
  std::vector<Level> levels;                  // sorted by ie_plus_cbm
  std::vector<ChargeTransferPair> viable_pairs;
};

// Builds the level diagram from (label, IE + e_CBM) inputs.  A donor/acceptor
// pair is viable when the donor ionizes more cheaply than the acceptor:
// strictly smaller (IE + e_CBM).
LevelDiagram build_level_diagram(
    const std::vector<std::pair<std::string, double>>& ie_levels,
    double e_gap_ev = defaults::band_gap_ev);

}  // namespace facet::thermo
