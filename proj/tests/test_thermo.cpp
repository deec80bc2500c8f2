#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "facet/thermo.hpp"

#include <cmath>
#include <random>

using namespace facet;
using namespace facet::thermo;

namespace {

EnergyLedger small_ledger() {
  EnergyLedger ledger;
  ledger.add({"bulk", {{"C", 128}}, 0, -1161.0, false});
  ledger.add({"ov0", {{"C", 126}, {"O", 1}}, 0, -1138.2, true});
  ledger.add({"ov2+", {{"C", 126}, {"O", 1}}, 2, -1120.5, true});
  ledger.add({"e2x", {{"C", 252}, {"O", 2}}, 4, -2241.0, true});
  return ledger;
}

}  // namespace

TEST_CASE("ledger entries validate and resolve by label") {
  EnergyLedger ledger = small_ledger();
  CHECK(ledger.size() == 4);
  CHECK(ledger.contains("ov0"));
  CHECK_FALSE(ledger.contains("missing"));
  CHECK(ledger.at("ov2+").charge == 2);
  CHECK_THROWS_AS(ledger.at("missing"), domain_error);

  CHECK_THROWS_AS(ledger.add({"ov0", {{"C", 1}}, 0, 0.0, false}), domain_error);
  CHECK_THROWS_AS(ledger.add({"", {{"C", 1}}, 0, 0.0, false}), domain_error);
  CHECK_THROWS_AS(ledger.add({"badsym", {{"c", 1}}, 0, 0.0, false}), domain_error);
  CHECK_THROWS_AS(ledger.add({"badcount", {{"C", 0}}, 0, 0.0, false}), domain_error);
}

TEST_CASE("balanced reactions pass and yield energy differences") {
  const EnergyLedger ledger = small_ledger();
  // 2 ov2+ -> e2x: same atoms, same charge.
  Reaction rxn;
  rxn.lhs = {{"ov2+", 2}};
  rxn.rhs = {{"e2x", 1}};
  CHECK_NOTHROW(validate_reaction(ledger, rxn));
  CHECK(reaction_energy(ledger, rxn) ==
        doctest::Approx(-2241.0 - 2 * (-1120.5)).epsilon(1e-14));
}

TEST_CASE("element imbalance is named in the error") {
  const EnergyLedger ledger = small_ledger();
  Reaction rxn;
  rxn.lhs = {{"bulk", 1}};
  rxn.rhs = {{"ov0", 1}};
  try {
    validate_reaction(ledger, rxn);
    FAIL("expected domain_error");
  } catch (const domain_error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("does not balance") != std::string::npos);
    CHECK(msg.find("C") != std::string::npos);
  }
}

TEST_CASE("charge imbalance is rejected") {
  const EnergyLedger ledger = small_ledger();
  Reaction rxn;
  rxn.lhs = {{"ov0", 1}};
  rxn.rhs = {{"ov2+", 1}};
  CHECK_THROWS_AS(validate_reaction(ledger, rxn), domain_error);
  CHECK_THROWS_AS(reaction_energy(ledger, rxn), domain_error);
}

TEST_CASE("degenerate reactions are rejected") {
  const EnergyLedger ledger = small_ledger();
  Reaction empty_lhs;
  empty_lhs.rhs = {{"bulk", 1}};
  CHECK_THROWS_AS(validate_reaction(ledger, empty_lhs), domain_error);

  Reaction bad_coeff;
  bad_coeff.lhs = {{"bulk", 0}};
  bad_coeff.rhs = {{"bulk", 1}};
  CHECK_THROWS_AS(validate_reaction(ledger, bad_coeff), domain_error);

  Reaction unknown;
  unknown.lhs = {{"nope", 1}};
  unknown.rhs = {{"bulk", 1}};
  CHECK_THROWS_AS(validate_reaction(ledger, unknown), domain_error);
}

TEST_CASE("fuzzed unbalanced reactions never validate") {
  // Random species with random compositions; a reaction is accepted by the
  // checker only if the element multisets and charges agree, so perturbing
  // one count or the charge must always be caught.
  std::mt19937_64 rng(41);
  std::uniform_int_distribution<int> count_dist(1, 60);
  std::uniform_int_distribution<int> charge_dist(-3, 3);
  std::uniform_int_distribution<int> which_element(0, 2);
  const char* elements[] = {"C", "O", "N"};

  int rejected = 0;
  const int trials = 10000;
  for (int trial = 0; trial < trials; ++trial) {
    EnergyLedger ledger;
    LedgerEntry a{"a", {}, charge_dist(rng), -10.0, false};
    for (int k = 0; k < 3; ++k)
      if (count_dist(rng) % 2 == 0) a.composition[elements[k]] = count_dist(rng);
    if (a.composition.empty()) a.composition["C"] = count_dist(rng);

    // b starts as an exact copy then gets one deliberate defect.
    LedgerEntry b = a;
    b.label = "b";
    const int defect = trial % 3;
    if (defect == 0) {
      b.charge += (charge_dist(rng) >= 0 ? 1 : -1);
    } else if (defect == 1) {
      const char* el = elements[which_element(rng)];
      b.composition[el] += 1;
    } else {
      const char* el = elements[which_element(rng)];
      if (b.composition.count(el) && b.composition[el] > 1)
        b.composition[el] -= 1;
      else
        b.composition[el] += 2;
    }

    ledger.add(a);
    ledger.add(b);
    Reaction rxn;
    rxn.lhs = {{"a", 1}};
    rxn.rhs = {{"b", 1}};
    try {
      validate_reaction(ledger, rxn);
    } catch (const domain_error&) {
      ++rejected;
    }
  }
  CHECK(rejected == trials);
}

TEST_CASE("balanced fuzzed reactions always validate") {
  // n copies of a unit species against one n-fold composite: balanced by
  // construction, so the checker must accept every one (no false rejects).
  std::mt19937_64 rng(43);
  std::uniform_int_distribution<int> count_dist(1, 20);
  std::uniform_int_distribution<int> coeff_dist(1, 4);
  std::uniform_int_distribution<int> charge_dist(-2, 2);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = coeff_dist(rng);
    const int nc = count_dist(rng);
    const int no = count_dist(rng);
    const int q = charge_dist(rng);

    EnergyLedger ledger;
    ledger.add({"unit", {{"C", nc}, {"O", no}}, q, -7.5, false});
    ledger.add({"composite", {{"C", n * nc}, {"O", n * no}}, n * q, -30.0, false});

    Reaction rxn;
    rxn.lhs = {{"unit", n}};
    rxn.rhs = {{"composite", 1}};
    CHECK_NOTHROW(validate_reaction(ledger, rxn));
  }
}

TEST_CASE("ionization ladder and complement reference values") {
  CHECK(ie_ladder(1.39) == doctest::Approx(4.48).epsilon(1e-12));
  CHECK(ie_ladder(-1.28) == doctest::Approx(1.81).epsilon(1e-12));
  CHECK(ea_complement(4.48) == doctest::Approx(1.02).epsilon(1e-12));
  CHECK(ea_complement(1.09) == doctest::Approx(4.41).epsilon(1e-12));
  CHECK(ie_ladder(0.0) == doctest::Approx(3.09).epsilon(1e-12));
  CHECK_THROWS_AS(ie_ladder(std::nan("")), domain_error);
}

TEST_CASE("the sum rule ie + ea = gap holds for every diagram level") {
  const std::vector<std::pair<std::string, double>> inputs = {
      {"deep", 4.48}, {"shallow", 1.81}, {"mid", 3.0}, {"odd", 2.17}};
  const LevelDiagram d = build_level_diagram(inputs, 5.5);
  REQUIRE(d.levels.size() == 4);
  for (const auto& lv : d.levels)
    CHECK(lv.ie_plus_cbm_ev + lv.ea_minus_vbm_ev == 5.5);

  // Sorted ascending by ionization cost.
  for (std::size_t i = 1; i < d.levels.size(); ++i)
    CHECK(d.levels[i - 1].ie_plus_cbm_ev <= d.levels[i].ie_plus_cbm_ev);
  CHECK(d.levels[0].label == "shallow");
}

TEST_CASE("viable donor-acceptor pairs require strict ordering") {
  const LevelDiagram d =
      build_level_diagram({{"donor", 1.81}, {"acceptor", 4.48}, {"tie", 1.81}}, 5.5);
  bool donor_to_acceptor = false;
  for (const auto& p : d.viable_pairs) {
    CHECK(p.donor != p.acceptor);
    if (p.donor == "donor" && p.acceptor == "acceptor") donor_to_acceptor = true;
    // No pair may link the two tied levels.
    CHECK_FALSE((p.donor == "donor" && p.acceptor == "tie"));
    CHECK_FALSE((p.donor == "tie" && p.acceptor == "donor"));
  }
  CHECK(donor_to_acceptor);
}
