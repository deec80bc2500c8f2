#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "facet/io.hpp"
#include "facet/lattice.hpp"

#include <cmath>
#include <random>

using namespace facet;
using namespace facet::io;

namespace {

Structure two_species_structure() {
  Structure s;
  s.cell = UnitCell::cubic(5.0);
  s.comment = "test cell";
  s.sites.push_back({0, "C", Vec3(0.0, 0.0, 0.0)});
  s.sites.push_back({1, "O", Vec3(0.5, 0.5, 0.5)});
  s.sites.push_back({2, "C", Vec3(0.25, 0.25, 0.75)});
  return s;
}

GridDocument small_doc() {
  GridDocument doc;
  doc.structure = two_species_structure();
  doc.charge = VolumetricGrid::zeros(doc.structure.cell, {2, 3, 2});
  doc.charge.scale = GridScale::times_cell_volume;
  for (std::size_t k = 0; k < doc.charge.size(); ++k)
    doc.charge.data[k] = 0.25 * static_cast<double>(k) - 1.0;
  return doc;
}

}  // namespace

TEST_CASE("format_double survives the round-trip for awkward values") {
  for (double v : {0.1, 1.0 / 3.0, 1e-17, -2.5e9, 3.56775, 0.0}) {
    const std::string text = format_double(v);
    CHECK(std::stod(text) == v);
  }
}

TEST_CASE("poscar round-trip preserves geometry and species grouping") {
  const Structure s = two_species_structure();
  const std::string text = write_poscar(s);
  const Structure back = parse_poscar(text, "mem");

  CHECK(back.comment == "test cell");
  CHECK((back.cell.vectors - s.cell.vectors).norm() < 1e-14);
  REQUIRE(back.size() == 3);

  // The writer groups by species, so order becomes C, C, O with fresh
  // sequential ids.
  CHECK(back.sites[0].species == "C");
  CHECK(back.sites[1].species == "C");
  CHECK(back.sites[2].species == "O");
  for (int i = 0; i < 3; ++i) CHECK(back.sites[i].id == i);
  CHECK((back.sites[2].frac - Vec3(0.5, 0.5, 0.5)).norm() < 1e-15);

  // A second round-trip is byte-identical.
  CHECK(write_poscar(back) == write_poscar(parse_poscar(write_poscar(back), "mem")));
}

TEST_CASE("poscar accepts cartesian coordinates and selective dynamics") {
  const std::string text =
      "cart cell\n"
      "2.0\n"
      "1 0 0\n0 1 0\n0 0 1\n"
      "C O\n1 1\n"
      "Selective dynamics\n"
      "Cartesian\n"
      "0.0 0.0 0.0 T T T\n"
      "1.0 1.0 1.0 F F F\n";
  const Structure s = parse_poscar(text, "mem");
  REQUIRE(s.size() == 2);
  CHECK(s.sites[1].species == "O");
  CHECK((s.sites[1].frac - Vec3(0.5, 0.5, 0.5)).norm() < 1e-15);
}

TEST_CASE("poscar parse errors carry the source location") {
  const std::string bad =
      "comment\n1.0\n1 0 0\n0 1 0\n0 0 1\nC\n1\nDirect\n0 oops 0\n";
  try {
    parse_poscar(bad, "bad.poscar");
    FAIL("expected parse_error");
  } catch (const parse_error& e) {
    CHECK(e.source() == "bad.poscar");
    CHECK(e.line() == 9);
    CHECK(std::string(e.what()).find("malformed number") != std::string::npos);
  }

  CHECK_THROWS_AS(parse_poscar("comment\n1.0\n1 0 0\n0 1 0\n", "t"), parse_error);
  CHECK_THROWS_AS(parse_poscar("comment\n1.0\n1 0 0\n0 1 0\n0 0 1\nXx\n1\nDirect\n0 0 0\n", "t"),
                  parse_error);
  CHECK_THROWS_AS(parse_poscar("comment\n-1\n1 0 0\n0 1 0\n0 0 1\nC\n1\nDirect\n0 0 0\n", "t"),
                  parse_error);
}

TEST_CASE("xyz writes are idempotent byte for byte") {
  Structure s;
  s.cell = UnitCell::box(16.0);
  s.comment = "molecule";
  s.sites.push_back({0, "C", Vec3(0.3, 0.4, 0.5)});
  s.sites.push_back({1, "F", Vec3(0.31, 0.42, 0.53)});
  s.sites.push_back({2, "O", Vec3(0.27, 0.38, 0.51)});

  const std::string first = write_xyz(s);
  const Structure once = parse_xyz(first, "mem");
  const std::string second = write_xyz(once);
  CHECK(second == first);
  const Structure twice = parse_xyz(second, "mem");
  CHECK(write_xyz(twice) == second);

  // Cluster boxes are non-periodic.
  CHECK_FALSE(once.cell.periodic[0]);
  CHECK_FALSE(once.cell.periodic[1]);
  CHECK_FALSE(once.cell.periodic[2]);
}

TEST_CASE("xyz handles negative coordinates via the padded box") {
  const std::string text =
      "2\nwith negatives\nC -3.25 0.0 1.0\nO 2.75 -1.5 -2.0\n";
  const Structure s = parse_xyz(text, "mem");
  REQUIRE(s.size() == 2);
  // Cartesian geometry is preserved exactly: the bond vector survives.
  const Vec3 d = s.cartesian(1) - s.cartesian(0);
  CHECK(d.x() == doctest::Approx(6.0).epsilon(1e-15));
  CHECK(d.y() == doctest::Approx(-1.5).epsilon(1e-15));
  CHECK(d.z() == doctest::Approx(-3.0).epsilon(1e-15));
  CHECK(write_xyz(parse_xyz(write_xyz(s), "mem")) == write_xyz(s));
}

TEST_CASE("xyz parse errors") {
  CHECK_THROWS_AS(parse_xyz("", "t"), parse_error);
  CHECK_THROWS_AS(parse_xyz("2\nc\nC 0 0 0\n", "t"), parse_error);  // truncated
  CHECK_THROWS_AS(parse_xyz("1\nc\nC 0 0\n", "t"), parse_error);
  CHECK_THROWS_AS(parse_xyz("1\nc\nC 0 0 1e400\n", "t"), parse_error);
  CHECK_THROWS_AS(parse_xyz("-1\nc\n", "t"), parse_error);
  try {
    parse_xyz("1\nc\nQq 0 0 0\n", "mol.xyz");
    FAIL("expected parse_error");
  } catch (const parse_error& e) {
    CHECK(e.line() == 3);
    CHECK(e.column() == 1);
  }
}

TEST_CASE("format guessing uses the extension") {
  CHECK(guess_structure_format("a/b/POSCAR") == StructureFormat::poscar);
  CHECK(guess_structure_format("cluster.xyz") == StructureFormat::xyz);
  CHECK(guess_structure_format("CLUSTER.XYZ") == StructureFormat::xyz);
  CHECK(guess_structure_format("grid.chgcar") == StructureFormat::poscar);
}

TEST_CASE("chgcar round-trip with charge and spin blocks") {
  GridDocument doc = small_doc();
  doc.spin = doc.charge;
  for (auto& v : doc.spin->data) v *= 0.5;

  const std::string text = write_chgcar(doc);
  const GridDocument back = parse_chgcar(text, "mem");
  CHECK(back.structure.size() == 3);
  CHECK(back.charge.shape == doc.charge.shape);
  CHECK(back.charge.scale == GridScale::times_cell_volume);
  REQUIRE(back.spin.has_value());
  for (std::size_t k = 0; k < doc.charge.size(); ++k) {
    CHECK(back.charge.data[k] == doc.charge.data[k]);
    CHECK(back.spin->data[k] == doc.spin->data[k]);
  }
}

TEST_CASE("chgcar skips augmentation blocks") {
  GridDocument doc = small_doc();
  std::string text = write_chgcar(doc);
  text += "augmentation occupancies 1 4\n0.1 0.2 0.3 0.4\n";
  text += "augmentation occupancies 2 2\n0.5 0.6\n";
  const GridDocument back = parse_chgcar(text, "mem");
  CHECK_FALSE(back.spin.has_value());
  CHECK(back.charge.data == doc.charge.data);

  // Spin after augmentation still parses.
  text += "2 3 2\n";
  std::string spin_values;
  for (std::size_t k = 0; k < doc.charge.size(); ++k)
    spin_values += format_double(0.125 * static_cast<double>(k)) +
                   ((k % 5 == 4 || k + 1 == doc.charge.size()) ? "\n" : " ");
  const GridDocument with_spin = parse_chgcar(text + spin_values, "mem");
  CHECK(with_spin.spin.has_value());
}

TEST_CASE("chgcar rejects malformed blocks") {
  const GridDocument doc = small_doc();
  const std::string good = write_chgcar(doc);

  // Mismatched spin dimensions.
  CHECK_THROWS_AS(parse_chgcar(good + "2 2 2\n0 0 0 0 0\n0 0 0\n", "t"), parse_error);
  // Garbage trailing content.
  CHECK_THROWS_AS(parse_chgcar(good + "unexpected\n", "t"), parse_error);
  // A third grid block.
  GridDocument with_spin = doc;
  with_spin.spin = doc.charge;
  const std::string two = write_chgcar(with_spin);
  std::string third = two + "2 3 2\n";
  for (int i = 0; i < 12; ++i) third += "0 ";
  third += "\n";
  CHECK_THROWS_AS(parse_chgcar(third, "t"), parse_error);
}

TEST_CASE("simple grid format round-trips and validates") {
  VolumetricGrid g = VolumetricGrid::zeros(UnitCell::cubic(4.0), {3, 2, 2});
  g.scale = GridScale::raw_values;
  std::mt19937_64 rng(47);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  for (auto& v : g.data) v = dist(rng);

  const std::string text = write_simple_grid(g);
  const VolumetricGrid back = parse_simple_grid(text, "mem");
  CHECK(back.shape == g.shape);
  CHECK(back.scale == g.scale);
  CHECK(back.data == g.data);
  CHECK((back.cell.vectors - g.cell.vectors).norm() == 0.0);

  CHECK_THROWS_AS(parse_simple_grid("facet-grid 2\n", "t"), parse_error);
  CHECK_THROWS_AS(parse_simple_grid("nope\n", "t"), parse_error);
  const std::string bad_convention =
      "facet-grid 1\ncell\n1 0 0\n0 1 0\n0 0 1\nconvention wat\ndims 2 2 2\nvalues\n";
  CHECK_THROWS_AS(parse_simple_grid(bad_convention, "t"), parse_error);
  CHECK_THROWS_AS(parse_simple_grid(text + "extra\n", "t"), parse_error);
}

TEST_CASE("grid auto-detection dispatches on the header") {
  VolumetricGrid g = VolumetricGrid::zeros(UnitCell::cubic(4.0), {2, 2, 2});
  g.data.assign(g.size(), 1.5);
  const VolumetricGrid simple = parse_grid_auto(write_simple_grid(g), "mem");
  CHECK(simple.scale == GridScale::raw_values);

  const GridDocument doc = small_doc();
  const VolumetricGrid charge = parse_grid_auto(write_chgcar(doc), "mem");
  CHECK(charge.scale == GridScale::times_cell_volume);
  CHECK(charge.shape == doc.charge.shape);
}

TEST_CASE("basis library parses shells and builds per-atom sets") {
  const std::string text =
      "# minimal split basis\n"
      "C\n"
      "s 2\n"
      "3.1 0.6\n"
      "0.8 0.5\n"
      "p 1\n"
      "0.9 1.0  # inline comment\n"
      "O\n"
      "0 1\n"
      "1.2 1.0\n";
  const BasisLibrary lib = parse_basis(text, "mem");
  REQUIRE(lib.elements.count("C") == 1);
  REQUIRE(lib.elements.count("O") == 1);
  CHECK(lib.elements.at("C").size() == 2);
  CHECK(lib.elements.at("C")[0].primitives.size() == 2);
  CHECK(lib.elements.at("C")[1].l == 1);

  // Round-trip through the writer.
  const BasisLibrary again = parse_basis(write_basis(lib), "mem");
  CHECK(again.elements.at("C")[0].primitives[0].exponent == 3.1);

  const Structure s = two_species_structure();
  const embed::BasisSet basis = make_basis(s, lib);
  // C: s + p = 4 functions, twice; O: one s.
  CHECK(basis.size() == 4 + 1 + 4);

  Structure with_unknown = s;
  with_unknown.sites.push_back({9, "N", Vec3(0.1, 0.6, 0.1)});
  CHECK_THROWS_AS(make_basis(with_unknown, lib), domain_error);
}

TEST_CASE("basis parse errors are located") {
  CHECK_THROWS_AS(parse_basis("s 1\n0.5 1.0\n", "t"), parse_error);  // no element
  CHECK_THROWS_AS(parse_basis("C\n", "t"), parse_error);             // empty block
  CHECK_THROWS_AS(parse_basis("C\ns 1\n-0.5 1.0\n", "t"), parse_error);
  CHECK_THROWS_AS(parse_basis("C\ns 1\n0.5\n", "t"), parse_error);
  CHECK_THROWS_AS(parse_basis("C\nC\ns 1\n0.5 1\n", "t"), parse_error);
  CHECK_THROWS_AS(parse_basis("C\ng 1\n0.5 1\n", "t"), parse_error);
}

TEST_CASE("json syntax errors carry line and column") {
  try {
    parse_json_text("{\n  \"a\": 1,\n  \"b\": oops\n}", "doc.json");
    FAIL("expected parse_error");
  } catch (const parse_error& e) {
    CHECK(e.source() == "doc.json");
    CHECK(e.line() == 3);
    CHECK(e.column() > 1);
  }
}

TEST_CASE("json reports have the fixed envelope with sorted keys") {
  const json r = make_report("optics", json{{"energy", "eV"}},
                             json{{"input", "abc123"}}, json{{"f_total", 0.4}});
  CHECK(r["tool"] == "facet");
  CHECK(r["version"] == "0.1.0");
  CHECK(r["module"] == "optics");
  CHECK(r["payload"]["f_total"] == 0.4);

  const std::string text = dump_json(r);
  CHECK(text.back() == '\n');
  // nlohmann objects iterate alphabetically, so dumps are canonical.
  CHECK(text.find("\"fingerprints\"") < text.find("\"module\""));
  CHECK(text.find("\"module\"") < text.find("\"payload\""));
}

TEST_CASE("ledger json round-trip and schema errors") {
  const std::string text = R"({
    "entries": [
      {"label": "bulk", "composition": {"C": 128}, "charge": 0, "energy_ev": -1161.0},
      {"label": "ov", "composition": {"C": 126, "O": 1}, "charge": 2,
       "energy_ev": -1120.5, "corrected": true}
    ]
  })";
  const thermo::EnergyLedger ledger = parse_ledger_json(text, "mem");
  CHECK(ledger.size() == 2);
  CHECK(ledger.at("ov").corrected);
  CHECK(ledger.at("ov").composition.at("O") == 1);

  const thermo::EnergyLedger again =
      parse_ledger_json(write_ledger_json(ledger), "mem");
  CHECK(again.at("bulk").energy_ev == ledger.at("bulk").energy_ev);

  try {
    parse_ledger_json(R"({"entries": [{"label": "x", "charge": 0, "energy_ev": 1}]})",
                      "mem");
    FAIL("expected parse_error");
  } catch (const parse_error& e) {
    const std::string what = e.what();
    CHECK(what.find("/entries/0") != std::string::npos);
    CHECK(what.find("composition") != std::string::npos);
  }
  CHECK_THROWS_AS(
      parse_ledger_json(
          R"({"entries": [{"label": "x", "composition": {"Qq": 1}, "charge": 0, "energy_ev": 1}]})",
          "mem"),
      parse_error);
}

TEST_CASE("reaction json") {
  const thermo::Reaction rxn = parse_reaction_json(
      R"({"lhs": [{"label": "a", "coefficient": 2}], "rhs": [{"label": "b"}]})",
      "mem");
  REQUIRE(rxn.lhs.size() == 1);
  CHECK(rxn.lhs[0].coefficient == 2);
  CHECK(rxn.rhs[0].coefficient == 1);

  CHECK_THROWS_AS(parse_reaction_json(R"({"lhs": [], "rhs": [{"label": "b"}]})", "t"),
                  parse_error);
  CHECK_THROWS_AS(
      parse_reaction_json(
          R"({"lhs": [{"label": "a", "coefficient": 0}], "rhs": [{"label": "b"}]})",
          "t"),
      parse_error);
  CHECK_THROWS_AS(parse_reaction_json(R"({"rhs": [{"label": "b"}]})", "t"),
                  parse_error);
}

TEST_CASE("transitions json enforces the dipole choice") {
  const auto records = parse_transitions_json(
      R"({"transitions": [
        {"vee_ev": 2.26, "mu_debye": 4.8, "g_j": 2},
        {"vee_ev": 2.0, "mu_components_debye": [0.0, 0.0, 4.0], "n_r": 2.0}
      ]})",
      "mem");
  REQUIRE(records.size() == 2);
  CHECK(records[0].g_j == 2);
  CHECK(records[0].n_r == 2.42);
  REQUIRE(records[1].mu_components_debye.has_value());
  CHECK(records[1].n_r == 2.0);

  CHECK_THROWS_AS(parse_transitions_json(
                      R"({"transitions": [{"vee_ev": 2.0}]})", "t"),
                  parse_error);
  CHECK_THROWS_AS(
      parse_transitions_json(
          R"({"transitions": [{"vee_ev": 2.0, "mu_debye": 1.0,
                               "mu_components_debye": [1, 0, 0]}]})",
          "t"),
      parse_error);
  CHECK_THROWS_AS(parse_transitions_json(
                      R"({"transitions": [{"vee_ev": -2.0, "mu_debye": 1.0}]})", "t"),
                  parse_error);
}

TEST_CASE("spin sites json") {
  const zfs::SpinSiteModel model = parse_spinsites_json(
      R"({"g_factor": 2.0, "sites": [
        {"position_angstrom": [0, 0, 0], "population": 1.0},
        {"position_angstrom": [0, 0, 2.5], "population": 0.5}
      ]})",
      "mem");
  CHECK(model.g_factor == 2.0);
  REQUIRE(model.sites.size() == 2);
  CHECK(model.sites[1].position.z() == 2.5);

  CHECK_THROWS_AS(
      parse_spinsites_json(
          R"({"sites": [{"position_angstrom": [0, 0], "population": 1.0}]})", "t"),
      parse_error);
  CHECK_THROWS_AS(
      parse_spinsites_json(
          R"({"sites": [{"position_angstrom": [0, 0, 0], "population": -1.0}]})",
          "t"),
      parse_error);
  // A single populated site cannot define a dipolar tensor.
  CHECK_THROWS_AS(
      parse_spinsites_json(
          R"({"sites": [{"position_angstrom": [0, 0, 0], "population": 1.0}]})",
          "t"),
      parse_error);
}

TEST_CASE("tensor json") {
  const zfs::ZfsTensor t = parse_tensor_json(
      R"({"tensor_ghz": [[1, 0, 0], [0, 1, 0], [0, 0, -2]]})", "mem");
  CHECK(t.matrix(2, 2) == -2.0);
  CHECK_THROWS_AS(parse_tensor_json(R"({"tensor_ghz": [[1, 0, 0], [0, 1, 0]]})", "t"),
                  parse_error);
  CHECK_THROWS_AS(parse_tensor_json(R"({"tensor_ghz": "nope"})", "t"), parse_error);
}

TEST_CASE("levels json resolves the two input conventions") {
  const LevelFile file = parse_levels_json(
      R"({"e_gap_ev": 5.5, "anchor_ev": 3.09, "levels": [
        {"label": "a", "ie_plus_cbm_ev": 4.48},
        {"label": "b", "delta_e_ct_ev": -1.28}
      ]})",
      "mem");
  CHECK(file.e_gap_ev == 5.5);
  CHECK(file.anchor_ev == 3.09);
  REQUIRE(file.levels.size() == 2);
  CHECK_FALSE(file.levels[0].is_delta_e_ct);
  CHECK(file.levels[1].is_delta_e_ct);
  CHECK(file.levels[1].value_ev == -1.28);

  CHECK_THROWS_AS(
      parse_levels_json(R"({"levels": [{"label": "x"}]})", "t"), parse_error);
  CHECK_THROWS_AS(
      parse_levels_json(
          R"({"levels": [{"label": "x", "ie_plus_cbm_ev": 1, "delta_e_ct_ev": 2}]})",
          "t"),
      parse_error);
}

TEST_CASE("truncated inputs always raise located parse errors") {
  const std::string poscar = write_poscar(lattice::build_diamond_supercell(1, 1, 1));
  const std::string xyz =
      "3\nmol\nC 0 0 0\nF 1.3 0 0\nO 0 1.3 0\n";
  const std::string grid = write_simple_grid(
      VolumetricGrid::zeros(UnitCell::cubic(2.0), {2, 2, 2}));

  struct Case {
    const std::string* text;
    int kind;  // 0 poscar, 1 xyz, 2 grid
  };
  for (const Case& c : {Case{&poscar, 0}, Case{&xyz, 1}, Case{&grid, 2}}) {
    for (std::size_t cut = 0; cut < c.text->size(); ++cut) {
      const std::string prefix = c.text->substr(0, cut);
      bool ok_or_error = true;
      try {
        if (c.kind == 2)
          parse_grid_auto(prefix, "fuzz");
        else
          parse_structure(prefix,
                          c.kind == 1 ? StructureFormat::xyz : StructureFormat::poscar,
                          "fuzz");
      } catch (const parse_error&) {
        // expected
      } catch (...) {
        ok_or_error = false;
      }
      CHECK(ok_or_error);
    }
  }
}

TEST_CASE("random garbage never escapes as a non-parse exception") {
  std::mt19937_64 rng(53);
  std::uniform_int_distribution<int> len_dist(0, 200);
  std::uniform_int_distribution<int> byte_dist(1, 126);
  for (int trial = 0; trial < 2000; ++trial) {
    std::string text;
    const int len = len_dist(rng);
    for (int i = 0; i < len; ++i)
      text.push_back(static_cast<char>(byte_dist(rng)));
    for (int which = 0; which < 3; ++which) {
      try {
        if (which == 0)
          parse_structure(text, StructureFormat::poscar, "fuzz");
        else if (which == 1)
          parse_structure(text, StructureFormat::xyz, "fuzz");
        else
          parse_grid_auto(text, "fuzz");
      } catch (const parse_error&) {
      }
    }
  }
  CHECK(true);
}
