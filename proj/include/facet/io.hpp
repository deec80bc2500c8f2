#pragma once

#include "facet/core.hpp"
#include "facet/embed.hpp"
#include "facet/optics.hpp"
#include "facet/structure.hpp"
#include "facet/thermo.hpp"
#include "facet/zfs.hpp"

#include "json.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace facet::io {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// primitives

// Shortest decimal form that round-trips the double exactly (17 significant
// digits via %.17g).
std::string format_double(double v);

// Whole-file read; missing or unreadable files raise a located parse_error.
std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

// nlohmann parse with byte offsets converted to line/column diagnostics.
json parse_json_text(std::string_view text, const std::string& source);

// Sorted-key, 2-space-indented dump with a trailing newline.
std::string dump_json(const json& j);

// ---------------------------------------------------------------------------
// structures

enum class StructureFormat { poscar, xyz };

Structure parse_poscar(std::string_view text, const std::string& source = "<poscar>");
std::string write_poscar(const Structure& s);

Structure parse_xyz(std::string_view text, const std::string& source = "<xyz>");
std::string write_xyz(const Structure& s);

Structure parse_structure(std::string_view text, StructureFormat format,
                          const std::string& source);
std::string write_structure(const Structure& s, StructureFormat format);

// Picks the format from a file name: .xyz is XYZ, anything else POSCAR.
StructureFormat guess_structure_format(const std::string& path);

// ---------------------------------------------------------------------------
// grids

// Charge-density file: structure header, charge grid, optional spin grid.
struct GridDocument {
  Structure structure;
  VolumetricGrid charge;
  std::optional<VolumetricGrid> spin;
};

GridDocument parse_chgcar(std::string_view text, const std::string& source = "<chgcar>");
std::string write_chgcar(const GridDocument& doc);

VolumetricGrid parse_simple_grid(std::string_view text,
                                 const std::string& source = "<grid>");
std::string write_simple_grid(const VolumetricGrid& g);

// Dispatch: content starting with the simple-format magic parses as simple,
// anything else as a charge-density file (charge grid returned).
VolumetricGrid parse_grid_auto(std::string_view text, const std::string& source);

// ---------------------------------------------------------------------------
// JSON-schema inputs

thermo::EnergyLedger parse_ledger_json(std::string_view text,
                                       const std::string& source = "<ledger>");
std::string write_ledger_json(const thermo::EnergyLedger& ledger);

thermo::Reaction parse_reaction_json(std::string_view text,
                                     const std::string& source = "<reaction>");

std::vector<optics::TransitionRecord> parse_transitions_json(
    std::string_view text, const std::string& source = "<transitions>");

zfs::SpinSiteModel parse_spinsites_json(std::string_view text,
                                        const std::string& source = "<spinsites>");

zfs::ZfsTensor parse_tensor_json(std::string_view text,
                                 const std::string& source = "<tensor>");

// One charge-transition level, given either directly or as a charge-transfer
// energy to be anchored by the ladder reference.
struct LevelInput {
  std::string label;
  double value_ev = 0.0;
  bool is_delta_e_ct = false;
};

struct LevelFile {
  std::vector<LevelInput> levels;
  std::optional<double> e_gap_ev;
  std::optional<double> anchor_ev;
};

LevelFile parse_levels_json(std::string_view text,
                            const std::string& source = "<levels>");

// ---------------------------------------------------------------------------
// basis sets

// Element-keyed shell templates, instantiated on atoms by make_basis.
struct BasisLibrary {
  struct ShellTemplate {
    int l = 0;
    std::vector<embed::Primitive> primitives;
  };
  std::map<std::string, std::vector<ShellTemplate>> elements;
};

BasisLibrary parse_basis(std::string_view text, const std::string& source = "<basis>");
std::string write_basis(const BasisLibrary& lib);

// One shell per template, centered on each atom, in atom order.  Atoms whose
// element has no entry are an error.
embed::BasisSet make_basis(const Structure& s, const BasisLibrary& lib);

// ---------------------------------------------------------------------------
// report envelope

// Standard wrapper for CLI/module JSON output: tool, version, module name,
// declared units, input fingerprints, payload.
json make_report(const std::string& module, json units, json fingerprints,
                 json payload);

}  // namespace facet::io
