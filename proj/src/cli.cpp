#include "facet/cli.hpp"

#include "facet/core.hpp"
#include "facet/corrections.hpp"
#include "facet/embed.hpp"
#include "facet/io.hpp"
#include "facet/lattice.hpp"
#include "facet/optics.hpp"
#include "facet/structure.hpp"
#include "facet/symmetry.hpp"
#include "facet/thermo.hpp"
#include "facet/zfs.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace facet::cli {
namespace {

using json = nlohmann::json;

std::string fmt(double v) { return io::format_double(v); }

std::string trim(std::string s) {
  const auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!s.empty() && is_space(s.back())) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && is_space(static_cast<unsigned char>(s[i]))) ++i;
  return s.substr(i);
}

// ---------------------------------------------------------------------------
// configuration file and precedence: flags > config file > built-in defaults

struct ConfigEntry {
  std::string value;
  int line = 1;
};

struct Settings {
  std::string format = "text";
  std::string config_path;
  CLI::Option* config_opt = nullptr;
  int threads_flag = 1;
  CLI::Option* threads_opt = nullptr;

  bool loaded = false;
  std::string loaded_path;
  std::map<std::string, ConfigEntry> config;

  bool json_output() const { return format == "json"; }

  void ensure_config() {
    if (loaded) return;
    loaded = true;
    std::string path;
    if (config_opt != nullptr && config_opt->count() > 0) {
      path = config_path;
    } else if (const char* env = std::getenv("FACET_CONFIG")) {
      path = env;
    }
    if (path.empty()) return;
    loaded_path = path;
    const std::string text = io::read_file(path);
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (const auto hash = line.find('#'); hash != std::string::npos) {
        line.erase(hash);
      }
      line = trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        throw parse_error(path, line_no, 1, "expected key = value");
      }
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (key.empty()) throw parse_error(path, line_no, 1, "empty key");
      if (value.empty()) {
        throw parse_error(path, line_no, static_cast<int>(eq) + 2, "empty value");
      }
      static const char* known[] = {"a0",     "eps_r", "n_r",         "e_gap",
                                    "anchor", "alpha", "bond_cutoff", "threads"};
      if (std::find_if(std::begin(known), std::end(known), [&](const char* k) {
            return key == k;
          }) == std::end(known)) {
        throw parse_error(path, line_no, 1, "unknown config key '" + key + "'");
      }
      config[key] = {value, line_no};
    }
  }

  const ConfigEntry* find(const std::string& key) {
    ensure_config();
    const auto it = config.find(key);
    return it == config.end() ? nullptr : &it->second;
  }

  double config_number(const std::string& key, const ConfigEntry& entry) const {
    char* end = nullptr;
    const double v = std::strtod(entry.value.c_str(), &end);
    if (end == entry.value.c_str() || *end != '\0' || !std::isfinite(v)) {
      throw parse_error(loaded_path, entry.line, 1,
                        "config key '" + key + "' is not a number: '" + entry.value + "'");
    }
    return v;
  }

  // A flag that was given wins; otherwise the config key; otherwise fallback.
  double number(const CLI::Option* opt, double flag_value, const std::string& key,
                double fallback) {
    if (opt != nullptr && opt->count() > 0) return flag_value;
    if (const ConfigEntry* e = find(key)) return config_number(key, *e);
    return fallback;
  }

  int threads() {
    if (threads_opt != nullptr && threads_opt->count() > 0) return threads_flag;
    if (const ConfigEntry* e = find("threads")) {
      const double v = config_number("threads", *e);
      const int n = static_cast<int>(v);
      if (n < 1 || static_cast<double>(n) != v) {
        throw parse_error(loaded_path, e->line, 1,
                          "config key 'threads' must be a positive integer");
      }
      return n;
    }
    return 1;
  }
};

// ---------------------------------------------------------------------------
// small parsing and output helpers

std::vector<double> parse_number_list(const std::string& text, std::size_t count,
                                      const std::string& flag) {
  std::string spaced = text;
  for (char& c : spaced) {
    if (c == ',') c = ' ';
  }
  std::istringstream in(spaced);
  std::vector<double> values;
  std::string token;
  while (in >> token) {
    char* end = nullptr;
    const double v = std::strtod(token.c_str(), &end);
    if (end == token.c_str() || *end != '\0' || !std::isfinite(v)) {
      throw CLI::ValidationError(flag, "'" + token + "' is not a number");
    }
    values.push_back(v);
  }
  if (values.size() != count) {
    throw CLI::ValidationError(
        flag, "expected " + std::to_string(count) + " comma-separated numbers");
  }
  return values;
}

Vec3 parse_vec3_flag(const std::string& text, const std::string& flag) {
  const auto v = parse_number_list(text, 3, flag);
  return Vec3(v[0], v[1], v[2]);
}

Mat3 parse_mat3_flag(const std::string& text, const std::string& flag) {
  const auto v = parse_number_list(text, 9, flag);
  Mat3 m;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) m(r, c) = v[3 * r + c];
  }
  return m;
}

json vec3_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

json mat3_json(const Mat3& m) {
  json rows = json::array();
  for (int r = 0; r < 3; ++r) {
    rows.push_back(json::array({m(r, 0), m(r, 1), m(r, 2)}));
  }
  return rows;
}

std::string vec3_text(const Vec3& v) {
  return fmt(v.x()) + " " + fmt(v.y()) + " " + fmt(v.z());
}

std::string read_input(const std::string& path, json& fingerprints,
                       const std::string& role, std::string* text_out = nullptr) {
  std::string text = io::read_file(path);
  fingerprints[role] = fingerprint_hex(text);
  if (text_out != nullptr) *text_out = text;
  return text;
}

Structure load_structure(const std::string& path, json& fingerprints,
                         const std::string& role) {
  const std::string text = read_input(path, fingerprints, role);
  return io::parse_structure(text, io::guess_structure_format(path), path);
}

VolumetricGrid load_grid(const std::string& path, json& fingerprints,
                         const std::string& role) {
  const std::string text = read_input(path, fingerprints, role);
  return io::parse_grid_auto(text, path);
}

// Renders either the JSON report envelope or the plain-text view; both read
// the same computed values.
void emit(const Settings& st, std::ostream& out, const std::string& module,
          const json& units, const json& fingerprints, const json& payload,
          const std::function<void(std::ostream&)>& text) {
  if (st.json_output()) {
    out << io::dump_json(io::make_report(module, units, fingerprints, payload));
    return;
  }
  text(out);
}

json lattice_units() {
  return json{{"length", "angstrom"}, {"energy", "eV"}};
}

// Writes a built structure to the requested path (format from the
// extension) or prints it; the report describes what was produced.
void deliver_structure(const Settings& st, std::ostream& out, const Structure& s,
                       const std::string& out_path, const json& fingerprints,
                       json extra_payload) {
  json payload = std::move(extra_payload);
  payload["sites"] = s.size();
  json comp = json::object();
  for (const auto& [species, count] : s.species_counts()) comp[species] = count;
  payload["composition"] = comp;
  if (s.cell.is_cubic()) payload["cubic_edge_angstrom"] = s.cell.cubic_edge();
  const std::string content =
      out_path.empty() ? io::write_poscar(s)
                       : io::write_structure(s, io::guess_structure_format(out_path));
  if (!out_path.empty()) {
    io::write_file(out_path, content);
    payload["path"] = out_path;
    emit(st, out, "lattice", lattice_units(), fingerprints, payload,
         [&](std::ostream& o) {
           o << "wrote " << out_path << " (" << s.size() << " sites)\n";
         });
    return;
  }
  payload["content"] = content;
  emit(st, out, "lattice", lattice_units(), fingerprints, payload,
       [&](std::ostream& o) { o << content; });
}

std::vector<int> resolve_selection(const Structure& s,
                                   const std::vector<int>& select,
                                   const std::vector<std::string>& vacancy_flags,
                                   double bond_cutoff) {
  if (!select.empty() && !vacancy_flags.empty()) {
    throw CLI::ValidationError("--select", "cannot be combined with --vacancy");
  }
  if (!select.empty()) {
    std::vector<int> ids = select;
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ids;
  }
  if (vacancy_flags.empty()) {
    throw CLI::ValidationError("--select", "either --select or --vacancy is required");
  }
  std::vector<Vec3> vacancies;
  vacancies.reserve(vacancy_flags.size());
  for (const auto& v : vacancy_flags) {
    vacancies.push_back(parse_vec3_flag(v, "--vacancy"));
  }
  return lattice::select_defect_cluster(s, vacancies, bond_cutoff);
}

std::string capped_cluster_xyz(const lattice::CappedCluster& cc) {
  std::ostringstream out;
  out << cc.core.size() + cc.caps.size() << "\n" << cc.formula() << "\n";
  for (const auto& a : cc.core) {
    out << a.species << " " << vec3_text(a.position) << "\n";
  }
  for (const auto& c : cc.caps) {
    out << c.element << " " << vec3_text(c.position) << "\n";
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// lattice subcommands

void add_lattice(CLI::App& root, Settings& st, std::ostream& out) {
  auto* lat = root.add_subcommand("lattice", "Supercells, defects, clusters, caps");
  lat->require_subcommand(1);

  {
    struct Opts {
      int n1 = 1, n2 = 1, n3 = 1;
      bool primitive = false;
      double a0 = defaults::diamond_lattice_constant;
      CLI::Option* a0_opt = nullptr;
      std::string out_path;
    };
    auto o = std::make_shared<Opts>();
    auto* cmd = lat->add_subcommand("build", "Diamond supercell");
    cmd->add_option("--n1", o->n1, "cells along a1")->required()->check(CLI::PositiveNumber);
    cmd->add_option("--n2", o->n2, "cells along a2")->required()->check(CLI::PositiveNumber);
    cmd->add_option("--n3", o->n3, "cells along a3")->required()->check(CLI::PositiveNumber);
    cmd->add_flag("--primitive", o->primitive, "two-atom fcc cell instead of cubic");
    o->a0_opt = cmd->add_option("--a0", o->a0, "lattice constant, angstrom");
    cmd->add_option("-o,--out", o->out_path, "output structure file (.xyz for XYZ)");
    cmd->callback([&st, &out, o]() {
      const double a0 = st.number(o->a0_opt, o->a0, "a0", defaults::diamond_lattice_constant);
      const Structure s =
          o->primitive ? lattice::build_diamond_primitive_supercell(o->n1, o->n2, o->n3, a0)
                       : lattice::build_diamond_supercell(o->n1, o->n2, o->n3, a0);
      json payload{{"a0_angstrom", a0}, {"primitive", o->primitive}};
      deliver_structure(st, out, s, o->out_path, json::object(), std::move(payload));
    });
  }

  {
    struct Opts {
      std::string in_path;
      std::vector<std::string> substitute;
      std::vector<int> remove;
      int charge = 0;
      std::string out_path;
    };
    auto o = std::make_shared<Opts>();
    auto* cmd = lat->add_subcommand("defect", "Substitute or remove sites");
    cmd->add_option("--in", o->in_path, "input structure")->required();
    cmd->add_option("--substitute", o->substitute, "ID=ELEMENT (repeatable)");
    cmd->add_option("--remove", o->remove, "site id to remove (repeatable)")->delimiter(',');
    cmd->add_option("--charge", o->charge, "net defect charge, reported only");
    cmd->add_option("-o,--out", o->out_path, "output structure file");
    cmd->callback([&st, &out, o]() {
      json fingerprints = json::object();
      const Structure s = load_structure(o->in_path, fingerprints, "structure");
      lattice::DefectSpec spec;
      spec.charge = o->charge;
      for (const auto& token : o->substitute) {
        const auto eq = token.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 == token.size()) {
          throw CLI::ValidationError("--substitute", "expected ID=ELEMENT, got '" + token + "'");
        }
        char* end = nullptr;
        const long id = std::strtol(token.c_str(), &end, 10);
        if (end != token.c_str() + eq) {
          throw CLI::ValidationError("--substitute", "'" + token.substr(0, eq) +
                                                         "' is not a site id");
        }
        spec.edits.push_back(
            lattice::DefectEdit::substitute(static_cast<int>(id), token.substr(eq + 1)));
      }
      for (const int id : o->remove) {
        spec.edits.push_back(lattice::DefectEdit::remove(id));
      }
      if (spec.edits.empty()) {
        throw CLI::ValidationError("--substitute", "no edits given");
      }
      const Structure edited = lattice::apply_defects(s, spec);
      json payload{{"charge", o->charge},
                   {"edits", spec.edits.size()},
                   {"source_sites", s.size()}};
      deliver_structure(st, out, edited, o->out_path, fingerprints, std::move(payload));
    });
  }

  {
    struct Opts {
      std::string in_path;
      std::vector<int> select;
      std::vector<std::string> vacancy;
      double bond_cutoff = defaults::bond_cutoff;
      CLI::Option* cutoff_opt = nullptr;
    };
    auto o = std::make_shared<Opts>();
    auto* cmd = lat->add_subcommand("carve", "Cluster core and boundary bonds");
    cmd->add_option("--in", o->in_path, "input structure")->required();
    cmd->add_option("--select", o->select, "core site ids")->delimiter(',');
    cmd->add_option("--vacancy", o->vacancy, "vacancy position x,y,z angstrom (repeatable)");
    o->cutoff_opt = cmd->add_option("--bond-cutoff", o->bond_cutoff, "bond cutoff, angstrom");
    cmd->callback([&st, &out, o]() {
      json fingerprints = json::object();
      const Structure s = load_structure(o->in_path, fingerprints, "structure");
      const double cutoff =
          st.number(o->cutoff_opt, o->bond_cutoff, "bond_cutoff", defaults::bond_cutoff);
      const std::vector<int> ids = resolve_selection(s, o->select, o->vacancy, cutoff);
      const lattice::CarveResult carve = lattice::carve_cluster(s, ids, cutoff);
      json boundary = json::array();
      for (const auto& b : carve.boundary) {
        boundary.push_back(json{{"external_id", b.external_id},
                                {"core_ids", b.core_ids},
                                {"multiplicity", b.core_ids.size()}});
      }
      json comp = json::object();
      for (const int id : carve.core_ids) {
        const auto idx = s.index_of(id);
        if (!idx) continue;
        const std::string& sp = s.sites[*idx].species;
        comp[sp] = comp.value(sp, 0) + 1;
      }
      const json payload{{"core_ids", carve.core_ids},
                         {"core_size", carve.core_ids.size()},
                         {"core_composition", comp},
                         {"boundary", boundary},
                         {"bond_cutoff_angstrom", cutoff}};
      emit(st, out, "lattice", lattice_units(), fingerprints, payload,
           [&](std::ostream& oo) {
             oo << "core atoms = " << carve.core_ids.size() << "\n";
             oo << "boundary sites = " << carve.boundary.size() << "\n";
             for (const auto& b : carve.boundary) {
               oo << "  external " << b.external_id << " bonds " << b.core_ids.size()
                  << "\n";
             }
           });
    });
  }

  {
    struct Opts {
      std::string in_path;
      std::vector<int> select;
      std::vector<std::string> vacancy;
      std::string side = "cluster";
      double bond_cutoff = defaults::bond_cutoff;
      CLI::Option* cutoff_opt = nullptr;
      std::string xyz_out;
    };
    auto o = std::make_shared<Opts>();
    auto* cmd = lat->add_subcommand("cap", "Valence-matched caps on a carved cluster");
    cmd->add_option("--in", o->in_path, "input structure")->required();
    cmd->add_option("--select", o->select, "core site ids")->delimiter(',');
    cmd->add_option("--vacancy", o->vacancy, "vacancy position x,y,z angstrom (repeatable)");
    cmd->add_option("--side", o->side, "cluster or environment")
        ->check(CLI::IsMember({"cluster", "environment"}));
    o->cutoff_opt = cmd->add_option("--bond-cutoff", o->bond_cutoff, "bond cutoff, angstrom");
    cmd->add_option("--xyz-out", o->xyz_out, "write the capped cluster as XYZ");
    cmd->callback([&st, &out, o]() {
      json fingerprints = json::object();
      const Structure s = load_structure(o->in_path, fingerprints, "structure");
      const double cutoff =
          st.number(o->cutoff_opt, o->bond_cutoff, "bond_cutoff", defaults::bond_cutoff);
      const std::vector<int> ids = resolve_selection(s, o->select, o->vacancy, cutoff);
      const lattice::CarveResult carve = lattice::carve_cluster(s, ids, cutoff);
      const auto side = o->side == "cluster" ? lattice::CapSide::cluster
                                             : lattice::CapSide::environment;
      const lattice::CappedCluster cc =
          lattice::cap_cluster(s, carve, side, std::nullopt, cutoff);
      if (!o->xyz_out.empty()) io::write_file(o->xyz_out, capped_cluster_xyz(cc));

      long electrons = cc.cap_electron_count();
      for (const auto& a : cc.core) electrons += atomic_number(a.species).value_or(0);
      json caps = json::array();
      for (const auto& c : cc.caps) {
        caps.push_back(json{{"source_id", c.source_id},
                            {"element", c.element},
                            {"kind", lattice::to_string(c.kind)},
                            {"multiplicity", c.multiplicity},
                            {"position_angstrom", vec3_json(c.position)}});
      }
      json core_comp = json::object();
      for (const auto& [sp, n] : cc.core_composition()) core_comp[sp] = n;
      json cap_comp = json::object();
      for (const auto& [sp, n] : cc.cap_composition()) cap_comp[sp] = n;
      json payload{{"side", o->side},
                   {"formula", cc.formula()},
                   {"core_composition", core_comp},
                   {"cap_composition", cap_comp},
                   {"caps", caps},
                   {"electron_count", electrons},
                   {"electron_parity", electrons % 2 == 0 ? "even" : "odd"}};
      if (!o->xyz_out.empty()) payload["xyz_path"] = o->xyz_out;
      emit(st, out, "lattice", lattice_units(), fingerprints, payload,
           [&](std::ostream& oo) {
             oo << "formula = " << cc.formula() << "\n";
             oo << "caps = " << cc.caps.size() << "\n";
             oo << "electron count = " << electrons << " ("
                << (electrons % 2 == 0 ? "even" : "odd") << ")\n";
             if (!o->xyz_out.empty()) oo << "wrote " << o->xyz_out << "\n";
           });
    });
  }

  {
    struct Opts {
      std::string name;
      double a0 = defaults::diamond_lattice_constant;
      CLI::Option* a0_opt = nullptr;
      std::string dir = ".";
    };
    auto o = std::make_shared<Opts>();
    auto* cmd = lat->add_subcommand("fixture", "Shipped defect models");
    cmd->add_option("--name", o->name, "ov (128-site) or vov (250-site)")
        ->required()
        ->check(CLI::IsMember({"ov", "vov"}));
    o->a0_opt = cmd->add_option("--a0", o->a0, "lattice constant, angstrom");
    cmd->add_option("--dir", o->dir, "output directory");
    cmd->callback([&st, &out, o]() {
      const double a0 = st.number(o->a0_opt, o->a0, "a0", defaults::diamond_lattice_constant);
      const lattice::DefectFixture fx = o->name == "ov"
                                            ? lattice::oxygen_vacancy_fixture(a0)
                                            : lattice::divacancy_oxygen_fixture(a0);
      namespace fs = std::filesystem;
      fs::create_directories(o->dir);
      const auto path = [&](const std::string& suffix) {
        return (fs::path(o->dir) / (fx.name + "-" + suffix)).string();
      };
      // The written file groups sites by species and readers assign ids in
      // file order, so recompute the id-valued metadata against a re-parse
      // of the exact text being written.
      const std::string defective_text = io::write_poscar(fx.defective);
      const Structure reparsed = io::parse_poscar(defective_text, path("defective.poscar"));
      const std::vector<int> selection =
          lattice::select_defect_cluster(reparsed, fx.vacancy_positions);
      int oxygen_id = -1;
      for (const auto& site : reparsed.sites) {
        if (site.species == "O") {
          oxygen_id = site.id;
          break;
        }
      }
      json vacancies = json::array();
      for (const auto& v : fx.vacancy_positions) vacancies.push_back(vec3_json(v));
      const json meta{{"name", fx.name},
                      {"point_group", fx.point_group},
                      {"charge", fx.spec.charge},
                      {"oxygen_id", oxygen_id},
                      {"vacancy_positions_angstrom", vacancies},
                      {"defect_center_angstrom", vec3_json(fx.defect_center)},
                      {"cluster_selection", selection},
                      {"orientation", mat3_json(fx.orientation)},
                      {"orientation_convention", "columns are the x', y', z' axes"}};
      const std::vector<std::pair<std::string, std::string>> files{
          {path("pristine.poscar"), io::write_poscar(fx.pristine)},
          {path("defective.poscar"), defective_text},
          {path("fixture.json"), io::dump_json(meta)},
      };
      for (const auto& [p, content] : files) io::write_file(p, content);
      json payload = meta;
      json file_list = json::array();
      for (const auto& [p, content] : files) file_list.push_back(p);
      payload["files"] = file_list;
      payload["defective_sites"] = fx.defective.size();
      emit(st, out, "lattice", lattice_units(), json::object(), payload,
           [&](std::ostream& oo) {
             for (const auto& [p, content] : files) oo << "wrote " << p << "\n";
             oo << "point group = " << fx.point_group << "\n";
           });
    });
  }
}

// ---------------------------------------------------------------------------
// sym subcommands

sym::PointSet structure_point_set(const Structure& s) {
  sym::PointSet ps;
  ps.points.reserve(s.size());
  ps.species.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    ps.points.push_back(s.cartesian(i));
    ps.species.push_back(s.sites[i].species);
  }
  return ps;
}

json sym_units() { return json{{"length", "angstrom"}, {"csm", "dimensionless"}}; }

void add_sym(CLI::App& root, Settings& st, std::ostream& out) {
  auto* symc = root.add_subcommand("sym", "Symmetry measures, groups, labels");
  symc->require_subcommand(1);
  const std::vector<std::string> groups = sym::known_group_names();

  {
    struct Opts {
      std::string group;
      std::string in_path;
      std::string center;
      std::string frame;
      std::string nearest_out;
    };
    auto o = std::make_shared<Opts>();
    auto* cmd = symc->add_subcommand("csm", "Continuous symmetry measure");
    cmd->add_option("--group", o->group, "point group")->required()->check(CLI::IsMember(groups));
    cmd->add_option("--in", o->in_path, "structure (.xyz or POSCAR)")->required();
    cmd->add_option("--center", o->center, "center x,y,z angstrom (default centroid)");
    cmd->add_option("--frame", o->frame,
                    "orientation matrix, nine numbers row-major; columns are x',y',z'");
    cmd->add_option("--nearest-out", o->nearest_out, "write the symmetrized points as XYZ");
    cmd->callback([&st, &out, o]() {
      json fingerprints = json::object();
      const Structure s = load_structure(o->in_path, fingerprints, "structure");
      const sym::PointSet ps = structure_point_set(s);
      sym::PointGroup g = sym::make_point_group(o->group);
      if (!o->frame.empty()) g = g.oriented(parse_mat3_flag(o->frame, "--frame"));
      std::optional<Vec3> center;
      if (!o->center.empty()) center = parse_vec3_flag(o->center, "--center");
      const sym::CsmResult r = sym::csm(ps, g, center);
      if (!o->nearest_out.empty()) {
        std::ostringstream xyz;
        xyz << r.nearest_points.size() << "\nnearest " << o->group
            << "-symmetric configuration\n";
        for (std::size_t i = 0; i < r.nearest_points.size(); ++i) {
          xyz << ps.species[i] << " " << vec3_text(r.nearest_points[i]) << "\n";
        }
        io::write_file(o->nearest_out, xyz.str());
      }
      json payload{{"group", o->group},
                   {"s_prime", r.s_prime},
                   {"op_max_displacement", r.op_max_displacement}};
      if (!o->nearest_out.empty()) payload["nearest_path"] = o->nearest_out;
      emit(st, out, "sym", sym_units(), fingerprints, payload, [&](std::ostream& oo) {
        oo << "group = " << o->group << "\n";
        oo << "csm = " << fmt(r.s_prime) << "\n";
      });
    });
  }

  {
    struct Opts {
      std::string in_path;
      std::vector<std::string> groups;
      double threshold = defaults::symmetry_tolerance;
      bool no_refine = false;
      int max_seeds = 200;
    };
    auto o = std::make_shared<Opts>();
    auto* cmd = symc->add_subcommand("detect", "Best point group within tolerance");
    cmd->add_option("--in", o->in_path, "structure (.xyz or POSCAR)")->required();
    cmd->add_option("--groups", o->groups, "candidate groups")->delimiter(',');
    cmd->add_option("--threshold", o->threshold, "acceptance threshold on S'");
    cmd->add_flag("--no-refine", o->no_refine, "skip orientation refinement");
    cmd->add_option("--max-seeds", o->max_seeds, "axis seed cap")->check(CLI::PositiveNumber);
    cmd->callback([&st, &out, o]() {
      json fingerprints = json::object();
      const Structure s = load_structure(o->in_path, fingerprints, "structure");
      const sym::PointSet ps = structure_point_set(s);
      sym::DetectionOptions opt;
      opt.threshold = o->threshold;
      opt.refine = !o->no_refine;
      opt.max_seeds = o->max_seeds;
      const auto& candidates = o->groups.empty() ? sym::known_group_names() : o->groups;
      const sym::DetectionResult r = sym::detect_point_group(ps, candidates, opt);
      json cand = json::array();
      for (const auto& c : r.candidates) {
        cand.push_back(json{{"group", c.group}, {"s_prime", c.s_prime}});
      }
      const json payload{{"group", r.group},
                         {"s_prime", r.csm.s_prime},
                         {"orientation", mat3_json(r.orientation)},
                         {"threshold", o->threshold},
                         {"candidates", cand}};
      emit(st, out, "sym", sym_units(), fingerprints, payload, [&](std::ostream& oo) {
        oo << "group = " << r.group << "\n";
        oo << "csm = " << fmt(r.csm.s_prime) << "\n";
        for (const auto& c : r.candidates) {
          oo << "  " << c.group << " " << fmt(c.s_prime) << "\n";
        }
      });
    });
  }

  {
    struct Opts {
      std::string group;
      std::string a, b;
    };
    auto o = std::make_shared<Opts>();
    auto* cmd = symc->add_subcommand("product", "Irrep direct product");
    cmd->add_option("--group", o->group, "point group")->required()->check(CLI::IsMember(groups));
    cmd->add_option("a", o->a, "first irrep")->required();
    cmd->add_option("b", o->b, "second irrep")->required();
    cmd->callback([&st, &out, o]() {
      const sym::PointGroup g = sym::make_point_group(o->group);
      const sym::ProductResult p = sym::irrep_product(o->a, o->b, g);
      const json payload{{"group", o->group}, {"a", o->a},     {"b", o->b},
                         {"product", p.str()}, {"irreps", p.irreps},
                         {"reducible", p.reducible}};
      emit(st, out, "sym", json{{"product", "irrep"}}, json::object(), payload,
           [&](std::ostream& oo) {
             oo << o->a << " x " << o->b << " = " << p.str() << "\n";
           });
    });
  }

  {
    struct Opts {
      std::string group;
      std::vector<std::string> orbitals;
      double spin = 0.0;
      CLI::Option* spin_opt = nullptr;
    };
    auto o = std::make_shared<Opts>();
    auto* cmd = symc->add_subcommand("label", "State label from orbital occupations");
    cmd->add_option("--group", o->group, "point group")->required()->check(CLI::IsMember(groups));
    cmd->add_option("--orbital", o->orbitals, "IRREP:OCC with OCC 0, 1, or 2 (repeatable)")
        ->required();
    o->spin_opt = cmd->add_option("--spin", o->spin,
                                  "total S (default: unpaired electrons / 2)");
    cmd->callback([&st, &out, o]() {
      const sym::PointGroup g = sym::make_point_group(o->group);
      sym::ElectronConfiguration cfg;
      int unpaired = 0;
      for (const auto& token : o->orbitals) {
        const auto colon = token.rfind(':');
        if (colon == std::string::npos || colon == 0 || colon + 1 == token.size()) {
          throw CLI::ValidationError("--orbital", "expected IRREP:OCC, got '" + token + "'");
        }
        char* end = nullptr;
        const long occ = std::strtol(token.c_str() + colon + 1, &end, 10);
        if (*end != '\0' || occ < 0 || occ > 2) {
          throw CLI::ValidationError("--orbital", "occupation must be 0, 1, or 2");
        }
        if (occ == 1) ++unpaired;
        cfg.orbitals.push_back(
            {token, token.substr(0, colon), static_cast<int>(occ)});
      }
      cfg.spin = (o->spin_opt->count() > 0) ? o->spin : unpaired / 2.0;
      const sym::StateLabel label = sym::assign_state_irrep(cfg, g);
      const json payload{{"group", o->group},
                         {"spin", cfg.spin},
                         {"multiplicity", label.multiplicity},
                         {"irreps", label.irreps},
                         {"reducible", label.reducible},
                         {"term", label.str()}};
      emit(st, out, "sym", json{{"spin", "hbar"}}, json::object(), payload,
           [&](std::ostream& oo) { oo << "term = " << label.str() << "\n"; });
    });
  }
}

// ---------------------------------------------------------------------------
// optics

void add_optics(CLI::App& root, Settings& st, std::ostream& out) {
  auto* opt = root.add_subcommand("optics", "Oscillator strengths and lifetimes");
  opt->require_subcommand(1);

  struct Opts {
    std::string in_path;
    double n_r = defaults::refractive_index;
    CLI::Option* nr_opt = nullptr;
  };
  auto o = std::make_shared<Opts>();
  auto* cmd = opt->add_subcommand("eval", "Evaluate a transitions file");
  cmd->add_option("--in", o->in_path, "transitions JSON")->required();
  o->nr_opt = cmd->add_option("--n-r", o->n_r, "refractive index override for all rows");
  cmd->callback([&st, &out, o]() {
    json fingerprints = json::object();
    const std::string text = read_input(o->in_path, fingerprints, "transitions");
    std::vector<optics::TransitionRecord> records =
        io::parse_transitions_json(text, o->in_path);
    const double nr = st.number(o->nr_opt, o->n_r, "n_r", -1.0);
    if (nr > 0.0) {
      for (auto& t : records) t.n_r = nr;
    }
    json rows = json::array();
    std::ostringstream lines;
    for (const auto& t : records) {
      const optics::OpticalResult r = optics::evaluate(t);
      json row{{"label_i", t.label_i},     {"label_j", t.label_j},
               {"vee_ev", t.vee_ev},       {"mu_debye", t.mu_debye()},
               {"g_i", t.g_i},             {"g_j", t.g_j},
               {"n_r", t.n_r},             {"f_total", r.f_total},
               {"f_per_state", r.f_per_state}, {"dark", r.dark}};
      if (r.tau_ns) row["tau_ns"] = *r.tau_ns;
      if (r.einstein_a_per_ns) row["einstein_a_per_ns"] = *r.einstein_a_per_ns;
      if (r.polarization) row["polarization"] = vec3_json(*r.polarization);
      rows.push_back(row);

      lines << t.label_i << " -> " << t.label_j << ": VEE = " << fmt(t.vee_ev)
            << " eV, mu = " << fmt(t.mu_debye()) << " D, f_total = " << fmt(r.f_total);
      if (r.dark) {
        lines << ", dark (no radiative decay)";
      } else {
        lines << ", tau = " << fmt(*r.tau_ns) << " ns";
      }
      lines << "\n";
    }
    const json payload{{"transitions", rows}};
    const json units{{"vee", "eV"}, {"mu", "debye"}, {"tau", "ns"},
                     {"f", "dimensionless"}};
    const std::string text_block = lines.str();
    emit(st, out, "optics", units, fingerprints, payload,
         [&](std::ostream& oo) { oo << text_block; });
  });
}

// ---------------------------------------------------------------------------
// zfs

json zfs_units() {
  return json{{"d", "GHz"}, {"e", "GHz"}, {"length", "angstrom"}};
}

json zfs_params_json(const zfs::ZfsParams& p) {
  return json{{"d_ghz", p.d_ghz},
              {"e_ghz", p.e_ghz},
              {"axes", mat3_json(p.axes)},
              {"axes_convention", "columns are the x, y, z principal directions"},
              {"isotropic", p.isotropic}};
}

void print_params(std::ostream& oo, const zfs::ZfsParams& p) {
  oo << "D = " << fmt(p.d_ghz) << " GHz\n";
  oo << "E = " << fmt(p.e_ghz) << " GHz\n";
  if (p.isotropic) oo << "isotropic (principal axes undefined)\n";
}

void add_zfs(CLI::App& root, Settings& st, std::ostream& out) {
  auto* z = root.add_subcommand("zfs", "Zero-field splitting");
  z->require_subcommand(1);

  {
    struct Opts {
      std::string tensor_path;
    };
    auto o = std::make_shared<Opts>();
    auto* cmd = z->add_subcommand("params", "Canonical D and E from a tensor");
    cmd->add_option("--tensor", o->tensor_path, "tensor JSON ({\"tensor_ghz\": 3x3})")
        ->required();
    cmd->callback([&st, &out, o]() {
      json fingerprints = json::object();
      const std::string text = read_input(o->tensor_path, fingerprints, "tensor");
      const zfs::ZfsTensor t = io::parse_tensor_json(text, o->tensor_path);
      const zfs::ZfsParams p = zfs::principal_params(t);
      const zfs::TripletLevels lv = zfs::triplet_levels(p.d_ghz, p.e_ghz);
      json payload = zfs_params_json(p);
      payload["transitions_ghz"] = json::array({lv.transitions_ghz[0], lv.transitions_ghz[1]});
      emit(st, out, "zfs", zfs_units(), fingerprints, payload,
           [&](std::ostream& oo) { print_params(oo, p); });
    });
  }

  {
    struct Opts {
      double d = 0.0;
      double e = 0.0;
    };
    auto o = std::make_shared<Opts>();
    auto* cmd = z->add_subcommand("levels", "Triplet eigenvalues and transitions");
    cmd->add_option("--d", o->d, "D, GHz")->required();
    cmd->add_option("--e", o->e, "E, GHz");
    cmd->callback([&st, &out, o]() {
      const zfs::TripletLevels lv = zfs::triplet_levels(o->d, o->e);
      const json payload{
          {"d_ghz", o->d},
          {"e_ghz", o->e},
          {"eigenvalues_ghz",
           json::array({lv.eigenvalues_ghz[0], lv.eigenvalues_ghz[1], lv.eigenvalues_ghz[2]})},
          {"transitions_ghz", json::array({lv.transitions_ghz[0], lv.transitions_ghz[1]})}};
      emit(st, out, "zfs", zfs_units(), json::object(), payload, [&](std::ostream& oo) {
        oo << "levels (GHz) = " << fmt(lv.eigenvalues_ghz[0]) << " "
           << fmt(lv.eigenvalues_ghz[1]) << " " << fmt(lv.eigenvalues_ghz[2]) << "\n";
        oo << "transitions (GHz) = " << fmt(lv.transitions_ghz[0]) << " "
           << fmt(lv.transitions_ghz[1]) << "\n";
      });
    });
  }

  {
    struct Opts {
      std::string sites_path;
    };
    auto o = std::make_shared<Opts>();
    auto* cmd = z->add_subcommand("dipolar", "Point-spin dipolar tensor");
    cmd->add_option("--sites", o->sites_path, "spin sites JSON")->required();
    cmd->callback([&st, &out, o]() {
      json fingerprints = json::object();
      const std::string text = read_input(o->sites_path, fingerprints, "sites");
      const zfs::SpinSiteModel model = io::parse_spinsites_json(text, o->sites_path);
      const zfs::ZfsTensor t = zfs::point_dipole_tensor(model, st.threads());
      const zfs::ZfsParams p = zfs::principal_params(t);
      json payload = zfs_params_json(p);
      payload["tensor_ghz"] = mat3_json(t.matrix);
      payload["prefactor_ghz_angstrom3"] =
          zfs::dipolar_prefactor_ghz_angstrom3(model.g_factor);
      emit(st, out, "zfs", zfs_units(), fingerprints, payload,
           [&](std::ostream& oo) { print_params(oo, p); });
    });
  }
}

// ---------------------------------------------------------------------------
// corrections

json corr_units() {
  return json{{"energy", "eV"},
              {"length", "angstrom"},
              {"dipole", "e*angstrom"},
              {"quadrupole", "e*angstrom^2"}};
}

void add_corr(CLI::App& root, Settings& st, std::ostream& out) {
  auto* corr = root.add_subcommand("corr", "Finite-size energy corrections");
  corr->require_subcommand(1);

  {
    struct Opts {
      double q = 0.0;
      double l = 0.0;
      double eps_r = defaults::dielectric_constant;
      CLI::Option* eps_opt = nullptr;
      double alpha = constants::madelung_simple_cubic;
      CLI::Option* alpha_opt = nullptr;
    };
    auto o = std::make_shared<Opts>();
    auto* cmd = corr->add_subcommand("mm", "Monopole image correction");
    cmd->add_option("--q", o->q, "defect charge, e")->required();
    cmd->add_option("--L", o->l, "cubic cell edge, angstrom")->required();
    o->eps_opt = cmd->add_option("--eps-r,--eps", o->eps_r, "relative permittivity");
    o->alpha_opt = cmd->add_option("--alpha", o->alpha, "Madelung constant");
    cmd->callback([&st, &out, o]() {
      corr::DielectricModel diel;
      diel.eps_r = st.number(o->eps_opt, o->eps_r, "eps_r", defaults::dielectric_constant);
      const double alpha =
          st.number(o->alpha_opt, o->alpha, "alpha", constants::madelung_simple_cubic);
      const double e_mm = corr::madelung_mm(o->q, o->l, diel, alpha);
      const json payload{{"q", o->q},
                         {"l_angstrom", o->l},
                         {"eps_r", diel.eps_r},
                         {"alpha", alpha},
                         {"e_mm_ev", e_mm}};
      emit(st, out, "corr", corr_units(), json::object(), payload,
           [&](std::ostream& oo) { oo << "E_MM = " << fmt(e_mm) << " eV\n"; });
    });
  }

  {
    struct Opts {
      std::string grid_path;
      std::string origin;
      bool frac = false;
    };
    auto o = std::make_shared<Opts>();
    auto* cmd = corr->add_subcommand("moments", "Density moments about an origin");
    cmd->add_option("--grid", o->grid_path, "charge-density grid")->required();
    cmd->add_option("--origin", o->origin, "origin x,y,z (angstrom, or fractional with --frac)")
        ->required();
    cmd->add_flag("--frac", o->frac, "origin is fractional");
    cmd->callback([&st, &out, o]() {
      json fingerprints = json::object();
      const VolumetricGrid g = load_grid(o->grid_path, fingerprints, "grid");
      Vec3 origin = parse_vec3_flag(o->origin, "--origin");
      if (o->frac) origin = g.cell.to_cartesian(origin);
      const int threads = st.threads();
      const double quad = corr::quadrupole_moment(g, origin, threads);
      const Vec3 mu = corr::dipole_moment(g, origin, threads);
      const json payload{{"origin_angstrom", vec3_json(origin)},
                         {"quadrupole_e_angstrom2", quad},
                         {"dipole_e_angstrom", vec3_json(mu)},
                         {"dipole_magnitude_e_angstrom", mu.norm()}};
      emit(st, out, "corr", corr_units(), fingerprints, payload,
           [&](std::ostream& oo) {
             oo << "quadrupole = " << fmt(quad) << " e*angstrom^2\n";
             oo << "dipole = " << vec3_text(mu) << " e*angstrom\n";
           });
    });
  }

  {
    struct Opts {
      double e_raw = 0.0;
      double q = 0.0;
      double l = 0.0;
      double eps_r = defaults::dielectric_constant;
      CLI::Option* eps_opt = nullptr;
      double alpha = constants::madelung_simple_cubic;
      CLI::Option* alpha_opt = nullptr;
      double delta_quad = 0.0;
      CLI::Option* dq_opt = nullptr;
      std::string mu;
    };
    auto o = std::make_shared<Opts>();
    auto* cmd = corr->add_subcommand("apply", "Corrected total energy");
    cmd->add_option("--e-raw", o->e_raw, "uncorrected energy, eV")->required();
    cmd->add_option("--q", o->q, "defect charge, e")->required();
    cmd->add_option("--L", o->l, "cubic cell edge, angstrom")->required();
    o->eps_opt = cmd->add_option("--eps-r,--eps", o->eps_r, "relative permittivity");
    o->alpha_opt = cmd->add_option("--alpha", o->alpha, "Madelung constant");
    o->dq_opt = cmd->add_option("--delta-quad", o->delta_quad,
                                "Q(charged) - Q(neutral), e*angstrom^2");
    cmd->add_option("--mu", o->mu, "cell dipole x,y,z (e*angstrom, neutral cells)");
    cmd->callback([&st, &out, o]() {
      corr::DielectricModel diel;
      diel.eps_r = st.number(o->eps_opt, o->eps_r, "eps_r", defaults::dielectric_constant);
      const double alpha =
          st.number(o->alpha_opt, o->alpha, "alpha", constants::madelung_simple_cubic);
      std::optional<double> dq;
      if (o->dq_opt->count() > 0) dq = o->delta_quad;
      std::optional<Vec3> mu;
      if (!o->mu.empty()) mu = parse_vec3_flag(o->mu, "--mu");
      const corr::CorrectionReport r =
          corr::corrected_energy(o->e_raw, o->q, o->l, diel, dq, mu, alpha);
      const json payload{{"e_raw_ev", r.e_raw_ev},   {"q", r.q},
                         {"l_angstrom", r.l_angstrom}, {"eps_r", r.eps_r},
                         {"alpha", r.alpha},           {"e_mm_ev", r.e_mm_ev},
                         {"e_mq_ev", r.e_mq_ev},       {"e_dd_ev", r.e_dd_ev},
                         {"e_corrected_ev", r.e_corrected_ev}};
      emit(st, out, "corr", corr_units(), json::object(), payload,
           [&](std::ostream& oo) {
             oo << "E_MM = " << fmt(r.e_mm_ev) << " eV\n";
             oo << "E_MQ = " << fmt(r.e_mq_ev) << " eV\n";
             oo << "E_DD = " << fmt(r.e_dd_ev) << " eV\n";
             oo << "E_corrected = " << fmt(r.e_corrected_ev) << " eV\n";
           });
    });
  }
}

// ---------------------------------------------------------------------------
// thermo

json thermo_units() { return json{{"energy", "eV"}}; }

void add_thermo(CLI::App& root, Settings& st, std::ostream& out) {
  auto* th = root.add_subcommand("thermo", "Reaction energies and charge levels");
  th->require_subcommand(1);

  {
    struct Opts {
      std::string ledger_path;
      std::string reaction_path;
    };
    auto o = std::make_shared<Opts>();
    auto* cmd = th->add_subcommand("react", "Balanced reaction energy");
    cmd->add_option("--ledger", o->ledger_path, "species ledger JSON")->required();
    cmd->add_option("--reaction", o->reaction_path, "reaction JSON")->required();
    cmd->callback([&st, &out, o]() {
      json fingerprints = json::object();
      const std::string ledger_text = read_input(o->ledger_path, fingerprints, "ledger");
      const std::string rxn_text = read_input(o->reaction_path, fingerprints, "reaction");
      const thermo::EnergyLedger ledger = io::parse_ledger_json(ledger_text, o->ledger_path);
      const thermo::Reaction rxn = io::parse_reaction_json(rxn_text, o->reaction_path);
      thermo::validate_reaction(ledger, rxn);
      const double energy = thermo::reaction_energy(ledger, rxn);
      const auto terms_json = [](const std::vector<thermo::Term>& terms) {
        json arr = json::array();
        for (const auto& t : terms) {
          arr.push_back(json{{"label", t.label}, {"coefficient", t.coefficient}});
        }
        return arr;
      };
      const json payload{{"energy_ev", energy},
                         {"balanced", true},
                         {"lhs", terms_json(rxn.lhs)},
                         {"rhs", terms_json(rxn.rhs)}};
      emit(st, out, "thermo", thermo_units(), fingerprints, payload,
           [&](std::ostream& oo) {
             oo << "reaction energy = " << fmt(energy) << " eV\n";
           });
    });
  }

  {
    struct Opts {
      double delta_e_ct = 0.0;
      double anchor = thermo::default_ladder_anchor_ev;
      CLI::Option* anchor_opt = nullptr;
      double e_gap = defaults::band_gap_ev;
      CLI::Option* gap_opt = nullptr;
    };
    auto o = std::make_shared<Opts>();
    auto* cmd = th->add_subcommand("ladder", "Ionization level from a charge-transfer energy");
    cmd->add_option("--delta-e-ct", o->delta_e_ct, "charge-transfer energy, eV")->required();
    o->anchor_opt = cmd->add_option("--anchor", o->anchor, "ladder anchor, eV");
    o->gap_opt = cmd->add_option("--e-gap", o->e_gap, "band gap, eV");
    cmd->callback([&st, &out, o]() {
      const double anchor =
          st.number(o->anchor_opt, o->anchor, "anchor", thermo::default_ladder_anchor_ev);
      const double gap = st.number(o->gap_opt, o->e_gap, "e_gap", defaults::band_gap_ev);
      const double ie = thermo::ie_ladder(o->delta_e_ct, anchor);
      const double ea = thermo::ea_complement(ie, gap);
      const json payload{{"delta_e_ct_ev", o->delta_e_ct},
                         {"anchor_ev", anchor},
                         {"e_gap_ev", gap},
                         {"ie_plus_cbm_ev", ie},
                         {"ea_minus_vbm_ev", ea}};
      emit(st, out, "thermo", thermo_units(), json::object(), payload,
           [&](std::ostream& oo) {
             oo << "IE + e_CBM = " << fmt(ie) << " eV\n";
             oo << "EA - e_VBM = " << fmt(ea) << " eV\n";
           });
    });
  }

  {
    struct Opts {
      std::string levels_path;
      double anchor = thermo::default_ladder_anchor_ev;
      CLI::Option* anchor_opt = nullptr;
      double e_gap = defaults::band_gap_ev;
      CLI::Option* gap_opt = nullptr;
    };
    auto o = std::make_shared<Opts>();
    auto* cmd = th->add_subcommand("diagram", "Level diagram with viable donor/acceptor pairs");
    cmd->add_option("--levels", o->levels_path, "levels JSON")->required();
    o->anchor_opt = cmd->add_option("--anchor", o->anchor, "ladder anchor, eV");
    o->gap_opt = cmd->add_option("--e-gap", o->e_gap, "band gap, eV");
    cmd->callback([&st, &out, o]() {
      json fingerprints = json::object();
      const std::string text = read_input(o->levels_path, fingerprints, "levels");
      const io::LevelFile file = io::parse_levels_json(text, o->levels_path);
      // Precedence for shared values: flag, then the file, then config, then
      // the built-in default.
      double anchor = st.number(o->anchor_opt, o->anchor, "anchor",
                                file.anchor_ev.value_or(thermo::default_ladder_anchor_ev));
      if (o->anchor_opt->count() == 0 && file.anchor_ev) anchor = *file.anchor_ev;
      double gap = st.number(o->gap_opt, o->e_gap, "e_gap",
                             file.e_gap_ev.value_or(defaults::band_gap_ev));
      if (o->gap_opt->count() == 0 && file.e_gap_ev) gap = *file.e_gap_ev;
      std::vector<std::pair<std::string, double>> ie_levels;
      for (const auto& lv : file.levels) {
        const double ie = lv.is_delta_e_ct ? thermo::ie_ladder(lv.value_ev, anchor)
                                           : lv.value_ev;
        ie_levels.emplace_back(lv.label, ie);
      }
      const thermo::LevelDiagram diagram = thermo::build_level_diagram(ie_levels, gap);
      json levels = json::array();
      for (const auto& lv : diagram.levels) {
        levels.push_back(json{{"label", lv.label},
                              {"ie_plus_cbm_ev", lv.ie_plus_cbm_ev},
                              {"ea_minus_vbm_ev", lv.ea_minus_vbm_ev}});
      }
      json pairs = json::array();
      for (const auto& p : diagram.viable_pairs) {
        pairs.push_back(json{{"donor", p.donor}, {"acceptor", p.acceptor}});
      }
      const json payload{{"e_gap_ev", diagram.e_gap_ev},
                         {"anchor_ev", anchor},
                         {"levels", levels},
                         {"viable_pairs", pairs}};
      emit(st, out, "thermo", thermo_units(), fingerprints, payload,
           [&](std::ostream& oo) {
             for (const auto& lv : diagram.levels) {
               oo << lv.label << ": IE + e_CBM = " << fmt(lv.ie_plus_cbm_ev)
                  << " eV, EA - e_VBM = " << fmt(lv.ea_minus_vbm_ev) << " eV\n";
             }
             for (const auto& p : diagram.viable_pairs) {
               oo << "viable: " << p.donor << " -> " << p.acceptor << "\n";
             }
           });
    });
  }
}

// ---------------------------------------------------------------------------
// embed

json embed_units() {
  return json{{"matrix", "hartree"},
              {"energy", "eV"},
              {"density", "e/angstrom^3"}};
}

std::string matrix_text(const Eigen::MatrixXd& m) {
  std::ostringstream out;
  out << m.rows() << "\n";
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      out << (c == 0 ? "" : " ") << fmt(m(r, c));
    }
    out << "\n";
  }
  return out.str();
}

void add_embed(CLI::App& root, Settings& st, std::ostream& out) {
  auto* em = root.add_subcommand("embed", "Embedding projections and diagnostics");
  em->require_subcommand(1);

  {
    struct Opts {
      std::string potential_path;
      std::string basis_path;
      std::string structure_path;
      bool wrap = false;
      std::string matrix_out;
    };
    auto o = std::make_shared<Opts>();
    auto* cmd = em->add_subcommand("project", "Potential matrix in an atom-centered basis");
    cmd->add_option("--potential", o->potential_path, "potential grid, hartree")->required();
    cmd->add_option("--basis", o->basis_path, "basis library file")->required();
    cmd->add_option("--structure", o->structure_path, "atoms carrying the basis")->required();
    cmd->add_flag("--wrap", o->wrap, "minimum-image tails instead of boundary errors");
    cmd->add_option("--matrix-out", o->matrix_out, "write the matrix as text");
    cmd->callback([&st, &out, o]() {
      json fingerprints = json::object();
      const VolumetricGrid v = load_grid(o->potential_path, fingerprints, "potential");
      const std::string basis_text = read_input(o->basis_path, fingerprints, "basis");
      const io::BasisLibrary lib = io::parse_basis(basis_text, o->basis_path);
      const Structure s = load_structure(o->structure_path, fingerprints, "structure");
      const embed::BasisSet basis = io::make_basis(s, lib);
      embed::ProjectOptions opts;
      opts.threads = st.threads();
      opts.eval.wrap = o->wrap;
      const embed::EmbeddingMatrix m = embed::project_potential(v, basis, opts);
      const std::string mtext = matrix_text(m.values);
      if (!o->matrix_out.empty()) io::write_file(o->matrix_out, mtext);
      json matrix = json::array();
      for (Eigen::Index r = 0; r < m.values.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.values.cols(); ++c) row.push_back(m.values(r, c));
        matrix.push_back(row);
      }
      json payload{{"n", basis.size()},
                   {"matrix_hartree", matrix},
                   {"basis_fingerprint", m.basis_fingerprint},
                   {"grid_fingerprint", m.grid_fingerprint}};
      if (!o->matrix_out.empty()) payload["matrix_path"] = o->matrix_out;
      emit(st, out, "embed", embed_units(), fingerprints, payload,
           [&](std::ostream& oo) { oo << mtext; });
    });
  }

  {
    struct Opts {
      std::string cl, env, caps, full;
      std::string residual_out;
    };
    auto o = std::make_shared<Opts>();
    auto* cmd = em->add_subcommand("residual", "Density-matching residual of a partition");
    cmd->add_option("--cl", o->cl, "cluster density grid")->required();
    cmd->add_option("--env", o->env, "environment density grid")->required();
    cmd->add_option("--caps", o->caps, "caps density grid")->required();
    cmd->add_option("--full", o->full, "full-system density grid")->required();
    cmd->add_option("--residual-out", o->residual_out, "write the residual grid");
    cmd->callback([&st, &out, o]() {
      json fingerprints = json::object();
      const VolumetricGrid cl = load_grid(o->cl, fingerprints, "cl");
      const VolumetricGrid env = load_grid(o->env, fingerprints, "env");
      const VolumetricGrid caps = load_grid(o->caps, fingerprints, "caps");
      const VolumetricGrid full = load_grid(o->full, fingerprints, "full");
      const embed::ResidualReport r =
          embed::density_residual(cl, env, caps, full, st.threads());
      if (!o->residual_out.empty()) {
        io::write_file(o->residual_out, io::write_simple_grid(r.residual));
      }
      json payload{{"l1_e", r.l1},
                   {"linf_e_per_angstrom3", r.linf},
                   {"integrated_e", r.integrated}};
      if (!o->residual_out.empty()) payload["residual_path"] = o->residual_out;
      emit(st, out, "embed", embed_units(), fingerprints, payload,
           [&](std::ostream& oo) {
             oo << "residual L1 = " << fmt(r.l1) << " e\n";
             oo << "residual Linf = " << fmt(r.linf) << " e/angstrom^3\n";
             oo << "residual integral = " << fmt(r.integrated) << " e\n";
           });
    });
  }

  {
    struct Opts {
      double e_cl = 0.0;
      double e_env = 0.0;
      std::string potential_path;
      std::string full, caps;
    };
    auto o = std::make_shared<Opts>();
    auto* cmd = em->add_subcommand("wuyang", "Partition functional value");
    cmd->add_option("--e-cl", o->e_cl, "cluster energy, eV")->required();
    cmd->add_option("--e-env", o->e_env, "environment energy, eV")->required();
    cmd->add_option("--potential", o->potential_path, "potential grid, hartree")->required();
    cmd->add_option("--full", o->full, "full-system density grid")->required();
    cmd->add_option("--caps", o->caps, "caps density grid")->required();
    cmd->callback([&st, &out, o]() {
      json fingerprints = json::object();
      const VolumetricGrid v = load_grid(o->potential_path, fingerprints, "potential");
      const VolumetricGrid full = load_grid(o->full, fingerprints, "full");
      const VolumetricGrid caps = load_grid(o->caps, fingerprints, "caps");
      const double w = embed::wu_yang_value(o->e_cl, o->e_env, v, full, caps, st.threads());
      const json payload{{"e_cl_ev", o->e_cl}, {"e_env_ev", o->e_env}, {"w_ev", w}};
      emit(st, out, "embed", embed_units(), fingerprints, payload,
           [&](std::ostream& oo) { oo << "W = " << fmt(w) << " eV\n"; });
    });
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Defect bookkeeping toolkit: lattices, symmetry, optics, spin, corrections"};
  app.name("facet");
  app.require_subcommand(1);
  app.set_version_flag("--version", "facet 0.1.0");

  Settings st;
  st.config_opt = app.add_option("--config", st.config_path,
                                 "key = value config file (or FACET_CONFIG)");
  app.add_option("--format", st.format, "output format")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();
  st.threads_opt =
      app.add_option("--threads", st.threads_flag, "worker threads")->check(CLI::PositiveNumber);

  add_lattice(app, st, out);
  add_sym(app, st, out);
  add_optics(app, st, out);
  add_zfs(app, st, out);
  add_corr(app, st, out);
  add_thermo(app, st, out);
  add_embed(app, st, out);

  std::vector<std::string> argv{"facet"};
  argv.insert(argv.end(), args.begin(), args.end());
  std::vector<const char*> argp;
  argp.reserve(argv.size());
  for (const auto& a : argv) argp.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argp.size()), argp.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  } catch (const parse_error& e) {
    err << e.what() << "\n";
    return 2;
  } catch (const domain_error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace facet::cli
