#include "facet/io.hpp"

#include <cmath>
#include <utility>

namespace facet::io {

namespace {

std::pair<int, int> line_col_from_offset(std::string_view text, std::size_t byte) {
  int line = 1, col = 1;
  const std::size_t end = std::min(byte, text.size());
  for (std::size_t i = 0; i < end; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

// Schema-validation view over a parsed JSON tree.  Carries the JSON-pointer
// path so every violation names the exact node.
class JsonView {
 public:
  JsonView(const json& node, std::string path, const std::string& source)
      : node_(&node), path_(std::move(path)), source_(source) {}

  const json& raw() const { return *node_; }
  const std::string& path() const { return path_.empty() ? kRoot : path_; }

  [[noreturn]] void fail(const std::string& message) const {
    throw parse_error(source_, 1, 1, "at " + path() + ": " + message);
  }

  JsonView at(const char* key) const {
    require_object();
    const auto it = node_->find(key);
    if (it == node_->end()) fail(std::string("missing required key '") + key + "'");
    return JsonView(*it, path_ + "/" + key, source_);
  }

  std::optional<JsonView> opt(const char* key) const {
    require_object();
    const auto it = node_->find(key);
    if (it == node_->end()) return std::nullopt;
    return JsonView(*it, path_ + "/" + key, source_);
  }

  void require_object() const {
    if (!node_->is_object()) fail("expected an object");
  }
  void require_array() const {
    if (!node_->is_array()) fail("expected an array");
  }

  std::size_t size() const {
    require_array();
    return node_->size();
  }

  JsonView item(std::size_t i) const {
    require_array();
    return JsonView((*node_)[i], path_ + "/" + std::to_string(i), source_);
  }

  double number() const {
    if (!node_->is_number()) fail("expected a number");
    const double v = node_->get<double>();
    if (!std::isfinite(v)) fail("expected a finite number");
    return v;
  }

  int integer() const {
    if (!node_->is_number_integer()) fail("expected an integer");
    const auto v = node_->get<long long>();
    if (v < -1'000'000'000 || v > 1'000'000'000) fail("integer out of range");
    return static_cast<int>(v);
  }

  std::string string() const {
    if (!node_->is_string()) fail("expected a string");
    return node_->get<std::string>();
  }

  bool boolean() const {
    if (!node_->is_boolean()) fail("expected a boolean");
    return node_->get<bool>();
  }

  Vec3 vec3() const {
    require_array();
    if (node_->size() != 3) fail("expected exactly 3 components");
    Vec3 v;
    for (std::size_t k = 0; k < 3; ++k) v[static_cast<int>(k)] = item(k).number();
    return v;
  }

  // Keys of an object in sorted order (nlohmann's natural order).
  template <typename Fn>
  void for_each_key(Fn&& fn) const {
    require_object();
    for (auto it = node_->begin(); it != node_->end(); ++it)
      fn(it.key(), JsonView(it.value(), path_ + "/" + it.key(), source_));
  }

 private:
  static inline const std::string kRoot = "/";
  const json* node_;
  std::string path_;
  const std::string& source_;
};

}  // namespace

json parse_json_text(std::string_view text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_col_from_offset(text, e.byte ? e.byte - 1 : 0);
    std::string what = e.what();
    // Strip nlohmann's "[json.exception...] " prefix; keep the useful tail.
    const auto cut = what.find("] ");
    if (cut != std::string::npos) what = what.substr(cut + 2);
    throw parse_error(source, line, col, what);
  }
}

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

json make_report(const std::string& module, json units, json fingerprints,
                 json payload) {
  json report;
  report["tool"] = "facet";
  report["version"] = "0.1.0";
  report["module"] = module;
  report["units"] = std::move(units);
  report["fingerprints"] = std::move(fingerprints);
  report["payload"] = std::move(payload);
  return report;
}

// ---------------------------------------------------------------------------
// schema parsers

thermo::EnergyLedger parse_ledger_json(std::string_view text,
                                       const std::string& source) {
  const json doc = parse_json_text(text, source);
  const JsonView root(doc, "", source);
  thermo::EnergyLedger ledger;

  const JsonView entries = root.at("entries");
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const JsonView e = entries.item(i);
    thermo::LedgerEntry entry;
    entry.label = e.at("label").string();
    const JsonView comp = e.at("composition");
    comp.for_each_key([&](const std::string& key, const JsonView& count) {
      std::string element;
      try {
        element = normalize_species(key);
      } catch (const domain_error&) {
        count.fail("unknown element '" + key + "'");
      }
      entry.composition[element] = count.integer();
    });
    entry.charge = e.at("charge").integer();
    entry.energy_ev = e.at("energy_ev").number();
    if (const auto corrected = e.opt("corrected")) entry.corrected = corrected->boolean();
    try {
      ledger.add(std::move(entry));
    } catch (const domain_error& err) {
      e.fail(err.what());
    }
  }
  return ledger;
}

std::string write_ledger_json(const thermo::EnergyLedger& ledger) {
  json entries = json::array();
  for (const auto& e : ledger.entries()) {
    json comp = json::object();
    for (const auto& [element, count] : e.composition) comp[element] = count;
    entries.push_back({{"label", e.label},
                       {"composition", std::move(comp)},
                       {"charge", e.charge},
                       {"energy_ev", e.energy_ev},
                       {"corrected", e.corrected}});
  }
  return dump_json(json{{"entries", std::move(entries)}});
}

namespace {

std::vector<thermo::Term> parse_terms(const JsonView& side) {
  std::vector<thermo::Term> out;
  for (std::size_t i = 0; i < side.size(); ++i) {
    const JsonView t = side.item(i);
    thermo::Term term;
    term.label = t.at("label").string();
    if (const auto coeff = t.opt("coefficient")) {
      term.coefficient = coeff->integer();
      if (term.coefficient < 1) coeff->fail("coefficient must be >= 1");
    }
    out.push_back(std::move(term));
  }
  return out;
}

}  // namespace

thermo::Reaction parse_reaction_json(std::string_view text,
                                     const std::string& source) {
  const json doc = parse_json_text(text, source);
  const JsonView root(doc, "", source);
  thermo::Reaction rxn;
  rxn.lhs = parse_terms(root.at("lhs"));
  rxn.rhs = parse_terms(root.at("rhs"));
  if (rxn.lhs.empty()) root.at("lhs").fail("reaction side must not be empty");
  if (rxn.rhs.empty()) root.at("rhs").fail("reaction side must not be empty");
  return rxn;
}

std::vector<optics::TransitionRecord> parse_transitions_json(
    std::string_view text, const std::string& source) {
  const json doc = parse_json_text(text, source);
  const JsonView root(doc, "", source);
  std::vector<optics::TransitionRecord> out;

  const JsonView list = root.at("transitions");
  for (std::size_t i = 0; i < list.size(); ++i) {
    const JsonView t = list.item(i);
    optics::TransitionRecord rec;
    if (const auto v = t.opt("label_i")) rec.label_i = v->string();
    if (const auto v = t.opt("label_j")) rec.label_j = v->string();
    rec.vee_ev = t.at("vee_ev").number();

    const auto mu_mag = t.opt("mu_debye");
    const auto mu_vec = t.opt("mu_components_debye");
    if (mu_mag && mu_vec)
      t.fail("give either 'mu_debye' or 'mu_components_debye', not both");
    if (!mu_mag && !mu_vec)
      t.fail("missing dipole: give 'mu_debye' or 'mu_components_debye'");
    if (mu_mag) rec.mu_magnitude_debye = mu_mag->number();
    if (mu_vec) rec.mu_components_debye = mu_vec->vec3();

    if (const auto v = t.opt("g_i")) rec.g_i = v->integer();
    if (const auto v = t.opt("g_j")) rec.g_j = v->integer();
    if (const auto v = t.opt("n_r")) rec.n_r = v->number();
    try {
      rec.validate();
    } catch (const domain_error& err) {
      t.fail(err.what());
    }
    out.push_back(std::move(rec));
  }
  return out;
}

zfs::SpinSiteModel parse_spinsites_json(std::string_view text,
                                        const std::string& source) {
  const json doc = parse_json_text(text, source);
  const JsonView root(doc, "", source);
  zfs::SpinSiteModel model;
  if (const auto g = root.opt("g_factor")) model.g_factor = g->number();

  const JsonView sites = root.at("sites");
  for (std::size_t i = 0; i < sites.size(); ++i) {
    const JsonView s = sites.item(i);
    zfs::SpinSite site;
    site.position = s.at("position_angstrom").vec3();
    site.population = s.at("population").number();
    if (site.population < 0.0) s.at("population").fail("population must be >= 0");
    model.sites.push_back(site);
  }
  try {
    model.validate();
  } catch (const domain_error& err) {
    root.fail(err.what());
  }
  return model;
}

zfs::ZfsTensor parse_tensor_json(std::string_view text, const std::string& source) {
  const json doc = parse_json_text(text, source);
  const JsonView root(doc, "", source);
  const JsonView rows = root.at("tensor_ghz");
  if (rows.size() != 3) rows.fail("expected 3 rows");
  zfs::ZfsTensor t;
  for (std::size_t r = 0; r < 3; ++r) {
    const Vec3 row = rows.item(r).vec3();
    for (int k = 0; k < 3; ++k) t.matrix(static_cast<int>(r), k) = row[k];
  }
  return t;
}

LevelFile parse_levels_json(std::string_view text, const std::string& source) {
  const json doc = parse_json_text(text, source);
  const JsonView root(doc, "", source);
  LevelFile file;
  if (const auto gap = root.opt("e_gap_ev")) file.e_gap_ev = gap->number();
  if (const auto anchor = root.opt("anchor_ev")) file.anchor_ev = anchor->number();

  const JsonView levels = root.at("levels");
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const JsonView l = levels.item(i);
    LevelInput input;
    input.label = l.at("label").string();
    const auto direct = l.opt("ie_plus_cbm_ev");
    const auto delta = l.opt("delta_e_ct_ev");
    if (direct && delta)
      l.fail("give either 'ie_plus_cbm_ev' or 'delta_e_ct_ev', not both");
    if (!direct && !delta)
      l.fail("missing level: give 'ie_plus_cbm_ev' or 'delta_e_ct_ev'");
    input.value_ev = direct ? direct->number() : delta->number();
    input.is_delta_e_ct = static_cast<bool>(delta);
    file.levels.push_back(std::move(input));
  }
  return file;
}

}  // namespace facet::io
