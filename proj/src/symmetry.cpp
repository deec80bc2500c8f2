#include "facet/symmetry.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <sstream>

namespace facet::sym {

namespace {

std::string fold(std::string_view s) {
  std::string out;
  for (char c : s) out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  return out;
}

Mat3 rotation(const Vec3& axis, double degrees) {
  return Eigen::AngleAxisd(degrees * std::numbers::pi / 180.0, axis.normalized())
      .toRotationMatrix();
}

Mat3 reflection(const Vec3& normal) {
  const Vec3 n = normal.normalized();
  return Mat3::Identity() - 2.0 * (n * n.transpose());
}

SymOp op(const Mat3& m, std::string label) { return {m, std::move(label)}; }

// The embedded tables, in the same plain-text format accepted as override
// input (group name; class header; one row per irrep).
constexpr const char* kEmbeddedTables = R"(
C1
E
A 1

Cs
E sh
A'  1  1
A'' 1 -1

C2
E C2
A 1  1
B 1 -1

C2v
E C2 sv sv'
A1 1  1  1  1
A2 1  1 -1 -1
B1 1 -1  1 -1
B2 1 -1 -1  1

C3v
E 2C3 3sv
A1 1  1  1
A2 1  1 -1
E  2 -1  0

D3d
E 2C3 3C2 i 2S6 3sd
A1g 1  1  1  1  1  1
A2g 1  1 -1  1  1 -1
Eg  2 -1  0  2 -1  0
A1u 1  1  1 -1 -1 -1
A2u 1  1 -1 -1 -1  1
Eu  2 -1  0 -2  1  0

Td
E 8C3 3C2 6S4 6sd
A1 1  1  1  1  1
A2 1  1  1 -1 -1
E  2 -1  2  0  0
T1 3  0 -1  1 -1
T2 3  0 -1 -1  1
)";

std::vector<SymOp> build_ops(const std::string& name) {
  const Vec3 x(1, 0, 0), y(0, 1, 0), z(0, 0, 1);
  std::vector<SymOp> ops;
  ops.push_back(op(Mat3::Identity(), "E"));

  if (name == "C1") return ops;
  if (name == "Cs") {
    ops.push_back(op(reflection(z), "sh"));
    return ops;
  }
  if (name == "C2") {
    ops.push_back(op(rotation(z, 180), "C2"));
    return ops;
  }
  if (name == "C2v") {
    ops.push_back(op(rotation(z, 180), "C2"));
    ops.push_back(op(reflection(y), "sv"));    // xz plane
    ops.push_back(op(reflection(x), "sv'"));   // yz plane
    return ops;
  }
  if (name == "C3v") {
    ops.push_back(op(rotation(z, 120), "C3"));
    ops.push_back(op(rotation(z, 240), "C3"));
    for (double az : {0.0, 120.0, 240.0})
      ops.push_back(op(reflection(rotation(z, az) * y), "sv"));
    return ops;
  }
  if (name == "D3d") {
    ops.push_back(op(rotation(z, 120), "C3"));
    ops.push_back(op(rotation(z, 240), "C3"));
    for (double az : {0.0, 120.0, 240.0})
      ops.push_back(op(rotation(rotation(z, az) * x, 180), "C2"));
    ops.push_back(op(-Mat3::Identity(), "i"));
    ops.push_back(op(reflection(z) * rotation(z, 60), "S6"));
    ops.push_back(op(reflection(z) * rotation(z, 300), "S6"));
    for (double az : {0.0, 120.0, 240.0})
      ops.push_back(op(reflection(rotation(z, az) * x), "sd"));
    return ops;
  }
  if (name == "Td") {
    // All signed permutation matrices whose sign pattern has an even number
    // of minus signs map the reference tetrahedron to itself.
    const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                             {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    ops.clear();
    for (const auto& perm : perms)
      for (int sx : {1, -1})
        for (int sy : {1, -1})
          for (int sz : {1, -1}) {
            if (sx * sy * sz != 1) continue;
            Mat3 m = Mat3::Zero();
            const int sign[3] = {sx, sy, sz};
            for (int r = 0; r < 3; ++r) m(r, perm[r]) = sign[r];
            const double det = m.determinant();
            const double tr = m.trace();
            std::string label;
            if (det > 0) {
              label = tr > 2.5 ? "E" : (std::abs(tr) < 0.5 ? "C3" : "C2");
            } else {
              label = tr < -0.5 ? "S4" : "sd";
            }
            ops.push_back(op(m, label));
          }
    // Identity first, then a stable class-grouped order.
    std::stable_sort(ops.begin(), ops.end(), [](const SymOp& a, const SymOp& b) {
      auto rank = [](const std::string& l) {
        if (l == "E") return 0;
        if (l == "C3") return 1;
        if (l == "C2") return 2;
        if (l == "S4") return 3;
        return 4;
      };
      return rank(a.class_label) < rank(b.class_label);
    });
    return ops;
  }
  throw domain_error("unknown point group: '" + name + "'");
}

}  // namespace

int CharacterTable::order() const {
  int n = 0;
  for (const auto& c : classes) n += c.size;
  return n;
}

std::size_t CharacterTable::class_index(const std::string& label) const {
  for (std::size_t i = 0; i < classes.size(); ++i)
    if (classes[i].label == label) return i;
  throw domain_error("group " + group + " has no class '" + label + "'");
}

std::size_t CharacterTable::irrep_index(const std::string& name) const {
  const std::string want = fold(name);
  for (std::size_t i = 0; i < irreps.size(); ++i)
    if (fold(irreps[i].name) == want) return i;
  throw domain_error("group " + group + " has no irrep '" + name + "'");
}

double CharacterTable::character(const std::string& irrep, const std::string& cls) const {
  return irreps[irrep_index(irrep)].characters[class_index(cls)];
}

int CharacterTable::dimension(const std::string& irrep) const {
  return static_cast<int>(std::lround(character(irrep, "E")));
}

const std::string& CharacterTable::identity_irrep() const {
  for (const auto& row : irreps) {
    bool all_one = true;
    for (double c : row.characters)
      if (std::abs(c - 1.0) > 1e-12) all_one = false;
    if (all_one) return row.name;
  }
  throw domain_error("group " + group + " table has no totally symmetric irrep");
}

PointGroup PointGroup::oriented(const Mat3& frame) const {
  if ((frame.transpose() * frame - Mat3::Identity()).cwiseAbs().maxCoeff() > 1e-8)
    throw domain_error("orientation frame must be orthogonal");
  PointGroup out = *this;
  for (auto& o : out.ops) o.matrix = frame * o.matrix * frame.transpose();
  return out;
}

std::vector<CharacterTable> parse_character_tables(const std::string& text,
                                                   const std::string& source) {
  std::vector<CharacterTable> tables;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;

  CharacterTable current;
  int stage = 0;  // 0 = awaiting name, 1 = awaiting classes, 2 = irrep rows
  auto flush = [&] {
    if (stage == 1)
      throw parse_error(source, lineno, 1,
                        "character table '" + current.group + "' has no class row");
    if (stage == 2) {
      if (current.irreps.empty())
        throw parse_error(source, lineno, 1,
                          "character table '" + current.group + "' has no irrep rows");
      tables.push_back(current);
    }
    current = {};
    stage = 0;
  };

  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::vector<std::string> tokens;
    for (std::string t; ls >> t;) tokens.push_back(t);
    if (tokens.empty()) {
      flush();
      continue;
    }
    if (stage == 0) {
      if (tokens.size() != 1)
        throw parse_error(source, lineno, 1, "expected a lone group name");
      current.group = tokens[0];
      stage = 1;
    } else if (stage == 1) {
      for (const auto& t : tokens) {
        std::size_t i = 0;
        while (i < t.size() && std::isdigit(static_cast<unsigned char>(t[i]))) ++i;
        if (i == t.size())
          throw parse_error(source, lineno, 1, "class token '" + t + "' has no label");
        CharacterTable::ClassInfo ci;
        ci.size = i == 0 ? 1 : std::stoi(t.substr(0, i));
        ci.label = t.substr(i);
        if (ci.size < 1)
          throw parse_error(source, lineno, 1, "class '" + t + "' has size < 1");
        current.classes.push_back(ci);
      }
      stage = 2;
    } else {
      CharacterTable::IrrepRow row;
      row.name = tokens[0];
      for (std::size_t i = 1; i < tokens.size(); ++i) {
        try {
          std::size_t used = 0;
          row.characters.push_back(std::stod(tokens[i], &used));
          if (used != tokens[i].size()) throw std::invalid_argument("trailing text");
        } catch (const std::exception&) {
          throw parse_error(source, lineno, 1,
                            "bad character value '" + tokens[i] + "'");
        }
      }
      if (row.characters.size() != current.classes.size())
        throw parse_error(source, lineno, 1,
                          "irrep '" + row.name + "' has " +
                              std::to_string(row.characters.size()) +
                              " characters for " +
                              std::to_string(current.classes.size()) + " classes");
      current.irreps.push_back(row);
    }
  }
  ++lineno;
  flush();
  if (tables.empty()) throw parse_error(source, 1, 1, "no character tables found");
  return tables;
}

PointGroup with_table_override(PointGroup g, const CharacterTable& table) {
  if (fold(table.group) != fold(g.name))
    throw domain_error("table override is for group '" + table.group +
                       "', not '" + g.name + "'");
  if (table.order() != g.order())
    throw domain_error("table order " + std::to_string(table.order()) +
                       " does not match group order " + std::to_string(g.order()));
  for (const auto& o : g.ops) {
    const auto idx = table.class_index(o.class_label);  // throws when missing
    (void)idx;
  }
  for (const auto& c : table.classes) {
    int n = 0;
    for (const auto& o : g.ops)
      if (o.class_label == c.label) ++n;
    if (n != c.size)
      throw domain_error("class '" + c.label + "' size " + std::to_string(c.size) +
                         " does not match " + std::to_string(n) + " operations");
  }
  g.table = table;
  return g;
}

PointGroup make_point_group(const std::string& name) {
  static const std::vector<CharacterTable> tables =
      parse_character_tables(kEmbeddedTables, "<embedded character tables>");
  for (const auto& t : tables) {
    if (fold(t.group) != fold(name)) continue;
    PointGroup g;
    g.name = t.group;
    g.table = t;
    g.ops = build_ops(t.group);
    if (static_cast<int>(g.ops.size()) != t.order())
      throw domain_error("internal: operation count mismatch for " + t.group);
    return g;
  }
  throw domain_error("unknown point group: '" + name + "'");
}

std::vector<std::string> known_group_names() {
  return {"C1", "Cs", "C2", "C2v", "C3v", "D3d", "Td"};
}

// ---------------------------------------------------------------------------
// irrep algebra

std::string ProductResult::str() const {
  std::string out;
  for (std::size_t i = 0; i < irreps.size(); ++i) {
    if (i) out += "+";
    out += irreps[i];
  }
  return out;
}

ProductResult irrep_product(const std::string& a, const std::string& b,
                            const PointGroup& g) {
  const auto& table = g.table;
  const auto& ra = table.irreps[table.irrep_index(a)];
  const auto& rb = table.irreps[table.irrep_index(b)];

  std::vector<double> prod(table.classes.size());
  for (std::size_t c = 0; c < prod.size(); ++c)
    prod[c] = ra.characters[c] * rb.characters[c];

  // n_irrep = (1/|G|) sum_classes size * chi_prod * chi_irrep (real tables).
  ProductResult result;
  const double order = table.order();
  for (const auto& row : table.irreps) {
    double acc = 0.0;
    for (std::size_t c = 0; c < prod.size(); ++c)
      acc += table.classes[c].size * prod[c] * row.characters[c];
    const long n = std::lround(acc / order);
    if (std::abs(acc / order - n) > 1e-9)
      throw domain_error("character product of " + a + " and " + b +
                         " does not decompose over " + g.name);
    for (long k = 0; k < n; ++k) result.irreps.push_back(row.name);
  }
  result.reducible = result.irreps.size() > 1;
  return result;
}

std::string StateLabel::str() const {
  std::string body;
  for (std::size_t i = 0; i < irreps.size(); ++i) {
    if (i) body += "+";
    body += irreps[i];
  }
  if (reducible) body = "(" + body + ")";
  return std::to_string(multiplicity) + body;
}

StateLabel assign_state_irrep(const ElectronConfiguration& cfg, const PointGroup& g) {
  int open = 0;
  std::vector<std::string> open_irreps;
  for (const auto& orb : cfg.orbitals) {
    if (orb.occupation < 0 || orb.occupation > 2)
      throw domain_error("orbital '" + orb.label + "' has occupation " +
                         std::to_string(orb.occupation));
    if (orb.occupation == 1) {
      ++open;
      open_irreps.push_back(orb.irrep);
    }
  }
  const double twice_s = 2.0 * cfg.spin;
  const long twice_s_int = std::lround(twice_s);
  if (std::abs(twice_s - twice_s_int) > 1e-9 || twice_s_int < 0)
    throw domain_error("total spin must be a non-negative multiple of 1/2");
  if (twice_s_int > open || (open - twice_s_int) % 2 != 0)
    throw domain_error("spin " + std::to_string(cfg.spin) + " is inconsistent with " +
                       std::to_string(open) + " singly occupied orbitals");

  StateLabel label;
  label.multiplicity = static_cast<int>(twice_s_int) + 1;
  ProductResult acc;
  acc.irreps = {g.table.identity_irrep()};
  for (const auto& ir : open_irreps) {
    if (acc.reducible)
      throw domain_error(
          "state label with more than one degenerate open shell requires "
          "component-resolved coupling, which this table algebra does not do");
    acc = irrep_product(acc.irreps[0], ir, g);
  }
  label.irreps = acc.irreps;
  label.reducible = acc.reducible;
  return label;
}

}  // namespace facet::sym
