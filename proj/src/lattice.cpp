#include "facet/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace facet::lattice {

namespace {

// Fractional positions of the 8 atoms in the conventional cubic cell.
constexpr double kCubicBasis[8][3] = {
    {0.00, 0.00, 0.00}, {0.00, 0.50, 0.50}, {0.50, 0.00, 0.50}, {0.50, 0.50, 0.00},
    {0.25, 0.25, 0.25}, {0.25, 0.75, 0.75}, {0.75, 0.25, 0.75}, {0.75, 0.75, 0.25}};

void require_positive_counts(int n1, int n2, int n3, double a0) {
  if (n1 < 1 || n2 < 1 || n3 < 1)
    throw domain_error("supercell repeat counts must be >= 1");
  if (!(a0 > 0.0)) throw domain_error("lattice constant must be positive");
}

std::vector<Vec3> cartesian_positions(const Structure& s) {
  std::vector<Vec3> p(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) p[i] = s.cartesian(i);
  return p;
}

// Bonded-neighbor index lists under the minimum image.
std::vector<std::vector<std::size_t>> neighbor_lists(const Structure& s,
                                                     double bond_cutoff) {
  const auto pos = cartesian_positions(s);
  std::vector<std::vector<std::size_t>> nbr(s.size());
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = i + 1; j < s.size(); ++j) {
      if (s.cell.distance(pos[i], pos[j]) <= bond_cutoff) {
        nbr[i].push_back(j);
        nbr[j].push_back(i);
      }
    }
  return nbr;
}

}  // namespace

Structure build_diamond_supercell(int n1, int n2, int n3, double a0) {
  require_positive_counts(n1, n2, n3, a0);
  Structure s;
  s.cell.vectors = Mat3::Zero();
  s.cell.vectors(0, 0) = n1 * a0;
  s.cell.vectors(1, 1) = n2 * a0;
  s.cell.vectors(2, 2) = n3 * a0;
  s.comment = "diamond cubic supercell";
  const int n[3] = {n1, n2, n3};
  int id = 0;
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j)
      for (int k = 0; k < n3; ++k)
        for (const auto& b : kCubicBasis) {
          Vec3 frac((i + b[0]) / n[0], (j + b[1]) / n[1], (k + b[2]) / n[2]);
          s.sites.push_back({id++, "C", frac});
        }
  return s;
}

Structure build_diamond_primitive_supercell(int n1, int n2, int n3, double a0) {
  require_positive_counts(n1, n2, n3, a0);
  Structure s;
  const double h = a0 / 2.0;
  Mat3 prim;
  prim << 0, h, h,
          h, 0, h,
          h, h, 0;
  s.cell.vectors.row(0) = prim.row(0) * n1;
  s.cell.vectors.row(1) = prim.row(1) * n2;
  s.cell.vectors.row(2) = prim.row(2) * n3;
  s.comment = "diamond primitive supercell";
  const int n[3] = {n1, n2, n3};
  int id = 0;
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j)
      for (int k = 0; k < n3; ++k)
        for (double b : {0.0, 0.25}) {
          Vec3 frac((i + b) / n[0], (j + b) / n[1], (k + b) / n[2]);
          s.sites.push_back({id++, "C", frac});
        }
  return s;
}

Structure apply_defects(const Structure& s, const DefectSpec& d) {
  std::set<int> touched;
  std::map<int, const DefectEdit*> by_id;
  for (const auto& e : d.edits) {
    if (!s.index_of(e.site_id)) {
      std::ostringstream os;
      os << "defect edit references unknown site id " << e.site_id;
      throw domain_error(os.str());
    }
    if (!touched.insert(e.site_id).second) {
      std::ostringstream os;
      os << "duplicate defect edit on site id " << e.site_id;
      throw domain_error(os.str());
    }
    by_id[e.site_id] = &e;
  }
  Structure out;
  out.cell = s.cell;
  out.comment = s.comment;
  out.sites.reserve(s.sites.size());
  for (const auto& site : s.sites) {
    auto it = by_id.find(site.id);
    if (it == by_id.end()) {
      out.sites.push_back(site);
      continue;
    }
    if (it->second->kind == DefectEdit::Kind::remove) continue;
    Site edited = site;
    edited.species = normalize_species(it->second->species);
    out.sites.push_back(edited);
  }
  return out;
}

const char* to_string(SiteClass c) {
  switch (c) {
    case SiteClass::unclassified: return "unclassified";
    case SiteClass::four_fold: return "four-fold";
    case SiteClass::dangling_type_i: return "C[3c] type I";
    case SiteClass::dangling_type_ii: return "C[3c] type II";
    case SiteClass::oxygen_adjacent: return "C[nO]";
  }
  return "?";
}

int CoordinationReport::count(SiteClass c) const {
  int n = 0;
  for (const auto& sc : sites)
    if (sc.cls == c) ++n;
  return n;
}

CoordinationReport coordination(const Structure& s, double bond_cutoff,
                                double dangling_pair_cutoff) {
  if (!(bond_cutoff > 0.0)) throw domain_error("bond cutoff must be positive");
  const auto pos = cartesian_positions(s);
  const auto nbr = neighbor_lists(s, bond_cutoff);

  std::vector<bool> is_dangling_carbon(s.size(), false);
  for (std::size_t i = 0; i < s.size(); ++i)
    is_dangling_carbon[i] = s.sites[i].species == "C" && nbr[i].size() == 3;

  CoordinationReport report;
  report.sites.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    SiteClass cls = SiteClass::unclassified;
    if (s.sites[i].species == "C") {
      if (is_dangling_carbon[i]) {
        // Count fellow dangling carbons in second-neighbor range; three or
        // more marks the variant found only around paired vacancies.
        int fellows = 0;
        for (std::size_t j = 0; j < s.size(); ++j)
          if (j != i && is_dangling_carbon[j] &&
              s.cell.distance(pos[i], pos[j]) <= dangling_pair_cutoff)
            ++fellows;
        cls = fellows >= 3 ? SiteClass::dangling_type_ii : SiteClass::dangling_type_i;
      } else if (std::any_of(nbr[i].begin(), nbr[i].end(), [&](std::size_t j) {
                   return s.sites[j].species == "O";
                 })) {
        cls = SiteClass::oxygen_adjacent;
      } else if (nbr[i].size() == 4) {
        cls = SiteClass::four_fold;
      }
    }
    report.sites.push_back({s.sites[i].id, s.sites[i].species,
                            static_cast<int>(nbr[i].size()), cls});
  }
  return report;
}

CarveResult carve_cluster(const Structure& s, const std::vector<int>& selection,
                          double bond_cutoff) {
  if (selection.empty()) throw domain_error("cluster selection is empty");
  std::set<int> core_set;
  for (int id : selection) {
    if (!s.index_of(id)) {
      std::ostringstream os;
      os << "cluster selection references unknown site id " << id;
      throw domain_error(os.str());
    }
    if (!core_set.insert(id).second) {
      std::ostringstream os;
      os << "cluster selection repeats site id " << id;
      throw domain_error(os.str());
    }
  }

  const auto pos = cartesian_positions(s);
  const auto nbr = neighbor_lists(s, bond_cutoff);

  CarveResult result;
  result.core_ids.assign(core_set.begin(), core_set.end());

  std::map<int, std::vector<int>> boundary;  // external id -> core ids
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!core_set.count(s.sites[i].id)) continue;
    for (std::size_t j : nbr[i]) {
      if (core_set.count(s.sites[j].id)) continue;
      boundary[s.sites[j].id].push_back(s.sites[i].id);
    }
  }
  for (auto& [ext, cores] : boundary) {
    std::sort(cores.begin(), cores.end());
    result.boundary.push_back({ext, cores});
  }
  return result;
}

const char* to_string(CapKind k) {
  switch (k) {
    case CapKind::terminal: return "terminal";
    case CapKind::bridging: return "bridging";
    case CapKind::trivalent: return "trivalent";
  }
  return "?";
}

const char* to_string(CapSide s) {
  return s == CapSide::cluster ? "cluster" : "environment";
}

namespace {

std::string format_counts(const std::vector<std::pair<std::string, int>>& counts) {
  std::ostringstream os;
  for (const auto& [el, n] : counts) {
    os << el;
    if (n > 1) os << n;
  }
  return os.str();
}

std::vector<std::pair<std::string, int>> ordered_counts(
    const std::vector<std::pair<std::string, int>>& raw,
    const std::vector<std::string>& order) {
  std::vector<std::pair<std::string, int>> out;
  for (const auto& el : order)
    for (const auto& p : raw)
      if (p.first == el) out.push_back(p);
  for (const auto& p : raw)
    if (std::find(order.begin(), order.end(), p.first) == order.end())
      out.push_back(p);
  return out;
}

}  // namespace

std::vector<std::pair<std::string, int>> CappedCluster::core_composition() const {
  std::vector<std::pair<std::string, int>> counts;
  for (const auto& atom : core) {
    auto it = std::find_if(counts.begin(), counts.end(),
                           [&](const auto& p) { return p.first == atom.species; });
    if (it == counts.end())
      counts.emplace_back(atom.species, 1);
    else
      ++it->second;
  }
  return ordered_counts(counts, {"C"});
}

std::vector<std::pair<std::string, int>> CappedCluster::cap_composition() const {
  std::vector<std::pair<std::string, int>> counts;
  for (const auto& cap : caps) {
    auto it = std::find_if(counts.begin(), counts.end(),
                           [&](const auto& p) { return p.first == cap.element; });
    if (it == counts.end())
      counts.emplace_back(cap.element, 1);
    else
      ++it->second;
  }
  return ordered_counts(counts, {"F", "O", "B"});
}

std::string CappedCluster::formula() const {
  return format_counts(core_composition()) + format_counts(cap_composition());
}

long CappedCluster::cap_electron_count() const {
  long n = 0;
  for (const auto& cap : caps) n += *atomic_number(cap.element);
  return n;
}

CappedCluster cap_cluster(const Structure& s, const CarveResult& carve, CapSide side,
                          std::optional<Vec3> unwrap_center, double bond_cutoff) {
  CappedCluster cluster;
  cluster.side = side;
  if (carve.core_ids.empty()) throw domain_error("cannot cap an empty core");

  // Atoms of this side and the cap anchors.  The cluster keeps the carved
  // core and is capped at the external bond partners; the environment keeps
  // the complement and is capped at the core atoms the boundary bonds reach.
  std::vector<int> side_ids;
  std::map<int, std::vector<int>> cap_bonds;  // cap site id -> bonded side ids
  if (side == CapSide::cluster) {
    side_ids = carve.core_ids;
    for (const auto& b : carve.boundary) cap_bonds[b.external_id] = b.core_ids;
  } else {
    const std::set<int> core(carve.core_ids.begin(), carve.core_ids.end());
    for (const auto& site : s.sites)
      if (core.count(site.id) == 0) side_ids.push_back(site.id);
    std::sort(side_ids.begin(), side_ids.end());
    for (const auto& b : carve.boundary)
      for (int c : b.core_ids) cap_bonds[c].push_back(b.external_id);
  }

  const auto nbr = neighbor_lists(s, bond_cutoff);
  std::map<int, Vec3> placed;
  if (side == CapSide::environment) {
    // The environment model stays periodic; positions are the stored ones.
    for (int id : side_ids) placed[id] = s.cartesian(*s.index_of(id));
  } else {
    // Unwrap the molecule into contiguous Cartesian coordinates by walking
    // its bond graph: every neighbor is placed one minimum-image bond from an
    // atom already placed, so clusters wider than half the cell stay intact.
    // Cap sites join the walk because bridging caps may be the only link
    // between core fragments (the core of a vacancy cluster is disconnected).
    std::set<int> nodes(side_ids.begin(), side_ids.end());
    for (const auto& [ext, bonded] : cap_bonds) nodes.insert(ext);
    const Vec3 anchor = unwrap_center.value_or(
        s.cell.to_cartesian(s.sites[*s.index_of(carve.core_ids.front())].frac));
    std::set<int> todo = nodes;
    while (!todo.empty()) {
      const int root = *todo.begin();
      todo.erase(root);
      const Vec3 root_cart = s.cartesian(*s.index_of(root));
      placed[root] = anchor + s.cell.min_image(root_cart - anchor);
      std::vector<int> queue{root};
      while (!queue.empty()) {
        const int id = queue.back();
        queue.pop_back();
        const auto idx = *s.index_of(id);
        for (std::size_t j : nbr[idx]) {
          const int jid = s.sites[j].id;
          if (todo.count(jid) == 0) continue;
          todo.erase(jid);
          placed[jid] = placed.at(id) + s.cell.min_image(s.cartesian(j) - s.cartesian(idx));
          queue.push_back(jid);
        }
      }
    }
    // A selection that rings the periodic cell cannot be laid out as a
    // molecule: some bond of the cycle has to stretch.
    for (int id : nodes) {
      const auto idx = *s.index_of(id);
      for (std::size_t j : nbr[idx]) {
        const int jid = s.sites[j].id;
        const auto it = placed.find(jid);
        if (it == placed.end() || jid <= id) continue;
        if ((it->second - placed.at(id)).norm() > bond_cutoff + 1e-9) {
          throw domain_error(
              "cluster selection wraps around the periodic cell and cannot be "
              "unwrapped into a molecule");
        }
      }
    }
  }

  for (int id : side_ids) {
    cluster.core.push_back({id, s.sites[*s.index_of(id)].species, placed.at(id)});
  }

  for (auto& [ext, bonded] : cap_bonds) {
    std::sort(bonded.begin(), bonded.end());
    bonded.erase(std::unique(bonded.begin(), bonded.end()), bonded.end());
    const int m = static_cast<int>(bonded.size());
    if (m < 1 || m > 3) {
      std::ostringstream os;
      os << "cap site " << ext << " bonds " << m
         << " atoms; capping handles 1-3 (inconsistent selection)";
      throw domain_error(os.str());
    }
    static const char* kElements[] = {nullptr, "F", "O", "B"};
    static const CapKind kKinds[] = {CapKind::terminal, CapKind::terminal,
                                     CapKind::bridging, CapKind::trivalent};
    const auto ext_idx = *s.index_of(ext);
    Vec3 pos;
    if (side == CapSide::environment) {
      pos = s.cartesian(ext_idx);
    } else {
      pos = placed.at(ext);
      for (int core_id : bonded) {
        const double d = (pos - placed.at(core_id)).norm();
        if (d > bond_cutoff + 1e-9) {
          std::ostringstream os;
          os << "cap at external site " << ext
             << " has an inconsistent periodic image (bond " << d << " Angstrom)";
          throw domain_error(os.str());
        }
      }
    }
    cluster.caps.push_back({ext, kElements[m], kKinds[m], m, pos});
  }
  return cluster;
}

std::vector<int> select_defect_cluster(const Structure& defective,
                                       const std::vector<Vec3>& vacancy_positions,
                                       double bond_cutoff) {
  if (vacancy_positions.empty())
    throw domain_error("cluster selection needs at least one vacancy position");
  const auto pos = cartesian_positions(defective);
  const auto nbr = neighbor_lists(defective, bond_cutoff);

  std::set<std::size_t> selected;
  for (std::size_t i = 0; i < defective.size(); ++i)
    for (const auto& v : vacancy_positions)
      if (defective.cell.distance(pos[i], v) <= bond_cutoff) selected.insert(i);
  if (selected.empty())
    throw domain_error("no atoms within bond cutoff of any vacancy position");

  std::set<std::size_t> shell;
  for (std::size_t i : selected)
    for (std::size_t j : nbr[i]) shell.insert(j);
  selected.insert(shell.begin(), shell.end());

  // Absorb outside atoms that bond three or more selected atoms: capping a
  // trivalent site on the cluster side would leave the environment a lone
  // monovalent stub, so such atoms belong to the cluster.
  for (bool grew = true; grew;) {
    grew = false;
    for (std::size_t i = 0; i < defective.size(); ++i) {
      if (selected.count(i)) continue;
      int bonds = 0;
      for (std::size_t j : nbr[i])
        if (selected.count(j)) ++bonds;
      if (bonds >= 3) {
        selected.insert(i);
        grew = true;
      }
    }
  }

  std::vector<int> ids;
  ids.reserve(selected.size());
  for (std::size_t i : selected) ids.push_back(defective.sites[i].id);
  std::sort(ids.begin(), ids.end());
  return ids;
}

namespace {

int find_site_near(const Structure& s, const Vec3& cart, double tol = 1e-6) {
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s.cell.distance(s.cartesian(i), cart) <= tol)
      return s.sites[i].id;
  throw domain_error("no lattice site at the requested position");
}

// Id of the second-basis-atom site nearest the cell center.
int central_offset_site(const Structure& s) {
  const Vec3 center = s.cell.to_cartesian(Vec3(0.5, 0.5, 0.5));
  int best = -1;
  double best_d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.sites[i].id % 2 == 0) continue;  // primitive builder: odd ids sit at +1/4
    const double d = s.cell.distance(s.cartesian(i), center);
    if (best < 0 || d < best_d) {
      best = s.sites[i].id;
      best_d = d;
    }
  }
  return best;
}

Mat3 frame_from_axes(const Vec3& x, const Vec3& y, const Vec3& z) {
  Mat3 m;
  m.col(0) = x.normalized();
  m.col(1) = y.normalized();
  m.col(2) = z.normalized();
  return m;
}

}  // namespace

DefectFixture oxygen_vacancy_fixture(double a0) {
  DefectFixture f;
  f.name = "oxygen-vacancy";
  f.point_group = "C3v";
  f.pristine = build_diamond_primitive_supercell(4, 4, 4, a0);

  const int o_id = central_offset_site(f.pristine);
  const Vec3 o_pos = f.pristine.cartesian(*f.pristine.index_of(o_id));
  const Vec3 v_pos = o_pos - (a0 / 4.0) * Vec3(1, 1, 1);
  const int v_id = find_site_near(f.pristine, v_pos);

  f.spec.edits = {DefectEdit::substitute(o_id, "O"), DefectEdit::remove(v_id)};
  f.spec.charge = 0;
  f.defective = apply_defects(f.pristine, f.spec);
  f.oxygen_id = o_id;
  f.vacancy_positions = {v_pos};
  f.defect_center = 0.5 * (o_pos + v_pos);
  f.cluster_selection = select_defect_cluster(f.defective, f.vacancy_positions);

  const Vec3 z = (v_pos - o_pos).normalized();
  // One dangling carbon fixes the mirror-plane azimuth.
  const Vec3 c1 = v_pos + (a0 / 4.0) * Vec3(1, -1, -1);
  Vec3 x = c1 - v_pos;
  x -= x.dot(z) * z;
  f.orientation = frame_from_axes(x, z.cross(x.normalized()), z);
  return f;
}

DefectFixture divacancy_oxygen_fixture(double a0) {
  DefectFixture f;
  f.name = "divacancy-oxygen";
  f.point_group = "C2v";
  f.pristine = build_diamond_primitive_supercell(5, 5, 5, a0);

  const int o_id = central_offset_site(f.pristine);
  const Vec3 o_pos = f.pristine.cartesian(*f.pristine.index_of(o_id));
  const Vec3 v1_pos = o_pos - (a0 / 4.0) * Vec3(1, 1, 1);
  const Vec3 v2_pos = o_pos + (a0 / 4.0) * Vec3(1, 1, -1);
  const int v1_id = find_site_near(f.pristine, v1_pos);
  const int v2_id = find_site_near(f.pristine, v2_pos);

  f.spec.edits = {DefectEdit::remove(v1_id), DefectEdit::substitute(o_id, "O"),
                  DefectEdit::remove(v2_id)};
  f.spec.charge = 0;
  f.defective = apply_defects(f.pristine, f.spec);
  f.oxygen_id = o_id;
  f.vacancy_positions = {v1_pos, v2_pos};
  f.defect_center = o_pos;
  f.cluster_selection = select_defect_cluster(f.defective, f.vacancy_positions);

  // Two-fold axis along [001] through the oxygen; mirrors are the (110) and
  // (1-10) planes.
  f.orientation = frame_from_axes(Vec3(1, -1, 0), Vec3(1, 1, 0), Vec3(0, 0, 1));
  return f;
}

}  // namespace facet::lattice
