#include "facet/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace facet::io {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw parse_error(path, 1, 1, "cannot open file");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw domain_error("cannot write file '" + path + "'");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw domain_error("failed writing file '" + path + "'");
}

namespace {

struct Token {
  std::string_view text;
  int column = 1;  // 1-based byte column
};

std::vector<Token> tokenize(std::string_view line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i >= line.size()) break;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    out.push_back({line.substr(start, i - start), static_cast<int>(start) + 1});
  }
  return out;
}

bool is_blank(std::string_view line) {
  return std::all_of(line.begin(), line.end(), [](char c) {
    return std::isspace(static_cast<unsigned char>(c));
  });
}

// Forward-only view of the input as lines, tracking 1-based line numbers for
// diagnostics.  Lines are split on \n with a trailing \r stripped.
class LineCursor {
 public:
  LineCursor(std::string_view text, std::string source)
      : text_(text), source_(std::move(source)) {}

  const std::string& source() const { return source_; }
  bool eof() const { return pos_ >= text_.size(); }
  int next_line_number() const { return line_; }

  std::optional<std::string_view> peek() {
    if (!cached_) {
      if (eof()) return std::nullopt;
      std::size_t end = text_.find('\n', pos_);
      if (end == std::string_view::npos) end = text_.size();
      std::string_view line = text_.substr(pos_, end - pos_);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      cached_ = line;
      cached_end_ = end;
    }
    return cached_;
  }

  std::string_view take(const char* what) {
    const auto line = peek();
    if (!line) fail(std::string("expected ") + what + ", got end of input");
    advance();
    return *line;
  }

  void advance() {
    if (!peek()) return;
    pos_ = cached_end_ < text_.size() ? cached_end_ + 1 : text_.size();
    ++line_;
    cached_.reset();
  }

  void skip_blank() {
    while (const auto line = peek()) {
      if (!is_blank(*line)) return;
      advance();
    }
  }

  [[noreturn]] void fail(const std::string& message, int column = 1) const {
    throw parse_error(source_, line_, column, message);
  }
  // Error on the line most recently taken.
  [[noreturn]] void fail_prev(const std::string& message, int column = 1) const {
    throw parse_error(source_, std::max(1, line_ - 1), column, message);
  }

 private:
  std::string_view text_;
  std::string source_;
  std::size_t pos_ = 0;
  int line_ = 1;
  std::optional<std::string_view> cached_;
  std::size_t cached_end_ = 0;
};

double parse_double_token(const LineCursor& c, int line, const Token& t) {
  const std::string owned(t.text);
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(owned.c_str(), &end);
  if (end != owned.c_str() + owned.size() || owned.empty())
    throw parse_error(c.source(), line, t.column,
                      "malformed number '" + owned + "'");
  if (!std::isfinite(v))
    throw parse_error(c.source(), line, t.column,
                      "non-finite value '" + owned + "'");
  return v;
}

long long parse_int_token(const LineCursor& c, int line, const Token& t,
                          long long lo, long long hi, const char* what) {
  const std::string owned(t.text);
  char* end = nullptr;
  errno = 0;
  const long long v = std::strtoll(owned.c_str(), &end, 10);
  if (end != owned.c_str() + owned.size() || owned.empty() || errno == ERANGE)
    throw parse_error(c.source(), line, t.column,
                      std::string("malformed integer '") + owned + "' for " + what);
  if (v < lo || v > hi)
    throw parse_error(c.source(), line, t.column,
                      std::string(what) + " must be in [" + std::to_string(lo) +
                          ", " + std::to_string(hi) + "], got " + owned);
  return v;
}

// Reads exactly `need` whitespace-separated doubles starting at the cursor,
// consuming whole lines; extra numbers on the final line are an error.
std::vector<double> read_value_block(LineCursor& c, std::size_t need,
                                     const char* what) {
  std::vector<double> values;
  values.reserve(std::min<std::size_t>(need, 1u << 20));
  while (values.size() < need) {
    const int line = c.next_line_number();
    const auto text = c.take(what);
    for (const auto& tok : tokenize(text)) {
      if (values.size() == need)
        throw parse_error(c.source(), line, tok.column,
                          std::string("more values than expected for ") + what);
      values.push_back(parse_double_token(c, line, tok));
    }
  }
  return values;
}

Vec3 parse_vec3_line(LineCursor& c, const char* what) {
  const int line = c.next_line_number();
  const auto text = c.take(what);
  const auto toks = tokenize(text);
  if (toks.size() < 3)
    c.fail_prev(std::string("expected 3 numbers for ") + what + ", got " +
                std::to_string(toks.size()));
  Vec3 v;
  for (int k = 0; k < 3; ++k) v[k] = parse_double_token(c, line, toks[k]);
  return v;
}

std::string normalize_element_token(const LineCursor& c, int line, const Token& t) {
  const auto z = atomic_number(t.text);
  if (!z)
    throw parse_error(c.source(), line, t.column,
                      "unknown element '" + std::string(t.text) + "'");
  return normalize_species(t.text);
}

constexpr std::size_t kMaxSites = 2'000'000;
constexpr std::size_t kMaxVoxels = std::size_t(1) << 27;

Structure parse_poscar_section(LineCursor& c) {
  Structure s;
  s.comment = std::string(c.take("comment line"));

  {
    const int line = c.next_line_number();
    const auto toks = tokenize(c.take("scale line"));
    if (toks.empty()) c.fail_prev("expected scale factor");
    const double scale = parse_double_token(c, line, toks[0]);
    if (!(scale > 0.0))
      throw parse_error(c.source(), line, toks[0].column,
                        "scale factor must be positive");
    Mat3 vectors;
    for (int r = 0; r < 3; ++r) vectors.row(r) = parse_vec3_line(c, "lattice vector");
    s.cell.vectors = vectors * scale;
    if (!(s.cell.volume() > 1e-12)) {
      throw parse_error(c.source(), line + 1, 1,
                        "lattice vectors are singular (zero cell volume)");
    }
  }

  std::vector<std::string> species;
  {
    const int line = c.next_line_number();
    const auto toks = tokenize(c.take("species line"));
    if (toks.empty()) c.fail_prev("expected element symbols");
    for (const auto& t : toks) species.push_back(normalize_element_token(c, line, t));
  }

  std::vector<long long> counts;
  std::size_t total = 0;
  {
    const int line = c.next_line_number();
    const auto toks = tokenize(c.take("species counts line"));
    if (toks.size() != species.size())
      c.fail_prev("expected " + std::to_string(species.size()) +
                  " species counts, got " + std::to_string(toks.size()));
    for (const auto& t : toks) {
      counts.push_back(parse_int_token(c, line, t, 1,
                                       static_cast<long long>(kMaxSites),
                                       "species count"));
      total += static_cast<std::size_t>(counts.back());
    }
    if (total > kMaxSites) c.fail_prev("too many sites");
  }

  auto mode_line = c.take("coordinate mode line");
  {
    const auto toks = tokenize(mode_line);
    if (toks.empty()) c.fail_prev("expected coordinate mode (Direct/Cartesian)");
    const char first =
        static_cast<char>(std::tolower(static_cast<unsigned char>(toks[0].text[0])));
    if (first == 's') {
      mode_line = c.take("coordinate mode line");
      const auto toks2 = tokenize(mode_line);
      if (toks2.empty()) c.fail_prev("expected coordinate mode (Direct/Cartesian)");
    }
  }
  bool direct;
  {
    const auto toks = tokenize(mode_line);
    const char first =
        static_cast<char>(std::tolower(static_cast<unsigned char>(toks[0].text[0])));
    if (first == 'd')
      direct = true;
    else if (first == 'c' || first == 'k')
      direct = false;
    else
      c.fail_prev("unrecognized coordinate mode '" + std::string(toks[0].text) +
                  "' (expected Direct or Cartesian)");
  }

  int id = 0;
  for (std::size_t b = 0; b < species.size(); ++b) {
    for (long long k = 0; k < counts[b]; ++k) {
      const Vec3 v = parse_vec3_line(c, "atom coordinate line");
      Site site;
      site.id = id++;
      site.species = species[b];
      site.frac = direct ? v : s.cell.to_fractional(v);
      site.frac = wrap_fractional(site.frac, s.cell.periodic);
      s.sites.push_back(std::move(site));
    }
  }

  try {
    s.validate(1e-6);
  } catch (const domain_error& e) {
    throw parse_error(c.source(), 1, 1, e.what());
  }
  return s;
}

}  // namespace

Structure parse_poscar(std::string_view text, const std::string& source) {
  LineCursor c(text, source);
  return parse_poscar_section(c);
}

std::string write_poscar(const Structure& s) {
  std::ostringstream os;
  os << (s.comment.empty() ? "structure" : s.comment) << "\n1.0\n";
  for (int r = 0; r < 3; ++r) {
    os << format_double(s.cell.vectors(r, 0)) << ' '
       << format_double(s.cell.vectors(r, 1)) << ' '
       << format_double(s.cell.vectors(r, 2)) << '\n';
  }
  const auto groups = s.species_counts();
  for (std::size_t i = 0; i < groups.size(); ++i)
    os << groups[i].first << (i + 1 < groups.size() ? ' ' : '\n');
  if (groups.empty()) os << '\n';
  for (std::size_t i = 0; i < groups.size(); ++i)
    os << groups[i].second << (i + 1 < groups.size() ? ' ' : '\n');
  if (groups.empty()) os << '\n';
  os << "Direct\n";
  for (const auto& [species, count] : groups) {
    (void)count;
    for (const auto& site : s.sites) {
      if (site.species != species) continue;
      os << format_double(site.frac[0]) << ' ' << format_double(site.frac[1]) << ' '
         << format_double(site.frac[2]) << '\n';
    }
  }
  return os.str();
}

Structure parse_xyz(std::string_view text, const std::string& source) {
  LineCursor c(text, source);

  std::size_t n = 0;
  {
    const int line = c.next_line_number();
    const auto toks = tokenize(c.take("atom count line"));
    if (toks.empty()) c.fail_prev("expected atom count");
    n = static_cast<std::size_t>(parse_int_token(
        c, line, toks[0], 1, static_cast<long long>(kMaxSites), "atom count"));
  }
  const std::string comment{c.take("comment line")};

  std::vector<std::string> species;
  std::vector<Vec3> cart;
  species.reserve(std::min(n, kMaxSites));
  cart.reserve(std::min(n, kMaxSites));
  for (std::size_t i = 0; i < n; ++i) {
    const int line = c.next_line_number();
    const auto toks = tokenize(c.take("atom line"));
    if (toks.size() < 4)
      c.fail_prev("expected 'element x y z', got " + std::to_string(toks.size()) +
                  " token(s)");
    species.push_back(normalize_element_token(c, line, toks[0]));
    Vec3 v;
    for (int k = 0; k < 3; ++k) {
      v[k] = parse_double_token(c, line, toks[k + 1]);
      if (std::abs(v[k]) > 1e12)
        throw parse_error(c.source(), line, toks[k + 1].column,
                          "coordinate magnitude too large");
    }
    cart.push_back(v);
  }

  // Non-periodic bounding box.  Coordinates are shifted non-negative once,
  // and edges are powers of two, so fractional <-> Cartesian conversions are
  // exact and re-parsing a written file reproduces it byte for byte.
  const double pad = 8.0;
  Vec3 shift = Vec3::Zero();
  Vec3 edge = Vec3::Zero();
  for (int k = 0; k < 3; ++k) {
    double lo = cart[0][k], hi = cart[0][k];
    for (const auto& v : cart) {
      lo = std::min(lo, v[k]);
      hi = std::max(hi, v[k]);
    }
    if (lo < 0.0) shift[k] = pad - lo;
    double top = hi + shift[k] + pad;
    double l = 8.0;
    while (l < top) l *= 2.0;
    edge[k] = l;
  }

  Structure s;
  s.comment = comment;
  s.cell.vectors = edge.asDiagonal();
  s.cell.periodic = {false, false, false};
  for (std::size_t i = 0; i < n; ++i) {
    Site site;
    site.id = static_cast<int>(i);
    site.species = species[i];
    for (int k = 0; k < 3; ++k) site.frac[k] = (cart[i][k] + shift[k]) / edge[k];
    s.sites.push_back(std::move(site));
  }

  try {
    s.validate(1e-6);
  } catch (const domain_error& e) {
    throw parse_error(c.source(), 1, 1, e.what());
  }
  return s;
}

std::string write_xyz(const Structure& s) {
  std::ostringstream os;
  os << s.sites.size() << '\n' << s.comment << '\n';
  for (std::size_t i = 0; i < s.sites.size(); ++i) {
    const Vec3 v = s.cartesian(i);
    os << s.sites[i].species << ' ' << format_double(v[0]) << ' '
       << format_double(v[1]) << ' ' << format_double(v[2]) << '\n';
  }
  return os.str();
}

Structure parse_structure(std::string_view text, StructureFormat format,
                          const std::string& source) {
  return format == StructureFormat::poscar ? parse_poscar(text, source)
                                           : parse_xyz(text, source);
}

std::string write_structure(const Structure& s, StructureFormat format) {
  return format == StructureFormat::poscar ? write_poscar(s) : write_xyz(s);
}

StructureFormat guess_structure_format(const std::string& path) {
  auto lower = path;
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char ch) { return std::tolower(ch); });
  return lower.size() >= 4 && lower.substr(lower.size() - 4) == ".xyz"
             ? StructureFormat::xyz
             : StructureFormat::poscar;
}

// ---------------------------------------------------------------------------
// grids

namespace {

std::array<int, 3> parse_dims_line(LineCursor& c, int line,
                                   const std::vector<Token>& toks) {
  std::array<int, 3> dims{};
  if (toks.size() != 3)
    throw parse_error(c.source(), line, toks.empty() ? 1 : toks[0].column,
                      "expected 3 grid dimensions, got " +
                          std::to_string(toks.size()));
  for (int k = 0; k < 3; ++k)
    dims[k] = static_cast<int>(
        parse_int_token(c, line, toks[k], 2, 4096, "grid dimension"));
  const std::size_t total = static_cast<std::size_t>(dims[0]) * dims[1] * dims[2];
  if (total > kMaxVoxels)
    throw parse_error(c.source(), line, toks[0].column, "grid too large");
  return dims;
}

bool line_is_dims(const std::string_view text) {
  const auto toks = tokenize(text);
  if (toks.size() != 3) return false;
  for (const auto& t : toks) {
    if (t.text.empty()) return false;
    for (const char ch : t.text)
      if (!std::isdigit(static_cast<unsigned char>(ch))) return false;
  }
  return true;
}

void write_values_block(std::ostringstream& os, const std::vector<double>& values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    os << format_double(values[i]);
    os << ((i % 5 == 4 || i + 1 == values.size()) ? '\n' : ' ');
  }
}

}  // namespace

GridDocument parse_chgcar(std::string_view text, const std::string& source) {
  LineCursor c(text, source);
  GridDocument doc;
  doc.structure = parse_poscar_section(c);

  c.skip_blank();
  std::array<int, 3> dims{};
  {
    const int line = c.next_line_number();
    const auto toks = tokenize(c.take("grid dimensions line"));
    dims = parse_dims_line(c, line, toks);
  }
  const std::size_t total = static_cast<std::size_t>(dims[0]) * dims[1] * dims[2];

  doc.charge.cell = doc.structure.cell;
  doc.charge.shape = dims;
  doc.charge.scale = GridScale::times_cell_volume;
  doc.charge.data = read_value_block(c, total, "grid values");

  while (true) {
    c.skip_blank();
    const auto next = c.peek();
    if (!next) break;
    const auto toks = tokenize(*next);
    if (!toks.empty() && toks[0].text == "augmentation") {
      const int line = c.next_line_number();
      c.advance();
      if (toks.size() < 4)
        throw parse_error(c.source(), line, 1,
                          "malformed augmentation header (expected 'augmentation "
                          "occupancies <ion> <count>')");
      const long long nvals =
          parse_int_token(c, line, toks[3], 0, 1'000'000, "augmentation count");
      read_value_block(c, static_cast<std::size_t>(nvals), "augmentation values");
      continue;
    }
    if (line_is_dims(*next)) {
      const int line = c.next_line_number();
      const auto dtoks = tokenize(c.take("grid dimensions line"));
      const auto dims2 = parse_dims_line(c, line, dtoks);
      if (dims2 != dims)
        throw parse_error(c.source(), line, dtoks[0].column,
                          "grid dimensions differ between blocks");
      if (doc.spin)
        throw parse_error(c.source(), line, 1, "unexpected third grid block");
      VolumetricGrid spin;
      spin.cell = doc.structure.cell;
      spin.shape = dims;
      spin.scale = GridScale::times_cell_volume;
      spin.data = read_value_block(c, total, "spin grid values");
      doc.spin = std::move(spin);
      continue;
    }
    c.fail("unexpected content after grid data");
  }
  return doc;
}

std::string write_chgcar(const GridDocument& doc) {
  std::ostringstream os;
  os << write_poscar(doc.structure) << '\n';
  os << doc.charge.shape[0] << ' ' << doc.charge.shape[1] << ' '
     << doc.charge.shape[2] << '\n';
  write_values_block(os, doc.charge.data);
  if (doc.spin) {
    os << doc.spin->shape[0] << ' ' << doc.spin->shape[1] << ' '
       << doc.spin->shape[2] << '\n';
    write_values_block(os, doc.spin->data);
  }
  return os.str();
}

VolumetricGrid parse_simple_grid(std::string_view text, const std::string& source) {
  LineCursor c(text, source);

  {
    const auto header = c.take("header line");
    const auto toks = tokenize(header);
    if (toks.size() != 2 || toks[0].text != "facet-grid" || toks[1].text != "1")
      c.fail_prev("not a facet-grid file (expected 'facet-grid 1')");
  }

  VolumetricGrid g;
  {
    const auto toks = tokenize(c.take("cell keyword"));
    if (toks.size() != 1 || toks[0].text != "cell")
      c.fail_prev("expected 'cell'");
    Mat3 vectors;
    for (int r = 0; r < 3; ++r) vectors.row(r) = parse_vec3_line(c, "cell vector");
    g.cell.vectors = vectors;
    if (!(g.cell.volume() > 1e-12)) c.fail_prev("cell vectors are singular");
  }
  {
    const int line = c.next_line_number();
    const auto toks = tokenize(c.take("convention line"));
    if (toks.size() != 2 || toks[0].text != "convention")
      c.fail_prev("expected 'convention raw' or 'convention cellvolume'");
    if (toks[1].text == "raw")
      g.scale = GridScale::raw_values;
    else if (toks[1].text == "cellvolume")
      g.scale = GridScale::times_cell_volume;
    else
      throw parse_error(c.source(), line, toks[1].column,
                        "unknown convention '" + std::string(toks[1].text) +
                            "' (expected raw or cellvolume)");
  }
  {
    const int line = c.next_line_number();
    auto toks = tokenize(c.take("dims line"));
    if (toks.empty() || toks[0].text != "dims") c.fail_prev("expected 'dims'");
    toks.erase(toks.begin());
    g.shape = parse_dims_line(c, line, toks);
  }
  {
    const auto toks = tokenize(c.take("values keyword"));
    if (toks.size() != 1 || toks[0].text != "values")
      c.fail_prev("expected 'values'");
  }
  const std::size_t total =
      static_cast<std::size_t>(g.shape[0]) * g.shape[1] * g.shape[2];
  g.data = read_value_block(c, total, "grid values");
  c.skip_blank();
  if (!c.eof()) c.fail("unexpected content after values");
  return g;
}

std::string write_simple_grid(const VolumetricGrid& g) {
  std::ostringstream os;
  os << "facet-grid 1\ncell\n";
  for (int r = 0; r < 3; ++r)
    os << format_double(g.cell.vectors(r, 0)) << ' '
       << format_double(g.cell.vectors(r, 1)) << ' '
       << format_double(g.cell.vectors(r, 2)) << '\n';
  os << "convention "
     << (g.scale == GridScale::raw_values ? "raw" : "cellvolume") << '\n';
  os << "dims " << g.shape[0] << ' ' << g.shape[1] << ' ' << g.shape[2] << '\n';
  os << "values\n";
  write_values_block(os, g.data);
  return os.str();
}

VolumetricGrid parse_grid_auto(std::string_view text, const std::string& source) {
  if (text.substr(0, 10) == "facet-grid") return parse_simple_grid(text, source);
  return parse_chgcar(text, source).charge;
}

// ---------------------------------------------------------------------------
// basis text format

BasisLibrary parse_basis(std::string_view text, const std::string& source) {
  LineCursor c(text, source);
  BasisLibrary lib;
  std::string current;

  const auto strip_comment = [](std::string_view line) {
    const auto hash = line.find('#');
    return hash == std::string_view::npos ? line : line.substr(0, hash);
  };

  while (true) {
    c.skip_blank();
    // Peek through comment-only lines.
    const auto raw = c.peek();
    if (!raw) break;
    const auto line = strip_comment(*raw);
    if (is_blank(line)) {
      c.advance();
      continue;
    }
    const int line_no = c.next_line_number();
    const auto toks = tokenize(line);

    if (toks.size() == 1 && !toks[0].text.empty() &&
        std::isalpha(static_cast<unsigned char>(toks[0].text[0]))) {
      current = normalize_element_token(c, line_no, toks[0]);
      if (lib.elements.count(current))
        throw parse_error(c.source(), line_no, toks[0].column,
                          "duplicate element block '" + current + "'");
      lib.elements[current] = {};
      c.advance();
      continue;
    }

    if (toks.size() == 2) {
      if (current.empty())
        c.fail("expected an element symbol before shell definitions");
      int l;
      const std::string lt(toks[0].text);
      if (lt == "s" || lt == "S") l = 0;
      else if (lt == "p" || lt == "P") l = 1;
      else if (lt == "d" || lt == "D") l = 2;
      else if (lt == "f" || lt == "F") l = 3;
      else
        l = static_cast<int>(
            parse_int_token(c, line_no, toks[0], 0, 3, "shell angular momentum"));
      const long long nprim =
          parse_int_token(c, line_no, toks[1], 1, 64, "primitive count");
      c.advance();

      BasisLibrary::ShellTemplate shell;
      shell.l = l;
      for (long long p = 0; p < nprim; ++p) {
        c.skip_blank();
        const int row_no = c.next_line_number();
        const auto row_raw = c.take("primitive row");
        const auto row = strip_comment(row_raw);
        const auto rtoks = tokenize(row);
        if (rtoks.size() != 2)
          throw parse_error(c.source(), row_no, rtoks.empty() ? 1 : rtoks[0].column,
                            "expected 'exponent coefficient', got " +
                                std::to_string(rtoks.size()) + " token(s)");
        embed::Primitive prim;
        prim.exponent = parse_double_token(c, row_no, rtoks[0]);
        prim.coefficient = parse_double_token(c, row_no, rtoks[1]);
        if (!(prim.exponent > 0.0))
          throw parse_error(c.source(), row_no, rtoks[0].column,
                            "exponent must be positive");
        shell.primitives.push_back(prim);
      }
      lib.elements[current].push_back(std::move(shell));
      continue;
    }

    c.fail("expected an element symbol or a 'l nprim' shell header");
  }

  for (const auto& [element, shells] : lib.elements)
    if (shells.empty())
      throw parse_error(source, 1, 1,
                        "element block '" + element + "' has no shells");
  return lib;
}

std::string write_basis(const BasisLibrary& lib) {
  std::ostringstream os;
  for (const auto& [element, shells] : lib.elements) {
    os << element << '\n';
    for (const auto& shell : shells) {
      os << shell.l << ' ' << shell.primitives.size() << '\n';
      for (const auto& p : shell.primitives)
        os << format_double(p.exponent) << ' ' << format_double(p.coefficient)
           << '\n';
    }
  }
  return os.str();
}

embed::BasisSet make_basis(const Structure& s, const BasisLibrary& lib) {
  std::vector<embed::GtoShell> shells;
  for (std::size_t i = 0; i < s.sites.size(); ++i) {
    const auto it = lib.elements.find(s.sites[i].species);
    if (it == lib.elements.end())
      throw domain_error("no basis entry for element '" + s.sites[i].species + "'");
    for (const auto& tmpl : it->second) {
      embed::GtoShell shell;
      shell.element = s.sites[i].species;
      shell.center = s.cartesian(i);
      shell.l = tmpl.l;
      shell.primitives = tmpl.primitives;
      shells.push_back(std::move(shell));
    }
  }
  return embed::BasisSet::build(std::move(shells));
}

}  // namespace facet::io
