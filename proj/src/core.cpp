#include "facet/core.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

namespace facet {

std::string parse_error::format(const std::string& source, int line, int column,
                                const std::string& what) {
  std::ostringstream os;
  os << source << ":" << line << ":" << column << ": " << what;
  return os.str();
}

namespace {

// Symbols indexed by atomic number; index 0 unused.
constexpr const char* kSymbols[] = {
    "",   "H",  "He", "Li", "Be", "B",  "C",  "N",  "O",  "F",  "Ne", "Na",
    "Mg", "Al", "Si", "P",  "S",  "Cl", "Ar", "K",  "Ca", "Sc", "Ti", "V",
    "Cr", "Mn", "Fe", "Co", "Ni", "Cu", "Zn", "Ga", "Ge", "As", "Se", "Br",
    "Kr", "Rb", "Sr", "Y",  "Zr", "Nb", "Mo", "Tc", "Ru", "Rh", "Pd", "Ag",
    "Cd", "In", "Sn", "Sb", "Te", "I",  "Xe", "Cs", "Ba", "La", "Ce", "Pr",
    "Nd", "Pm", "Sm", "Eu", "Gd", "Tb", "Dy", "Ho", "Er", "Tm", "Yb", "Lu",
    "Hf", "Ta", "W",  "Re", "Os", "Ir", "Pt", "Au", "Hg", "Tl", "Pb", "Bi",
    "Po", "At", "Rn", "Fr", "Ra", "Ac", "Th", "Pa", "U",  "Np", "Pu", "Am",
    "Cm", "Bk", "Cf", "Es", "Fm", "Md", "No", "Lr"};

constexpr int kMaxZ = static_cast<int>(std::size(kSymbols)) - 1;

std::string fold_case(std::string_view symbol) {
  std::string s;
  s.reserve(symbol.size());
  for (char c : symbol) s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  return s;
}

const std::map<std::string, int>& symbol_index() {
  static const std::map<std::string, int> index = [] {
    std::map<std::string, int> m;
    for (int z = 1; z <= kMaxZ; ++z) m[fold_case(kSymbols[z])] = z;
    return m;
  }();
  return index;
}

}  // namespace

std::optional<int> atomic_number(std::string_view symbol) {
  const auto& index = symbol_index();
  auto it = index.find(fold_case(symbol));
  if (it == index.end()) return std::nullopt;
  return it->second;
}

std::string normalize_species(std::string_view symbol) {
  auto z = atomic_number(symbol);
  if (!z) throw domain_error("unknown element symbol: '" + std::string(symbol) + "'");
  return kSymbols[*z];
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t hash = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  return hash;
}

std::string fingerprint_hex(std::string_view bytes) {
  static const char* digits = "0123456789abcdef";
  std::uint64_t h = fnv1a64(bytes);
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<size_t>(i)] = digits[h & 0xf];
    h >>= 4;
  }
  return out;
}

}  // namespace facet
