#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "facet/core.hpp"
#include "facet/reduce.hpp"

#include <cmath>
#include <random>
#include <vector>

using namespace facet;

TEST_CASE("parse_error carries and formats its location") {
  const parse_error e("input.dat", 12, 7, "unexpected token 'x'");
  CHECK(e.source() == "input.dat");
  CHECK(e.line() == 12);
  CHECK(e.column() == 7);
  CHECK(std::string(e.what()) == "input.dat:12:7: unexpected token 'x'");
}

TEST_CASE("element lookup is case-insensitive and strict") {
  CHECK(atomic_number("C") == 6);
  CHECK(atomic_number("c") == 6);
  CHECK(atomic_number("O") == 8);
  CHECK(atomic_number("F") == 9);
  CHECK(atomic_number("B") == 5);
  CHECK(atomic_number("fe") == 26);
  CHECK_FALSE(atomic_number("Xx").has_value());
  CHECK_FALSE(atomic_number("").has_value());
  CHECK(normalize_species("c") == "C");
  CHECK(normalize_species("FE") == "Fe");
  CHECK_THROWS_AS(normalize_species("Q7"), domain_error);
}

TEST_CASE("unit conversions invert each other") {
  CHECK(ev_to_hartree(hartree_to_ev(0.375)) == doctest::Approx(0.375).epsilon(1e-15));
  CHECK(angstrom_to_bohr(bohr_to_angstrom(2.5)) == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(debye_to_e_bohr(1.0) == doctest::Approx(0.3934303));
  CHECK(hartree_to_ev(1.0) == doctest::Approx(27.211386));
}

TEST_CASE("fingerprint is stable and content-sensitive") {
  const std::string a = "some bytes";
  CHECK(fingerprint_hex(a) == fingerprint_hex(a));
  CHECK(fingerprint_hex(a) != fingerprint_hex("some bytez"));
  CHECK(fingerprint_hex("").size() == 16);
  // FNV-1a 64 has a pinned offset basis; the empty string hashes to it.
  CHECK(fnv1a64("") == 14695981039346656037ull);
}

TEST_CASE("pairwise sum matches exact arithmetic on integers") {
  std::vector<double> values;
  for (int i = 1; i <= 1000; ++i) values.push_back(i);
  CHECK(pairwise_sum(values) == 500500.0);
}

TEST_CASE("deterministic sum is thread-count invariant bit for bit") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> values(3 * kReduceBlock + 517);
  for (auto& v : values) v = dist(rng) * std::pow(10.0, dist(rng) * 8);

  const auto term = [&](std::size_t i) { return values[i]; };
  const double serial = deterministic_sum(values.size(), term, 1);
  for (int threads : {2, 3, 8}) {
    const double parallel = deterministic_sum(values.size(), term, threads);
    CHECK(parallel == serial);
  }
  CHECK(deterministic_sum(values, 4) == serial);
}

TEST_CASE("deterministic sum tracks long double reference closely") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  std::vector<double> values(20000);
  long double reference = 0.0L;
  for (auto& v : values) {
    v = dist(rng);
    reference += v;
  }
  const double sum = deterministic_sum(values, 1);
  CHECK(std::abs(sum - static_cast<double>(reference)) <
        1e-12 * std::abs(static_cast<double>(reference)));
}

TEST_CASE("multi-slot reduction equals slot-by-slot reduction") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  const std::size_t n = kReduceBlock + 321;
  std::vector<double> a(n), b(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = dist(rng);
    b[i] = dist(rng) * dist(rng);
  }
  const auto multi = deterministic_sum_multi(
      n, 2,
      [&](std::size_t i, double* out) {
        out[0] = a[i];
        out[1] = b[i];
      },
      3);
  CHECK(multi[0] == deterministic_sum(a, 1));
  CHECK(multi[1] == deterministic_sum(b, 1));
}

TEST_CASE("empty reductions are zero") {
  CHECK(deterministic_sum(0, [](std::size_t) { return 1.0; }, 4) == 0.0);
  const auto multi =
      deterministic_sum_multi(0, 3, [](std::size_t, double*) {}, 2);
  REQUIRE(multi.size() == 3);
  for (double v : multi) CHECK(v == 0.0);
}
