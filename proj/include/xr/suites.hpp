#pragma once

#include "xr/surfgrp.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace xr {

struct SuiteConfig {
  Representation rep;          // base group and its SL(n) image
  std::string group = "octagon";
  int max_word_len = 6;
  long tuples = 1000;          // axioms use all of them, other sweeps a fixed fraction
  std::uint64_t seed = 1;
  int grid = 512;
  bool corrupt = false;        // replace b by a noisy copy
  std::map<std::string, double> tol;  // overrides by record name
};

// Validates n >= 2, max_word_len >= 1, tuples >= 10, grid >= 64 and
// positive tolerance overrides.
void validate(const SuiteConfig& cfg);

struct CheckRecord {
  std::string name;
  std::string anchor;  // the statement being tested, in words
  int n = 0;
  long samples = 0;
  double value = 0.0;  // measured violation, or the measured floor for '>' checks
  char bound = '<';    // pass iff value < tol, or value > tol
  double tol = 0.0;
  bool pass = false;
  std::string note;
};

const std::vector<std::string>& suite_names();  // without "all"

// Runs one suite or "all"; records are sorted by name. Seconds per suite are
// added to timings when given. Throws on an unknown suite name.
std::vector<CheckRecord> run_suite(const std::string& suite, const SuiteConfig& cfg,
                                   std::map<std::string, double>* timings = nullptr);

// The 'count' words of length <= max_len with the smallest translation
// length, ties broken by enumeration order.
std::vector<Word> shortest_words(const GeneratorSet& g, int count, int max_len);

} // namespace xr
