// Command-line harness: generate benchmark instances, run the solvers with
// the experimental protocol step choices, and emit machine-readable
// convergence data (CSV plus a metadata JSON sibling).

#pragma once

#include <stdexcept>
#include <string>

namespace goldeneq::cli {

// Flag/semantic problems that should exit with the usage code (2) rather
// than the numerical-failure code (1).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One series of a comparison run: "gra:p=0.9", "mgra1:base=1",
// "mgra2:base=1,label=sub". Keys: p, base, label.
struct SeriesSpec {
  std::string algorithm;
  double p = 0.9;
  double base = 1.0;
  std::string label;
};

SeriesSpec parse_series_spec(const std::string& text);

// Shortest decimal representation that parses back to the same double.
std::string format_double(double value);

// Exit codes: 0 success, 2 usage error, 1 numerical or I/O failure.
int run(int argc, const char* const* argv);

}  // namespace goldeneq::cli
