// JSON persistence for problem instances. Floating-point values are written
// at full round-trip precision, so load(save(x)) reproduces x bitwise.

#pragma once

#include "goldeneq/problem.hpp"

#include <filesystem>

namespace goldeneq {

inline constexpr int kInstanceFormatVersion = 1;

// Schema: { format_version, dimension, seed, rng_id, P, Q (row-major arrays),
// q, box_lower, box_upper, x_start, xbar_start }.
void save_instance(const ProblemInstance& instance, const std::filesystem::path& path);

// Throws std::runtime_error naming the offending field on malformed input;
// domain invariants (box ordering, symmetry of Q, start point containment)
// are re-validated on load.
ProblemInstance load_instance(const std::filesystem::path& path);

}  // namespace goldeneq
