#pragma once

#include <cstdint>
#include <vector>

#include "kftrack/rng.hpp"
#include "kftrack/simworld.hpp"

namespace kftrack::suites {

/// Unit vector of dimension d with cosine similarity `similarity` to `anchor`.
std::vector<double> appearance_like(const std::vector<double>& anchor, double similarity, Rng& rng);

/// Uniformly random unit vector of dimension d.
std::vector<double> random_appearance(int d, Rng& rng);

/// Target and a far-away, dissimilar distractor; the target is fully occluded
/// for a long stretch mid-sequence, during which the distractor is the only
/// present candidate.
Scenario poisoning_scenario();

/// Two objects on a collision course that swap places while the distractor
/// passes in front of the target for five frames.
Scenario crossing_scenario();

/// Seeded mix of crossing-with-occlusion and look-alike-distractor scenarios.
std::vector<Scenario> crossing_suite(std::size_t count, std::uint64_t seed);

/// Seeded scenarios with fast, turning targets, nearby look-alikes and
/// spurious proposals.
std::vector<Scenario> fast_motion_suite(std::size_t count, std::uint64_t seed);

}  // namespace kftrack::suites
