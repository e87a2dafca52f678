#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "tgdist/graph.hpp"

namespace tgdist {

/// Null models, named by what they shuffle. Each keeps n and T.
enum class RandomizationKind {
    Random,          // keeps the number of temporal edge instances
    RandomDelta,     // keeps contact events and their durations
    ActiveSnapshot,  // keeps per-snapshot edge counts and each node's active times
    Time,            // keeps the aggregated weighted graph
    Sequence,        // keeps every snapshot, shuffles their order
    WeightedDegree,  // keeps each node's number of temporal edge instances
};

inline constexpr std::array<RandomizationKind, 6> kAllRandomizations = {
    RandomizationKind::Random, RandomizationKind::RandomDelta, RandomizationKind::ActiveSnapshot,
    RandomizationKind::Time,   RandomizationKind::Sequence,    RandomizationKind::WeightedDegree};

std::string_view to_string(RandomizationKind kind);
RandomizationKind parse_randomization_kind(std::string_view name);

struct RandomizeOutcome {
    TemporalGraph graph;
    /// RandomDelta only: the relocated contact events (overlaps merge in `graph`).
    std::vector<ContactEvent> events;
    /// ActiveSnapshot: snapshots where uniform rejection sampling ran out of budget
    /// and the covering construction was used instead.
    std::size_t fallback_snapshots = 0;
    std::vector<std::string> warnings;
};

/// Weights are read as instance multiplicities and must be integral.
RandomizeOutcome randomize_detailed(const TemporalGraph& g, RandomizationKind kind, std::uint64_t seed);
TemporalGraph randomize(const TemporalGraph& g, RandomizationKind kind, std::uint64_t seed);

/// Contact events of a weighted graph: the level sets {t : w_t >= k} of each
/// pair's weight series, split into maximal runs. Durations sum to the total weight.
std::vector<ContactEvent> weighted_contacts(const TemporalGraph& g);

}  // namespace tgdist
