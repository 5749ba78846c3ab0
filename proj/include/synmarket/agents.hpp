#pragma once

// Trader agents. Each agent owns a ball in normalized feature space,
//
//   g(x) = radius^2 - |x - center|^2,
//
// and believes its asset pays off with probability sigmoid(steepness * g(x)).
// It trades only when the claim lies inside its ball (g >= 0) and its belief
// beats the current price of its own asset. Because the price is the
// threshold, the region where an agent is willing to buy shrinks as its
// asset gets more expensive.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "synmarket/data.hpp"
#include "synmarket/lmsr.hpp"
#include "synmarket/rng.hpp"

namespace synmarket {

struct GenomeBounds {
    double radius_min = 0.01;
    double radius_max = 1.0;
    double steepness_min = 0.1;
    double steepness_max = 1000.0;

    static GenomeBounds for_dimension(std::size_t d);
};

struct Genome {
    std::uint64_t id = 0;
    Asset asset_class = Asset::Yes;
    std::vector<double> center;
    double radius = 0.1;
    double steepness = 50.0;

    bool operator==(const Genome&) const = default;
};

bool satisfies_bounds(const Genome& genome, const GenomeBounds& bounds);

struct AgentState {
    Genome genome;
    double initial_cash = 0.0;
    double cash = 0.0;
    double shares_held = 0.0;
    double spend = 0.0;

    static AgentState fresh(const Genome& genome, double cash);
};

struct TrainingPoint {
    std::string id;
    std::vector<double> point;
    Label label = Label::Replicable;
};

struct DecisionConfig {
    double liquidity_b = 1.0;
    double trade_size = 1.0;
    double min_fraction = 0.01;
    double margin = 0.0;
};

double membership(const Genome& genome, std::span<const double> point);

double belief(const Genome& genome, std::span<const double> point);

/// Shares the agent buys at the current Yes price, or nullopt to abstain.
std::optional<double> decide(const AgentState& agent, std::span<const double> point, double market_price_yes,
                             const DecisionConfig& config);

inline constexpr double kInitialSteepness = 50.0;
inline constexpr double kAnchorJitter = 0.02;
inline constexpr double kFallbackRadius = 0.1;

/// Median over points of the distance to their k-th nearest other point
/// (k clamped to [1, n-1]); nullopt with fewer than two points.
std::optional<double> median_kth_neighbor_distance(std::span<const TrainingPoint> points, std::size_t k);
std::optional<double> median_nearest_neighbor_distance(std::span<const TrainingPoint> points);

/// ceil((points - 1) / count): the neighbour rank whose distance sizes the
/// initial balls, so `count` balls jointly reach about every training point.
/// Equals 1 (plain nearest neighbour) once count >= points - 1.
std::size_t initial_neighbor_rank(std::size_t points, std::size_t count);

/// Anchors each genome at a uniformly drawn training point (jittered), takes
/// its asset class from the anchor's label, and sizes every ball by the
/// median distance to the initial_neighbor_rank-th neighbour. Ids are
/// assigned from `next_id`.
std::vector<Genome> init_population(std::span<const TrainingPoint> points, std::size_t count, Rng& rng,
                                    std::uint64_t& next_id);

}  // namespace synmarket
