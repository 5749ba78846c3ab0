#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "synmarket/agents.hpp"
#include "synmarket/data.hpp"
#include "synmarket/market.hpp"

namespace synmarket {

class TrainingError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct EvolutionConfig {
    std::size_t generations = 50;
    std::size_t population_size = 5;
    double initial_cash = 5.0;
    double liquidity_b = 1.0;
    double initial_price = 0.5;
    double mutation_center_sigma = 0.05;
    double mutation_log_sigma = 0.1;
    double asset_flip_prob = 0.02;
    std::uint64_t master_seed = 20220222;
    std::uint32_t max_rounds = 100;
    double trade_size = 1.0;
    double min_fraction = 0.01;
    double margin = 0.0;

    MarketConfig market() const;
    void validate() const;

    bool operator==(const EvolutionConfig&) const = default;
};

struct GenerationStats {
    std::size_t generation = 0;
    std::map<std::uint64_t, double> profit;
    double rmse = 0.0;
    double coverage = 0.0;
    std::size_t survivor_count = 0;
    // running minimum of rmse up to and including this generation
    double best_rmse = 0.0;
};

/// One market per training claim with freshly funded agents. Each market's
/// rng stream is derived from (master_seed, generation, claim id), so the
/// result does not depend on `jobs` or on claim order.
GenerationStats evaluate_generation(std::span<const Genome> population, std::span<const TrainingPoint> claims,
                                    const EvolutionConfig& config, std::size_t generation, std::size_t jobs = 1);

/// Profit of one agent's holding on a settled claim: shares pay 1 when the
/// asset matches the label.
double settle(const Holding& holding, Label label);

/// child.center = alpha * a.center + (1 - alpha) * b.center
std::vector<double> blend_centers(std::span<const double> a, std::span<const double> b, double alpha);

void mutate(Genome& genome, const EvolutionConfig& config, Rng& rng);

/// Keeps agents with strictly positive profit unchanged and refills the
/// population with mutated crossover offspring of profit-weighted parents.
/// With no survivors the population is re-anchored on the training points.
std::vector<Genome> select_and_reproduce(std::span<const Genome> population, const GenerationStats& stats,
                                         std::span<const TrainingPoint> train_points, const EvolutionConfig& config,
                                         Rng& rng, std::uint64_t& next_id);

struct TrainedModel {
    std::vector<Genome> genomes;
    NormalizationParams normalizer;
    std::vector<std::string> feature_names;
    EvolutionConfig config;
    std::size_t best_generation = 0;
    double best_rmse = 0.0;
};

struct TrainingRun {
    TrainedModel model;
    std::vector<GenerationStats> history;
};

using GenerationCallback = std::function<void(const GenerationStats&)>;

/// Evolves the population for `config.generations` rounds of selection and
/// keeps the evaluated population with the lowest training RMSE. The model's
/// normalizer and feature names are left empty.
TrainingRun train(std::span<const TrainingPoint> train_points, const EvolutionConfig& config, std::size_t jobs = 1,
                  const GenerationCallback& on_generation = {});

/// Fits the normalizer on `records`, normalizes them and trains.
TrainingRun train_model(const std::vector<ClaimRecord>& records, const FeatureSchema& schema,
                        const EvolutionConfig& config, std::size_t jobs = 1,
                        const GenerationCallback& on_generation = {});

std::vector<TrainingPoint> to_training_points(const std::vector<ClaimRecord>& records,
                                              const NormalizationParams& normalizer);

}  // namespace synmarket
