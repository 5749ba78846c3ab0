#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "synmarket/data.hpp"
#include "synmarket/evolution.hpp"
#include "synmarket/market.hpp"

namespace synmarket {

enum class Prediction { Replicable, NotReplicable, Abstain };

std::string_view to_string(Prediction p);

// Markets that traded but closed within this band around 0.5 carry no direction.
inline constexpr double kTieBand = 1e-9;

struct ClaimScore {
    std::string claim_id;
    std::optional<double> score;  // nullopt means unscored
    Prediction prediction = Prediction::Abstain;
    MarketResult market;          // full ledger kept inline
    std::vector<double> point;    // normalized features the market saw
};

Prediction classify(const MarketResult& market);

/// One market per claim with the model's agents; claim c uses the rng stream
/// derived from (seed, claim id).
std::vector<ClaimScore> score_claims(const TrainedModel& model, const std::vector<ClaimRecord>& claims,
                                     std::uint64_t seed, std::size_t jobs = 1);

struct Confusion {
    std::size_t tp = 0;  // predicted Replicable, actually Replicable
    std::size_t fn = 0;
    std::size_t tn = 0;
    std::size_t fp = 0;

    Confusion& operator+=(const Confusion& o);
    bool operator==(const Confusion&) const = default;
};

struct ClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

struct MetricsReport {
    std::size_t n_total = 0;
    std::size_t n_scored = 0;
    double coverage = 0.0;
    // classification metrics over the scored subset; unset when nothing scored
    std::optional<double> accuracy;
    std::optional<double> macro_precision;
    std::optional<double> macro_recall;
    std::optional<double> macro_f1;
    std::optional<ClassMetrics> replicable;
    std::optional<ClassMetrics> not_replicable;
    // over every labeled claim, abstentions contributing a 0.5 residual
    double rmse = 0.0;
    Confusion confusion;
};

MetricsReport metrics_from_counts(const Confusion& confusion, std::size_t n_total, double squared_error_sum,
                                  std::size_t n_labeled);

MetricsReport compute_metrics(const std::vector<ClaimScore>& scores, const std::map<std::string, Label>& labels);

std::map<std::string, Label> label_map(const std::vector<ClaimRecord>& records);

struct FoldResult {
    std::size_t fold = 0;
    MetricsReport report;
    std::vector<ClaimScore> scores;
    std::vector<GenerationStats> history;
    TrainedModel model;
};

struct CrossValidationResult {
    std::vector<FoldResult> folds;
    MetricsReport pooled;
};

/// Trains on all claims outside fold f (normalizer fitted on that split) and
/// scores fold f, for every fold. Every fold uses the same config and seed.
CrossValidationResult cross_validate(const std::vector<ClaimRecord>& dataset, const FeatureSchema& schema,
                                     const FoldPlan& plan, const EvolutionConfig& config, std::size_t jobs = 1);

}  // namespace synmarket
