#pragma once

// JSON forms of the artifacts written to disk: genomes and trained models,
// trade ledgers (JSON lines), training logs, metric reports and fold plans.

#include <string>
#include <vector>

#include "json.hpp"
#include "synmarket/eval.hpp"
#include "synmarket/evolution.hpp"
#include "synmarket/lmsr.hpp"

namespace synmarket {

using Json = nlohmann::ordered_json;

Json to_json(const Genome& genome);
Genome genome_from_json(const Json& j);

Json to_json(const TradeRecord& trade);
TradeRecord trade_from_json(const Json& j);

std::string ledger_to_jsonl(const std::vector<TradeRecord>& ledger);
std::vector<TradeRecord> ledger_from_jsonl(const std::string& text);

Json to_json(const NormalizationParams& params);
NormalizationParams normalizer_from_json(const Json& j);

Json to_json(const EvolutionConfig& config);
EvolutionConfig config_from_json(const Json& j);

Json to_json(const TrainedModel& model);
TrainedModel model_from_json(const Json& j);

Json to_json(const GenerationStats& stats);

Json to_json(const MetricsReport& report);

Json to_json(const FoldPlan& plan);

Json to_json(const ClaimScore& score, const std::map<std::string, Label>& labels);

/// Reconstructs a market result from its ledger; close price is the last
/// post-trade quote, or `open_price_yes` for an empty ledger.
MarketResult market_from_ledger(const std::vector<TradeRecord>& ledger, double open_price_yes, double liquidity_b);

}  // namespace synmarket
