#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "synmarket/agents.hpp"
#include "synmarket/lmsr.hpp"
#include "synmarket/rng.hpp"

namespace synmarket {

struct MarketConfig {
    double liquidity_b = 1.0;
    double initial_price = 0.5;
    double initial_cash = 5.0;
    std::uint32_t max_rounds = 100;
    double trade_size = 1.0;
    double min_fraction = 0.01;
    double margin = 0.0;

    DecisionConfig decision() const { return {liquidity_b, trade_size, min_fraction, margin}; }
};

struct Holding {
    Asset asset = Asset::Yes;
    double shares = 0.0;
    double spend = 0.0;

    bool operator==(const Holding&) const = default;
};

struct MarketResult {
    double open_price_yes = 0.5;
    double close_price_yes = 0.5;
    std::vector<TradeRecord> ledger;
    bool scored = false;
    std::uint32_t rounds_run = 0;
    std::map<std::uint64_t, Holding> holdings;
    MarketState final_state;
};

/// Resets every agent to `config.initial_cash` and runs trading rounds until a
/// round passes without a trade or `max_rounds` is reached. Each round visits
/// the agents in an order shuffled by `rng`; trades execute immediately.
MarketResult run_market(std::vector<AgentState>& agents, std::span<const double> point, const MarketConfig& config,
                        Rng& rng);

/// Convenience overload building fresh agent states from genomes.
MarketResult run_market(std::span<const Genome> genomes, std::span<const double> point, const MarketConfig& config,
                        Rng& rng);

}  // namespace synmarket
