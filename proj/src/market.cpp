#include "synmarket/market.hpp"

#include <algorithm>
#include <numeric>

namespace synmarket {

MarketResult run_market(std::vector<AgentState>& agents, std::span<const double> point, const MarketConfig& config,
                        Rng& rng) {
    MarketState state = new_market(config.liquidity_b, config.initial_price);
    MarketResult result;
    result.open_price_yes = price_yes(state);
    for (auto& a : agents) a = AgentState::fresh(a.genome, config.initial_cash);

    const DecisionConfig decision = config.decision();
    std::vector<std::size_t> order(agents.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    for (std::uint32_t round = 1; round <= config.max_rounds; ++round) {
        std::shuffle(order.begin(), order.end(), rng);
        result.rounds_run = round;
        bool traded = false;
        for (const std::size_t i : order) {
            AgentState& agent = agents[i];
            const auto shares = decide(agent, point, price_yes(state), decision);
            if (!shares) continue;
            TradeRecord rec = execute_buy(state, agent.genome.id, agent.genome.asset_class, *shares, round);
            // decide() prices from the quote; the executed cost can exceed
            // that estimate by an ulp, never by more
            agent.cash = std::max(0.0, agent.cash - rec.cost);
            agent.spend += rec.cost;
            agent.shares_held += rec.shares;
            Holding& h = result.holdings[agent.genome.id];
            h.asset = rec.asset;
            h.shares += rec.shares;
            h.spend += rec.cost;
            result.ledger.push_back(rec);
            traded = true;
        }
        if (!traded) break;
    }

    result.scored = !result.ledger.empty();
    result.close_price_yes = result.scored ? price_yes(state) : result.open_price_yes;
    result.final_state = state;
    return result;
}

MarketResult run_market(std::span<const Genome> genomes, std::span<const double> point, const MarketConfig& config,
                        Rng& rng) {
    std::vector<AgentState> agents;
    agents.reserve(genomes.size());
    for (const auto& g : genomes) agents.push_back(AgentState::fresh(g, config.initial_cash));
    return run_market(agents, point, config, rng);
}

}  // namespace synmarket
