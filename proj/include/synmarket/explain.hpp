#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "synmarket/agents.hpp"
#include "synmarket/data.hpp"
#include "synmarket/eval.hpp"
#include "synmarket/market.hpp"

namespace synmarket {

class ExplainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline constexpr std::size_t kTopFeatures = 10;

struct AgentParticipation {
    std::uint64_t agent_id = 0;
    Asset asset = Asset::Yes;
    std::size_t trades = 0;
    double shares = 0.0;
    double spend = 0.0;
    double membership = 0.0;  // g(x) = r^2 - |x - c|^2
    double belief = 0.5;
    // own-asset price when the agent first and last traded, before its trade
    // and after it respectively
    double own_price_open = 0.5;
    double own_price_close = 0.5;

    bool operator==(const AgentParticipation&) const = default;
};

struct FeatureContribution {
    std::size_t index = 0;
    std::string feature;
    double contribution = 0.0;  // (x_i - c_i)^2

    bool operator==(const FeatureContribution&) const = default;
};

struct AgentAttribution {
    std::uint64_t agent_id = 0;
    double radius = 0.0;
    double squared_distance = 0.0;
    std::vector<double> contributions;  // one per feature, sums to squared_distance
    std::vector<FeatureContribution> top;

    bool operator==(const AgentAttribution&) const = default;
};

struct AgentDeficit {
    std::uint64_t agent_id = 0;
    Asset asset = Asset::Yes;
    double deficit = 0.0;  // -g(x); positive when the claim is outside the ball

    bool operator==(const AgentDeficit&) const = default;
};

struct ExplanationReport {
    std::string claim_id;
    bool scored = false;
    std::optional<double> score;
    Prediction prediction = Prediction::Abstain;
    double open_price_yes = 0.5;
    double close_price_yes = 0.5;
    double revenue = 0.0;
    std::size_t population_size = 0;
    double participation_fraction = 0.0;
    std::vector<AgentParticipation> participation;
    std::vector<AgentAttribution> attributions;
    std::vector<AgentDeficit> non_participants;
    std::optional<std::uint64_t> nearest_agent;
    std::vector<TradeRecord> ledger;
    std::string narrative;

    bool operator==(const ExplanationReport&) const = default;
};

/// Builds the explanation of one market. `agents` must be the genomes the
/// market ran with; a ledger that references unknown agents is rejected.
ExplanationReport explain(const std::string& claim_id, const MarketResult& result, std::span<const Genome> agents,
                          std::span<const double> point, const FeatureSchema& schema);

enum class RenderFormat { Json, Markdown };

std::string render(const ExplanationReport& report, RenderFormat format);

ExplanationReport report_from_json(const std::string& text);

}  // namespace synmarket
