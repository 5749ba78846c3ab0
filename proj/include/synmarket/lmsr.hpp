#pragma once

// Logarithmic market scoring rule market maker for one binary claim.
//
//   C(q) = b * ln(exp(q_yes / b) + exp(q_no / b))
//   price_yes = exp(q_yes / b) / (exp(q_yes / b) + exp(q_no / b))
//
// A purchase of `shares` of one asset costs C(q') - C(q). Costs are evaluated
// in the form b * log1p(p * expm1(shares / b)), which depends only on the
// asset's current quoted price and stays accurate for tiny trades.

#include <cstdint>
#include <stdexcept>
#include <string_view>

namespace synmarket {

enum class Asset { Yes, No };

std::string_view to_string(Asset asset);
Asset parse_asset(std::string_view token);
inline Asset opposite(Asset a) { return a == Asset::Yes ? Asset::No : Asset::Yes; }

class MarketError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct MarketState {
    double q_yes = 0.0;
    double q_no = 0.0;
    double liquidity_b = 1.0;
    double revenue = 0.0;
};

struct TradeRecord {
    std::uint64_t agent_id = 0;
    std::uint32_t round = 0;
    Asset asset = Asset::Yes;
    double shares = 0.0;
    double cost = 0.0;
    double price_before = 0.5;  // Yes-asset quotes
    double price_after = 0.5;

    bool operator==(const TradeRecord&) const = default;
};

/// Opens a market quoting `initial_price_yes` with q_no = 0 and
/// q_yes = b * logit(p).
MarketState new_market(double liquidity_b, double initial_price_yes);

double cost_function(const MarketState& state);

// Clamped to [2^-53, 1 - 2^-53] so both prices stay strictly inside (0,1)
// and sum to exactly one even for saturated quantities.
double price_yes(const MarketState& state);
double price_no(const MarketState& state);
double price_of(const MarketState& state, Asset asset);

/// Cost of buying `shares` of an asset currently priced `own_price` in a
/// market with liquidity `liquidity_b`.
double cost_at_price(double own_price, double shares, double liquidity_b);

/// Largest share amount whose cost does not exceed `budget`.
double affordable_shares(double own_price, double budget, double liquidity_b);

double cost_to_buy(const MarketState& state, Asset asset, double shares);

TradeRecord execute_buy(MarketState& state, std::uint64_t agent_id, Asset asset, double shares,
                        std::uint32_t round);

}  // namespace synmarket
