#include "synmarket/lmsr.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace synmarket {
namespace {

constexpr double kPriceFloor = 0x1p-53;
constexpr double kPriceCeil = 1.0 - 0x1p-53;

double logistic(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

void check_liquidity(double b) {
    if (!(b > 0.0) || !std::isfinite(b)) throw MarketError("liquidity must be a positive finite number");
}

double raw_price_yes(const MarketState& s) { return logistic((s.q_yes - s.q_no) / s.liquidity_b); }

// ln(1 + e^a) without overflow
double log1p_exp(double a) { return a > 0.0 ? a + std::log1p(std::exp(-a)) : std::log1p(std::exp(a)); }

// ln(e^x - 1) for x > 0
double log_expm1(double x) { return x > 1.0 ? x + std::log1p(-std::exp(-x)) : std::log(std::expm1(x)); }

// Past this scaled size the direct forms risk overflow in expm1(x) / p.
constexpr double kLogSpaceFrom = 30.0;

}  // namespace

std::string_view to_string(Asset asset) { return asset == Asset::Yes ? "Yes" : "No"; }

Asset parse_asset(std::string_view token) {
    if (token == "Yes") return Asset::Yes;
    if (token == "No") return Asset::No;
    throw MarketError("unknown asset '" + std::string(token) + "'");
}

MarketState new_market(double liquidity_b, double initial_price_yes) {
    check_liquidity(liquidity_b);
    if (!(initial_price_yes > 0.0 && initial_price_yes < 1.0)) {
        throw MarketError("initial price must lie strictly between 0 and 1");
    }
    MarketState s;
    s.liquidity_b = liquidity_b;
    s.q_yes = liquidity_b * std::log(initial_price_yes / (1.0 - initial_price_yes));
    return s;
}

double cost_function(const MarketState& s) {
    const double a = s.q_yes / s.liquidity_b;
    const double c = s.q_no / s.liquidity_b;
    const double hi = std::max(a, c);
    return s.liquidity_b * (hi + std::log1p(std::exp(-std::abs(a - c))));
}

double price_yes(const MarketState& s) { return std::clamp(raw_price_yes(s), kPriceFloor, kPriceCeil); }

double price_no(const MarketState& s) { return 1.0 - price_yes(s); }

double price_of(const MarketState& s, Asset asset) { return asset == Asset::Yes ? price_yes(s) : price_no(s); }

double cost_at_price(double own_price, double shares, double liquidity_b) {
    if (!(shares > 0.0)) throw MarketError("share amount must be positive");
    const double x = shares / liquidity_b;
    const double cost = x > kLogSpaceFrom ? liquidity_b * log1p_exp(std::log(own_price) + log_expm1(x))
                                          : liquidity_b * std::log1p(own_price * std::expm1(x));
    // a share never costs more than its payout; rounding near p = 1 can say otherwise
    return std::min(cost, shares);
}

double affordable_shares(double own_price, double budget, double liquidity_b) {
    if (!(budget > 0.0)) return 0.0;
    const double x = budget / liquidity_b;
    double shares = x > kLogSpaceFrom ? liquidity_b * log1p_exp(log_expm1(x) - std::log(own_price))
                                      : liquidity_b * std::log1p(std::expm1(x) / own_price);
    // the closed-form inverse can overshoot by a few ulps
    for (int i = 0; i < 64 && cost_at_price(own_price, shares, liquidity_b) > budget; ++i) {
        shares = std::nextafter(shares, 0.0);
    }
    if (cost_at_price(own_price, shares, liquidity_b) > budget) {
        // still over: bisect, keeping the affordable end
        double lo = 0.0, hi = shares;
        for (int i = 0; i < 200 && lo < hi; ++i) {
            const double mid = lo + 0.5 * (hi - lo);
            if (mid <= lo || mid >= hi) break;
            (cost_at_price(own_price, mid, liquidity_b) <= budget ? lo : hi) = mid;
        }
        shares = lo;
    }
    return shares;
}

double cost_to_buy(const MarketState& s, Asset asset, double shares) {
    check_liquidity(s.liquidity_b);
    if (!(shares > 0.0)) throw MarketError("share amount must be positive");
    // Exact C(q') - C(q) from the unclamped state. The quoted price is floored
    // at 2^-53, which would overcharge badly for saturated markets.
    const double b = s.liquidity_b;
    const double z = asset == Asset::Yes ? (s.q_yes - s.q_no) / b : (s.q_no - s.q_yes) / b;
    const double x = shares / b;
    const double p = logistic(z);
    if (z < -700.0 || x > kLogSpaceFrom) {
        const double log_p = -log1p_exp(-z);
        return std::min(b * log1p_exp(log_p + log_expm1(x)), shares);
    }
    return std::min(b * std::log1p(p * std::expm1(x)), shares);
}

TradeRecord execute_buy(MarketState& s, std::uint64_t agent_id, Asset asset, double shares, std::uint32_t round) {
    TradeRecord rec;
    rec.agent_id = agent_id;
    rec.round = round;
    rec.asset = asset;
    rec.shares = shares;
    rec.price_before = price_yes(s);
    rec.cost = cost_to_buy(s, asset, shares);
    (asset == Asset::Yes ? s.q_yes : s.q_no) += shares;
    s.revenue += rec.cost;
    rec.price_after = price_yes(s);
    return rec;
}

}  // namespace synmarket
