#include <cmath>
#include <random>

#include "doctest.h"
#include "synmarket/lmsr.hpp"

using namespace synmarket;

// Reference values from tests/oracles/derive_values.py (50-digit mpmath).
namespace oracle {
constexpr double kPriceQ1 = 0.73105857863000487925;
constexpr double kCostOneYes = 0.62011450695827752463;
constexpr double kLogit07311 = 1.0002106860244512469;
constexpr double kPriceAfter[] = {0.5, 0.73105857863000487925, 0.88079707797788244406, 0.95257412682243321912,
                                  0.98201379003790844197, 0.99330714907571514444, 0.99752737684336522567};
constexpr double kCumCost[] = {0.0, 0.62011450695827752463, 1.433780830483027187, 2.3554401710137967493,
                               3.3250027473578644309, 4.3135681679291727592, 5.3093285045777851401};
}  // namespace oracle

TEST_CASE("new_market") {
    const auto m = new_market(1.0, 0.5);
    CHECK(m.q_yes == 0.0);
    CHECK(m.q_no == 0.0);
    CHECK(m.revenue == 0.0);
    CHECK(price_yes(m) == 0.5);

    const auto n = new_market(1.0, 0.7311);
    CHECK(n.q_yes == doctest::Approx(oracle::kLogit07311).epsilon(1e-13));
    CHECK(n.q_no == 0.0);
    CHECK(price_yes(n) == doctest::Approx(0.7311).epsilon(1e-14));

    CHECK_THROWS_AS(new_market(1.0, 0.0), MarketError);
    CHECK_THROWS_AS(new_market(1.0, 1.0), MarketError);
    CHECK_THROWS_AS(new_market(0.0, 0.5), MarketError);
    CHECK_THROWS_AS(new_market(1.0, std::nan("")), MarketError);
}

TEST_CASE("larger liquidity moves the price less") {
    auto thin = new_market(1.0, 0.5);
    auto deep = new_market(5.0, 0.5);
    CHECK(price_yes(deep) == 0.5);
    execute_buy(thin, 1, Asset::Yes, 1.0, 1);
    execute_buy(deep, 1, Asset::Yes, 1.0, 1);
    CHECK(price_yes(deep) < price_yes(thin));
    CHECK(price_yes(deep) > 0.5);
}

TEST_CASE("price_yes values and stability") {
    CHECK(price_yes(MarketState{0, 0, 1, 0}) == 0.5);
    CHECK(price_yes(MarketState{1, 0, 1, 0}) == doctest::Approx(oracle::kPriceQ1).epsilon(1e-15));
    const MarketState big{1000, 0, 1, 0};
    CHECK(std::isfinite(price_yes(big)));
    CHECK(price_yes(big) < 1.0);
    CHECK(price_no(big) > 0.0);
    CHECK(price_yes(big) + price_no(big) == 1.0);
    CHECK(std::isfinite(cost_function(MarketState{1e6, -1e6, 0.5, 0})));
    CHECK(price_of(big, Asset::No) == price_no(big));
}

TEST_CASE("cost_to_buy") {
    const auto m = new_market(1.0, 0.5);
    CHECK(cost_to_buy(m, Asset::Yes, 1.0) == doctest::Approx(oracle::kCostOneYes).epsilon(1e-15));
    CHECK(cost_to_buy(m, Asset::No, 1.0) == doctest::Approx(oracle::kCostOneYes).epsilon(1e-15));
    CHECK_THROWS_AS(cost_to_buy(m, Asset::Yes, 0.0), MarketError);
    CHECK_THROWS_AS(cost_to_buy(m, Asset::Yes, -1.0), MarketError);

    auto stepwise = new_market(1.0, 0.5);
    const double first = execute_buy(stepwise, 1, Asset::Yes, 1.0, 1).cost;
    const double second = execute_buy(stepwise, 1, Asset::Yes, 1.0, 1).cost;
    CHECK(first + second == doctest::Approx(cost_to_buy(m, Asset::Yes, 2.0)).epsilon(1e-14));
}

TEST_CASE("tiny buys cost the marginal price") {
    for (double q : {-3.0, 0.0, 0.4, 2.5}) {
        const MarketState m{q, 0.0, 1.0, 0.0};
        const double eps = 1e-9;
        const double p = price_yes(m);
        // exact cost is p*eps + p(1-p)eps^2/2 + ..., so relative error is about (1-p)eps/2
        CHECK(std::abs(cost_to_buy(m, Asset::Yes, eps) / (eps * p) - 1.0) <= 1e-9);
    }
}

TEST_CASE("cost stays below the share count and above zero") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> q(-50, 50), s(1e-6, 20), b(0.1, 10);
    for (int i = 0; i < 2000; ++i) {
        const MarketState m{q(rng), q(rng), b(rng), 0};
        const double shares = s(rng);
        for (Asset a : {Asset::Yes, Asset::No}) {
            const double c = cost_to_buy(m, a, shares);
            CHECK(c > 0.0);
            CHECK(c <= shares);
            // near-certain prices make the gap smaller than an ulp
            if (price_of(m, a) < 0.999) CHECK(c < shares);
        }
    }
}

TEST_CASE("execute_buy records and the unit-buy ladder") {
    auto m = new_market(1.0, 0.5);
    const auto r = execute_buy(m, 7, Asset::Yes, 1.0, 2);
    CHECK(r.agent_id == 7);
    CHECK(r.round == 2);
    CHECK(r.asset == Asset::Yes);
    CHECK(r.shares == 1.0);
    CHECK(r.cost == doctest::Approx(oracle::kCostOneYes).epsilon(1e-15));
    CHECK(r.price_before == 0.5);
    CHECK(r.price_after == doctest::Approx(oracle::kPriceQ1).epsilon(1e-15));

    const auto back = execute_buy(m, 8, Asset::No, 1.0, 2);
    CHECK(back.price_after == 0.5);
    CHECK(m.revenue == doctest::Approx(1.0).epsilon(1e-15));

    auto ladder = new_market(1.0, 0.5);
    for (int k = 1; k <= 6; ++k) {
        execute_buy(ladder, 1, Asset::Yes, 1.0, 1);
        CHECK(price_yes(ladder) == doctest::Approx(oracle::kPriceAfter[k]).epsilon(1e-14));
        CHECK(ladder.revenue == doctest::Approx(oracle::kCumCost[k]).epsilon(1e-14));
    }
}

TEST_CASE("property: normalization, monotonicity and conservation over random sequences") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> shares(0.01, 3.0), b(0.1, 10);
    std::bernoulli_distribution yes(0.5);
    for (int seq = 0; seq < 300; ++seq) {
        auto m = new_market(b(rng), 0.5);
        const double c0 = cost_function(m);
        double total = 0.0;
        double yes_shares = 0.0, no_shares = 0.0;
        for (int t = 0; t < 30; ++t) {
            const Asset a = yes(rng) ? Asset::Yes : Asset::No;
            const double before = price_yes(m);
            const auto r = execute_buy(m, 1, a, shares(rng), 1);
            total += r.cost;
            (a == Asset::Yes ? yes_shares : no_shares) += r.shares;
            CHECK(std::abs(price_yes(m) + price_no(m) - 1.0) <= 1e-12);
            if (before < 1.0 - 1e-12 && before > 1e-12) {
                if (a == Asset::Yes) CHECK(r.price_after > before);
                else CHECK(r.price_after < before);
            }
        }
        CHECK(std::abs(m.revenue - total) <= 1e-9);
        CHECK(std::abs(m.revenue - (cost_function(m) - c0)) <= 1e-9);
        const double worst_payout = std::max(yes_shares, no_shares);
        CHECK(worst_payout - m.revenue <= m.liquidity_b * std::log(2.0) + 1e-9);
    }
}

TEST_CASE("saturated markets charge the exact cost") {
    // true No price e^-1000: far below the 2^-53 quote floor
    const MarketState m{1000.0, 0.0, 1.0, 0.0};
    const double cost = cost_to_buy(m, Asset::No, 5.0);
    CHECK(cost >= 0.0);
    CHECK(cost < 1e-300);
    // the aggregate still equals the sum of its parts
    const MarketState thin{-40.0, 0.0, 0.1, 0.0};
    auto stepwise = thin;
    double paid = 0;
    for (int i = 0; i < 4; ++i) paid += execute_buy(stepwise, 1, Asset::Yes, 1.25, 1).cost;
    CHECK(paid == doctest::Approx(cost_to_buy(thin, Asset::Yes, 5.0)).epsilon(1e-12));
    CHECK(std::abs(paid - (cost_function(stepwise) - cost_function(thin))) <= 1e-9);
}

TEST_CASE("affordable_shares inverts the cost") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> p(1e-6, 1 - 1e-6), budget(1e-4, 50), b(0.1, 10);
    for (int i = 0; i < 5000; ++i) {
        const double pi = p(rng), bi = budget(rng), li = b(rng);
        const double s = affordable_shares(pi, bi, li);
        REQUIRE(s > 0.0);
        CHECK(cost_at_price(pi, s, li) <= bi);
        CHECK(cost_at_price(pi, s * (1 + 1e-9), li) > bi * (1 - 1e-9));
    }
    CHECK(affordable_shares(0.5, 0.0, 1.0) == 0.0);
    CHECK(std::isfinite(affordable_shares(0.5, 1e6, 1.0)));
    CHECK(cost_at_price(0.5, affordable_shares(0.5, 1e6, 1.0), 1.0) <= 1e6);
}

TEST_CASE("asset tokens") {
    CHECK(to_string(Asset::Yes) == "Yes");
    CHECK(parse_asset("No") == Asset::No);
    CHECK(opposite(Asset::Yes) == Asset::No);
    CHECK_THROWS(parse_asset("maybe"));
}
