#include <cmath>
#include <random>

#include "doctest.h"
#include "synmarket/explain.hpp"
#include "synmarket/serialize.hpp"

using namespace synmarket;

namespace {

MarketResult run(std::span<const Genome> agents, std::span<const double> x, std::uint64_t seed = 1) {
    Rng rng(seed);
    return run_market(agents, x, MarketConfig{}, rng);
}

}  // namespace

TEST_CASE("two-feature attribution") {
    const std::vector<Genome> agents{Genome{1, Asset::Yes, {0.5, 0.5}, 0.3, 50}};
    const std::vector<double> x{0.6, 0.6};
    const auto result = run(agents, x);
    REQUIRE(result.scored);
    const auto r = explain("c1", result, agents, x, FeatureSchema{{"alpha", "beta"}});
    REQUIRE(r.attributions.size() == 1);
    const auto& a = r.attributions[0];
    CHECK(a.contributions[0] == doctest::Approx(0.01).epsilon(1e-14));
    CHECK(a.contributions[1] == doctest::Approx(0.01).epsilon(1e-14));
    CHECK(a.squared_distance == doctest::Approx(0.02).epsilon(1e-14));
    REQUIRE(a.top.size() == 2);
    CHECK((a.top[0].feature == "alpha" || a.top[0].feature == "beta"));
    CHECK(r.participation.size() == 1);
    CHECK(r.participation[0].membership == doctest::Approx(0.07).epsilon(1e-14));
    CHECK(r.participation_fraction == 1.0);
}

TEST_CASE("participation rows follow the ledger") {
    const std::vector<Genome> agents{Genome{1, Asset::Yes, {0.4, 0.5}, 0.4, 40}, Genome{2, Asset::No, {0.6, 0.5}, 0.4, 80},
                                     Genome{3, Asset::Yes, {0.0, 0.0}, 0.05, 50}, Genome{4, Asset::No, {1.0, 1.0}, 0.05, 50}};
    const std::vector<double> x{0.5, 0.5};
    const auto result = run(agents, x);
    const auto r = explain("c2", result, agents, x, FeatureSchema::generic(2));
    CHECK(r.participation.size() == 2);
    CHECK(r.participation_fraction == 0.5);
    CHECK(r.non_participants.size() == 2);
    double spend = 0;
    for (const auto& p : r.participation) spend += p.spend;
    CHECK(spend == doctest::Approx(result.final_state.revenue).epsilon(1e-12));
    CHECK(r.revenue == doctest::Approx(result.final_state.revenue).epsilon(1e-12));
    CHECK(r.ledger == result.ledger);
}

TEST_CASE("property: attributions reconstruct membership") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0, 1);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<Genome> agents;
        for (std::uint64_t i = 1; i <= 5; ++i) {
            std::vector<double> c(15);
            for (double& v : c) v = u(rng);
            agents.push_back(Genome{i, u(rng) < 0.5 ? Asset::Yes : Asset::No, c, 0.5 + u(rng), 1 + 100 * u(rng)});
        }
        std::vector<double> x(15);
        for (double& v : x) v = u(rng);
        const auto r = explain("p", run(agents, x, trial), agents, x, FeatureSchema::generic(15));
        for (const auto& a : r.attributions) {
            double sum = 0;
            for (double c : a.contributions) sum += c;
            CHECK(std::abs(sum - a.squared_distance) <= 1e-9);
            CHECK(a.top.size() == kTopFeatures);
            for (std::size_t i = 1; i < a.top.size(); ++i) CHECK(a.top[i - 1].contribution >= a.top[i].contribution);
            const auto& g = *std::find_if(agents.begin(), agents.end(), [&](const Genome& x) { return x.id == a.agent_id; });
            CHECK(std::abs(g.radius * g.radius - sum - membership(g, x)) <= 1e-9);
        }
        CHECK(r.participation.size() + r.non_participants.size() == agents.size());
    }
}

TEST_CASE("abstain report names the nearest agent") {
    const std::vector<Genome> agents{Genome{1, Asset::Yes, {0.0, 0.0}, 0.1, 50}, Genome{2, Asset::No, {0.9, 0.9}, 0.1, 50}};
    const std::vector<double> x{0.7, 0.7};
    const auto r = explain("lonely", run(agents, x), agents, x, FeatureSchema::generic(2));
    CHECK_FALSE(r.scored);
    CHECK_FALSE(r.score);
    CHECK(r.prediction == Prediction::Abstain);
    REQUIRE(r.nearest_agent);
    CHECK(*r.nearest_agent == 2);
    CHECK(r.non_participants[1].deficit == doctest::Approx(0.08 - 0.01).epsilon(1e-14));
    CHECK(r.narrative.find("2") != std::string::npos);
    const std::string md = render(r, RenderFormat::Markdown);
    CHECK(md.find("UNSCORED") != std::string::npos);
    CHECK(md == render(r, RenderFormat::Markdown));
}

TEST_CASE("JSON rendering round-trips") {
    const std::vector<Genome> agents{Genome{1, Asset::Yes, {0.4, 0.5}, 0.4, 40}, Genome{2, Asset::No, {0.6, 0.5}, 0.4, 80}};
    const std::vector<double> x{0.5, 0.5};
    for (std::uint64_t seed : {1, 2, 3}) {
        const auto r = explain("rt", run(agents, x, seed), agents, x, FeatureSchema::generic(2));
        const std::string json = render(r, RenderFormat::Json);
        CHECK(report_from_json(json) == r);
        CHECK(render(report_from_json(json), RenderFormat::Json) == json);
    }
}

TEST_CASE("stale inputs are rejected") {
    const std::vector<Genome> agents{Genome{1, Asset::Yes, {0.5, 0.5}, 0.3, 50}};
    const std::vector<double> x{0.5, 0.5};
    const auto result = run(agents, x);
    REQUIRE_FALSE(result.ledger.empty());
    const std::vector<Genome> other{Genome{7, Asset::Yes, {0.5, 0.5}, 0.3, 50}};
    CHECK_THROWS_AS(explain("s", result, other, x, FeatureSchema::generic(2)), ExplainError);
    const std::vector<Genome> flipped{Genome{1, Asset::No, {0.5, 0.5}, 0.3, 50}};
    CHECK_THROWS_AS(explain("s", result, flipped, x, FeatureSchema::generic(2)), ExplainError);
    auto tampered = result;
    tampered.holdings.clear();
    CHECK_THROWS_AS(explain("s", tampered, agents, x, FeatureSchema::generic(2)), ExplainError);
}
