#include "synmarket/explain.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <set>

#include "synmarket/kernels.hpp"
#include "synmarket/serialize.hpp"

namespace synmarket {
namespace {

std::string fixed(double v, int digits = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

double own_price(Asset asset, double price_yes) { return asset == Asset::Yes ? price_yes : 1.0 - price_yes; }

AgentAttribution attribute(const Genome& g, std::span<const double> point, const FeatureSchema& schema) {
    AgentAttribution a;
    a.agent_id = g.id;
    a.radius = g.radius;
    a.contributions.resize(point.size());
    kernels::squared_deviations(point, g.center, a.contributions);
    a.squared_distance = std::accumulate(a.contributions.begin(), a.contributions.end(), 0.0);
    std::vector<std::size_t> order(point.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    const std::size_t k = std::min(kTopFeatures, order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                      [&](std::size_t x, std::size_t y) {
                          if (a.contributions[x] != a.contributions[y]) return a.contributions[x] > a.contributions[y];
                          return x < y;
                      });
    for (std::size_t i = 0; i < k; ++i) {
        a.top.push_back({order[i], schema.names.at(order[i]), a.contributions[order[i]]});
    }
    return a;
}

std::string narrate(const ExplanationReport& r) {
    std::string text;
    if (!r.scored || r.prediction == Prediction::Abstain) {
        text = "UNSCORED: ";
        text += r.scored ? "agents traded but the market closed at an even price, so it carries no direction."
                         : "no agent traded on this claim.";
        if (r.nearest_agent) {
            const auto it = std::find_if(r.non_participants.begin(), r.non_participants.end(),
                                         [&](const AgentDeficit& d) { return d.agent_id == *r.nearest_agent; });
            if (it != r.non_participants.end()) {
                text += " Nearest agent: " + std::to_string(it->agent_id) + " (" + std::string(to_string(it->asset)) +
                        " specialist), membership deficit " + fixed(it->deficit, 6) +
                        (it->deficit > 0.0 ? "; the claim lies outside its region by that much squared distance."
                                           : "; the claim lies inside its region but the agent saw no edge.");
            }
        }
        return text;
    }
    text = std::to_string(r.participation.size()) + " of " + std::to_string(r.population_size) +
           " agents traded (participation " + fixed(r.participation_fraction, 2) + "). The will-replicate asset moved from " +
           fixed(r.open_price_yes) + " to " + fixed(r.close_price_yes) + ", scoring the claim " +
           std::string(to_string(r.prediction)) + ".";
    for (const auto& p : r.participation) {
        text += " Agent " + std::to_string(p.agent_id) + " (" + std::string(to_string(p.asset)) + ") bought " +
                fixed(p.shares) + " shares for " + fixed(p.spend) + ": the claim sits " + fixed(p.membership, 6) +
                " inside its region, giving belief " + fixed(p.belief) + " against an own-asset price of " +
                fixed(p.own_price_open) + " that rose to " + fixed(p.own_price_close) + ".";
    }
    return text;
}

}  // namespace

ExplanationReport explain(const std::string& claim_id, const MarketResult& result, std::span<const Genome> agents,
                          std::span<const double> point, const FeatureSchema& schema) {
    if (schema.dimension() != point.size()) throw ExplainError("schema does not match the claim's dimension");
    std::map<std::uint64_t, const Genome*> by_id;
    for (const auto& g : agents) {
        if (g.center.size() != point.size()) throw ExplainError("agent " + std::to_string(g.id) + " has the wrong dimension");
        by_id[g.id] = &g;
    }

    ExplanationReport r;
    r.claim_id = claim_id;
    r.scored = result.scored;
    r.prediction = classify(result);
    if (r.prediction != Prediction::Abstain) r.score = result.close_price_yes;
    r.open_price_yes = result.open_price_yes;
    r.close_price_yes = result.close_price_yes;
    r.population_size = agents.size();
    r.ledger = result.ledger;

    std::map<std::uint64_t, AgentParticipation> rows;
    for (const auto& t : result.ledger) {
        const auto it = by_id.find(t.agent_id);
        if (it == by_id.end()) throw ExplainError("ledger references unknown agent " + std::to_string(t.agent_id));
        const Genome& g = *it->second;
        if (t.asset != g.asset_class) {
            throw ExplainError("ledger trade by agent " + std::to_string(g.id) + " does not match its asset class");
        }
        auto [row, inserted] = rows.try_emplace(g.id);
        AgentParticipation& p = row->second;
        if (inserted) {
            p.agent_id = g.id;
            p.asset = g.asset_class;
            p.membership = membership(g, point);
            p.belief = belief(g, point);
            p.own_price_open = own_price(g.asset_class, t.price_before);
        }
        ++p.trades;
        p.shares += t.shares;
        p.spend += t.cost;
        p.own_price_close = own_price(g.asset_class, t.price_after);
        r.revenue += t.cost;
    }
    if (rows.size() != result.holdings.size() ||
        !std::all_of(rows.begin(), rows.end(), [&](const auto& kv) { return result.holdings.contains(kv.first); })) {
        throw ExplainError("market holdings do not match its ledger");
    }

    for (const auto& g : agents) {
        if (const auto it = rows.find(g.id); it != rows.end()) {
            r.participation.push_back(it->second);
            r.attributions.push_back(attribute(g, point, schema));
        } else {
            r.non_participants.push_back({g.id, g.asset_class, -membership(g, point)});
        }
    }
    r.participation_fraction =
        agents.empty() ? 0.0 : static_cast<double>(r.participation.size()) / static_cast<double>(agents.size());
    if (r.prediction == Prediction::Abstain && !r.non_participants.empty()) {
        const auto nearest = std::min_element(r.non_participants.begin(), r.non_participants.end(),
                                              [](const AgentDeficit& a, const AgentDeficit& b) { return a.deficit < b.deficit; });
        r.nearest_agent = nearest->agent_id;
    }
    r.narrative = narrate(r);
    return r;
}

namespace {

Json participation_json(const AgentParticipation& p) {
    return Json{{"agent_id", p.agent_id},       {"asset", std::string(to_string(p.asset))},
                {"trades", p.trades},           {"shares", p.shares},
                {"spend", p.spend},             {"membership", p.membership},
                {"belief", p.belief},           {"own_price_open", p.own_price_open},
                {"own_price_close", p.own_price_close}};
}

Json attribution_json(const AgentAttribution& a) {
    Json top = Json::array();
    for (const auto& f : a.top) top.push_back(Json{{"index", f.index}, {"feature", f.feature}, {"contribution", f.contribution}});
    return Json{{"agent_id", a.agent_id},
                {"radius", a.radius},
                {"squared_distance", a.squared_distance},
                {"contributions", a.contributions},
                {"top", std::move(top)}};
}

std::string render_json(const ExplanationReport& r) {
    Json participation = Json::array();
    for (const auto& p : r.participation) participation.push_back(participation_json(p));
    Json attributions = Json::array();
    for (const auto& a : r.attributions) attributions.push_back(attribution_json(a));
    Json non_participants = Json::array();
    for (const auto& d : r.non_participants) {
        non_participants.push_back(
            Json{{"agent_id", d.agent_id}, {"asset", std::string(to_string(d.asset))}, {"deficit", d.deficit}});
    }
    Json ledger = Json::array();
    for (const auto& t : r.ledger) ledger.push_back(to_json(t));
    const Json doc{{"claim_id", r.claim_id},
                   {"scored", r.scored},
                   {"score", r.score ? Json(*r.score) : Json("UNSCORED")},
                   {"prediction", std::string(to_string(r.prediction))},
                   {"open_price_yes", r.open_price_yes},
                   {"close_price_yes", r.close_price_yes},
                   {"revenue", r.revenue},
                   {"population_size", r.population_size},
                   {"participation_fraction", r.participation_fraction},
                   {"participation", std::move(participation)},
                   {"feature_attributions", std::move(attributions)},
                   {"non_participants", std::move(non_participants)},
                   {"nearest_agent", r.nearest_agent ? Json(*r.nearest_agent) : Json(nullptr)},
                   {"ledger", std::move(ledger)},
                   {"narrative", r.narrative}};
    return doc.dump(2) + "\n";
}

std::string render_markdown(const ExplanationReport& r) {
    std::string md = "# Claim " + r.claim_id + "\n\n";
    md += "- Score: " + (r.score ? fixed(*r.score) + " (" + std::string(to_string(r.prediction)) + ")" : std::string("UNSCORED")) + "\n";
    md += "- Price path (will replicate): " + fixed(r.open_price_yes) + " -> " + fixed(r.close_price_yes) + "\n";
    md += "- Participation: " + std::to_string(r.participation.size()) + "/" + std::to_string(r.population_size) +
          " agents (" + fixed(r.participation_fraction, 2) + ")\n";
    md += "- Market revenue: " + fixed(r.revenue) + "\n\n";
    md += r.narrative + "\n";

    if (!r.participation.empty()) {
        md += "\n## Participants\n\n| agent | asset | trades | shares | spend | g(x) | belief |\n|---|---|---|---|---|---|---|\n";
        for (const auto& p : r.participation) {
            md += "| " + std::to_string(p.agent_id) + " | " + std::string(to_string(p.asset)) + " | " +
                  std::to_string(p.trades) + " | " + fixed(p.shares) + " | " + fixed(p.spend) + " | " +
                  fixed(p.membership, 6) + " | " + fixed(p.belief) + " |\n";
        }
    }
    if (!r.ledger.empty()) {
        md += "\n## Ledger\n\n| round | agent | asset | shares | cost | price before | price after |\n|---|---|---|---|---|---|---|\n";
        for (const auto& t : r.ledger) {
            md += "| " + std::to_string(t.round) + " | " + std::to_string(t.agent_id) + " | " +
                  std::string(to_string(t.asset)) + " | " + fixed(t.shares) + " | " + fixed(t.cost) + " | " +
                  fixed(t.price_before) + " | " + fixed(t.price_after) + " |\n";
        }
    }
    if (!r.attributions.empty()) {
        md += "\n## Feature attributions\n";
        for (const auto& a : r.attributions) {
            md += "\nAgent " + std::to_string(a.agent_id) + ": squared distance " + fixed(a.squared_distance, 6) +
                  " of radius^2 " + fixed(a.radius * a.radius, 6) + "\n\n";
            for (const auto& f : a.top) md += "- " + f.feature + ": " + fixed(f.contribution, 6) + "\n";
        }
    }
    if (!r.non_participants.empty()) {
        md += "\n## Non-participants\n\n| agent | asset | deficit -g(x) |\n|---|---|---|\n";
        for (const auto& d : r.non_participants) {
            md += "| " + std::to_string(d.agent_id) + " | " + std::string(to_string(d.asset)) + " | " +
                  fixed(d.deficit, 6) + (r.nearest_agent == d.agent_id ? " (nearest)" : "") + " |\n";
        }
    }
    return md;
}

}  // namespace

std::string render(const ExplanationReport& report, RenderFormat format) {
    return format == RenderFormat::Json ? render_json(report) : render_markdown(report);
}

ExplanationReport report_from_json(const std::string& text) {
    const Json j = Json::parse(text);
    ExplanationReport r;
    r.claim_id = j.at("claim_id").get<std::string>();
    r.scored = j.at("scored").get<bool>();
    if (j.at("score").is_number()) r.score = j.at("score").get<double>();
    const std::string pred = j.at("prediction").get<std::string>();
    r.prediction = pred == "Replicable" ? Prediction::Replicable
                   : pred == "NotReplicable" ? Prediction::NotReplicable
                                             : Prediction::Abstain;
    r.open_price_yes = j.at("open_price_yes").get<double>();
    r.close_price_yes = j.at("close_price_yes").get<double>();
    r.revenue = j.at("revenue").get<double>();
    r.population_size = j.at("population_size").get<std::size_t>();
    r.participation_fraction = j.at("participation_fraction").get<double>();
    for (const auto& p : j.at("participation")) {
        AgentParticipation a;
        a.agent_id = p.at("agent_id").get<std::uint64_t>();
        a.asset = parse_asset(p.at("asset").get<std::string>());
        a.trades = p.at("trades").get<std::size_t>();
        a.shares = p.at("shares").get<double>();
        a.spend = p.at("spend").get<double>();
        a.membership = p.at("membership").get<double>();
        a.belief = p.at("belief").get<double>();
        a.own_price_open = p.at("own_price_open").get<double>();
        a.own_price_close = p.at("own_price_close").get<double>();
        r.participation.push_back(a);
    }
    for (const auto& a : j.at("feature_attributions")) {
        AgentAttribution at;
        at.agent_id = a.at("agent_id").get<std::uint64_t>();
        at.radius = a.at("radius").get<double>();
        at.squared_distance = a.at("squared_distance").get<double>();
        at.contributions = a.at("contributions").get<std::vector<double>>();
        for (const auto& f : a.at("top")) {
            at.top.push_back({f.at("index").get<std::size_t>(), f.at("feature").get<std::string>(),
                              f.at("contribution").get<double>()});
        }
        r.attributions.push_back(std::move(at));
    }
    for (const auto& d : j.at("non_participants")) {
        r.non_participants.push_back(
            {d.at("agent_id").get<std::uint64_t>(), parse_asset(d.at("asset").get<std::string>()), d.at("deficit").get<double>()});
    }
    if (!j.at("nearest_agent").is_null()) r.nearest_agent = j.at("nearest_agent").get<std::uint64_t>();
    for (const auto& t : j.at("ledger")) r.ledger.push_back(trade_from_json(t));
    r.narrative = j.at("narrative").get<std::string>();
    return r;
}

}  // namespace synmarket
