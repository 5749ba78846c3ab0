#include "synmarket/serialize.hpp"

#include <sstream>

namespace synmarket {

Json to_json(const Genome& g) {
    return Json{{"id", g.id},
                {"asset_class", std::string(to_string(g.asset_class))},
                {"center", g.center},
                {"radius", g.radius},
                {"steepness", g.steepness}};
}

Genome genome_from_json(const Json& j) {
    Genome g;
    g.id = j.at("id").get<std::uint64_t>();
    g.asset_class = parse_asset(j.at("asset_class").get<std::string>());
    g.center = j.at("center").get<std::vector<double>>();
    g.radius = j.at("radius").get<double>();
    g.steepness = j.at("steepness").get<double>();
    return g;
}

Json to_json(const TradeRecord& t) {
    return Json{{"agent_id", t.agent_id},         {"round", t.round},
                {"asset", std::string(to_string(t.asset))}, {"shares", t.shares},
                {"cost", t.cost},                 {"price_before", t.price_before},
                {"price_after", t.price_after}};
}

TradeRecord trade_from_json(const Json& j) {
    TradeRecord t;
    t.agent_id = j.at("agent_id").get<std::uint64_t>();
    t.round = j.at("round").get<std::uint32_t>();
    t.asset = parse_asset(j.at("asset").get<std::string>());
    t.shares = j.at("shares").get<double>();
    t.cost = j.at("cost").get<double>();
    t.price_before = j.at("price_before").get<double>();
    t.price_after = j.at("price_after").get<double>();
    return t;
}

std::string ledger_to_jsonl(const std::vector<TradeRecord>& ledger) {
    std::string out;
    for (const auto& t : ledger) {
        out += to_json(t).dump();
        out += '\n';
    }
    return out;
}

std::vector<TradeRecord> ledger_from_jsonl(const std::string& text) {
    std::vector<TradeRecord> ledger;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        ledger.push_back(trade_from_json(Json::parse(line)));
    }
    return ledger;
}

Json to_json(const NormalizationParams& p) {
    return Json{{"min", p.min}, {"max", p.max}, {"median", p.median}};
}

NormalizationParams normalizer_from_json(const Json& j) {
    NormalizationParams p;
    p.min = j.at("min").get<std::vector<double>>();
    p.max = j.at("max").get<std::vector<double>>();
    p.median = j.at("median").get<std::vector<double>>();
    if (p.max.size() != p.min.size() || p.median.size() != p.min.size()) {
        throw DataError("normalizer arrays differ in length");
    }
    return p;
}

Json to_json(const EvolutionConfig& c) {
    return Json{{"generations", c.generations},
                {"population_size", c.population_size},
                {"initial_cash", c.initial_cash},
                {"liquidity_b", c.liquidity_b},
                {"initial_price", c.initial_price},
                {"mutation_center_sigma", c.mutation_center_sigma},
                {"mutation_log_sigma", c.mutation_log_sigma},
                {"asset_flip_prob", c.asset_flip_prob},
                {"master_seed", c.master_seed},
                {"max_rounds", c.max_rounds},
                {"trade_size", c.trade_size},
                {"min_fraction", c.min_fraction},
                {"margin", c.margin}};
}

EvolutionConfig config_from_json(const Json& j) {
    EvolutionConfig c;
    c.generations = j.at("generations").get<std::size_t>();
    c.population_size = j.at("population_size").get<std::size_t>();
    c.initial_cash = j.at("initial_cash").get<double>();
    c.liquidity_b = j.at("liquidity_b").get<double>();
    c.initial_price = j.at("initial_price").get<double>();
    c.mutation_center_sigma = j.at("mutation_center_sigma").get<double>();
    c.mutation_log_sigma = j.at("mutation_log_sigma").get<double>();
    c.asset_flip_prob = j.at("asset_flip_prob").get<double>();
    c.master_seed = j.at("master_seed").get<std::uint64_t>();
    c.max_rounds = j.at("max_rounds").get<std::uint32_t>();
    c.trade_size = j.at("trade_size").get<double>();
    c.min_fraction = j.at("min_fraction").get<double>();
    c.margin = j.at("margin").get<double>();
    return c;
}

Json to_json(const TrainedModel& m) {
    Json genomes = Json::array();
    for (const auto& g : m.genomes) genomes.push_back(to_json(g));
    return Json{{"genomes", std::move(genomes)},
                {"normalizer", to_json(m.normalizer)},
                {"feature_names", m.feature_names},
                {"config", to_json(m.config)},
                {"best_generation", m.best_generation},
                {"best_rmse", m.best_rmse}};
}

TrainedModel model_from_json(const Json& j) {
    TrainedModel m;
    for (const auto& g : j.at("genomes")) m.genomes.push_back(genome_from_json(g));
    m.normalizer = normalizer_from_json(j.at("normalizer"));
    m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    m.config = config_from_json(j.at("config"));
    m.best_generation = j.at("best_generation").get<std::size_t>();
    m.best_rmse = j.at("best_rmse").get<double>();
    const std::size_t d = m.normalizer.dimension();
    if (m.feature_names.size() != d) throw DataError("model feature names do not match its normalizer");
    for (const auto& g : m.genomes) {
        if (g.center.size() != d) throw DataError("genome " + std::to_string(g.id) + " has the wrong dimension");
    }
    return m;
}

Json to_json(const GenerationStats& s) {
    Json profit = Json::object();
    for (const auto& [id, p] : s.profit) profit[std::to_string(id)] = p;
    return Json{{"generation", s.generation},
                {"profit", std::move(profit)},
                {"rmse", s.rmse},
                {"coverage", s.coverage},
                {"survivor_count", s.survivor_count},
                {"best_rmse", s.best_rmse}};
}

namespace {

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

Json class_json(const std::optional<ClassMetrics>& m) {
    if (!m) return nullptr;
    return Json{{"precision", m->precision}, {"recall", m->recall}, {"f1", m->f1}};
}

}  // namespace

Json to_json(const MetricsReport& r) {
    return Json{{"n_total", r.n_total},
                {"n_scored", r.n_scored},
                {"coverage", r.coverage},
                {"accuracy", optional_number(r.accuracy)},
                {"macro_precision", optional_number(r.macro_precision)},
                {"macro_recall", optional_number(r.macro_recall)},
                {"macro_f1", optional_number(r.macro_f1)},
                {"classification_defined", r.n_scored > 0},
                {"per_class", Json{{"Replicable", class_json(r.replicable)},
                                   {"NotReplicable", class_json(r.not_replicable)}}},
                {"rmse", r.rmse},
                {"confusion", Json{{"tp", r.confusion.tp},
                                   {"fn", r.confusion.fn},
                                   {"tn", r.confusion.tn},
                                   {"fp", r.confusion.fp}}}};
}

Json to_json(const FoldPlan& plan) {
    Json j = Json::object();
    for (const auto& [id, fold] : plan.assignments) j[id] = fold;
    return j;
}

Json to_json(const ClaimScore& s, const std::map<std::string, Label>& labels) {
    Json j{{"claim_id", s.claim_id},
           {"score", s.score ? Json(*s.score) : Json("UNSCORED")},
           {"prediction", std::string(to_string(s.prediction))},
           {"close_price_yes", s.market.close_price_yes},
           {"trades", s.market.ledger.size()}};
    if (const auto it = labels.find(s.claim_id); it != labels.end()) {
        j["label"] = std::string(to_string(it->second));
        if (s.prediction == Prediction::Abstain) {
            j["correct"] = nullptr;
        } else {
            j["correct"] = (s.prediction == Prediction::Replicable) == (it->second == Label::Replicable);
        }
    }
    return j;
}

MarketResult market_from_ledger(const std::vector<TradeRecord>& ledger, double open_price_yes, double liquidity_b) {
    MarketResult r;
    r.final_state = new_market(liquidity_b, open_price_yes);
    r.open_price_yes = price_yes(r.final_state);
    r.ledger = ledger;
    for (const auto& t : ledger) {
        Holding& h = r.holdings[t.agent_id];
        h.asset = t.asset;
        h.shares += t.shares;
        h.spend += t.cost;
        (t.asset == Asset::Yes ? r.final_state.q_yes : r.final_state.q_no) += t.shares;
        r.final_state.revenue += t.cost;
        r.rounds_run = std::max(r.rounds_run, t.round);
    }
    r.scored = !ledger.empty();
    r.close_price_yes = r.scored ? ledger.back().price_after : r.open_price_yes;
    return r;
}

}  // namespace synmarket
