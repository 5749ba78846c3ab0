#include "synmarket/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "synmarket/parallel.hpp"

namespace synmarket {

MarketConfig EvolutionConfig::market() const {
    MarketConfig m;
    m.liquidity_b = liquidity_b;
    m.initial_price = initial_price;
    m.initial_cash = initial_cash;
    m.max_rounds = max_rounds;
    m.trade_size = trade_size;
    m.min_fraction = min_fraction;
    m.margin = margin;
    return m;
}

void EvolutionConfig::validate() const {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw TrainingError(what);
    };
    require(population_size >= 1, "population size must be at least 1");
    require(initial_cash > 0.0, "initial cash must be positive");
    require(liquidity_b > 0.0 && std::isfinite(liquidity_b), "liquidity must be positive");
    require(initial_price > 0.0 && initial_price < 1.0, "initial price must lie in (0,1)");
    require(mutation_center_sigma >= 0.0, "center mutation sigma must be non-negative");
    require(mutation_log_sigma >= 0.0, "log mutation sigma must be non-negative");
    require(asset_flip_prob >= 0.0 && asset_flip_prob <= 1.0, "asset flip probability must lie in [0,1]");
    require(max_rounds >= 1, "max rounds must be at least 1");
    require(trade_size > 0.0, "trade size must be positive");
    require(min_fraction > 0.0 && min_fraction <= trade_size, "minimum fraction must lie in (0, trade size]");
    require(margin >= 0.0 && margin < 1.0, "margin must lie in [0,1)");
}

double settle(const Holding& holding, Label label) {
    const bool pays = (holding.asset == Asset::Yes) == (label == Label::Replicable);
    return (pays ? holding.shares : 0.0) - holding.spend;
}

namespace {

struct ClaimOutcome {
    double close_price = 0.5;
    bool scored = false;
    std::map<std::uint64_t, Holding> holdings;
};

}  // namespace

GenerationStats evaluate_generation(std::span<const Genome> population, std::span<const TrainingPoint> claims,
                                    const EvolutionConfig& config, std::size_t generation, std::size_t jobs) {
    if (population.empty()) throw TrainingError("cannot evaluate an empty population");
    const MarketConfig market = config.market();
    std::vector<ClaimOutcome> outcomes(claims.size());
    parallel_for(claims.size(), jobs, [&](std::size_t c) {
        Rng rng = make_rng(config.master_seed, {stream::kMarket, generation, fnv1a(claims[c].id)});
        MarketResult r = run_market(population, claims[c].point, market, rng);
        outcomes[c] = {r.close_price_yes, r.scored, std::move(r.holdings)};
    });

    std::vector<std::size_t> order(claims.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return claims[a].id < claims[b].id; });

    GenerationStats stats;
    stats.generation = generation;
    for (const auto& g : population) stats.profit[g.id] = 0.0;
    double squared_error = 0.0;
    std::size_t scored = 0;
    for (const std::size_t c : order) {
        const ClaimOutcome& o = outcomes[c];
        const double y = claims[c].label == Label::Replicable ? 1.0 : 0.0;
        squared_error += (o.close_price - y) * (o.close_price - y);
        scored += o.scored ? 1 : 0;
        for (const auto& [id, holding] : o.holdings) stats.profit[id] += settle(holding, claims[c].label);
    }
    const double n = static_cast<double>(claims.size());
    stats.rmse = claims.empty() ? 0.0 : std::sqrt(squared_error / n);
    stats.coverage = claims.empty() ? 0.0 : static_cast<double>(scored) / n;
    stats.survivor_count = static_cast<std::size_t>(
        std::count_if(stats.profit.begin(), stats.profit.end(), [](const auto& kv) { return kv.second > 0.0; }));
    stats.best_rmse = stats.rmse;
    return stats;
}

std::vector<double> blend_centers(std::span<const double> a, std::span<const double> b, double alpha) {
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = alpha * a[i] + (1.0 - alpha) * b[i];
    return out;
}

void mutate(Genome& genome, const EvolutionConfig& config, Rng& rng) {
    const GenomeBounds bounds = GenomeBounds::for_dimension(genome.center.size());
    std::normal_distribution<double> center_noise(0.0, config.mutation_center_sigma);
    std::normal_distribution<double> log_noise(0.0, config.mutation_log_sigma);
    std::bernoulli_distribution flip(config.asset_flip_prob);
    for (double& c : genome.center) c = std::clamp(c + center_noise(rng), 0.0, 1.0);
    genome.radius = std::clamp(genome.radius * std::exp(log_noise(rng)), bounds.radius_min, bounds.radius_max);
    genome.steepness =
        std::clamp(genome.steepness * std::exp(log_noise(rng)), bounds.steepness_min, bounds.steepness_max);
    if (flip(rng)) genome.asset_class = opposite(genome.asset_class);
}

std::vector<Genome> select_and_reproduce(std::span<const Genome> population, const GenerationStats& stats,
                                         std::span<const TrainingPoint> train_points, const EvolutionConfig& config,
                                         Rng& rng, std::uint64_t& next_id) {
    std::vector<Genome> next;
    std::vector<double> weights;
    for (const auto& g : population) {
        const auto it = stats.profit.find(g.id);
        if (it == stats.profit.end()) throw TrainingError("generation stats do not cover agent " + std::to_string(g.id));
        if (it->second > 0.0) {
            next.push_back(g);
            weights.push_back(it->second);
        }
    }
    if (next.empty()) return init_population(train_points, config.population_size, rng, next_id);

    std::discrete_distribution<std::size_t> pick_parent(weights.begin(), weights.end());
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::bernoulli_distribution coin(0.5);
    while (next.size() < config.population_size) {
        const Genome& a = next[pick_parent(rng)];
        const Genome& b = next[pick_parent(rng)];
        Genome child;
        child.id = next_id++;
        child.center = blend_centers(a.center, b.center, unit(rng));
        child.radius = (coin(rng) ? a : b).radius;
        child.steepness = (coin(rng) ? a : b).steepness;
        child.asset_class = (coin(rng) ? a : b).asset_class;
        mutate(child, config, rng);
        next.push_back(std::move(child));
    }
    return next;
}

std::vector<TrainingPoint> to_training_points(const std::vector<ClaimRecord>& records,
                                              const NormalizationParams& normalizer) {
    std::vector<TrainingPoint> points;
    points.reserve(records.size());
    for (const auto& rec : records) {
        if (!rec.label) throw TrainingError("training record '" + rec.id + "' is unlabeled");
        points.push_back({rec.id, apply_normalizer(normalizer, rec), *rec.label});
    }
    return points;
}

TrainingRun train(std::span<const TrainingPoint> train_points, const EvolutionConfig& config, std::size_t jobs,
                  const GenerationCallback& on_generation) {
    config.validate();
    if (train_points.size() < 2) throw TrainingError("training needs at least two labeled claims");
    const bool has_yes = std::any_of(train_points.begin(), train_points.end(),
                                     [](const TrainingPoint& p) { return p.label == Label::Replicable; });
    const bool has_no = std::any_of(train_points.begin(), train_points.end(),
                                    [](const TrainingPoint& p) { return p.label == Label::NotReplicable; });
    if (!has_yes || !has_no) throw TrainingError("training set contains a single class");

    std::uint64_t next_id = 1;
    Rng init_rng = make_rng(config.master_seed, {stream::kInit});
    std::vector<Genome> population = init_population(train_points, config.population_size, init_rng, next_id);

    TrainingRun run;
    run.model.config = config;
    run.model.best_rmse = std::numeric_limits<double>::infinity();
    for (std::size_t gen = 0;; ++gen) {
        GenerationStats stats = evaluate_generation(population, train_points, config, gen, jobs);
        if (stats.rmse < run.model.best_rmse) {
            run.model.best_rmse = stats.rmse;
            run.model.best_generation = gen;
            run.model.genomes = population;
        }
        stats.best_rmse = run.model.best_rmse;
        if (on_generation) on_generation(stats);
        run.history.push_back(stats);
        if (gen == config.generations) break;
        Rng rng = make_rng(config.master_seed, {stream::kReproduce, gen});
        population = select_and_reproduce(population, run.history.back(), train_points, config, rng, next_id);
    }
    return run;
}

TrainingRun train_model(const std::vector<ClaimRecord>& records, const FeatureSchema& schema,
                        const EvolutionConfig& config, std::size_t jobs, const GenerationCallback& on_generation) {
    NormalizationParams normalizer = fit_normalizer(records, schema);
    const std::vector<TrainingPoint> points = to_training_points(records, normalizer);
    TrainingRun run = train(points, config, jobs, on_generation);
    run.model.normalizer = std::move(normalizer);
    run.model.feature_names = schema.names;
    return run;
}

}  // namespace synmarket
