#include "synmarket/agents.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "synmarket/kernels.hpp"

namespace synmarket {

GenomeBounds GenomeBounds::for_dimension(std::size_t d) {
    GenomeBounds b;
    b.radius_max = std::sqrt(static_cast<double>(d));
    return b;
}

bool satisfies_bounds(const Genome& g, const GenomeBounds& b) {
    const bool center_ok = std::all_of(g.center.begin(), g.center.end(), [](double c) { return c >= 0.0 && c <= 1.0; });
    return center_ok && g.radius >= b.radius_min && g.radius <= b.radius_max && g.steepness >= b.steepness_min &&
           g.steepness <= b.steepness_max;
}

AgentState AgentState::fresh(const Genome& genome, double cash) {
    AgentState a;
    a.genome = genome;
    a.initial_cash = cash;
    a.cash = cash;
    return a;
}

double membership(const Genome& genome, std::span<const double> point) {
    if (point.size() != genome.center.size()) {
        throw std::invalid_argument("point has dimension " + std::to_string(point.size()) + ", agent expects " +
                                    std::to_string(genome.center.size()));
    }
    return genome.radius * genome.radius - kernels::squared_distance(point, genome.center);
}

double belief(const Genome& genome, std::span<const double> point) {
    const double z = genome.steepness * membership(genome, point);
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

std::optional<double> decide(const AgentState& agent, std::span<const double> point, double market_price_yes,
                             const DecisionConfig& config) {
    const Genome& g = agent.genome;
    const double gx = membership(g, point);
    if (gx < 0.0) return std::nullopt;
    const double own_price = g.asset_class == Asset::Yes ? market_price_yes : 1.0 - market_price_yes;
    if (!(belief(g, point) > own_price + config.margin)) return std::nullopt;
    if (cost_at_price(own_price, config.trade_size, config.liquidity_b) <= agent.cash) return config.trade_size;
    const double partial = std::min(affordable_shares(own_price, agent.cash, config.liquidity_b), config.trade_size);
    if (partial >= config.min_fraction) return partial;
    return std::nullopt;
}

std::optional<double> median_kth_neighbor_distance(std::span<const TrainingPoint> points, std::size_t k) {
    const std::size_t n = points.size();
    if (n < 2) return std::nullopt;
    k = std::clamp<std::size_t>(k, 1, n - 1);
    std::vector<double> d2(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            d2[i * n + j] = d2[j * n + i] = kernels::squared_distance(points[i].point, points[j].point);
        }
    }
    std::vector<double> kth(n);
    std::vector<double> row;
    for (std::size_t i = 0; i < n; ++i) {
        row.clear();
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) row.push_back(d2[i * n + j]);
        }
        std::nth_element(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(k - 1), row.end());
        kth[i] = std::sqrt(row[k - 1]);
    }
    std::sort(kth.begin(), kth.end());
    return n % 2 == 1 ? kth[n / 2] : 0.5 * (kth[n / 2 - 1] + kth[n / 2]);
}

std::optional<double> median_nearest_neighbor_distance(std::span<const TrainingPoint> points) {
    return median_kth_neighbor_distance(points, 1);
}

std::size_t initial_neighbor_rank(std::size_t points, std::size_t count) {
    if (points < 2) return 1;
    return std::max<std::size_t>(1, (points - 1 + count - 1) / count);
}

std::vector<Genome> init_population(std::span<const TrainingPoint> points, std::size_t count, Rng& rng,
                                    std::uint64_t& next_id) {
    if (count < 1) throw std::invalid_argument("population size must be at least 1");
    if (points.empty()) throw std::invalid_argument("cannot initialize agents without training points");
    const std::size_t d = points.front().point.size();
    const GenomeBounds bounds = GenomeBounds::for_dimension(d);
    const std::size_t k = initial_neighbor_rank(points.size(), count);
    const double radius = std::clamp(median_kth_neighbor_distance(points, k).value_or(kFallbackRadius),
                                     bounds.radius_min, bounds.radius_max);

    std::uniform_int_distribution<std::size_t> pick(0, points.size() - 1);
    std::normal_distribution<double> jitter(0.0, kAnchorJitter);
    std::vector<Genome> population;
    population.reserve(count);
    for (std::size_t n = 0; n < count; ++n) {
        const TrainingPoint& anchor = points[pick(rng)];
        Genome g;
        g.id = next_id++;
        g.asset_class = anchor.label == Label::Replicable ? Asset::Yes : Asset::No;
        g.center.resize(d);
        for (std::size_t i = 0; i < d; ++i) g.center[i] = std::clamp(anchor.point[i] + jitter(rng), 0.0, 1.0);
        g.radius = radius;
        g.steepness = kInitialSteepness;
        population.push_back(std::move(g));
    }
    return population;
}

}  // namespace synmarket
