#include "synmarket/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "synmarket/kernels.hpp"
#include "synmarket/rng.hpp"

namespace synmarket {
namespace {

std::vector<double> uniform_in_ball(const std::vector<double>& center, double radius, Rng& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::size_t d = center.size();
    std::vector<double> dir(d);
    double norm = 0.0;
    do {
        norm = 0.0;
        for (double& v : dir) {
            v = gauss(rng);
            norm += v * v;
        }
    } while (norm == 0.0);
    const double scale = radius * std::pow(unit(rng), 1.0 / static_cast<double>(d)) / std::sqrt(norm);
    std::vector<double> x(d);
    for (std::size_t i = 0; i < d; ++i) x[i] = center[i] + scale * dir[i];
    return x;
}

}  // namespace

std::vector<ClaimRecord> make_synthetic_dataset(const SyntheticSpec& spec) {
    if (spec.claims == 0 || spec.dimension == 0) throw std::invalid_argument("synthetic dataset must be non-empty");
    Rng rng(spec.seed);
    std::uniform_real_distribution<double> wobble(-0.05, 0.05);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> center_a(spec.dimension), center_b(spec.dimension);
    for (std::size_t i = 0; i < spec.dimension; ++i) {
        center_a[i] = 0.3 + wobble(rng);
        center_b[i] = 0.7 + wobble(rng);
    }

    const auto far_count = static_cast<std::size_t>(std::lround(spec.far_fraction * static_cast<double>(spec.claims)));
    const std::size_t cluster_count = spec.claims - far_count;
    const double min_far = spec.far_separation * spec.cluster_radius;

    struct Draft {
        std::vector<double> x;
        Label label;
    };
    std::vector<Draft> drafts;
    drafts.reserve(spec.claims);
    for (std::size_t n = 0; n < cluster_count; ++n) {
        const bool in_a = n % 2 == 0;
        drafts.push_back({uniform_in_ball(in_a ? center_a : center_b, spec.cluster_radius, rng),
                          in_a ? Label::Replicable : Label::NotReplicable});
    }
    // flip an exact share of cluster labels
    std::vector<std::size_t> idx(cluster_count);
    for (std::size_t i = 0; i < cluster_count; ++i) idx[i] = i;
    std::shuffle(idx.begin(), idx.end(), rng);
    const auto flips = static_cast<std::size_t>(std::lround(spec.label_noise * static_cast<double>(cluster_count)));
    for (std::size_t i = 0; i < flips; ++i) {
        Label& l = drafts[idx[i]].label;
        l = l == Label::Replicable ? Label::NotReplicable : Label::Replicable;
    }
    for (std::size_t n = 0; n < far_count; ++n) {
        std::vector<double> x(spec.dimension);
        for (int attempt = 0;; ++attempt) {
            for (double& v : x) v = unit(rng);
            const double da = std::sqrt(kernels::squared_distance(x, center_a));
            const double db = std::sqrt(kernels::squared_distance(x, center_b));
            if (std::min(da, db) >= min_far) break;
            if (attempt > 10000) throw std::invalid_argument("cannot place far claims with this separation");
        }
        drafts.push_back({std::move(x), unit(rng) < 0.5 ? Label::Replicable : Label::NotReplicable});
    }
    std::shuffle(drafts.begin(), drafts.end(), rng);

    std::vector<ClaimRecord> records;
    records.reserve(drafts.size());
    for (std::size_t n = 0; n < drafts.size(); ++n) {
        char id[32];
        std::snprintf(id, sizeof id, "claim-%04zu", n + 1);
        ClaimRecord rec;
        rec.id = id;
        rec.label = drafts[n].label;
        for (const double v : drafts[n].x) {
            rec.raw_features.push_back(unit(rng) < spec.missing_rate ? std::nullopt : std::optional<double>(v));
        }
        records.push_back(std::move(rec));
    }
    return records;
}

}  // namespace synmarket
