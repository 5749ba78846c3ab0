#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "synmarket/data.hpp"

namespace synmarket {

/// Labeled toy world: claims inside ball A replicate, claims inside ball B do
/// not, a fraction of cluster labels is flipped, and a share of claims sits
/// far from both balls with coin-flip labels.
struct SyntheticSpec {
    std::size_t claims = 192;
    std::size_t dimension = kDefaultFeatureCount;
    double label_noise = 0.05;
    double far_fraction = 0.25;
    double cluster_radius = 0.5;
    // far claims keep at least this multiple of cluster_radius from both centers
    double far_separation = 3.0;
    double missing_rate = 0.01;
    std::uint64_t seed = 7;
};

std::vector<ClaimRecord> make_synthetic_dataset(const SyntheticSpec& spec);

}  // namespace synmarket
