#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace synmarket {

class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Label { Replicable, NotReplicable };

std::string_view to_string(Label label);
// Accepts `Replicable` / `NotReplicable`; empty means unlabeled.
std::optional<Label> parse_label(std::string_view token);

inline constexpr std::size_t kDefaultFeatureCount = 41;

struct FeatureSchema {
    std::vector<std::string> names;

    std::size_t dimension() const { return names.size(); }

    // f1 .. fN
    static FeatureSchema generic(std::size_t dimension = kDefaultFeatureCount);
    // One name per line; blank lines ignored.
    static FeatureSchema load(const std::filesystem::path& path);

    void validate() const;
};

struct ClaimRecord {
    std::string id;
    std::vector<std::optional<double>> raw_features;
    std::optional<Label> label;
};

/// Load a dataset from CSV (`id`, feature columns in schema order, optional
/// trailing `label`) or from a JSON array of objects with the same field names.
/// The format is chosen by file extension (`.json` or anything else for CSV).
std::vector<ClaimRecord> load_dataset(const std::filesystem::path& path, const FeatureSchema& schema);

std::vector<ClaimRecord> parse_csv_dataset(std::string_view text, const FeatureSchema& schema);
std::vector<ClaimRecord> parse_json_dataset(std::string_view text, const FeatureSchema& schema);

void write_csv_dataset(const std::filesystem::path& path, const FeatureSchema& schema,
                       const std::vector<ClaimRecord>& records);

struct NormalizationParams {
    std::vector<double> min;
    std::vector<double> max;
    std::vector<double> median;

    std::size_t dimension() const { return min.size(); }
};

/// Per-feature min/max/median over observed training values only.
NormalizationParams fit_normalizer(const std::vector<ClaimRecord>& train,
                                   const FeatureSchema& schema);

/// Median imputation, then min-max scaling clipped to [0,1]. Constant
/// features map to 0.5.
std::vector<double> apply_normalizer(const NormalizationParams& params, const ClaimRecord& record);

struct FoldPlan {
    std::size_t fold_count = 5;
    std::map<std::string, std::size_t> assignments;
    std::uint64_t seed = 0;

    std::vector<std::size_t> fold_sizes() const;
};

/// Label-stratified folds. Each class is shuffled with the seed and dealt
/// round-robin, continuing the deal position across classes so both fold
/// sizes and per-class counts differ by at most one.
FoldPlan split_folds(const std::vector<ClaimRecord>& dataset, std::size_t fold_count, std::uint64_t seed);

}  // namespace synmarket
