#include "synmarket/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "json.hpp"
#include "synmarket/kernels.hpp"
#include "synmarket/rng.hpp"

namespace synmarket {

using nlohmann::json;

std::string_view to_string(Label label) {
    return label == Label::Replicable ? "Replicable" : "NotReplicable";
}

std::optional<Label> parse_label(std::string_view token) {
    if (token.empty()) return std::nullopt;
    if (token == "Replicable") return Label::Replicable;
    if (token == "NotReplicable") return Label::NotReplicable;
    throw DataError("unknown label token '" + std::string(token) + "'");
}

FeatureSchema FeatureSchema::generic(std::size_t dimension) {
    FeatureSchema schema;
    schema.names.reserve(dimension);
    for (std::size_t i = 1; i <= dimension; ++i) schema.names.push_back("f" + std::to_string(i));
    return schema;
}

FeatureSchema FeatureSchema::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open schema file " + path.string());
    FeatureSchema schema;
    std::string line;
    while (std::getline(in, line)) {
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto last = line.find_last_not_of(" \t\r");
        schema.names.push_back(line.substr(first, last - first + 1));
    }
    schema.validate();
    return schema;
}

void FeatureSchema::validate() const {
    if (names.empty()) throw DataError("feature schema is empty");
    std::set<std::string_view> seen;
    for (const auto& name : names) {
        if (name.empty()) throw DataError("feature schema contains an empty name");
        if (name == "id" || name == "label") throw DataError("feature name '" + name + "' is reserved");
        if (!seen.insert(name).second) throw DataError("duplicate feature name '" + name + "'");
    }
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

// RFC 4180 style field split for a single line (no embedded newlines).
std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                field.push_back('"');
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                field.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::string(trim(field)));
            field.clear();
        } else {
            field.push_back(c);
        }
    }
    fields.push_back(std::string(trim(field)));
    return fields;
}

std::optional<double> parse_cell(std::string_view cell, std::size_t row, const std::string& column) {
    if (cell.empty()) return std::nullopt;
    double value = 0.0;
    const auto* end = cell.data() + cell.size();
    auto [ptr, ec] = std::from_chars(cell.data(), end, value);
    if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
        throw DataError("row " + std::to_string(row) + ": cannot parse '" + std::string(cell) +
                        "' in column '" + column + "' as a number");
    }
    return value;
}

void check_unique_ids(const std::vector<ClaimRecord>& records) {
    std::set<std::string_view> ids;
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (records[i].id.empty()) throw DataError("row " + std::to_string(i + 1) + ": empty id");
        if (!ids.insert(records[i].id).second) {
            throw DataError("row " + std::to_string(i + 1) + ": duplicate id '" + records[i].id + "'");
        }
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open dataset " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string csv_escape(std::string_view s) {
    if (s.find_first_of(",\"") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (const char c : s) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

}  // namespace

std::vector<ClaimRecord> parse_csv_dataset(std::string_view text, const FeatureSchema& schema) {
    schema.validate();
    std::vector<std::string_view> lines;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        lines.push_back(text.substr(0, nl));
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    }
    // skip a UTF-8 BOM and trailing blank lines
    if (!lines.empty() && lines.front().starts_with("\xEF\xBB\xBF")) lines.front().remove_prefix(3);
    while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
    if (lines.empty()) throw DataError("dataset has no header row");

    const auto header = split_csv_line(lines.front());
    const std::size_t d = schema.dimension();
    const bool has_label = header.size() == d + 2 && header.back() == "label";
    if (header.size() != d + 1 + (has_label ? 1 : 0) || header.front() != "id") {
        throw DataError("header must be `id`, the " + std::to_string(d) +
                        " schema features, and an optional `label`");
    }
    for (std::size_t j = 0; j < d; ++j) {
        if (header[j + 1] != schema.names[j]) {
            throw DataError("header column " + std::to_string(j + 2) + " is '" + header[j + 1] +
                            "', expected '" + schema.names[j] + "'");
        }
    }

    std::vector<ClaimRecord> records;
    records.reserve(lines.size() - 1);
    for (std::size_t r = 1; r < lines.size(); ++r) {
        const auto fields = split_csv_line(lines[r]);
        if (fields.size() != header.size()) {
            throw DataError("row " + std::to_string(r) + ": expected " + std::to_string(header.size()) +
                            " fields, found " + std::to_string(fields.size()));
        }
        ClaimRecord rec;
        rec.id = fields.front();
        rec.raw_features.reserve(d);
        for (std::size_t j = 0; j < d; ++j) rec.raw_features.push_back(parse_cell(fields[j + 1], r, schema.names[j]));
        if (has_label) rec.label = parse_label(fields.back());
        records.push_back(std::move(rec));
    }
    check_unique_ids(records);
    return records;
}

std::vector<ClaimRecord> parse_json_dataset(std::string_view text, const FeatureSchema& schema) {
    schema.validate();
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw DataError(std::string("invalid JSON dataset: ") + e.what());
    }
    if (!doc.is_array()) throw DataError("JSON dataset must be an array of objects");
    std::vector<ClaimRecord> records;
    records.reserve(doc.size());
    for (std::size_t r = 0; r < doc.size(); ++r) {
        const auto& obj = doc[r];
        const std::string where = "row " + std::to_string(r + 1);
        if (!obj.is_object() || !obj.contains("id") || !obj["id"].is_string()) {
            throw DataError(where + ": expected an object with a string `id`");
        }
        for (const auto& [key, _] : obj.items()) {
            if (key != "id" && key != "label" &&
                std::find(schema.names.begin(), schema.names.end(), key) == schema.names.end()) {
                throw DataError(where + ": unknown field '" + key + "'");
            }
        }
        ClaimRecord rec;
        rec.id = obj["id"].get<std::string>();
        for (const auto& name : schema.names) {
            if (!obj.contains(name) || obj[name].is_null()) {
                rec.raw_features.emplace_back();
            } else if (obj[name].is_number()) {
                rec.raw_features.emplace_back(obj[name].get<double>());
            } else {
                throw DataError(where + ": field '" + name + "' is not a number");
            }
        }
        if (obj.contains("label") && !obj["label"].is_null()) {
            if (!obj["label"].is_string()) throw DataError(where + ": label must be a string");
            rec.label = parse_label(obj["label"].get<std::string>());
        }
        records.push_back(std::move(rec));
    }
    check_unique_ids(records);
    return records;
}

std::vector<ClaimRecord> load_dataset(const std::filesystem::path& path, const FeatureSchema& schema) {
    const std::string text = read_file(path);
    if (path.extension() == ".json") return parse_json_dataset(text, schema);
    return parse_csv_dataset(text, schema);
}

void write_csv_dataset(const std::filesystem::path& path, const FeatureSchema& schema,
                       const std::vector<ClaimRecord>& records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write dataset " + path.string());
    out << "id";
    for (const auto& name : schema.names) out << ',' << csv_escape(name);
    out << ",label\n";
    char buf[32];
    for (const auto& rec : records) {
        out << csv_escape(rec.id);
        for (const auto& v : rec.raw_features) {
            out << ',';
            if (v) {
                auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, *v);
                out.write(buf, ptr - buf);
            }
        }
        out << ',' << (rec.label ? to_string(*rec.label) : "") << '\n';
    }
}

NormalizationParams fit_normalizer(const std::vector<ClaimRecord>& train, const FeatureSchema& schema) {
    if (train.empty()) throw DataError("cannot fit a normalizer on an empty training set");
    const std::size_t d = schema.dimension();
    NormalizationParams params;
    params.min.resize(d);
    params.max.resize(d);
    params.median.resize(d);
    std::vector<double> observed;
    observed.reserve(train.size());
    for (std::size_t j = 0; j < d; ++j) {
        observed.clear();
        for (const auto& rec : train) {
            if (rec.raw_features.size() != d) throw DataError("record '" + rec.id + "' does not match the schema");
            if (rec.raw_features[j]) observed.push_back(*rec.raw_features[j]);
        }
        if (observed.empty()) {
            throw DataError("feature '" + schema.names[j] + "' has no observed training values");
        }
        std::sort(observed.begin(), observed.end());
        const std::size_t n = observed.size();
        params.min[j] = observed.front();
        params.max[j] = observed.back();
        params.median[j] = n % 2 == 1 ? observed[n / 2] : 0.5 * (observed[n / 2 - 1] + observed[n / 2]);
    }
    return params;
}

std::vector<double> apply_normalizer(const NormalizationParams& params, const ClaimRecord& record) {
    const std::size_t d = params.dimension();
    if (record.raw_features.size() != d) {
        throw DataError("record '" + record.id + "' has " + std::to_string(record.raw_features.size()) +
                        " features, normalizer expects " + std::to_string(d));
    }
    std::vector<double> values(d), width(d), out(d);
    for (std::size_t j = 0; j < d; ++j) {
        values[j] = record.raw_features[j].value_or(params.median[j]);
        const double w = params.max[j] - params.min[j];
        width[j] = w > 0.0 ? w : 1.0;
    }
    kernels::unit_affine(values, params.min, width, out);
    for (std::size_t j = 0; j < d; ++j) {
        if (!(params.max[j] > params.min[j])) out[j] = 0.5;
    }
    return out;
}

std::vector<std::size_t> FoldPlan::fold_sizes() const {
    std::vector<std::size_t> sizes(fold_count, 0);
    for (const auto& [_, fold] : assignments) ++sizes.at(fold);
    return sizes;
}

FoldPlan split_folds(const std::vector<ClaimRecord>& dataset, std::size_t fold_count, std::uint64_t seed) {
    if (fold_count < 2) throw DataError("fold count must be at least 2");
    if (dataset.size() < fold_count) {
        throw DataError("dataset of " + std::to_string(dataset.size()) + " records cannot fill " +
                        std::to_string(fold_count) + " folds");
    }
    std::vector<std::size_t> by_class[2];
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        if (!dataset[i].label) throw DataError("record '" + dataset[i].id + "' is unlabeled; folds need labels");
        by_class[*dataset[i].label == Label::Replicable ? 0 : 1].push_back(i);
    }
    FoldPlan plan;
    plan.fold_count = fold_count;
    plan.seed = seed;
    Rng rng(seed);
    std::size_t deal = 0;
    for (auto& members : by_class) {
        std::shuffle(members.begin(), members.end(), rng);
        for (const std::size_t i : members) {
            if (!plan.assignments.emplace(dataset[i].id, deal % fold_count).second) {
                throw DataError("duplicate id '" + dataset[i].id + "'");
            }
            ++deal;
        }
    }
    return plan;
}

}  // namespace synmarket
