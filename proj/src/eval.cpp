#include "synmarket/eval.hpp"

#include <algorithm>
#include <cmath>

#include "synmarket/parallel.hpp"

namespace synmarket {

std::string_view to_string(Prediction p) {
    switch (p) {
        case Prediction::Replicable: return "Replicable";
        case Prediction::NotReplicable: return "NotReplicable";
        case Prediction::Abstain: return "Abstain";
    }
    return "Abstain";
}

Prediction classify(const MarketResult& market) {
    if (!market.scored) return Prediction::Abstain;
    if (market.close_price_yes > 0.5 + kTieBand) return Prediction::Replicable;
    if (market.close_price_yes < 0.5 - kTieBand) return Prediction::NotReplicable;
    return Prediction::Abstain;
}

std::vector<ClaimScore> score_claims(const TrainedModel& model, const std::vector<ClaimRecord>& claims,
                                     std::uint64_t seed, std::size_t jobs) {
    if (!model.feature_names.empty()) {
        for (const auto& c : claims) {
            if (c.raw_features.size() != model.feature_names.size()) {
                throw DataError("claim '" + c.id + "' does not match the model's feature schema");
            }
        }
    }
    const MarketConfig market = model.config.market();
    std::vector<ClaimScore> scores(claims.size());
    parallel_for(claims.size(), jobs, [&](std::size_t i) {
        ClaimScore& s = scores[i];
        s.claim_id = claims[i].id;
        s.point = apply_normalizer(model.normalizer, claims[i]);
        Rng rng = make_rng(seed, {stream::kScore, fnv1a(claims[i].id)});
        s.market = run_market(model.genomes, s.point, market, rng);
        s.prediction = classify(s.market);
        if (s.prediction != Prediction::Abstain) s.score = s.market.close_price_yes;
    });
    return scores;
}

Confusion& Confusion::operator+=(const Confusion& o) {
    tp += o.tp;
    fn += o.fn;
    tn += o.tn;
    fp += o.fp;
    return *this;
}

namespace {

double ratio(std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

ClassMetrics class_metrics(std::size_t hits, std::size_t predicted, std::size_t actual) {
    ClassMetrics m;
    m.precision = ratio(hits, predicted);
    m.recall = ratio(hits, actual);
    m.f1 = m.precision + m.recall > 0.0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
    return m;
}

}  // namespace

MetricsReport metrics_from_counts(const Confusion& c, std::size_t n_total, double squared_error_sum,
                                  std::size_t n_labeled) {
    MetricsReport r;
    r.n_total = n_total;
    r.n_scored = c.tp + c.fn + c.tn + c.fp;
    r.coverage = ratio(r.n_scored, n_total);
    r.confusion = c;
    r.rmse = n_labeled == 0 ? 0.0 : std::sqrt(squared_error_sum / static_cast<double>(n_labeled));
    if (r.n_scored == 0) return r;
    r.accuracy = ratio(c.tp + c.tn, r.n_scored);
    r.replicable = class_metrics(c.tp, c.tp + c.fp, c.tp + c.fn);
    r.not_replicable = class_metrics(c.tn, c.tn + c.fn, c.tn + c.fp);
    r.macro_precision = 0.5 * (r.replicable->precision + r.not_replicable->precision);
    r.macro_recall = 0.5 * (r.replicable->recall + r.not_replicable->recall);
    r.macro_f1 = 0.5 * (r.replicable->f1 + r.not_replicable->f1);
    return r;
}

MetricsReport compute_metrics(const std::vector<ClaimScore>& scores, const std::map<std::string, Label>& labels) {
    // summing in claim-id order keeps the report independent of list order
    std::vector<const ClaimScore*> ordered;
    ordered.reserve(scores.size());
    for (const auto& s : scores) ordered.push_back(&s);
    std::sort(ordered.begin(), ordered.end(),
              [](const ClaimScore* a, const ClaimScore* b) { return a->claim_id < b->claim_id; });
    Confusion c;
    double squared_error = 0.0;
    std::size_t labeled = 0;
    for (const ClaimScore* sp : ordered) {
        const ClaimScore& s = *sp;
        const auto it = labels.find(s.claim_id);
        if (it == labels.end()) {
            if (s.prediction != Prediction::Abstain) throw DataError("scored claim '" + s.claim_id + "' has no label");
            continue;
        }
        const bool actual_yes = it->second == Label::Replicable;
        const double residual = s.score.value_or(0.5) - (actual_yes ? 1.0 : 0.0);
        squared_error += residual * residual;
        ++labeled;
        if (s.prediction == Prediction::Abstain) continue;
        const bool predicted_yes = s.prediction == Prediction::Replicable;
        if (predicted_yes && actual_yes) ++c.tp;
        else if (predicted_yes) ++c.fp;
        else if (actual_yes) ++c.fn;
        else ++c.tn;
    }
    return metrics_from_counts(c, scores.size(), squared_error, labeled);
}

std::map<std::string, Label> label_map(const std::vector<ClaimRecord>& records) {
    std::map<std::string, Label> labels;
    for (const auto& r : records) {
        if (r.label) labels.emplace(r.id, *r.label);
    }
    return labels;
}

CrossValidationResult cross_validate(const std::vector<ClaimRecord>& dataset, const FeatureSchema& schema,
                                     const FoldPlan& plan, const EvolutionConfig& config, std::size_t jobs) {
    for (const auto& r : dataset) {
        if (!r.label) throw DataError("record '" + r.id + "' is unlabeled; cross-validation needs labels");
        if (!plan.assignments.contains(r.id)) throw DataError("fold plan does not cover '" + r.id + "'");
    }
    const auto labels = label_map(dataset);
    CrossValidationResult cv;
    cv.folds.resize(plan.fold_count);
    for (std::size_t f = 0; f < plan.fold_count; ++f) {
        std::vector<ClaimRecord> train_set, test_set;
        for (const auto& r : dataset) (plan.assignments.at(r.id) == f ? test_set : train_set).push_back(r);
        FoldResult& fold = cv.folds[f];
        fold.fold = f;
        TrainingRun run = train_model(train_set, schema, config, jobs);
        fold.model = std::move(run.model);
        fold.history = std::move(run.history);
        fold.scores = score_claims(fold.model, test_set, config.master_seed, jobs);
        fold.report = compute_metrics(fold.scores, labels);
    }

    std::vector<ClaimScore> pooled;
    for (const auto& fold : cv.folds) pooled.insert(pooled.end(), fold.scores.begin(), fold.scores.end());
    cv.pooled = compute_metrics(pooled, labels);
    return cv;
}

}  // namespace synmarket
