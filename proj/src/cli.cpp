#include "synmarket/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "synmarket/eval.hpp"
#include "synmarket/explain.hpp"
#include "synmarket/kernels.hpp"
#include "synmarket/serialize.hpp"
#include "synmarket/synthetic.hpp"

namespace synmarket {
namespace {

namespace fs = std::filesystem;

struct RunConfig {
    EvolutionConfig evolution;
    std::string data;
    std::string schema;
    std::string out;
    std::size_t folds = 5;
    std::size_t jobs = 1;
};

void add_evolution_options(CLI::App& sub, RunConfig& rc) {
    EvolutionConfig& e = rc.evolution;
    sub.add_option("--seed", e.master_seed, "Master seed")->capture_default_str();
    sub.add_option("--generations", e.generations, "Generations of selection")->capture_default_str();
    sub.add_option("--population", e.population_size, "Agents per market")->capture_default_str()->check(CLI::PositiveNumber);
    sub.add_option("--cash", e.initial_cash, "Starting cash per agent per market")->capture_default_str();
    sub.add_option("--liquidity", e.liquidity_b, "LMSR liquidity b")->capture_default_str();
    sub.add_option("--initial-price", e.initial_price, "Opening price of the will-replicate asset")->capture_default_str();
    sub.add_option("--max-rounds", e.max_rounds, "Trading round limit per market")->capture_default_str();
    sub.add_option("--trade-size", e.trade_size, "Shares bought per decision")->capture_default_str();
    sub.add_option("--min-fraction", e.min_fraction, "Smallest partial fill")->capture_default_str();
    sub.add_option("--margin", e.margin, "Belief must beat price by this much")->capture_default_str();
    sub.add_option("--mutation-center-sigma", e.mutation_center_sigma)->capture_default_str();
    sub.add_option("--mutation-log-sigma", e.mutation_log_sigma)->capture_default_str();
    sub.add_option("--asset-flip-prob", e.asset_flip_prob)->capture_default_str();
}

void add_common_options(CLI::App& sub, RunConfig& rc, bool with_folds) {
    sub.add_option("--config", "Flat key=value file with flag names as keys; flags on the command line win");
    sub.add_option("--data", rc.data, "Labeled dataset (CSV or JSON)")->required();
    sub.add_option("--schema", rc.schema, "Feature names, one per line (default: 41 generic names)");
    sub.add_option("--out", rc.out, "Output directory")->required();
    sub.add_option("--jobs", rc.jobs, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
    if (with_folds) sub.add_option("--folds", rc.folds, "Cross-validation folds")->capture_default_str();
    add_evolution_options(sub, rc);
}

std::string quote(const std::string& s) {
    std::string q = "\"";
    for (const char c : s) {
        if (c == '"' || c == '\\') q.push_back('\\');
        q.push_back(c);
    }
    return q + "\"";
}

std::string number(double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string trim_copy(std::string s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::string unquote(const std::string& s) {
    if (s.size() < 2 || s.front() != '"' || s.back() != '"') return s;
    std::string out;
    for (std::size_t i = 1; i + 1 < s.size(); ++i) {
        if (s[i] == '\\' && i + 2 < s.size()) ++i;
        out.push_back(s[i]);
    }
    return out;
}

bool has_flag(const std::vector<std::string>& args, const std::string& flag) {
    return std::any_of(args.begin(), args.end(),
                       [&](const std::string& a) { return a == flag || a.starts_with(flag + "="); });
}

// Splices `key=value` lines from a --config file into the argument list as
// `--key value`, skipping keys already given as flags.
std::vector<std::string> expand_config(std::vector<std::string> args) {
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            path = args[i + 1];
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i + 2));
            break;
        }
        if (args[i].starts_with("--config=")) {
            path = args[i].substr(9);
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
            break;
        }
    }
    if (path.empty()) return args;
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read config file " + path);
    std::vector<std::string> extra;
    std::string line;
    while (std::getline(in, line)) {
        line = trim_copy(line);
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw std::runtime_error("config line without '=': " + line);
        const std::string flag = "--" + trim_copy(line.substr(0, eq));
        if (has_flag(args, flag)) continue;
        extra.push_back(flag);
        extra.push_back(unquote(trim_copy(line.substr(eq + 1))));
    }
    args.insert(args.end(), extra.begin(), extra.end());
    return args;
}

// Same keys as the command-line flags, so the file can be fed back via --config.
std::string config_text(const RunConfig& rc, bool with_folds) {
    const EvolutionConfig& e = rc.evolution;
    std::string t;
    t += "data=" + quote(rc.data) + "\n";
    if (!rc.schema.empty()) t += "schema=" + quote(rc.schema) + "\n";
    t += "out=" + quote(rc.out) + "\n";
    if (with_folds) t += "folds=" + std::to_string(rc.folds) + "\n";
    t += "jobs=" + std::to_string(rc.jobs) + "\n";
    t += "seed=" + std::to_string(e.master_seed) + "\n";
    t += "generations=" + std::to_string(e.generations) + "\n";
    t += "population=" + std::to_string(e.population_size) + "\n";
    t += "cash=" + number(e.initial_cash) + "\n";
    t += "liquidity=" + number(e.liquidity_b) + "\n";
    t += "initial-price=" + number(e.initial_price) + "\n";
    t += "max-rounds=" + std::to_string(e.max_rounds) + "\n";
    t += "trade-size=" + number(e.trade_size) + "\n";
    t += "min-fraction=" + number(e.min_fraction) + "\n";
    t += "margin=" + number(e.margin) + "\n";
    t += "mutation-center-sigma=" + number(e.mutation_center_sigma) + "\n";
    t += "mutation-log-sigma=" + number(e.mutation_log_sigma) + "\n";
    t += "asset-flip-prob=" + number(e.asset_flip_prob) + "\n";
    return t;
}

void write_file(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) throw std::runtime_error("cannot write " + path.string());
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string safe_name(const std::string& id) {
    std::string s = id;
    for (char& c : s) {
        const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
        if (!ok) c = '_';
    }
    return s;
}

FeatureSchema load_schema(const std::string& path) {
    return path.empty() ? FeatureSchema::generic() : FeatureSchema::load(path);
}

FeatureSchema model_schema(const TrainedModel& model) {
    FeatureSchema schema{model.feature_names};
    schema.validate();
    return schema;
}

TrainedModel load_model(const std::string& path) { return model_from_json(Json::parse(read_file(path))); }

std::string opt(const std::optional<double>& v) {
    if (!v) return "   n/a";
    char buf[16];
    std::snprintf(buf, sizeof buf, "%6.3f", *v);
    return buf;
}

void print_report_row(std::ostream& out, const std::string& name, const MetricsReport& r) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-8s %5zu %6zu %8.3f ", name.c_str(), r.n_total, r.n_scored, r.coverage);
    out << buf << opt(r.accuracy) << "  " << opt(r.macro_precision) << "  " << opt(r.macro_recall) << "  "
        << opt(r.macro_f1) << "  " << opt(r.rmse) << "\n";
}

void print_report_header(std::ostream& out) {
    out << "set          n scored coverage accuracy  precision  recall      F1    RMSE\n";
}

// Ledger and both explanation renderings for one scored claim.
void write_claim_artifacts(const fs::path& out, const ClaimScore& s, const TrainedModel& model,
                           const FeatureSchema& schema) {
    const std::string name = safe_name(s.claim_id);
    write_file(out / "ledgers" / (name + ".ledger.jsonl"), ledger_to_jsonl(s.market.ledger));
    const ExplanationReport report = explain(s.claim_id, s.market, model.genomes, s.point, schema);
    write_file(out / "explanations" / (name + ".explain.json"), render(report, RenderFormat::Json));
    write_file(out / "explanations" / (name + ".explain.md"), render(report, RenderFormat::Markdown));
}

int cmd_train(const RunConfig& rc, std::ostream& out) {
    const FeatureSchema schema = load_schema(rc.schema);
    const auto records = load_dataset(rc.data, schema);
    const fs::path dir = rc.out;
    write_file(dir / "config.txt", config_text(rc, false));
    std::string log;
    TrainingRun run = train_model(records, schema, rc.evolution, rc.jobs, [&](const GenerationStats& s) {
        log += to_json(s).dump() + "\n";
    });
    write_file(dir / "training_log.jsonl", log);
    write_file(dir / "model.json", to_json(run.model).dump(2) + "\n");
    out << "trained on " << records.size() << " claims; best generation " << run.model.best_generation
        << ", training RMSE " << run.model.best_rmse << "\n"
        << "wrote " << (dir / "model.json").string() << "\n";
    return 0;
}

int cmd_score(const std::string& model_path, const std::string& data, const std::string& out_dir,
              std::optional<std::uint64_t> seed, std::size_t jobs, std::ostream& out) {
    const TrainedModel model = load_model(model_path);
    const FeatureSchema schema = model_schema(model);
    const auto records = load_dataset(data, schema);
    const auto scores = score_claims(model, records, seed.value_or(model.config.master_seed), jobs);
    const auto labels = label_map(records);
    const fs::path dir = out_dir;
    Json all = Json::array();
    for (const auto& s : scores) {
        all.push_back(to_json(s, labels));
        write_claim_artifacts(dir, s, model, schema);
    }
    write_file(dir / "scores.json", all.dump(2) + "\n");
    std::size_t scored = 0;
    for (const auto& s : scores) scored += s.score ? 1 : 0;
    out << "scored " << scored << " of " << scores.size() << " claims\n";
    if (!labels.empty()) {
        std::vector<ClaimScore> labeled;
        for (const auto& s : scores) {
            if (labels.contains(s.claim_id)) labeled.push_back(s);
        }
        const MetricsReport report = compute_metrics(labeled, labels);
        write_file(dir / "report.json", to_json(report).dump(2) + "\n");
        print_report_header(out);
        print_report_row(out, "labeled", report);
    }
    return 0;
}

int cmd_cv(const RunConfig& rc, std::ostream& out) {
    const FeatureSchema schema = load_schema(rc.schema);
    const auto records = load_dataset(rc.data, schema);
    const FoldPlan plan = split_folds(records, rc.folds, rc.evolution.master_seed);
    const fs::path dir = rc.out;
    write_file(dir / "config.txt", config_text(rc, true));
    write_file(dir / "folds.json", to_json(plan).dump(2) + "\n");

    const CrossValidationResult cv = cross_validate(records, schema, plan, rc.evolution, rc.jobs);
    const auto labels = label_map(records);
    Json all = Json::array();
    print_report_header(out);
    for (const auto& fold : cv.folds) {
        const std::string tag = std::to_string(fold.fold);
        write_file(dir / "reports" / ("report_fold_" + tag + ".json"), to_json(fold.report).dump(2) + "\n");
        write_file(dir / "models" / ("model_fold_" + tag + ".json"), to_json(fold.model).dump(2) + "\n");
        std::string log;
        for (const auto& s : fold.history) log += to_json(s).dump() + "\n";
        write_file(dir / "logs" / ("training_log_fold_" + tag + ".jsonl"), log);
        for (const auto& s : fold.scores) {
            Json j = to_json(s, labels);
            j["fold"] = fold.fold;
            all.push_back(std::move(j));
            write_claim_artifacts(dir, s, fold.model, schema);
        }
        print_report_row(out, "fold " + tag, fold.report);
    }
    write_file(dir / "reports" / "report_pooled.json", to_json(cv.pooled).dump(2) + "\n");
    write_file(dir / "scores.json", all.dump(2) + "\n");
    print_report_row(out, "pooled", cv.pooled);
    return 0;
}

int cmd_explain(const std::string& model_path, const std::string& data, const std::string& ledgers,
                const std::string& out_dir, std::ostream& out) {
    const TrainedModel model = load_model(model_path);
    const FeatureSchema schema = model_schema(model);
    const auto records = load_dataset(data, schema);
    std::size_t written = 0;
    for (const auto& rec : records) {
        const fs::path ledger_path = fs::path(ledgers) / (safe_name(rec.id) + ".ledger.jsonl");
        if (!fs::exists(ledger_path)) continue;
        const MarketResult result = market_from_ledger(ledger_from_jsonl(read_file(ledger_path)),
                                                       model.config.initial_price, model.config.liquidity_b);
        const auto point = apply_normalizer(model.normalizer, rec);
        const ExplanationReport report = explain(rec.id, result, model.genomes, point, schema);
        const fs::path base = fs::path(out_dir) / safe_name(rec.id);
        write_file(base.string() + ".explain.json", render(report, RenderFormat::Json));
        write_file(base.string() + ".explain.md", render(report, RenderFormat::Markdown));
        ++written;
    }
    out << "wrote explanations for " << written << " claims\n";
    return 0;
}

int cmd_simulate(const std::string& model_path, const std::string& data, const std::string& claim,
                 std::optional<std::uint64_t> seed, std::ostream& out) {
    const TrainedModel model = load_model(model_path);
    const FeatureSchema schema = model_schema(model);
    const auto records = load_dataset(data, schema);
    const auto it = std::find_if(records.begin(), records.end(), [&](const ClaimRecord& r) { return r.id == claim; });
    if (it == records.end()) throw DataError("claim '" + claim + "' not found in " + data);
    const auto point = apply_normalizer(model.normalizer, *it);
    const std::uint64_t s = seed.value_or(model.config.master_seed);
    Rng rng = make_rng(s, {stream::kScore, fnv1a(it->id)});
    const MarketResult result = run_market(model.genomes, point, model.config.market(), rng);

    out << "claim " << it->id << " (kernels: " << kernels::backend_name(kernels::active_backend()) << ")\n";
    for (const auto& g : model.genomes) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "  agent %llu %-3s radius %.4f steepness %.2f g(x) %+.6f belief %.4f\n",
                      static_cast<unsigned long long>(g.id), std::string(to_string(g.asset_class)).c_str(), g.radius,
                      g.steepness, membership(g, point), belief(g, point));
        out << buf;
    }
    for (const auto& t : result.ledger) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "  round %3u agent %llu buys %.4f %-3s for %.4f: price %.4f -> %.4f\n", t.round,
                      static_cast<unsigned long long>(t.agent_id), t.shares, std::string(to_string(t.asset)).c_str(),
                      t.cost, t.price_before, t.price_after);
        out << buf;
    }
    out << "rounds " << result.rounds_run << ", close price " << result.close_price_yes << ", "
        << (result.scored ? "scored" : "UNSCORED") << "\n";
    out << explain(it->id, result, model.genomes, point, schema).narrative << "\n";
    return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Synthetic prediction market for scoring replicability of claims"};
    app.require_subcommand(1);

    RunConfig train_rc, cv_rc;
    CLI::App* train_cmd = app.add_subcommand("train", "Evolve an agent population on a labeled dataset");
    add_common_options(*train_cmd, train_rc, false);

    CLI::App* cv_cmd = app.add_subcommand("cv", "Stratified k-fold cross-validation");
    add_common_options(*cv_cmd, cv_rc, true);

    std::string model_path, data, out_dir, ledgers, claim;
    std::optional<std::uint64_t> seed;
    std::size_t jobs = 1;

    CLI::App* score_cmd = app.add_subcommand("score", "Score claims with a trained model");
    score_cmd->add_option("--model", model_path, "Trained model JSON")->required();
    score_cmd->add_option("--data", data, "Claims to score (labels optional)")->required();
    score_cmd->add_option("--out", out_dir, "Output directory")->required();
    score_cmd->add_option("--seed", seed, "Scoring seed (default: the model's master seed)");
    score_cmd->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);

    CLI::App* explain_cmd = app.add_subcommand("explain", "Re-render explanations from stored ledgers");
    explain_cmd->add_option("--model", model_path)->required();
    explain_cmd->add_option("--data", data)->required();
    explain_cmd->add_option("--ledgers", ledgers, "Directory of <claim>.ledger.jsonl files")->required();
    explain_cmd->add_option("--out", out_dir)->required();

    CLI::App* sim_cmd = app.add_subcommand("simulate", "Run one market verbosely");
    sim_cmd->add_option("--model", model_path)->required();
    sim_cmd->add_option("--data", data)->required();
    sim_cmd->add_option("--claim", claim, "Claim id")->required();
    sim_cmd->add_option("--seed", seed);

    SyntheticSpec synth;
    std::string synth_out;
    CLI::App* synth_cmd = app.add_subcommand("synth", "Write the two-ball synthetic benchmark dataset");
    synth_cmd->add_option("--out", synth_out, "CSV file to write")->required();
    synth_cmd->add_option("--seed", synth.seed)->capture_default_str();
    synth_cmd->add_option("--claims", synth.claims)->capture_default_str();
    synth_cmd->add_option("--dimension", synth.dimension)->capture_default_str();
    synth_cmd->add_option("--label-noise", synth.label_noise)->capture_default_str();
    synth_cmd->add_option("--far-fraction", synth.far_fraction)->capture_default_str();

    std::vector<std::string> args(argv, argv + argc);
    try {
        args = expand_config(std::move(args));
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    // CLI11 consumes the reversed argument vector, program name excluded
    std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
    try {
        app.parse(std::move(reversed));
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        if (*train_cmd) return cmd_train(train_rc, out);
        if (*cv_cmd) return cmd_cv(cv_rc, out);
        if (*score_cmd) return cmd_score(model_path, data, out_dir, seed, jobs, out);
        if (*explain_cmd) return cmd_explain(model_path, data, ledgers, out_dir, out);
        if (*sim_cmd) return cmd_simulate(model_path, data, claim, seed, out);
        if (*synth_cmd) {
            const auto records = make_synthetic_dataset(synth);
            const fs::path path = synth_out;
            if (path.has_parent_path()) fs::create_directories(path.parent_path());
            write_csv_dataset(path, FeatureSchema::generic(synth.dimension), records);
            out << "wrote " << records.size() << " claims to " << synth_out << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace synmarket
