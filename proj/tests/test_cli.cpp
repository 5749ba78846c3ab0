#include <filesystem>
#include <sstream>

#include "doctest.h"
#include "synmarket/cli.hpp"
#include "synmarket/serialize.hpp"
#include "test_support.hpp"

using namespace synmarket;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome cli(std::vector<std::string> args) {
    args.insert(args.begin(), "synmarket");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

// Six labeled claims in two features, three per class.
void write_toy(const TempDir& dir) {
    spit(dir / "schema.txt", "x\ny\n");
    spit(dir / "toy.csv",
         "id,x,y,label\n"
         "a1,0.10,0.12,NotReplicable\n"
         "a2,0.15,0.08,NotReplicable\n"
         "a3,0.05,0.20,NotReplicable\n"
         "b1,0.90,0.85,Replicable\n"
         "b2,0.80,0.95,Replicable\n"
         "b3,0.88,0.78,Replicable\n");
}

std::string tree_digest(const fs::path& root) {
    std::vector<fs::path> files;
    for (const auto& e : fs::recursive_directory_iterator(root))
        // config.txt records --out and --jobs, which differ between the runs compared
        if (e.is_regular_file() && e.path().filename() != "config.txt") files.push_back(fs::relative(e.path(), root));
    std::sort(files.begin(), files.end());
    std::string all;
    for (const auto& f : files) all += f.string() + "\n" + slurp(root / f) + "\n";
    return all;
}

}  // namespace

TEST_CASE("missing dataset path is a usage error") {
    TempDir dir("cli");
    const auto r = cli({"train", "--out", (dir / "o").string()});
    CHECK(r.code != 0);
    CHECK(r.err.find("--data") != std::string::npos);
    CHECK(cli({}).code != 0);
    CHECK(cli({"bogus"}).code != 0);
}

TEST_CASE("unreadable data is a runtime error") {
    TempDir dir("cli");
    const auto r = cli({"train", "--data", (dir / "nope.csv").string(), "--out", (dir / "o").string()});
    CHECK(r.code == 1);
    CHECK(r.err.find("error") != std::string::npos);
}

TEST_CASE("train writes its config and reruns identically from it") {
    TempDir dir("cli");
    write_toy(dir);
    const auto first = cli({"train", "--data", (dir / "toy.csv").string(), "--schema", (dir / "schema.txt").string(),
                            "--out", (dir / "run1").string(), "--generations", "4", "--seed", "17"});
    REQUIRE(first.code == 0);
    for (const char* f : {"config.txt", "model.json", "training_log.jsonl"}) CHECK(fs::exists(dir / "run1" / f));
    const std::string config = slurp(dir / "run1" / "config.txt");
    CHECK(config.find("generations=4") != std::string::npos);
    CHECK(config.find("seed=17") != std::string::npos);

    const auto again = cli({"train", "--config", (dir / "run1" / "config.txt").string(), "--out", (dir / "run2").string()});
    REQUIRE(again.code == 0);
    CHECK(slurp(dir / "run1" / "model.json") == slurp(dir / "run2" / "model.json"));
    CHECK(slurp(dir / "run1" / "training_log.jsonl") == slurp(dir / "run2" / "training_log.jsonl"));

    // a command-line flag beats the config file
    const auto override = cli({"train", "--config", (dir / "run1" / "config.txt").string(), "--out",
                               (dir / "run3").string(), "--generations", "2"});
    REQUIRE(override.code == 0);
    CHECK(slurp(dir / "run3" / "config.txt").find("generations=2") != std::string::npos);
    const auto log = slurp(dir / "run3" / "training_log.jsonl");
    CHECK(std::count(log.begin(), log.end(), '\n') == 3);
}

TEST_CASE("score marks uncovered claims UNSCORED and writes explanations") {
    TempDir dir("cli");
    TrainedModel model;
    model.genomes = {Genome{1, Asset::Yes, {0.9, 0.9}, 0.2, 50}};
    model.normalizer = {{0.0, 0.0}, {1.0, 1.0}, {0.5, 0.5}};
    model.feature_names = {"x", "y"};
    spit(dir / "model.json", to_json(model).dump(2));
    spit(dir / "claims.csv", "id,x,y,label\nnear,0.9,0.9,Replicable\nfar,0.1,0.1,NotReplicable\nopen,0.85,0.9,\n");

    const auto r = cli({"score", "--model", (dir / "model.json").string(), "--data", (dir / "claims.csv").string(),
                        "--out", (dir / "s").string()});
    INFO(r.err);
    REQUIRE(r.code == 0);
    const auto scores = Json::parse(slurp(dir / "s" / "scores.json"));
    REQUIRE(scores.size() == 3);
    CHECK(scores[0].at("score").is_number());
    CHECK(scores[0].at("correct") == true);
    CHECK(scores[1].at("score") == "UNSCORED");
    CHECK(scores[1].at("correct").is_null());
    CHECK_FALSE(scores[2].contains("correct"));
    for (const char* id : {"near", "far", "open"}) {
        CHECK(fs::exists(dir / "s" / "explanations" / (std::string(id) + ".explain.md")));
        CHECK(fs::exists(dir / "s" / "explanations" / (std::string(id) + ".explain.json")));
        CHECK(fs::exists(dir / "s" / "ledgers" / (std::string(id) + ".ledger.jsonl")));
    }
    CHECK(slurp(dir / "s" / "explanations" / "far.explain.md").find("UNSCORED") != std::string::npos);
    // the report covers the two labeled claims only
    CHECK(Json::parse(slurp(dir / "s" / "report.json")).at("n_total") == 2);

    const auto e = cli({"explain", "--model", (dir / "model.json").string(), "--data", (dir / "claims.csv").string(),
                        "--ledgers", (dir / "s" / "ledgers").string(), "--out", (dir / "e").string()});
    REQUIRE(e.code == 0);
    for (const char* f : {"near.explain.json", "near.explain.md", "far.explain.md"}) {
        CHECK(slurp(dir / "e" / f) == slurp(dir / "s" / "explanations" / f));
    }

    const auto sim = cli({"simulate", "--model", (dir / "model.json").string(), "--data", (dir / "claims.csv").string(),
                          "--claim", "near"});
    CHECK(sim.code == 0);
    CHECK(sim.out.find("close price") != std::string::npos);
    CHECK(cli({"simulate", "--model", (dir / "model.json").string(), "--data", (dir / "claims.csv").string(),
               "--claim", "missing"}).code == 1);
}

TEST_CASE("two-fold cv on six claims") {
    TempDir dir("cli");
    write_toy(dir);
    const std::vector<std::string> base{"cv", "--data", (dir / "toy.csv").string(), "--schema", (dir / "schema.txt").string(),
                                        "--folds", "2", "--generations", "3"};
    auto args = base;
    args.insert(args.end(), {"--out", (dir / "cv1").string()});
    const auto r = cli(args);
    REQUIRE(r.code == 0);
    std::size_t reports = 0;
    for (const auto& e : fs::directory_iterator(dir / "cv1" / "reports")) reports += e.is_regular_file();
    CHECK(reports == 3);
    CHECK(r.out.find("pooled") != std::string::npos);

    // pooled report agrees with a recount of the per-claim scores
    const auto scores = Json::parse(slurp(dir / "cv1" / "scores.json"));
    const auto pooled = Json::parse(slurp(dir / "cv1" / "reports" / "report_pooled.json"));
    std::size_t tp = 0, fn = 0, tn = 0, fp = 0;
    for (const auto& s : scores) {
        if (s.at("score") == "UNSCORED") continue;
        const bool pred = s.at("prediction") == "Replicable", actual = s.at("label") == "Replicable";
        (pred ? (actual ? tp : fp) : (actual ? fn : tn))++;
    }
    CHECK(pooled.at("confusion").at("tp") == tp);
    CHECK(pooled.at("confusion").at("fn") == fn);
    CHECK(pooled.at("confusion").at("tn") == tn);
    CHECK(pooled.at("confusion").at("fp") == fp);
    CHECK(pooled.at("n_total") == 6);

    args = base;
    args.insert(args.end(), {"--out", (dir / "cv2").string(), "--jobs", "3"});
    REQUIRE(cli(args).code == 0);
    CHECK(tree_digest(dir / "cv1") == tree_digest(dir / "cv2"));
}

TEST_CASE("synth writes a loadable dataset") {
    TempDir dir("cli");
    const auto r = cli({"synth", "--out", (dir / "d" / "synthetic.csv").string(), "--claims", "50"});
    REQUIRE(r.code == 0);
    const std::string text = slurp(dir / "d" / "synthetic.csv");
    CHECK(std::count(text.begin(), text.end(), '\n') == 51);
}
