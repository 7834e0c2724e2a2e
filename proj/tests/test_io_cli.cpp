#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "tpmtl/cli.hpp"
#include "tpmtl/io.hpp"
#include "tpmtl/synthgen.hpp"

using namespace tpmtl;
namespace fs = std::filesystem;

namespace {

struct CliRun {
  int exit_code;
  std::string out;
  std::string err;
};

CliRun run(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path temp_dir() {
  const fs::path dir = fs::temp_directory_path() / "tpmtl_cli_tests";
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& content) {
  std::ofstream f(p);
  f << content;
}

// The two-action worked example plus a second class so train/eval work.
std::string separable_file() {
  std::string text;
  for (int i = 0; i < 6; ++i) {
    text += "a" + std::to_string(i) + "\tbrew\t1:0:" +
            std::to_string(40 + i) + ";2:20:" + std::to_string(60 + i) + "\n";
    text += "b" + std::to_string(i) + "\trelax\t3:0:" +
            std::to_string(15 + i) + ";4:30:" + std::to_string(50 + i) + "\n";
  }
  return text;
}

}  // namespace

TEST_CASE("activity file parsing: labels, comments, normalization") {
  std::istringstream in(
      "# a comment\n"
      "\n"
      "act1\tbrew\t1:5:8;2:2:4\n"
      "act2\trelax\t3:0:10\n"
      "act3\tbrew\t1:0:2\n");
  const LabeledCorpus corpus = read_activity_file(in);
  REQUIRE(corpus.activities.size() == 3);
  CHECK(corpus.label_names == std::vector<std::string>{"brew", "relax"});
  CHECK(corpus.activities[0].label == 0);
  CHECK(corpus.activities[1].label == 1);
  CHECK(corpus.activities[2].label == 0);
  // normalized on load: sorted, origin at zero
  CHECK(corpus.activities[0].actions[0] == Action{2, 0, 2});
  CHECK(corpus.activities[0].actions[1] == Action{1, 3, 6});
}

TEST_CASE("activity file round-trips through write + read") {
  const LabeledCorpus corpus = generate(benchmark_templates(3, 0.2), 5, 9);
  std::ostringstream out;
  write_activity_file(corpus, out);
  std::istringstream in(out.str());
  const LabeledCorpus back = read_activity_file(in);
  REQUIRE(back.activities.size() == corpus.activities.size());
  CHECK(back.label_names == corpus.label_names);
  for (std::size_t i = 0; i < corpus.activities.size(); ++i) {
    CHECK(back.activities[i].actions == corpus.activities[i].actions);
    CHECK(back.activities[i].label == corpus.activities[i].label);
  }
}

TEST_CASE("parse errors carry line numbers") {
  std::istringstream bad_fields("act1\tbrew\n");
  CHECK_THROWS_WITH_AS(read_activity_file(bad_fields),
                       "line 1: expected 3 tab-separated fields, got 2",
                       ParseError);

  std::istringstream bad_interval("# ok\nact1\tbrew\t1:5:5\n");
  try {
    read_activity_file(bad_interval);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line_number == 2);
  }

  std::istringstream comment_only("# nothing here\n");
  CHECK_THROWS_AS(read_activity_file(comment_only), ParseError);
}

TEST_CASE("decimal seconds convert to milliseconds with round-half-even") {
  CHECK(parse_timestamp("250", 1) == 250);        // integer ms passes through
  CHECK(parse_timestamp("2.5", 1) == 2500);       // seconds -> ms
  CHECK(parse_timestamp("1.0005", 1) == 1000);    // 1000.5 -> even 1000
  CHECK(parse_timestamp("0.0015", 1) == 2);       // 1.5 -> even 2
  CHECK(parse_timestamp("0.0025", 1) == 2);       // 2.5 -> even 2
  CHECK(parse_timestamp("0.00251", 1) == 3);      // above half rounds up
  CHECK(parse_timestamp("3.1415926", 1) == 3142);
  CHECK_THROWS_AS(parse_timestamp("1.2.3", 1), ParseError);
  CHECK_THROWS_AS(parse_timestamp("-1.5", 1), ParseError);
  CHECK_THROWS_AS(parse_timestamp("x", 1), ParseError);

  std::istringstream decimal("act1\tbrew\t1:0.5:1.25\n");
  const LabeledCorpus corpus = read_activity_file(decimal);
  CHECK(corpus.activities[0].actions[0] == Action{1, 0, 750});
}

TEST_CASE("pattern-set files round-trip") {
  const LabeledCorpus corpus = generate(benchmark_templates(3, 0.3), 6, 21);
  MiningConfig cfg;
  cfg.window = resolve_window(corpus.activities, WindowMode::kAvgTimesTwo, 0);
  cfg.minsup = 0.02;
  const FeatureSpace fs = mine(corpus.activities, cfg);
  REQUIRE(!fs.empty());

  std::ostringstream out;
  write_pattern_set(fs, cfg.window, cfg.minsup, out);
  std::istringstream in(out.str());
  const PatternSetFile file = read_pattern_set(in);
  CHECK(file.window_ticks == cfg.window);
  CHECK(file.minsup == cfg.minsup);
  CHECK(file.feature_space == fs);

  std::istringstream empty("");
  CHECK_THROWS_AS(read_pattern_set(empty), ParseError);
  std::istringstream bad_header("window=2\tminsup=0.1\n");
  CHECK_THROWS_AS(read_pattern_set(bad_header), ParseError);
  std::istringstream bad_rel("window_ticks=2\tminsup=0.1\n2\t1,2\tnearby\n");
  CHECK_THROWS_AS(read_pattern_set(bad_rel), ParseError);
}

TEST_CASE("cli: mine reproduces the worked example and validates flags") {
  const fs::path dir = temp_dir();
  const fs::path input = dir / "two_action.tsv";
  const fs::path patterns = dir / "patterns.txt";
  spit(input, "act1\tbrew\t1:0:4;2:2:6\nact2\trelax\t9:0:3\n");

  const CliRun ok = run({"mine", "--input", input.string(), "--out",
                         patterns.string(), "--minsup", "0.4",
                         "--window-mode", "fixed", "--window-ticks", "2",
                         "--max-dim", "2"});
  CHECK(ok.exit_code == 0);
  const auto stats = nlohmann::json::parse(ok.out);
  CHECK(stats["window_ticks"] == 2);
  CHECK(stats["total_patterns"] == 4);  // {1},{2},{9},(1 overlaps 2)
  CHECK(stats["patterns_per_dim"][0] == 3);
  CHECK(stats["patterns_per_dim"][1] == 1);
  CHECK(stats.contains("wall_time_ms"));

  const PatternSetFile file = read_pattern_set(patterns.string());
  CHECK(file.feature_space.size() == 4);

  const CliRun bad_minsup =
      run({"mine", "--input", input.string(), "--out", patterns.string(),
           "--minsup", "1.01"});
  CHECK(bad_minsup.exit_code == 2);
  CHECK(bad_minsup.err.find("minsup") != std::string::npos);

  const fs::path comments = dir / "comments.tsv";
  spit(comments, "# nothing\n");
  const CliRun empty = run({"mine", "--input", comments.string(), "--out",
                            patterns.string()});
  CHECK(empty.exit_code == 1);
  CHECK(empty.err.find("line 1") != std::string::npos);

  CHECK(run({"definitely-not-a-command"}).exit_code == 2);
  CHECK(run({"--help"}).exit_code == 0);
}

TEST_CASE("cli: train writes a loadable model and a solver trace") {
  const fs::path dir = temp_dir();
  const fs::path input = dir / "separable.tsv";
  const fs::path model_path = dir / "model.txt";
  const fs::path trace_path = dir / "trace.csv";
  spit(input, separable_file());

  const CliRun r = run({"train", "--input", input.string(), "--out",
                        model_path.string(), "--mode", "amtl", "--minsup",
                        "0.05", "--fista-trace", trace_path.string()});
  REQUIRE(r.exit_code == 0);
  const auto summary = nlohmann::json::parse(r.out);
  CHECK(summary["training_accuracy"] == 1.0);
  CHECK(summary["outer_iterations"].get<int>() <= 50);
  CHECK(summary["n_features"].get<int>() > 0);
  CHECK(summary["nonzero_rows"].get<int>() >= 1);

  const TrainedModel model = load_model(model_path.string());
  CHECK(model.mode == ModelMode::kAmtl);
  CHECK(model.label_names == std::vector<std::string>{"brew", "relax"});

  const std::string trace = slurp(trace_path);
  CHECK(trace.rfind("iter,objective,step_size,rel_change\n", 0) == 0);
  CHECK(std::count(trace.begin(), trace.end(), '\n') >= 2);

  // Identical invocation produces a byte-identical model file.
  const fs::path model2 = dir / "model2.txt";
  const CliRun again = run({"train", "--input", input.string(), "--out",
                            model2.string(), "--mode", "amtl", "--minsup",
                            "0.05"});
  REQUIRE(again.exit_code == 0);
  CHECK(slurp(model_path) == slurp(model2));
}

TEST_CASE("cli: eval reports CV, t-test, and exact resubstitution") {
  const fs::path dir = temp_dir();
  const fs::path input = dir / "separable_eval.tsv";
  const fs::path jsonl = dir / "report.jsonl";
  const fs::path model_path = dir / "resub_model.txt";
  spit(input, separable_file());

  const CliRun r = run({"eval", "--input", input.string(), "--mode", "amtl",
                        "--mode", "gl", "--k", "3", "--seed", "5", "--jsonl",
                        jsonl.string(), "--minsup", "0.05"});
  REQUIRE(r.exit_code == 0);

  double amtl_mean = -1.0, gl_mean = -1.0, p_value = -1.0;
  int fold_records = 0;
  std::istringstream lines(slurp(jsonl));
  std::string line;
  while (std::getline(lines, line)) {
    const auto j = nlohmann::json::parse(line);
    if (j["type"] == "fold") ++fold_records;
    if (j["type"] == "summary" && j["mode"] == "amtl") {
      amtl_mean = j["mean_accuracy"].get<double>();
    }
    if (j["type"] == "summary" && j["mode"] == "gl") {
      gl_mean = j["mean_accuracy"].get<double>();
    }
    if (j["type"] == "t_test") p_value = j["p_value"].get<double>();
  }
  CHECK(fold_records == 6);  // 3 folds x 2 modes
  CHECK(amtl_mean == 1.0);
  CHECK(gl_mean == 1.0);
  CHECK(p_value == 1.0);  // identical fold accuracies

  // Too many folds for the class size surfaces TooFewSamples.
  const CliRun toofew = run({"eval", "--input", input.string(), "--k", "10"});
  CHECK(toofew.exit_code == 2);
  CHECK(toofew.err.find("fewer than k") != std::string::npos);

  // train, then resub via the stored model: accuracies agree exactly.
  const CliRun tr = run({"train", "--input", input.string(), "--out",
                         model_path.string(), "--mode", "amtl", "--minsup",
                         "0.05"});
  REQUIRE(tr.exit_code == 0);
  const double trained_acc =
      nlohmann::json::parse(tr.out)["training_accuracy"].get<double>();
  const fs::path resub_jsonl = dir / "resub.jsonl";
  const CliRun resub = run({"eval", "--input", input.string(), "--resub",
                            "--model", model_path.string(), "--jsonl",
                            resub_jsonl.string()});
  REQUIRE(resub.exit_code == 0);
  const auto record = nlohmann::json::parse(slurp(resub_jsonl));
  CHECK(record["type"] == "resub");
  CHECK(record["accuracy"].get<double>() == trained_acc);
}

TEST_CASE("cli: eval reports are byte-identical across runs") {
  const fs::path dir = temp_dir();
  const fs::path input = dir / "synth_det.tsv";
  REQUIRE(run({"synth", "--out", input.string(), "--classes", "3",
               "--per-class", "6", "--noise", "0.2", "--seed", "42"})
              .exit_code == 0);

  const fs::path r1 = dir / "report1.jsonl";
  const fs::path r2 = dir / "report2.jsonl";
  for (const auto& path : {r1, r2}) {
    REQUIRE(run({"eval", "--input", input.string(), "--mode", "amtl", "--k",
                 "3", "--seed", "9", "--jsonl", path.string(), "--minsup",
                 "0.05"})
                .exit_code == 0);
  }
  const std::string report = slurp(r1);
  CHECK(report == slurp(r2));
  CHECK(!report.empty());
}

TEST_CASE("cli: sweep emits one row per grid value, in grid order") {
  const fs::path dir = temp_dir();
  const fs::path input = dir / "sweep_input.tsv";
  const fs::path csv = dir / "sweep.csv";
  spit(input, separable_file());

  const CliRun r = run({"sweep", "--input", input.string(), "--param",
                        "lambda", "--values", "0.01,0.05,0.2", "--k", "3",
                        "--seed", "5", "--out", csv.string(), "--minsup",
                        "0.05"});
  REQUIRE(r.exit_code == 0);
  std::istringstream lines(slurp(csv));
  std::string line;
  std::vector<std::string> rows;
  while (std::getline(lines, line)) rows.push_back(line);
  REQUIRE(rows.size() == 4);  // header + 3 values
  CHECK(rows[0] == "param,value,mean_accuracy");
  CHECK(rows[1].rfind("lambda,0.01", 0) == 0);
  CHECK(rows[2].rfind("lambda,0.05", 0) == 0);
  CHECK(rows[3].rfind("lambda,0.2", 0) == 0);

  // A one-value grid equals the eval mean for the same config.
  const fs::path jsonl = dir / "one.jsonl";
  REQUIRE(run({"eval", "--input", input.string(), "--mode", "amtl", "--k",
               "3", "--seed", "5", "--jsonl", jsonl.string(), "--minsup",
               "0.05", "--lambda", "0.05"})
              .exit_code == 0);
  double eval_mean = -1;
  std::istringstream jl(slurp(jsonl));
  while (std::getline(jl, line)) {
    const auto j = nlohmann::json::parse(line);
    if (j["type"] == "summary") eval_mean = j["mean_accuracy"].get<double>();
  }
  const CliRun one = run({"sweep", "--input", input.string(), "--param",
                          "lambda", "--values", "0.05", "--k", "3", "--seed",
                          "5", "--minsup", "0.05"});
  REQUIRE(one.exit_code == 0);
  CHECK(one.out.find(format_double(eval_mean)) != std::string::npos);

  // Doubling grid 0.001..0.016 has 5 points.
  const CliRun doubling =
      run({"sweep", "--input", input.string(), "--param", "gamma", "--double",
           "0.001:0.016", "--k", "3", "--seed", "5", "--minsup", "0.05"});
  REQUIRE(doubling.exit_code == 0);
  CHECK(std::count(doubling.out.begin(), doubling.out.end(), '\n') == 6);

  CHECK(run({"sweep", "--input", input.string(), "--param", "nope",
             "--values", "1"})
            .exit_code == 2);
}

TEST_CASE("cli: synth honors --shared groups") {
  const fs::path dir = temp_dir();
  const fs::path out_path = dir / "shared.tsv";
  REQUIRE(run({"synth", "--out", out_path.string(), "--classes", "3",
               "--per-class", "4", "--noise", "0.0", "--seed", "3",
               "--shared", "0,1"})
              .exit_code == 0);
  const LabeledCorpus corpus = read_activity_file(out_path.string());
  // Classes 0 and 1 share one template: same multiset of planted ids.
  auto ids_of = [&](int label) {
    std::multiset<ActionId> ids;
    for (const auto& act : corpus.activities) {
      if (act.label != label) continue;
      for (const auto& a : act.actions) ids.insert(a.id);
      break;  // first sample is enough, noise 0
    }
    return ids;
  };
  CHECK(ids_of(0) == ids_of(1));
  CHECK(ids_of(0) != ids_of(2));
}
