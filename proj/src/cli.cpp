#include "tpmtl/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <fstream>
#include <json.hpp>
#include <ostream>
#include <sstream>

#include "tpmtl/evaluation.hpp"
#include "tpmtl/io.hpp"
#include "tpmtl/synthgen.hpp"

namespace tpmtl {

namespace {

using nlohmann::json;

struct CliConfig {
  // mining
  double minsup = 0.01;
  std::string window_mode = "avg2";
  std::int64_t window_ticks = 0;
  std::size_t max_dim = 3;
  std::string agg = "max";
  // objective
  double lambda = 0.05;
  double gamma = 0.001;
  double theta = 0.01;
  // solver
  std::size_t fista_max_iter = 5000;
  double fista_tol = 1e-8;
  std::size_t outer_max_iter = 50;
  double outer_tol = 1e-6;
  // protocol
  std::vector<std::string> modes = {"amtl"};
  std::size_t k = 10;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  bool standardize = false;
};

void add_mining_flags(CLI::App* cmd, CliConfig& cfg) {
  cmd->add_option("--minsup", cfg.minsup, "Minimum support in (0,1]")
      ->capture_default_str();
  cmd->add_option("--window-mode", cfg.window_mode,
                  "Window width policy: avg2 (2x mean action length), max, "
                  "or fixed")
      ->check(CLI::IsMember({"avg2", "max", "fixed"}))
      ->capture_default_str();
  cmd->add_option("--window-ticks", cfg.window_ticks,
                  "Window width in ticks (with --window-mode fixed)");
  cmd->add_option("--max-dim", cfg.max_dim, "Largest pattern dimension")
      ->capture_default_str();
  cmd->add_option("--agg", cfg.agg,
                  "Corpus support aggregation: max or mean")
      ->check(CLI::IsMember({"max", "mean"}))
      ->capture_default_str();
}

void add_learning_flags(CLI::App* cmd, CliConfig& cfg) {
  cmd->add_option("--lambda", cfg.lambda, "Task-relatedness weight")
      ->capture_default_str();
  cmd->add_option("--gamma", cfg.gamma, "Ridge weight")->capture_default_str();
  cmd->add_option("--theta", cfg.theta, "Group-sparsity weight")
      ->capture_default_str();
  cmd->add_option("--fista-max-iter", cfg.fista_max_iter, "FISTA iteration cap")
      ->capture_default_str();
  cmd->add_option("--fista-tol", cfg.fista_tol,
                  "FISTA relative objective tolerance")
      ->capture_default_str();
  cmd->add_option("--outer-max-iter", cfg.outer_max_iter,
                  "Alternating rounds cap")
      ->capture_default_str();
  cmd->add_option("--outer-tol", cfg.outer_tol,
                  "Alternating relative objective tolerance")
      ->capture_default_str();
  cmd->add_flag("--standardize", cfg.standardize,
                "Z-score features (stored in the model)");
}

void validate_config(const CliConfig& cfg) {
  if (!(cfg.minsup > 0.0) || cfg.minsup > 1.0) {
    throw ValidationError("minsup must be in (0, 1]");
  }
  if (cfg.window_mode == "fixed" && cfg.window_ticks <= 0) {
    throw ValidationError("--window-mode fixed needs --window-ticks > 0");
  }
  if (cfg.max_dim < 1) throw ValidationError("max-dim must be >= 1");
  if (cfg.lambda < 0 || cfg.gamma < 0 || cfg.theta < 0) {
    throw ValidationError("lambda/gamma/theta must be >= 0");
  }
  if (cfg.k < 2) throw ValidationError("k must be >= 2");
  if (cfg.jobs < 1) throw ValidationError("jobs must be >= 1");
}

MiningConfig mining_config(const CliConfig& cfg) {
  MiningConfig mc;
  mc.minsup = cfg.minsup;
  mc.max_dim = cfg.max_dim;
  mc.aggregation = cfg.agg == "mean" ? SupportAggregation::kMean
                                     : SupportAggregation::kMax;
  mc.window = 1;  // resolved against the data before mining
  return mc;
}

WindowMode window_mode(const CliConfig& cfg) {
  if (cfg.window_mode == "max") return WindowMode::kMax;
  if (cfg.window_mode == "fixed") return WindowMode::kFixed;
  return WindowMode::kAvgTimesTwo;
}

TrainOptions train_options(const CliConfig& cfg, const std::string& mode_str) {
  const auto mode = mode_from_name(mode_str);
  if (!mode) {
    throw ValidationError("unknown mode '" + mode_str +
                          "' (amtl, mtl, gl, lasso)");
  }
  TrainOptions opt;
  opt.mining = mining_config(cfg);
  opt.window_mode = window_mode(cfg);
  opt.window_ticks = cfg.window_ticks;
  opt.hp = Hyperparams{cfg.lambda, cfg.gamma, cfg.theta};
  opt.mode = *mode;
  opt.solver.fista_max_iter = cfg.fista_max_iter;
  opt.solver.fista_tol = cfg.fista_tol;
  opt.solver.outer_max_iter = cfg.outer_max_iter;
  opt.solver.outer_tol = cfg.outer_tol;
  opt.standardize = cfg.standardize;
  return opt;
}

int cmd_mine(const CliConfig& cfg, const std::string& input,
             const std::string& out_path, std::ostream& out) {
  validate_config(cfg);
  const auto t0 = std::chrono::steady_clock::now();
  const LabeledCorpus corpus = read_activity_file(input);
  MiningConfig mc = mining_config(cfg);
  mc.window = resolve_window(corpus.activities, window_mode(cfg),
                             cfg.window_ticks);
  MiningStats stats;
  const FeatureSpace fs = mine(corpus.activities, mc, &stats);
  write_pattern_set(fs, mc.window, mc.minsup, out_path);
  const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::steady_clock::now() - t0)
                           .count();
  json j;
  j["minsup"] = mc.minsup;
  j["patterns_per_dim"] = stats.patterns_per_dim;
  j["total_patterns"] = fs.size();
  j["wall_time_ms"] = elapsed;
  j["window_ticks"] = mc.window;
  out << j.dump() << '\n';
  return 0;
}

int cmd_train(const CliConfig& cfg, const std::string& input,
              const std::string& out_path, const std::string& trace_path,
              std::ostream& out) {
  validate_config(cfg);
  if (cfg.modes.size() != 1) {
    throw ValidationError("train takes exactly one --mode");
  }
  const LabeledCorpus corpus = read_activity_file(input);
  const TrainOptions opt = train_options(cfg, cfg.modes.front());
  TrainSummary summary;
  const TrainedModel model = train(corpus, opt, &summary);
  save_model(model, out_path);
  if (!trace_path.empty()) {
    std::ofstream trace(trace_path);
    if (!trace) throw Error("cannot write " + trace_path);
    trace << "iter,objective,step_size,rel_change\n";
    for (const auto& row : summary.fista_trace) {
      trace << row.iter << ',' << format_double(row.objective) << ','
            << format_double(row.step_size) << ','
            << format_double(row.rel_change) << '\n';
    }
  }
  json j;
  j["final_objective"] = summary.final_objective;
  j["mode"] = mode_name(model.mode);
  j["n_features"] = model.feature_space.size();
  j["nonzero_rows"] = summary.nonzero_rows;
  j["outer_iterations"] = summary.outer_iterations;
  j["training_accuracy"] = summary.training_accuracy;
  j["window_ticks"] = model.window;
  out << j.dump() << '\n';
  return 0;
}

double resub_accuracy(const TrainedModel& model, const LabeledCorpus& corpus) {
  std::size_t correct = 0;
  for (const auto& act : corpus.activities) {
    if (predict(model, act).class_index == act.label) ++correct;
  }
  return static_cast<double>(correct) /
         static_cast<double>(corpus.activities.size());
}

int cmd_eval(const CliConfig& cfg, const std::string& input,
             const std::string& jsonl_path, bool resub,
             const std::string& model_path, std::ostream& out) {
  validate_config(cfg);
  const LabeledCorpus corpus = read_activity_file(input);
  std::vector<json> records;

  if (resub) {
    TrainedModel model;
    if (!model_path.empty()) {
      model = load_model(model_path);
    } else {
      model = train(corpus, train_options(cfg, cfg.modes.front()));
    }
    const double acc = resub_accuracy(model, corpus);
    out << "resubstitution accuracy (" << mode_name(model.mode)
        << "): " << format_double(acc) << '\n';
    json j;
    j["accuracy"] = acc;
    j["mode"] = mode_name(model.mode);
    j["type"] = "resub";
    records.push_back(j);
  } else {
    std::vector<CVResult> results;
    out << "mode        mean      folds\n";
    for (const auto& mode_str : cfg.modes) {
      const CVResult res = kfold_cv(corpus, cfg.k,
                                    train_options(cfg, mode_str), cfg.seed,
                                    cfg.jobs);
      std::ostringstream folds;
      for (std::size_t i = 0; i < res.fold_accuracies.size(); ++i) {
        if (i > 0) folds << ' ';
        folds << res.fold_accuracies[i];
      }
      out << mode_str << std::string(12 - std::min<std::size_t>(
                                              11, mode_str.size()),
                                     ' ')
          << res.mean_accuracy << "  [" << folds.str() << "]\n";
      for (std::size_t f = 0; f < res.fold_accuracies.size(); ++f) {
        json j;
        j["accuracy"] = res.fold_accuracies[f];
        j["fold"] = f;
        j["mode"] = mode_str;
        j["type"] = "fold";
        records.push_back(j);
      }
      json s;
      s["confusion"] = res.confusion;
      s["fold_accuracies"] = res.fold_accuracies;
      s["k"] = res.k;
      s["mean_accuracy"] = res.mean_accuracy;
      s["mode"] = mode_str;
      s["seed"] = res.seed;
      s["type"] = "summary";
      records.push_back(s);
      results.push_back(res);
    }
    if (cfg.modes.size() == 2) {
      const double p = paired_t_test(results[0].fold_accuracies,
                                     results[1].fold_accuracies);
      out << "paired t-test " << cfg.modes[0] << " vs " << cfg.modes[1]
          << ": p = " << format_double(p) << '\n';
      json j;
      j["mode_a"] = cfg.modes[0];
      j["mode_b"] = cfg.modes[1];
      j["p_value"] = p;
      j["type"] = "t_test";
      records.push_back(j);
    }
  }

  if (!jsonl_path.empty()) {
    std::ofstream jf(jsonl_path);
    if (!jf) throw Error("cannot write " + jsonl_path);
    for (const auto& r : records) jf << r.dump() << '\n';
  }
  return 0;
}

int cmd_sweep(const CliConfig& cfg, const std::string& input,
              const std::string& param, const std::string& values_csv,
              const std::string& doubling, const std::string& out_path,
              std::ostream& out) {
  validate_config(cfg);
  if ((values_csv.empty()) == (doubling.empty())) {
    throw ValidationError("give exactly one of --values or --double");
  }
  std::vector<double> grid;
  if (!values_csv.empty()) {
    std::istringstream ss(values_csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (tok.empty()) continue;
      grid.push_back(std::stod(tok));
    }
  } else {
    const auto colon = doubling.find(':');
    if (colon == std::string::npos) {
      throw ValidationError("--double expects lo:hi");
    }
    const double lo = std::stod(doubling.substr(0, colon));
    const double hi = std::stod(doubling.substr(colon + 1));
    if (lo <= 0 || hi < lo) throw ValidationError("--double needs 0 < lo <= hi");
    for (double v = lo; v <= hi; v *= 2.0) grid.push_back(v);
  }
  if (grid.empty()) throw ValidationError("empty sweep grid");

  const LabeledCorpus corpus = read_activity_file(input);
  std::ostringstream csv;
  csv << "param,value,mean_accuracy\n";
  for (const double value : grid) {
    CliConfig point = cfg;
    if (param == "lambda") {
      point.lambda = value;
    } else if (param == "gamma") {
      point.gamma = value;
    } else if (param == "theta") {
      point.theta = value;
    } else if (param == "minsup") {
      point.minsup = value;
    } else {
      throw ValidationError("unknown sweep parameter '" + param + "'");
    }
    validate_config(point);
    const CVResult res = kfold_cv(corpus, point.k,
                                  train_options(point, point.modes.front()),
                                  point.seed, point.jobs);
    csv << param << ',' << format_double(value) << ','
        << format_double(res.mean_accuracy) << '\n';
  }
  if (!out_path.empty()) {
    std::ofstream f(out_path);
    if (!f) throw Error("cannot write " + out_path);
    f << csv.str();
  }
  out << csv.str();
  return 0;
}

int cmd_synth(const std::string& out_path, std::size_t classes,
              std::size_t per_class, double noise, std::uint64_t seed,
              const std::vector<std::string>& shared, std::ostream& out) {
  if (classes < 2) throw ValidationError("--classes must be >= 2");
  if (per_class < 1) throw ValidationError("--per-class must be >= 1");
  if (noise < 0.0 || noise >= 1.0) {
    throw ValidationError("--noise must be in [0, 1)");
  }
  std::vector<std::vector<int>> groups;
  for (const auto& spec : shared) {
    std::vector<int> group;
    std::istringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (!tok.empty()) group.push_back(std::stoi(tok));
    }
    if (group.size() >= 2) groups.push_back(group);
  }
  const auto templates = benchmark_templates(classes, noise, groups);
  const LabeledCorpus corpus = generate(templates, per_class, seed);
  write_activity_file(corpus, out_path);
  json j;
  j["activities"] = corpus.activities.size();
  j["classes"] = classes;
  j["seed"] = seed;
  out << j.dump() << '\n';
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Temporal-pattern activity recognition toolkit"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read options from a key=value file");

  CliConfig cfg;
  std::string input, out_path, trace_path, jsonl_path, model_path;
  std::string sweep_param, sweep_values, sweep_double;
  bool resub = false;
  std::size_t synth_classes = 4;
  std::size_t synth_per_class = 40;
  double synth_noise = 0.3;
  std::vector<std::string> synth_shared;

  auto* mine_cmd =
      app.add_subcommand("mine", "Mine frequent temporal patterns");
  mine_cmd->add_option("--input", input, "Activity file")->required();
  mine_cmd->add_option("--out", out_path, "Pattern-set output file")
      ->required();
  add_mining_flags(mine_cmd, cfg);

  auto* train_cmd = app.add_subcommand("train", "Train a model");
  train_cmd->add_option("--input", input, "Activity file")->required();
  train_cmd->add_option("--out", out_path, "Model output file")->required();
  train_cmd->add_option("--mode", cfg.modes,
                        "Model mode: amtl, mtl, gl, lasso");
  train_cmd->add_option("--fista-trace", trace_path,
                        "Write per-iteration solver trace CSV here");
  train_cmd->add_option("--seed", cfg.seed,
                        "Accepted for flag symmetry; training is "
                        "deterministic")
      ->capture_default_str();
  add_mining_flags(train_cmd, cfg);
  add_learning_flags(train_cmd, cfg);

  auto* eval_cmd =
      app.add_subcommand("eval", "k-fold cross-validation report");
  eval_cmd->add_option("--input", input, "Activity file")->required();
  eval_cmd->add_option("--mode", cfg.modes,
                       "Mode(s); two modes add a paired t-test");
  eval_cmd->add_option("--k", cfg.k, "Number of folds")->capture_default_str();
  eval_cmd->add_option("--seed", cfg.seed, "Fold-assignment seed")
      ->capture_default_str();
  eval_cmd->add_option("--jobs", cfg.jobs, "Concurrent folds")
      ->capture_default_str();
  eval_cmd->add_option("--jsonl", jsonl_path, "Write JSON-lines report here");
  eval_cmd->add_flag("--resub", resub,
                     "Resubstitution: evaluate on the training data");
  eval_cmd->add_option("--model", model_path,
                       "With --resub: load this model instead of training");
  add_mining_flags(eval_cmd, cfg);
  add_learning_flags(eval_cmd, cfg);

  auto* sweep_cmd =
      app.add_subcommand("sweep", "Grid sweep of one parameter");
  sweep_cmd->add_option("--input", input, "Activity file")->required();
  sweep_cmd->add_option("--param", sweep_param,
                        "Parameter: lambda, gamma, theta, minsup")
      ->required();
  sweep_cmd->add_option("--values", sweep_values, "Comma-separated grid");
  sweep_cmd->add_option("--double", sweep_double,
                        "lo:hi doubling grid (lo, 2lo, 4lo, ... <= hi)");
  sweep_cmd->add_option("--out", out_path, "CSV output file");
  sweep_cmd->add_option("--mode", cfg.modes, "Model mode");
  sweep_cmd->add_option("--k", cfg.k, "Number of folds")
      ->capture_default_str();
  sweep_cmd->add_option("--seed", cfg.seed, "Fold-assignment seed")
      ->capture_default_str();
  sweep_cmd->add_option("--jobs", cfg.jobs, "Concurrent folds")
      ->capture_default_str();
  add_mining_flags(sweep_cmd, cfg);
  add_learning_flags(sweep_cmd, cfg);

  auto* synth_cmd =
      app.add_subcommand("synth", "Generate a synthetic labeled corpus");
  synth_cmd->add_option("--out", out_path, "Activity output file")->required();
  synth_cmd->add_option("--classes", synth_classes, "Number of classes")
      ->capture_default_str();
  synth_cmd->add_option("--per-class", synth_per_class, "Samples per class")
      ->capture_default_str();
  synth_cmd->add_option("--noise", synth_noise, "Distractor insertion rate")
      ->capture_default_str();
  synth_cmd->add_option("--seed", cfg.seed, "Generator seed")
      ->capture_default_str();
  synth_cmd->add_option("--shared", synth_shared,
                        "Comma-separated class group sharing one template "
                        "(repeatable)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (cfg.modes.empty()) cfg.modes = {"amtl"};
    if (mine_cmd->parsed()) return cmd_mine(cfg, input, out_path, out);
    if (train_cmd->parsed()) {
      return cmd_train(cfg, input, out_path, trace_path, out);
    }
    if (eval_cmd->parsed()) {
      return cmd_eval(cfg, input, jsonl_path, resub, model_path, out);
    }
    if (sweep_cmd->parsed()) {
      return cmd_sweep(cfg, input, sweep_param, sweep_values, sweep_double,
                       out_path, out);
    }
    if (synth_cmd->parsed()) {
      return cmd_synth(out_path, synth_classes, synth_per_class, synth_noise,
                       cfg.seed, synth_shared, out);
    }
    err << "error: no subcommand\n";
    return 2;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace tpmtl
