// trustlab: command-line front end.
//
// Exit codes: 0 success, 1 input error, 2 numerical failure.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "trustlab/data.hpp"
#include "trustlab/error.hpp"
#include "trustlab/format.hpp"
#include "trustlab/modeling/model.hpp"
#include "trustlab/modeling/stepwise.hpp"
#include "trustlab/pipeline.hpp"
#include "trustlab/report.hpp"

using namespace trustlab;
using Json = nlohmann::ordered_json;

namespace {

std::vector<std::string> split_list(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

double number(const std::string& s, const std::string& what) {
  const auto v = parse_double(s);
  if (!v) throw InputError("malformed number '" + s + "' in " + what);
  return *v;
}

// "a11,a12,a21,a22;b11,b12,b21,b22"
PayoffMatrix parse_game(const std::string& s) {
  const auto halves = split_list(s, ';');
  if (halves.size() != 2) throw InputError("--game needs 'a11,a12,a21,a22;b11,b12,b21,b22'");
  Cells cells[2];
  for (int p = 0; p < 2; ++p) {
    const auto parts = split_list(halves[p], ',');
    if (parts.size() != 4) throw InputError("--game needs four payoffs per player");
    for (int i = 0; i < 4; ++i) cells[p][i] = number(parts[i], "--game");
  }
  return PayoffMatrix(cells[0], cells[1]);
}

GameDataset read_dataset(const std::string& path) {
  if (path.empty()) throw InputError("--input is required");
  if (path == "-") return parse_csv(std::cin);
  if (path.size() > 6 && path.substr(path.size() - 6) == ".jsonl") {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path + "'");
    return parse_jsonl(in);
  }
  return parse_csv(path);
}

void emit(const std::string& text, const std::string& output) {
  if (output.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(output, std::ios::binary);
  if (!out) throw InputError("cannot write '" + output + "'");
  out << text;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Role parse_role(const std::string& s) {
  if (s == "trust") return Role::kTrustor;
  if (s == "fulfill") return Role::kTrustee;
  throw InputError("--target must be 'trust' or 'fulfill'");
}

TiePolicy parse_tie(const std::string& s) {
  if (s == "trustor") return TiePolicy::kTrustorFavorable;
  if (s == "trustworthy") return TiePolicy::kTrustworthy;
  if (s == "untrustworthy") return TiePolicy::kUntrustworthy;
  throw InputError("--tie must be trustor, trustworthy or untrustworthy");
}

Verdict parse_verdict_flag(const std::string& s) {
  const auto v = parse_verdict(s);
  if (!v || *v == Verdict::kNotTrustGame) {
    throw InputError("--verdict must be TrustorTrustGame or FullTrustGame");
  }
  return *v;
}

// Options shared by fit and eval.
struct ModelFlags {
  std::string input;
  std::string output;
  std::string target = "trust";
  std::string response = "auto";
  double vif = 0.0;
  std::uint64_t seed = 0;
  std::string criterion = "cv";
  int max_depth = 4;
  int min_leaf = 5;
  int prune_folds = 0;
  int rounds = 100;
  double learning_rate = 0.1;
  int knn_k = 5;
  int knn_learners = 30;
  std::string knn_sampling = "subspace";
  double temperature = 0.0;

  void add(CLI::App* app) {
    app->add_option("--input", input, "dataset CSV (or .jsonl, or - for stdin)")->required();
    app->add_option("--output", output, "write to this path instead of stdout");
    app->add_option("--target", target, "trust (trustor) or fulfill (trustee)");
    app->add_option("--response", response, "auto, proportion or decision");
    app->add_option("--vif", vif, "VIF pruning threshold; 0 disables");
    app->add_option("--seed", seed, "random seed");
    app->add_option("--criterion", criterion, "stepwise criterion: cv, aic or bic");
    app->add_option("--max-depth", max_depth, "tree depth");
    app->add_option("--min-leaf", min_leaf, "tree minimum leaf size");
    app->add_option("--prune-folds", prune_folds, "CV folds for tree pruning; 0 disables");
    app->add_option("--rounds", rounds, "boosting rounds");
    app->add_option("--learning-rate", learning_rate, "boosting learning rate");
    app->add_option("--knn-k", knn_k, "neighbors per KNN learner");
    app->add_option("--knn-learners", knn_learners, "KNN ensemble size");
    app->add_option("--knn-sampling", knn_sampling, "subspace or bootstrap");
    app->add_option("--temperature", temperature, "baseline logistic temperature; 0 = hard");
  }

  Role role() const { return parse_role(target); }

  MethodOptions method_options() const {
    MethodOptions o;
    o.role = role();
    o.params.seed = seed;
    o.params.tree.max_depth = max_depth;
    o.params.tree.min_leaf = min_leaf;
    o.params.tree.prune_folds = prune_folds;
    o.params.boost.rounds = rounds;
    o.params.boost.learning_rate = learning_rate;
    o.params.knn.k = knn_k;
    o.params.knn.learners = knn_learners;
    if (knn_sampling == "subspace") {
      o.params.knn.sampling = modeling::KnnSampling::kSubspace;
    } else if (knn_sampling == "bootstrap") {
      o.params.knn.sampling = modeling::KnnSampling::kBootstrap;
    } else {
      throw InputError("--knn-sampling must be subspace or bootstrap");
    }
    const auto c = modeling::parse_step_criterion(criterion);
    if (!c) throw InputError("--criterion must be cv, aic or bic");
    o.stepwise.criterion = *c;
    o.stepwise.seed = seed;
    o.baseline_temperature = temperature;
    return o;
  }

  GameTable table(const GameDataset& ds, PrepareLog* log) const {
    const auto r = parse_response_choice(response);
    if (!r) throw InputError("--response must be auto, proportion or decision");
    GameTable g = build_table(ds, role(), *r);
    g.table = prepare_features(g.table, vif, log);
    return g;
  }
};

Json prepare_json(const PrepareLog& log) {
  Json drops = Json::array();
  for (const auto& d : log.vif_dropped) drops.push_back({{"column", d.column}, {"vif", d.vif}});
  return {{"constant_dropped", log.constant_dropped}, {"vif_dropped", drops}};
}

Json baseline_json(const BaselineParams& p, Role role) {
  return {{"kind", to_string(p.kind)},
          {"role", role == Role::kTrustor ? "trustor" : "trustee"},
          {"values", p.values},
          {"temperature", p.temperature},
          {"fitted", p.fitted},
          {"objective", p.objective ? Json(*p.objective) : Json(nullptr)}};
}

std::string round4(const std::string& field) {
  const auto v = parse_double(field);
  return v ? format_fixed(*v, 4) : field;
}

int run(int argc, char** argv) {
  CLI::App app{"Trust-game analysis and modeling toolkit"};
  app.require_subcommand(1);

  // analyze
  auto* analyze_cmd = app.add_subcommand("analyze", "full report for one game");
  std::string game, input, output;
  std::optional<double> cl_alt, eps2, threshold_c, p_tw;
  double eps1 = 0.0;
  std::string tie = "trustor";
  analyze_cmd->add_option("--game", game, "a11,a12,a21,a22;b11,b12,b21,b22");
  analyze_cmd->add_option("--input", input, "one-row dataset CSV");
  analyze_cmd->add_option("--output", output);
  analyze_cmd->add_flag("--json", "JSON output (the default)");
  analyze_cmd->add_option("--cl-alt", cl_alt, "alternative-comparison shift");
  analyze_cmd->add_option("--eps1", eps1, "exposure margin");
  analyze_cmd->add_option("--eps2", eps2, "independence bound");
  analyze_cmd->add_option("--threshold-c", threshold_c, "trustworthiness threshold C");
  analyze_cmd->add_option("--p-tw", p_tw, "estimated trustworthiness probability");
  analyze_cmd->add_option("--tie", tie, "trustee tie policy");

  // transform
  auto* transform_cmd = app.add_subcommand("transform", "affine transform or normalize a game");
  std::string player = "both";
  double scale = 1.0, shift = 0.0;
  bool normalize_flag = false;
  transform_cmd->add_option("--game", game, "a11,a12,a21,a22;b11,b12,b21,b22")->required();
  transform_cmd->add_option("--player", player, "trustor, trustee or both");
  transform_cmd->add_option("--scale", scale, "positive multiplier");
  transform_cmd->add_option("--shift", shift, "additive shift");
  transform_cmd->add_flag("--normalize", normalize_flag, "divide by max |payoff| per player");
  transform_cmd->add_option("--output", output);
  transform_cmd->add_flag("--json", "JSON output (the default)");

  // classify
  auto* classify_cmd = app.add_subcommand("classify", "annotate, filter and split by verdict");
  std::string verdict;
  bool lenient = false, split_first = false;
  std::optional<double> fraction;
  std::uint64_t seed = 0;
  classify_cmd->add_option("--input", input)->required();
  classify_cmd->add_option("--output", output);
  classify_cmd->add_option("--verdict", verdict, "keep games with this verdict");
  classify_cmd->add_flag("--lenient", lenient, "FullTrustGame ignores mutual gain");
  classify_cmd->add_option("--fraction", fraction, "estimation fraction; adds split labels");
  classify_cmd->add_flag("--split-first", split_first, "split before filtering");
  classify_cmd->add_option("--seed", seed);
  classify_cmd->add_flag("--json", "JSON lines output");

  // features
  auto* features_cmd = app.add_subcommand("features", "strategy feature table");
  features_cmd->add_option("--input", input)->required();
  features_cmd->add_option("--output", output);
  features_cmd->add_option("--tie", tie, "trustee tie policy");

  // generate
  auto* generate_cmd = app.add_subcommand("generate", "synthetic trust-game corpus");
  int n = 1;
  std::string require, constraints, planted;
  double scale_min = 1.0, scale_max = 1.0;
  std::optional<double> noise;
  bool risk_types = false;
  generate_cmd->add_option("--n", n)->required();
  generate_cmd->add_option("--require", require, "exposure,improvement,temptation,mutual_gain");
  generate_cmd->add_option("--constraints", constraints,
                           "a22_gt_a21,b22_gt_b21,b11_gt_b12,a21_eq_a22,b21_eq_b22");
  generate_cmd->add_option("--scale-min", scale_min);
  generate_cmd->add_option("--scale-max", scale_max);
  generate_cmd->add_option("--seed", seed);
  generate_cmd->add_option("--noise", noise, "simulate trustees with this flip rate");
  generate_cmd->add_option("--planted", planted, "intercept=..,ti=..,rc_b=..");
  generate_cmd->add_flag("--risk-types", risk_types, "assign random risk categories");
  generate_cmd->add_option("--output", output);
  generate_cmd->add_flag("--json", "JSON lines output");

  // fit
  auto* fit_cmd = app.add_subcommand("fit", "train a named model and print it as JSON");
  ModelFlags fit_flags;
  std::string model;
  fit_flags.add(fit_cmd);
  fit_cmd->add_option("--model", model, "method name")->required();

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "cross-validated or split evaluation");
  ModelFlags eval_flags;
  std::string models;
  int kfold = 10;
  bool use_split = false;
  eval_flags.add(eval_cmd);
  eval_cmd->add_option("--models,--model", models, "comma-separated method names")->required();
  eval_cmd->add_option("--kfold", kfold, "number of folds");
  eval_cmd->add_flag("--split", use_split, "fit on estimation rows, score prediction rows");
  bool eval_json = false;
  eval_cmd->add_flag("--json", eval_json, "JSON output");

  // report
  auto* report_cmd = app.add_subcommand("report", "render an evaluation CSV as a table");
  report_cmd->add_option("--input", input)->required();
  report_cmd->add_option("--output", output);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (analyze_cmd->parsed()) {
    if (game.empty() == input.empty()) throw InputError("give exactly one of --game or --input");
    std::optional<PayoffMatrix> m;
    if (!input.empty()) {
      const GameDataset ds = read_dataset(input);
      if (ds.records.size() != 1) throw InputError("--input must hold exactly one game");
      m = ds.records[0].payoffs;
    } else {
      m = parse_game(game);
    }
    AnalyzeOptions opt;
    opt.wagner = {eps1, eps2, threshold_c};
    opt.p_trustworthy = p_tw;
    opt.cl_alt = cl_alt;
    opt.policy = parse_tie(tie);
    emit(dump(trustlab::analyze(*m, opt)), output);
  } else if (transform_cmd->parsed()) {
    PayoffMatrix m = parse_game(game);
    if (player != "trustor" && player != "trustee" && player != "both") {
      throw InputError("--player must be trustor, trustee or both");
    }
    if (player != "trustee") m = affine_transform(m, Player::kTrustor, scale, shift);
    if (player != "trustor") m = affine_transform(m, Player::kTrustee, scale, shift);
    Json j;
    if (normalize_flag) {
      const NormalizedPayoffMatrix nm = normalize(m);
      j["payoffs"] = to_json(nm.payoffs);
      j["scale"] = {{"a", nm.scale_a}, {"b", nm.scale_b}};
      j["weights"] = to_json(decompose(nm));
    } else {
      j["payoffs"] = to_json(m);
      j["weights"] = to_json(decompose(m));
    }
    emit(dump(j), output);
  } else if (classify_cmd->parsed()) {
    GameDataset ds = read_dataset(input);
    const std::size_t before = ds.records.size();
    if (!verdict.empty()) {
      const Verdict want = parse_verdict_flag(verdict);
      if (lenient) {
        GameDataset kept{{}, ds.extra_columns};
        for (const GameRecord& r : ds.records) {
          if (satisfies(classify(r.payoffs).verdict_lenient, want)) kept.records.push_back(r);
        }
        ds = std::move(kept);
        if (fraction) ds = trustlab::split(ds, *fraction, seed);
      } else if (fraction) {
        ds = filter_and_split(ds, want, *fraction, seed,
                              split_first ? FilterOrder::kSplitThenFilter
                                          : FilterOrder::kFilterThenSplit);
      } else {
        ds = filter_by_verdict(ds, want);
      }
    } else {
      if (fraction) ds = trustlab::split(ds, *fraction, seed);
      ds.extra_columns.push_back("verdict");
      ds.extra_columns.push_back("temptation");
      for (GameRecord& r : ds.records) {
        const TrustConditionReport c = classify(r.payoffs);
        r.extras.emplace_back(to_string(lenient ? c.verdict_lenient : c.verdict));
        r.extras.emplace_back(c.temptation ? "1" : "0");
      }
    }
    std::cerr << "classify: kept " << ds.records.size() << " of " << before << " games\n";
    std::ostringstream out;
    if (classify_cmd->count("--json")) {
      write_jsonl(ds, out);
    } else {
      write_csv(ds, out);
    }
    emit(out.str(), output);
  } else if (features_cmd->parsed()) {
    const GameDataset ds = read_dataset(input);
    const TiePolicy policy = parse_tie(tie);
    std::ostringstream out;
    for (std::size_t i = 0; i < kFeatureColumns.size(); ++i) {
      out << (i ? "," : "") << kFeatureColumns[i];
    }
    out << '\n';
    for (const GameRecord& r : ds.records) {
      const auto v = feature_values(seven_strategies(r.payoffs, policy));
      for (std::size_t i = 0; i < v.size(); ++i) out << (i ? "," : "") << format_double(v[i]);
      out << '\n';
    }
    emit(out.str(), output);
  } else if (generate_cmd->parsed()) {
    GeneratorSpec spec;
    spec.n = n;
    for (const auto& c : split_list(require, ',')) {
      const auto v = parse_condition(c);
      if (!v) throw InputError("unknown condition '" + c + "'");
      spec.required.insert(*v);
    }
    for (const auto& c : split_list(constraints, ',')) {
      const auto v = parse_constraint(c);
      if (!v) throw InputError("unknown constraint '" + c + "'");
      spec.constraints.insert(*v);
    }
    spec.scale_lo = scale_min;
    spec.scale_hi = scale_max;
    spec.seed = seed;
    spec.assign_risk_types = risk_types;
    spec.trustee_noise = noise;
    if (!planted.empty()) {
      PlantedResponse pr;
      for (const auto& term : split_list(planted, ',')) {
        const auto eq = term.find('=');
        if (eq == std::string::npos) throw InputError("--planted terms look like name=value");
        const std::string name = term.substr(0, eq);
        const double value = number(term.substr(eq + 1), "--planted");
        if (name == "intercept") {
          pr.intercept = value;
        } else {
          game_quantity(name, PayoffMatrix({1, 0, 0, 0}, {1, 0, 0, 0}));  // validates name
          pr.coefficients.emplace_back(name, value);
        }
      }
      spec.response = pr;
    }
    const GameDataset ds = generate(spec);
    std::ostringstream out;
    if (generate_cmd->count("--json")) {
      write_jsonl(ds, out);
    } else {
      write_csv(ds, out);
    }
    emit(out.str(), output);
  } else if (fit_cmd->parsed()) {
    check_method(model);
    const GameDataset ds = read_dataset(fit_flags.input);
    PrepareLog log;
    const GameTable g = fit_flags.table(ds, &log);
    const MethodOptions mo = fit_flags.method_options();
    Json j;
    j["method"] = model;
    j["target"] = fit_flags.target;
    j["target_kind"] = modeling::to_string(g.table.kind());
    j["rows"] = g.table.rows();
    j["features"] = g.table.names();
    j["prepare"] = prepare_json(log);
    if (const auto bk = parse_baseline_kind(model)) {
      BaselineParams p;
      p.kind = *bk;
      p.temperature = mo.baseline_temperature;
      if (*bk != BaselineKind::kSpe) {
        p = fit_baseline(g.games, g.table.target(), *bk,
                         {mo.role, mo.baseline_temperature, std::nullopt});
      }
      j["model"] = baseline_json(p, mo.role);
    } else if (model == "ols_step" || model == "logit_step") {
      const auto kind =
          model == "ols_step" ? modeling::ModelKind::kOls : modeling::ModelKind::kLogit;
      const modeling::StepwiseResult r = modeling::stepwise(g.table, kind, mo.stepwise);
      Json steps = Json::array();
      for (const auto& s : r.log) {
        steps.push_back({{"action", s.action}, {"feature", s.feature}, {"value", s.value}});
      }
      j["criterion"] = modeling::to_string(mo.stepwise.criterion);
      j["selection"] = steps;
      j["model"] = modeling::to_json(r.model);
    } else {
      const auto kind = *modeling::parse_model_kind(model);
      j["model"] = modeling::to_json(modeling::fit_model(g.table, kind, mo.params));
    }
    emit(dump(j), fit_flags.output);
  } else if (eval_cmd->parsed()) {
    const std::vector<std::string> names = split_list(models, ',');
    if (names.empty()) throw InputError("--models is empty");
    for (const auto& m : names) check_method(m);
    const GameDataset ds = read_dataset(eval_flags.input);
    const GameTable g = eval_flags.table(ds, nullptr);
    const MethodOptions mo = eval_flags.method_options();
    if (use_split) {
      const auto reps = evaluate_split(ds, g, names, mo);
      emit(eval_json ? dump(to_json(reps)) : to_csv(reps), eval_flags.output);
    } else {
      const auto reps = evaluate(g, names, kfold, eval_flags.seed, mo);
      emit(eval_json ? dump(to_json(reps)) : to_csv(reps), eval_flags.output);
    }
  } else if (report_cmd->parsed()) {
    std::ifstream in(input, std::ios::binary);
    if (!in) throw InputError("cannot open '" + input + "'");
    std::vector<std::string> header, fields;
    std::size_t line = 0;
    if (!trustlab::detail::read_csv_record(in, header, line)) {
      throw InputError("report: empty input");
    }
    std::vector<std::vector<std::string>> rows;
    while (trustlab::detail::read_csv_record(in, fields, line)) {
      if (fields.size() != header.size()) {
        throw InputError("report: line " + std::to_string(line) + " has the wrong field count");
      }
      for (auto& f : fields) f = round4(f);
      rows.push_back(fields);
    }
    emit(render_table(header, rows), output);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
