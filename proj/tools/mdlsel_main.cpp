// mdlsel — minimum-description-length feature selection toolkit.
//
// Subcommands:
//   generate     synthesize a benchmark dataset (design, responses, truth)
//   select       run one selection scheme on a dataset, write a model file
//   build-prior  turn training-run model files into a transfer prior
//   eval         replicated benchmark: selection quality + CV test error
//   costs        print per-feature model-cost tables for the coding schemes
//
// Exit codes: 0 success, 2 invalid invocation/spec, 3 data/file problem,
// 4 numeric failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mdlsel/errors.hpp"
#include "mdlsel/eval.hpp"
#include "mdlsel/io.hpp"
#include "mdlsel/select.hpp"

namespace {

using namespace mdlsel;

std::string join_args(int argc, char** argv) {
  std::string out = "mdlsel";
  for (int i = 1; i < argc; ++i) {
    out += ' ';
    out += argv[i];
  }
  return out;
}

std::vector<int> parse_int_list(const std::string& csv, const char* what) {
  std::vector<int> out;
  std::string tok;
  std::istringstream in(csv);
  while (std::getline(in, tok, ',')) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
      out.push_back(v);
    } catch (const std::exception&) {
      throw SpecError(std::string(what) + ": not an integer: '" + tok + "'");
    }
  }
  if (out.empty()) throw SpecError(std::string(what) + ": empty list");
  return out;
}

std::string fmt(double v, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

// ---------------------------------------------------------------- generate --

struct GenerateArgs {
  std::string scenario = "partial";
  ScenarioSpec spec;
  bool continuous = false;
  int classes = 0;
  std::string out_dir;
};

int run_generate(const GenerateArgs& args, const std::string& invocation) {
  ScenarioSpec spec = args.spec;
  const auto scn = scenario_from_name(args.scenario);
  if (!scn) throw SpecError("unknown scenario: " + args.scenario);
  spec.scenario = *scn;
  spec.binarize = !args.continuous;

  auto [data, truth] = generate(spec);
  if (args.classes > 0) assign_contiguous_classes(&data, args.classes);

  std::error_code ec;
  std::filesystem::create_directories(args.out_dir, ec);
  if (ec) throw ParseError("cannot create " + args.out_dir + ": " + ec.message());

  const std::vector<std::string> comments = {invocation};
  io::MatrixData x;
  x.col_names = data.feature_names;
  x.rows = data.n;
  x.values = data.x;
  io::save_matrix(args.out_dir + "/x.csv", x, ',', comments);

  io::MatrixData y;
  y.col_names = data.task_names;
  y.rows = data.n;
  y.values = data.y;
  io::save_matrix(args.out_dir + "/y.csv", y, ',', comments);

  io::MatrixData sup;
  sup.col_names = data.task_names;
  sup.rows = data.m;
  sup.values.assign(truth.support.v.begin(), truth.support.v.end());
  io::save_matrix(args.out_dir + "/support.csv", sup, ',', comments);

  io::MatrixData beta;
  beta.col_names = data.task_names;
  beta.rows = data.m;
  beta.values = truth.beta;
  io::save_matrix(args.out_dir + "/beta.csv", beta, ',', comments);

  if (args.classes > 0) {
    io::ClassMap map;
    for (int j = 0; j < data.m; ++j) {
      map.emplace_back(data.feature_names[static_cast<std::size_t>(j)],
                       data.class_names[static_cast<std::size_t>(data.class_of[static_cast<std::size_t>(j)])]);
    }
    io::save_classmap(args.out_dir + "/classes.tsv", map, comments);
  }

  std::cout << "generate scenario=" << scenario_name(spec.scenario) << " n=" << spec.n
            << " m=" << spec.m << " h=" << spec.h << " m_star=" << spec.m_star
            << " noise_sd=" << fmt(spec.noise_sd, 6) << " seed=" << spec.seed
            << " binarize=" << (spec.binarize ? 1 : 0) << " classes=" << args.classes
            << " out=" << args.out_dir << "\n";
  return 0;
}

// ------------------------------------------------------------------ select --

struct SelectArgs {
  std::string x_path, y_path, classmap_path, scheme = "partial-mic", out_path;
  std::string prior_path, stream_order;
  int setting = 1;
  double l_theta = 2.0;
  int top_t = 75;
  int max_features = -1;
  int extra_steps = 8;
  int threads = 1;
  bool no_prune = false;
};

int run_select(const SelectArgs& args, const std::string& invocation) {
  const auto kind = scheme_kind_from_name(args.scheme);
  if (!kind) throw SpecError("unknown scheme: " + args.scheme);

  const Dataset data = io::load_dataset(args.x_path, args.y_path, args.classmap_path);

  MethodConfig method;
  method.scheme = *kind;
  method.mic.top_t = args.top_t;
  method.mic.max_features = args.max_features;
  method.mic.l_theta = args.l_theta;
  method.mic.prune = !args.no_prune;
  method.tpc.l_theta = args.l_theta;
  method.tpc.max_features = args.max_features;
  method.tpc.extra_steps = args.extra_steps;
  method.set_threads(args.threads);
  if (!args.stream_order.empty()) {
    method.stream_order = parse_int_list(args.stream_order, "--stream-order");
  }

  TransferPrior prior;
  if (*kind == SchemeKind::transfer_tpc) {
    if (args.prior_path.empty()) throw SpecError("transfer-tpc needs --prior");
    prior = io::load_prior(args.prior_path);
    method.prior = &prior;
    method.transfer_setting = args.setting;
  }
  const bool class_family = *kind == SchemeKind::tpc || *kind == SchemeKind::tpc_fb ||
                            *kind == SchemeKind::tpc_stream;
  if (class_family && !data.has_classes()) {
    std::cerr << "warning: no class map given; falling back to flat index costs\n";
  }

  const auto t0 = std::chrono::steady_clock::now();
  const SelectionModel model = run_selection(data, method);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  if (!args.out_path.empty()) {
    io::save_model(args.out_path, model, {invocation});
  }

  std::cout << "select scheme=" << model.scheme << " n=" << data.n << " m=" << data.m
            << " h=" << data.h << " features=" << model.feature_union().size()
            << " coefficients=" << model.coefficients_selected()
            << " total_tdl=" << fmt(model.total_tdl) << " wall=" << fmt(wall) << "s";
  if (model.empty()) std::cout << " empty-model";
  std::cout << "\n";
  for (const LedgerEntry& e : model.ledger) {
    std::cout << "  add " << e.feature << " tasks=" << e.tasks.size()
              << " dSE=" << fmt(e.d_se) << " dSM=" << fmt(e.d_sm) << "\n";
  }
  return 0;
}

// ------------------------------------------------------------- build-prior --

struct BuildPriorArgs {
  std::vector<std::string> model_paths;
  std::string x_path, classmap_path, out_path;
  bool positive_only = false;
};

int run_build_prior(const BuildPriorArgs& args, const std::string& invocation) {
  const io::MatrixData x = io::load_matrix(args.x_path);
  const io::ClassMap map = io::load_classmap(args.classmap_path);
  // The universe only contributes names and classes; responses are unused.
  io::MatrixData y;
  y.col_names = {"y"};
  y.rows = x.rows;
  y.values.assign(static_cast<std::size_t>(x.rows), 0.0);
  const Dataset universe = io::assemble_dataset(x, y, &map);

  std::vector<SelectionModel> models;
  models.reserve(args.model_paths.size());
  for (const std::string& path : args.model_paths) {
    models.push_back(io::load_model(path));
  }
  const TransferPrior prior = build_prior(models, universe, args.positive_only);
  io::save_prior(args.out_path, prior, {invocation});

  std::cout << "build-prior models=" << prior.t << " classes=" << prior.class_counts.size()
            << " features-with-evidence=" << prior.feature_counts.size()
            << " positive_only=" << (args.positive_only ? 1 : 0) << " out=" << args.out_path
            << "\n";
  return 0;
}

// -------------------------------------------------------------------- eval --

struct EvalArgs {
  std::string scenarios = "partial,full,independent";
  std::string schemes = "partial-mic,full-mic,ric";
  int replicates = 5;
  int folds = 5;
  ScenarioSpec base;
  std::uint64_t seed = 0;
  int threads = 1;
  std::string out_path;
};

int run_eval_cmd(const EvalArgs& args) {
  EvalConfig cfg;
  cfg.scenarios.clear();
  {
    std::istringstream in(args.scenarios);
    std::string tok;
    while (std::getline(in, tok, ',')) {
      const auto s = scenario_from_name(tok);
      if (!s) throw SpecError("unknown scenario: " + tok);
      cfg.scenarios.push_back(*s);
    }
  }
  cfg.schemes.clear();
  {
    std::istringstream in(args.schemes);
    std::string tok;
    while (std::getline(in, tok, ',')) {
      const auto s = scheme_kind_from_name(tok);
      if (!s) throw SpecError("unknown scheme: " + tok);
      cfg.schemes.push_back(*s);
    }
  }
  cfg.replicates = args.replicates;
  cfg.folds = args.folds;
  cfg.base = args.base;
  cfg.seed = args.seed;
  cfg.threads = args.threads;

  std::cout << "eval scenarios=" << args.scenarios << " schemes=" << args.schemes
            << " replicates=" << cfg.replicates << " folds=" << cfg.folds
            << " n=" << cfg.base.n << " m=" << cfg.base.m << " h=" << cfg.base.h
            << " m_star=" << cfg.base.m_star << " noise_sd=" << fmt(cfg.base.noise_sd, 6)
            << " seed=" << cfg.seed << " threads=" << cfg.threads << "\n";

  const std::vector<EvalRow> rows = run_eval(cfg);

  if (!args.out_path.empty()) {
    std::ofstream out(args.out_path, std::ios::binary);
    if (!out) throw ParseError("cannot write " + args.out_path);
    out << "scenario\tscheme\treplicate\tseed\ttest_error\tcoef_precision\tcoef_recall"
        << "\tfeat_precision\tfeat_recall\tn_coef\tn_feat\twall_seconds\n";
    for (const EvalRow& r : rows) {
      out << scenario_name(r.scenario) << '\t' << scheme_kind_name(r.scheme) << '\t'
          << r.replicate << '\t' << r.dataset_seed << '\t' << fmt(r.test_error, 6) << '\t'
          << fmt(r.coef_pr.precision, 6) << '\t' << fmt(r.coef_pr.recall, 6) << '\t'
          << fmt(r.feat_pr.precision, 6) << '\t' << fmt(r.feat_pr.recall, 6) << '\t'
          << r.n_coef << '\t' << r.n_feat << '\t' << fmt(r.wall_seconds, 3) << '\n';
    }
  }

  for (Scenario scn : cfg.scenarios) {
    for (SchemeKind scheme : cfg.schemes) {
      const std::vector<double> errs = pooled_task_errors(rows, scheme, scn);
      const MeanStderr agg = mean_stderr(errs);
      std::vector<double> cp, cr, fp, fr;
      for (const EvalRow& r : rows) {
        if (r.scenario != scn || r.scheme != scheme) continue;
        cp.push_back(r.coef_pr.precision);
        cr.push_back(r.coef_pr.recall);
        fp.push_back(r.feat_pr.precision);
        fr.push_back(r.feat_pr.recall);
      }
      std::cout << "eval scenario=" << scenario_name(scn)
                << " scheme=" << scheme_kind_name(scheme) << " err=" << fmt(agg.mean)
                << " se=" << fmt(agg.se) << " coefP=" << fmt(mean_stderr(cp).mean)
                << " coefR=" << fmt(mean_stderr(cr).mean)
                << " featP=" << fmt(mean_stderr(fp).mean)
                << " featR=" << fmt(mean_stderr(fr).mean) << "\n";
    }
  }
  return 0;
}

// ------------------------------------------------------------------- costs --

struct CostsArgs {
  int m = 0;
  int h = 0;
  double l_theta = 2.0;
  std::string k_list;
};

int run_costs(const CostsArgs& args) {
  std::vector<int> ks;
  if (!args.k_list.empty()) {
    ks = parse_int_list(args.k_list, "--k");
  } else {
    ks = {1, std::max(1, args.h / 4), args.h};
    std::sort(ks.begin(), ks.end());
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  }
  const codes::MicCostParams params{args.m, args.h, args.l_theta};
  std::cout << "costs m=" << args.m << " h=" << args.h << " l_theta=" << fmt(args.l_theta, 3)
            << "\n";
  for (int k : ks) {
    if (k < 1 || k > args.h) throw SpecError("k must be in [1, h], got " + std::to_string(k));
    const double partial = codes::mic_model_cost(codes::MicScheme::partial, k, params);
    const double full = codes::mic_model_cost(codes::MicScheme::full, k, params);
    const double ric = codes::mic_model_cost(codes::MicScheme::ric, k, params);
    const char* best = "partial";
    double low = partial;
    if (full < low) {
      low = full;
      best = "full";
    }
    if (ric < low) {
      low = ric;
      best = "ric";
    }
    std::cout << "k=" << k << " partial=" << fmt(partial) << " full=" << fmt(full)
              << " ric=" << fmt(ric) << " best=" << best << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MDL feature selection toolkit"};
  app.require_subcommand(1);
  // Several subcommands take a literal --h option, so help is --help only.
  app.set_help_flag("--help", "Print help");
  const std::string invocation = join_args(argc, argv);

  GenerateArgs gen;
  CLI::App* cmd_gen = app.add_subcommand("generate", "Synthesize a benchmark dataset");
  cmd_gen->set_help_flag("--help", "Print help");
  cmd_gen->add_option("--scenario", gen.scenario, "partial | full | independent");
  cmd_gen->add_option("--n", gen.spec.n, "rows");
  cmd_gen->add_option("--m", gen.spec.m, "features");
  cmd_gen->add_option("--h", gen.spec.h, "responses");
  cmd_gen->add_option("--m-star", gen.spec.m_star, "true features per response");
  cmd_gen->add_option("--noise-sd", gen.spec.noise_sd, "noise standard deviation");
  cmd_gen->add_option("--seed", gen.spec.seed, "RNG seed")->required();
  cmd_gen->add_flag("--continuous", gen.continuous, "keep continuous responses");
  cmd_gen->add_option("--classes", gen.classes, "also emit K contiguous feature classes");
  cmd_gen->add_option("--out-dir", gen.out_dir, "output directory")->required();

  SelectArgs sel;
  CLI::App* cmd_sel = app.add_subcommand("select", "Run one selection scheme");
  cmd_sel->set_help_flag("--help", "Print help");
  cmd_sel->add_option("--x", sel.x_path, "design matrix file")->required();
  cmd_sel->add_option("--y", sel.y_path, "response matrix file")->required();
  cmd_sel->add_option("--classmap", sel.classmap_path, "feature class map (TSV)");
  cmd_sel->add_option("--scheme", sel.scheme,
                      "partial-mic | full-mic | ric | tpc | tpc-fb | tpc-stream | transfer-tpc");
  cmd_sel->add_option("--out", sel.out_path, "model file to write");
  cmd_sel->add_option("--l-theta", sel.l_theta, "bits per nonzero coefficient");
  cmd_sel->add_option("--top-t", sel.top_t, "screening width");
  cmd_sel->add_option("--max-features", sel.max_features, "acceptance cap (-1 = unlimited)");
  cmd_sel->add_option("--extra-steps", sel.extra_steps, "forward-backward overshoot");
  cmd_sel->add_option("--stream-order", sel.stream_order, "streamwise visit order (csv)");
  cmd_sel->add_option("--prior", sel.prior_path, "transfer prior file");
  cmd_sel->add_option("--setting", sel.setting, "transfer setting (1 or 2)");
  cmd_sel->add_option("--threads", sel.threads, "worker threads");
  cmd_sel->add_flag("--no-prune", sel.no_prune, "disable subset-size pruning");

  BuildPriorArgs bp;
  CLI::App* cmd_bp = app.add_subcommand("build-prior", "Build a transfer prior from models");
  cmd_bp->set_help_flag("--help", "Print help");
  cmd_bp->add_option("--model", bp.model_paths, "training model file (repeatable)")->required();
  cmd_bp->add_option("--x", bp.x_path, "test-universe design matrix")->required();
  cmd_bp->add_option("--classmap", bp.classmap_path, "test-universe class map")->required();
  cmd_bp->add_option("--out", bp.out_path, "prior file to write")->required();
  cmd_bp->add_flag("--positive-only", bp.positive_only,
                   "count only positive-coefficient selections");

  EvalArgs ev;
  CLI::App* cmd_ev = app.add_subcommand("eval", "Replicated benchmark with CV test error");
  cmd_ev->set_help_flag("--help", "Print help");
  cmd_ev->add_option("--scenarios", ev.scenarios, "comma list of scenarios");
  cmd_ev->add_option("--schemes", ev.schemes, "comma list of schemes");
  cmd_ev->add_option("--replicates", ev.replicates, "datasets per scenario");
  cmd_ev->add_option("--folds", ev.folds, "CV folds");
  cmd_ev->add_option("--n", ev.base.n, "rows");
  cmd_ev->add_option("--m", ev.base.m, "features");
  cmd_ev->add_option("--h", ev.base.h, "responses");
  cmd_ev->add_option("--m-star", ev.base.m_star, "true features per response");
  cmd_ev->add_option("--noise-sd", ev.base.noise_sd, "noise standard deviation");
  cmd_ev->add_option("--seed", ev.seed, "master seed")->required();
  cmd_ev->add_option("--threads", ev.threads, "worker threads");
  cmd_ev->add_option("--out", ev.out_path, "raw per-replicate TSV");

  CostsArgs co;
  CLI::App* cmd_co = app.add_subcommand("costs", "Per-feature model-cost tables");
  cmd_co->set_help_flag("--help", "Print help");
  cmd_co->add_option("--m", co.m, "features")->required();
  cmd_co->add_option("--h", co.h, "responses")->required();
  cmd_co->add_option("--l-theta", co.l_theta, "bits per nonzero coefficient");
  cmd_co->add_option("--k", co.k_list, "comma list of subset sizes");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  try {
    if (cmd_gen->parsed()) return run_generate(gen, invocation);
    if (cmd_sel->parsed()) return run_select(sel, invocation);
    if (cmd_bp->parsed()) return run_build_prior(bp, invocation);
    if (cmd_ev->parsed()) return run_eval_cmd(ev);
    if (cmd_co->parsed()) return run_costs(co);
    std::cerr << "error: no subcommand\n";
    return 2;
  } catch (const mdlsel::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.error_class()) {
      case ErrorClass::spec: return 2;
      case ErrorClass::data: return 3;
      case ErrorClass::numeric: return 4;
    }
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
