// Command-line front end: dataset generation, training, evaluation, the SOMP
// baseline, SNR sweeps and the self-check suites.

#include <algorithm>
#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "subspect/experiments.hpp"
#include "subspect/gradcheck.hpp"

namespace ss = subspect;
using nlohmann::json;

namespace {

struct CommonArgs {
  std::string config = "defaults";
  std::vector<std::string> sets;
  std::string out;
  std::string matrix;
  uint64_t seed = 0;
  bool seed_given = false;
  bool json_out = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config,
                  "Config file path, or 'defaults' for built-ins");
  cmd->add_option("--set", args.sets, "Override: key=value (repeatable)");
  cmd->add_option("--out", args.out, "Output path");
  cmd->add_option("--matrix", args.matrix, "Sensing matrix blob to load");
  cmd->add_option("--seed", args.seed, "Override the relevant seed")
      ->each([&](const std::string&) { args.seed_given = true; });
  cmd->add_flag("--json", args.json_out, "Print a machine-readable summary");
}

ss::harness::Config load_config(const CommonArgs& args) {
  ss::harness::Config cfg = args.config == "defaults"
                                ? ss::harness::Config::defaults()
                                : ss::harness::Config::from_file(args.config);
  for (const auto& kv : args.sets) cfg.apply_override(kv);
  return cfg;
}

ss::sns::SensingMatrix sensing_matrix(const CommonArgs& args,
                                      const ss::harness::Config& cfg) {
  if (!args.matrix.empty()) return ss::sns::load_sensing_matrix(args.matrix);
  const int n = cfg.get_int("frame.n", 14);
  const int k = cfg.get_int("sampler.k", 7);
  const std::string offsets = cfg.get_str("sampler.offsets", "auto");
  if (offsets == "auto") return ss::sns::build_sensing_matrix(k, n);
  std::vector<int> off;
  for (double v : ss::harness::parse_grid(offsets))
    off.push_back(static_cast<int>(v));
  return ss::sns::build_sensing_matrix(k, n, off);
}

std::string normalize_kind(std::string kind) {
  std::transform(kind.begin(), kind.end(), kind.begin(), ::tolower);
  std::replace(kind.begin(), kind.end(), '_', '-');
  return kind;
}

ss::data::Dataset generate_dataset(const ss::harness::Config& cfg,
                                   const ss::sns::SensingMatrix& a,
                                   const std::string& kind_name, int count,
                                   uint64_t seed) {
  const auto gen = cfg.gen_cfg();
  const auto kind = ss::data::kind_from_name(normalize_kind(kind_name));
  const auto channel = gen.frame.channel.kind;
  switch (kind) {
    case ss::data::DatasetKind::dwss:
      return ss::data::gen_dwss(gen, a, count, seed);
    case ss::data::DatasetKind::dnmc_iq:
      return ss::data::gen_dnmc(gen, a, count, seed, false, channel);
    case ss::data::DatasetKind::dnmc_ap:
      return ss::data::gen_dnmc(gen, a, count, seed, true, channel);
    case ss::data::DatasetKind::dwmc:
      return ss::data::gen_dwmc(gen, a, count, seed, channel);
  }
  throw ss::ConfigError("bad dataset kind");
}

std::string default_dataset_kind(ss::nn::ArchId arch) {
  switch (arch) {
    case ss::nn::ArchId::dlwss: return "dwss";
    case ss::nn::ArchId::ndlmc_baseline:
    case ss::nn::ArchId::ndlmc_inception: return "dnmc-iq";
    case ss::nn::ArchId::wdlmc: return "dwmc";
  }
  return "dwss";
}

ss::nn::Sequential<float> train_from_config(const ss::harness::Config& cfg,
                                            const ss::sns::SensingMatrix& a,
                                            const std::string& data_path,
                                            ss::train::TrainResult* result) {
  const auto arch = ss::nn::arch_from_name(cfg.get_str("model.arch", "dlwss"));
  ss::data::Dataset ds;
  if (!data_path.empty()) {
    ds = ss::data::load_dataset(data_path);
  } else {
    ds = generate_dataset(
        cfg, a, cfg.get_str("dataset.kind", default_dataset_kind(arch)),
        cfg.get_int("dataset.count", 1024), cfg.get_u64("dataset.seed", 1));
  }
  auto spec = ss::nn::ModelSpec::for_arch(arch);
  spec.bands = ds.bands;
  spec.in_len = ds.len;
  auto model =
      ss::nn::build_model<float>(spec, cfg.get_u64("model.init_seed", 7));
  const auto tc = cfg.train_cfg();
  auto res = arch == ss::nn::ArchId::dlwss
                 ? ss::train::train_dlwss(model, ds, tc)
                 : ss::train::train_dlmc(model, ds, tc);
  if (result) *result = res;
  return model;
}

json report_json(const ss::metrics::MetricReport& r) {
  json j;
  j["snr_db"] = r.snr_db;
  j["sensing_acc"] = r.sensing_acc;
  j["class_acc"] = r.class_acc;
  j["runtime_sec"] = r.runtime_sec;
  return j;
}

int cmd_gen_dataset(const CommonArgs& args) {
  auto cfg = load_config(args);
  if (args.out.empty()) throw ss::ConfigError("gen-dataset needs --out");
  const auto a = sensing_matrix(args, cfg);
  const uint64_t seed =
      args.seed_given ? args.seed : cfg.get_u64("dataset.seed", 1);
  auto ds = generate_dataset(cfg, a, cfg.get_str("dataset.kind", "dwss"),
                             cfg.get_int("dataset.count", 1024), seed);
  ss::data::save_dataset(ds, args.out);
  if (args.json_out) {
    json j;
    j["path"] = args.out;
    j["count"] = ds.count();
    j["kind"] = ss::data::kind_name(ds.kind);
    j["bands"] = ds.bands;
    j["len"] = ds.len;
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "wrote " << ds.count() << " examples ("
              << ss::data::kind_name(ds.kind) << ", " << ds.bands << "x"
              << ds.len << "x2) to " << args.out << "\n";
  }
  return 0;
}

int cmd_train(const CommonArgs& args, const std::string& data_path) {
  auto cfg = load_config(args);
  if (args.out.empty()) throw ss::ConfigError("train needs --out (checkpoint)");
  const auto a = sensing_matrix(args, cfg);
  if (args.seed_given)
    const_cast<ss::harness::Config&>(cfg).apply_override(
        "learning.seed=" + std::to_string(args.seed));
  ss::train::TrainResult result;
  auto model = train_from_config(cfg, a, data_path, &result);
  ss::nn::save_checkpoint(model, args.out);
  ss::train::write_history_csv(result, args.out + ".history.csv");
  if (args.json_out) {
    json j;
    j["checkpoint"] = args.out;
    j["epochs"] = result.history.size();
    j["best_epoch"] = result.best_epoch;
    if (!result.history.empty()) {
      j["final_train_loss"] = result.history.back().train_loss;
      j["final_val_acc"] = result.history.back().val_acc;
    }
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "trained " << result.history.size() << " epochs; checkpoint "
              << args.out << "\n";
  }
  return 0;
}

int cmd_eval(const CommonArgs& args, const std::string& dlwss_path,
             const std::string& dlmc_path, const std::string& pipeline) {
  auto cfg = load_config(args);
  const auto a = sensing_matrix(args, cfg);
  ss::harness::EvalCfg ec;
  ec.snr_grid = cfg.snr_grid();
  ec.frames_per_snr = cfg.get_int("experiment.frames_per_snr", 128);
  ec.frame = cfg.frame_cfg();
  ec.seed = args.seed_given ? args.seed : cfg.get_u64("experiment.seed", 99);
  ec.l_symbols = cfg.get_int("dataset.l_symbols", 256);

  std::optional<ss::nn::Sequential<float>> dlwss, dlmc;
  if (!dlwss_path.empty()) dlwss = ss::nn::load_checkpoint(dlwss_path);
  if (!dlmc_path.empty()) {
    dlmc = ss::nn::load_checkpoint(dlmc_path);
    ec.classifier_wideband = dlmc->spec.id == ss::nn::ArchId::wdlmc;
  }
  if (pipeline == "full" && (!dlwss || !dlmc))
    throw ss::ConfigError("eval --pipeline full needs --dlwss and --dlmc");
  if (!dlwss && !dlmc)
    throw ss::ConfigError("eval needs --dlwss and/or --dlmc checkpoints");

  const auto res = ss::harness::eval_models(
      ec, a, dlwss ? &*dlwss : nullptr, dlmc ? &*dlmc : nullptr);
  if (!args.out.empty()) ss::harness::write_sweep_csv(res.report, args.out);
  if (args.json_out) {
    json j = report_json(res.report);
    for (const auto& st : res.stage_shapes)
      j["stage_shapes"][st.name] = st.dims;
    std::cout << j.dump(2) << "\n";
  } else {
    for (size_t i = 0; i < res.report.snr_db.size(); i++)
      std::cout << "snr " << res.report.snr_db[i] << " dB: sensing "
                << res.report.sensing_acc[i] << " class "
                << res.report.class_acc[i] << "\n";
  }
  return 0;
}

int cmd_somp(const CommonArgs& args, const std::string& mode) {
  auto cfg = load_config(args);
  const auto a = sensing_matrix(args, cfg);
  ss::harness::SompBaselineCfg sc;
  sc.snr_grid = cfg.snr_grid();
  sc.frames_per_snr = cfg.get_int("experiment.frames_per_snr", 128);
  sc.frame = cfg.frame_cfg();
  sc.seed = args.seed_given ? args.seed : cfg.get_u64("experiment.seed", 99);
  const std::string m =
      mode.empty() ? cfg.get_str("experiment.sparsity_mode", "oracle") : mode;
  if (m == "oracle") {
    sc.mode = ss::harness::SompBaselineCfg::Mode::oracle;
  } else if (m.rfind("fixed:", 0) == 0) {
    sc.mode = ss::harness::SompBaselineCfg::Mode::fixed;
    sc.fixed_k = std::stoi(m.substr(6));
  } else {
    throw ss::ConfigError("sparsity mode must be 'oracle' or 'fixed:<k>'");
  }
  const auto report = ss::harness::run_somp_baseline(sc, a);
  if (!args.out.empty()) ss::harness::write_sweep_csv(report, args.out);
  if (args.json_out) {
    std::cout << report_json(report).dump(2) << "\n";
  } else {
    for (size_t i = 0; i < report.snr_db.size(); i++)
      std::cout << "snr " << report.snr_db[i] << " dB: sensing "
                << report.sensing_acc[i] << "\n";
  }
  return 0;
}

int cmd_sweep(const CommonArgs& args, const std::string& dlwss_path,
              const std::string& dlmc_path) {
  auto cfg = load_config(args);
  if (args.out.empty()) throw ss::ConfigError("sweep-snr needs --out <dir>");
  const auto a = sensing_matrix(args, cfg);

  std::optional<ss::nn::Sequential<float>> dlwss, dlmc;
  const auto arch = ss::nn::arch_from_name(cfg.get_str("model.arch", "dlwss"));
  if (!dlwss_path.empty()) dlwss = ss::nn::load_checkpoint(dlwss_path);
  if (!dlmc_path.empty()) dlmc = ss::nn::load_checkpoint(dlmc_path);
  if (!dlwss && !dlmc) {
    // Train the configured architecture from scratch.
    auto model = train_from_config(cfg, a, "", nullptr);
    if (arch == ss::nn::ArchId::dlwss)
      dlwss = std::move(model);
    else
      dlmc = std::move(model);
  }

  ss::harness::EvalCfg ec;
  ec.snr_grid = cfg.snr_grid();
  ec.frames_per_snr = cfg.get_int("experiment.frames_per_snr", 128);
  ec.frame = cfg.frame_cfg();
  ec.seed = args.seed_given ? args.seed : cfg.get_u64("experiment.seed", 99);
  ec.l_symbols = cfg.get_int("dataset.l_symbols", 256);
  if (dlmc) ec.classifier_wideband = dlmc->spec.id == ss::nn::ArchId::wdlmc;

  const auto res = ss::harness::eval_models(
      ec, a, dlwss ? &*dlwss : nullptr, dlmc ? &*dlmc : nullptr);
  ss::harness::write_sweep_csv(res.report, args.out);
  if (args.json_out)
    std::cout << report_json(res.report).dump(2) << "\n";
  else
    std::cout << "sweep written to " << args.out << "/sweep.csv\n";
  return 0;
}

int cmd_gradcheck(const CommonArgs& args, int instances) {
  const uint64_t seed = args.seed_given ? args.seed : 12345;
  const auto cases = ss::nn::run_gradient_checks(instances, seed);
  if (args.json_out) {
    json j = json::array();
    for (const auto& c : cases)
      j.push_back({{"name", c.name},
                   {"instances", c.instances},
                   {"max_rel_err", c.max_rel_err},
                   {"pass", c.pass}});
    std::cout << j.dump(2) << "\n";
  } else {
    ss::nn::print_report(cases, std::cout);
  }
  return ss::nn::all_passed(cases) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sub-Nyquist wideband spectrum characterization toolkit"};
  app.require_subcommand(1);

  CommonArgs gen_args, train_args, eval_args, somp_args, sweep_args,
      grad_args, self_args;
  std::string train_data, eval_dlwss, eval_dlmc, eval_pipeline = "sensing";
  std::string somp_mode, sweep_dlwss, sweep_dlmc;
  int grad_instances = 100;

  auto* gen = app.add_subcommand("gen-dataset", "Generate and save a dataset");
  add_common(gen, gen_args);
  auto* train = app.add_subcommand("train", "Train a model, save a checkpoint");
  add_common(train, train_args);
  train->add_option("--data", train_data, "Dataset file (else generated)");
  auto* eval = app.add_subcommand("eval", "Evaluate checkpoints over the SNR grid");
  add_common(eval, eval_args);
  eval->add_option("--dlwss", eval_dlwss, "Occupancy checkpoint");
  eval->add_option("--dlmc", eval_dlmc, "Classifier checkpoint");
  eval->add_option("--pipeline", eval_pipeline,
                   "sensing | classify | full (Algorithm-1 replay)");
  auto* somp = app.add_subcommand("somp-baseline", "SOMP occupancy baseline");
  add_common(somp, somp_args);
  somp->add_option("--sparsity-mode", somp_mode, "oracle | fixed:<k>");
  auto* sweep = app.add_subcommand("sweep-snr", "Train/load then sweep SNR grid");
  add_common(sweep, sweep_args);
  sweep->add_option("--dlwss", sweep_dlwss, "Occupancy checkpoint");
  sweep->add_option("--dlmc", sweep_dlmc, "Classifier checkpoint");
  auto* grad = app.add_subcommand("gradcheck", "Finite-difference gradient checks");
  add_common(grad, grad_args);
  grad->add_option("--instances", grad_instances, "Instances per case");
  auto* self = app.add_subcommand("selftest", "Fast invariant suite");
  add_common(self, self_args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  try {
    if (gen->parsed()) return cmd_gen_dataset(gen_args);
    if (train->parsed()) return cmd_train(train_args, train_data);
    if (eval->parsed())
      return cmd_eval(eval_args, eval_dlwss, eval_dlmc, eval_pipeline);
    if (somp->parsed()) return cmd_somp(somp_args, somp_mode);
    if (sweep->parsed()) return cmd_sweep(sweep_args, sweep_dlwss, sweep_dlmc);
    if (grad->parsed()) return cmd_gradcheck(grad_args, grad_instances);
    if (self->parsed()) {
      const int failures = ss::harness::run_selftest(std::cout);
      std::cout << (failures ? "SELFTEST FAILED\n" : "SELFTEST OK\n");
      return failures ? 1 : 0;
    }
  } catch (const ss::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 3;
  } catch (const ss::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 4;
  } catch (const ss::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
