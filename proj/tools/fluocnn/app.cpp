#include "fluocnn/app.hpp"

#include <algorithm>
#include <filesystem>

#include <CLI11.hpp>

#include "fluocnn/commands.hpp"
#include "fluocnn/kv_config.hpp"
#include "fluocnn/manifest.hpp"

namespace fluocnn::app {

namespace {

// Fills `target` from the config file unless the flag was given.
void resolve(std::size_t& target, const CLI::Option* flag, const KeyValueConfig* kv,
             std::string_view key) {
  if (flag->count() > 0 || kv == nullptr || !kv->contains(key)) return;
  const auto v = kv->get_integer(key, 0);
  if (v < 0) throw Error(ErrorKind::config, std::string(key) + " must be >= 0");
  target = static_cast<std::size_t>(v);
}

void resolve_seed(std::uint64_t& target, const CLI::Option* flag, const KeyValueConfig* kv,
             std::string_view key) {
  if (flag->count() > 0 || kv == nullptr || !kv->contains(key)) return;
  target = static_cast<std::uint64_t>(kv->get_integer(key, 0));
}

void resolve(double& target, const CLI::Option* flag, const KeyValueConfig* kv,
             std::string_view key) {
  if (flag->count() > 0 || kv == nullptr || !kv->contains(key)) return;
  target = kv->get_double(key, target);
}

void resolve(std::string& target, const CLI::Option* flag, const KeyValueConfig* kv,
             std::string_view key) {
  if (flag->count() > 0 || kv == nullptr || !kv->contains(key)) return;
  target = kv->get_string(key, target);
}

struct HpFlags {
  nn::HyperParams* hp = nullptr;
  std::vector<std::pair<CLI::Option*, std::string>> size_opts;
  CLI::Option* dropout = nullptr;
  CLI::Option* lr = nullptr;

  void add(CLI::App* cmd, nn::HyperParams& target) {
    hp = &target;
    auto sz = [&](const char* name, std::size_t& field, const char* help) {
      size_opts.emplace_back(cmd->add_option(name, field, help)->capture_default_str(),
                             std::string(name).substr(2));
    };
    sz("--filters1", target.filters1, "filters in the first convolution");
    sz("--ksize1", target.ksize1, "first convolution filter size");
    sz("--pool", target.pool, "max-pool size");
    sz("--filters2", target.filters2, "filters in the second convolution");
    sz("--ksize2", target.ksize2, "second convolution filter size");
    sz("--dense1", target.dense1, "neurons in the first dense layer");
    sz("--dense2", target.dense2, "neurons in the second dense layer");
    sz("--epochs", target.epochs, "training epochs (10000 for the long schedule)");
    sz("--batch", target.batch, "mini-batch size");
    dropout = cmd->add_option("--dropout", target.dropout, "dropout rate")->capture_default_str();
    lr = cmd->add_option("--lr", target.learning_rate, "Adam learning rate")->capture_default_str();
  }

  void apply(const KeyValueConfig* kv) const {
    const std::map<std::string, std::size_t*> fields = {
        {"filters1", &hp->filters1}, {"ksize1", &hp->ksize1}, {"pool", &hp->pool},
        {"filters2", &hp->filters2}, {"ksize2", &hp->ksize2}, {"dense1", &hp->dense1},
        {"dense2", &hp->dense2},     {"epochs", &hp->epochs}, {"batch", &hp->batch}};
    for (const auto& [opt, key] : size_opts) resolve(*fields.at(key), opt, kv, key);
    resolve(hp->dropout, dropout, kv, "dropout");
    resolve(hp->learning_rate, lr, kv, "learning_rate");
  }
};

std::optional<KeyValueConfig> load_optional(const std::string& path) {
  if (path.empty()) return std::nullopt;
  return KeyValueConfig::load(path);
}

int rerun(const std::string& manifest_path, const std::string& out_dir, std::ostream& out,
          std::ostream& err) {
  const auto m = load_manifest(manifest_path);
  auto args = m.argv;
  const auto target = std::filesystem::absolute(out_dir).string();
  bool replaced = false;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if ((args[i] == "--out" || args[i] == "-o") && i + 1 < args.size()) {
      args[i + 1] = target;
      replaced = true;
    } else if (args[i].rfind("--out=", 0) == 0) {
      args[i] = "--out=" + target;
      replaced = true;
    }
  }
  if (!replaced) throw Error(ErrorKind::config, "manifest command has no --out to redirect");

  const auto here = std::filesystem::current_path();
  if (!m.cwd.empty()) std::filesystem::current_path(m.cwd);
  int rc = kInternal;
  try {
    rc = run(args, out, err);
  } catch (...) {
    std::filesystem::current_path(here);
    throw;
  }
  std::filesystem::current_path(here);
  if (rc != kOk) return rc;

  const auto fresh = load_manifest(std::filesystem::path(target) / std::string(kManifestName));
  std::size_t mismatches = 0;
  for (const auto& [name, hash] : m.outputs) {
    const auto it = fresh.outputs.find(name);
    if (it == fresh.outputs.end() || it->second != hash) {
      err << "differs: " << name << '\n';
      ++mismatches;
    }
  }
  if (fresh.outputs.size() != m.outputs.size()) ++mismatches;
  out << (mismatches == 0 ? "identical" : "MISMATCH") << ": " << m.outputs.size()
      << " outputs compared\n";
  return mismatches == 0 ? kOk : kInternal;
}

}  // namespace

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::internal_consistency:
    case ErrorKind::divergence:
      return kInternal;
    case ErrorKind::empty_dataset:
      return kEmptyResult;
    default:
      return kInputError;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"fluocnn - olive oil quality parameters from fluorescence spectra"};
  app.require_subcommand(1);
  app.set_version_flag("--version", version_string());

  Invocation inv;
  inv.argv = args;

  // generate
  GenerateRequest gen;
  std::string gen_config;
  std::uint64_t gen_seed = 0;
  auto* g = app.add_subcommand("generate", "synthesise a spectra dataset from a labels table");
  g->add_option("--labels", gen.labels, "labels CSV")->required();
  g->add_option("--gen-config", gen_config, "generator config (key = value)");
  g->add_option("--excitation", gen.excitation_nm, "excitation wavelength in nm (365 or 395)")
      ->capture_default_str();
  g->add_option("--repetitions", gen.repetitions, "spectra per oil")->capture_default_str();
  auto* gen_seed_opt = g->add_option("--seed", gen_seed, "overrides the config seed");
  g->add_option("--out,-o", gen.out, "output directory")->required();

  // train
  TrainRequest tr;
  std::string tr_config;
  std::string tr_holdout;
  HpFlags tr_hp;
  auto* t = app.add_subcommand("train", "train one network on a dataset");
  t->add_option("--data", tr.data, "dataset directory")->required();
  auto* tr_param = t->add_option("--parameter", tr.parameter, "acidity, peroxide, k270, k232 or ethyl_esters");
  auto* tr_seed = t->add_option("--seed", tr.seed, "random seed")->capture_default_str();
  t->add_option("--holdout", tr_holdout, "oil id kept out for validation");
  auto* tr_monitor = t->add_option("--monitor-every", tr.monitor_every, "epochs between monitors")
                         ->capture_default_str();
  t->add_option("--config", tr_config, "run config (key = value); flags take precedence");
  tr_hp.add(t, tr.hp);
  t->add_option("--out,-o", tr.out, "output directory")->required();

  // loocv
  LoocvRequest lo;
  std::string lo_config;
  std::string lo_exp;
  HpFlags lo_hp;
  auto* l = app.add_subcommand("loocv", "leave-one-oil-out cross-validation");
  l->add_option("--data", lo.data, "dataset directory")->required();
  auto* lo_param = l->add_option("--parameter", lo.parameter, "acidity, peroxide, k270, k232 or ethyl_esters");
  auto* lo_seed = l->add_option("--seed", lo.seed, "random seed")->capture_default_str();
  auto* lo_jobs = l->add_option("--jobs,-j", lo.jobs, "worker threads, 0 = all cores")
                      ->capture_default_str();
  auto* lo_monitor = l->add_option("--monitor-every", lo.monitor_every, "epochs between monitors")
                         ->capture_default_str();
  l->add_option("--exp-errors", lo_exp, "per-oil laboratory errors (oil_id,exp_error)");
  l->add_flag("--traces", lo.traces, "write per-fold training traces");
  l->add_option("--config", lo_config, "run config (key = value); flags take precedence");
  lo_hp.add(l, lo.hp);
  l->add_option("--out,-o", lo.out, "output directory")->required();

  // compare
  CompareRequest cmp;
  std::string cmp_out;
  auto* c = app.add_subcommand("compare", "t-test on the per-fold MAE of two loocv runs");
  c->add_option("run1", cmp.run1, "first run directory (or its folds.csv)")->required();
  c->add_option("run2", cmp.run2, "second run directory (or its folds.csv)")->required();
  c->add_option("--alpha", cmp.alpha, "significance level")->capture_default_str();
  c->add_flag("--two-sided", cmp.two_sided, "two-sided test instead of mean1 > mean2");
  c->add_option("--out,-o", cmp_out, "also write the report to this file");

  // classify
  ClassifyRequest cls;
  std::string cls_thresholds;
  std::string cls_out;
  auto* q = app.add_subcommand("classify", "grade oils from laboratory labels or predictions");
  q->add_option("input", cls.input, "labels or predicted_parameters CSV")->required();
  q->add_option("--thresholds", cls_thresholds, "threshold config (key = value)");
  q->add_option("--out,-o", cls_out, "verdicts CSV (default: stdout)");

  // report
  ReportRequest rep;
  auto* r = app.add_subcommand("report", "table and scatter data from completed loocv runs");
  r->add_option("runs", rep.runs, "loocv run directories")->required();
  r->add_option("--out,-o", rep.out, "output directory")->required();

  // rerun
  std::string rr_manifest;
  std::string rr_out;
  auto* rr = app.add_subcommand("rerun", "repeat a run from its manifest and compare outputs");
  rr->add_option("manifest", rr_manifest, "manifest.json of the original run")->required();
  rr->add_option("--out,-o", rr_out, "fresh output directory")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kOk : kInputError;
  }

  try {
    if (g->parsed()) {
      if (!gen_config.empty()) {
        gen.gen_config = gen_config;
        inv.config_paths["gen_config"] = gen_config;
      }
      if (gen_seed_opt->count() > 0) gen.seed = gen_seed;
      return cmd_generate(gen, inv, out, err);
    }
    if (t->parsed()) {
      const auto kv = load_optional(tr_config);
      if (kv) inv.config_paths["config"] = tr_config;
      const KeyValueConfig* cfg = kv ? &*kv : nullptr;
      tr_hp.apply(cfg);
      resolve_seed(tr.seed, tr_seed, cfg, "seed");
      resolve(tr.monitor_every, tr_monitor, cfg, "monitor_every");
      resolve(tr.parameter, tr_param, cfg, "parameter");
      if (tr.parameter.empty()) throw Error(ErrorKind::config, "--parameter is required");
      if (!tr_holdout.empty()) tr.holdout = tr_holdout;
      return cmd_train(tr, inv, out, err);
    }
    if (l->parsed()) {
      const auto kv = load_optional(lo_config);
      if (kv) inv.config_paths["config"] = lo_config;
      const KeyValueConfig* cfg = kv ? &*kv : nullptr;
      lo_hp.apply(cfg);
      resolve_seed(lo.seed, lo_seed, cfg, "seed");
      resolve(lo.jobs, lo_jobs, cfg, "jobs");
      resolve(lo.monitor_every, lo_monitor, cfg, "monitor_every");
      resolve(lo.parameter, lo_param, cfg, "parameter");
      if (lo.parameter.empty()) throw Error(ErrorKind::config, "--parameter is required");
      if (!lo_exp.empty()) {
        lo.exp_errors = lo_exp;
        inv.config_paths["exp_errors"] = lo_exp;
      }
      return cmd_loocv(lo, inv, out, err);
    }
    if (c->parsed()) {
      if (!cmp_out.empty()) cmp.out = cmp_out;
      return cmd_compare(cmp, out, err);
    }
    if (q->parsed()) {
      if (!cls_thresholds.empty()) cls.thresholds = cls_thresholds;
      if (!cls_out.empty()) cls.out = cls_out;
      return cmd_classify(cls, out, err);
    }
    if (r->parsed()) return cmd_report(rep, inv, out, err);
    if (rr->parsed()) return rerun(rr_manifest, rr_out, out, err);
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error (io): " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternal;
  }
  return kInternal;
}

}  // namespace fluocnn::app
