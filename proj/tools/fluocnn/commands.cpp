#include "fluocnn/commands.hpp"

#include <algorithm>
#include <map>
#include <set>

#include <json.hpp>

#include "fluocnn/data/dataset.hpp"
#include "fluocnn/error.hpp"
#include "fluocnn/eval/loocv.hpp"
#include "fluocnn/eval/metrics.hpp"
#include "fluocnn/eval/report_io.hpp"
#include "fluocnn/manifest.hpp"
#include "fluocnn/nn/checkpoint.hpp"
#include "fluocnn/nn/train.hpp"
#include "fluocnn/quality/classify.hpp"
#include "fluocnn/rng.hpp"
#include "fluocnn/stats/t_test.hpp"
#include "fluocnn/synth/generator.hpp"
#include "fluocnn/text_io.hpp"

namespace fluocnn::app {

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitEmpty = 3;

json hp_to_json(const nn::HyperParams& hp) {
  return {{"filters1", hp.filters1}, {"filters2", hp.filters2},  {"ksize1", hp.ksize1},
          {"ksize2", hp.ksize2},     {"pool", hp.pool},          {"dropout", hp.dropout},
          {"epochs", hp.epochs},     {"batch", hp.batch},        {"learning_rate", hp.learning_rate},
          {"dense1", hp.dense1},     {"dense2", hp.dense2}};
}

nn::HyperParams hp_from_json(const json& j) {
  nn::HyperParams hp;
  hp.filters1 = j.value("filters1", hp.filters1);
  hp.filters2 = j.value("filters2", hp.filters2);
  hp.ksize1 = j.value("ksize1", hp.ksize1);
  hp.ksize2 = j.value("ksize2", hp.ksize2);
  hp.pool = j.value("pool", hp.pool);
  hp.dropout = j.value("dropout", hp.dropout);
  hp.epochs = j.value("epochs", hp.epochs);
  hp.batch = j.value("batch", hp.batch);
  hp.learning_rate = j.value("learning_rate", hp.learning_rate);
  hp.dense1 = j.value("dense1", hp.dense1);
  hp.dense2 = j.value("dense2", hp.dense2);
  return hp;
}

RunManifest start_manifest(std::string command, const Invocation& inv, std::uint64_t seed) {
  RunManifest m;
  m.command = std::move(command);
  m.argv = inv.argv;
  m.cwd = fs::current_path().string();
  m.seed = seed;
  m.config_paths = inv.config_paths;
  m.started_at = utc_timestamp();
  return m;
}

struct LoadedData {
  data::Dataset dataset;  // filtered for the parameter, dark-corrected when a dark file exists
  std::string fingerprint;
};

LoadedData load_for_parameter(const fs::path& dir, data::ParameterId p) {
  const auto files = data::DatasetFiles::in(dir);
  std::optional<std::vector<double>> dark;
  auto ds = data::read_dataset(files, &dark);
  std::vector<fs::path> inputs{files.spectra, files.grid, files.labels};
  if (dark) inputs.push_back(files.dark);
  LoadedData out;
  out.fingerprint = fingerprint_files(inputs);
  out.dataset = data::filter_for_parameter(ds, p);
  if (dark) out.dataset = data::prepare(out.dataset, std::span<const double>(*dark));
  return out;
}

std::string fmt(double v) { return text::format_double(v); }

}  // namespace

// --- generate ----------------------------------------------------------------

int cmd_generate(const GenerateRequest& req, const Invocation& inv, std::ostream& out,
                 std::ostream& log) {
  const auto records = data::load_labels(req.labels);
  auto config = synth::GeneratorConfig::defaults();
  synth::GridSpec grid_spec;
  if (req.gen_config) {
    const auto kv = KeyValueConfig::load(*req.gen_config);
    config = synth::GeneratorConfig::from_kv(kv);
    grid_spec = synth::GridSpec::from_kv(kv);
  }
  if (req.seed) config.seed = *req.seed;
  config.validate();
  if (req.repetitions < 1) throw Error(ErrorKind::config, "repetitions must be >= 1");
  const auto excitation = data::excitation_from_nm(req.excitation_nm);
  const auto grid = std::make_shared<const data::WavelengthGrid>(grid_spec.make());

  auto manifest = start_manifest("generate", inv, config.seed);
  const auto dataset =
      synth::generate_dataset(records, excitation, req.repetitions, config, grid);

  OutputDir dir(req.out);
  data::write_dataset(dataset, dir.path());
  const auto files = data::DatasetFiles::in(dir.path());
  for (const auto& f : {files.spectra, files.grid, files.labels}) dir.adopt(f.filename().string());
  auto kv = config.to_kv();
  grid_spec.write_to(kv);
  dir.put("generator.conf", kv.render());

  manifest.dataset_fingerprint = fingerprint_files({files.spectra, files.grid, files.labels});
  manifest.details = {{"excitation_nm", req.excitation_nm},
                      {"repetitions", req.repetitions},
                      {"oils", dataset.oil_count()},
                      {"spectra", dataset.spectra.size()},
                      {"pixels", grid->size()}};
  dir.finish(manifest);
  log << "generated " << dataset.spectra.size() << " spectra for " << dataset.oil_count()
      << " oils at " << req.excitation_nm << " nm\n";
  out << dir.path().string() << '\n';
  return kExitOk;
}

// --- train -------------------------------------------------------------------

int cmd_train(const TrainRequest& req, const Invocation& inv, std::ostream& out,
              std::ostream& log) {
  const auto parameter = data::parse_parameter(req.parameter);
  req.hp.validate();
  auto loaded = load_for_parameter(req.data, parameter);
  const auto prepared = data::prepare(loaded.dataset);
  if (prepared.excitations().size() > 1) {
    throw Error(ErrorKind::domain, "training needs single-excitation data");
  }
  if (req.holdout && prepared.spectra_of(*req.holdout).empty()) {
    throw Error(ErrorKind::domain, "holdout oil " + *req.holdout + " is not in the dataset");
  }
  const std::size_t P = prepared.grid->size();

  std::vector<double> train_labels;
  for (const auto& s : prepared.spectra) {
    if (!req.holdout || s.oil_id != *req.holdout) {
      train_labels.push_back(*prepared.record(s.oil_id).value(parameter));
    }
  }
  if (train_labels.empty()) throw Error(ErrorKind::empty_dataset, "no training spectra");
  const auto scaling = nn::TargetScaling::fit(train_labels);
  std::vector<nn::Sample> training;
  std::vector<nn::Sample> validation;
  std::vector<double> val_labels;
  for (const auto& s : prepared.spectra) {
    const double y = *prepared.record(s.oil_id).value(parameter);
    if (req.holdout && s.oil_id == *req.holdout) {
      validation.push_back({s.intensities, scaling.encode(y)});
      val_labels.push_back(y);
    } else {
      training.push_back({s.intensities, scaling.encode(y)});
    }
  }

  auto manifest = start_manifest("train", inv, req.seed);
  auto init_rng = SeedKey(req.seed).mix("train").mix("init").rng();
  auto shuffle_rng = SeedKey(req.seed).mix("train").mix("shuffle").rng();
  auto net = nn::Network::build(req.hp, P, init_rng);
  nn::TrainOptions topt;
  topt.validation = validation;
  topt.monitor_every = req.monitor_every;
  const auto trace = nn::train(net, training, req.hp, shuffle_rng, topt);

  auto decode_all = [&](std::span<const nn::Sample> samples) {
    auto z = nn::predict_all(net, samples);
    for (double& v : z) v = scaling.decode(v);
    return z;
  };
  const double mae_train = eval::mae(decode_all(training), train_labels);
  json summary = {{"parameter", data::to_string(parameter)},
                  {"mae_train", mae_train},
                  {"parameter_count", net.parameter_count()},
                  {"training_spectra", training.size()}};
  if (!validation.empty()) {
    summary["holdout"] = *req.holdout;
    summary["mae_val"] = eval::mae(decode_all(validation), val_labels);
  }

  OutputDir dir(req.out);
  dir.put("model.ckpt", nn::encode_checkpoint(net, scaling));
  dir.put("trace.csv", trace.render_csv());
  dir.put("train_summary.json", summary.dump(2) + "\n");
  manifest.hyperparameters = hp_to_json(req.hp);
  manifest.dataset_fingerprint = loaded.fingerprint;
  manifest.details = {{"parameter", data::to_string(parameter)}, {"input_length", P}};
  dir.finish(manifest);
  log << "trained " << req.hp.describe() << " on " << training.size() << " spectra\n";
  out << summary.dump(2) << '\n';
  return kExitOk;
}

// --- loocv -------------------------------------------------------------------

int cmd_loocv(const LoocvRequest& req, const Invocation& inv, std::ostream& out,
              std::ostream& log) {
  const auto parameter = data::parse_parameter(req.parameter);
  req.hp.validate();
  std::optional<std::vector<data::ExperimentalError>> exp_errors;
  if (req.exp_errors) exp_errors = data::load_experimental_errors(*req.exp_errors);
  const auto loaded = load_for_parameter(req.data, parameter);

  auto manifest = start_manifest("loocv", inv, req.seed);
  log << "loocv " << data::to_string(parameter) << ": " << loaded.dataset.oil_count()
      << " folds, " << req.hp.describe() << '\n';
  eval::LoocvOptions opts;
  opts.jobs = req.jobs;
  opts.monitor_every = req.monitor_every;
  opts.keep_traces = req.traces;
  auto result = eval::loocv(loaded.dataset, parameter, req.hp, req.seed, opts);

  const auto* errs = exp_errors ? &*exp_errors : nullptr;
  for (auto* s : {&result.best_val, &result.best_train, &result.selected}) {
    const auto pct = eval::error_percentages(*s, errs);
    s->average_error_pct = pct.average_error_pct;
    s->label_error_pct = pct.label_error_pct;
  }
  const double baseline = eval::mean_predictor_mae(loaded.dataset, parameter);

  OutputDir dir(req.out);
  dir.put("summary.json", eval::loocv_result_to_json(result) + "\n");
  dir.put("folds.csv", eval::render_folds_csv(result.selected));
  dir.put("scatter.csv", eval::render_scatter_csv(result.selected, errs));
  if (req.exp_errors) dir.put("exp_errors.csv", text::read_file(*req.exp_errors));
  for (const auto& [oil, trace] : result.traces) dir.put("traces/" + oil + ".csv", trace.render_csv());

  manifest.hyperparameters = hp_to_json(req.hp);
  manifest.dataset_fingerprint = loaded.fingerprint;
  manifest.details = {{"parameter", data::to_string(parameter)},
                      {"input_length", loaded.dataset.grid->size()},
                      {"folds", result.selected.per_fold.size()},
                      {"parameter_count",
                       nn::parameter_count(req.hp, loaded.dataset.grid->size())},
                      {"selected_checkpoint", eval::to_string(result.selected.policy)},
                      {"baseline_mae", baseline},
                      {"jobs", req.jobs},
                      {"monitor_every", req.monitor_every}};
  dir.finish(manifest);

  out << eval::render_table({result.selected});
  out << "baseline (training-mean predictor) <MAE_V> = " << fmt(baseline) << '\n';
  if (result.selected.leakage_suspected()) {
    log << "warning: <MAE_V> exceeds 3 x <MAE_T>; the model may not generalise\n";
  }
  return kExitOk;
}

// --- compare -----------------------------------------------------------------

namespace {

struct RunView {
  fs::path dir;
  std::string parameter;
  std::vector<eval::FoldRow> folds;
  std::size_t parameter_count = 0;
};

RunView load_run_view(const fs::path& p) {
  RunView v;
  v.dir = fs::is_directory(p) ? p : p.parent_path();
  const fs::path folds = fs::is_directory(p) ? p / "folds.csv" : p;
  v.folds = eval::parse_folds_csv(text::read_file(folds));
  const auto manifest = load_manifest(v.dir / std::string(kManifestName));
  v.parameter = manifest.details.value("parameter", std::string());
  const auto hp = hp_from_json(manifest.hyperparameters);
  const std::size_t P = manifest.details.value("input_length", std::size_t{0});
  if (P == 0) throw Error(ErrorKind::parse, v.dir.string() + ": manifest lacks input_length");
  v.parameter_count = nn::parameter_count(hp, P);
  std::sort(v.folds.begin(), v.folds.end(),
            [](const auto& a, const auto& b) { return a.oil_id < b.oil_id; });
  return v;
}

}  // namespace

int cmd_compare(const CompareRequest& req, std::ostream& out, std::ostream& log) {
  const auto a = load_run_view(req.run1);
  const auto b = load_run_view(req.run2);
  if (a.parameter != b.parameter) {
    throw Error(ErrorKind::comparison_domain,
                "runs cover different parameters (" + a.parameter + " vs " + b.parameter + ")");
  }
  std::vector<std::string> ids_a;
  std::vector<std::string> ids_b;
  for (const auto& f : a.folds) ids_a.push_back(f.oil_id);
  for (const auto& f : b.folds) ids_b.push_back(f.oil_id);
  if (ids_a != ids_b) throw Error(ErrorKind::comparison_domain, "runs cover different oil sets");

  std::vector<double> mae_a;
  std::vector<double> mae_b;
  for (const auto& f : a.folds) mae_a.push_back(f.mae_val);
  for (const auto& f : b.folds) mae_b.push_back(f.mae_val);
  const auto report = stats::compare_configs(mae_a, mae_b, req.alpha, req.two_sided);

  std::string pick;
  std::string reason;
  if (report.reject_equal_means) {
    pick = report.mean2 <= report.mean1 ? "run2" : "run1";
    reason = "means differ; lower mean validation MAE";
  } else if (b.parameter_count < a.parameter_count) {
    pick = "run2";
    reason = "means not distinguishable; fewer trainable parameters";
  } else {
    pick = "run1";
    reason = a.parameter_count == b.parameter_count
                 ? "means not distinguishable; equal parameter counts, keeping run1"
                 : "means not distinguishable; fewer trainable parameters";
  }
  const json j = {{"parameter", a.parameter},
                  {"test", json::parse(report.to_json())},
                  {"run1", {{"path", a.dir.string()}, {"parameter_count", a.parameter_count}}},
                  {"run2", {{"path", b.dir.string()}, {"parameter_count", b.parameter_count}}},
                  {"recommendation", pick},
                  {"reason", reason},
                  {"note", "one-sided test of H0: equal means against mean1 > mean2 unless "
                           "two_sided is set; N_oil is reported, not gated"}};
  const auto text = j.dump(2) + "\n";
  if (req.out) text::write_file(*req.out, text);
  out << text;
  log << (report.reject_equal_means ? "H0 rejected" : "H0 not rejected") << ", recommend " << pick
      << '\n';
  return kExitOk;
}

// --- classify ----------------------------------------------------------------

int cmd_classify(const ClassifyRequest& req, std::ostream& out, std::ostream& log) {
  const auto records = data::load_labels(req.input, /*require_quality=*/false);
  const auto thresholds = req.thresholds
                              ? quality::ThresholdSet::from_kv(KeyValueConfig::load(*req.thresholds))
                              : quality::default_thresholds();
  if (records.empty()) {
    log << "no oils in " << req.input.string() << '\n';
    return kExitEmpty;
  }
  std::vector<quality::QualityVerdict> verdicts;
  for (const auto& r : records) verdicts.push_back(quality::classify(r, thresholds));
  const auto csv = quality::render_verdicts_csv(records, verdicts);
  if (req.out) {
    text::write_file(*req.out, csv);
  } else {
    out << csv;
  }
  std::size_t agree = 0;
  std::size_t labelled = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!records[i].quality) continue;
    ++labelled;
    if (*records[i].quality == verdicts[i].grade) ++agree;
  }
  if (labelled > 0) log << agree << "/" << labelled << " verdicts match the label grade\n";
  return kExitOk;
}

// --- report ------------------------------------------------------------------

int cmd_report(const ReportRequest& req, const Invocation& inv, std::ostream& out,
               std::ostream& log) {
  struct Run {
    fs::path dir;
    eval::CvSummary summary;
    std::optional<std::vector<data::ExperimentalError>> exp_errors;
  };
  std::vector<Run> runs;
  std::set<data::ParameterId> seen;
  for (const auto& dir : req.runs) {
    try {
      for (const char* f : {"manifest.json", "summary.json", "folds.csv"}) {
        if (!fs::exists(dir / f)) throw Error(ErrorKind::io, "missing " + std::string(f));
      }
      Run r{dir, eval::selected_from_json(text::read_file(dir / "summary.json")), std::nullopt};
      if (fs::exists(dir / "exp_errors.csv")) {
        r.exp_errors = data::load_experimental_errors(dir / "exp_errors.csv");
      }
      if (!seen.insert(r.summary.parameter).second) {
        log << "warning: skipping " << dir.string() << ": "
            << data::to_string(r.summary.parameter) << " already reported\n";
        continue;
      }
      runs.push_back(std::move(r));
    } catch (const Error& e) {
      log << "warning: skipping incomplete run " << dir.string() << ": " << e.what() << '\n';
    }
  }
  if (runs.empty()) {
    log << "no completed runs to report\n";
    return kExitEmpty;
  }
  std::sort(runs.begin(), runs.end(), [](const Run& a, const Run& b) {
    return data::index_of(a.summary.parameter) < data::index_of(b.summary.parameter);
  });

  std::vector<eval::CvSummary> summaries;
  std::string scatter = "parameter,oil_id,repetition,true_value,predicted,exp_error\n";
  std::map<std::string, data::OilRecord> predicted;
  for (const auto& r : runs) {
    summaries.push_back(r.summary);
    const auto body = eval::render_scatter_csv(r.summary, r.exp_errors ? &*r.exp_errors : nullptr);
    const auto name = std::string(data::to_string(r.summary.parameter));
    std::size_t start = body.find('\n') + 1;  // drop the header
    while (start < body.size()) {
      const auto end = body.find('\n', start);
      scatter += name + ',' + body.substr(start, end - start) + '\n';
      start = end + 1;
    }
    for (const auto& f : r.summary.per_fold) {
      auto& rec = predicted[f.held_out_oil];
      rec.oil_id = f.held_out_oil;
      if (!f.predictions.empty()) {
        rec.set(r.summary.parameter, eval::mean_and_sample_sd(f.predictions).mean);
      }
    }
  }
  std::vector<data::OilRecord> predicted_rows;
  for (auto& [id, rec] : predicted) predicted_rows.push_back(rec);

  auto manifest = start_manifest("report", inv, 0);
  OutputDir dir(req.out);
  const auto table = eval::render_table(summaries);
  dir.put("table.txt", table);
  dir.put("scatter.csv", scatter);
  dir.put("predicted_parameters.csv", data::render_labels(predicted_rows, /*with_quality=*/false));
  json sources = json::array();
  for (const auto& r : runs) sources.push_back(r.dir.string());
  manifest.details = {{"runs", sources}};
  dir.finish(manifest);
  out << table;
  return kExitOk;
}

}  // namespace fluocnn::app
