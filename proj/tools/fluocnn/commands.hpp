#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "fluocnn/nn/network.hpp"

namespace fluocnn::app {

namespace fs = std::filesystem;

/// What the manifest needs to know about how a command was invoked.
struct Invocation {
  std::vector<std::string> argv;
  std::map<std::string, std::string> config_paths;
};

struct GenerateRequest {
  fs::path labels;
  std::optional<fs::path> gen_config;
  int excitation_nm = 395;
  int repetitions = 20;
  std::optional<std::uint64_t> seed;
  fs::path out;
};

struct TrainRequest {
  fs::path data;
  std::string parameter;
  nn::HyperParams hp;
  std::uint64_t seed = 7;
  std::optional<std::string> holdout;
  std::size_t monitor_every = 10;
  fs::path out;
};

struct LoocvRequest {
  fs::path data;
  std::string parameter;
  nn::HyperParams hp;
  std::uint64_t seed = 7;
  std::size_t jobs = 0;
  std::size_t monitor_every = 10;
  std::optional<fs::path> exp_errors;
  bool traces = false;
  fs::path out;
};

struct CompareRequest {
  fs::path run1;
  fs::path run2;
  double alpha = 0.05;
  bool two_sided = false;
  std::optional<fs::path> out;
};

struct ClassifyRequest {
  fs::path input;
  std::optional<fs::path> thresholds;
  std::optional<fs::path> out;
};

struct ReportRequest {
  std::vector<fs::path> runs;
  fs::path out;
};

/// Each command returns its exit code; library errors propagate as
/// fluocnn::Error and are mapped by run().
int cmd_generate(const GenerateRequest& req, const Invocation& inv, std::ostream& out,
                 std::ostream& log);
int cmd_train(const TrainRequest& req, const Invocation& inv, std::ostream& out, std::ostream& log);
int cmd_loocv(const LoocvRequest& req, const Invocation& inv, std::ostream& out,
              std::ostream& log);
int cmd_compare(const CompareRequest& req, std::ostream& out, std::ostream& log);
int cmd_classify(const ClassifyRequest& req, std::ostream& out, std::ostream& log);
int cmd_report(const ReportRequest& req, const Invocation& inv, std::ostream& out,
               std::ostream& log);

}  // namespace fluocnn::app
