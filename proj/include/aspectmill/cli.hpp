#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "aspectmill/architectures.hpp"
#include "aspectmill/evaluation.hpp"
#include "aspectmill/learner.hpp"

namespace spdlog {
class logger;
}

namespace aspectmill::cli {

// Every default in one place:
//   epochs 20, learning rate 0.1, l2 1e-4, threshold 0.5, k 10, n inf,
//   seed 1, architecture hier, format table.
struct Defaults {
  static constexpr int epochs = 20;
  static constexpr double learning_rate = 0.1;
  static constexpr double l2 = 1e-4;
  static constexpr double threshold = kDefaultThreshold;
  static constexpr std::size_t trigger_k = kDefaultTriggerTerms;
  static constexpr std::uint64_t seed = 1;
};

enum class Subcommand { Train, Predict, Eval, Stats };

struct RunConfig {
  Subcommand subcommand = Subcommand::Train;
  std::optional<std::filesystem::path> taxonomy;  // unset: built-in default taxonomy
  std::optional<std::filesystem::path> corpus;
  std::optional<std::filesystem::path> test_corpus;
  std::optional<std::filesystem::path> bundle;
  std::optional<std::filesystem::path> output;  // unset: standard output
  std::optional<std::filesystem::path> lexicons;
  Architecture architecture = Architecture::Hierarchical;
  TrainConfig train;
  std::size_t trigger_k = Defaults::trigger_k;
  Window window;
  std::optional<double> split;  // test fraction
  std::uint64_t seed = Defaults::seed;
  ReportFormat format = ReportFormat::Table;
  bool check = false;
};

enum ExitCode : int { kSuccess = 0, kUserError = 1, kInternalError = 2 };

// "inf" or a non-negative integer.
Window parse_window(const std::string& text);

// Output checks behind predict --check: gating for the gated structures,
// no Mixed labels, per-aspect polarity only for predicted aspects. Throws
// InvariantViolation.
void check_prediction(const SentencePrediction& prediction, const ModelBundle& bundle);

// Multi-line "key: value" echo of the effective configuration.
std::string describe(const RunConfig& config);

void cmd_train(const RunConfig& config, spdlog::logger& log);
void cmd_predict(const RunConfig& config, std::ostream& out, spdlog::logger& log);
void cmd_eval(const RunConfig& config, std::ostream& out, spdlog::logger& log);
void cmd_stats(const RunConfig& config, std::ostream& out, spdlog::logger& log);

// Parses `args` (without the program name), runs the subcommand and maps
// failures to exit codes: 1 for user/input errors, 2 for internal invariant
// violations. Reports go to `out` unless --output is given; logs to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace aspectmill::cli
