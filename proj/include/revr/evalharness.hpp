#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "revr/corpus.hpp"
#include "revr/genclient.hpp"
#include "revr/schema.hpp"

namespace revr {

// Scored completions for one example, as persisted in the results file.
// Flag i is true iff completion i is correct: RC final reward 3, TE
// triplet F1 1.
struct ExampleOutcome {
  std::string id;
  bool failed = false;
  std::string error;
  std::vector<std::string> completions;
  std::vector<double> rewards;  // final reward per completion
  std::vector<bool> correct;
  // RC: gold and predicted labels in answer grammar; a format failure is
  // recorded as nullopt.
  std::string gold;
  std::vector<std::optional<std::string>> predicted;
  // TE only.
  std::vector<double> entity_f1;
  std::vector<double> triplet_f1;

  std::size_t k() const { return correct.size(); }
};

nlohmann::json outcome_to_json(const ExampleOutcome& outcome);
ExampleOutcome outcome_from_json(const nlohmann::json& record);

// Mean over examples of (correct count / k). Throws std::invalid_argument on
// an empty list or non-uniform k.
double avg_at_k(std::span<const ExampleOutcome> outcomes);
// Fraction of examples with at least one correct flag. Same preconditions.
double pass_at_k(std::span<const ExampleOutcome> outcomes);

inline constexpr const char* kFormatFailureLabel = "<format-failure>";

struct EvalReport {
  Task task = Task::kRc;
  std::size_t k = 0;
  std::size_t n = 0;  // scored examples
  std::size_t failures = 0;  // generation failures, excluded from aggregates
  double avg_at_k = 0.0;
  double pass_at_k = 0.0;
  double mean_reward = 0.0;
  // Accuracy of the j-th sample across examples, for dispersion estimates.
  std::vector<double> per_sample_accuracy;
  // gold label -> predicted label -> count, over all samples (RC).
  std::map<std::string, std::map<std::string, std::size_t>> per_relation;
  std::optional<double> mean_entity_f1;  // TE
  std::optional<double> mean_triplet_f1;  // TE
};

nlohmann::json report_to_json(const EvalReport& report);

// Aggregates the outcomes for `ids` (in that order). For each id the last
// record wins; ids without a record are ignored.
EvalReport report_from_outcomes(Task task, std::size_t k, const std::vector<ExampleOutcome>& records,
                                const std::vector<std::string>& ids);

// All records of a results file in file order; empty if the file is absent.
std::vector<ExampleOutcome> read_results(const std::filesystem::path& path);

struct EvalOptions {
  int k = 4;
  double temperature = 0.0;
  int max_tokens = 2048;
  std::string model;
  std::filesystem::path results_path;
};

// Renders a prompt per example, samples k completions, scores them and
// appends one record per example to the results file. Examples already
// scored in that file are skipped, so reruns resume. Examples fan out
// across up to sampler.max_concurrency() workers. The report is rebuilt
// from the results file.
EvalReport evaluate_rc(const std::vector<RcExample>& dataset, const RelationSchema& schema,
                       const AnnotationGuide& guide, CompletionSampler& sampler, const EvalOptions& options);
EvalReport evaluate_te(const std::vector<TeExample>& dataset, const RelationSchema& schema,
                       const AnnotationGuide& guide, CompletionSampler& sampler, const EvalOptions& options);

}  // namespace revr
