#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "revr/grpo.hpp"
#include "revr/parse.hpp"
#include "revr/schema.hpp"
#include "revr/toy_policy.hpp"

namespace revr {

// Every distinct label an RC answer can express under the schema: both
// directions of a directed relation, one label for an undirected one.
std::vector<RelationLabel> label_vocabulary(const RelationSchema& schema);

// Nine directed relation types plus a bare "Other" class: 19 labels, the
// shape of the SemEval-2010 Task 8 label set.
RelationSchema demo_rc_schema();

// P prompts, each with a gold label drawn uniformly from the vocabulary.
struct SyntheticRcTask {
  RelationSchema schema;
  std::vector<RelationLabel> vocabulary;
  std::vector<std::size_t> gold;  // index into vocabulary, per prompt

  static SyntheticRcTask make(RelationSchema schema, std::size_t num_prompts, std::uint64_t seed);
};

// The completion text the toy policy "generates" for a vocabulary entry.
std::string render_toy_completion(const RelationLabel& label, const RelationSchema& schema);

using ToyRewardFn = std::function<double(std::string_view completion, const RelationLabel& gold)>;

// Scores with rc_reward under the task schema.
ToyRewardFn rc_reward_fn(const RelationSchema& schema);

struct TraceRecord {
  std::size_t step = 0;
  double mean_reward = 0.0;
  double mean_abs_advantage = 0.0;
  double mean_kl = 0.0;  // exact KL(policy || reference), averaged over prompts
  double mean_logprob = 0.0;  // of the sampled responses
};

struct TrainingTrace {
  std::vector<TraceRecord> records;
  ToyPolicy policy;
  ToyPolicy reference;
  double greedy_accuracy = 0.0;
  double final_kl = 0.0;
};

class TrainingError : public std::runtime_error {
 public:
  TrainingError(std::size_t step, const std::string& message)
      : std::runtime_error("step " + std::to_string(step) + ": " + message), step_(step) {}
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

// A step sweeps the prompts in order. For each prompt it samples G answers,
// scores them, standardizes the rewards within the group and takes one
// gradient-ascent step on that group's objective; the sampling policy is the
// old policy. Bit-deterministic for a given seed.
TrainingTrace train_toy(const SyntheticRcTask& task, const GrpoConfig& config, const ToyRewardFn& reward_fn);

// One JSON object per line: {step, mean_reward, mean_abs_advantage, mean_kl, mean_logprob}.
std::string trace_to_jsonl(const TrainingTrace& trace);

}  // namespace revr
