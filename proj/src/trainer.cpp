#include "revr/trainer.hpp"

#include <cmath>

#include <json.hpp>

#include "revr/reward.hpp"

namespace revr {

std::vector<RelationLabel> label_vocabulary(const RelationSchema& schema) {
  std::vector<RelationLabel> out;
  for (const auto& rel : schema.relations()) {
    if (rel.directionless_form) {
      out.push_back({rel.name, Direction::kNone});
    } else if (!rel.directed) {
      out.push_back({rel.name, Direction::kE1ToE2});
    } else {
      out.push_back({rel.name, Direction::kE1ToE2});
      out.push_back({rel.name, Direction::kE2ToE1});
    }
  }
  return out;
}

RelationSchema demo_rc_schema() {
  std::vector<RelationDef> relations;
  for (const char* name : {"Cause-Effect", "Component-Whole", "Content-Container", "Entity-Destination",
                           "Entity-Origin", "Instrument-Agency", "Member-Collection", "Message-Topic",
                           "Product-Producer"}) {
    relations.push_back({name, true, false});
  }
  relations.push_back({"Other", false, true});
  return RelationSchema(Task::kRc, std::move(relations));
}

SyntheticRcTask SyntheticRcTask::make(RelationSchema schema, std::size_t num_prompts, std::uint64_t seed) {
  if (num_prompts == 0) throw std::invalid_argument("synthetic task needs at least one prompt");
  auto vocab = label_vocabulary(schema);
  // Separate stream from the trainer's sampling RNG.
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<std::size_t> gold(num_prompts);
  for (auto& g : gold) g = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(vocab.size()));
  return SyntheticRcTask{std::move(schema), std::move(vocab), std::move(gold)};
}

std::string render_toy_completion(const RelationLabel& label, const RelationSchema& schema) {
  return "<think>compare the sentence against each definition</think><answer>" + serialize_rc_answer(label, schema) +
         "</answer>";
}

ToyRewardFn rc_reward_fn(const RelationSchema& schema) {
  return [schema](std::string_view completion, const RelationLabel& gold) {
    return rc_reward(completion, gold, schema).final_reward;
  };
}

TrainingTrace train_toy(const SyntheticRcTask& task, const GrpoConfig& config, const ToyRewardFn& reward_fn) {
  config.validate();
  const std::size_t num_prompts = task.gold.size();
  const std::size_t vocab = task.vocabulary.size();
  ToyPolicy policy(num_prompts, vocab);
  const ToyPolicy reference = policy;
  std::mt19937_64 rng(config.seed);

  std::vector<std::string> completions;
  completions.reserve(vocab);
  for (const auto& label : task.vocabulary) completions.push_back(render_toy_completion(label, task.schema));

  TrainingTrace trace{{}, policy, reference, 0.0, 0.0};
  for (std::size_t step = 1; step <= config.steps; ++step) {
    TraceRecord rec;
    rec.step = step;
    double reward_sum = 0.0;
    double abs_adv_sum = 0.0;
    double logprob_sum = 0.0;
    for (std::size_t p = 0; p < num_prompts; ++p) {
      rec.mean_kl += categorical_kl(policy, reference, p);
      GrpoGroup g;
      g.prompt_id = p;
      g.outputs.resize(config.group_size);
      g.logp_old.resize(config.group_size);
      g.logp_ref.resize(config.group_size);
      g.rewards.resize(config.group_size);
      const auto lp = policy.log_probs(p);
      const auto lp_ref = reference.log_probs(p);
      const auto& gold = task.vocabulary[task.gold[p]];
      for (std::size_t i = 0; i < config.group_size; ++i) {
        const auto token = static_cast<std::size_t>(policy.sample(p, rng));
        g.outputs[i] = {static_cast<int>(token)};
        g.logp_old[i] = {lp[token]};
        g.logp_ref[i] = {lp_ref[token]};
        g.rewards[i] = reward_fn(completions[token], gold);
        reward_sum += g.rewards[i];
        logprob_sum += lp[token];
      }
      g.advantages = group_advantages(g.rewards);
      for (double a : g.advantages) abs_adv_sum += std::abs(a);

      // One ascent step per group: the sampling policy is the old policy.
      auto batch = std::span<GrpoGroup>(&g, 1);
      refresh_logp_new(batch, policy);
      const double objective = grpo_objective(batch, config).objective;
      if (!std::isfinite(objective)) throw TrainingError(step, "non-finite objective");
      const auto grad = analytic_gradient(batch, config, policy);
      auto& theta = policy.params();
      for (std::size_t k = 0; k < theta.size(); ++k) {
        theta[k] += config.learning_rate * grad[k];
        if (!std::isfinite(theta[k])) throw TrainingError(step, "non-finite policy parameter");
      }
    }
    const auto samples = static_cast<double>(num_prompts * config.group_size);
    rec.mean_reward = reward_sum / samples;
    rec.mean_abs_advantage = abs_adv_sum / samples;
    rec.mean_logprob = logprob_sum / samples;
    rec.mean_kl /= static_cast<double>(num_prompts);
    trace.records.push_back(rec);
  }

  std::size_t correct = 0;
  for (std::size_t p = 0; p < num_prompts; ++p) {
    const auto& guess = task.vocabulary[static_cast<std::size_t>(policy.greedy(p))];
    if (labels_equal(guess, task.vocabulary[task.gold[p]], task.schema)) ++correct;
    trace.final_kl += categorical_kl(policy, reference, p);
  }
  trace.greedy_accuracy = static_cast<double>(correct) / static_cast<double>(num_prompts);
  trace.final_kl /= static_cast<double>(num_prompts);
  trace.policy = std::move(policy);
  return trace;
}

std::string trace_to_jsonl(const TrainingTrace& trace) {
  std::string out;
  for (const auto& r : trace.records) {
    nlohmann::ordered_json j;
    j["step"] = r.step;
    j["mean_reward"] = r.mean_reward;
    j["mean_abs_advantage"] = r.mean_abs_advantage;
    j["mean_kl"] = r.mean_kl;
    j["mean_logprob"] = r.mean_logprob;
    out += j.dump();
    out += '\n';
  }
  return out;
}

}  // namespace revr
