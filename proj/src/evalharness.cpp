#include "revr/evalharness.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "revr/io.hpp"
#include "revr/reward.hpp"

namespace revr {

using nlohmann::json;

json outcome_to_json(const ExampleOutcome& o) {
  json j;
  j["id"] = o.id;
  if (o.failed) {
    j["failed"] = true;
    j["error"] = o.error;
    return j;
  }
  j["completions"] = o.completions;
  j["rewards"] = o.rewards;
  j["correct"] = o.correct;
  j["gold"] = o.gold;
  json predicted = json::array();
  for (const auto& p : o.predicted) predicted.push_back(p ? json(*p) : json(nullptr));
  j["predicted"] = predicted;
  if (!o.entity_f1.empty()) j["entity_f1"] = o.entity_f1;
  if (!o.triplet_f1.empty()) j["triplet_f1"] = o.triplet_f1;
  return j;
}

ExampleOutcome outcome_from_json(const json& j) {
  ExampleOutcome o;
  o.id = j.at("id").get<std::string>();
  if (j.value("failed", false)) {
    o.failed = true;
    o.error = j.value("error", "");
    return o;
  }
  o.completions = j.at("completions").get<std::vector<std::string>>();
  o.rewards = j.at("rewards").get<std::vector<double>>();
  o.correct = j.at("correct").get<std::vector<bool>>();
  o.gold = j.value("gold", "");
  if (auto it = j.find("predicted"); it != j.end()) {
    for (const auto& p : *it) o.predicted.push_back(p.is_null() ? std::nullopt : std::optional(p.get<std::string>()));
  }
  if (auto it = j.find("entity_f1"); it != j.end()) o.entity_f1 = it->get<std::vector<double>>();
  if (auto it = j.find("triplet_f1"); it != j.end()) o.triplet_f1 = it->get<std::vector<double>>();
  if (o.rewards.size() != o.k() || o.completions.size() != o.k()) {
    throw std::runtime_error("result record \"" + o.id + "\" has inconsistent list lengths");
  }
  return o;
}

namespace {

std::size_t uniform_k(std::span<const ExampleOutcome> outcomes) {
  if (outcomes.empty()) throw std::invalid_argument("no outcomes to aggregate");
  const std::size_t k = outcomes.front().k();
  if (k == 0) throw std::invalid_argument("outcome with no samples");
  for (const auto& o : outcomes) {
    if (o.k() != k) throw std::invalid_argument("outcomes disagree on k");
  }
  return k;
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

}  // namespace

double avg_at_k(std::span<const ExampleOutcome> outcomes) {
  const auto k = static_cast<double>(uniform_k(outcomes));
  double total = 0.0;
  for (const auto& o : outcomes) {
    total += static_cast<double>(std::count(o.correct.begin(), o.correct.end(), true)) / k;
  }
  return total / static_cast<double>(outcomes.size());
}

double pass_at_k(std::span<const ExampleOutcome> outcomes) {
  uniform_k(outcomes);
  const auto hits = std::count_if(outcomes.begin(), outcomes.end(), [](const ExampleOutcome& o) {
    return std::find(o.correct.begin(), o.correct.end(), true) != o.correct.end();
  });
  return static_cast<double>(hits) / static_cast<double>(outcomes.size());
}

json report_to_json(const EvalReport& r) {
  json j;
  j["task"] = to_string(r.task);
  j["k"] = r.k;
  j["n"] = r.n;
  j["failures"] = r.failures;
  j["avg_at_k"] = r.avg_at_k;
  j["pass_at_k"] = r.pass_at_k;
  j["mean_reward"] = r.mean_reward;
  j["per_sample_accuracy"] = r.per_sample_accuracy;
  j["per_relation"] = json::object();
  for (const auto& [gold, row] : r.per_relation) {
    for (const auto& [pred, count] : row) j["per_relation"][gold][pred] = count;
  }
  if (r.mean_entity_f1) j["mean_entity_f1"] = *r.mean_entity_f1;
  if (r.mean_triplet_f1) j["mean_triplet_f1"] = *r.mean_triplet_f1;
  return j;
}

EvalReport report_from_outcomes(Task task, std::size_t k, const std::vector<ExampleOutcome>& records,
                                const std::vector<std::string>& ids) {
  std::unordered_map<std::string, const ExampleOutcome*> latest;
  for (const auto& r : records) latest[r.id] = &r;

  EvalReport report;
  report.task = task;
  report.k = k;
  std::vector<ExampleOutcome> scored;
  for (const auto& id : ids) {
    auto it = latest.find(id);
    if (it == latest.end()) continue;
    if (it->second->failed) {
      ++report.failures;
      continue;
    }
    if (it->second->k() != k) {
      throw std::runtime_error("result for \"" + id + "\" has k=" + std::to_string(it->second->k()) +
                               ", expected " + std::to_string(k));
    }
    scored.push_back(*it->second);
  }
  report.n = scored.size();
  report.per_sample_accuracy.assign(k, 0.0);
  if (scored.empty()) return report;

  report.avg_at_k = avg_at_k(scored);
  report.pass_at_k = pass_at_k(scored);
  std::vector<double> rewards, ent, tri;
  for (const auto& o : scored) {
    for (std::size_t j = 0; j < k; ++j) {
      if (o.correct[j]) report.per_sample_accuracy[j] += 1.0;
      rewards.push_back(o.rewards[j]);
    }
    if (task == Task::kRc) {
      for (const auto& p : o.predicted) ++report.per_relation[o.gold][p ? *p : kFormatFailureLabel];
    } else {
      ent.insert(ent.end(), o.entity_f1.begin(), o.entity_f1.end());
      tri.insert(tri.end(), o.triplet_f1.begin(), o.triplet_f1.end());
    }
  }
  for (auto& a : report.per_sample_accuracy) a /= static_cast<double>(scored.size());
  report.mean_reward = mean(rewards);
  if (task == Task::kTe) {
    report.mean_entity_f1 = mean(ent);
    report.mean_triplet_f1 = mean(tri);
  }
  return report;
}

std::vector<ExampleOutcome> read_results(const std::filesystem::path& path) {
  std::vector<ExampleOutcome> out;
  if (!std::filesystem::exists(path)) return out;
  for_each_jsonl(
      path, [&](std::size_t, const json& rec) { out.push_back(outcome_from_json(rec)); },
      [&](std::size_t line, const std::string& msg) {
        throw std::runtime_error(path.string() + ": line " + std::to_string(line) + ": " + msg);
      });
  return out;
}

namespace {

struct EvalItem {
  std::string id;
  std::string prompt;
  std::string gold;
  std::function<void(const std::string& completion, ExampleOutcome& out)> score;
};

EvalReport run_evaluation(Task task, const std::vector<EvalItem>& items, CompletionSampler& sampler,
                          const EvalOptions& options) {
  if (items.empty()) throw std::invalid_argument("evaluation dataset is empty");
  if (options.k < 1) throw std::invalid_argument("k must be >= 1");
  if (options.results_path.empty()) throw std::invalid_argument("results path is required");

  std::unordered_set<std::string> done;
  for (const auto& r : read_results(options.results_path)) {
    if (r.failed) {
      done.erase(r.id);
    } else {
      done.insert(r.id);
    }
  }
  std::vector<const EvalItem*> pending;
  for (const auto& item : items) {
    if (!done.contains(item.id)) pending.push_back(&item);
  }

  std::ofstream results(options.results_path, std::ios::binary | std::ios::app);
  if (!results) throw IoError("cannot open " + options.results_path.string() + " for appending");
  std::mutex results_mu;
  auto append = [&](const ExampleOutcome& o) {
    const auto line = outcome_to_json(o).dump() + "\n";
    std::lock_guard lock(results_mu);
    results << line;
    results.flush();
  };

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < pending.size(); i = next++) {
      const auto& item = *pending[i];
      ExampleOutcome o;
      o.id = item.id;
      try {
        GenerationRequest req{item.prompt, options.k, options.temperature, options.max_tokens, options.model};
        auto gen = sampler.sample(req);
        if (gen.completions.size() != static_cast<std::size_t>(options.k)) {
          throw GenerationError(GenerationErrorKind::kMalformedResponse, "sampler returned the wrong number of completions");
        }
        o.gold = item.gold;
        for (const auto& c : gen.completions) {
          o.completions.push_back(c);
          item.score(c, o);
        }
      } catch (const std::exception& e) {
        o = ExampleOutcome{};
        o.id = item.id;
        o.failed = true;
        o.error = e.what();
      }
      append(o);
    }
  };
  const std::size_t workers = std::max<std::size_t>(1, std::min(sampler.max_concurrency(), pending.size()));
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  results.close();

  std::vector<std::string> ids;
  for (const auto& item : items) ids.push_back(item.id);
  return report_from_outcomes(task, static_cast<std::size_t>(options.k), read_results(options.results_path), ids);
}

}  // namespace

EvalReport evaluate_rc(const std::vector<RcExample>& dataset, const RelationSchema& schema,
                       const AnnotationGuide& guide, CompletionSampler& sampler, const EvalOptions& options) {
  std::vector<EvalItem> items;
  for (const auto& ex : dataset) {
    items.push_back({ex.id, render_rc_prompt(guide, ex.sentence).text, serialize_rc_answer(ex.gold, schema),
                     [&schema, &ex](const std::string& completion, ExampleOutcome& o) {
                       const auto r = rc_reward(completion, ex.gold, schema);
                       o.rewards.push_back(r.final_reward);
                       o.correct.push_back(r.final_reward == reward::kFormatPass + reward::kRcCorrect);
                       o.predicted.push_back(r.predicted ? std::optional(serialize_rc_answer(*r.predicted, schema))
                                                         : std::nullopt);
                     }});
  }
  return run_evaluation(Task::kRc, items, sampler, options);
}

EvalReport evaluate_te(const std::vector<TeExample>& dataset, const RelationSchema& schema,
                       const AnnotationGuide& guide, CompletionSampler& sampler, const EvalOptions& options) {
  std::vector<EvalItem> items;
  for (const auto& ex : dataset) {
    items.push_back({ex.id, render_te_prompt(guide, ex.sentence).text, serialize_te_answer(ex.gold),
                     [&schema, &ex](const std::string& completion, ExampleOutcome& o) {
                       const auto r = te_reward(completion, ex.gold, schema);
                       o.rewards.push_back(r.final_reward);
                       const double ent = r.te ? r.te->entity.f1 : 0.0;
                       const double tri = r.te ? r.te->triplet.f1 : 0.0;
                       o.correct.push_back(r.format_ok && tri == 1.0);
                       o.predicted.push_back(r.te ? std::optional(serialize_te_answer(r.te->pred_triplets))
                                                  : std::nullopt);
                       o.entity_f1.push_back(ent);
                       o.triplet_f1.push_back(tri);
                     }});
  }
  return run_evaluation(Task::kTe, items, sampler, options);
}

}  // namespace revr
