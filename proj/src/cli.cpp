#include "revr/cli.hpp"

#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include <CLI11.hpp>
#include <json.hpp>

#include "revr/corpus.hpp"
#include "revr/evalharness.hpp"
#include "revr/genclient.hpp"
#include "revr/io.hpp"
#include "revr/reward.hpp"
#include "revr/schema.hpp"
#include "revr/trainer.hpp"

namespace revr {

namespace {

using ordered_json = nlohmann::ordered_json;

class CliError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CommonFlags {
  std::string schema;
  std::string guide;
  std::string entity_guide;
  std::string task = "rc";
  std::uint64_t seed = 42;
  std::string out;
};

struct RenderFlags {
  std::string dataset;
};

struct ScoreFlags {
  std::string gold;
  std::string responses;
};

struct EvalFlags {
  std::string dataset;
  std::string endpoint;
  std::string model;
  int k = 4;
  std::optional<double> temperature;
  std::size_t max_concurrency = 4;
  int max_tokens = 2048;
  double timeout = 120.0;
  int max_retries = 3;
  std::string results;
};

struct DemoFlags {
  std::size_t prompts = 8;
  GrpoConfig config;
};

RelationSchema load_task_schema(const CommonFlags& f) {
  auto schema = load_schema(f.schema);
  if (to_string(schema.task()) != f.task) {
    throw CliError("task mismatch: --task " + f.task + " but schema " + f.schema + " is " +
                   std::string(to_string(schema.task())));
  }
  return schema;
}

AnnotationGuide load_task_guide(const CommonFlags& f) {
  if (f.task == "te") {
    if (f.entity_guide.empty()) throw CliError("--entity-guide is required for --task te");
    return load_guide(f.guide, f.entity_guide);
  }
  return load_guide(f.guide);
}

ordered_json prf_json(const PrfScore& s) {
  return ordered_json{{"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1}};
}

std::string entity_text(const Entity& e) { return e.surface + ":" + e.type; }

ordered_json breakdown_json(const std::string& id, const RewardBreakdown& r, const RelationSchema& schema) {
  ordered_json j;
  j["id"] = id;
  j["format_ok"] = r.format_ok;
  j["failure"] = r.failure ? ordered_json(std::string(to_string(*r.failure))) : ordered_json(nullptr);
  j["metric"] = r.metric ? ordered_json(*r.metric) : ordered_json(nullptr);
  j["final"] = r.final_reward;
  if (schema.task() == Task::kRc) {
    j["predicted"] = r.predicted ? ordered_json(serialize_rc_answer(*r.predicted, schema)) : ordered_json(nullptr);
  } else if (r.te) {
    const auto& d = *r.te;
    j["entity"] = prf_json(d.entity);
    j["triplet"] = prf_json(d.triplet);
    ordered_json ents = ordered_json::array();
    for (const auto& [p, g] : d.entity.matched) {
      ents.push_back({entity_text(d.pred_entities[p]), entity_text(d.gold_entities[g])});
    }
    ordered_json tris = ordered_json::array();
    for (const auto& [p, g] : d.triplet.matched) {
      tris.push_back({serialize_te_answer({d.pred_triplets[p]}), serialize_te_answer({d.gold_triplets[g]})});
    }
    j["matched_entities"] = ents;
    j["matched_triplets"] = tris;
  }
  return j;
}

void cmd_render(const CommonFlags& f, const RenderFlags& rf, std::ostream& out) {
  const auto schema = load_task_schema(f);
  const auto guide = load_task_guide(f);
  std::string text;
  auto emit = [&](const std::string& id, const PromptText& prompt) {
    ordered_json j;
    j["id"] = id;
    j["prompt"] = prompt.text;
    text += j.dump() + "\n";
  };
  std::size_t n = 0;
  if (schema.task() == Task::kRc) {
    for (const auto& ex : load_rc_dataset(rf.dataset, schema)) emit(ex.id, render_rc_prompt(guide, ex.sentence)), ++n;
  } else {
    for (const auto& ex : load_te_dataset(rf.dataset, schema)) emit(ex.id, render_te_prompt(guide, ex.sentence)), ++n;
  }
  write_file_atomic(f.out, text);
  out << "rendered " << n << " prompts to " << f.out << "\n";
}

void cmd_score(const CommonFlags& f, const ScoreFlags& sf, std::ostream& out) {
  const auto schema = load_task_schema(f);
  std::unordered_map<std::string, RelationLabel> rc_gold;
  std::unordered_map<std::string, std::vector<Triplet>> te_gold;
  if (schema.task() == Task::kRc) {
    for (auto& ex : load_rc_dataset(sf.gold, schema)) rc_gold.emplace(ex.id, std::move(ex.gold));
  } else {
    for (auto& ex : load_te_dataset(sf.gold, schema)) te_gold.emplace(ex.id, std::move(ex.gold));
  }

  std::string text;
  std::unordered_set<std::string> seen;
  std::map<double, std::size_t> histogram;
  double total = 0.0;
  std::size_t n = 0;
  for_each_jsonl(
      sf.responses,
      [&](std::size_t line, const nlohmann::json& rec) {
        auto id_it = rec.find("id");
        auto completion_it = rec.find("completion");
        if (id_it == rec.end() || !id_it->is_string() || completion_it == rec.end() || !completion_it->is_string()) {
          throw CliError(sf.responses + ": line " + std::to_string(line) + ": expected {\"id\", \"completion\"} strings");
        }
        const auto id = id_it->get<std::string>();
        if (!seen.insert(id).second) {
          throw CliError(sf.responses + ": line " + std::to_string(line) + ": duplicate id \"" + id + "\"");
        }
        const auto completion = completion_it->get<std::string>();
        RewardBreakdown r;
        if (schema.task() == Task::kRc) {
          auto g = rc_gold.find(id);
          if (g == rc_gold.end()) throw CliError("response id \"" + id + "\" has no gold record");
          r = rc_reward(completion, g->second, schema);
        } else {
          auto g = te_gold.find(id);
          if (g == te_gold.end()) throw CliError("response id \"" + id + "\" has no gold record");
          r = te_reward(completion, g->second, schema);
        }
        text += breakdown_json(id, r, schema).dump() + "\n";
        ++histogram[r.final_reward];
        total += r.final_reward;
        ++n;
      },
      [&](std::size_t line, const std::string& msg) {
        throw CliError(sf.responses + ": line " + std::to_string(line) + ": " + msg);
      });
  write_file_atomic(f.out, text);

  ordered_json summary;
  summary["n"] = n;
  summary["mean_final"] = n > 0 ? total / static_cast<double>(n) : 0.0;
  summary["histogram"] = ordered_json::object();
  for (const auto& [value, count] : histogram) summary["histogram"][ordered_json(value).dump()] = count;
  out << summary.dump() << "\n";
}

void cmd_eval(const CommonFlags& f, const EvalFlags& ef, std::ostream& out) {
  if (!ef.temperature) throw CliError("--temperature is required");
  const auto schema = load_task_schema(f);
  const auto guide = load_task_guide(f);

  EndpointConfig endpoint;
  endpoint.base_url = ef.endpoint;
  endpoint.model = ef.model;
  endpoint.timeout_seconds = ef.timeout;
  endpoint.max_retries = ef.max_retries;
  endpoint.max_concurrency = ef.max_concurrency;
  endpoint.load_token_from_env();
  ChatCompletionsClient client(endpoint);

  EvalOptions options;
  options.k = ef.k;
  options.temperature = *ef.temperature;
  options.max_tokens = ef.max_tokens;
  options.model = ef.model;
  options.results_path = ef.results.empty() ? f.out + ".results.jsonl" : ef.results;

  EvalReport report;
  if (schema.task() == Task::kRc) {
    report = evaluate_rc(load_rc_dataset(ef.dataset, schema), schema, guide, client, options);
  } else {
    report = evaluate_te(load_te_dataset(ef.dataset, schema), schema, guide, client, options);
  }
  const auto j = report_to_json(report);
  write_file_atomic(f.out, j.dump(2) + "\n");
  out << "avg@" << report.k << "=" << report.avg_at_k << " pass@" << report.k << "=" << report.pass_at_k
      << " n=" << report.n << " failures=" << report.failures << "\n";
  if (report.failures > 0) {
    throw CliError(std::to_string(report.failures) + " examples failed generation; see " +
                   options.results_path.string() + " and rerun to resume");
  }
}

void cmd_grpo_demo(const CommonFlags& f, DemoFlags df, std::ostream& out) {
  df.config.seed = f.seed;
  df.config.validate();
  if (f.task != "rc") throw CliError("task mismatch: grpo-demo trains on the rc task, got --task " + f.task);
  RelationSchema schema = f.schema.empty() ? demo_rc_schema() : load_task_schema(f);
  const auto task = SyntheticRcTask::make(std::move(schema), df.prompts, df.config.seed);
  const auto trace = train_toy(task, df.config, rc_reward_fn(task.schema));
  write_file_atomic(f.out, trace_to_jsonl(trace));
  ordered_json summary;
  summary["steps"] = trace.records.size();
  summary["final_mean_reward"] = trace.records.empty() ? 0.0 : trace.records.back().mean_reward;
  summary["greedy_accuracy"] = trace.greedy_accuracy;
  summary["final_kl"] = trace.final_kl;
  out << summary.dump() << "\n";
}

void add_common(CLI::App* cmd, CommonFlags& f, bool needs_guide, bool schema_required = true) {
  auto* schema = cmd->add_option("--schema", f.schema, "Relation schema (JSON)")->check(CLI::ExistingFile);
  if (schema_required) schema->required();
  if (needs_guide) {
    cmd->add_option("--guide", f.guide, "Relation annotation guide (text)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--entity-guide", f.entity_guide, "Entity annotation guide (text, te only)")
        ->check(CLI::ExistingFile);
  }
  cmd->add_option("--task", f.task, "Task")->check(CLI::IsMember({"rc", "te"}));
  cmd->add_option("--seed", f.seed, "Random seed");
  cmd->add_option("--out", f.out, "Output path")->required();
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Verifiable rewards, GRPO and Avg@k/Pass@k evaluation for relation extraction"};
  app.name("revr");
  app.require_subcommand(1);

  CommonFlags render_common, score_common, eval_common, demo_common;
  RenderFlags render_flags;
  ScoreFlags score_flags;
  EvalFlags eval_flags;
  DemoFlags demo_flags;

  auto* render = app.add_subcommand("render", "Render one prompt per dataset record");
  add_common(render, render_common, true);
  render->add_option("--dataset", render_flags.dataset, "Dataset (JSONL)")->required()->check(CLI::ExistingFile);

  auto* score = app.add_subcommand("score", "Score responses against gold records");
  add_common(score, score_common, false);
  score->add_option("--gold", score_flags.gold, "Gold dataset (JSONL)")->required()->check(CLI::ExistingFile);
  score->add_option("--responses", score_flags.responses, "Responses {id, completion} (JSONL)")
      ->required()
      ->check(CLI::ExistingFile);

  auto* eval = app.add_subcommand("eval", "Sample k completions per example from an endpoint and report Avg@k/Pass@k");
  add_common(eval, eval_common, true);
  eval->add_option("--dataset", eval_flags.dataset, "Dataset (JSONL)")->required()->check(CLI::ExistingFile);
  eval->add_option("--endpoint", eval_flags.endpoint, "Base URL of a chat-completions endpoint")->required();
  eval->add_option("--model", eval_flags.model, "Model name")->required();
  eval->add_option("--k", eval_flags.k, "Samples per example")->check(CLI::PositiveNumber);
  eval->add_option("--temperature", eval_flags.temperature, "Sampling temperature")->required();
  eval->add_option("--max-concurrency", eval_flags.max_concurrency, "Requests in flight")->check(CLI::PositiveNumber);
  eval->add_option("--max-tokens", eval_flags.max_tokens, "Max output tokens")->check(CLI::PositiveNumber);
  eval->add_option("--timeout", eval_flags.timeout, "Request timeout in seconds")->check(CLI::PositiveNumber);
  eval->add_option("--max-retries", eval_flags.max_retries, "Retries for transient failures")
      ->check(CLI::NonNegativeNumber);
  eval->add_option("--results", eval_flags.results, "Per-example results file (default: <out>.results.jsonl)");

  auto* demo = app.add_subcommand("grpo-demo", "Train a toy categorical policy with GRPO on a synthetic RC task");
  add_common(demo, demo_common, false, false);
  auto& cfg = demo_flags.config;
  demo->add_option("--group-size", cfg.group_size, "G, outputs per prompt")->capture_default_str();
  demo->add_option("--epsilon", cfg.epsilon, "Ratio clipping width")->capture_default_str();
  demo->add_option("--beta", cfg.beta, "KL penalty weight")->capture_default_str();
  demo->add_option("--lr", cfg.learning_rate, "Learning rate")->capture_default_str();
  demo->add_option("--steps", cfg.steps, "Training steps")->capture_default_str();
  demo->add_option("--prompts", demo_flags.prompts, "Synthetic prompts")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (render->parsed()) cmd_render(render_common, render_flags, out);
    if (score->parsed()) cmd_score(score_common, score_flags, out);
    if (eval->parsed()) cmd_eval(eval_common, eval_flags, out);
    if (demo->parsed()) cmd_grpo_demo(demo_common, demo_flags, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace revr
