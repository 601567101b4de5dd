#include "revr/grpo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace revr {

void GrpoConfig::validate() const {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw std::invalid_argument("epsilon must lie in (0, 1]");
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw std::invalid_argument("beta must be finite and >= 0");
  if (group_size < 2) throw std::invalid_argument("group_size must be >= 2");
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw std::invalid_argument("learning_rate must be finite and >= 0");
  }
}

std::vector<double> group_advantages(std::span<const double> rewards) {
  if (rewards.size() < 2) throw std::invalid_argument("advantages need a group of at least 2 rewards");
  const auto n = static_cast<double>(rewards.size());
  double mean = 0.0;
  for (double r : rewards) mean += r;
  mean /= n;
  double var = 0.0;
  for (double r : rewards) var += (r - mean) * (r - mean);
  const double std = std::sqrt(var / n);
  std::vector<double> out(rewards.size(), 0.0);
  if (std < kDegenerateStd) return out;
  for (std::size_t i = 0; i < rewards.size(); ++i) out[i] = (rewards[i] - mean) / std;
  return out;
}

double kl_estimate(double logp_new, double logp_ref) {
  const double d = logp_ref - logp_new;
  // expm1 keeps the small-|d| regime accurate; the clamp absorbs rounding.
  return std::max(std::expm1(d) - d, 0.0);
}

namespace {

void check_shapes(const GrpoGroup& g, std::size_t index) {
  const auto where = "group " + std::to_string(index) + ": ";
  const auto n = g.outputs.size();
  if (n == 0) throw std::invalid_argument(where + "no outputs");
  if (g.logp_new.size() != n || g.logp_old.size() != n || g.logp_ref.size() != n || g.advantages.size() != n) {
    throw std::invalid_argument(where + "per-output arrays disagree with the number of outputs");
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto len = g.outputs[i].size();
    if (len == 0) throw std::invalid_argument(where + "output " + std::to_string(i) + " is empty");
    if (g.logp_new[i].size() != len || g.logp_old[i].size() != len || g.logp_ref[i].size() != len) {
      throw std::invalid_argument(where + "log-prob shape mismatch at output " + std::to_string(i));
    }
  }
}

struct TermWithSlope {
  TokenTerm term;
  double value;  // surrogate - beta * kl
  double slope;  // d value / d logp_new
};

TermWithSlope evaluate_token(double logp_new, double logp_old, double logp_ref, double advantage,
                             const GrpoConfig& config) {
  TermWithSlope out{};
  const double ratio = std::exp(logp_new - logp_old);
  const double clipped_ratio = std::clamp(ratio, 1.0 - config.epsilon, 1.0 + config.epsilon);
  const double unclipped = ratio * advantage;
  const double clipped = clipped_ratio * advantage;
  out.term.ratio = ratio;
  out.term.kl = kl_estimate(logp_new, logp_ref);
  if (unclipped <= clipped) {
    out.term.surrogate = unclipped;
    out.slope = unclipped;
  } else {
    out.term.surrogate = clipped;
    out.term.clipped = true;
    out.slope = 0.0;
  }
  // d k3 / d logp_new = 1 - exp(logp_ref - logp_new)
  out.slope -= config.beta * (1.0 - std::exp(logp_ref - logp_new));
  out.value = out.term.surrogate - config.beta * out.term.kl;
  return out;
}

}  // namespace

ObjectiveResult grpo_objective(std::span<const GrpoGroup> groups, const GrpoConfig& config) {
  if (groups.empty()) throw std::invalid_argument("objective needs at least one group");
  ObjectiveResult out;
  out.per_token.resize(groups.size());
  std::size_t tokens = 0;
  std::size_t clipped = 0;
  double kl_sum = 0.0;
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    const auto& g = groups[gi];
    check_shapes(g, gi);
    double group_sum = 0.0;
    out.per_token[gi].resize(g.outputs.size());
    for (std::size_t i = 0; i < g.outputs.size(); ++i) {
      double output_sum = 0.0;
      for (std::size_t t = 0; t < g.outputs[i].size(); ++t) {
        auto tw = evaluate_token(g.logp_new[i][t], g.logp_old[i][t], g.logp_ref[i][t], g.advantages[i], config);
        output_sum += tw.value;
        clipped += tw.term.clipped ? 1 : 0;
        kl_sum += tw.term.kl;
        ++tokens;
        out.per_token[gi][i].push_back(tw.term);
      }
      group_sum += output_sum / static_cast<double>(g.outputs[i].size());
    }
    out.objective += group_sum / static_cast<double>(g.outputs.size());
  }
  out.objective /= static_cast<double>(groups.size());
  out.clip_fraction = static_cast<double>(clipped) / static_cast<double>(tokens);
  out.mean_kl = kl_sum / static_cast<double>(tokens);
  return out;
}

void refresh_logp_new(std::span<GrpoGroup> groups, const ToyPolicy& policy) {
  for (auto& g : groups) {
    const auto lp = policy.log_probs(g.prompt_id);
    g.logp_new.resize(g.outputs.size());
    for (std::size_t i = 0; i < g.outputs.size(); ++i) {
      g.logp_new[i].resize(g.outputs[i].size());
      for (std::size_t t = 0; t < g.outputs[i].size(); ++t) {
        g.logp_new[i][t] = lp.at(static_cast<std::size_t>(g.outputs[i][t]));
      }
    }
  }
}

std::vector<double> analytic_gradient(std::span<const GrpoGroup> groups, const GrpoConfig& config,
                                      const ToyPolicy& policy) {
  if (groups.empty()) throw std::invalid_argument("gradient needs at least one group");
  const std::size_t vocab = policy.vocab_size();
  std::vector<double> grad(policy.params().size(), 0.0);
  const double group_weight = 1.0 / static_cast<double>(groups.size());
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    const auto& g = groups[gi];
    check_shapes(g, gi);
    const auto lp = policy.log_probs(g.prompt_id);
    const auto probs = policy.probabilities(g.prompt_id);
    auto row = std::span<double>(grad).subspan(g.prompt_id * vocab, vocab);
    const double output_weight = group_weight / static_cast<double>(g.outputs.size());
    for (std::size_t i = 0; i < g.outputs.size(); ++i) {
      const double token_weight = output_weight / static_cast<double>(g.outputs[i].size());
      for (std::size_t t = 0; t < g.outputs[i].size(); ++t) {
        const auto token = static_cast<std::size_t>(g.outputs[i][t]);
        const auto tw = evaluate_token(lp.at(token), g.logp_old[i][t], g.logp_ref[i][t], g.advantages[i], config);
        const double w = token_weight * tw.slope;
        if (w == 0.0) continue;
        // d log softmax(z)[token] / d z_k = [k == token] - p_k
        for (std::size_t k = 0; k < vocab; ++k) row[k] -= w * probs[k];
        row[token] += w;
      }
    }
  }
  return grad;
}

}  // namespace revr
