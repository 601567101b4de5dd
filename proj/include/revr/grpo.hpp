#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "revr/toy_policy.hpp"

namespace revr {

// One prompt with G sampled outputs. Log-probability arrays are per token
// and must have the same shape as `outputs`.
struct GrpoGroup {
  std::size_t prompt_id = 0;
  std::vector<std::vector<int>> outputs;
  std::vector<std::vector<double>> logp_new;
  std::vector<std::vector<double>> logp_old;
  std::vector<std::vector<double>> logp_ref;
  std::vector<double> rewards;
  std::vector<double> advantages;
};

struct GrpoConfig {
  double epsilon = 0.2;
  double beta = 0.04;
  std::size_t group_size = 8;
  double learning_rate = 0.1;
  std::size_t steps = 300;
  std::uint64_t seed = 42;

  // Throws std::invalid_argument.
  void validate() const;
};

// Standard deviation below which a group is treated as constant.
inline constexpr double kDegenerateStd = 1e-8;

// (r_i - mean) / std with the population standard deviation; all zeros when
// std < kDegenerateStd. Throws std::invalid_argument when G < 2.
std::vector<double> group_advantages(std::span<const double> rewards);

// k3 estimator exp(d) - d - 1 with d = logp_ref - logp_new. Non-negative.
double kl_estimate(double logp_new, double logp_ref);

struct TokenTerm {
  double ratio = 1.0;
  double surrogate = 0.0;  // min(ratio * A, clip(ratio) * A)
  double kl = 0.0;
  bool clipped = false;  // the clipped branch is strictly smaller
};

struct ObjectiveResult {
  double objective = 0.0;
  // [group][output][token]
  std::vector<std::vector<std::vector<TokenTerm>>> per_token;
  double clip_fraction = 0.0;
  double mean_kl = 0.0;
};

// Mean over groups of the mean over outputs of the per-token mean of
// surrogate - beta * k3. Throws std::invalid_argument on shape mismatch or
// empty outputs.
ObjectiveResult grpo_objective(std::span<const GrpoGroup> groups, const GrpoConfig& config);

// Recomputes logp_new for every token from the policy.
void refresh_logp_new(std::span<GrpoGroup> groups, const ToyPolicy& policy);

// Exact gradient of grpo_objective with respect to the policy logits, with
// logp_old and logp_ref held fixed and logp_new taken from `policy`.
std::vector<double> analytic_gradient(std::span<const GrpoGroup> groups, const GrpoConfig& config,
                                      const ToyPolicy& policy);

}  // namespace revr
