#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace revr {

// Uniform double in [0, 1) from the top 53 bits of a 64-bit draw. The
// engine's output sequence is fixed by the standard, so this is
// reproducible across standard libraries.
inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Independent categorical distribution per prompt, parameterized by logits.
// Every token of an output is drawn from its prompt's distribution.
class ToyPolicy {
 public:
  ToyPolicy(std::size_t num_prompts, std::size_t vocab_size);

  std::size_t num_prompts() const { return num_prompts_; }
  std::size_t vocab_size() const { return vocab_size_; }

  // Flat prompt-major parameter vector; gradients use the same layout.
  std::vector<double>& params() { return logits_; }
  const std::vector<double>& params() const { return logits_; }
  std::span<double> logits(std::size_t prompt);
  std::span<const double> logits(std::size_t prompt) const;

  std::vector<double> log_probs(std::size_t prompt) const;
  std::vector<double> probabilities(std::size_t prompt) const;
  double log_prob(std::size_t prompt, int token) const;

  int sample(std::size_t prompt, std::mt19937_64& rng) const;
  // Lowest index among the most probable tokens.
  int greedy(std::size_t prompt) const;

 private:
  std::size_t num_prompts_;
  std::size_t vocab_size_;
  std::vector<double> logits_;
};

// Exact KL(p || q) for one prompt.
double categorical_kl(const ToyPolicy& p, const ToyPolicy& q, std::size_t prompt);

}  // namespace revr
