#include "revr/toy_policy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace revr {

ToyPolicy::ToyPolicy(std::size_t num_prompts, std::size_t vocab_size)
    : num_prompts_(num_prompts), vocab_size_(vocab_size), logits_(num_prompts * vocab_size, 0.0) {
  if (num_prompts == 0 || vocab_size == 0) throw std::invalid_argument("toy policy needs prompts and a vocabulary");
}

std::span<double> ToyPolicy::logits(std::size_t prompt) {
  return std::span<double>(logits_).subspan(prompt * vocab_size_, vocab_size_);
}

std::span<const double> ToyPolicy::logits(std::size_t prompt) const {
  return std::span<const double>(logits_).subspan(prompt * vocab_size_, vocab_size_);
}

std::vector<double> ToyPolicy::log_probs(std::size_t prompt) const {
  const auto z = logits(prompt);
  const double max = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (double v : z) sum += std::exp(v - max);
  const double log_norm = max + std::log(sum);
  std::vector<double> out(z.size());
  std::transform(z.begin(), z.end(), out.begin(), [&](double v) { return v - log_norm; });
  return out;
}

std::vector<double> ToyPolicy::probabilities(std::size_t prompt) const {
  auto lp = log_probs(prompt);
  for (auto& v : lp) v = std::exp(v);
  return lp;
}

double ToyPolicy::log_prob(std::size_t prompt, int token) const {
  return log_probs(prompt).at(static_cast<std::size_t>(token));
}

int ToyPolicy::sample(std::size_t prompt, std::mt19937_64& rng) const {
  const auto p = probabilities(prompt);
  const double u = uniform01(rng);
  double cdf = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    cdf += p[k];
    if (u < cdf) return static_cast<int>(k);
  }
  return static_cast<int>(p.size() - 1);
}

int ToyPolicy::greedy(std::size_t prompt) const {
  const auto z = logits(prompt);
  return static_cast<int>(std::max_element(z.begin(), z.end()) - z.begin());
}

double categorical_kl(const ToyPolicy& p, const ToyPolicy& q, std::size_t prompt) {
  const auto lp = p.log_probs(prompt);
  const auto lq = q.log_probs(prompt);
  double kl = 0.0;
  for (std::size_t k = 0; k < lp.size(); ++k) kl += std::exp(lp[k]) * (lp[k] - lq[k]);
  return std::max(kl, 0.0);
}

}  // namespace revr
