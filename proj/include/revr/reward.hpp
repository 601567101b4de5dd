#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "revr/matching.hpp"
#include "revr/parse.hpp"
#include "revr/schema.hpp"

namespace revr {

namespace reward {
inline constexpr double kFormatPass = 1.0;
// Final reward for any response that fails the format check.
inline constexpr double kFormatFailFinal = -3.0;
inline constexpr double kRcCorrect = 2.0;
inline constexpr double kRcWrong = -1.5;
inline constexpr double kEntityWeight = 1.0;
inline constexpr double kTripletWeight = 3.0;
}  // namespace reward

struct Entity {
  std::string surface;
  std::string type;

  friend bool operator==(const Entity&, const Entity&) = default;
};

struct PrfScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t n_pred = 0;  // after deduplication
  std::size_t n_gold = 0;
  Matching matched;  // indices into the deduplicated lists
};

struct TeDiagnostics {
  PrfScore entity;
  PrfScore triplet;
  std::vector<Entity> pred_entities;  // deduplicated
  std::vector<Entity> gold_entities;
  std::vector<Triplet> pred_triplets;
  std::vector<Triplet> gold_triplets;
};

struct RewardBreakdown {
  bool format_ok = false;
  std::optional<ParseFailure> failure;
  std::optional<double> metric;
  double final_reward = reward::kFormatFailFinal;
  std::optional<RelationLabel> predicted;  // RC
  std::optional<TeDiagnostics> te;
};

bool labels_equal(const RelationLabel& pred, const RelationLabel& gold, const RelationSchema& schema);

RewardBreakdown rc_reward(std::string_view completion, const RelationLabel& gold, const RelationSchema& schema);

std::vector<std::string> tokenize(std::string_view s);

// Types equal (case-insensitive) and the token sequences equal, or one
// equals the other with exactly one token dropped from its front or back.
bool entity_match(const Entity& pred, const Entity& gold);

bool triplet_match(const Triplet& pred, const Triplet& gold);

// Keeps the first of each group equal under case-insensitive comparison.
std::vector<Entity> dedup_entities(const std::vector<Entity>& entities);
std::vector<Triplet> dedup_triplets(const std::vector<Triplet>& triplets);

Matching match_entities(const std::vector<Entity>& pred, const std::vector<Entity>& gold);

// Both sides are deduplicated before matching. Precision is m/|pred| (0 when
// pred is empty), recall m/|gold| (0 when gold is empty); both empty scores
// a perfect 1.
PrfScore entity_f1(const std::vector<Entity>& pred, const std::vector<Entity>& gold);
PrfScore triplet_f1(const std::vector<Triplet>& pred, const std::vector<Triplet>& gold);

// (subject, subject_type) and (object, object_type) of every triplet.
std::vector<Entity> entities_of(const std::vector<Triplet>& triplets);

RewardBreakdown te_reward(std::string_view completion, const std::vector<Triplet>& gold, const RelationSchema& schema);

}  // namespace revr
