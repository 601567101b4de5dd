#include "revr/reward.hpp"

#include <algorithm>

#include "revr/text.hpp"

namespace revr {

namespace {

using Tokens = std::vector<std::string>;

bool tokens_equal(const Tokens& a, std::size_t a_from, std::size_t a_len, const Tokens& b) {
  if (a_len != b.size()) return false;
  for (std::size_t i = 0; i < a_len; ++i) {
    if (!iequals(a[a_from + i], b[i])) return false;
  }
  return true;
}

bool tokens_match(const Tokens& pred, const Tokens& gold) {
  if (pred.size() == gold.size()) return tokens_equal(pred, 0, pred.size(), gold);
  const Tokens& longer = pred.size() > gold.size() ? pred : gold;
  const Tokens& shorter = pred.size() > gold.size() ? gold : pred;
  if (shorter.empty() || longer.size() != shorter.size() + 1) return false;
  return tokens_equal(longer, 1, shorter.size(), shorter) || tokens_equal(longer, 0, shorter.size(), shorter);
}

PrfScore score(std::size_t n_pred, std::size_t n_gold, Matching matched) {
  PrfScore s;
  s.n_pred = n_pred;
  s.n_gold = n_gold;
  const auto m = static_cast<double>(matched.size());
  s.matched = std::move(matched);
  if (n_pred == 0 && n_gold == 0) {
    s.precision = s.recall = s.f1 = 1.0;
    return s;
  }
  s.precision = n_pred > 0 ? m / static_cast<double>(n_pred) : 0.0;
  s.recall = n_gold > 0 ? m / static_cast<double>(n_gold) : 0.0;
  const double denom = s.precision + s.recall;
  s.f1 = denom > 0.0 ? 2.0 * s.precision * s.recall / denom : 0.0;
  return s;
}

bool same_entity(const Entity& a, const Entity& b) { return iequals(a.surface, b.surface) && iequals(a.type, b.type); }

bool same_triplet(const Triplet& a, const Triplet& b) {
  return iequals(a.subject, b.subject) && iequals(a.subject_type, b.subject_type) && iequals(a.relation, b.relation) &&
         iequals(a.object, b.object) && iequals(a.object_type, b.object_type);
}

template <class T, class Eq>
std::vector<T> dedup(const std::vector<T>& items, Eq eq) {
  std::vector<T> out;
  for (const auto& item : items) {
    if (std::none_of(out.begin(), out.end(), [&](const T& kept) { return eq(kept, item); })) out.push_back(item);
  }
  return out;
}

}  // namespace

bool labels_equal(const RelationLabel& pred, const RelationLabel& gold, const RelationSchema& schema) {
  if (!iequals(pred.relation, gold.relation)) return false;
  return schema.is_symmetric(gold.relation) || pred.direction == gold.direction;
}

RewardBreakdown rc_reward(std::string_view completion, const RelationLabel& gold, const RelationSchema& schema) {
  RewardBreakdown out;
  auto parsed = parse_rc_response(completion, schema);
  if (!parsed.response.format_ok) {
    out.failure = parsed.response.failure;
    return out;
  }
  out.format_ok = true;
  out.metric = labels_equal(*parsed.label, gold, schema) ? reward::kRcCorrect : reward::kRcWrong;
  out.final_reward = reward::kFormatPass + *out.metric;
  out.predicted = std::move(parsed.label);
  return out;
}

std::vector<std::string> tokenize(std::string_view s) { return split_unicode_whitespace(s); }

bool entity_match(const Entity& pred, const Entity& gold) {
  return iequals(pred.type, gold.type) && tokens_match(tokenize(pred.surface), tokenize(gold.surface));
}

bool triplet_match(const Triplet& pred, const Triplet& gold) {
  return iequals(pred.relation, gold.relation) &&
         entity_match({pred.subject, pred.subject_type}, {gold.subject, gold.subject_type}) &&
         entity_match({pred.object, pred.object_type}, {gold.object, gold.object_type});
}

std::vector<Entity> dedup_entities(const std::vector<Entity>& entities) { return dedup(entities, same_entity); }
std::vector<Triplet> dedup_triplets(const std::vector<Triplet>& triplets) { return dedup(triplets, same_triplet); }

Matching match_entities(const std::vector<Entity>& pred, const std::vector<Entity>& gold) {
  return maximum_matching(pred.size(), gold.size(),
                          [&](std::size_t i, std::size_t j) { return entity_match(pred[i], gold[j]); });
}

PrfScore entity_f1(const std::vector<Entity>& pred, const std::vector<Entity>& gold) {
  const auto p = dedup_entities(pred);
  const auto g = dedup_entities(gold);
  return score(p.size(), g.size(), match_entities(p, g));
}

PrfScore triplet_f1(const std::vector<Triplet>& pred, const std::vector<Triplet>& gold) {
  const auto p = dedup_triplets(pred);
  const auto g = dedup_triplets(gold);
  return score(p.size(), g.size(), maximum_matching(p.size(), g.size(), [&](std::size_t i, std::size_t j) {
                 return triplet_match(p[i], g[j]);
               }));
}

std::vector<Entity> entities_of(const std::vector<Triplet>& triplets) {
  std::vector<Entity> out;
  out.reserve(2 * triplets.size());
  for (const auto& t : triplets) {
    out.push_back({t.subject, t.subject_type});
    out.push_back({t.object, t.object_type});
  }
  return out;
}

RewardBreakdown te_reward(std::string_view completion, const std::vector<Triplet>& gold, const RelationSchema& schema) {
  RewardBreakdown out;
  auto parsed = parse_te_response(completion, schema);
  if (!parsed.response.format_ok) {
    out.failure = parsed.response.failure;
    return out;
  }
  out.format_ok = true;
  TeDiagnostics diag;
  diag.pred_entities = dedup_entities(entities_of(*parsed.triplets));
  diag.gold_entities = dedup_entities(entities_of(gold));
  diag.pred_triplets = dedup_triplets(*parsed.triplets);
  diag.gold_triplets = dedup_triplets(gold);
  diag.entity = entity_f1(diag.pred_entities, diag.gold_entities);
  diag.triplet = triplet_f1(diag.pred_triplets, diag.gold_triplets);
  out.metric = reward::kEntityWeight * diag.entity.f1 + reward::kTripletWeight * diag.triplet.f1;
  out.final_reward = reward::kFormatPass + *out.metric;
  out.te = std::move(diag);
  return out;
}

}  // namespace revr
