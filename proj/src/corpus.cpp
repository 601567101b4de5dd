#include "revr/corpus.hpp"

#include <array>
#include <unordered_set>

#include "revr/io.hpp"
#include "revr/text.hpp"

namespace revr::resources {
extern const std::string_view kRcPromptV1;
extern const std::string_view kTePromptV1;
}  // namespace revr::resources

namespace revr {

namespace {

std::string tag_name(EntityTag tag) { return tag == EntityTag::kE1 ? "e1" : "e2"; }

struct Span {
  std::size_t open;   // index of the opening tag
  std::size_t close;  // index of the closing tag
  std::size_t content_begin;
};

Span locate(std::string_view text, EntityTag tag) {
  const std::string open_tag = "<" + tag_name(tag) + ">";
  const std::string close_tag = "</" + tag_name(tag) + ">";
  for (const auto& t : {open_tag, close_tag}) {
    const auto n = count_occurrences(text, t);
    if (n == 0) throw TagError(TagErrorKind::kMissingTag, tag, "missing tag " + t);
    if (n > 1) throw TagError(TagErrorKind::kDuplicateTag, tag, "duplicated tag " + t);
  }
  Span s{text.find(open_tag), text.find(close_tag), 0};
  s.content_begin = s.open + open_tag.size();
  if (s.close < s.content_begin) {
    throw TagError(TagErrorKind::kCrossedNesting, tag, close_tag + " precedes " + open_tag);
  }
  return s;
}

std::size_t span_end(const Span& s, EntityTag tag) { return s.close + tag_name(tag).size() + 3; }

// Splits a template at its slots once, so slot-like text inside substituted
// values is never re-expanded.
std::string substitute(std::string_view tmpl, const std::vector<std::pair<std::string_view, std::string_view>>& slots) {
  std::string out;
  std::size_t pos = 0;
  while (pos < tmpl.size()) {
    std::size_t best = std::string_view::npos;
    const std::pair<std::string_view, std::string_view>* hit = nullptr;
    for (const auto& slot : slots) {
      const auto at = tmpl.find(slot.first, pos);
      if (at < best) {
        best = at;
        hit = &slot;
      }
    }
    if (hit == nullptr) break;
    out.append(tmpl.substr(pos, best - pos));
    out.append(hit->second);
    pos = best + hit->first.size();
  }
  if (pos < tmpl.size()) out.append(tmpl.substr(pos));
  return out;
}

std::string require_string(const nlohmann::json& rec, const char* key, std::size_t line) {
  auto it = rec.find(key);
  if (it == rec.end() || !it->is_string()) {
    throw DatasetError(DatasetErrorKind::kMalformedLine, line, std::string("missing string field \"") + key + "\"");
  }
  return it->get<std::string>();
}

[[noreturn]] void malformed(std::size_t line, const std::string& message) {
  throw DatasetError(DatasetErrorKind::kMalformedLine, line, message);
}

void check_unique_id(std::unordered_set<std::string>& seen, const std::string& id, std::size_t line) {
  if (id.empty()) malformed(line, "empty id");
  if (!seen.insert(id).second) throw DatasetError(DatasetErrorKind::kDuplicateId, line, "duplicate id \"" + id + "\"");
}

}  // namespace

EntitySpans extract_entity_spans(std::string_view text) {
  const Span s1 = locate(text, EntityTag::kE1);
  const Span s2 = locate(text, EntityTag::kE2);
  const bool disjoint = span_end(s1, EntityTag::kE1) <= s2.open || span_end(s2, EntityTag::kE2) <= s1.open;
  if (!disjoint) {
    const EntityTag inner = s1.open < s2.open ? EntityTag::kE2 : EntityTag::kE1;
    throw TagError(TagErrorKind::kCrossedNesting, inner, "entity spans overlap");
  }
  EntitySpans out{std::string(text.substr(s1.content_begin, s1.close - s1.content_begin)),
                  std::string(text.substr(s2.content_begin, s2.close - s2.content_begin))};
  if (trim(out.e1).empty()) throw TagError(TagErrorKind::kEmptySpan, EntityTag::kE1, "empty e1 span");
  if (trim(out.e2).empty()) throw TagError(TagErrorKind::kEmptySpan, EntityTag::kE2, "empty e2 span");
  return out;
}

TaggedSentence TaggedSentence::rc(std::string text) {
  auto spans = extract_entity_spans(text);
  return TaggedSentence{std::move(text), std::move(spans.e1), std::move(spans.e2)};
}

TaggedSentence TaggedSentence::plain(std::string text) { return TaggedSentence{std::move(text), {}, {}}; }

std::string_view rc_prompt_template() { return resources::kRcPromptV1; }
std::string_view te_prompt_template() { return resources::kTePromptV1; }

PromptText render_rc_prompt(const AnnotationGuide& guide, const TaggedSentence& sentence) {
  return {substitute(rc_prompt_template(), {{"{Annotation guide}", guide.relation_guide},
                                            {"{Sentence}", sentence.text}})};
}

PromptText render_te_prompt(const AnnotationGuide& guide, const TaggedSentence& sentence) {
  return {substitute(te_prompt_template(), {{"{Annotation guide - Entity}", guide.entity_guide},
                                            {"{Annotation guide - Relationship}", guide.relation_guide},
                                            {"{Sentence}", sentence.text}})};
}

std::vector<RcExample> load_rc_dataset(const std::filesystem::path& path, const RelationSchema& schema) {
  std::vector<RcExample> out;
  std::unordered_set<std::string> seen;
  for_each_jsonl(
      path,
      [&](std::size_t line, const nlohmann::json& rec) {
        RcExample ex;
        ex.line = line;
        ex.id = require_string(rec, "id", line);
        check_unique_id(seen, ex.id, line);
        try {
          ex.sentence = TaggedSentence::rc(require_string(rec, "sentence", line));
        } catch (const TagError& e) {
          throw DatasetError(DatasetErrorKind::kTagViolation, line, e.what());
        }
        const auto label_text = require_string(rec, "label", line);
        auto label = parse_rc_answer(label_text, schema);
        if (!label) {
          if (label.failure() == ParseFailure::kUnknownRelation) {
            throw DatasetError(DatasetErrorKind::kUnknownRelation, line, "unknown relation in label \"" + label_text + "\"");
          }
          malformed(line, "label \"" + label_text + "\" does not match the answer grammar");
        }
        ex.gold = std::move(label).value();
        out.push_back(std::move(ex));
      },
      malformed);
  return out;
}

std::vector<TeExample> load_te_dataset(const std::filesystem::path& path, const RelationSchema& schema) {
  std::vector<TeExample> out;
  std::unordered_set<std::string> seen;
  for_each_jsonl(
      path,
      [&](std::size_t line, const nlohmann::json& rec) {
        TeExample ex;
        ex.line = line;
        ex.id = require_string(rec, "id", line);
        check_unique_id(seen, ex.id, line);
        ex.sentence = TaggedSentence::plain(require_string(rec, "sentence", line));
        auto it = rec.find("triplets");
        if (it == rec.end() || !it->is_array()) malformed(line, "missing list field \"triplets\"");
        for (const auto& t : *it) {
          if (!t.is_array() || t.size() != 5) malformed(line, "each triplet must be a 5-element list");
          std::array<std::string, 5> f;
          for (std::size_t i = 0; i < 5; ++i) {
            if (!t[i].is_string() || trim(t[i].get<std::string>()).empty()) {
              malformed(line, "triplet fields must be non-empty strings");
            }
            f[i] = t[i].get<std::string>();
          }
          const auto* rel = schema.find_relation(f[2]);
          if (rel == nullptr) throw DatasetError(DatasetErrorKind::kUnknownRelation, line, "unknown relation \"" + f[2] + "\"");
          const auto* st = schema.find_entity_type(f[1]);
          const auto* ot = schema.find_entity_type(f[4]);
          if (st == nullptr || ot == nullptr) {
            throw DatasetError(DatasetErrorKind::kUnknownEntityType, line,
                               "unknown entity type \"" + (st == nullptr ? f[1] : f[4]) + "\"");
          }
          ex.gold.push_back(Triplet{f[0], *st, rel->name, f[3], *ot});
        }
        out.push_back(std::move(ex));
      },
      malformed);
  return out;
}

}  // namespace revr
