#include "revr/parse.hpp"

#include "revr/text.hpp"

namespace revr {

namespace {

constexpr std::string_view kOpen = "<answer>";
constexpr std::string_view kClose = "</answer>";

// Minimal cursor over the answer text; whitespace handling is ASCII only.
class Cursor {
 public:
  explicit Cursor(std::string_view s) : s_(s) {}

  void skip_ws() {
    while (pos_ < s_.size() && trim(s_.substr(pos_, 1)).empty()) ++pos_;
  }
  bool consume(std::string_view token) {
    skip_ws();
    if (s_.substr(pos_, token.size()) != token) return false;
    pos_ += token.size();
    return true;
  }
  bool at_end() {
    skip_ws();
    return pos_ == s_.size();
  }
  std::string_view rest() const { return s_.substr(pos_); }
  void advance(std::size_t n) { pos_ += n; }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
};

std::optional<Direction> parse_args(Cursor& c) {
  if (!c.consume("(")) return std::nullopt;
  std::optional<Direction> dir;
  if (c.consume("e1")) {
    if (c.consume(",") && c.consume("e2")) dir = Direction::kE1ToE2;
  } else if (c.consume("e2")) {
    if (c.consume(",") && c.consume("e1")) dir = Direction::kE2ToE1;
  }
  if (!dir || !c.consume(")") || !c.at_end()) return std::nullopt;
  return dir;
}

Parsed<std::vector<Triplet>> parse_triplet_body(std::string_view body, const RelationSchema& schema,
                                                std::vector<Triplet>& out) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= body.size(); ++i) {
    if (i == body.size() || body[i] == ',') {
      parts.push_back(trim(body.substr(start, i - start)));
      start = i + 1;
    }
  }
  if (parts.size() != 3) return ParseFailure::kBadTripletShape;

  struct Entity {
    std::string_view surface;
    std::string_view type;
  };
  auto split_entity = [](std::string_view s) -> std::optional<Entity> {
    auto colon = s.rfind(':');
    if (colon == std::string_view::npos) return std::nullopt;
    Entity e{trim(s.substr(0, colon)), trim(s.substr(colon + 1))};
    if (e.surface.empty() || e.type.empty()) return std::nullopt;
    return e;
  };
  auto head = split_entity(parts[0]);
  auto tail = split_entity(parts[2]);
  if (!head || !tail || parts[1].empty()) return ParseFailure::kBadTripletShape;

  const auto* rel = schema.find_relation(parts[1]);
  if (rel == nullptr) return ParseFailure::kUnknownRelation;
  const auto* head_type = schema.find_entity_type(head->type);
  const auto* tail_type = schema.find_entity_type(tail->type);
  if (head_type == nullptr || tail_type == nullptr) return ParseFailure::kUnknownEntityType;

  out.push_back(Triplet{std::string(head->surface), *head_type, rel->name, std::string(tail->surface), *tail_type});
  return out;
}

}  // namespace

std::string_view to_string(ParseFailure failure) {
  switch (failure) {
    case ParseFailure::kNoAnswerTag: return "NoAnswerTag";
    case ParseFailure::kUnclosedTag: return "UnclosedTag";
    case ParseFailure::kBadGrammar: return "BadGrammar";
    case ParseFailure::kUnknownRelation: return "UnknownRelation";
    case ParseFailure::kUnknownEntityType: return "UnknownEntityType";
    case ParseFailure::kBadTripletShape: return "BadTripletShape";
  }
  return "Unknown";
}

Parsed<std::string> extract_final_answer(std::string_view completion) {
  const auto close = completion.rfind(kClose);
  const auto search_from = close == std::string_view::npos ? 0 : close + kClose.size();
  if (completion.find(kOpen, search_from) != std::string_view::npos) return ParseFailure::kUnclosedTag;
  if (close == std::string_view::npos) return ParseFailure::kNoAnswerTag;
  const auto open = completion.rfind(kOpen, close);
  if (open == std::string_view::npos || open + kOpen.size() > close) return ParseFailure::kNoAnswerTag;
  const auto begin = open + kOpen.size();
  return std::string(completion.substr(begin, close - begin));
}

Parsed<RelationLabel> parse_rc_answer(std::string_view answer_text, const RelationSchema& schema) {
  const auto text = trim(answer_text);
  const auto paren = text.find('(');
  const auto name = trim(text.substr(0, paren));
  if (name.empty() || name.find_first_of("),") != std::string_view::npos) return ParseFailure::kBadGrammar;

  if (paren == std::string_view::npos) {
    const auto* rel = schema.find_relation(name);
    if (rel == nullptr) return ParseFailure::kUnknownRelation;
    if (!rel->directionless_form) return ParseFailure::kBadGrammar;
    return RelationLabel{rel->name, Direction::kNone};
  }

  Cursor args(text.substr(paren));
  auto dir = parse_args(args);
  if (!dir) return ParseFailure::kBadGrammar;
  const auto* rel = schema.find_relation(name);
  if (rel == nullptr) return ParseFailure::kUnknownRelation;
  return RelationLabel{rel->name, rel->directionless_form ? Direction::kNone : *dir};
}

Parsed<std::vector<Triplet>> parse_te_answer(std::string_view answer_text, const RelationSchema& schema) {
  Cursor c(answer_text);
  if (!c.consume("[")) return ParseFailure::kBadGrammar;
  std::vector<Triplet> triplets;
  if (c.consume("]")) {
    if (!c.at_end()) return ParseFailure::kBadGrammar;
    return triplets;
  }
  while (true) {
    if (!c.consume("[")) return ParseFailure::kBadTripletShape;
    const auto rest = c.rest();
    const auto end = rest.find(']');
    if (end == std::string_view::npos) return ParseFailure::kBadGrammar;
    const auto body = rest.substr(0, end);
    if (body.find('[') != std::string_view::npos) return ParseFailure::kBadTripletShape;
    auto parsed = parse_triplet_body(body, schema, triplets);
    if (!parsed) return parsed.failure();
    c.advance(end + 1);
    if (c.consume(",")) continue;
    if (c.consume("]") && c.at_end()) return triplets;
    return ParseFailure::kBadGrammar;
  }
}

std::string serialize_rc_answer(const RelationLabel& label, const RelationSchema& schema) {
  const auto* rel = schema.find_relation(label.relation);
  if (rel != nullptr && rel->directionless_form) return rel->name;
  const std::string& name = rel != nullptr ? rel->name : label.relation;
  return name + (label.direction == Direction::kE2ToE1 ? "(e2,e1)" : "(e1,e2)");
}

std::string serialize_te_answer(const std::vector<Triplet>& triplets) {
  std::string out = "[";
  for (std::size_t i = 0; i < triplets.size(); ++i) {
    const auto& t = triplets[i];
    if (i > 0) out += ", ";
    out += "[" + t.subject + ":" + t.subject_type + ", " + t.relation + ", " + t.object + ":" + t.object_type + "]";
  }
  return out + "]";
}

RelationLabel normalize_label(RelationLabel label, const RelationSchema& schema) {
  if (schema.is_symmetric(label.relation)) label.direction = Direction::kNone;
  return label;
}

ParsedRcResponse parse_rc_response(std::string_view completion, const RelationSchema& schema) {
  ParsedRcResponse out;
  auto answer = extract_final_answer(completion);
  if (!answer) {
    out.response.failure = answer.failure();
    return out;
  }
  out.response.answer_text = answer.value();
  auto label = parse_rc_answer(answer.value(), schema);
  if (!label) {
    out.response.failure = label.failure();
    return out;
  }
  out.response.format_ok = true;
  out.label = std::move(label).value();
  return out;
}

ParsedTeResponse parse_te_response(std::string_view completion, const RelationSchema& schema) {
  ParsedTeResponse out;
  auto answer = extract_final_answer(completion);
  if (!answer) {
    out.response.failure = answer.failure();
    return out;
  }
  out.response.answer_text = answer.value();
  auto triplets = parse_te_answer(answer.value(), schema);
  if (!triplets) {
    out.response.failure = triplets.failure();
    return out;
  }
  out.response.format_ok = true;
  out.triplets = std::move(triplets).value();
  return out;
}

}  // namespace revr
