#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "revr/schema.hpp"

namespace revr {

enum class Direction { kE1ToE2, kE2ToE1, kNone };

struct RelationLabel {
  std::string relation;  // canonical schema casing
  Direction direction = Direction::kE1ToE2;

  friend bool operator==(const RelationLabel&, const RelationLabel&) = default;
};

struct Triplet {
  std::string subject;
  std::string subject_type;
  std::string relation;
  std::string object;
  std::string object_type;

  friend bool operator==(const Triplet&, const Triplet&) = default;
};

enum class ParseFailure {
  kNoAnswerTag,
  kUnclosedTag,
  kBadGrammar,
  kUnknownRelation,
  kUnknownEntityType,
  kBadTripletShape,
};

std::string_view to_string(ParseFailure failure);

// Either a parsed value or the reason parsing failed.
template <class T>
class Parsed {
 public:
  Parsed(T value) : state_(std::move(value)) {}  // NOLINT(google-explicit-constructor)
  Parsed(ParseFailure failure) : state_(failure) {}  // NOLINT(google-explicit-constructor)

  bool ok() const { return std::holds_alternative<T>(state_); }
  explicit operator bool() const { return ok(); }

  const T& value() const& { return std::get<T>(state_); }
  T&& value() && { return std::get<T>(std::move(state_)); }
  ParseFailure failure() const { return std::get<ParseFailure>(state_); }

 private:
  std::variant<T, ParseFailure> state_;
};

// Contents of the last well-formed <answer>...</answer> pair. <think> tags
// are not inspected. An <answer> opened after the last </answer> is
// kUnclosedTag even if earlier pairs exist.
Parsed<std::string> extract_final_answer(std::string_view completion);

// Grammar: NAME "(" ARG "," ARG ")" with ARG in {e1, e2}, the two ARGs
// distinct, ASCII whitespace allowed around every token. A bare NAME is
// accepted for directionless_form relations. Name lookup is
// case-insensitive; the returned label carries canonical casing.
Parsed<RelationLabel> parse_rc_answer(std::string_view answer_text, const RelationSchema& schema);

// Grammar: "[" [TRIPLET ("," TRIPLET)*] "]", TRIPLET = "[" HEAD ":" TYPE ","
// RELATION "," TAIL ":" TYPE "]". HEAD binds to the subject. Entity strings
// are split at their last ':' and trimmed, otherwise preserved verbatim.
Parsed<std::vector<Triplet>> parse_te_answer(std::string_view answer_text, const RelationSchema& schema);

std::string serialize_rc_answer(const RelationLabel& label, const RelationSchema& schema);
std::string serialize_te_answer(const std::vector<Triplet>& triplets);

// Maps the direction of undirected and directionless relations to kNone.
RelationLabel normalize_label(RelationLabel label, const RelationSchema& schema);

struct ParsedResponse {
  std::optional<std::string> answer_text;
  bool format_ok = false;
  std::optional<ParseFailure> failure;
};

struct ParsedRcResponse {
  ParsedResponse response;
  std::optional<RelationLabel> label;
};

struct ParsedTeResponse {
  ParsedResponse response;
  std::optional<std::vector<Triplet>> triplets;
};

ParsedRcResponse parse_rc_response(std::string_view completion, const RelationSchema& schema);
ParsedTeResponse parse_te_response(std::string_view completion, const RelationSchema& schema);

}  // namespace revr
