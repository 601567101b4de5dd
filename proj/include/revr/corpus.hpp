#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "revr/parse.hpp"
#include "revr/schema.hpp"

namespace revr {

enum class EntityTag { kE1, kE2 };

enum class TagErrorKind { kMissingTag, kDuplicateTag, kCrossedNesting, kEmptySpan };

class TagError : public std::runtime_error {
 public:
  TagError(TagErrorKind kind, EntityTag tag, const std::string& message)
      : std::runtime_error(message), kind_(kind), tag_(tag) {}
  TagErrorKind kind() const { return kind_; }
  EntityTag tag() const { return tag_; }

 private:
  TagErrorKind kind_;
  EntityTag tag_;
};

struct EntitySpans {
  std::string e1;
  std::string e2;
};

// Returns the contents of the <e1>...</e1> and <e2>...</e2> spans. Each tag
// must occur exactly once, open before close, the two spans must be
// disjoint, and neither may be blank. Tag order in the text is irrelevant.
EntitySpans extract_entity_spans(std::string_view text);

struct TaggedSentence {
  std::string text;
  std::string e1;  // RC only
  std::string e2;  // RC only

  // Validates the entity tags; throws TagError.
  static TaggedSentence rc(std::string text);
  static TaggedSentence plain(std::string text);
};

struct RcExample {
  std::string id;
  TaggedSentence sentence;
  RelationLabel gold;
  std::size_t line = 0;
};

struct TeExample {
  std::string id;
  TaggedSentence sentence;
  std::vector<Triplet> gold;
  std::size_t line = 0;
};

struct PromptText {
  std::string text;
};

PromptText render_rc_prompt(const AnnotationGuide& guide, const TaggedSentence& sentence);
PromptText render_te_prompt(const AnnotationGuide& guide, const TaggedSentence& sentence);

// The raw template resources, exposed for auditing.
std::string_view rc_prompt_template();
std::string_view te_prompt_template();

enum class DatasetErrorKind { kMalformedLine, kUnknownRelation, kUnknownEntityType, kTagViolation, kDuplicateId };

class DatasetError : public std::runtime_error {
 public:
  DatasetError(DatasetErrorKind kind, std::size_t line, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ": " + message), kind_(kind), line_(line) {}
  DatasetErrorKind kind() const { return kind_; }
  std::size_t line() const { return line_; }

 private:
  DatasetErrorKind kind_;
  std::size_t line_;
};

// Line-delimited records. RC: {"id", "sentence", "label"} with the label in
// answer grammar. TE: {"id", "sentence", "triplets": [[subj, subj_type, rel,
// obj, obj_type], ...]}. Blank lines are skipped.
std::vector<RcExample> load_rc_dataset(const std::filesystem::path& path, const RelationSchema& schema);
std::vector<TeExample> load_te_dataset(const std::filesystem::path& path, const RelationSchema& schema);

}  // namespace revr
