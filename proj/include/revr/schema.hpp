#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace revr {

enum class Task { kRc, kTe };

std::string_view to_string(Task task);
Task task_from_string(std::string_view s);

struct RelationDef {
  std::string name;
  // false: (e1,e2) and (e2,e1) denote the same relation.
  bool directed = true;
  // Written as a bare name with no argument list (an "Other"-style class).
  bool directionless_form = false;

  friend bool operator==(const RelationDef&, const RelationDef&) = default;
};

class SchemaError : public std::runtime_error {
 public:
  SchemaError(std::string key, const std::string& message)
      : std::runtime_error(message), key_(std::move(key)) {}
  // The schema field or relation/entity name that triggered the error.
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

// Relation and entity-type vocabulary for one task. Immutable after
// construction; lookups are case-insensitive and return canonical casing.
class RelationSchema {
 public:
  // Validates invariants and throws SchemaError naming the offending key.
  RelationSchema(Task task, std::vector<RelationDef> relations,
                 std::vector<std::string> entity_types = {});

  Task task() const { return task_; }
  const std::vector<RelationDef>& relations() const { return relations_; }
  const std::vector<std::string>& entity_types() const { return entity_types_; }

  const RelationDef* find_relation(std::string_view name) const;
  const std::string* find_entity_type(std::string_view name) const;

  // True when the relation is undirected or directionless. Unknown names are
  // treated as directed.
  bool is_symmetric(std::string_view relation) const;

  friend bool operator==(const RelationSchema&, const RelationSchema&) = default;

 private:
  Task task_;
  std::vector<RelationDef> relations_;
  std::vector<std::string> entity_types_;
};

RelationSchema schema_from_json(const nlohmann::json& doc);
nlohmann::json schema_to_json(const RelationSchema& schema);
std::string serialize_schema(const RelationSchema& schema);

RelationSchema load_schema(const std::filesystem::path& path);

struct AnnotationGuide {
  std::string relation_guide;
  std::string entity_guide;  // TE only
};

class GuideError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Reads the guide byte-for-byte. Throws GuideError("empty guide") on an
// empty file.
AnnotationGuide load_guide(const std::filesystem::path& relation_guide_path);
AnnotationGuide load_guide(const std::filesystem::path& relation_guide_path,
                           const std::filesystem::path& entity_guide_path);

}  // namespace revr
