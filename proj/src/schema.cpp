#include "revr/schema.hpp"

#include "revr/io.hpp"
#include "revr/text.hpp"

namespace revr {

using nlohmann::json;

std::string_view to_string(Task task) { return task == Task::kRc ? "rc" : "te"; }

Task task_from_string(std::string_view s) {
  if (s == "rc") return Task::kRc;
  if (s == "te") return Task::kTe;
  throw SchemaError("task", "task must be \"rc\" or \"te\", got \"" + std::string(s) + "\"");
}

RelationSchema::RelationSchema(Task task, std::vector<RelationDef> relations,
                               std::vector<std::string> entity_types)
    : task_(task), relations_(std::move(relations)), entity_types_(std::move(entity_types)) {
  if (relations_.empty()) throw SchemaError("relations", "schema must define at least one relation");
  for (std::size_t i = 0; i < relations_.size(); ++i) {
    const auto& rel = relations_[i];
    if (rel.name.empty()) throw SchemaError("relations", "relation name is empty");
    if (rel.name.find_first_of("(),") != std::string::npos) {
      throw SchemaError(rel.name, "relation name \"" + rel.name + "\" contains '(', ')' or ','");
    }
    if (trim(rel.name).size() != rel.name.size()) {
      throw SchemaError(rel.name, "relation name \"" + rel.name + "\" has surrounding whitespace");
    }
    if (rel.directionless_form && rel.directed) {
      throw SchemaError(rel.name, "relation \"" + rel.name + "\" is directionless_form but directed");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (iequals(relations_[j].name, rel.name)) {
        throw SchemaError(rel.name, "duplicate relation \"" + rel.name + "\"");
      }
    }
  }
  for (std::size_t i = 0; i < entity_types_.size(); ++i) {
    const auto& type = entity_types_[i];
    if (type.empty()) throw SchemaError("entity_types", "entity type name is empty");
    if (type.find(':') != std::string::npos) {
      throw SchemaError(type, "entity type \"" + type + "\" contains ':'");
    }
    if (trim(type).size() != type.size()) {
      throw SchemaError(type, "entity type \"" + type + "\" has surrounding whitespace");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (iequals(entity_types_[j], type)) {
        throw SchemaError(type, "duplicate entity type \"" + type + "\"");
      }
    }
  }
  if (task_ == Task::kTe && entity_types_.empty()) {
    throw SchemaError("entity_types", "te schema must define at least one entity type");
  }
}

const RelationDef* RelationSchema::find_relation(std::string_view name) const {
  for (const auto& rel : relations_) {
    if (iequals(rel.name, name)) return &rel;
  }
  return nullptr;
}

const std::string* RelationSchema::find_entity_type(std::string_view name) const {
  for (const auto& type : entity_types_) {
    if (iequals(type, name)) return &type;
  }
  return nullptr;
}

bool RelationSchema::is_symmetric(std::string_view relation) const {
  const auto* def = find_relation(relation);
  return def != nullptr && !def->directed;
}

namespace {

const json& require(const json& obj, const char* key, const std::string& context) {
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(key, context + " is missing \"" + key + "\"");
  return *it;
}

bool require_bool(const json& obj, const char* key, const std::string& context) {
  const auto& v = require(obj, key, context);
  if (!v.is_boolean()) throw SchemaError(key, context + ": \"" + key + "\" must be a boolean");
  return v.get<bool>();
}

}  // namespace

RelationSchema schema_from_json(const json& doc) {
  if (!doc.is_object()) throw SchemaError("", "schema document must be an object");
  const auto& task = require(doc, "task", "schema");
  if (!task.is_string()) throw SchemaError("task", "\"task\" must be a string");

  const auto& rels = require(doc, "relations", "schema");
  if (!rels.is_array()) throw SchemaError("relations", "\"relations\" must be a list");
  std::vector<RelationDef> relations;
  for (std::size_t i = 0; i < rels.size(); ++i) {
    const auto& r = rels[i];
    const std::string ctx = "relations[" + std::to_string(i) + "]";
    if (!r.is_object()) throw SchemaError(ctx, ctx + " must be an object");
    const auto& name = require(r, "name", ctx);
    if (!name.is_string()) throw SchemaError(ctx, ctx + ": \"name\" must be a string");
    RelationDef def;
    def.name = name.get<std::string>();
    def.directed = require_bool(r, "directed", ctx);
    if (r.contains("directionless_form")) def.directionless_form = require_bool(r, "directionless_form", ctx);
    relations.push_back(std::move(def));
  }

  std::vector<std::string> entity_types;
  if (auto it = doc.find("entity_types"); it != doc.end()) {
    if (!it->is_array()) throw SchemaError("entity_types", "\"entity_types\" must be a list");
    for (const auto& t : *it) {
      if (!t.is_string()) throw SchemaError("entity_types", "entity types must be strings");
      entity_types.push_back(t.get<std::string>());
    }
  }
  return RelationSchema(task_from_string(task.get<std::string>()), std::move(relations),
                        std::move(entity_types));
}

json schema_to_json(const RelationSchema& schema) {
  json rels = json::array();
  for (const auto& r : schema.relations()) {
    rels.push_back({{"name", r.name}, {"directed", r.directed}, {"directionless_form", r.directionless_form}});
  }
  return {{"task", to_string(schema.task())}, {"relations", rels}, {"entity_types", schema.entity_types()}};
}

std::string serialize_schema(const RelationSchema& schema) { return schema_to_json(schema).dump(2) + "\n"; }

RelationSchema load_schema(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError("", path.string() + ": malformed schema document: " + e.what());
  }
  return schema_from_json(doc);
}

namespace {

std::string read_guide_text(const std::filesystem::path& path) {
  std::string text = read_file(path);
  if (text.empty()) throw GuideError("empty guide: " + path.string());
  return text;
}

}  // namespace

AnnotationGuide load_guide(const std::filesystem::path& relation_guide_path) {
  return AnnotationGuide{read_guide_text(relation_guide_path), {}};
}

AnnotationGuide load_guide(const std::filesystem::path& relation_guide_path,
                           const std::filesystem::path& entity_guide_path) {
  return AnnotationGuide{read_guide_text(relation_guide_path), read_guide_text(entity_guide_path)};
}

}  // namespace revr
