#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace osmeval::llm {

enum class FieldKind {
    String,
    Boolean,
    Number,
    Integer,
    Object,       // free-form object (e.g. attribute maps)
    StringArray,
    ObjectArray,  // array of objects shaped by item_fields
};

struct FieldSpec {
    std::string key;
    FieldKind kind = FieldKind::String;
    bool required = true;
    bool non_empty = false;  // strings: reject ""
    std::vector<FieldSpec> item_fields;
};

/// Minimal structural schema for LLM structured outputs. `id` feeds the
/// canonical request hash so schema changes invalidate replay entries.
struct JsonSchema {
    std::string id;
    std::vector<FieldSpec> fields;
};

/// nullopt when the document conforms; otherwise a human-readable error
/// suitable for a corrective re-prompt.
std::optional<std::string> validate_against(const JsonSchema& schema, const nlohmann::json& doc);

/// Pull the first JSON object/array out of a model reply, tolerating prose
/// and ``` fences around it. Throws ParseError when nothing parses.
nlohmann::json extract_json(const std::string& text);

/// Short textual sketch of the expected shape, for prompt embedding.
std::string schema_sketch(const JsonSchema& schema);

}  // namespace osmeval::llm
