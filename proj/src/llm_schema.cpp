#include "osmeval/llm/schema.hpp"

#include "osmeval/errors.hpp"

namespace osmeval::llm {

using nlohmann::json;

namespace {

std::string kind_name(FieldKind kind) {
    switch (kind) {
        case FieldKind::String: return "string";
        case FieldKind::Boolean: return "boolean";
        case FieldKind::Number: return "number";
        case FieldKind::Integer: return "integer";
        case FieldKind::Object: return "object";
        case FieldKind::StringArray: return "array of strings";
        case FieldKind::ObjectArray: return "array of objects";
    }
    return "value";
}

std::optional<std::string> validate_fields(const std::vector<FieldSpec>& fields, const json& doc,
                                           const std::string& where) {
    if (!doc.is_object()) return where + " must be a JSON object";
    for (const auto& field : fields) {
        auto it = doc.find(field.key);
        if (it == doc.end()) {
            if (field.required) return where + " is missing required key '" + field.key + "'";
            continue;
        }
        const json& v = *it;
        const std::string path = where + "." + field.key;
        switch (field.kind) {
            case FieldKind::String:
                if (!v.is_string()) return path + " must be a string";
                if (field.non_empty && v.get<std::string>().empty()) {
                    return path + " must not be empty";
                }
                break;
            case FieldKind::Boolean:
                if (!v.is_boolean()) return path + " must be a boolean";
                break;
            case FieldKind::Number:
                if (!v.is_number()) return path + " must be a number";
                break;
            case FieldKind::Integer:
                if (!v.is_number_integer()) return path + " must be an integer";
                break;
            case FieldKind::Object:
                if (!v.is_object()) return path + " must be an object";
                break;
            case FieldKind::StringArray:
                if (!v.is_array()) return path + " must be an array of strings";
                for (const json& item : v) {
                    if (!item.is_string()) return path + " must contain only strings";
                }
                break;
            case FieldKind::ObjectArray:
                if (!v.is_array()) return path + " must be an array of objects";
                for (std::size_t i = 0; i < v.size(); ++i) {
                    auto err = validate_fields(field.item_fields, v[i],
                                               path + "[" + std::to_string(i) + "]");
                    if (err) return err;
                }
                break;
        }
    }
    return std::nullopt;
}

}  // namespace

std::optional<std::string> validate_against(const JsonSchema& schema, const json& doc) {
    return validate_fields(schema.fields, doc, "$");
}

json extract_json(const std::string& text) {
    // Fast path: the whole reply is JSON.
    {
        json doc = json::parse(text, nullptr, false);
        if (!doc.is_discarded()) return doc;
    }
    // Otherwise scan for the first balanced object or array.
    for (std::size_t start = 0; start < text.size(); ++start) {
        const char open = text[start];
        if (open != '{' && open != '[') continue;
        const char close = open == '{' ? '}' : ']';
        int depth = 0;
        bool in_string = false;
        bool escaped = false;
        for (std::size_t i = start; i < text.size(); ++i) {
            const char c = text[i];
            if (in_string) {
                if (escaped) {
                    escaped = false;
                } else if (c == '\\') {
                    escaped = true;
                } else if (c == '"') {
                    in_string = false;
                }
                continue;
            }
            if (c == '"') {
                in_string = true;
            } else if (c == open) {
                ++depth;
            } else if (c == close) {
                --depth;
                if (depth == 0) {
                    json doc = json::parse(text.substr(start, i - start + 1), nullptr, false);
                    if (!doc.is_discarded()) return doc;
                    break;  // resume scanning after this candidate
                }
            }
        }
    }
    throw ParseError("reply contains no parsable JSON document");
}

std::string schema_sketch(const JsonSchema& schema) {
    std::string out = "{";
    for (std::size_t i = 0; i < schema.fields.size(); ++i) {
        const auto& f = schema.fields[i];
        if (i) out += ", ";
        out += "\"" + f.key + "\": <" + kind_name(f.kind) + ">";
    }
    out += "}";
    return out;
}

}  // namespace osmeval::llm
