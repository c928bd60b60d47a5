#include "osmeval/json_util.hpp"

#include <fstream>
#include <sstream>

#include "osmeval/errors.hpp"

namespace osmeval {

json parse_json_file(const std::filesystem::path& path) {
    return parse_json_text(read_text_file(path), path.string());
}

json parse_json_text(std::string_view text, const std::string& context) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(context + ": " + e.what());
    }
}

const json& require_field(const json& obj, std::string_view key, const std::string& context) {
    if (!obj.is_object()) throw SchemaError(context + ": expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) {
        throw SchemaError(context + ": missing required field '" + std::string(key) + "'");
    }
    return *it;
}

std::string require_string(const json& obj, std::string_view key, const std::string& context) {
    const json& v = require_field(obj, key, context);
    if (!v.is_string()) {
        throw SchemaError(context + ": field '" + std::string(key) + "' must be a string");
    }
    return v.get<std::string>();
}

double require_number(const json& obj, std::string_view key, const std::string& context) {
    const json& v = require_field(obj, key, context);
    if (!v.is_number()) {
        throw SchemaError(context + ": field '" + std::string(key) + "' must be a number");
    }
    return v.get<double>();
}

void expect_object(const json& obj, std::initializer_list<std::string_view> allowed,
                   const std::string& context) {
    if (!obj.is_object()) throw SchemaError(context + ": expected an object");
    for (const auto& [key, value] : obj.items()) {
        bool known = false;
        for (auto a : allowed) {
            if (key == a) {
                known = true;
                break;
            }
        }
        if (!known) throw SchemaError(context + ": unknown key '" + key + "'");
    }
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("read failure: " + path.string());
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open file for writing: " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw IoError("write failure: " + path.string());
}

void write_text_file_atomic(const std::filesystem::path& path, std::string_view content) {
    std::filesystem::path partial = path;
    partial += ".partial";
    write_text_file(partial, content);
    std::error_code ec;
    std::filesystem::rename(partial, path, ec);
    if (ec) throw IoError("cannot finalize file " + path.string() + ": " + ec.message());
}

std::string canonical_dump(const json& doc) {
    return doc.dump(2) + "\n";
}

}  // namespace osmeval
