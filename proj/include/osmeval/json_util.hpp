#pragma once

#include <filesystem>
#include <initializer_list>
#include <string>
#include <string_view>

#include <json.hpp>

namespace osmeval {

using nlohmann::json;

/// Parse a JSON document, rethrowing parse failures as ParseError with the
/// source path in the message.
json parse_json_file(const std::filesystem::path& path);

json parse_json_text(std::string_view text, const std::string& context);

/// Field access with SchemaError on missing key, naming the context.
const json& require_field(const json& obj, std::string_view key, const std::string& context);

std::string require_string(const json& obj, std::string_view key, const std::string& context);

double require_number(const json& obj, std::string_view key, const std::string& context);

/// Reject unknown keys: every key of `obj` must appear in `allowed`.
void expect_object(const json& obj, std::initializer_list<std::string_view> allowed,
                   const std::string& context);

std::string read_text_file(const std::filesystem::path& path);

void write_text_file(const std::filesystem::path& path, std::string_view content);

/// Write to "<path>.partial", then rename onto the final path. A failed run
/// leaves the previous complete file untouched and the partial next to it.
void write_text_file_atomic(const std::filesystem::path& path, std::string_view content);

/// Canonical serialization used for every JSON artifact this tool writes:
/// 2-space indent, sorted keys (nlohmann default), trailing newline.
std::string canonical_dump(const json& doc);

}  // namespace osmeval
