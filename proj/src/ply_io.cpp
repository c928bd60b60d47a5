#include "osmeval/ply_io.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <vector>

#include "osmeval/errors.hpp"
#include "osmeval/text.hpp"

static_assert(std::endian::native == std::endian::little,
              "binary PLY reader assumes a little-endian host");

namespace osmeval {

namespace {

enum class ScalarType { Int8, UInt8, Int16, UInt16, Int32, UInt32, Float32, Float64 };

std::optional<ScalarType> scalar_type_from_name(std::string_view name) {
    if (name == "char" || name == "int8") return ScalarType::Int8;
    if (name == "uchar" || name == "uint8") return ScalarType::UInt8;
    if (name == "short" || name == "int16") return ScalarType::Int16;
    if (name == "ushort" || name == "uint16") return ScalarType::UInt16;
    if (name == "int" || name == "int32") return ScalarType::Int32;
    if (name == "uint" || name == "uint32") return ScalarType::UInt32;
    if (name == "float" || name == "float32") return ScalarType::Float32;
    if (name == "double" || name == "float64") return ScalarType::Float64;
    return std::nullopt;
}

std::size_t scalar_size(ScalarType t) {
    switch (t) {
        case ScalarType::Int8:
        case ScalarType::UInt8: return 1;
        case ScalarType::Int16:
        case ScalarType::UInt16: return 2;
        case ScalarType::Int32:
        case ScalarType::UInt32:
        case ScalarType::Float32: return 4;
        case ScalarType::Float64: return 8;
    }
    return 0;
}

bool is_integer(ScalarType t) {
    return t != ScalarType::Float32 && t != ScalarType::Float64;
}

struct Property {
    std::string name;
    ScalarType type;
    std::size_t offset = 0;  // byte offset within a binary row
};

struct Element {
    std::string name;
    std::size_t count = 0;
    std::vector<Property> properties;
    std::size_t row_stride = 0;

    const Property* find(std::string_view prop_name) const {
        for (const auto& p : properties) {
            if (p.name == prop_name) return &p;
        }
        return nullptr;
    }
};

struct Header {
    PlyFormat format = PlyFormat::Ascii;
    std::vector<Element> elements;
};

Header parse_header(std::istream& in, const std::string& path_str) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError(path_str + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "ply") throw FormatError(path_str + ": missing 'ply' magic");

    Header header;
    bool format_seen = false;
    bool done = false;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto tokens = split_tokens(line);
        if (tokens.empty()) continue;
        const std::string& kw = tokens[0];
        if (kw == "comment" || kw == "obj_info") continue;
        if (kw == "format") {
            if (tokens.size() < 2) throw ParseError(path_str + ": malformed format line");
            if (tokens[1] == "ascii") {
                header.format = PlyFormat::Ascii;
            } else if (tokens[1] == "binary_little_endian") {
                header.format = PlyFormat::BinaryLittleEndian;
            } else if (tokens[1] == "binary_big_endian") {
                throw FormatError(path_str +
                                  ": binary_big_endian PLY is not supported; re-export as "
                                  "ascii or binary_little_endian");
            } else {
                throw FormatError(path_str + ": unknown PLY format '" + tokens[1] + "'");
            }
            format_seen = true;
        } else if (kw == "element") {
            if (tokens.size() != 3) {
                throw ParseError(path_str + ": malformed element line " + std::to_string(line_no));
            }
            Element elem;
            elem.name = tokens[1];
            std::size_t count = 0;
            auto [ptr, ec] =
                std::from_chars(tokens[2].data(), tokens[2].data() + tokens[2].size(), count);
            if (ec != std::errc{} || ptr != tokens[2].data() + tokens[2].size()) {
                throw ParseError(path_str + ": bad element count '" + tokens[2] + "'");
            }
            elem.count = count;
            header.elements.push_back(std::move(elem));
        } else if (kw == "property") {
            if (header.elements.empty()) {
                throw ParseError(path_str + ": property before any element");
            }
            if (tokens.size() >= 2 && tokens[1] == "list") {
                throw FormatError(path_str + ": list properties are not supported (element '" +
                                  header.elements.back().name + "')");
            }
            if (tokens.size() != 3) {
                throw ParseError(path_str + ": malformed property line " + std::to_string(line_no));
            }
            const auto type = scalar_type_from_name(tokens[1]);
            if (!type) throw FormatError(path_str + ": unknown property type '" + tokens[1] + "'");
            Element& elem = header.elements.back();
            Property prop;
            prop.name = tokens[2];
            prop.type = *type;
            prop.offset = elem.row_stride;
            elem.row_stride += scalar_size(*type);
            elem.properties.push_back(std::move(prop));
        } else if (kw == "end_header") {
            done = true;
            break;
        } else {
            throw ParseError(path_str + ": unexpected header keyword '" + kw + "'");
        }
    }
    if (!done) throw ParseError(path_str + ": header ended without end_header");
    if (!format_seen) throw ParseError(path_str + ": header has no format line");
    return header;
}

double read_scalar_binary(const char* row, const Property& prop) {
    const char* src = row + prop.offset;
    switch (prop.type) {
        case ScalarType::Int8: {
            std::int8_t v;
            std::memcpy(&v, src, sizeof v);
            return static_cast<double>(v);
        }
        case ScalarType::UInt8: {
            std::uint8_t v;
            std::memcpy(&v, src, sizeof v);
            return static_cast<double>(v);
        }
        case ScalarType::Int16: {
            std::int16_t v;
            std::memcpy(&v, src, sizeof v);
            return static_cast<double>(v);
        }
        case ScalarType::UInt16: {
            std::uint16_t v;
            std::memcpy(&v, src, sizeof v);
            return static_cast<double>(v);
        }
        case ScalarType::Int32: {
            std::int32_t v;
            std::memcpy(&v, src, sizeof v);
            return static_cast<double>(v);
        }
        case ScalarType::UInt32: {
            std::uint32_t v;
            std::memcpy(&v, src, sizeof v);
            return static_cast<double>(v);
        }
        case ScalarType::Float32: {
            float v;
            std::memcpy(&v, src, sizeof v);
            return static_cast<double>(v);
        }
        case ScalarType::Float64: {
            double v;
            std::memcpy(&v, src, sizeof v);
            return v;
        }
    }
    return 0.0;
}

double parse_ascii_scalar(const std::string& token, ScalarType type, const std::string& path_str,
                          std::size_t line_no) {
    if (is_integer(type)) {
        long long v = 0;
        auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
        if (ec != std::errc{} || ptr != token.data() + token.size()) {
            throw ParseError(path_str + ": bad integer '" + token + "' at data line " +
                             std::to_string(line_no));
        }
        return static_cast<double>(v);
    }
    if (type == ScalarType::Float32) {
        float v = 0.f;
        auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
        if (ec != std::errc{} || ptr != token.data() + token.size()) {
            throw ParseError(path_str + ": bad float '" + token + "' at data line " +
                             std::to_string(line_no));
        }
        return static_cast<double>(v);
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc{} || ptr != token.data() + token.size()) {
        throw ParseError(path_str + ": bad float '" + token + "' at data line " +
                         std::to_string(line_no));
    }
    return v;
}

std::int32_t clamp_class_id(double raw, int class_count) {
    const auto v = static_cast<long long>(raw);
    if (v < 0) return kVoidClass;
    if (class_count > 0 && v >= class_count) return kVoidClass;
    if (v > std::numeric_limits<std::int32_t>::max()) return kVoidClass;
    return static_cast<std::int32_t>(v);
}

void append_ascii_float(std::string& out, float v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, ptr);
}

}  // namespace

LabeledPointCloud load_point_cloud(const std::filesystem::path& path,
                                   const PlyReadOptions& options) {
    const std::string path_str = path.string();
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open point cloud: " + path_str);

    const Header header = parse_header(in, path_str);

    const Element* vertex = nullptr;
    for (const auto& elem : header.elements) {
        if (elem.name == "vertex") {
            vertex = &elem;
        } else if (elem.count > 0) {
            throw FormatError(path_str + ": unsupported non-empty element '" + elem.name + "'");
        }
    }
    if (!vertex) throw FormatError(path_str + ": no vertex element");
    if (!header.elements.empty() && &header.elements.front() != vertex && vertex->count > 0) {
        throw FormatError(path_str + ": vertex element must come first");
    }

    const Property* px = vertex->find("x");
    const Property* py = vertex->find("y");
    const Property* pz = vertex->find("z");
    for (const auto* p : {px, py, pz}) {
        if (!p) throw FormatError(path_str + ": vertex element lacks x/y/z properties");
        if (is_integer(p->type)) {
            throw FormatError(path_str + ": coordinate property '" + p->name +
                              "' must be float32 or float64");
        }
    }
    const Property* plabel = vertex->find(options.label_field);
    if (!plabel) {
        throw FormatError(path_str + ": vertex element lacks label property '" +
                          options.label_field + "'");
    }
    if (!is_integer(plabel->type)) {
        throw FormatError(path_str + ": label property '" + options.label_field +
                          "' must be an integer type");
    }
    const Property* pinstance = vertex->find("instance_id");
    if (pinstance && !is_integer(pinstance->type)) pinstance = nullptr;

    LabeledPointCloud cloud;
    cloud.points.resize(vertex->count);
    cloud.class_ids.resize(vertex->count);
    if (pinstance) cloud.instance_ids.resize(vertex->count);

    if (header.format == PlyFormat::Ascii) {
        std::string line;
        std::size_t row = 0;
        std::size_t line_no = 0;
        while (row < vertex->count) {
            if (!std::getline(in, line)) {
                throw IoError(path_str + ": vertex data truncated at row " + std::to_string(row));
            }
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            const auto tokens = split_tokens(line);
            if (tokens.empty()) continue;
            if (tokens.size() != vertex->properties.size()) {
                throw ParseError(path_str + ": expected " +
                                 std::to_string(vertex->properties.size()) + " values, got " +
                                 std::to_string(tokens.size()) + " at data line " +
                                 std::to_string(line_no));
            }
            std::array<double, 3> pt{};
            double label_raw = 0.0;
            double instance_raw = 0.0;
            for (std::size_t i = 0; i < tokens.size(); ++i) {
                const Property& prop = vertex->properties[i];
                const double v = parse_ascii_scalar(tokens[i], prop.type, path_str, line_no);
                if (&prop == px) pt[0] = v;
                else if (&prop == py) pt[1] = v;
                else if (&prop == pz) pt[2] = v;
                else if (&prop == plabel) label_raw = v;
                else if (pinstance && &prop == pinstance) instance_raw = v;
            }
            cloud.points[row] = pt;
            cloud.class_ids[row] = clamp_class_id(label_raw, options.class_count);
            if (pinstance) cloud.instance_ids[row] = static_cast<std::int32_t>(instance_raw);
            ++row;
        }
    } else {
        const std::size_t stride = vertex->row_stride;
        std::vector<char> data(stride * vertex->count);
        in.read(data.data(), static_cast<std::streamsize>(data.size()));
        if (static_cast<std::size_t>(in.gcount()) != data.size()) {
            throw IoError(path_str + ": binary vertex payload truncated (" +
                          std::to_string(in.gcount()) + " of " + std::to_string(data.size()) +
                          " bytes)");
        }
        for (std::size_t row = 0; row < vertex->count; ++row) {
            const char* base = data.data() + row * stride;
            cloud.points[row] = {read_scalar_binary(base, *px), read_scalar_binary(base, *py),
                                 read_scalar_binary(base, *pz)};
            cloud.class_ids[row] =
                clamp_class_id(read_scalar_binary(base, *plabel), options.class_count);
            if (pinstance) {
                cloud.instance_ids[row] =
                    static_cast<std::int32_t>(read_scalar_binary(base, *pinstance));
            }
        }
    }
    return cloud;
}

void save_point_cloud(const std::filesystem::path& path, const LabeledPointCloud& cloud,
                      const PlyWriteOptions& options) {
    if (cloud.class_ids.size() != cloud.points.size() ||
        (cloud.has_instances() && cloud.instance_ids.size() != cloud.points.size())) {
        throw ContractViolation("point cloud arrays have mismatched lengths");
    }
    std::string out;
    out.reserve(64 + cloud.size() * 32);
    out += "ply\n";
    out += options.format == PlyFormat::Ascii ? "format ascii 1.0\n"
                                              : "format binary_little_endian 1.0\n";
    out += "element vertex " + std::to_string(cloud.size()) + "\n";
    out += "property float x\nproperty float y\nproperty float z\n";
    out += "property int " + options.label_field + "\n";
    if (cloud.has_instances()) out += "property int instance_id\n";
    out += "end_header\n";

    if (options.format == PlyFormat::Ascii) {
        for (std::size_t i = 0; i < cloud.size(); ++i) {
            append_ascii_float(out, static_cast<float>(cloud.points[i][0]));
            out.push_back(' ');
            append_ascii_float(out, static_cast<float>(cloud.points[i][1]));
            out.push_back(' ');
            append_ascii_float(out, static_cast<float>(cloud.points[i][2]));
            out.push_back(' ');
            out += std::to_string(cloud.class_ids[i]);
            if (cloud.has_instances()) {
                out.push_back(' ');
                out += std::to_string(cloud.instance_ids[i]);
            }
            out.push_back('\n');
        }
    } else {
        for (std::size_t i = 0; i < cloud.size(); ++i) {
            const std::array<float, 3> pt = {static_cast<float>(cloud.points[i][0]),
                                             static_cast<float>(cloud.points[i][1]),
                                             static_cast<float>(cloud.points[i][2])};
            char buf[sizeof pt + 2 * sizeof(std::int32_t)];
            std::memcpy(buf, pt.data(), sizeof pt);
            std::memcpy(buf + sizeof pt, &cloud.class_ids[i], sizeof(std::int32_t));
            std::size_t n = sizeof pt + sizeof(std::int32_t);
            if (cloud.has_instances()) {
                std::memcpy(buf + n, &cloud.instance_ids[i], sizeof(std::int32_t));
                n += sizeof(std::int32_t);
            }
            out.append(buf, n);
        }
    }

    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw IoError("cannot open point cloud for writing: " + path.string());
    file.write(out.data(), static_cast<std::streamsize>(out.size()));
    file.flush();
    if (!file) throw IoError("write failure: " + path.string());
}

}  // namespace osmeval
