#include "mdrkit/jsonio.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mdrkit/errors.hpp"
#include "mdrkit/rng.hpp"

namespace mdrkit {

std::string format_double(double v) {
    if (v == 0.0) v = 0.0;  // collapse -0
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

void write_canonical(const json& j, std::string& out) {
    switch (j.type()) {
        case json::value_t::object: {
            out += '{';
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out += ',';
                first = false;
                out += json(it.key()).dump();
                out += ':';
                write_canonical(it.value(), out);
            }
            out += '}';
            break;
        }
        case json::value_t::array: {
            out += '[';
            bool first = true;
            for (const auto& v : j) {
                if (!first) out += ',';
                first = false;
                write_canonical(v, out);
            }
            out += ']';
            break;
        }
        case json::value_t::string:
            out += j.dump();
            break;
        case json::value_t::boolean:
            out += j.get<bool>() ? "true" : "false";
            break;
        case json::value_t::number_integer:
            out += std::to_string(j.get<int64_t>());
            break;
        case json::value_t::number_unsigned:
            out += std::to_string(j.get<uint64_t>());
            break;
        case json::value_t::number_float: {
            double v = j.get<double>();
            if (!std::isfinite(v)) throw NumericError("non-finite value cannot be serialized");
            out += format_double(v);
            break;
        }
        case json::value_t::null:
            out += "null";
            break;
        default:
            throw NumericError("unsupported JSON value type");
    }
}

}  // namespace

std::string canonical_json(const json& j) {
    std::string out;
    write_canonical(j, out);
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write file: " + path);
    out << content;
}

json read_json_file(const std::string& path) {
    try {
        return json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw ParseError("invalid JSON in " + path + ": " + e.what());
    }
}

void write_canonical_json_file(const std::string& path, const json& j) {
    write_file(path, canonical_json(j) + "\n");
}

uint64_t hash_bytes(const std::string& bytes) { return fnv1a64(bytes.data(), bytes.size()); }

std::string hash_hex(uint64_t h) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string file_hash_hex(const std::string& path) { return hash_hex(hash_bytes(read_file(path))); }

}  // namespace mdrkit
