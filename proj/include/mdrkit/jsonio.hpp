#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

namespace mdrkit {

using json = nlohmann::json;

// Canonical serialization: keys sorted (nlohmann::json already stores objects
// in key order), no whitespace, doubles printed with 17 significant digits.
// Equal documents produce byte-equal files, and save -> load -> save is
// byte-stable.
std::string canonical_json(const json& j);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

json read_json_file(const std::string& path);
void write_canonical_json_file(const std::string& path, const json& j);

uint64_t hash_bytes(const std::string& bytes);
std::string hash_hex(uint64_t h);
std::string file_hash_hex(const std::string& path);

// "%.17g" with -0 normalized away; shared by every canonical emitter.
std::string format_double(double v);

}  // namespace mdrkit
