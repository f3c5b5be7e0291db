#pragma once

// Little-endian binary primitives and the tagged-section checkpoint
// container used for agent snapshots.
//
// Container layout:
//   "HRACKPT1" | u32 section count | per section: 4-byte tag, u64 length, payload

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>

namespace hra::bin {

void put_u32(std::ostream& os, std::uint32_t v);
void put_u64(std::ostream& os, std::uint64_t v);
void put_f64(std::ostream& os, double v);
void put_bytes(std::ostream& os, const std::string& bytes);

std::uint32_t get_u32(std::istream& is);
std::uint64_t get_u64(std::istream& is);
double get_f64(std::istream& is);
/// Reads exactly n bytes; throws ParseError on a short read.
std::string get_bytes(std::istream& is, std::size_t n);

using Sections = std::map<std::string, std::string>;  // 4-char tag -> payload

void write_container(std::ostream& os, const Sections& sections);
Sections read_container(std::istream& is);

void save_container(const std::string& path, const Sections& sections);
Sections load_container(const std::string& path);

}  // namespace hra::bin
