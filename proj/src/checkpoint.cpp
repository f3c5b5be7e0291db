#include "hra/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "hra/errors.hpp"

namespace hra::bin {

namespace {

constexpr char kMagic[] = "HRACKPT1";

template <typename T>
void put_le(std::ostream& os, T v) {
  std::array<char, sizeof(T)> bytes;
  for (std::size_t i = 0; i < sizeof(T); ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  os.write(bytes.data(), bytes.size());
}

template <typename T>
T get_le(std::istream& is) {
  std::array<unsigned char, sizeof(T)> bytes;
  if (!is.read(reinterpret_cast<char*>(bytes.data()), bytes.size()))
    throw ParseError("unexpected end of binary data", 0, 0);
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(bytes[i]) << (8 * i);
  return v;
}

}  // namespace

void put_u32(std::ostream& os, std::uint32_t v) { put_le(os, v); }
void put_u64(std::ostream& os, std::uint64_t v) { put_le(os, v); }
void put_f64(std::ostream& os, double v) { put_le(os, std::bit_cast<std::uint64_t>(v)); }
void put_bytes(std::ostream& os, const std::string& bytes) { os.write(bytes.data(), static_cast<std::streamsize>(bytes.size())); }

std::uint32_t get_u32(std::istream& is) { return get_le<std::uint32_t>(is); }
std::uint64_t get_u64(std::istream& is) { return get_le<std::uint64_t>(is); }
double get_f64(std::istream& is) { return std::bit_cast<double>(get_le<std::uint64_t>(is)); }

std::string get_bytes(std::istream& is, std::size_t n) {
  std::string out(n, '\0');
  if (n > 0 && !is.read(out.data(), static_cast<std::streamsize>(n)))
    throw ParseError("unexpected end of binary data", 0, 0);
  return out;
}

void write_container(std::ostream& os, const Sections& sections) {
  os.write(kMagic, 8);
  put_u32(os, static_cast<std::uint32_t>(sections.size()));
  for (const auto& [tag, payload] : sections) {
    if (tag.size() != 4) throw InvalidArgument("section tags are four characters");
    os.write(tag.data(), 4);
    put_u64(os, payload.size());
    put_bytes(os, payload);
  }
}

Sections read_container(std::istream& is) {
  if (get_bytes(is, 8) != std::string(kMagic, 8)) throw ParseError("not a checkpoint container", 0, 0);
  Sections sections;
  const std::uint32_t count = get_u32(is);
  for (std::uint32_t i = 0; i < count; ++i) {
    std::string tag = get_bytes(is, 4);
    const std::uint64_t length = get_u64(is);
    sections[tag] = get_bytes(is, length);
  }
  return sections;
}

void save_container(const std::string& path, const Sections& sections) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write " + path);
  write_container(out, sections);
}

Sections load_container(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot read " + path);
  return read_container(in);
}

}  // namespace hra::bin
