#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "oceancast/common.hpp"

// Little-endian binary readers/writers for the self-describing file formats
// (OMSH meshes, OGF1 fields, OGRF graphs, OCKP checkpoints).

namespace ocean::binio {

static_assert(std::endian::native == std::endian::little,
              "file formats are little-endian; big-endian hosts unsupported");

class Writer {
 public:
  explicit Writer(const std::string& path) : out_(path, std::ios::binary) {
    if (!out_) throw DataError("cannot open file for writing: " + path);
    path_ = path;
  }

  void magic(const char tag[4]) { out_.write(tag, 4); }
  void u16(std::uint16_t v) { raw(&v, sizeof v); }
  void u32(std::uint32_t v) { raw(&v, sizeof v); }
  void u64(std::uint64_t v) { raw(&v, sizeof v); }
  void i64(std::int64_t v) { raw(&v, sizeof v); }
  void f32(float v) { raw(&v, sizeof v); }
  void f64(double v) { raw(&v, sizeof v); }

  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    raw(s.data(), s.size());
  }

  template <class T>
  void span(const T* data, std::size_t n) {
    raw(data, n * sizeof(T));
  }
  template <class T>
  void vec(const std::vector<T>& v) {
    span(v.data(), v.size());
  }

  void close() {
    out_.close();
    if (!out_) throw DataError("write failed: " + path_);
  }

 private:
  void raw(const void* p, std::size_t n) {
    out_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
  }
  std::ofstream out_;
  std::string path_;
};

class Reader {
 public:
  explicit Reader(const std::string& path) : in_(path, std::ios::binary), path_(path) {
    if (!in_) throw DataError("cannot open file: " + path);
  }

  void expect_magic(const char tag[4]) {
    char buf[4];
    raw(buf, 4);
    if (std::memcmp(buf, tag, 4) != 0)
      throw DataError(path_ + ": bad magic, expected " + std::string(tag, 4));
  }

  std::uint16_t u16() { return get<std::uint16_t>(); }
  std::uint32_t u32() { return get<std::uint32_t>(); }
  std::uint64_t u64() { return get<std::uint64_t>(); }
  std::int64_t i64() { return get<std::int64_t>(); }
  float f32() { return get<float>(); }
  double f64() { return get<double>(); }

  std::string str() {
    auto n = u32();
    std::string s(n, '\0');
    raw(s.data(), n);
    return s;
  }

  template <class T>
  void span(T* data, std::size_t n) {
    raw(data, n * sizeof(T));
  }
  template <class T>
  std::vector<T> vec(std::size_t n) {
    std::vector<T> v(n);
    span(v.data(), n);
    return v;
  }

  const std::string& path() const { return path_; }

 private:
  template <class T>
  T get() {
    T v;
    raw(&v, sizeof v);
    return v;
  }
  void raw(void* p, std::size_t n) {
    in_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (!in_) throw DataError(path_ + ": truncated file");
  }
  std::ifstream in_;
  std::string path_;
};

// FNV-1a, used for input digests in run manifests.
inline std::uint64_t fnv1a(const void* data, std::size_t n,
                           std::uint64_t seed = 0xcbf29ce484222325ull) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::uint64_t fnv1a(const std::string& s, std::uint64_t seed = 0xcbf29ce484222325ull) {
  return fnv1a(s.data(), s.size(), seed);
}

std::uint64_t file_digest(const std::string& path);

}  // namespace ocean::binio
