#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "romshm/common.hpp"

namespace romshm::io {

// Versioned binary container for named float64/int64 tensors and UTF-8 blobs.
//
// Layout (all integers little-endian):
//   bytes 0..7   magic "RSHMBIN\x01" (the last byte is the format version)
//   bytes 8..15  endian sentinel u64 = 0x0102030405060708
//   bytes 16..23 entry count u64
//   per entry:
//     u64 name length, name bytes
//     u8  kind (0 = f64 tensor, 1 = i64 tensor, 2 = utf-8 blob)
//     u64 ndim, u64 dims[ndim]        (blobs: ndim = 1, dims[0] = byte count)
//     payload (f64/i64 raw IEEE-754 / two's complement, column-major)
//
// Entries are written in insertion order so files are byte-identical for
// identical content.

constexpr char kMagic[8] = {'R', 'S', 'H', 'M', 'B', 'I', 'N', '\x01'};
constexpr std::uint64_t kEndianSentinel = 0x0102030405060708ULL;

class Archive {
 public:
  void put_matrix(const std::string& name, const Mat& m) {
    Entry e;
    e.kind = 0;
    e.dims = {static_cast<std::uint64_t>(m.rows()), static_cast<std::uint64_t>(m.cols())};
    e.f64.assign(m.data(), m.data() + m.size());
    insert(name, std::move(e));
  }

  void put_vector(const std::string& name, const Vec& v) {
    Entry e;
    e.kind = 0;
    e.dims = {static_cast<std::uint64_t>(v.size())};
    e.f64.assign(v.data(), v.data() + v.size());
    insert(name, std::move(e));
  }

  void put_scalar(const std::string& name, double x) {
    Entry e;
    e.kind = 0;
    e.dims = {1};
    e.f64 = {x};
    insert(name, std::move(e));
  }

  void put_indices(const std::string& name, const std::vector<std::int64_t>& v) {
    Entry e;
    e.kind = 1;
    e.dims = {static_cast<std::uint64_t>(v.size())};
    e.i64 = v;
    insert(name, std::move(e));
  }

  void put_blob(const std::string& name, const std::string& text) {
    Entry e;
    e.kind = 2;
    e.dims = {static_cast<std::uint64_t>(text.size())};
    e.blob = text;
    insert(name, std::move(e));
  }

  bool has(const std::string& name) const { return index_.count(name) > 0; }

  Mat get_matrix(const std::string& name) const {
    const Entry& e = at(name, 0);
    if (e.dims.size() != 2) throw ConfigError("container entry '" + name + "' is not a matrix");
    Mat m(static_cast<Eigen::Index>(e.dims[0]), static_cast<Eigen::Index>(e.dims[1]));
    std::memcpy(m.data(), e.f64.data(), e.f64.size() * sizeof(double));
    return m;
  }

  Vec get_vector(const std::string& name) const {
    const Entry& e = at(name, 0);
    Vec v(static_cast<Eigen::Index>(e.f64.size()));
    std::memcpy(v.data(), e.f64.data(), e.f64.size() * sizeof(double));
    return v;
  }

  double get_scalar(const std::string& name) const {
    const Entry& e = at(name, 0);
    if (e.f64.size() != 1) throw ConfigError("container entry '" + name + "' is not a scalar");
    return e.f64[0];
  }

  std::vector<std::int64_t> get_indices(const std::string& name) const {
    return at(name, 1).i64;
  }

  std::string get_blob(const std::string& name) const { return at(name, 2).blob; }

  void save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open '" + path + "' for writing");
    out.write(kMagic, 8);
    write_u64(out, kEndianSentinel);
    write_u64(out, order_.size());
    for (const auto& name : order_) {
      const Entry& e = entries_.at(name);
      write_u64(out, name.size());
      out.write(name.data(), static_cast<std::streamsize>(name.size()));
      const std::uint8_t kind = e.kind;
      out.write(reinterpret_cast<const char*>(&kind), 1);
      write_u64(out, e.dims.size());
      for (auto d : e.dims) write_u64(out, d);
      switch (e.kind) {
        case 0:
          out.write(reinterpret_cast<const char*>(e.f64.data()),
                    static_cast<std::streamsize>(e.f64.size() * sizeof(double)));
          break;
        case 1:
          out.write(reinterpret_cast<const char*>(e.i64.data()),
                    static_cast<std::streamsize>(e.i64.size() * sizeof(std::int64_t)));
          break;
        case 2:
          out.write(e.blob.data(), static_cast<std::streamsize>(e.blob.size()));
          break;
      }
    }
    if (!out) throw ConfigError("write failed for '" + path + "'");
  }

  static Archive load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kMagic, 8) != 0)
      throw ConfigError("'" + path + "' is not a romshm container (bad magic)");
    if (read_u64(in) != kEndianSentinel)
      throw ConfigError("'" + path + "' has mismatched endianness");
    const std::uint64_t count = read_u64(in);
    Archive a;
    for (std::uint64_t i = 0; i < count; ++i) {
      const std::uint64_t name_len = read_u64(in);
      std::string name(name_len, '\0');
      in.read(name.data(), static_cast<std::streamsize>(name_len));
      std::uint8_t kind = 0;
      in.read(reinterpret_cast<char*>(&kind), 1);
      Entry e;
      e.kind = kind;
      const std::uint64_t ndim = read_u64(in);
      e.dims.resize(ndim);
      std::uint64_t total = 1;
      for (auto& d : e.dims) {
        d = read_u64(in);
        total *= d;
      }
      switch (kind) {
        case 0:
          e.f64.resize(total);
          in.read(reinterpret_cast<char*>(e.f64.data()),
                  static_cast<std::streamsize>(total * sizeof(double)));
          break;
        case 1:
          e.i64.resize(total);
          in.read(reinterpret_cast<char*>(e.i64.data()),
                  static_cast<std::streamsize>(total * sizeof(std::int64_t)));
          break;
        case 2:
          e.blob.resize(total);
          in.read(e.blob.data(), static_cast<std::streamsize>(total));
          break;
        default:
          throw ConfigError("'" + path + "': unknown entry kind");
      }
      if (!in) throw ConfigError("'" + path + "': truncated container");
      a.insert(name, std::move(e));
    }
    return a;
  }

  const std::vector<std::string>& names() const { return order_; }

 private:
  struct Entry {
    std::uint8_t kind = 0;
    std::vector<std::uint64_t> dims;
    std::vector<double> f64;
    std::vector<std::int64_t> i64;
    std::string blob;
  };

  void insert(const std::string& name, Entry&& e) {
    if (!entries_.count(name)) order_.push_back(name);
    entries_[name] = std::move(e);
    index_[name] = 1;
  }

  const Entry& at(const std::string& name, std::uint8_t kind) const {
    auto it = entries_.find(name);
    if (it == entries_.end()) throw ConfigError("container entry '" + name + "' missing");
    if (it->second.kind != kind) throw ConfigError("container entry '" + name + "' has wrong kind");
    return it->second;
  }

  static void write_u64(std::ofstream& out, std::uint64_t v) {
    out.write(reinterpret_cast<const char*>(&v), 8);
  }
  static std::uint64_t read_u64(std::ifstream& in) {
    std::uint64_t v = 0;
    in.read(reinterpret_cast<char*>(&v), 8);
    return v;
  }

  std::map<std::string, Entry> entries_;
  std::map<std::string, int> index_;
  std::vector<std::string> order_;
};

}  // namespace romshm::io
