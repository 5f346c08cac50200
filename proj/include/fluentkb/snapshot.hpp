#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "fluentkb/error.hpp"
#include "fluentkb/hash.hpp"
#include "fluentkb/rdf_io.hpp"
#include "fluentkb/store.hpp"

// Snapshot files: the whole dataset as canonical N-Quads.
namespace fluentkb::snapshot {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Writes to a sibling temporary file, then renames it over path.
inline void write_file_atomic(const std::string& path, const std::string& content) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::io_error, "cannot write " + tmp);
    out << content;
    out.flush();
    if (!out) throw Error(ErrorCode::io_error, "write failed for " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::io_error, "cannot replace " + path);
  }
}

/// A missing file is an empty dataset; a corrupt one is an error.
inline Dataset load(const std::string& path) {
  if (!std::filesystem::exists(path)) return {};
  return rdf::load_snapshot(read_file(path));
}

inline void save(const Dataset& ds, const std::string& path) { write_file_atomic(path, ds.to_nquads()); }

inline std::string digest(const Dataset& ds) { return hex64(fnv1a64(ds.to_nquads())); }

}  // namespace fluentkb::snapshot
