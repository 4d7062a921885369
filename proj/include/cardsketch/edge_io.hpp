#pragma once

// Edge files: one `user<TAB>item` line per arrival, UTF-8, optionally
// gzip-compressed (picked by the .gz extension). Names are interned to dense
// ids on read so the harness can replay the stream cheaply.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <zlib.h>

#include "cardsketch/stream_gen.hpp"

namespace cardsketch {

struct InternedStream {
  std::vector<Edge> edges;              // (user id, item id) per arrival
  std::vector<std::string> user_names;  // id -> name
  std::vector<std::string> item_names;  // id -> name
};

namespace detail {

inline bool has_gz_suffix(std::string_view path) {
  return path.size() > 3 && path.substr(path.size() - 3) == ".gz";
}

inline std::uint64_t intern(std::unordered_map<std::string, std::uint64_t>& ids,
                            std::vector<std::string>& names, std::string&& name) {
  const auto [it, inserted] = ids.try_emplace(std::move(name), names.size());
  if (inserted) names.push_back(it->first);
  return it->second;
}

inline void parse_edge_line(std::string_view line, std::size_t lineno, InternedStream& out,
                            std::unordered_map<std::string, std::uint64_t>& user_ids,
                            std::unordered_map<std::string, std::uint64_t>& item_ids) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  if (line.empty()) return;
  const std::size_t tab = line.find('\t');
  if (tab == std::string_view::npos || tab == 0 || tab + 1 == line.size()) {
    throw std::invalid_argument("edge file: malformed line " + std::to_string(lineno) +
                                " (expected user<TAB>item)");
  }
  const std::uint64_t u = intern(user_ids, out.user_names, std::string(line.substr(0, tab)));
  const std::uint64_t i = intern(item_ids, out.item_names, std::string(line.substr(tab + 1)));
  out.edges.push_back({u, i});
}

}  // namespace detail

inline InternedStream read_edge_file(const std::string& path) {
  InternedStream out;
  std::unordered_map<std::string, std::uint64_t> user_ids, item_ids;
  std::size_t lineno = 0;

  if (detail::has_gz_suffix(path)) {
    gzFile gz = gzopen(path.c_str(), "rb");
    if (!gz) throw std::runtime_error("edge file: cannot open " + path);
    std::string line;
    char buf[1 << 16];
    for (;;) {
      const int got = gzread(gz, buf, sizeof(buf));
      if (got < 0) {
        gzclose(gz);
        throw std::runtime_error("edge file: gzip read error in " + path);
      }
      for (int i = 0; i < got; ++i) {
        if (buf[i] == '\n') {
          detail::parse_edge_line(line, ++lineno, out, user_ids, item_ids);
          line.clear();
        } else {
          line.push_back(buf[i]);
        }
      }
      if (got == 0) break;
    }
    if (!line.empty()) detail::parse_edge_line(line, ++lineno, out, user_ids, item_ids);
    gzclose(gz);
  } else {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("edge file: cannot open " + path);
    std::string line;
    while (std::getline(in, line)) {
      detail::parse_edge_line(line, ++lineno, out, user_ids, item_ids);
    }
  }
  return out;
}

inline void write_edge_file(const std::string& path, const InternedStream& stream) {
  auto line_of = [&](const Edge& e) {
    std::string line = stream.user_names[e.user];
    line.push_back('\t');
    line += stream.item_names[e.item];
    line.push_back('\n');
    return line;
  };
  if (detail::has_gz_suffix(path)) {
    gzFile gz = gzopen(path.c_str(), "wb");
    if (!gz) throw std::runtime_error("edge file: cannot open " + path + " for writing");
    for (const Edge& e : stream.edges) {
      const std::string line = line_of(e);
      if (gzwrite(gz, line.data(), static_cast<unsigned>(line.size())) == 0) {
        gzclose(gz);
        throw std::runtime_error("edge file: gzip write error in " + path);
      }
    }
    gzclose(gz);
  } else {
    std::ofstream outf(path, std::ios::binary);
    if (!outf) throw std::runtime_error("edge file: cannot open " + path + " for writing");
    for (const Edge& e : stream.edges) outf << line_of(e);
  }
}

// Attaches synthetic names (u<id>, i<id>) to a generated arrival sequence.
inline InternedStream intern_generated(std::vector<Edge> edges, std::uint64_t users) {
  InternedStream out;
  std::uint64_t max_item = 0;
  for (const Edge& e : edges) max_item = std::max(max_item, e.item);
  out.user_names.reserve(users);
  for (std::uint64_t u = 0; u < users; ++u) out.user_names.push_back("u" + std::to_string(u));
  if (!edges.empty()) {
    out.item_names.reserve(max_item + 1);
    for (std::uint64_t i = 0; i <= max_item; ++i) out.item_names.push_back("i" + std::to_string(i));
  }
  out.edges = std::move(edges);
  return out;
}

}  // namespace cardsketch
