#pragma once

// Line-oriented system description (.cfg). Grammar in docs/formats.md.
//
//   [vertices]
//   <id> : <lo_1> ... <lo_d> : <hi_1> ... <hi_d>
//   [edges]
//   <id> <source> <range> : <row_1> ; ... ; <row_d> : <offset_1> ... <offset_d>
//   [params]
//   <key> = <value>

#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mwkit/error.hpp"
#include "mwkit/expression.hpp"
#include "mwkit/mw_graph.hpp"

namespace mwkit {

struct SystemConfig {
  RawSystem raw;
  std::map<std::string, std::string> params;
  std::string text;

  std::optional<std::string> param(const std::string& key) const {
    auto it = params.find(key);
    if (it == params.end()) return std::nullopt;
    return it->second;
  }
  std::optional<double> number(const std::string& key) const {
    auto v = param(key);
    if (!v) return std::nullopt;
    return parse_number(*v);
  }
};

namespace detail {

inline std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

inline std::vector<std::string> split_on(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

inline std::vector<double> numbers(const std::string& field) {
  std::vector<double> out;
  for (const auto& tok : split_ws(field)) out.push_back(parse_number(tok));
  return out;
}

inline int parse_id(const std::string& tok, const std::string& what) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(tok, &used);
    if (used == tok.size()) return v;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::ParseError, "bad " + what + " '" + tok + "'");
}

}  // namespace detail

inline SystemConfig parse_config(const std::string& text, const std::string& origin = "<config>") {
  SystemConfig cfg;
  cfg.text = text;
  std::vector<Issue> issues;
  std::string section;
  std::istringstream in(text);
  std::string raw_line;
  int line_no = 0;
  while (std::getline(in, raw_line)) {
    ++line_no;
    const std::string where = origin + ":" + std::to_string(line_no);
    std::string line = raw_line.substr(0, raw_line.find('#'));
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        issues.push_back({ErrorCode::ParseError, where, "unterminated section header"});
        continue;
      }
      section = line.substr(1, line.size() - 2);
      if (section != "vertices" && section != "edges" && section != "params") {
        issues.push_back({ErrorCode::ParseError, where, "unknown section [" + section + "]"});
      }
      continue;
    }
    try {
      if (section == "vertices") {
        const auto fields = detail::split_on(line, ':');
        if (fields.size() != 3) throw Error(ErrorCode::ParseError, "expected '<id> : <lo...> : <hi...>'");
        const int id = detail::parse_id(detail::trim(fields[0]), "vertex id");
        try {
          const auto lo = detail::numbers(fields[1]);
          const auto hi = detail::numbers(fields[2]);
          if (cfg.raw.ambient.count(id)) throw Error(ErrorCode::DuplicateId, "vertex " + std::to_string(id));
          cfg.raw.ambient.emplace(id, Box::from_bounds(lo, hi));
          cfg.raw.graph.vertices.push_back(id);
        } catch (const Error& e) {
          if (e.code() == ErrorCode::DuplicateId) throw;
          throw Error(ErrorCode::ParseError, "vertex " + std::to_string(id) + ": " + e.message());
        }
      } else if (section == "edges") {
        const auto fields = detail::split_on(line, ':');
        const auto head = detail::split_ws(fields[0]);
        if (head.size() != 3) throw Error(ErrorCode::ParseError, "expected '<id> <source> <range> : ...'");
        const int id = detail::parse_id(head[0], "edge id");
        try {
          if (fields.size() != 3) throw Error(ErrorCode::ParseError, "expected ': <matrix rows> : <offset>'");
          RawEdge edge{id, detail::parse_id(head[1], "source vertex"), detail::parse_id(head[2], "range vertex")};
          RawEdgeMap map{id, {}, detail::numbers(fields[2])};
          const auto rows = detail::split_on(fields[1], ';');
          for (std::size_t r = 0; r < rows.size(); ++r) {
            auto row = detail::numbers(rows[r]);
            if (row.size() != map.offset.size()) {
              throw Error(ErrorCode::ParseError, "matrix row " + std::to_string(r + 1) + " has " +
                                                     std::to_string(row.size()) + " entries, expected " +
                                                     std::to_string(map.offset.size()));
            }
            map.rows.push_back(std::move(row));
          }
          if (map.rows.size() != map.offset.size()) {
            throw Error(ErrorCode::ParseError, "matrix has " + std::to_string(map.rows.size()) + " rows, expected " +
                                                   std::to_string(map.offset.size()));
          }
          cfg.raw.graph.edges.push_back(edge);
          cfg.raw.maps.push_back(std::move(map));
        } catch (const Error& e) {
          throw Error(ErrorCode::ParseError, "edge " + std::to_string(id) + ": " + e.message());
        }
      } else if (section == "params") {
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw Error(ErrorCode::ParseError, "expected '<key> = <value>'");
        cfg.params[detail::trim(line.substr(0, eq))] = detail::trim(line.substr(eq + 1));
      } else {
        throw Error(ErrorCode::ParseError, "content outside a section");
      }
    } catch (const Error& e) {
      issues.push_back({e.code(), where, e.message()});
    }
  }
  if (!issues.empty()) throw Error(std::move(issues));
  return cfg;
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline SystemConfig load_config(const std::string& path) { return parse_config(read_text_file(path), path); }

inline MWGraph build_system(const SystemConfig& cfg) { return validate_mw(cfg.raw); }

}  // namespace mwkit
