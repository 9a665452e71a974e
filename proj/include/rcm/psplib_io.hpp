#pragma once

// Readers for ProGen/max `.sch` files and the native `.rcm.json` format, and
// a writer for the native format.

#include <cctype>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "rcm/model.hpp"

namespace rcm {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

namespace detail {

struct SchLine {
  std::size_t number;
  std::vector<std::string> tokens;            // plain tokens
  std::vector<std::vector<std::string>> brackets;  // contents of [..] groups, in order
};

inline SchLine tokenize_sch_line(std::string_view text, std::size_t number) {
  SchLine out{number, {}, {}};
  std::size_t i = 0;
  auto is_space = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
  while (i < text.size()) {
    if (is_space(text[i])) {
      ++i;
      continue;
    }
    if (text[i] == '[') {
      const auto close = text.find(']', i);
      if (close == std::string_view::npos) throw ParseError(number, "unterminated '[' weight group");
      std::vector<std::string> inner;
      std::string cur;
      for (std::size_t k = i + 1; k < close; ++k) {
        const char c = text[k];
        if (is_space(c) || c == ',') {
          if (!cur.empty()) inner.push_back(std::move(cur)), cur.clear();
        } else {
          cur.push_back(c);
        }
      }
      if (!cur.empty()) inner.push_back(std::move(cur));
      out.brackets.push_back(std::move(inner));
      i = close + 1;
      continue;
    }
    if (!out.brackets.empty()) throw ParseError(number, "plain token after weight groups");
    std::size_t j = i;
    while (j < text.size() && !is_space(text[j]) && text[j] != '[') ++j;
    out.tokens.emplace_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

inline std::int64_t parse_int(std::string_view tok, std::size_t line) {
  std::int64_t v = 0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec == std::errc::result_out_of_range) throw ParseError(line, "integer out of 64-bit range: '" + std::string(tok) + "'");
  if (ec != std::errc() || ptr != last || first == last)
    throw ParseError(line, "non-integer token '" + std::string(tok) + "'");
  return v;
}

}  // namespace detail

/// Parses a single-mode ProGen/max `.sch` file. Activities keep the file's
/// numbering, including the dummy source 0 and sink n+1. The horizon is left
/// unset.
inline Instance parse_psplib(std::istream& in) {
  using detail::parse_int;
  std::vector<detail::SchLine> lines;
  std::string raw;
  std::size_t number = 0;
  while (std::getline(in, raw)) {
    ++number;
    auto l = detail::tokenize_sch_line(raw, number);
    if (!l.tokens.empty() || !l.brackets.empty()) lines.push_back(std::move(l));
  }
  std::size_t cur = 0;
  auto next = [&](const char* section) -> const detail::SchLine& {
    if (cur >= lines.size()) throw ParseError(number, std::string("truncated ") + section + " section");
    return lines[cur++];
  };

  const auto& header = next("header");
  if (header.tokens.size() < 2 || !header.brackets.empty())
    throw ParseError(header.number, "malformed header: expected activity and resource counts");
  const auto real = parse_int(header.tokens[0], header.number);
  const auto resources = parse_int(header.tokens[1], header.number);
  if (real < 0 || resources < 0) throw ParseError(header.number, "malformed header: negative count");
  for (std::size_t k = 2; k < header.tokens.size(); ++k)
    if (parse_int(header.tokens[k], header.number) != 0)
      throw ParseError(header.number, "unsupported non-renewable or doubly constrained resources in header");

  Instance inst;
  inst.n = static_cast<std::size_t>(real) + 2;
  const auto m = static_cast<std::size_t>(resources);
  inst.durations.assign(inst.n, 0);
  inst.demands.assign(inst.n, std::vector<Value>(m, 0));

  std::vector<bool> seen(inst.n, false);
  for (std::size_t a = 0; a < inst.n; ++a) {
    const auto& l = next("precedence");
    if (l.tokens.size() < 3) throw ParseError(l.number, "malformed activity line: expected id, mode count, successor count");
    const auto id = parse_int(l.tokens[0], l.number);
    if (id < 0 || static_cast<std::size_t>(id) >= inst.n) throw ParseError(l.number, "activity id out of range");
    if (seen[static_cast<std::size_t>(id)]) throw ParseError(l.number, "duplicate activity id " + std::to_string(id));
    seen[static_cast<std::size_t>(id)] = true;
    if (parse_int(l.tokens[1], l.number) != 1) throw ParseError(l.number, "only single-mode activities are supported");
    const auto count = parse_int(l.tokens[2], l.number);
    if (count < 0 || l.tokens.size() != 3 + static_cast<std::size_t>(count))
      throw ParseError(l.number, "successor count does not match successor list");
    if (l.brackets.size() != static_cast<std::size_t>(count))
      throw ParseError(l.number, "weight-count mismatch: " + std::to_string(l.brackets.size()) + " groups for " +
                                     std::to_string(count) + " successors");
    for (std::size_t s = 0; s < static_cast<std::size_t>(count); ++s) {
      const auto succ = parse_int(l.tokens[3 + s], l.number);
      if (succ < 0 || static_cast<std::size_t>(succ) >= inst.n) throw ParseError(l.number, "successor id out of range");
      if (l.brackets[s].size() != 1)
        throw ParseError(l.number, "weight group must hold exactly one value (multi-mode files are not supported)");
      inst.precedences.push_back(
          {static_cast<std::size_t>(id), static_cast<std::size_t>(succ), parse_int(l.brackets[s][0], l.number)});
    }
  }

  std::fill(seen.begin(), seen.end(), false);
  for (std::size_t a = 0; a < inst.n; ++a) {
    const auto& l = next("duration/demand");
    if (!l.brackets.empty() || l.tokens.size() != 3 + m)
      throw ParseError(l.number, "malformed duration/demand line: expected id, mode, duration and " + std::to_string(m) +
                                     " demands");
    const auto id = parse_int(l.tokens[0], l.number);
    if (id < 0 || static_cast<std::size_t>(id) >= inst.n) throw ParseError(l.number, "activity id out of range");
    if (seen[static_cast<std::size_t>(id)]) throw ParseError(l.number, "duplicate activity id " + std::to_string(id));
    seen[static_cast<std::size_t>(id)] = true;
    const auto i = static_cast<std::size_t>(id);
    inst.durations[i] = parse_int(l.tokens[2], l.number);
    for (std::size_t k = 0; k < m; ++k) inst.demands[i][k] = parse_int(l.tokens[3 + k], l.number);
  }

  const auto& caps = next("capacity");
  if (!caps.brackets.empty() || caps.tokens.size() != m)
    throw ParseError(caps.number, "capacity row must list " + std::to_string(m) + " capacities");
  for (const auto& tok : caps.tokens) inst.capacities.push_back(parse_int(tok, caps.number));
  return inst;
}

inline Instance parse_psplib(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_psplib(in);
}

/// Native document: {"n", "durations", "demands", "capacities",
/// "precedences": [[i, j, d], ...], "horizon"?}.
inline Instance parse_native(std::string_view text) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(0, std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError(0, "document must be an object");

  auto field = [&](const char* name) -> const json& {
    if (!doc.contains(name)) throw ParseError(0, std::string(name) + ": missing field");
    return doc.at(name);
  };
  auto integer = [](const json& v, const std::string& path) -> Value {
    if (!v.is_number_integer()) throw ParseError(0, path + ": expected integer");
    return v.get<Value>();
  };
  auto int_array = [&](const json& v, const std::string& path) {
    if (!v.is_array()) throw ParseError(0, path + ": expected array");
    std::vector<Value> out;
    for (std::size_t k = 0; k < v.size(); ++k) out.push_back(integer(v[k], path + "[" + std::to_string(k) + "]"));
    return out;
  };

  Instance inst;
  const Value n = integer(field("n"), "n");
  if (n < 0) throw ParseError(0, "n: must be non-negative");
  inst.n = static_cast<std::size_t>(n);
  inst.durations = int_array(field("durations"), "durations");
  if (inst.durations.size() != inst.n) throw ParseError(0, "durations: expected " + std::to_string(n) + " entries");
  inst.capacities = int_array(field("capacities"), "capacities");
  const json& demands = field("demands");
  if (!demands.is_array() || demands.size() != inst.n)
    throw ParseError(0, "demands: expected array of " + std::to_string(n) + " rows");
  for (std::size_t i = 0; i < inst.n; ++i) {
    const std::string path = "demands[" + std::to_string(i) + "]";
    inst.demands.push_back(int_array(demands[i], path));
    if (inst.demands.back().size() != inst.capacities.size())
      throw ParseError(0, path + ": expected " + std::to_string(inst.capacities.size()) + " entries");
  }
  const json& precs = field("precedences");
  if (!precs.is_array()) throw ParseError(0, "precedences: expected array");
  for (std::size_t k = 0; k < precs.size(); ++k) {
    const std::string path = "precedences[" + std::to_string(k) + "]";
    const auto triple = int_array(precs[k], path);
    if (triple.size() != 3) throw ParseError(0, path + ": expected [i, j, d]");
    if (triple[0] < 0 || triple[1] < 0) throw ParseError(0, path + ": negative activity index");
    inst.precedences.push_back({static_cast<std::size_t>(triple[0]), static_cast<std::size_t>(triple[1]), triple[2]});
  }
  if (doc.contains("horizon") && !doc.at("horizon").is_null()) inst.horizon = integer(doc.at("horizon"), "horizon");
  return inst;
}

inline std::string write_native(const Instance& inst) {
  using nlohmann::json;
  json doc;
  doc["n"] = inst.n;
  doc["durations"] = inst.durations;
  doc["demands"] = inst.demands;
  doc["capacities"] = inst.capacities;
  json precs = json::array();
  for (const auto& p : inst.precedences) precs.push_back({p.from, p.to, p.lag});
  doc["precedences"] = precs;
  if (inst.horizon) doc["horizon"] = *inst.horizon;
  return doc.dump(2) + "\n";
}

enum class InstanceFormat { Auto, Psplib, Native };

inline InstanceFormat detect_format(const std::filesystem::path& path) {
  const std::string name = path.filename().string();
  if (name.size() >= 5 && name.ends_with(".json")) return InstanceFormat::Native;
  return InstanceFormat::Psplib;
}

/// Reads and validates an instance file; validation failures are raised as
/// ParseError listing every violation.
inline Instance load_instance(const std::filesystem::path& path, InstanceFormat format = InstanceFormat::Auto) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(0, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (format == InstanceFormat::Auto) format = detect_format(path);
  Instance inst = format == InstanceFormat::Native ? parse_native(buf.str()) : parse_psplib(buf.str());
  if (auto v = validate(inst); !v.empty()) {
    std::string msg = "invalid instance:";
    for (const auto& x : v) msg += "\n  " + x.message;
    throw ParseError(0, msg);
  }
  return inst;
}

/// Instance key used by bounds files: the filename without `.rcm.json`,
/// `.json` or `.sch`.
inline std::string instance_stem(const std::filesystem::path& path) {
  std::string name = path.filename().string();
  for (std::string_view ext : {".rcm.json", ".json", ".sch", ".SCH"})
    if (name.size() > ext.size() && name.ends_with(ext)) return name.substr(0, name.size() - ext.size());
  return path.stem().string();
}

}  // namespace rcm
