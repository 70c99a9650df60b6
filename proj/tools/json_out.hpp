#pragma once

// JSON text with every real printed to 17 significant digits and non-finite
// reals as null. Arrays of scalars stay on one line.

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <string>

namespace dnet::cli {

using json = nlohmann::ordered_json;

inline void dump_json(const json& j, std::string& out, int indent, int depth) {
  const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  const std::string close(static_cast<std::size_t>(indent * depth), ' ');
  const char* nl = indent > 0 ? "\n" : "";
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{";
      out += nl;
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) {
          out += ",";
          out += nl;
        }
        first = false;
        out += pad + json(it.key()).dump() + (indent > 0 ? ": " : ":");
        dump_json(it.value(), out, indent, depth + 1);
      }
      out += nl + close + "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      const bool flat = std::none_of(j.begin(), j.end(), [](const json& e) { return e.is_structured(); });
      if (flat) {
        out += "[";
        for (std::size_t k = 0; k < j.size(); ++k) {
          if (k > 0) out += ", ";
          dump_json(j[k], out, indent, depth + 1);
        }
        out += "]";
        return;
      }
      out += "[";
      out += nl;
      for (std::size_t k = 0; k < j.size(); ++k) {
        if (k > 0) {
          out += ",";
          out += nl;
        }
        out += pad;
        dump_json(j[k], out, indent, depth + 1);
      }
      out += nl + close + "]";
      return;
    }
    case json::value_t::number_float: {
      const double v = j.get<double>();
      out += std::isfinite(v) ? fmt::format("{:.17g}", v) : "null";
      return;
    }
    default:
      out += j.dump();
  }
}

inline std::string dump_json(const json& j, int indent = 2) {
  std::string out;
  dump_json(j, out, indent, 0);
  return out;
}

}  // namespace dnet::cli
