#pragma once

#include <cmath>
#include <cstdio>
#include <string>

#include "json.hpp"
#include "texinv/error.hpp"

namespace texinv {

using Json = nlohmann::json;

namespace detail {

inline void write_json(const Json& j, std::string& out) {
  switch (j.type()) {
    case Json::value_t::object: {
      out.push_back('{');
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out.push_back(',');
        first = false;
        out += Json(it.key()).dump();
        out.push_back(':');
        write_json(it.value(), out);
      }
      out.push_back('}');
      break;
    }
    case Json::value_t::array: {
      out.push_back('[');
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out.push_back(',');
        write_json(j[i], out);
      }
      out.push_back(']');
      break;
    }
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "non-finite number in record");
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out += buf;
      break;
    }
    default:
      out += j.dump();
  }
}

}  // namespace detail

/// Compact single-line JSON; floats always printed with 17 significant
/// digits so every double reads back bit-exact. Keys are sorted.
inline std::string dump_record(const Json& j) {
  std::string out;
  detail::write_json(j, out);
  return out;
}

/// Parses one record; malformed or truncated text is CorruptRecord.
inline Json parse_record(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::CorruptRecord, e.what());
  }
}

}  // namespace texinv
