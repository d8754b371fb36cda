#pragma once

// JSON/CSV emission and config hashing. Infinite values serialize as the
// string "inf" (JSON has no inf literal); CSV uses '.' decimals, 17
// significant digits, and LF line endings so doubles round-trip losslessly
// and reruns are byte-identical.

#include <Eigen/Dense>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "otdebias/extreal.hpp"
#include "otdebias/measures.hpp"

namespace otd {

using nlohmann::json;

// Locale-independent formatting with 17 significant digits.
inline std::string format_double(double v) {
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

inline json json_number(double v) {
  if (v == kInf) return json("inf");
  if (v == -kInf) return json("-inf");
  return json(v);
}

inline double number_from_json(const json& j, const char* what) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string& s = j.get_ref<const std::string&>();
    if (s == "inf" || s == "+inf") return kInf;
    if (s == "-inf") return -kInf;
  }
  throw std::invalid_argument(std::string(what) + ": expected a number or \"inf\"");
}

inline json to_json(const VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(json_number(v[i]));
  return a;
}

inline json to_json(const MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(json_number(m(i, j)));
    rows.push_back(std::move(row));
  }
  return json{{"shape", {m.rows(), m.cols()}}, {"data", std::move(rows)}};
}

inline VectorXd vector_from_json(const json& j, const char* what) {
  if (!j.is_array()) throw std::invalid_argument(std::string(what) + ": expected an array");
  VectorXd v(static_cast<Eigen::Index>(j.size()));
  Eigen::Index i = 0;
  for (const auto& x : j) v[i++] = number_from_json(x, what);
  return v;
}

inline MatrixXd matrix_from_json(const json& j, const char* what) {
  const json& rows = j.is_object() ? j.at("data") : j;
  if (!rows.is_array() || rows.empty() || !rows.front().is_array())
    throw std::invalid_argument(std::string(what) + ": expected an array of rows");
  Eigen::Index nr = static_cast<Eigen::Index>(rows.size());
  Eigen::Index nc = static_cast<Eigen::Index>(rows.front().size());
  MatrixXd m(nr, nc);
  for (Eigen::Index i = 0; i < nr; ++i) {
    const json& row = rows[static_cast<std::size_t>(i)];
    if (static_cast<Eigen::Index>(row.size()) != nc)
      throw std::invalid_argument(std::string(what) + ": ragged rows");
    for (Eigen::Index c = 0; c < nc; ++c)
      m(i, c) = number_from_json(row[static_cast<std::size_t>(c)], what);
  }
  return m;
}

// FNV-1a over the canonical (sorted-key) JSON dump; stable across runs.
inline std::uint64_t config_hash(const json& config) {
  std::string dump = config.dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : dump) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string hash_hex(std::uint64_t h) {
  char buf[17];
  static const char* digits = "0123456789abcdef";
  for (int i = 15; i >= 0; --i) {
    buf[i] = digits[h & 0xf];
    h >>= 4;
  }
  return std::string(buf, 16);
}

inline std::string csv_line(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += fields[i];
  }
  out += '\n';
  return out;
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  f << content;
  if (!f) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace otd
