#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <istream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "mlqc/control.hpp"
#include "mlqc/result.hpp"

namespace mlqc {

using Json = nlohmann::ordered_json;

// 64-bit FNV-1a over a byte stream; used to fingerprint report inputs.
inline std::string fnv1a_hex(std::istream& in) {
  std::uint64_t hash = 1469598103934665603ULL;
  char buffer[4096];
  while (in.read(buffer, sizeof(buffer)) || in.gcount() > 0) {
    const std::streamsize got = in.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      hash ^= static_cast<unsigned char>(buffer[i]);
      hash *= 1099511628211ULL;
    }
    if (got < static_cast<std::streamsize>(sizeof(buffer))) break;
  }
  char out[17];
  std::snprintf(out, sizeof(out), "%016llx",
                static_cast<unsigned long long>(hash));
  return out;
}

inline std::string fnv1a_file_hex(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for digest: " + path);
  return fnv1a_hex(in);
}

namespace detail {

inline void dump_json_number(const Json& j, std::string& out) {
  if (j.is_number_float()) {
    const double v = j.get<double>();
    if (!std::isfinite(v))
      throw std::invalid_argument("report: non-finite number");
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    out += buf;
    return;
  }
  out += j.dump();
}

// Pretty printer with insertion-order keys and floats at 12 significant
// digits; everything else defers to the library.
inline void dump_json(const Json& j, std::string& out, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string pad_in(static_cast<std::size_t>(indent + 1) * 2, ' ');
  if (j.is_object()) {
    if (j.empty()) {
      out += "{}";
      return;
    }
    out += "{\n";
    bool first = true;
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (!first) out += ",\n";
      first = false;
      out += pad_in + Json(it.key()).dump() + ": ";
      dump_json(it.value(), out, indent + 1);
    }
    out += "\n" + pad + "}";
  } else if (j.is_array()) {
    if (j.empty()) {
      out += "[]";
      return;
    }
    out += "[\n";
    bool first = true;
    for (const auto& item : j) {
      if (!first) out += ",\n";
      first = false;
      out += pad_in;
      dump_json(item, out, indent + 1);
    }
    out += "\n" + pad + "]";
  } else if (j.is_number()) {
    dump_json_number(j, out);
  } else {
    out += j.dump();
  }
}

}  // namespace detail

inline std::string dump_report_json(const Json& j) {
  std::string out;
  detail::dump_json(j, out, 0);
  out += "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Serializers for the domain records carried inside a report.

inline Json to_json(const PValue& p) {
  Json j;
  j["value"] = p.value;
  j["source"] = p.source == PValueSource::analytic ? "analytic" : "permutation";
  if (p.permutation_count) j["permutations"] = *p.permutation_count;
  return j;
}

inline Json to_json(const TestResult& r) {
  Json j;
  j["test"] = r.test_name;
  j["statistic"] = r.statistic;
  if (r.p_value) j["p_value"] = to_json(*r.p_value);
  if (r.effect_size) j["effect_size"] = *r.effect_size;
  if (r.effect_label) j["effect_label"] = to_string(*r.effect_label);
  j["decision"] = to_string(r.decision);
  j["alpha_or_threshold"] = r.alpha_or_threshold;
  return j;
}

inline Json to_json(const ControlInterval& ci) {
  Json j;
  j["lower"] = ci.lower;
  j["upper"] = ci.upper;
  j["confidence"] = ci.confidence;
  j["method"] = to_string(ci.method);
  j["replicates"] = ci.replicate_count;
  return j;
}

// Reproducible run record: same command, inputs, and seed give a
// byte-identical file apart from the timestamp field.
class Report {
 public:
  Report(std::string command, std::uint64_t seed, double alpha)
      : command_(std::move(command)), seed_(seed), alpha_(alpha) {}

  void add_input(const std::string& path) {
    Json j;
    j["path"] = path;
    j["fnv1a"] = fnv1a_file_hex(path);
    inputs_.push_back(std::move(j));
  }

  void add_result(Json result) { results_.push_back(std::move(result)); }

  void set_elapsed_ms(double ms) { elapsed_ms_ = ms; }

  // True iff any result (at any nesting depth) decided "drift"; drives the
  // process exit code.
  bool any_drift() const {
    for (const auto& r : results_)
      if (subtree_has_drift(r)) return true;
    return false;
  }

  Json to_json() const {
    Json j;
    j["tool"] = "mlqc";
    j["version"] = kVersion;
    j["command"] = command_;
    j["seed"] = seed_;
    j["alpha"] = alpha_;
    j["inputs"] = inputs_;
    j["results"] = results_;
    j["elapsed_ms"] = elapsed_ms_;
    j["timestamp"] = now_iso8601();
    return j;
  }

  std::string serialize() const { return dump_report_json(to_json()); }

  void write(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write report: " + path);
    out << serialize();
  }

  static constexpr const char* kVersion = "0.1.0";

 private:
  static bool subtree_has_drift(const Json& j) {
    if (j.is_object()) {
      const auto it = j.find("decision");
      if (it != j.end() && it->is_string() && *it == "drift") return true;
      for (const auto& [key, value] : j.items()) {
        (void)key;
        if (subtree_has_drift(value)) return true;
      }
    } else if (j.is_array()) {
      for (const auto& item : j)
        if (subtree_has_drift(item)) return true;
    }
    return false;
  }

  static std::string now_iso8601() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm_utc{};
    gmtime_r(&t, &tm_utc);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
  }

  std::string command_;
  std::uint64_t seed_;
  double alpha_;
  Json inputs_ = Json::array();
  Json results_ = Json::array();
  double elapsed_ms_ = 0.0;
};

}  // namespace mlqc
