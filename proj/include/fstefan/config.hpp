#pragma once

// Run configuration in a line-oriented key=value format.
//
//   # comment (also allowed after a value)
//   beta = 0.5
//   grading = graded:4        # uniform | graded | graded:<r>
//
// Unknown and duplicate keys are rejected. Required keys: beta, t_end, nx,
// nt, plus length, x0, bc_kind, bc_value unless mms_case is given, in which
// case the case fixes geometry, boundary and initial data and those keys must
// be absent. Defaults: x0 = 0, grading = uniform, t0_kind = zero,
// t0_value = 0, out_dir = out, snapshot_stride = 10, audits = all.

#include <algorithm>
#include <array>
#include <charconv>
#include <cstddef>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "fstefan/domain.hpp"

namespace fstefan {

/// Audit families that can be switched on and off.
enum class AuditKind { balance, d1, interior, dc, front, e2, monitors, classical };

inline constexpr std::array<std::pair<AuditKind, std::string_view>, 8> kAuditNames{{
    {AuditKind::balance, "balance"},
    {AuditKind::d1, "d1"},
    {AuditKind::interior, "interior"},
    {AuditKind::dc, "dc"},
    {AuditKind::front, "front"},
    {AuditKind::e2, "e2"},
    {AuditKind::monitors, "monitors"},
    {AuditKind::classical, "classical"},
}};

struct AuditSelection {
  std::array<bool, kAuditNames.size()> on{};

  static AuditSelection all() {
    AuditSelection s;
    s.on.fill(true);
    return s;
  }
  [[nodiscard]] bool enabled(AuditKind k) const { return on[static_cast<std::size_t>(k)]; }
  void set(AuditKind k, bool v) { on[static_cast<std::size_t>(k)] = v; }
  friend bool operator==(const AuditSelection&, const AuditSelection&) = default;
};

struct RunConfig {
  ModelParams model;
  std::string out_dir = "out";
  std::size_t snapshot_stride = 10;
  AuditSelection audits = AuditSelection::all();
  std::optional<std::string> mms_case;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Bad configuration text; key() is empty for syntax errors.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::invalid_argument(what), key_(std::move(key)) {}
  [[nodiscard]] const std::string& key() const { return key_; }

 private:
  std::string key_;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

inline double parse_real(const std::string& key, std::string_view v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) {
    throw ConfigError(key, key + ": expected a number, got '" + std::string(v) + "'");
  }
  return out;
}

inline std::size_t parse_count(const std::string& key, std::string_view v) {
  std::size_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) {
    throw ConfigError(key, key + ": expected a nonnegative integer, got '" + std::string(v) + "'");
  }
  return out;
}

inline Grading parse_grading(std::string_view v, double beta) {
  if (v == "uniform") return Grading::uniform();
  if (v == "graded") return Grading::graded_for(beta);
  if (v.starts_with("graded:")) return Grading::graded(parse_real("grading", v.substr(7)));
  throw ConfigError("grading", "grading must be uniform, graded or graded:<r>");
}

inline AuditSelection parse_audits(std::string_view v) {
  if (v == "all") return AuditSelection::all();
  AuditSelection s;
  if (v == "none") return s;
  std::size_t pos = 0;
  while (pos <= v.size()) {
    const auto comma = std::min(v.find(',', pos), v.size());
    const std::string_view name = trim(v.substr(pos, comma - pos));
    bool found = false;
    for (const auto& [kind, label] : kAuditNames) {
      if (label == name) {
        s.set(kind, true);
        found = true;
      }
    }
    if (!found) throw ConfigError("audits", "audits: unknown audit '" + std::string(name) + "'");
    pos = comma + 1;
  }
  return s;
}

inline std::string real_text(double v) {
  std::array<char, 32> buf{};
  std::snprintf(buf.data(), buf.size(), "%.17g", v);
  return buf.data();
}

}  // namespace detail

inline RunConfig parse_config(std::string_view text) {
  std::map<std::string, std::string, std::less<>> kv;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto eol = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("", "line " + std::to_string(line_no) + ": expected key=value");
    }
    std::string key(detail::trim(line.substr(0, eq)));
    std::string value(detail::trim(line.substr(eq + 1)));
    if (key.empty()) throw ConfigError("", "line " + std::to_string(line_no) + ": empty key");
    if (value.empty()) throw ConfigError(key, key + ": empty value");
    if (!kv.emplace(key, std::move(value)).second) {
      throw ConfigError(key, "duplicate key " + key + " (line " + std::to_string(line_no) + ")");
    }
  }

  static constexpr std::array<std::string_view, 15> known{
      "beta",     "length",   "x0",      "t_end",    "nx",
      "nt",       "grading",  "bc_kind", "bc_value", "t0_kind",
      "t0_value", "out_dir",  "snapshot_stride", "audits", "mms_case"};
  for (const auto& [key, value] : kv) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ConfigError(key, "unknown key " + key);
    }
  }

  RunConfig cfg;
  ModelParams& m = cfg.model;
  auto take = [&](std::string_view key) -> std::optional<std::string> {
    const auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    return it->second;
  };
  auto need = [&](std::string_view key) {
    auto v = take(key);
    if (!v) throw ConfigError(std::string(key), "missing required key " + std::string(key));
    return *v;
  };

  if (auto v = take("mms_case")) cfg.mms_case = *v;
  if (cfg.mms_case) {
    if (*cfg.mms_case != "frozen-front" && *cfg.mms_case != "quadratic-front") {
      throw ConfigError("mms_case", "mms_case must be frozen-front or quadratic-front");
    }
    for (std::string_view key : {"length", "x0", "bc_kind", "bc_value", "t0_kind", "t0_value"}) {
      if (kv.contains(key)) {
        throw ConfigError(std::string(key), std::string(key) + " is fixed by mms_case and must be omitted");
      }
    }
  }

  m.beta = detail::parse_real("beta", need("beta"));
  m.t_end = detail::parse_real("t_end", need("t_end"));
  m.nx = detail::parse_count("nx", need("nx"));
  m.nt = detail::parse_count("nt", need("nt"));
  if (!cfg.mms_case) {
    m.length = detail::parse_real("length", need("length"));
    m.x0 = detail::parse_real("x0", take("x0").value_or("0"));
    const std::string bc = need("bc_kind");
    if (bc == "dirichlet") {
      m.bc_kind = BoundaryKind::dirichlet;
    } else if (bc == "neumann") {
      m.bc_kind = BoundaryKind::neumann;
    } else {
      throw ConfigError("bc_kind", "bc_kind must be dirichlet or neumann");
    }
    m.bc_value = detail::parse_real("bc_value", need("bc_value"));
    const std::string t0 = take("t0_kind").value_or("zero");
    if (t0 == "zero") {
      m.t0_kind = InitialKind::zero;
    } else if (t0 == "constant") {
      m.t0_kind = InitialKind::constant;
    } else if (t0 == "linear") {
      m.t0_kind = InitialKind::linear;
    } else {
      throw ConfigError("t0_kind", "t0_kind must be zero, constant or linear");
    }
    m.t0_value = detail::parse_real("t0_value", take("t0_value").value_or("0"));
  }
  // Validate beta before the grading default depends on it.
  if (!(m.beta > 0.0 && m.beta < 1.0)) throw ConfigError("beta", "beta must lie in (0,1)");
  m.grading = detail::parse_grading(take("grading").value_or("uniform"), m.beta);
  if (auto v = take("out_dir")) cfg.out_dir = *v;
  if (auto v = take("snapshot_stride")) cfg.snapshot_stride = detail::parse_count("snapshot_stride", *v);
  if (cfg.snapshot_stride < 1) throw ConfigError("snapshot_stride", "snapshot_stride must be >= 1");
  if (auto v = take("audits")) cfg.audits = detail::parse_audits(*v);

  if (!cfg.mms_case) {
    try {
      m.validate();
    } catch (const ParamError& e) {
      throw ConfigError(e.key(), e.what());
    }
  }
  return cfg;
}

/// Text that parse_config maps back to an equal RunConfig.
inline std::string emit_config(const RunConfig& cfg) {
  const ModelParams& m = cfg.model;
  std::ostringstream os;
  os << "beta=" << detail::real_text(m.beta) << '\n';
  os << "t_end=" << detail::real_text(m.t_end) << '\n';
  os << "nx=" << m.nx << '\n';
  os << "nt=" << m.nt << '\n';
  os << "grading="
     << (m.grading.kind == Grading::Kind::uniform ? std::string("uniform")
                                                  : "graded:" + detail::real_text(m.grading.exponent))
     << '\n';
  if (cfg.mms_case) {
    os << "mms_case=" << *cfg.mms_case << '\n';
  } else {
    os << "length=" << detail::real_text(m.length) << '\n';
    os << "x0=" << detail::real_text(m.x0) << '\n';
    os << "bc_kind=" << (m.bc_kind == BoundaryKind::dirichlet ? "dirichlet" : "neumann") << '\n';
    os << "bc_value=" << detail::real_text(m.bc_value) << '\n';
    const char* t0 = m.t0_kind == InitialKind::zero       ? "zero"
                     : m.t0_kind == InitialKind::constant ? "constant"
                                                          : "linear";
    os << "t0_kind=" << t0 << '\n';
    os << "t0_value=" << detail::real_text(m.t0_value) << '\n';
  }
  os << "out_dir=" << cfg.out_dir << '\n';
  os << "snapshot_stride=" << cfg.snapshot_stride << '\n';
  std::string audits;
  bool every = true, none = true;
  for (const auto& [kind, label] : kAuditNames) {
    if (cfg.audits.enabled(kind)) {
      if (!audits.empty()) audits += ',';
      audits += label;
      none = false;
    } else {
      every = false;
    }
  }
  os << "audits=" << (every ? "all" : none ? "none" : audits) << '\n';
  return os.str();
}

}  // namespace fstefan
