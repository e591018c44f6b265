#pragma once

#include <atomic>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mzres/error.hpp"
#include "mzres/geometry.hpp"
#include "mzres/mzdist.hpp"
#include "mzres/resonator.hpp"

namespace mzres::io {

namespace fs = std::filesystem;

/// Decimal text with 17 significant digits; round-trips every double.
inline std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// ---------------------------------------------------------------- config

class ConfigError : public UsageError {
 public:
  ConfigError(const std::string& source, int line, const std::string& field,
              const std::string& msg)
      : UsageError(source + ":" + std::to_string(line) + ": " +
                   (field.empty() ? "" : "field '" + field + "': ") + msg),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// Window description as written in a config file:
///   disc CX CY RADIUS | sector T1 T2 | annulus T1 T2 R1 R2 | polygon X1 Y1 X2 Y2 ...
struct WindowSpec {
  std::string id;
  std::string kind;
  std::vector<double> params;

  Window build() const {
    const auto& p = params;
    if (kind == "disc" && p.size() == 3) return Window::disc({p[0], p[1]}, p[2]);
    if (kind == "sector" && p.size() == 2) return Window::sector(Sector(p[0], p[1]));
    if (kind == "annulus" && p.size() == 4) return Window::sector_annulus(p[0], p[1], p[2], p[3]);
    if (kind == "polygon" && p.size() >= 6 && p.size() % 2 == 0) {
      std::vector<cplx> v;
      for (std::size_t i = 0; i < p.size(); i += 2) v.emplace_back(p[i], p[i + 1]);
      return Window::polygon(std::move(v));
    }
    throw GeometryError("bad window '" + id + "': " + kind + " with " +
                        std::to_string(p.size()) + " parameters");
  }
  bool operator==(const WindowSpec&) const = default;
};

struct ExperimentConfig {
  int d = 3;
  double a = 1.0;
  std::vector<Shell> shells;
  std::vector<double> radii;  ///< R grid
  std::vector<WindowSpec> windows;
  double mesh = 0.02;
  double tol = 1e-10;
  std::uint64_t seed = 1;
  std::string out_dir = "out";

  RadialPotential potential() const { return RadialPotential(d, shells); }

  bool operator==(const ExperimentConfig& o) const {
    if (shells.size() != o.shells.size()) return false;
    for (std::size_t i = 0; i < shells.size(); ++i)
      if (shells[i].radius != o.shells[i].radius || shells[i].value != o.shells[i].value)
        return false;
    return d == o.d && a == o.a && radii == o.radii && windows == o.windows && mesh == o.mesh &&
           tol == o.tol && seed == o.seed && out_dir == o.out_dir;
  }
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split(const std::string& s, const char* seps) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const auto j = s.find_first_of(seps, i);
    const auto tok = trim(std::string_view(s).substr(i, j == std::string::npos ? j : j - i));
    if (!tok.empty()) out.push_back(tok);
    if (j == std::string::npos) break;
    i = j + 1;
  }
  return out;
}

inline bool parse_double(const std::string& s, double& x) {
  const char* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, x);
  return ec == std::errc() && p == end && std::isfinite(x);
}

}  // namespace detail

/// Parse the key = value config format. Sections: [potential], [run],
/// [windows]. Lines starting with '#' are comments.
inline ExperimentConfig parse_config(const std::string& text, const std::string& source = "config") {
  ExperimentConfig cfg;
  bool have_a = false;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  auto fail = [&](const std::string& field, const std::string& msg) {
    throw ConfigError(source, lineno, field, msg);
  };
  auto number = [&](const std::string& field, const std::string& s) {
    double x;
    if (!detail::parse_double(s, x)) fail(field, "expected a number, got '" + s + "'");
    return x;
  };
  auto numbers = [&](const std::string& field, const std::string& s, const char* seps) {
    std::vector<double> v;
    for (const auto& t : detail::split(s, seps)) v.push_back(number(field, t));
    return v;
  };

  while (std::getline(in, raw)) {
    ++lineno;
    const auto hash = raw.find('#');
    const std::string line = detail::trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail("", "unterminated section header");
      section = detail::trim(std::string_view(line).substr(1, line.size() - 2));
      if (section != "potential" && section != "run" && section != "windows")
        fail("", "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail("", "expected key = value");
    const std::string key = detail::trim(std::string_view(line).substr(0, eq));
    const std::string val = detail::trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) fail("", "empty key");
    if (val.empty()) fail(key, "empty value");

    if (section == "potential") {
      if (key == "d") {
        const double x = number(key, val);
        if (x != std::floor(x) || x < 3 || static_cast<int>(x) % 2 == 0)
          fail(key, "dimension must be an odd integer >= 3");
        cfg.d = static_cast<int>(x);
      } else if (key == "a") {
        cfg.a = number(key, val);
        have_a = true;
        if (!(cfg.a > 0.0)) fail(key, "support radius must be positive");
      } else if (key == "shell") {
        const auto v = numbers(key, val, ", \t");
        if (v.size() != 2 && v.size() != 3) fail(key, "expected: radius, re_value[, im_value]");
        if (!(v[0] > 0.0)) fail(key, "shell radius must be positive");
        if (!cfg.shells.empty() && !(v[0] > cfg.shells.back().radius))
          fail(key, "shell radii must increase");
        cfg.shells.push_back({v[0], cplx(v[1], v.size() == 3 ? v[2] : 0.0)});
      } else {
        fail(key, "unknown key in [potential]");
      }
    } else if (section == "run") {
      if (key == "R") {
        cfg.radii = numbers(key, val, ", \t");
        if (cfg.radii.empty()) fail(key, "empty R grid");
        for (double r : cfg.radii)
          if (!(r > 0.0)) fail(key, "radii must be positive");
      } else if (key == "mesh") {
        cfg.mesh = number(key, val);
        if (!(cfg.mesh > 0.0 && cfg.mesh <= 1.0)) fail(key, "mesh must lie in (0, 1]");
      } else if (key == "tol") {
        cfg.tol = number(key, val);
        if (!(cfg.tol > 0.0 && cfg.tol < 1e-2)) fail(key, "tol must lie in (0, 1e-2)");
      } else if (key == "seed") {
        std::uint64_t s;
        auto [p, ec] = std::from_chars(val.data(), val.data() + val.size(), s);
        if (ec != std::errc() || p != val.data() + val.size())
          fail(key, "expected a nonnegative integer");
        cfg.seed = s;
      } else if (key == "out") {
        cfg.out_dir = val;
      } else {
        fail(key, "unknown key in [run]");
      }
    } else if (section == "windows") {
      const auto toks = detail::split(val, " \t,");
      WindowSpec w{key, toks[0], {}};
      for (std::size_t i = 1; i < toks.size(); ++i) w.params.push_back(number(key, toks[i]));
      for (const auto& o : cfg.windows)
        if (o.id == key) fail(key, "duplicate window id");
      try {
        (void)w.build();
      } catch (const Error& e) {
        fail(key, e.what());
      }
      cfg.windows.push_back(std::move(w));
    } else {
      fail(key, "key outside of any section");
    }
  }
  lineno = 0;
  if (cfg.shells.empty()) fail("shell", "at least one shell is required");
  if (have_a && cfg.a != cfg.shells.back().radius)
    fail("a", "support radius must equal the outer shell radius");
  cfg.a = cfg.shells.back().radius;
  if (cfg.radii.empty()) fail("R", "missing R grid");
  return cfg;
}

inline std::string read_file(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) throw UsageError("cannot read " + p.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

inline ExperimentConfig load_config(const fs::path& p) {
  return parse_config(read_file(p), p.string());
}

inline std::string format_config(const ExperimentConfig& c) {
  std::string s = "[potential]\nd = " + std::to_string(c.d) + "\na = " + fmt(c.a) + "\n";
  for (const auto& sh : c.shells) {
    s += "shell = " + fmt(sh.radius) + ", " + fmt(sh.value.real());
    if (sh.value.imag() != 0.0) s += ", " + fmt(sh.value.imag());
    s += "\n";
  }
  s += "\n[run]\nR =";
  for (std::size_t i = 0; i < c.radii.size(); ++i) s += (i ? ", " : " ") + fmt(c.radii[i]);
  s += "\nmesh = " + fmt(c.mesh) + "\ntol = " + fmt(c.tol) + "\nseed = " + std::to_string(c.seed) +
       "\nout = " + c.out_dir + "\n";
  if (!c.windows.empty()) {
    s += "\n[windows]\n";
    for (const auto& w : c.windows) {
      s += w.id + " = " + w.kind;
      for (double p : w.params) s += " " + fmt(p);
      s += "\n";
    }
  }
  return s;
}

// ---------------------------------------------------------------- output

/// Write bytes exactly (binary mode, so LF stays LF), creating parent dirs.
inline void write_text(const fs::path& p, const std::string& text) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  if (!f) throw UsageError("cannot write " + p.string());
  f << text;
  if (!f) throw Error("write failed for " + p.string());
}

/// Header plus rows of preformatted cells.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string to_csv() const {
    std::string s;
    auto line = [&s](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) s += ',';
        s += cells[i];
      }
      s += '\n';
    };
    line(header);
    for (const auto& r : rows) line(r);
    return s;
  }
};

inline void write_csv(const Table& t, const fs::path& p) { write_text(p, t.to_csv()); }

inline void write_json(const nlohmann::ordered_json& j, const fs::path& p) {
  write_text(p, j.dump(2) + "\n");
}

inline Table resonance_table(const ResonanceSet& rs) {
  Table t{{"re_lambda", "im_lambda", "l", "channel_order", "harmonic_mult", "total_mult",
           "residual"},
          {}};
  for (const auto& e : rs.entries)
    t.rows.push_back({fmt(e.lambda.real()), fmt(e.lambda.imag()), std::to_string(e.l),
                      std::to_string(e.channel_order), std::to_string(e.harmonic_mult),
                      std::to_string(e.mult), fmt(e.residual)});
  return t;
}

// ---------------------------------------------------------------- profile cache

inline constexpr int cache_schema_version = 1;

class SchemaVersionError : public SchemaError {
 public:
  using SchemaError::SchemaError;
};

/// Number of profile builds performed by load_or_build_distribution in
/// this process.
inline std::atomic<int>& profile_build_counter() {
  static std::atomic<int> n{0};
  return n;
}

namespace detail {

inline nlohmann::ordered_json encode(const std::vector<double>& v) {
  auto a = nlohmann::ordered_json::array();
  for (double x : v) a.push_back(fmt(x));
  return a;
}

inline std::vector<double> decode(const nlohmann::ordered_json& a) {
  std::vector<double> v;
  for (const auto& s : a) {
    double x;
    if (!s.is_string() || !parse_double(s.get<std::string>(), x))
      throw SchemaError("non-numeric entry in profile cache");
    v.push_back(x);
  }
  return v;
}

}  // namespace detail

inline nlohmann::ordered_json profile_to_json(const MZDistribution& m) {
  const auto& p = m.profile();
  nlohmann::ordered_json j;
  j["schema_version"] = cache_schema_version;
  j["d"] = m.dimension();
  j["tol"] = fmt(p.tol());
  j["chebyshev_coeffs"] = detail::encode(p.h_series().coeffs());
  j["dcoeffs"] = detail::encode(p.dh_series().coeffs());
  j["ddcoeffs"] = detail::encode(p.ddh_series().coeffs());
  j["icoeffs"] = detail::encode(p.integral_series().coeffs());
  j["e_d"] = fmt(m.e_d());
  j["c_d"] = fmt(m.c_d());
  auto nodes = nlohmann::ordered_json::array();
  const auto& th = m.sigma().node_angles();
  const auto& r0 = m.sigma().node_radii();
  for (std::size_t i = 0; i < th.size(); ++i) nodes.push_back({fmt(th[i]), fmt(r0[i])});
  j["sigma_nodes"] = nodes;
  return j;
}

inline MZDistribution profile_from_json(const nlohmann::ordered_json& j) {
  try {
    if (j.at("schema_version").get<int>() != cache_schema_version)
      throw SchemaVersionError("profile cache schema version " +
                        std::to_string(j.at("schema_version").get<int>()) + ", expected " +
                        std::to_string(cache_schema_version));
    const int d = j.at("d").get<int>();
    double tol;
    if (!detail::parse_double(j.at("tol").get<std::string>(), tol))
      throw SchemaError("bad tol in profile cache");
    auto prof = AngularProfile::from_coeffs(
        d, tol, detail::decode(j.at("chebyshev_coeffs")), detail::decode(j.at("dcoeffs")),
        detail::decode(j.at("ddcoeffs")), detail::decode(j.at("icoeffs")));
    std::vector<double> th, r0;
    for (const auto& n : j.at("sigma_nodes")) {
      const auto v = detail::decode(n);
      if (v.size() != 2) throw SchemaError("bad sigma node in profile cache");
      th.push_back(v[0]);
      r0.push_back(v[1]);
    }
    return MZDistribution(std::move(prof), SigmaCurve::from_nodes(std::move(th), std::move(r0)));
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed profile cache: ") + e.what());
  }
}


/// Cache directory: $MZRES_CACHE_DIR if set, else ./.mzres_cache.
inline fs::path cache_dir() {
  if (const char* e = std::getenv("MZRES_CACHE_DIR"); e && *e) return e;
  return ".mzres_cache";
}

inline fs::path cache_path(const fs::path& dir, int d, double tol) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "profile_d%d_tol%.3g.json", d, tol);
  return dir / buf;
}

inline void save_profile_cache(const MZDistribution& m, const fs::path& p) {
  write_text(p, profile_to_json(m).dump(1) + "\n");
}

inline MZDistribution load_profile_cache(const fs::path& p) {
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(read_file(p));
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError("unreadable profile cache " + p.string() + ": " + e.what());
  }
  return profile_from_json(j);
}

/// Load (d, tol) from the cache or build it and store it. Corrupt cache
/// files are rebuilt with a warning on `warn`. Schema mismatches propagate.
inline MZDistribution load_or_build_distribution(int d, double tol, const fs::path& dir,
                                                 std::ostream& warn = std::cerr) {
  const fs::path p = cache_path(dir, d, tol);
  if (fs::exists(p)) {
    try {
      auto m = load_profile_cache(p);
      if (m.dimension() == d && m.profile().tol() == tol) return m;
      warn << "warning: profile cache " << p.string() << " does not match (d, tol); rebuilding\n";
    } catch (const SchemaVersionError&) {
      throw;
    } catch (const Error& e) {
      warn << "warning: " << e.what() << "; rebuilding\n";
    }
  }
  ++profile_build_counter();
  auto m = MZDistribution::build(d, tol);
  save_profile_cache(m, p);
  return m;
}

}  // namespace mzres::io
