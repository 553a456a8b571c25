// Copyright 2026 The oamsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "oamsim/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <istream>
#include <regex>
#include <set>
#include <sstream>

namespace oamsim {

namespace {

std::string join_lines(const std::vector<std::string>& lines) {
  std::string out;
  for (const std::string& l : lines) {
    if (!out.empty()) out += '\n';
    out += l;
  }
  return out;
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& text) {
  const std::string t = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw std::invalid_argument("expected a number, got '" + text + "'");
  }
  return value;
}

template <typename Int>
Int parse_integer(const std::string& text) {
  const std::string t = trim(text);
  Int value = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw std::invalid_argument("expected an integer, got '" + text + "'");
  }
  return value;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_integer<int>(item));
  if (out.empty()) throw std::invalid_argument("expected a comma-separated integer list");
  return out;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_list(const std::vector<int>& v) {
  std::string out;
  for (std::size_t k = 0; k < v.size(); ++k) out += (k ? "," : "") + std::to_string(v[k]);
  return out;
}

struct Field {
  std::function<void(ScenarioConfig&, const std::string&)> set;
  std::function<std::string(const ScenarioConfig&)> get;
};

template <typename T>
Field number_field(T ScenarioConfig::*section, double T::*member) {
  return {[=](ScenarioConfig& c, const std::string& v) { (c.*section).*member = parse_double(v); },
          [=](const ScenarioConfig& c) { return format_double((c.*section).*member); }};
}

template <typename T>
Field angle_field(T ScenarioConfig::*section, double T::*member) {
  return {[=](ScenarioConfig& c, const std::string& v) { (c.*section).*member = parse_angle(v); },
          [=](const ScenarioConfig& c) { return format_double((c.*section).*member); }};
}

template <typename T>
Field int_field(T ScenarioConfig::*section, int T::*member) {
  return {[=](ScenarioConfig& c, const std::string& v) { (c.*section).*member = parse_integer<int>(v); },
          [=](const ScenarioConfig& c) { return std::to_string((c.*section).*member); }};
}

template <typename T>
Field string_field(T ScenarioConfig::*section, std::string T::*member) {
  return {[=](ScenarioConfig& c, const std::string& v) { (c.*section).*member = trim(v); },
          [=](const ScenarioConfig& c) { return (c.*section).*member; }};
}

using S = ScenarioConfig;

const std::map<std::string, Field>& fields() {
  static const std::map<std::string, Field> table = {
      {"source.pump_waist", number_field(&S::source, &S::Source::pump_waist)},
      {"source.gamma", number_field(&S::source, &S::Source::gamma)},
      {"source.ell_max", int_field(&S::source, &S::Source::ell_max)},
      {"source.offset", number_field(&S::source, &S::Source::offset)},
      {"source.pump_wavelength", number_field(&S::source, &S::Source::pump_wavelength)},
      {"source.crystal_length", number_field(&S::source, &S::Source::crystal_length)},
      {"source.refractive_index", number_field(&S::source, &S::Source::refractive_index)},
      {"source.alpha", number_field(&S::source, &S::Source::alpha)},
      {"source.focal_length", number_field(&S::source, &S::Source::focal_length)},
      {"grid.n_r", int_field(&S::grid, &S::Grid::n_r)},
      {"grid.n_phi", int_field(&S::grid, &S::Grid::n_phi)},
      {"grid.r_max_factor", number_field(&S::grid, &S::Grid::r_max_factor)},
      {"detector.singles_a", number_field(&S::detector, &S::Detector::singles_a)},
      {"detector.singles_b", number_field(&S::detector, &S::Detector::singles_b)},
      {"detector.gate_ns", number_field(&S::detector, &S::Detector::gate_ns)},
      {"detector.dark_rate", number_field(&S::detector, &S::Detector::dark_rate)},
      {"detector.efficiency", number_field(&S::detector, &S::Detector::efficiency)},
      {"detector.integration_s", number_field(&S::detector, &S::Detector::integration_s)},
      {"scan.peak_counts", number_field(&S::scan, &S::Scan::peak_counts)},
      {"spiral.ell_min", int_field(&S::spiral, &S::Spiral::ell_min)},
      {"spiral.ell_max", int_field(&S::spiral, &S::Spiral::ell_max)},
      {"angular.width", angle_field(&S::angular, &S::Angular::width)},
      {"angular.orientations", int_field(&S::angular, &S::Angular::orientations)},
      {"epr.width", angle_field(&S::epr, &S::Epr::width)},
      {"epr.orientations", int_field(&S::epr, &S::Epr::orientations)},
      {"epr.offset", number_field(&S::epr, &S::Epr::offset)},
      {"bell.ell", int_field(&S::bell, &S::Bell::ell)},
      {"bell.curve_points", int_field(&S::bell, &S::Bell::curve_points)},
      {"tomo.d", int_field(&S::tomo, &S::Tomo::d)},
      {"tomo.ells",
       {[](S& c, const std::string& v) { c.tomo.ells = parse_int_list(v); },
        [](const S& c) { return c.tomo.ells.empty() ? std::string("auto") : format_list(c.tomo.ells); }}},
      {"tomo.state", string_field(&S::tomo, &S::Tomo::state)},
      {"tomo.mean_counts", number_field(&S::tomo, &S::Tomo::mean_counts)},
      {"tomo.restarts", int_field(&S::tomo, &S::Tomo::restarts)},
      {"tomo.optimizer", string_field(&S::tomo, &S::Tomo::optimizer)},
      {"ring.points", int_field(&S::ring, &S::Ring::points)},
      {"ring.r_max", number_field(&S::ring, &S::Ring::r_max)},
      {"modes.area", number_field(&S::modes, &S::Modes::area)},
      {"modes.solid_angle", number_field(&S::modes, &S::Modes::solid_angle)},
      {"modes.wavelength", number_field(&S::modes, &S::Modes::wavelength)},
      {"run.seed",
       {[](S& c, const std::string& v) { c.seed = parse_integer<std::uint64_t>(v); },
        [](const S& c) { return c.seed ? std::to_string(*c.seed) : std::string("unset"); }}},
      {"run.output_dir",
       {[](S& c, const std::string& v) { c.output_dir = trim(v); }, [](const S& c) { return c.output_dir; }}},
  };
  return table;
}

const char* const kBellAngleKeys[4] = {"bell.theta_a", "bell.theta_a_prime", "bell.theta_b", "bell.theta_b_prime"};
const std::string kPminPrefix = "threshold.p_min.";

}  // namespace

ConfigError::ConfigError(const std::vector<std::string>& problems)
    : std::runtime_error(join_lines(problems)), problems_(problems) {}

std::map<std::string, std::string> parse_key_values(std::istream& in, const std::string& origin) {
  std::map<std::string, std::string> out;
  std::vector<std::string> problems;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      problems.push_back(origin + ":" + std::to_string(number) + ": expected 'key = value'");
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) {
      problems.push_back(origin + ":" + std::to_string(number) + ": empty key");
      continue;
    }
    out[key] = trim(line.substr(eq + 1));
  }
  if (!problems.empty()) throw ConfigError(problems);
  return out;
}

std::map<std::string, std::string> read_key_value_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({path + ": cannot open configuration file"});
  return parse_key_values(in, path);
}

std::pair<std::string, std::string> parse_override(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || trim(text.substr(0, eq)).empty()) {
    throw ConfigError({"--set '" + text + "': expected key=value"});
  }
  return {trim(text.substr(0, eq)), trim(text.substr(eq + 1))};
}

double parse_angle(const std::string& text) {
  const std::string t = trim(text);
  static const std::regex pattern(R"(^([+-]?(?:[0-9]*\.?[0-9]+(?:[eE][+-]?[0-9]+)?)?)\s*\*?\s*pi\s*(?:/\s*([0-9]*\.?[0-9]+))?$)");
  std::smatch m;
  if (std::regex_match(t, m, pattern)) {
    const std::string coef = m[1].str();
    double factor = 1.0;
    if (coef == "-") {
      factor = -1.0;
    } else if (!coef.empty() && coef != "+") {
      factor = parse_double(coef[0] == '+' ? coef.substr(1) : coef);
    }
    const double divisor = m[2].matched ? parse_double(m[2].str()) : 1.0;
    if (divisor == 0.0) throw std::invalid_argument("division by zero in '" + text + "'");
    return factor * kPi / divisor;
  }
  return parse_double(t);
}

ScenarioConfig ScenarioConfig::from_map(const std::map<std::string, std::string>& values) {
  ScenarioConfig c;
  std::vector<std::string> problems;
  std::optional<double> angles[4];
  for (const auto& [key, value] : values) {
    try {
      if (const auto it = fields().find(key); it != fields().end()) {
        it->second.set(c, value);
        continue;
      }
      bool is_angle = false;
      for (int k = 0; k < 4; ++k)
        if (key == kBellAngleKeys[k]) {
          angles[k] = parse_angle(value);
          is_angle = true;
        }
      if (is_angle) continue;
      if (key.rfind(kPminPrefix, 0) == 0) {
        const int d = parse_integer<int>(key.substr(kPminPrefix.size()));
        c.threshold_pmin[d] = parse_double(value);
        continue;
      }
      problems.push_back(key + ": unknown key");
    } catch (const std::invalid_argument& e) {
      problems.push_back(key + ": " + e.what());
    }
  }
  const int given = static_cast<int>(std::count_if(std::begin(angles), std::end(angles),
                                                   [](const std::optional<double>& a) { return a.has_value(); }));
  if (given == 4) {
    c.bell.angles = BellSettings{c.bell.ell, *angles[0], *angles[1], *angles[2], *angles[3]};
  } else if (given > 0) {
    problems.push_back("bell.theta_*: give all four angles or none (canonical)");
  }
  if (!problems.empty()) throw ConfigError(problems);
  return c;
}

std::vector<int> ScenarioConfig::tomo_ells() const {
  if (!tomo.ells.empty()) return tomo.ells;
  switch (tomo.d) {
    case 2: return {1, -1};
    case 3: return {1, 0, -1};
    case 4: return {2, 1, -1, -2};
    case 5: return {2, 1, 0, -1, -2};
    default: return {};
  }
}

double ScenarioConfig::pmin(int d) const {
  if (const auto it = threshold_pmin.find(d); it != threshold_pmin.end()) return it->second;
  return default_threshold_pmin(d);
}

DetectorConfig ScenarioConfig::detector_config() const {
  DetectorConfig det;
  det.singles_a = detector.singles_a;
  det.singles_b = detector.singles_b;
  det.gate_time = detector.gate_ns * 1e-9;
  det.dark_rate = detector.dark_rate;
  det.efficiency = detector.efficiency;
  det.integration_time = detector.integration_s;
  return det;
}

CrystalConfig ScenarioConfig::crystal_config() const {
  return CrystalConfig::degenerate(source.pump_wavelength, source.crystal_length, source.refractive_index,
                                   source.alpha, source.focal_length);
}

std::vector<std::string> ScenarioConfig::validate() const {
  std::vector<std::string> v;
  auto require = [&v](bool ok, const std::string& message) {
    if (!ok) v.push_back(message);
  };
  auto finite = [](double x) { return std::isfinite(x); };

  require(source.pump_waist > 0.0, "source.pump_waist: must be > 0");
  require(source.gamma > 0.0, "source.gamma: must be > 0");
  require(source.ell_max >= 1 && source.ell_max <= kMaxStateEll,
          "source.ell_max: must lie in [1, " + std::to_string(kMaxStateEll) + "]");
  require(finite(source.offset), "source.offset: must be finite");
  require(source.pump_wavelength > 0.0, "source.pump_wavelength: must be > 0");
  require(source.crystal_length > 0.0, "source.crystal_length: must be > 0");
  require(source.refractive_index > 0.0, "source.refractive_index: must be > 0");
  require(finite(source.alpha), "source.alpha: must be finite");
  require(source.focal_length > 0.0, "source.focal_length: must be > 0");

  require(grid.n_r >= 8, "grid.n_r: must be >= 8");
  require(grid.n_phi > 2 * source.ell_max, "grid.n_phi: must exceed 2 * source.ell_max");
  require(grid.r_max_factor >= 3.0, "grid.r_max_factor: must be >= 3");

  require(detector.singles_a >= 0.0, "detector.singles_a: must be >= 0");
  require(detector.singles_b >= 0.0, "detector.singles_b: must be >= 0");
  require(detector.gate_ns > 0.0, "detector.gate_ns: must be > 0");
  require(detector.dark_rate >= 0.0, "detector.dark_rate: must be >= 0");
  require(detector.efficiency > 0.0 && detector.efficiency <= 1.0, "detector.efficiency: must lie in (0, 1]");
  require(detector.integration_s > 0.0, "detector.integration_s: must be > 0");
  require(scan.peak_counts > 0.0 && finite(scan.peak_counts), "scan.peak_counts: must be > 0");

  require(spiral.ell_min <= spiral.ell_max, "spiral.ell_min: must not exceed spiral.ell_max");
  require(std::abs(spiral.ell_min) <= source.ell_max && std::abs(spiral.ell_max) <= source.ell_max,
          "spiral.ell_min/ell_max: must lie within +-source.ell_max");

  require(angular.width > 0.0 && angular.width <= kTwoPi, "angular.width: must lie in (0, 2 pi]");
  require(angular.orientations >= 4, "angular.orientations: must be >= 4");
  require(epr.width > 0.0 && epr.width <= kTwoPi, "epr.width: must lie in (0, 2 pi]");
  require(epr.orientations >= 4, "epr.orientations: must be >= 4");
  require(finite(epr.offset), "epr.offset: must be finite");

  require(bell.ell >= 1 && bell.ell <= source.ell_max, "bell.ell: must lie in [1, source.ell_max]");
  require(bell.curve_points >= 8, "bell.curve_points: must be >= 8");
  if (bell.angles) {
    for (double t : {bell.angles->theta_a, bell.angles->theta_a_prime, bell.angles->theta_b,
                     bell.angles->theta_b_prime})
      require(finite(t), "bell.theta_*: must be finite");
  }

  require(tomo.d >= 2 && tomo.d <= 5, "tomo.d: must lie in [2, 5]");
  const std::vector<int> ells = tomo_ells();
  if (!tomo.ells.empty()) {
    require(static_cast<int>(tomo.ells.size()) == tomo.d, "tomo.ells: must list exactly tomo.d values");
    require(std::set<int>(tomo.ells.begin(), tomo.ells.end()).size() == tomo.ells.size(),
            "tomo.ells: values must be distinct");
  }
  for (int ell : ells) {
    if (std::abs(ell) > source.ell_max) {
      v.push_back("tomo.ells: " + std::to_string(ell) + " lies outside +-source.ell_max");
      break;
    }
    if (std::find(ells.begin(), ells.end(), -ell) == ells.end()) {
      v.push_back("tomo.ells: must be closed under negation (target is sum |l,-l>)");
      break;
    }
  }
  require(tomo.state == "spdc" || tomo.state == "bell", "tomo.state: must be 'spdc' or 'bell'");
  require(tomo.mean_counts > 0.0 && finite(tomo.mean_counts), "tomo.mean_counts: must be > 0");
  require(tomo.restarts >= 1, "tomo.restarts: must be >= 1");
  require(tomo.optimizer == "lm" || tomo.optimizer == "nelder-mead", "tomo.optimizer: must be 'lm' or 'nelder-mead'");
  for (const auto& [d, p] : threshold_pmin) {
    require(d >= 2 && d <= 8, "threshold.p_min." + std::to_string(d) + ": d must lie in [2, 8]");
    require(p >= 0.0 && p <= 1.0, "threshold.p_min." + std::to_string(d) + ": must lie in [0, 1]");
  }

  require(ring.points >= 2, "ring.points: must be >= 2");
  require(ring.r_max >= 0.0 && finite(ring.r_max), "ring.r_max: must be >= 0");
  require(modes.area > 0.0, "modes.area: must be > 0");
  require(modes.solid_angle > 0.0, "modes.solid_angle: must be > 0");
  require(modes.wavelength > 0.0, "modes.wavelength: must be > 0");

  require(seed.has_value(), "run.seed: required (runs are never seeded from the clock)");
  require(!output_dir.empty(), "run.output_dir: must not be empty");
  return v;
}

std::vector<std::pair<std::string, std::string>> ScenarioConfig::echo() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [key, field] : fields()) {
    if (key != "run.output_dir") out.emplace_back(key, field.get(*this));  // where, not what
  }
  const BellSettings angles = bell.angles.value_or(BellSettings{});
  for (int k = 0; k < 4; ++k) {
    const double values[4] = {angles.theta_a, angles.theta_a_prime, angles.theta_b, angles.theta_b_prime};
    out.emplace_back(kBellAngleKeys[k], bell.angles ? format_double(values[k]) : std::string("canonical"));
  }
  for (const auto& [d, p] : threshold_pmin) out.emplace_back(kPminPrefix + std::to_string(d), format_double(p));
  std::sort(out.begin(), out.end());
  return out;
}

std::string ScenarioConfig::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& [key, value] : echo()) {
    for (char ch : key + " = " + value + "\n") {
      h ^= static_cast<unsigned char>(ch);
      h *= 0x100000001b3ULL;
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace oamsim
