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

#ifndef OAMSIM_CONFIG_HPP
#define OAMSIM_CONFIG_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "oamsim/experiments.hpp"

namespace oamsim {

/// Raised for unreadable, unparsable or invalid configurations. what() lists
/// every problem, one per line.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::vector<std::string>& problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

/// Flat "key = value" lines; '#' starts a comment. Later keys override
/// earlier ones. Throws ConfigError on malformed lines.
std::map<std::string, std::string> parse_key_values(std::istream& in, const std::string& origin = "<input>");
std::map<std::string, std::string> read_key_value_file(const std::string& path);

/// Parses "key=value" overrides from the command line.
std::pair<std::string, std::string> parse_override(const std::string& text);

struct ScenarioConfig {
  struct Source {
    double pump_waist = 1.0;  // length unit shared with the offsets below
    double gamma = 2.0;
    int ell_max = 20;
    double offset = 0.0;  // arm-A projector shift along x, in measurement waists
    double pump_wavelength = 355e-9;
    double crystal_length = 3e-3;
    double refractive_index = 1.66;
    double alpha = 0.0;
    double focal_length = 0.2;
  } source;
  struct Grid {
    int n_r = 256;
    int n_phi = 256;
    double r_max_factor = 6.0;
  } grid;
  struct Detector {
    double singles_a = 2e4;
    double singles_b = 2e4;
    double gate_ns = 12.5;
    double dark_rate = 200.0;
    double efficiency = 1.0;
    double integration_s = 1.0;
  } detector;
  struct Scan {
    double peak_counts = 1e4;  // ideal coincidences per integration window at the reference setting
  } scan;
  struct Spiral {
    int ell_min = -20;
    int ell_max = 20;
  } spiral;
  struct Angular {
    double width = kPi / 8.0;
    int orientations = 72;
  } angular;
  struct Epr {
    double width = kPi / 8.0;
    int orientations = 72;
    double offset = 0.1;
  } epr;
  struct Bell {
    int ell = 2;
    std::optional<BellSettings> angles;  // canonical when unset
    int curve_points = 181;
  } bell;
  struct Tomo {
    int d = 2;
    std::vector<int> ells;  // defaults from d when empty
    std::string state = "spdc";  // spdc | bell
    double mean_counts = 1e4;
    int restarts = 5;
    std::string optimizer = "lm";  // lm | nelder-mead
  } tomo;
  std::map<int, double> threshold_pmin;
  struct Ring {
    int points = 200;
    double r_max = 0.0;  // 0: three times the first-null radius
  } ring;
  struct Modes {
    double area = 1e-6;
    double solid_angle = 1e-6;
    double wavelength = 710e-9;
  } modes;
  std::optional<std::uint64_t> seed;
  std::string output_dir = "out";

  /// Defaults overridden by `values`. Every unknown key or unparsable value
  /// is collected; throws ConfigError listing them all.
  static ScenarioConfig from_map(const std::map<std::string, std::string>& values);

  /// Every violated invariant, naming the field; empty when valid.
  std::vector<std::string> validate() const;

  /// Effective tomography basis.
  std::vector<int> tomo_ells() const;
  double pmin(int d) const;
  DetectorConfig detector_config() const;
  CrystalConfig crystal_config() const;

  /// Canonical "key = value" lines of every effective setting except
  /// run.output_dir, sorted by key.
  std::vector<std::pair<std::string, std::string>> echo() const;
  /// 64-bit FNV-1a of the canonical echo, as 16 hex digits.
  std::string hash() const;
};

/// Accepts plain numbers and multiples of pi such as "pi/8", "3*pi/4", "-pi".
double parse_angle(const std::string& text);

}  // namespace oamsim

#endif  // OAMSIM_CONFIG_HPP
