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

#ifndef OAMSIM_CLI_HPP
#define OAMSIM_CLI_HPP

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "oamsim/config.hpp"

namespace oamsim {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { kExitOk = 0, kExitConfigError = 1, kExitRuntimeError = 2 };

/// Names accepted by run_scenario.
const std::vector<std::string>& scenario_names();

/// Runs one scenario and writes its tables plus manifest_<name>.txt into
/// `out_dir` (created if missing). Every file starts with a
/// "# oamsim <name> config=<hash> seed=<seed>" line. Phase timings go to
/// `log`, never into the outputs. Returns the written paths.
std::vector<std::filesystem::path> run_scenario(const std::string& name, const ScenarioConfig& config,
                                                const std::filesystem::path& out_dir, std::ostream& log);

/// `oamsim <subcommand> [--config path] [--set key=value ...] [--out dir]`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace oamsim

#endif  // OAMSIM_CLI_HPP
