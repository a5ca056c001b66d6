// Copyright 2026 The Gaussify Authors
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

#ifndef GAUSSIFY_TOOLS_CLI_H
#define GAUSSIFY_TOOLS_CLI_H

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gaussify/interferometer.h"

namespace gaussify::cli {

inline constexpr const char *kToolVersion = "gaussify 0.1.0";

enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1,
    kExitConfig = 2,
    kExitVanishingSuccess = 3,
    kExitCapSaturated = 4,
};

/// Resolved command configuration. Field names double as flag names and JSON
/// config keys (underscores become dashes on the command line).
struct RunSpec {
    std::string command;
    std::string family;
    std::optional<double> mean;
    std::string probs_file;
    std::vector<double> eta{1.0};
    double eta_h = 1.0;
    int iters = 0;
    std::vector<std::string> mode{"heralded"};
    std::size_t samples = 100000;
    int runs = 100;
    int bins = 256;
    std::uint64_t seed = 1;
    int jobs = 1;
    std::string out_dir = ".";
    std::size_t trunc_cap = 512;
    double trunc_tol = 1e-12;
    bool accept_truncation = false;
    int max_iters = 12;
    double success_floor = kDefaultSuccessFloor;
    bool no_distance = false;
    bool snapshots = false;
    int grid_points = 401;
    std::vector<double> alpha2;
    double alpha2_min = 0.0;
    double alpha2_max = 0.0;
    double alpha2_step = 0.0;
    double eta_bhd = 0.65;
    std::vector<int> measurements{1, 3};
    std::string batch_file;
    double tol = 1e-8;
    std::optional<int> n_max;
};

/// Seeds derived from --seed: batch sampling, Monte Carlo master, bootstrap.
std::uint64_t batch_seed(std::uint64_t master);
std::uint64_t monte_carlo_seed(std::uint64_t master);
std::uint64_t bootstrap_seed(std::uint64_t master);

/// Expands the alpha2 grid (explicit list or min/max/step).
std::vector<double> alpha2_grid(const RunSpec &spec);

/// Runs one command line (without the program name). Returns the exit code.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

}  // namespace gaussify::cli

#endif
