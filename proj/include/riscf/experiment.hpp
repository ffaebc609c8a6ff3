// SPDX-License-Identifier: Apache-2.0
//
// riscf: joint active/passive precoding for RIS-aided cell-free networks
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include "riscf/model.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace riscf
{

// Two BSs at (0,-20) and (80,-20), two RISs at (30,3) and (50,3), four users dropped
// uniformly in the 1 m disc around (L,0). The drop uses the kUserDrop substream of seed.
// M=8, U=2, N=32, P=6, noise -120 dBm, P_max 1 W, unit weights.
ScenarioConfig scenario_fig4(double L, std::uint64_t seed = 0);

// BSs at (-10,0) and (10,0); eight RISs on the 15 m circle at angles 2 pi i / 8; four
// users on the same circle at pi/8 + pi i / 2, halfway between RISs. P_max 0.1 W.
ScenarioConfig scenario_fig7(std::uint64_t seed = 0);

// Places K users uniformly in the disc of the given radius around center.
std::vector<Point2> drop_users(int K, Point2 center, double radius, std::uint64_t seed);

enum class SweepVariable
{
    kUserDistanceL,
    kBsPower,      // dBW
    kBsAntennasM,
    kUserAntennasU,
    kRisElementsN
};

std::string to_string(SweepVariable v);
SweepVariable parse_sweep_variable(const std::string &text);

struct Variant
{
    bool no_ris = false;
    PhaseConstraint constraint;

    // "f1", "f2", "f3:<L>" or "noris".
    static Variant parse(const std::string &text);
    std::string label() const;
};

// Applies one sweep value to a configuration. For the distance L the users are
// redropped around (L,0) with the same seed-derived offsets.
ScenarioConfig apply_sweep_value(const ScenarioConfig &base, SweepVariable var, double value, std::uint64_t seed);

// Restricts a configuration to the given variant (R = 0 for the baseline).
ScenarioConfig apply_variant(const ScenarioConfig &base, const Variant &variant);

struct SweepSpec
{
    SweepVariable variable = SweepVariable::kUserDistanceL;
    std::vector<double> values;
    int trials = 1;
    std::vector<Variant> variants;
    std::uint64_t master_seed = 0;
    int threads = 0;     // 0: hardware concurrency
    bool timing = true;  // false writes runtime_s = 0 so repeated runs are bit-identical
};

struct SweepRow
{
    std::string scenario;
    std::string variant;
    std::string sweep_var;
    double sweep_value = 0.0;
    int trial = 0;
    std::uint64_t seed = 0;
    double wsr = 0.0;
    int iterations = 0;
    bool converged = false;
    double runtime_s = 0.0;
    std::string error; // empty on success
};

struct SweepSummaryRow
{
    std::string variant;
    double sweep_value = 0.0;
    int n = 0;        // successful trials
    int failed = 0;
    double mean = 0.0;
    double std_error = 0.0;
};

struct SweepResult
{
    std::vector<SweepRow> rows; // value-major, then variant, then trial
    std::vector<SweepSummaryRow> summary;

    bool all_ok() const;
    const SweepSummaryRow &cell(const std::string &variant, double value) const;
};

// Channel seed of a trial; shared by every value and variant so comparisons are paired.
std::uint64_t trial_seed(std::uint64_t master, int trial);

SweepResult run_sweep(const SweepSpec &spec, const ScenarioConfig &base);

void write_rows_csv(const SweepResult &result, std::ostream &os);
void write_summary_csv(const SweepResult &result, std::ostream &os);
std::string sweep_to_json(const SweepResult &result);

} // namespace riscf
