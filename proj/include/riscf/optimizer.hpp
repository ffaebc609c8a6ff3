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

#include "riscf/channel.hpp"
#include "riscf/metrics.hpp"
#include "riscf/model.hpp"

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace riscf
{

// Raised when an F1 iteration lowers the weighted sum-rate beyond round-off.
class InternalConsistencyError : public std::logic_error
{
  public:
    using std::logic_error::logic_error;
};

struct StartingPoint
{
    PrecoderStack W;
    PhaseConfig theta;
};

// Equal power P_b * init_power_fraction / (P K) on every (b,p,k) slice with i.i.d.
// uniform phases; theta uniform over the constraint set.
StartingPoint initialize(const ScenarioConfig &config, const ChannelSet &cs, Rng &rng);
// Same, on the kInit substream of config.seed.
StartingPoint initialize(const ScenarioConfig &config, const ChannelSet &cs);

struct TraceRow
{
    int iteration = 0;
    double wsr = 0.0;
    double g1_after_w = 0.0;     // sum mu f with the new W and the old theta
    double g1_after_theta = 0.0; // sum mu f with the new W and theta
    double power_violation = 0.0; // max_b (power_b / P_b - 1)+
    double phase_violation = 0.0;
    int active_iterations = 0;
    int passive_iterations = 0;
    double active_kkt = 0.0;
    double passive_kkt = 0.0;
    bool w_kept = false;     // solver output rejected in favour of the previous W
    bool theta_kept = false; // same for theta
    double seconds = 0.0;
};

struct OptimizerTrace
{
    double initial_wsr = 0.0;
    std::vector<TraceRow> rows;
    bool converged = false;
    int iterations = 0;
    // Iterations (1-based) where the WSR decreased; only possible for F2/F3.
    std::vector<int> decreases;

    std::vector<double> wsr_sequence() const; // initial value followed by every row
    void write_csv(std::ostream &os) const;
};

struct OptimizerResult
{
    PrecoderStack W;
    PhaseConfig theta;
    RateReport report;
    OptimizerTrace trace;
};

// Alternating updates rho -> xi -> W -> varpi -> theta until |dR|/R < rel_tol or
// max_outer iterations. With R = 0 only the active steps run.
OptimizerResult run(const ScenarioConfig &config, const ChannelSet &cs);
OptimizerResult run(const ScenarioConfig &config, const ChannelSet &cs, const StartingPoint &start);

} // namespace riscf
