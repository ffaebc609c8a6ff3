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

#include "riscf/optimizer.hpp"

#include "riscf/fp_updates.hpp"
#include "riscf/qcqp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

namespace riscf
{

namespace
{

double power_violation(const PrecoderStack &W, const std::vector<double> &p_max)
{
    double worst = 0.0;
    for (int b = 0; b < W.B(); ++b)
        worst = std::max(worst, W.bs_power(b) / p_max[b] - 1.0);
    return worst;
}

template <class F> auto with_context(int iteration, const char *step, F &&f)
{
    try
    {
        return f();
    }
    catch (const EllipsoidNotConverged &e)
    {
        std::ostringstream os;
        os << "outer iteration " << iteration << ", " << step << ": " << e.what();
        throw EllipsoidNotConverged(os.str(), e.iterations(), e.residual());
    }
}

} // namespace

StartingPoint initialize(const ScenarioConfig &config, const ChannelSet &cs, Rng &rng)
{
    const NetworkDims &d = config.dims;
    if (!(cs.dims() == d))
        throw std::invalid_argument("channel set dimensions do not match the config");
    constexpr double two_pi = 2.0 * std::numbers::pi;
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    StartingPoint s{PrecoderStack(d), PhaseConfig{CVec(d.phase_size()), config.constraint_set}};
    for (int p = 0; p < d.P; ++p)
        for (int k = 0; k < d.K; ++k)
            for (int b = 0; b < d.B; ++b)
            {
                const double slice_power = config.p_max[b] * config.solver.init_power_fraction / (d.P * d.K);
                const double amp = std::sqrt(slice_power / d.M);
                auto w = s.W.slice(b, p, k);
                for (int m = 0; m < d.M; ++m)
                    w[m] = std::polar(amp, two_pi * unit(rng));
            }

    const PhaseConstraint &c = config.constraint_set;
    for (long j = 0; j < d.phase_size(); ++j)
    {
        switch (c.kind())
        {
        case PhaseConstraint::Kind::kIdeal: {
            const double r = std::sqrt(unit(rng));
            s.theta.theta[j] = std::polar(r, two_pi * unit(rng));
            break;
        }
        case PhaseConstraint::Kind::kContinuous:
            s.theta.theta[j] = std::polar(1.0, two_pi * unit(rng));
            break;
        case PhaseConstraint::Kind::kDiscrete: {
            std::uniform_int_distribution<int> level(0, c.levels() - 1);
            const int l = level(rng);
            s.theta.theta[j] = l == 0 ? cdouble(1.0) : std::polar(1.0, two_pi * l / c.levels());
            break;
        }
        }
    }
    return s;
}

StartingPoint initialize(const ScenarioConfig &config, const ChannelSet &cs)
{
    Rng rng(substream_seed(config.seed, StreamTag::kInit));
    return initialize(config, cs, rng);
}

std::vector<double> OptimizerTrace::wsr_sequence() const
{
    std::vector<double> out{initial_wsr};
    for (const TraceRow &r : rows)
        out.push_back(r.wsr);
    return out;
}

void OptimizerTrace::write_csv(std::ostream &os) const
{
    os << "iteration,wsr,g1_after_w,g1_after_theta,power_violation,phase_violation,active_iterations,"
          "passive_iterations,active_kkt,passive_kkt,w_kept,theta_kept,seconds\n";
    const auto old_precision = os.precision(17);
    os << 0 << ',' << initial_wsr << ",,,,,,,,,,,\n";
    for (const TraceRow &r : rows)
        os << r.iteration << ',' << r.wsr << ',' << r.g1_after_w << ',' << r.g1_after_theta << ','
           << r.power_violation << ',' << r.phase_violation << ',' << r.active_iterations << ','
           << r.passive_iterations << ',' << r.active_kkt << ',' << r.passive_kkt << ',' << int(r.w_kept) << ','
           << int(r.theta_kept) << ',' << r.seconds << '\n';
    os.precision(old_precision);
}

OptimizerResult run(const ScenarioConfig &config, const ChannelSet &cs)
{
    return run(config, cs, initialize(config, cs));
}

OptimizerResult run(const ScenarioConfig &config, const ChannelSet &cs, const StartingPoint &start)
{
    const ValidationReport report = validate(config);
    if (!report.ok())
        throw std::invalid_argument("invalid scenario: " + report.issues.front());
    const NetworkDims &d = config.dims;
    if (!(cs.dims() == d))
        throw std::invalid_argument("channel set dimensions do not match the config");

    const SolverSettings &s = config.solver;
    const double noise = config.noise_power;
    const bool monotone = config.constraint_set.is_convex();
    const PassiveOptions passive_opts = PassiveOptions::from(s);
    using clock = std::chrono::steady_clock;

    OptimizerResult res{start.W, start.theta, {}, {}};
    res.theta.constraint_set = config.constraint_set;
    EffectiveChannels eff(cs, res.theta.theta);
    res.report = wsr(eff, res.W, config.user_weights, noise);
    res.trace.initial_wsr = res.report.wsr;

    OptimizerResult best = res;
    double previous = res.report.wsr;

    for (int t = 1; t <= s.max_outer; ++t)
    {
        const auto t0 = clock::now();
        TraceRow row;
        row.iteration = t;

        const RMat rho = update_rho(eff, res.W, noise);
        const RMat mu = compute_mu(rho, config.user_weights);
        const std::vector<CVec> xi = update_xi(eff, res.W, mu, noise);

        const ActiveQcqp aq = assemble_active(eff, xi, mu, noise, config.p_max, d);
        const ActiveSolution as =
            with_context(t, "active step", [&] { return solve_active(aq, s.dual_tol, s.max_dual_iter); });
        row.active_iterations = as.iterations;
        row.active_kkt = as.kkt.worst();
        const double deficit_before = g1_deficit(eff, res.W, mu, noise);
        if (g1_deficit(eff, as.W, mu, noise) <= deficit_before)
            res.W = as.W;
        else
            row.w_kept = true;
        row.g1_after_w = eval_g1(eff, res.W, mu, noise);

        const double rate_now = wsr(eff, res.W, config.user_weights, noise).wsr;
        if (d.R > 0 && rate_now > 0.0)
        {
            const std::vector<CVec> varpi = update_varpi(cs, res.theta.theta, res.W, mu, noise);
            const PassiveQcqp pq = assemble_passive(cs, res.W, varpi, mu, noise);
            const PassiveSolution ps = with_context(
                t, "passive step", [&] { return solve_passive(pq, config.constraint_set, passive_opts, &res.theta.theta); });
            row.passive_iterations = ps.iterations;
            row.passive_kkt = ps.kkt.worst();
            EffectiveChannels trial(cs, ps.theta.theta);
            if (!monotone || g1_deficit(trial, res.W, mu, noise) <= g1_deficit(eff, res.W, mu, noise))
            {
                res.theta = ps.theta;
                eff = std::move(trial);
            }
            else
                row.theta_kept = true;
        }
        row.g1_after_theta = eval_g1(eff, res.W, mu, noise);

        res.report = wsr(eff, res.W, config.user_weights, noise);
        row.wsr = res.report.wsr;
        row.power_violation = power_violation(res.W, config.p_max);
        row.phase_violation = res.theta.max_violation();
        row.seconds = std::chrono::duration<double>(clock::now() - t0).count();
        res.trace.rows.push_back(row);
        res.trace.iterations = t;

        if (row.wsr < previous)
        {
            if (monotone && row.wsr < previous - 1e-9 * std::max(1.0, std::abs(previous)))
            {
                std::ostringstream os;
                os.precision(17);
                os << "weighted sum-rate decreased at outer iteration " << t << ": " << previous << " -> "
                   << row.wsr;
                throw InternalConsistencyError(os.str());
            }
            if (!monotone)
                res.trace.decreases.push_back(t);
        }
        if (row.wsr > best.report.wsr)
        {
            best.W = res.W;
            best.theta = res.theta;
            best.report = res.report;
        }

        const double change = std::abs(row.wsr - previous);
        previous = row.wsr;
        if (change <= s.rel_tol * std::abs(row.wsr))
        {
            res.trace.converged = true;
            break;
        }
    }

    if (!monotone && best.report.wsr > res.report.wsr)
    {
        res.W = best.W;
        res.theta = best.theta;
        res.report = best.report;
    }
    return res;
}

} // namespace riscf
