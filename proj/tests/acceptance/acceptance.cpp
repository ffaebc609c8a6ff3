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

// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Everything runs at the published scenario sizes with fixed master seeds.

#include "../oracles.hpp"

#include "riscf/experiment.hpp"
#include "riscf/fp_updates.hpp"
#include "riscf/optimizer.hpp"
#include "riscf/qcqp.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace riscf;

namespace
{

int failures = 0;

void report(int id, bool pass, const std::string &detail)
{
    std::printf("%s criterion %d: %s\n", pass ? "PASS" : "FAIL", id, detail.c_str());
    std::fflush(stdout);
    if (!pass)
        ++failures;
}

template <class... T> std::string fmt(const char *f, T... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

// Runs a criterion body, turning unexpected exceptions into a failure line.
void criterion(int id, const std::function<void()> &body)
{
    try
    {
        body();
    }
    catch (const std::exception &e)
    {
        report(id, false, std::string("exception: ") + e.what());
    }
}

SweepResult sweep(const ScenarioConfig &base, SweepVariable var, std::vector<double> values,
                  std::vector<std::string> variants, int trials, std::uint64_t seed)
{
    SweepSpec spec;
    spec.variable = var;
    spec.values = std::move(values);
    for (const std::string &v : variants)
        spec.variants.push_back(Variant::parse(v));
    spec.trials = trials;
    spec.master_seed = seed;
    return run_sweep(spec, base);
}

std::string first_error(const SweepResult &r)
{
    for (const SweepRow &row : r.rows)
        if (!row.error.empty())
            return row.error;
    return "";
}

// A random small optimization state (B<=2, M<=3, K<=2, P<=2, R<=1, N<=4) at a realistic
// operating point: random channels, random precoder and phases, auxiliaries from them.
struct SmallState
{
    NetworkDims d;
    ChannelSet cs;
    CVec theta;
    PrecoderStack W;
    std::vector<double> eta;
    double noise = 1.0;
    RMat mu;
};

SmallState small_state(Rng &rng, int min_R, oracle::DimLimits lim = {2, 1, 2, 3, 2, 4, 2})
{
    SmallState s;
    s.d = oracle::random_dims(rng, lim, min_R);
    s.cs = oracle::random_channels(s.d, rng);
    s.theta = oracle::random_theta(s.d.phase_size(), rng);
    s.W = oracle::random_precoder(s.d, rng);
    s.eta = oracle::random_weights(s.d.K, rng);
    s.noise = oracle::uniform(rng, 0.2, 2.0);
    s.mu = compute_mu(update_rho(EffectiveChannels(s.cs, s.theta), s.W, s.noise), s.eta);
    return s;
}

// ---- 1 ------------------------------------------------------------------
void convergence_speed()
{
    ScenarioConfig base = scenario_fig4(25.0);
    base.solver = SolverSettings::coarse();
    const SweepResult r = sweep(base, SweepVariable::kUserDistanceL, {25.0}, {"f1", "noris"}, 10, 1001);
    int worst_f1 = 0, worst_noris = 0;
    double slowest = 0.0;
    bool ok = r.all_ok();
    for (const SweepRow &row : r.rows)
    {
        slowest = std::max(slowest, row.runtime_s);
        if (row.variant == "f1")
        {
            worst_f1 = std::max(worst_f1, row.iterations);
            ok = ok && row.converged && row.iterations <= 15;
        }
        else
        {
            worst_noris = std::max(worst_noris, row.iterations);
            ok = ok && row.converged && row.iterations <= 12;
        }
    }
    ok = ok && slowest < 60.0;
    report(1, ok,
           fmt("fig4 L=25, 10 seeds, 2%% rule: max F1 iterations %d (<= 15), max no-RIS iterations %d (<= 12), "
               "slowest run %.2f s (< 60 s)%s",
               worst_f1, worst_noris, slowest, r.all_ok() ? "" : (" error: " + first_error(r)).c_str()));
}

// ---- 2 ------------------------------------------------------------------
void monotonicity()
{
    int runs = 0, bad = 0;
    double worst_drop = 0.0;
    for (int s = 0; s < 20; ++s)
    {
        const std::uint64_t seed = trial_seed(2002, s);
        ScenarioConfig c = s < 10 ? scenario_fig4(25.0 + 3.5 * s, seed) : scenario_fig7(seed);
        c.solver.max_outer = 40;
        c.solver.rel_tol = 1e-4;
        try
        {
            const OptimizerResult r = run(c, generate_channel_set(c, seed));
            const auto seq = r.trace.wsr_sequence();
            for (std::size_t t = 1; t < seq.size(); ++t)
            {
                worst_drop = std::max(worst_drop, seq[t - 1] - seq[t]);
                if (seq[t] < seq[t - 1] - 1e-9)
                    ++bad;
            }
        }
        catch (const InternalConsistencyError &)
        {
            ++bad;
        }
        ++runs;
    }
    report(2, bad == 0,
           fmt("%d F1 runs (10 fig4, 10 fig7): %d decreasing steps, largest decrease %.3g bit/s/Hz", runs, bad,
               worst_drop));
}

// ---- 3 and 4 ------------------------------------------------------------
void distance_sweep()
{
    const std::vector<double> L{20, 25, 30, 40, 50, 60};
    const SweepResult r =
        sweep(scenario_fig4(25.0), SweepVariable::kUserDistanceL, L, {"f1", "f2", "noris"}, 20, 3003);
    if (!r.all_ok())
    {
        report(3, false, "sweep cell failed: " + first_error(r));
        report(4, false, "sweep cell failed: " + first_error(r));
        return;
    }
    auto m = [&](const char *v, double x) { return r.cell(v, x).mean; };
    auto se = [&](const char *v, double x) { return r.cell(v, x).std_error; };

    const bool peaks = m("f1", 30) > m("f1", 40) && m("f1", 30) > m("f1", 60) && m("f1", 50) > m("f1", 40) &&
                       m("f1", 50) > m("f1", 60);
    bool baseline_nonincreasing = true;
    std::ostringstream means;
    means.precision(4);
    for (std::size_t i = 0; i < L.size(); ++i)
    {
        means << " L=" << L[i] << ": f1 " << m("f1", L[i]) << ", noris " << m("noris", L[i]) << " (se "
              << se("noris", L[i]) << ");";
        if (i > 0 && m("noris", L[i]) > m("noris", L[i - 1]) + std::max(se("noris", L[i]), se("noris", L[i - 1])))
            baseline_nonincreasing = false;
    }
    report(3, peaks && baseline_nonincreasing,
           fmt("F1 peaks at 30 and 50 over 40 and 60: %s; no-RIS nonincreasing in L within one SE: %s;",
               peaks ? "yes" : "no", baseline_nonincreasing ? "yes" : "no") +
               means.str());

    double worst = 0.0;
    for (double x : L)
        worst = std::max(worst, std::abs(m("f2", x) - m("f1", x)) / m("f1", x));
    report(4, worst <= 0.03, fmt("largest |F2 - F1| / F1 over the L sweep: %.3f%% (<= 3%%)", 100.0 * worst));
}

// ---- 5 ------------------------------------------------------------------
void quantization_loss()
{
    const SweepResult r = sweep(scenario_fig7(), SweepVariable::kRisElementsN, {32, 64}, {"f1", "f3:4"}, 20, 5005);
    if (!r.all_ok())
    {
        report(5, false, "sweep cell failed: " + first_error(r));
        return;
    }
    auto loss = [&](double n) { return (r.cell("f1", n).mean - r.cell("f3:4", n).mean) / r.cell("f1", n).mean; };
    const double l32 = loss(32), l64 = loss(64);
    report(5, l64 > l32 && l32 >= 0.02 && l32 <= 0.12,
           fmt("2-bit loss vs F1: N=32 %.2f%% (band 2-12%%), N=64 %.2f%% (must exceed N=32); F1 means %.2f / %.2f",
               100.0 * l32, 100.0 * l64, r.cell("f1", 32.0).mean, r.cell("f1", 64.0).mean));
}

// ---- 6 ------------------------------------------------------------------
void subproblem_oracles()
{
    Rng rng(6006);
    int active_beaten = 0, passive_beaten = 0;
    double worst_kkt = 0.0;
    for (int inst = 0; inst < 50; ++inst)
    {
        const SmallState s = small_state(rng, 1);
        const EffectiveChannels eff(s.cs, s.theta);
        const auto xi = update_xi(eff, s.W, s.mu, s.noise);
        std::vector<double> p_max(s.d.B);
        for (double &p : p_max)
            p = oracle::uniform(rng, 0.1, 2.0);
        const ActiveQcqp aq = assemble_active(eff, xi, s.mu, s.noise, p_max, s.d);
        const ActiveSolution as = solve_active(aq);
        worst_kkt = std::max(worst_kkt, as.kkt.worst());
        const double a_best = aq.objective(as.W.vector());
        for (int k = 0; k < 1000; ++k)
        {
            const PrecoderStack X = oracle::random_feasible_precoder(s.d, p_max, rng);
            if (aq.objective(X.vector()) > a_best + 1e-6 * std::max(1.0, std::abs(a_best)))
            {
                ++active_beaten;
                break;
            }
        }

        const auto varpi = update_varpi(s.cs, s.theta, s.W, s.mu, s.noise);
        const PassiveQcqp pq = assemble_passive(s.cs, s.W, varpi, s.mu, s.noise);
        const PassiveSolution ps = solve_passive(pq, PhaseConstraint::ideal());
        worst_kkt = std::max(worst_kkt, ps.kkt.worst());
        const double p_best = pq.objective(ps.theta.theta);
        for (int k = 0; k < 1000; ++k)
        {
            CVec t = oracle::random_theta(pq.size(), rng);
            if (k % 2 == 0)
                t = t.cwiseQuotient(t.cwiseAbs().cast<cdouble>());
            if (pq.objective(t) > p_best + 1e-6 * std::max(1.0, std::abs(p_best)))
            {
                ++passive_beaten;
                break;
            }
        }
    }
    report(6, active_beaten == 0 && passive_beaten == 0 && worst_kkt <= 1e-6,
           fmt("50 instances x 1000 samples: active beaten %d times, passive beaten %d times, worst KKT residual "
               "%.2e (<= 1e-6)",
               active_beaten, passive_beaten, worst_kkt));
}

// ---- 7 ------------------------------------------------------------------
void transform_tightness()
{
    Rng rng(7007);
    double worst_rho = 0.0, worst_xi = 0.0, worst_varpi = 0.0;
    for (int inst = 0; inst < 100; ++inst)
    {
        const SmallState s = small_state(rng, 1, {});
        const EffectiveChannels eff(s.cs, s.theta);
        const RMat rho = update_rho(eff, s.W, s.noise);
        worst_rho = std::max(worst_rho, oracle::rel_diff(lagrangian_objective(eff, s.W, rho, s.eta, s.noise),
                                                         wsr(eff, s.W, s.eta, s.noise).wsr));
        const double g1 = eval_g1(eff, s.W, s.mu, s.noise);
        worst_xi = std::max(worst_xi, oracle::rel_diff(eval_g2(eff, s.W, update_xi(eff, s.W, s.mu, s.noise), s.mu, s.noise), g1));
        const auto varpi = update_varpi(s.cs, s.theta, s.W, s.mu, s.noise);
        worst_varpi = std::max(worst_varpi, oracle::rel_diff(eval_g5(s.cs, s.theta, s.W, varpi, s.mu, s.noise), g1));
    }
    const double worst = std::max({worst_rho, worst_xi, worst_varpi});
    report(7, worst <= 1e-9,
           fmt("100 instances, worst relative gap: rho %.1e, xi %.1e, varpi %.1e (<= 1e-9)", worst_rho, worst_xi,
               worst_varpi));
}

// ---- 8 ------------------------------------------------------------------
void selection_power()
{
    Rng rng(8008);
    double worst = 0.0;
    for (int inst = 0; inst < 100; ++inst)
    {
        ActiveQcqp q;
        q.dims = oracle::random_dims(rng, {4, 0, 3, 4, 1, 1, 3});
        const PrecoderStack W = oracle::random_precoder(q.dims, rng);
        for (int b = 0; b < q.dims.B; ++b)
        {
            const double quad = (W.vector().adjoint() * q.selection_matrix(b).cast<cdouble>() * W.vector())(0, 0).real();
            double direct = 0.0;
            for (int p = 0; p < q.dims.P; ++p)
                for (int k = 0; k < q.dims.K; ++k)
                    direct += W.slice(b, p, k).squaredNorm();
            worst = std::max(worst, std::abs(quad - direct) / direct);
        }
    }
    report(8, worst <= 1e-12, fmt("100 instances: worst relative gap %.1e (<= 1e-12)", worst));
}

// ---- 9 ------------------------------------------------------------------
void exhaustive_discrete()
{
    Rng rng(9009);
    double worst = -kInf;
    for (int inst = 0; inst < 10; ++inst)
    {
        oracle::DimLimits lim{2, 1, 2, 3, 2, 2, 2};
        SmallState s;
        do
            s = small_state(rng, 1, lim);
        while (s.d.N != 2);
        const auto varpi = update_varpi(s.cs, s.theta, s.W, s.mu, s.noise);
        const PassiveQcqp q = assemble_passive(s.cs, s.W, varpi, s.mu, s.noise);
        const PassiveSolution sol = solve_passive(q, PhaseConstraint::discrete(2));
        double best = -kInf;
        for (double a : {1.0, -1.0})
            for (double b : {1.0, -1.0})
                best = std::max(best, q.objective((CVec(2) << a, b).finished()));
        worst = std::max(worst, best - q.objective(sol.relaxed));
    }
    report(9, worst <= 1e-8,
           fmt("10 instances R=1, N=2, L=2: max(exhaustive best - relaxed optimum) = %.2e (<= 1e-8)", worst));
}

// ---- 10 -----------------------------------------------------------------
void signal_model()
{
    Rng rng(10010);
    double worst = 0.0;
    for (int inst = 0; inst < 5; ++inst)
    {
        const NetworkDims d{2, 1, 2, 2, 2, 3, 2};
        const ChannelSet cs = oracle::random_channels(d, rng);
        const CVec theta = oracle::random_theta(d.phase_size(), rng);
        const PrecoderStack W = oracle::random_precoder(d, rng, 0.5);
        const int k = inst % d.K, p = inst % d.P;
        const double analytic = sinr(cs, theta, W, k, p, 1.0);
        const SignalSimulation sim = simulate_received_signal(cs, theta, W, k, p, 1.0, 100000, rng);
        worst = std::max(worst, std::abs(sim.empirical_sinr - analytic) / analytic);
    }
    report(10, worst <= 0.05, fmt("5 instances, 1e5 trials: worst relative SINR error %.2f%% (<= 5%%)", 100.0 * worst));
}

// ---- 11 -----------------------------------------------------------------
void monotone_trends()
{
    struct Case
    {
        SweepVariable var;
        std::vector<double> values;
        bool strict;
    };
    const std::vector<Case> cases{{SweepVariable::kBsAntennasM, {4, 8, 16}, false},
                                  {SweepVariable::kUserAntennasU, {1, 2, 4}, false},
                                  {SweepVariable::kRisElementsN, {16, 32, 64}, false},
                                  {SweepVariable::kBsPower, {-40, -20, 0, 10}, true}};
    bool ok = true;
    std::ostringstream detail;
    detail.precision(4);
    for (const Case &c : cases)
    {
        const SweepResult r = sweep(scenario_fig7(), c.var, c.values, {"f1"}, 10, 11011);
        if (!r.all_ok())
        {
            ok = false;
            detail << ' ' << to_string(c.var) << " failed: " << first_error(r) << ';';
            continue;
        }
        bool trend = true;
        detail << ' ' << to_string(c.var) << ':';
        for (std::size_t i = 0; i < c.values.size(); ++i)
        {
            const SweepSummaryRow &cur = r.cell("f1", c.values[i]);
            detail << ' ' << cur.mean;
            if (i == 0)
                continue;
            const SweepSummaryRow &prev = r.cell("f1", c.values[i - 1]);
            if (c.strict ? !(cur.mean > prev.mean)
                         : cur.mean < prev.mean - std::max(cur.std_error, prev.std_error))
                trend = false;
        }
        detail << (trend ? " ok;" : " violated;");
        ok = ok && trend;
    }
    report(11, ok, "fig7, 10 paired trials per value, F1 means:" + detail.str());
}

} // namespace

int main()
{
    const auto t0 = std::chrono::steady_clock::now();
    criterion(1, convergence_speed);
    criterion(2, monotonicity);
    criterion(3, distance_sweep); // also reports criterion 4
    criterion(5, quantization_loss);
    criterion(6, subproblem_oracles);
    criterion(7, transform_tightness);
    criterion(8, selection_power);
    criterion(9, exhaustive_discrete);
    criterion(10, signal_model);
    criterion(11, monotone_trends);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%d criteria failed (%.1f s)\n", failures, secs);
    return failures == 0 ? 0 : 1;
}
