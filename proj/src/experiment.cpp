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

#include "riscf/experiment.hpp"

#include "riscf/channel.hpp"
#include "riscf/optimizer.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <stdexcept>
#include <thread>

namespace riscf
{

namespace
{

constexpr double kTwoPi = 2.0 * std::numbers::pi;

ScenarioConfig nominal_defaults()
{
    ScenarioConfig c;
    c.dims = NetworkDims{2, 2, 4, 8, 2, 32, 6};
    c.noise_power = dbm_to_watts(-120.0);
    c.p_max = {1.0, 1.0};
    c.user_weights.assign(4, 1.0);
    c.constraint_set = PhaseConstraint::ideal();
    return c;
}

void write_double(std::ostream &os, double x)
{
    if (std::isnan(x))
        os << "nan";
    else
        os << x;
}

} // namespace

std::vector<Point2> drop_users(int K, Point2 center, double radius, std::uint64_t seed)
{
    Rng rng(substream_seed(seed, StreamTag::kUserDrop));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Point2> out;
    out.reserve(K);
    for (int k = 0; k < K; ++k)
    {
        const double r = radius * std::sqrt(unit(rng));
        const double a = kTwoPi * unit(rng);
        out.push_back({center.x + r * std::cos(a), center.y + r * std::sin(a)});
    }
    return out;
}

ScenarioConfig scenario_fig4(double L, std::uint64_t seed)
{
    if (!(L > 0.0))
        throw std::invalid_argument("L must be positive");
    ScenarioConfig c = nominal_defaults();
    c.name = "fig4";
    c.bs_positions = {{0.0, -20.0}, {80.0, -20.0}};
    c.ris_positions = {{30.0, 3.0}, {50.0, 3.0}};
    c.user_positions = drop_users(c.dims.K, {L, 0.0}, 1.0, seed);
    c.seed = seed;
    return c;
}

ScenarioConfig scenario_fig7(std::uint64_t seed)
{
    ScenarioConfig c = nominal_defaults();
    c.name = "fig7";
    c.dims.R = 8;
    c.p_max = {0.1, 0.1};
    c.bs_positions = {{-10.0, 0.0}, {10.0, 0.0}};
    constexpr double radius = 15.0;
    for (int i = 0; i < c.dims.R; ++i)
    {
        const double a = kTwoPi * i / c.dims.R;
        c.ris_positions.push_back({radius * std::cos(a), radius * std::sin(a)});
    }
    for (int k = 0; k < c.dims.K; ++k)
    {
        const double a = std::numbers::pi / 8.0 + std::numbers::pi / 2.0 * k;
        c.user_positions.push_back({radius * std::cos(a), radius * std::sin(a)});
    }
    c.seed = seed;
    return c;
}

std::string to_string(SweepVariable v)
{
    switch (v)
    {
    case SweepVariable::kUserDistanceL:
        return "user_distance_L";
    case SweepVariable::kBsPower:
        return "bs_power";
    case SweepVariable::kBsAntennasM:
        return "bs_antennas_M";
    case SweepVariable::kUserAntennasU:
        return "user_antennas_U";
    case SweepVariable::kRisElementsN:
        return "ris_elements_N";
    }
    return "unknown";
}

SweepVariable parse_sweep_variable(const std::string &text)
{
    for (SweepVariable v : {SweepVariable::kUserDistanceL, SweepVariable::kBsPower, SweepVariable::kBsAntennasM,
                            SweepVariable::kUserAntennasU, SweepVariable::kRisElementsN})
        if (to_string(v) == text)
            return v;
    if (text == "L")
        return SweepVariable::kUserDistanceL;
    if (text == "M")
        return SweepVariable::kBsAntennasM;
    if (text == "U")
        return SweepVariable::kUserAntennasU;
    if (text == "N")
        return SweepVariable::kRisElementsN;
    throw std::invalid_argument("unknown sweep variable '" + text + "'");
}

Variant Variant::parse(const std::string &text)
{
    std::string lower = text;
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == "noris" || lower == "no_ris" || lower == "no-ris")
        return {true, PhaseConstraint::ideal()};
    return {false, PhaseConstraint::parse(lower)};
}

std::string Variant::label() const { return no_ris ? "noris" : constraint.to_string(); }

ScenarioConfig apply_sweep_value(const ScenarioConfig &base, SweepVariable var, double value, std::uint64_t seed)
{
    ScenarioConfig c = base;
    auto as_count = [&](const char *what) {
        if (!(value >= 1.0) || value != std::floor(value))
            throw std::invalid_argument(std::string(what) + " must be a positive integer");
        return static_cast<int>(value);
    };
    switch (var)
    {
    case SweepVariable::kUserDistanceL:
        if (!(value > 0.0))
            throw std::invalid_argument("L must be positive");
        c.user_positions = drop_users(c.dims.K, {value, 0.0}, 1.0, seed);
        break;
    case SweepVariable::kBsPower:
        std::fill(c.p_max.begin(), c.p_max.end(), db_to_linear(value));
        break;
    case SweepVariable::kBsAntennasM:
        c.dims.M = as_count("M");
        break;
    case SweepVariable::kUserAntennasU:
        c.dims.U = as_count("U");
        break;
    case SweepVariable::kRisElementsN:
        c.dims.N = as_count("N");
        break;
    }
    return c;
}

ScenarioConfig apply_variant(const ScenarioConfig &base, const Variant &variant)
{
    ScenarioConfig c = base;
    if (variant.no_ris)
    {
        c.dims.R = 0;
        c.ris_positions.clear();
        c.constraint_set = PhaseConstraint::ideal();
    }
    else
    {
        c.constraint_set = variant.constraint;
    }
    return c;
}

bool SweepResult::all_ok() const
{
    return std::all_of(rows.begin(), rows.end(), [](const SweepRow &r) { return r.error.empty(); });
}

const SweepSummaryRow &SweepResult::cell(const std::string &variant, double value) const
{
    for (const SweepSummaryRow &s : summary)
        if (s.variant == variant && s.sweep_value == value)
            return s;
    throw std::out_of_range("no summary cell for " + variant);
}

std::uint64_t trial_seed(std::uint64_t master, int trial)
{
    return substream_seed(master, StreamTag::kSweep, static_cast<std::uint64_t>(trial));
}

SweepResult run_sweep(const SweepSpec &spec, const ScenarioConfig &base)
{
    if (spec.values.empty())
        throw std::invalid_argument("sweep needs at least one value");
    if (spec.trials < 1)
        throw std::invalid_argument("sweep needs at least one trial");
    if (spec.variants.empty())
        throw std::invalid_argument("sweep needs at least one variant");

    const std::size_t n_var = spec.variants.size();
    const std::size_t n_cells = spec.values.size() * n_var * spec.trials;
    SweepResult out;
    out.rows.resize(n_cells);

    auto run_cell = [&](std::size_t idx) {
        const std::size_t trial = idx % spec.trials;
        const std::size_t vi = (idx / spec.trials) % n_var;
        const std::size_t xi = idx / (spec.trials * n_var);
        SweepRow &row = out.rows[idx];
        row.scenario = base.name;
        row.variant = spec.variants[vi].label();
        row.sweep_var = to_string(spec.variable);
        row.sweep_value = spec.values[xi];
        row.trial = static_cast<int>(trial);
        row.seed = trial_seed(spec.master_seed, static_cast<int>(trial));
        const auto t0 = std::chrono::steady_clock::now();
        try
        {
            ScenarioConfig cfg =
                apply_variant(apply_sweep_value(base, spec.variable, row.sweep_value, row.seed), spec.variants[vi]);
            cfg.seed = row.seed;
            const ChannelSet cs = generate_channel_set(cfg, row.seed);
            const OptimizerResult res = run(cfg, cs);
            row.wsr = res.report.wsr;
            row.iterations = res.trace.iterations;
            row.converged = res.trace.converged;
        }
        catch (const std::exception &e)
        {
            row.wsr = std::numeric_limits<double>::quiet_NaN();
            row.error = e.what();
        }
        if (spec.timing)
            row.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };

    int threads = spec.threads > 0 ? spec.threads : static_cast<int>(std::thread::hardware_concurrency());
    threads = std::clamp(threads, 1, static_cast<int>(n_cells));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n_cells; i = next++)
            run_cell(i);
    };
    if (threads == 1)
    {
        worker();
    }
    else
    {
        std::vector<std::thread> pool;
        for (int i = 0; i < threads; ++i)
            pool.emplace_back(worker);
        for (std::thread &t : pool)
            t.join();
    }

    for (double value : spec.values)
        for (const Variant &v : spec.variants)
        {
            SweepSummaryRow s;
            s.variant = v.label();
            s.sweep_value = value;
            double sum = 0.0, sum_sq = 0.0;
            for (const SweepRow &r : out.rows)
                if (r.variant == s.variant && r.sweep_value == value)
                {
                    if (!r.error.empty())
                    {
                        ++s.failed;
                        continue;
                    }
                    ++s.n;
                    sum += r.wsr;
                    sum_sq += r.wsr * r.wsr;
                }
            if (s.n == 0)
            {
                s.mean = s.std_error = std::numeric_limits<double>::quiet_NaN();
            }
            else
            {
                s.mean = sum / s.n;
                const double var = s.n > 1 ? std::max(0.0, (sum_sq - s.n * s.mean * s.mean) / (s.n - 1)) : 0.0;
                s.std_error = std::sqrt(var / s.n);
            }
            out.summary.push_back(s);
        }
    return out;
}

void write_rows_csv(const SweepResult &result, std::ostream &os)
{
    const auto old = os.precision(17);
    os << "scenario,variant,sweep_var,sweep_value,trial,seed,wsr,iterations,converged,runtime_s\n";
    for (const SweepRow &r : result.rows)
    {
        os << r.scenario << ',' << r.variant << ',' << r.sweep_var << ',';
        write_double(os, r.sweep_value);
        os << ',' << r.trial << ',' << r.seed << ',';
        write_double(os, r.wsr);
        os << ',' << r.iterations << ',' << (r.converged ? 1 : 0) << ',' << r.runtime_s << '\n';
    }
    os.precision(old);
}

void write_summary_csv(const SweepResult &result, std::ostream &os)
{
    const auto old = os.precision(17);
    os << "variant,sweep_value,n,failed,mean_wsr,std_error\n";
    for (const SweepSummaryRow &s : result.summary)
    {
        os << s.variant << ',';
        write_double(os, s.sweep_value);
        os << ',' << s.n << ',' << s.failed << ',';
        write_double(os, s.mean);
        os << ',';
        write_double(os, s.std_error);
        os << '\n';
    }
    os.precision(old);
}

std::string sweep_to_json(const SweepResult &result)
{
    auto num = [](double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); };
    nlohmann::json j;
    j["rows"] = nlohmann::json::array();
    for (const SweepRow &r : result.rows)
    {
        nlohmann::json o{{"scenario", r.scenario}, {"variant", r.variant},   {"sweep_var", r.sweep_var},
                         {"sweep_value", r.sweep_value}, {"trial", r.trial}, {"seed", r.seed},
                         {"wsr", num(r.wsr)},         {"iterations", r.iterations}, {"converged", r.converged},
                         {"runtime_s", r.runtime_s}};
        if (!r.error.empty())
            o["error"] = r.error;
        j["rows"].push_back(o);
    }
    j["summary"] = nlohmann::json::array();
    for (const SweepSummaryRow &s : result.summary)
        j["summary"].push_back({{"variant", s.variant}, {"sweep_value", s.sweep_value}, {"n", s.n},
                                {"failed", s.failed}, {"mean_wsr", num(s.mean)}, {"std_error", num(s.std_error)}});
    return j.dump(2);
}

} // namespace riscf
