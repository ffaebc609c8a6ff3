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

// Command-line front end: validate configs, run one scenario, or sweep a parameter.

#include "riscf/channel.hpp"
#include "riscf/config_io.hpp"
#include "riscf/experiment.hpp"
#include "riscf/optimizer.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>

using namespace riscf;

namespace
{

struct ScenarioArgs
{
    std::string config_path;
    std::string scenario = "fig4";
    double L = 25.0;
    std::optional<std::uint64_t> seed;
    std::string variant;
    bool coarse = false;
};

void add_scenario_options(CLI::App *cmd, ScenarioArgs &a)
{
    cmd->add_option("--config", a.config_path, "Scenario config (JSON)")->check(CLI::ExistingFile);
    cmd->add_option("--scenario", a.scenario, "Built-in scenario when no config is given")
        ->check(CLI::IsMember({"fig4", "fig7"}));
    cmd->add_option("--L", a.L, "User-cluster distance for fig4 (m)")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", a.seed, "Master seed");
    cmd->add_flag("--coarse", a.coarse, "Stop at 2 % relative WSR change");
}

ScenarioConfig build_config(const ScenarioArgs &a)
{
    const std::uint64_t seed = a.seed.value_or(0);
    ScenarioConfig c;
    if (!a.config_path.empty())
        c = load_config(a.config_path);
    else
        c = a.scenario == "fig7" ? scenario_fig7(seed) : scenario_fig4(a.L, seed);
    if (a.seed)
        c.seed = *a.seed;
    if (!a.variant.empty())
        c = apply_variant(c, Variant::parse(a.variant));
    if (a.coarse)
        c.solver.rel_tol = SolverSettings::coarse().rel_tol;
    return c;
}

int cmd_validate(const ScenarioArgs &a)
{
    const ScenarioConfig c = build_config(a);
    const ValidationReport r = validate(c);
    for (const std::string &issue : r.issues)
        std::cout << issue << '\n';
    if (r.ok())
        std::cout << "ok\n";
    return r.ok() ? 0 : 1;
}

int cmd_scenario(const ScenarioArgs &a, const std::string &out)
{
    const ScenarioConfig c = build_config(a);
    if (out.empty())
        std::cout << nlohmann::json(c).dump(2) << '\n';
    else
        save_config(c, out);
    return 0;
}

int cmd_run(const ScenarioArgs &a, const std::string &out)
{
    const ScenarioConfig c = build_config(a);
    const ChannelSet cs = generate_channel_set(c);
    const OptimizerResult res = run(c, cs);

    nlohmann::json j{{"scenario", c.name},
                     {"variant", c.dims.R == 0 ? std::string("noris") : c.constraint_set.to_string()},
                     {"seed", c.seed},
                     {"wsr", res.report.wsr},
                     {"initial_wsr", res.trace.initial_wsr},
                     {"iterations", res.trace.iterations},
                     {"converged", res.trace.converged}};
    j["user_rates"] = std::vector<double>(res.report.user_rates.data(),
                                          res.report.user_rates.data() + res.report.user_rates.size());
    std::cout << j.dump(2) << '\n';

    if (!out.empty())
    {
        std::ofstream f(out);
        if (!f)
            throw std::runtime_error("cannot write " + out);
        res.trace.write_csv(f);
    }
    return 0;
}

int cmd_sweep(const ScenarioArgs &a, const std::string &var, const std::vector<double> &values, int trials,
              const std::vector<std::string> &variants, int threads, bool no_timing, const std::string &out,
              const std::string &json_out)
{
    const ScenarioConfig base = build_config(a);
    SweepSpec spec;
    spec.variable = parse_sweep_variable(var);
    spec.values = values;
    spec.trials = trials;
    for (const std::string &v : variants)
        spec.variants.push_back(Variant::parse(v));
    if (spec.variants.empty())
        spec.variants.push_back(Variant{false, base.constraint_set});
    spec.master_seed = base.seed;
    spec.threads = threads;
    spec.timing = !no_timing;

    const SweepResult res = run_sweep(spec, base);

    if (out.empty())
    {
        write_rows_csv(res, std::cout);
        write_summary_csv(res, std::cout);
    }
    else
    {
        std::ofstream rows(out);
        if (!rows)
            throw std::runtime_error("cannot write " + out);
        write_rows_csv(res, rows);
        std::string stem = out;
        if (stem.size() > 4 && stem.substr(stem.size() - 4) == ".csv")
            stem.resize(stem.size() - 4);
        std::ofstream summary(stem + "_summary.csv");
        write_summary_csv(res, summary);
        write_summary_csv(res, std::cout);
    }
    if (!json_out.empty())
    {
        std::ofstream j(json_out);
        j << sweep_to_json(res) << '\n';
    }
    for (const SweepRow &r : res.rows)
        if (!r.error.empty())
            std::cerr << "cell " << r.variant << " @ " << r.sweep_value << " trial " << r.trial
                      << " failed: " << r.error << '\n';
    return res.all_ok() ? 0 : 2;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"riscf: joint precoding for RIS-aided cell-free networks"};
    app.require_subcommand(1);

    ScenarioArgs args;
    std::string out, json_out, var = "user_distance_L";
    std::vector<double> values;
    std::vector<std::string> variants;
    int trials = 1, threads = 0;
    bool no_timing = false;

    CLI::App *validate_cmd = app.add_subcommand("validate", "Check a scenario config");
    add_scenario_options(validate_cmd, args);

    CLI::App *scenario_cmd = app.add_subcommand("scenario", "Write a built-in scenario as a config file");
    add_scenario_options(scenario_cmd, args);
    scenario_cmd->add_option("--out", out, "Output path (stdout if omitted)");

    CLI::App *run_cmd = app.add_subcommand("run", "Optimize one channel realization");
    add_scenario_options(run_cmd, args);
    run_cmd->add_option("--variant", args.variant, "f1 | f2 | f3:L | noris");
    run_cmd->add_option("--out", out, "Per-iteration trace CSV");

    CLI::App *sweep_cmd = app.add_subcommand("sweep", "Monte-Carlo sweep of one parameter");
    add_scenario_options(sweep_cmd, args);
    sweep_cmd->add_option("--var", var, "user_distance_L | bs_power | bs_antennas_M | user_antennas_U | ris_elements_N");
    sweep_cmd->add_option("--values", values, "Sweep values")->required()->delimiter(',');
    sweep_cmd->add_option("--trials", trials, "Channel realizations per value")->check(CLI::PositiveNumber);
    sweep_cmd->add_option("--variant", variants, "f1 | f2 | f3:L | noris (repeatable)")->delimiter(',');
    sweep_cmd->add_option("--threads", threads, "Worker threads (0: all cores)");
    sweep_cmd->add_flag("--no-timing", no_timing, "Write runtime_s = 0 for reproducible files");
    sweep_cmd->add_option("--out", out, "Raw rows CSV; the summary goes next to it");
    sweep_cmd->add_option("--json", json_out, "Optional JSON mirror");

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (*validate_cmd)
            return cmd_validate(args);
        if (*scenario_cmd)
            return cmd_scenario(args, out);
        if (*run_cmd)
            return cmd_run(args, out);
        return cmd_sweep(args, var, values, trials, variants, threads, no_timing, out, json_out);
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
