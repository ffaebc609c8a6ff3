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

#include "riscf/config_io.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

using nlohmann::json;

namespace riscf
{

namespace
{

json real_or_inf(double v)
{
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    return v;
}

double read_real(const json &j)
{
    if (j.is_string())
    {
        const auto s = j.get<std::string>();
        if (s == "inf" || s == "+inf" || s == "Infinity")
            return kInf;
        if (s == "-inf")
            return -kInf;
        throw std::invalid_argument("expected a number or \"inf\", got \"" + s + "\"");
    }
    return j.get<double>();
}

json points_to_json(const std::vector<Point2> &pts)
{
    json out = json::array();
    for (const auto &p : pts)
        out.push_back({p.x, p.y});
    return out;
}

std::vector<Point2> points_from_json(const json &j)
{
    std::vector<Point2> pts;
    for (const auto &item : j)
    {
        if (!item.is_array() || item.size() != 2)
            throw std::invalid_argument("positions must be [x, y] pairs");
        pts.push_back({item[0].get<double>(), item[1].get<double>()});
    }
    return pts;
}

const char *method_name(PassiveMethod m)
{
    switch (m)
    {
    case PassiveMethod::kAuto:
        return "auto";
    case PassiveMethod::kEllipsoid:
        return "ellipsoid";
    case PassiveMethod::kProjectedGradient:
        return "projected_gradient";
    }
    return "auto";
}

PassiveMethod method_from_name(const std::string &s)
{
    if (s == "auto")
        return PassiveMethod::kAuto;
    if (s == "ellipsoid")
        return PassiveMethod::kEllipsoid;
    if (s == "projected_gradient")
        return PassiveMethod::kProjectedGradient;
    throw std::invalid_argument("unknown passive_method '" + s + "'");
}

template <typename T> void read_opt(const json &j, const char *key, T &out)
{
    if (j.contains(key))
        out = j.at(key).get<T>();
}

void read_opt_real(const json &j, const char *key, double &out)
{
    if (j.contains(key))
        out = read_real(j.at(key));
}

} // namespace

void to_json(json &j, const ScenarioConfig &c)
{
    const NetworkDims &d = c.dims;
    j = json{
        {"name", c.name},
        {"dims", {{"B", d.B}, {"R", d.R}, {"K", d.K}, {"M", d.M}, {"U", d.U}, {"N", d.N}, {"P", d.P}}},
        {"bs_positions", points_to_json(c.bs_positions)},
        {"ris_positions", points_to_json(c.ris_positions)},
        {"user_positions", points_to_json(c.user_positions)},
        {"p_max", c.p_max},
        {"noise_power", c.noise_power},
        {"user_weights", c.user_weights},
        {"rician",
         {{"beta_BR", real_or_inf(c.rician.beta_BR)},
          {"beta_Bu", real_or_inf(c.rician.beta_Bu)},
          {"beta_Ru", real_or_inf(c.rician.beta_Ru)}}},
        {"pathloss",
         {{"C_dGG_dB", c.pathloss.C_dGG_dB},
          {"C_rGG_dB", c.pathloss.C_rGG_dB},
          {"kappa_Bu", c.pathloss.kappa_Bu},
          {"kappa_BR", c.pathloss.kappa_BR},
          {"kappa_Ru", c.pathloss.kappa_Ru}}},
        {"constraint_set", c.constraint_set.to_string()},
        {"seed", c.seed},
        {"solver",
         {{"dual_tol", c.solver.dual_tol},
          {"max_dual_iter", c.solver.max_dual_iter},
          {"rel_tol", c.solver.rel_tol},
          {"max_outer", c.solver.max_outer},
          {"init_power_fraction", c.solver.init_power_fraction},
          {"passive_method", method_name(c.solver.passive_method)},
          {"ellipsoid_max_dim", c.solver.ellipsoid_max_dim},
          {"gradient_tol", c.solver.gradient_tol},
          {"gradient_max_iter", c.solver.gradient_max_iter}}},
    };
}

void from_json(const json &j, ScenarioConfig &c)
{
    c = ScenarioConfig{};
    read_opt(j, "name", c.name);
    const json &d = j.at("dims");
    c.dims.B = d.at("B").get<int>();
    c.dims.R = d.value("R", 0);
    c.dims.K = d.at("K").get<int>();
    c.dims.M = d.at("M").get<int>();
    c.dims.U = d.at("U").get<int>();
    c.dims.N = d.value("N", 1);
    c.dims.P = d.at("P").get<int>();

    c.bs_positions = points_from_json(j.at("bs_positions"));
    if (j.contains("ris_positions"))
        c.ris_positions = points_from_json(j.at("ris_positions"));
    c.user_positions = points_from_json(j.at("user_positions"));
    c.p_max = j.at("p_max").get<std::vector<double>>();
    read_opt_real(j, "noise_power", c.noise_power);
    c.user_weights = j.at("user_weights").get<std::vector<double>>();

    if (j.contains("rician"))
    {
        const json &r = j.at("rician");
        read_opt_real(r, "beta_BR", c.rician.beta_BR);
        read_opt_real(r, "beta_Bu", c.rician.beta_Bu);
        read_opt_real(r, "beta_Ru", c.rician.beta_Ru);
    }
    if (j.contains("pathloss"))
    {
        const json &p = j.at("pathloss");
        read_opt_real(p, "C_dGG_dB", c.pathloss.C_dGG_dB);
        read_opt_real(p, "C_rGG_dB", c.pathloss.C_rGG_dB);
        read_opt_real(p, "kappa_Bu", c.pathloss.kappa_Bu);
        read_opt_real(p, "kappa_BR", c.pathloss.kappa_BR);
        read_opt_real(p, "kappa_Ru", c.pathloss.kappa_Ru);
    }
    if (j.contains("constraint_set"))
        c.constraint_set = PhaseConstraint::parse(j.at("constraint_set").get<std::string>());
    read_opt(j, "seed", c.seed);
    if (j.contains("solver"))
    {
        const json &s = j.at("solver");
        read_opt_real(s, "dual_tol", c.solver.dual_tol);
        read_opt(s, "max_dual_iter", c.solver.max_dual_iter);
        read_opt_real(s, "rel_tol", c.solver.rel_tol);
        read_opt(s, "max_outer", c.solver.max_outer);
        read_opt_real(s, "init_power_fraction", c.solver.init_power_fraction);
        if (s.contains("passive_method"))
            c.solver.passive_method = method_from_name(s.at("passive_method").get<std::string>());
        read_opt(s, "ellipsoid_max_dim", c.solver.ellipsoid_max_dim);
        read_opt_real(s, "gradient_tol", c.solver.gradient_tol);
        read_opt(s, "gradient_max_iter", c.solver.gradient_max_iter);
    }
}

ScenarioConfig load_config(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open config '" + path + "'");
    json j;
    try
    {
        in >> j;
    }
    catch (const json::parse_error &e)
    {
        throw std::runtime_error("config '" + path + "': " + e.what());
    }
    return j.get<ScenarioConfig>();
}

void save_config(const ScenarioConfig &config, const std::string &path)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write config '" + path + "'");
    out << json(config).dump(2) << '\n';
}

} // namespace riscf
