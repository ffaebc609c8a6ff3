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

#include "riscf/model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace riscf
{

double distance(const Point2 &a, const Point2 &b)
{
    return std::hypot(a.x - b.x, a.y - b.y);
}

PhaseConstraint PhaseConstraint::discrete(int levels)
{
    if (levels < 2)
        throw std::invalid_argument("discrete phase constraint needs at least 2 levels, got " +
                                    std::to_string(levels));
    return PhaseConstraint(Kind::kDiscrete, levels);
}

PhaseConstraint PhaseConstraint::parse(const std::string &text)
{
    std::string t = text;
    std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
    if (t == "f1" || t == "ideal")
        return ideal();
    if (t == "f2" || t == "continuous")
        return continuous();
    if (t.rfind("f3:", 0) == 0)
    {
        std::size_t used = 0;
        int levels = 0;
        try
        {
            levels = std::stoi(t.substr(3), &used);
        }
        catch (const std::exception &)
        {
            throw std::invalid_argument("bad phase constraint '" + text + "'");
        }
        if (used != t.size() - 3)
            throw std::invalid_argument("bad phase constraint '" + text + "'");
        return discrete(levels);
    }
    throw std::invalid_argument("unknown phase constraint '" + text + "' (expected f1, f2 or f3:<L>)");
}

namespace
{
double violation(const PhaseConstraint &c, cdouble z)
{
    const double mag = std::abs(z);
    switch (c.kind())
    {
    case PhaseConstraint::Kind::kIdeal:
        return std::max(0.0, mag - 1.0);
    case PhaseConstraint::Kind::kContinuous:
        return std::abs(mag - 1.0);
    case PhaseConstraint::Kind::kDiscrete:
    {
        double best = kInf;
        for (int l = 0; l < c.levels(); ++l)
        {
            const cdouble point = std::polar(1.0, 2.0 * std::numbers::pi * l / c.levels());
            best = std::min(best, std::abs(z - point));
        }
        return best;
    }
    }
    return kInf;
}
} // namespace

bool PhaseConstraint::contains(cdouble z, double tol) const
{
    return std::isfinite(z.real()) && std::isfinite(z.imag()) && violation(*this, z) <= tol;
}

std::string PhaseConstraint::to_string() const
{
    switch (kind_)
    {
    case Kind::kIdeal:
        return "f1";
    case Kind::kContinuous:
        return "f2";
    case Kind::kDiscrete:
        return "f3:" + std::to_string(levels_);
    }
    return "?";
}

bool ValidationReport::mentions(const std::string &text) const
{
    return std::any_of(issues.begin(), issues.end(),
                       [&](const std::string &s) { return s.find(text) != std::string::npos; });
}

ValidationReport validate(const ScenarioConfig &config)
{
    ValidationReport report;
    auto fail = [&](const std::string &msg) { report.issues.push_back(msg); };
    const NetworkDims &d = config.dims;

    auto positive_dim = [&](int v, const char *name) {
        if (v < 1)
            fail(std::string(name) + " must be ≥ 1 (got " + std::to_string(v) + ")");
    };
    positive_dim(d.B, "B");
    positive_dim(d.K, "K");
    positive_dim(d.M, "M");
    positive_dim(d.U, "U");
    positive_dim(d.N, "N");
    positive_dim(d.P, "P");
    if (d.R < 0)
        fail("R must be ≥ 0 (got " + std::to_string(d.R) + ")");

    auto sized = [&](std::size_t got, int want, const char *name) {
        if (want >= 0 && got != static_cast<std::size_t>(want))
        {
            std::ostringstream os;
            os << name << " has " << got << " entries, expected " << want;
            fail(os.str());
        }
    };
    sized(config.bs_positions.size(), d.B, "bs_positions");
    sized(config.ris_positions.size(), d.R, "ris_positions");
    sized(config.user_positions.size(), d.K, "user_positions");
    sized(config.p_max.size(), d.B, "p_max");
    sized(config.user_weights.size(), d.K, "user_weights");

    for (std::size_t b = 0; b < config.p_max.size(); ++b)
        if (!(config.p_max[b] > 0.0) || !std::isfinite(config.p_max[b]))
            fail("p_max[" + std::to_string(b) + "] must be positive and finite");
    if (!(config.noise_power > 0.0) || !std::isfinite(config.noise_power))
        fail("noise_power must be positive and finite");
    for (std::size_t k = 0; k < config.user_weights.size(); ++k)
        if (!(config.user_weights[k] > 0.0) || !std::isfinite(config.user_weights[k]))
            fail("user_weights[" + std::to_string(k) + "] must be positive and finite");

    const RicianFactors &r = config.rician;
    for (auto [v, name] : {std::pair{r.beta_BR, "beta_BR"}, std::pair{r.beta_Bu, "beta_Bu"},
                           std::pair{r.beta_Ru, "beta_Ru"}})
        if (!(v >= 0.0))
            fail(std::string("rician.") + name + " must be nonnegative or +inf");

    const PathLossParams &pl = config.pathloss;
    for (auto [v, name] : {std::pair{pl.kappa_Bu, "kappa_Bu"}, std::pair{pl.kappa_BR, "kappa_BR"},
                           std::pair{pl.kappa_Ru, "kappa_Ru"}})
        if (!(v > 0.0) || !std::isfinite(v))
            fail(std::string("pathloss.") + name + " must be positive");
    if (!std::isfinite(pl.C_dGG_dB) || !std::isfinite(pl.C_rGG_dB))
        fail("pathloss gains must be finite");

    for (const auto &bs : config.bs_positions)
    {
        for (const auto &u : config.user_positions)
            if (!(distance(bs, u) > 0.0))
                fail("BS-user distance must be positive");
        for (const auto &ris : config.ris_positions)
            if (!(distance(bs, ris) > 0.0))
                fail("BS-RIS distance must be positive");
    }
    for (const auto &ris : config.ris_positions)
        for (const auto &u : config.user_positions)
            if (!(distance(ris, u) > 0.0))
                fail("RIS-user distance must be positive");

    const SolverSettings &s = config.solver;
    if (!(s.dual_tol > 0.0))
        fail("solver.dual_tol must be positive");
    if (s.max_dual_iter < 0)
        fail("solver.max_dual_iter must be ≥ 0");
    if (!(s.rel_tol > 0.0))
        fail("solver.rel_tol must be positive");
    if (s.max_outer < 1)
        fail("solver.max_outer must be ≥ 1");
    if (!(s.init_power_fraction > 0.0 && s.init_power_fraction <= 1.0))
        fail("solver.init_power_fraction must lie in (0, 1]");
    if (!(s.gradient_tol > 0.0) || s.gradient_max_iter < 1)
        fail("solver gradient settings must be positive");
    return report;
}

double dbm_to_watts(double x_dbm) { return std::pow(10.0, (x_dbm - 30.0) / 10.0); }

double db_to_linear(double x_db) { return std::pow(10.0, x_db / 10.0); }

double linear_to_db(double x) { return 10.0 * std::log10(x); }

PrecoderStack::PrecoderStack(const NetworkDims &dims)
    : B_(dims.B), M_(dims.M), P_(dims.P), K_(dims.K), w_(CVec::Zero(dims.precoder_size()))
{
}

PrecoderStack::PrecoderStack(const NetworkDims &dims, CVec w)
    : B_(dims.B), M_(dims.M), P_(dims.P), K_(dims.K), w_(std::move(w))
{
    if (w_.size() != dims.precoder_size())
        throw std::invalid_argument("precoder length " + std::to_string(w_.size()) + " != B*M*P*K = " +
                                    std::to_string(dims.precoder_size()));
}

double PrecoderStack::bs_power(int b) const
{
    double power = 0.0;
    for (int p = 0; p < P_; ++p)
        for (int k = 0; k < K_; ++k)
            power += slice(b, p, k).squaredNorm();
    return power;
}

double PhaseConfig::max_violation() const
{
    double worst = 0.0;
    for (Eigen::Index i = 0; i < theta.size(); ++i)
    {
        const cdouble z = theta[i];
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            return kInf;
        worst = std::max(worst, violation(constraint_set, z));
    }
    return worst;
}

bool PhaseConfig::feasible(double tol) const { return max_violation() <= tol; }

} // namespace riscf
