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

#include "riscf/channel.hpp"

#include <json.hpp>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace riscf
{

namespace
{

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

double bearing(const Point2 &from, const Point2 &to) { return std::atan2(to.y - from.y, to.x - from.x); }

void check_distance(double d, const char *name)
{
    if (!(d > 0.0) || !std::isfinite(d))
        throw std::domain_error(std::string(name) + " must be positive, got " + std::to_string(d));
}

} // namespace

std::uint64_t substream_seed(std::uint64_t master, StreamTag tag, std::uint64_t i, std::uint64_t j, std::uint64_t l)
{
    std::uint64_t h = splitmix64(master);
    h = splitmix64(h ^ static_cast<std::uint64_t>(tag));
    h = splitmix64(h ^ i);
    h = splitmix64(h ^ (j + 0x1000003ULL));
    h = splitmix64(h ^ (l + 0x2000005ULL));
    return h;
}

CMat complex_gaussian(int rows, int cols, Rng &rng)
{
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    CMat out(rows, cols);
    for (int c = 0; c < cols; ++c)
        for (int r = 0; r < rows; ++r)
        {
            const double re = normal(rng);
            const double im = normal(rng);
            out(r, c) = {re, im};
        }
    return out;
}

CVec steering_vector(int n, double angle)
{
    CVec a(n);
    const double step = std::numbers::pi * std::sin(angle);
    for (int i = 0; i < n; ++i)
        a[i] = std::polar(1.0, step * i);
    return a;
}

CMat los_matrix(int rows, int cols, double arrival_angle, double departure_angle)
{
    return steering_vector(rows, arrival_angle) * steering_vector(cols, departure_angle).adjoint();
}

CMat rician_channel(const CMat &los, double beta, Rng &rng)
{
    if (std::isnan(beta) || beta < 0.0)
        throw std::domain_error("Rician factor must be nonnegative, got " + std::to_string(beta));
    if (std::isinf(beta))
        return los;
    CMat nlos = complex_gaussian(static_cast<int>(los.rows()), static_cast<int>(los.cols()), rng);
    if (beta == 0.0)
        return nlos;
    return std::sqrt(beta / (1.0 + beta)) * los + std::sqrt(1.0 / (1.0 + beta)) * nlos;
}

CMat rician_channel(int rows, int cols, double beta, Rng &rng)
{
    return rician_channel(CMat::Ones(rows, cols), beta, rng);
}

double path_loss_direct(double d_Bu, const PathLossParams &params)
{
    check_distance(d_Bu, "BS-user distance");
    return db_to_linear(params.C_dGG_dB) * std::pow(d_Bu, -params.kappa_Bu);
}

double path_loss_reflected(double d_BR, double d_Ru, const PathLossParams &params)
{
    check_distance(d_BR, "BS-RIS distance");
    check_distance(d_Ru, "RIS-user distance");
    return db_to_linear(params.C_rGG_dB) * std::pow(d_BR, -params.kappa_BR) * std::pow(d_Ru, -params.kappa_Ru);
}

ChannelSet::ChannelSet(const NetworkDims &dims) : dims_(dims)
{
    const auto BK = static_cast<std::size_t>(dims.B) * dims.K * dims.P;
    const auto BR = static_cast<std::size_t>(dims.B) * dims.R * dims.P;
    const auto RK = static_cast<std::size_t>(dims.R) * dims.K * dims.P;
    H_.assign(BK, CMat::Zero(dims.M, dims.U));
    G_.assign(BR, CMat::Zero(dims.N, dims.M));
    F_.assign(RK, CMat::Zero(dims.N, dims.U));
    restack();
}

void ChannelSet::restack()
{
    const NetworkDims &d = dims_;
    const long RN = d.phase_size();
    F_stack_.assign(static_cast<std::size_t>(d.K) * d.P, CMat::Zero(RN, d.U));
    G_stack_.assign(static_cast<std::size_t>(d.B) * d.P, CMat::Zero(RN, d.M));
    for (int p = 0; p < d.P; ++p)
    {
        for (int k = 0; k < d.K; ++k)
        {
            CMat &dst = F_stack_[static_cast<std::size_t>(k) * d.P + p];
            for (int r = 0; r < d.R; ++r)
                dst.middleRows(static_cast<long>(r) * d.N, d.N) = F(r, k, p);
        }
        for (int b = 0; b < d.B; ++b)
        {
            CMat &dst = G_stack_[static_cast<std::size_t>(b) * d.P + p];
            for (int r = 0; r < d.R; ++r)
                dst.middleRows(static_cast<long>(r) * d.N, d.N) = G(b, r, p);
        }
    }
}

bool ChannelSet::operator==(const ChannelSet &other) const
{
    auto same = [](const std::vector<CMat> &a, const std::vector<CMat> &b) {
        if (a.size() != b.size())
            return false;
        for (std::size_t i = 0; i < a.size(); ++i)
            if (a[i].rows() != b[i].rows() || a[i].cols() != b[i].cols() || a[i] != b[i])
                return false;
        return true;
    };
    return dims_ == other.dims_ && same(H_, other.H_) && same(G_, other.G_) && same(F_, other.F_) &&
           same(F_stack_, other.F_stack_) && same(G_stack_, other.G_stack_);
}

ChannelSet generate_channel_set(const ScenarioConfig &config, std::uint64_t seed)
{
    const ValidationReport report = validate(config);
    if (!report.ok())
        throw std::invalid_argument("invalid scenario: " + report.issues.front());

    const NetworkDims &d = config.dims;
    const PathLossParams &pl = config.pathloss;
    ChannelSet cs(d);

    for (int b = 0; b < d.B; ++b)
        for (int k = 0; k < d.K; ++k)
        {
            const Point2 &bs = config.bs_positions[b];
            const Point2 &user = config.user_positions[k];
            const double gain = std::sqrt(path_loss_direct(distance(bs, user), pl));
            // H is M x U; its LoS part is a_M(departure) a_U(arrival)^H.
            const CMat los = los_matrix(d.M, d.U, bearing(bs, user), bearing(user, bs));
            for (int p = 0; p < d.P; ++p)
            {
                Rng rng(substream_seed(seed, StreamTag::kBsUser, b, k, p));
                cs.H(b, k, p) = gain * rician_channel(los, config.rician.beta_Bu, rng);
            }
        }

    for (int b = 0; b < d.B; ++b)
        for (int r = 0; r < d.R; ++r)
        {
            const Point2 &bs = config.bs_positions[b];
            const Point2 &ris = config.ris_positions[r];
            const double d_BR = distance(bs, ris);
            check_distance(d_BR, "BS-RIS distance");
            const double gain = std::sqrt(db_to_linear(pl.C_rGG_dB) * std::pow(d_BR, -pl.kappa_BR));
            const CMat los = los_matrix(d.N, d.M, bearing(ris, bs), bearing(bs, ris));
            for (int p = 0; p < d.P; ++p)
            {
                Rng rng(substream_seed(seed, StreamTag::kBsRis, b, r, p));
                cs.G(b, r, p) = gain * rician_channel(los, config.rician.beta_BR, rng);
            }
        }

    for (int r = 0; r < d.R; ++r)
        for (int k = 0; k < d.K; ++k)
        {
            const Point2 &ris = config.ris_positions[r];
            const Point2 &user = config.user_positions[k];
            const double d_Ru = distance(ris, user);
            check_distance(d_Ru, "RIS-user distance");
            const double gain = std::sqrt(std::pow(d_Ru, -pl.kappa_Ru));
            // F is N x U; the RIS -> user link is F^H.
            const CMat los = los_matrix(d.N, d.U, bearing(ris, user), bearing(user, ris));
            for (int p = 0; p < d.P; ++p)
            {
                Rng rng(substream_seed(seed, StreamTag::kRisUser, r, k, p));
                cs.F(r, k, p) = gain * rician_channel(los, config.rician.beta_Ru, rng);
            }
        }

    cs.restack();
    return cs;
}

namespace
{
void check_indices(const ChannelSet &cs, const CVec &theta, int k, int p)
{
    const NetworkDims &d = cs.dims();
    if (k < 0 || k >= d.K || p < 0 || p >= d.P)
        throw std::out_of_range("user/subcarrier index out of range");
    if (theta.size() != d.phase_size())
        throw std::out_of_range("theta has length " + std::to_string(theta.size()) + ", expected R*N = " +
                                std::to_string(d.phase_size()));
}
} // namespace

CMat effective_channel(const ChannelSet &cs, const CVec &theta, int b, int k, int p)
{
    check_indices(cs, theta, k, p);
    const NetworkDims &d = cs.dims();
    if (b < 0 || b >= d.B)
        throw std::out_of_range("BS index out of range");
    CMat h = cs.H(b, k, p).adjoint();
    for (int r = 0; r < d.R; ++r)
    {
        const auto theta_r = theta.segment(static_cast<long>(r) * d.N, d.N);
        // F^H Theta_r^H G  with Theta_r diagonal.
        h.noalias() += cs.F(r, k, p).adjoint() * (theta_r.conjugate().asDiagonal() * cs.G(b, r, p));
    }
    return h;
}

CMat user_channel(const ChannelSet &cs, const CVec &theta, int k, int p)
{
    check_indices(cs, theta, k, p);
    const NetworkDims &d = cs.dims();
    CMat h(d.U, static_cast<long>(d.B) * d.M);
    // F_kp^H Theta^H is shared by every BS.
    CMat reflected;
    if (d.R > 0)
        reflected = cs.F_stacked(k, p).adjoint() * theta.conjugate().asDiagonal();
    for (int b = 0; b < d.B; ++b)
    {
        auto block = h.middleCols(static_cast<long>(b) * d.M, d.M);
        block = cs.H(b, k, p).adjoint();
        if (d.R > 0)
            block.noalias() += reflected * cs.G_stacked(b, p);
    }
    return h;
}

EffectiveChannels::EffectiveChannels(const ChannelSet &cs, const CVec &theta)
    : K_(cs.dims().K), P_(cs.dims().P)
{
    h_.reserve(static_cast<std::size_t>(K_) * P_);
    for (int p = 0; p < P_; ++p)
        for (int k = 0; k < K_; ++k)
            h_.push_back(user_channel(cs, theta, k, p));
}

namespace
{

nlohmann::json matrix_to_json(const CMat &m, std::initializer_list<int> index)
{
    nlohmann::json data = nlohmann::json::array();
    for (long r = 0; r < m.rows(); ++r)
        for (long c = 0; c < m.cols(); ++c)
            data.push_back({m(r, c).real(), m(r, c).imag()});
    return {{"index", std::vector<int>(index)}, {"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

CMat matrix_from_json(const nlohmann::json &j, long rows, long cols)
{
    if (j.at("rows").get<long>() != rows || j.at("cols").get<long>() != cols)
        throw std::invalid_argument("channel fixture: matrix dimensions do not match dims");
    const auto &data = j.at("data");
    if (static_cast<long>(data.size()) != rows * cols)
        throw std::invalid_argument("channel fixture: wrong number of entries");
    CMat m(rows, cols);
    std::size_t i = 0;
    for (long r = 0; r < rows; ++r)
        for (long c = 0; c < cols; ++c, ++i)
            m(r, c) = {data[i].at(0).get<double>(), data[i].at(1).get<double>()};
    return m;
}

} // namespace

std::string dump_channel_set(const ChannelSet &cs)
{
    const NetworkDims &d = cs.dims();
    nlohmann::json j;
    j["dims"] = {{"B", d.B}, {"R", d.R}, {"K", d.K}, {"M", d.M}, {"U", d.U}, {"N", d.N}, {"P", d.P}};
    j["H"] = nlohmann::json::array();
    j["G"] = nlohmann::json::array();
    j["F"] = nlohmann::json::array();
    for (int b = 0; b < d.B; ++b)
        for (int k = 0; k < d.K; ++k)
            for (int p = 0; p < d.P; ++p)
                j["H"].push_back(matrix_to_json(cs.H(b, k, p), {b, k, p}));
    for (int b = 0; b < d.B; ++b)
        for (int r = 0; r < d.R; ++r)
            for (int p = 0; p < d.P; ++p)
                j["G"].push_back(matrix_to_json(cs.G(b, r, p), {b, r, p}));
    for (int r = 0; r < d.R; ++r)
        for (int k = 0; k < d.K; ++k)
            for (int p = 0; p < d.P; ++p)
                j["F"].push_back(matrix_to_json(cs.F(r, k, p), {r, k, p}));
    return j.dump();
}

ChannelSet load_channel_set(const std::string &text)
{
    const auto j = nlohmann::json::parse(text);
    const auto &jd = j.at("dims");
    NetworkDims d;
    d.B = jd.at("B");
    d.R = jd.at("R");
    d.K = jd.at("K");
    d.M = jd.at("M");
    d.U = jd.at("U");
    d.N = jd.at("N");
    d.P = jd.at("P");
    ChannelSet cs(d);
    auto idx = [](const nlohmann::json &m, int n0, int n1, int n2) {
        const auto i = m.at("index").get<std::vector<int>>();
        if (i.size() != 3 || i[0] < 0 || i[0] >= n0 || i[1] < 0 || i[1] >= n1 || i[2] < 0 || i[2] >= n2)
            throw std::invalid_argument("channel fixture: matrix index out of range");
        return i;
    };
    for (const auto &m : j.at("H"))
    {
        const auto i = idx(m, d.B, d.K, d.P);
        cs.H(i.at(0), i.at(1), i.at(2)) = matrix_from_json(m, d.M, d.U);
    }
    for (const auto &m : j.at("G"))
    {
        const auto i = idx(m, d.B, d.R, d.P);
        cs.G(i.at(0), i.at(1), i.at(2)) = matrix_from_json(m, d.N, d.M);
    }
    for (const auto &m : j.at("F"))
    {
        const auto i = idx(m, d.R, d.K, d.P);
        cs.F(i.at(0), i.at(1), i.at(2)) = matrix_from_json(m, d.N, d.U);
    }
    cs.restack();
    return cs;
}

} // namespace riscf
