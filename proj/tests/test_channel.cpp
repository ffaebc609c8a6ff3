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

#include "oracles.hpp"

#include "riscf/experiment.hpp"

#include <doctest.h>

using namespace riscf;

namespace
{

ScenarioConfig single_link(double d_Bu, int R = 0)
{
    ScenarioConfig c;
    c.dims = NetworkDims{1, R, 1, 4, 2, 3, 2};
    c.bs_positions = {{0.0, 0.0}};
    c.user_positions = {{d_Bu, 0.0}};
    for (int r = 0; r < R; ++r)
        c.ris_positions.push_back({d_Bu / 2.0, 5.0 + r});
    c.p_max = {1.0};
    c.user_weights = {1.0};
    return c;
}

double mean_sq(const CMat &m) { return m.squaredNorm() / static_cast<double>(m.size()); }

} // namespace

TEST_CASE("direct path loss")
{
    const PathLossParams pl;
    CHECK(path_loss_direct(1.0, pl) == doctest::Approx(1e-3).epsilon(1e-13));
    CHECK(path_loss_direct(10.0, pl) == doctest::Approx(1e-6).epsilon(1e-13));
    CHECK(path_loss_direct(100.0, pl) == doctest::Approx(1e-9).epsilon(1e-13));
    CHECK_THROWS_AS(path_loss_direct(0.0, pl), std::domain_error);
    CHECK_THROWS_AS(path_loss_direct(-3.0, pl), std::domain_error);
    CHECK(path_loss_direct(11.0, pl) < path_loss_direct(10.0, pl));
}

TEST_CASE("reflected path loss and the double-fading product")
{
    const PathLossParams pl;
    CHECK(path_loss_reflected(1.0, 1.0, pl) == doctest::Approx(1e-4).epsilon(1e-13));
    CHECK(path_loss_reflected(30.0, 5.0, pl) == doctest::Approx(4.444444444444e-9).epsilon(1e-10));
    CHECK(path_loss_reflected(30.0, 5.0, pl) == doctest::Approx(path_loss_reflected(5.0, 30.0, pl)).epsilon(1e-15));
    CHECK(path_loss_reflected(31.0, 5.0, pl) < path_loss_reflected(30.0, 5.0, pl));
    CHECK(path_loss_reflected(30.0, 6.0, pl) < path_loss_reflected(30.0, 5.0, pl));
    CHECK_THROWS_AS(path_loss_reflected(0.0, 5.0, pl), std::domain_error);
    CHECK_THROWS_AS(path_loss_reflected(5.0, -1.0, pl), std::domain_error);
}

TEST_CASE("Rician draws")
{
    Rng rng(3);
    SUBCASE("beta = 0 is unit-variance Rayleigh")
    {
        const CMat h = rician_channel(100, 100, 0.0, rng);
        CHECK(mean_sq(h) == doctest::Approx(1.0).epsilon(0.05));
        CHECK(std::abs(h.mean()) < 0.05);
    }
    SUBCASE("beta = inf is the unit-modulus LoS matrix")
    {
        const CMat los = los_matrix(6, 4, 0.3, -1.1);
        const CMat h = rician_channel(los, kInf, rng);
        CHECK(h == los);
        for (Eigen::Index i = 0; i < h.size(); ++i)
            CHECK(std::abs(h.data()[i]) == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(Eigen::JacobiSVD<CMat>(h).singularValues()[1] < 1e-9); // rank one
    }
    SUBCASE("beta = 1 keeps unit second moment")
    {
        const CMat h = rician_channel(100, 100, 1.0, rng);
        CHECK(mean_sq(h) == doctest::Approx(1.0).epsilon(0.05));
    }
    SUBCASE("negative beta is rejected")
    {
        CHECK_THROWS_AS(rician_channel(2, 2, -0.1, rng), std::domain_error);
    }
}

TEST_CASE("steering vectors")
{
    const CVec a = steering_vector(4, std::numbers::pi / 6); // sin = 1/2
    CHECK(std::abs(a[0] - cdouble(1.0)) < 1e-15);
    CHECK(std::abs(a[1] - std::polar(1.0, std::numbers::pi / 2)) < 1e-14);
    CHECK(std::abs(a[3] - std::polar(1.0, 1.5 * std::numbers::pi)) < 1e-14);
}

TEST_CASE("channel generation is deterministic and substream-isolated")
{
    const ScenarioConfig c = scenario_fig4(30.0, 2);
    const ChannelSet a = generate_channel_set(c, 99);
    const ChannelSet b = generate_channel_set(c, 99);
    CHECK(a == b);
    CHECK_FALSE(a == generate_channel_set(c, 100));

    // Adding a user leaves every existing link untouched.
    ScenarioConfig more = c;
    more.dims.K = 5;
    more.user_positions.push_back({35.0, 1.0});
    more.user_weights.push_back(1.0);
    const ChannelSet m = generate_channel_set(more, 99);
    for (int p = 0; p < c.dims.P; ++p)
        for (int k = 0; k < c.dims.K; ++k)
        {
            CHECK(m.H(1, k, p) == a.H(1, k, p));
            CHECK(m.F(0, k, p) == a.F(0, k, p));
        }
    CHECK(m.G(0, 1, 3) == a.G(0, 1, 3));
}

TEST_CASE("channel generation rejects invalid configs")
{
    ScenarioConfig c = single_link(10.0);
    c.noise_power = -1.0;
    CHECK_THROWS_AS(generate_channel_set(c, 1), std::invalid_argument);
}

TEST_CASE("doubling the BS-user distance divides the direct gain by 8")
{
    const ScenarioConfig near = single_link(10.0), far = single_link(20.0);
    double e_near = 0.0, e_far = 0.0;
    for (std::uint64_t s = 0; s < 1000; ++s)
    {
        e_near += mean_sq(generate_channel_set(near, s).H(0, 0, 0));
        e_far += mean_sq(generate_channel_set(far, s + 5000).H(0, 0, 0));
    }
    CHECK(e_near / e_far == doctest::Approx(8.0).epsilon(0.10));
    CHECK(e_near / 1000.0 == doctest::Approx(path_loss_direct(10.0, near.pathloss)).epsilon(0.10));
}

TEST_CASE("the two cascade legs multiply to the reflected path loss")
{
    ScenarioConfig c = single_link(40.0, 1);
    c.rician.beta_Ru = kInf; // both legs LoS: every entry has the deterministic magnitude
    const ChannelSet cs = generate_channel_set(c, 4);
    const double d_BR = distance(c.bs_positions[0], c.ris_positions[0]);
    const double d_Ru = distance(c.ris_positions[0], c.user_positions[0]);
    const double g = std::norm(cs.G(0, 0, 1)(2, 3));
    const double f = std::norm(cs.F(0, 0, 1)(1, 0));
    CHECK(g * f == doctest::Approx(path_loss_reflected(d_BR, d_Ru, c.pathloss)).epsilon(1e-12));
}

TEST_CASE("no RIS: G and F are empty and the effective channel is H^H")
{
    const ScenarioConfig c = single_link(10.0);
    const ChannelSet cs = generate_channel_set(c, 1);
    CHECK(cs.F_stacked(0, 0).rows() == 0);
    CHECK(cs.G_stacked(0, 0).rows() == 0);
    const CVec theta(0);
    CHECK(effective_channel(cs, theta, 0, 0, 1) == cs.H(0, 0, 1).adjoint());
    CHECK(user_channel(cs, theta, 0, 1) == cs.H(0, 0, 1).adjoint());
}

TEST_CASE("effective channel with theta = 0 is exactly H^H")
{
    Rng rng(8);
    const NetworkDims d{2, 2, 2, 3, 2, 4, 2};
    const ChannelSet cs = oracle::random_channels(d, rng);
    const CVec zero = CVec::Zero(d.phase_size());
    CHECK(effective_channel(cs, zero, 1, 0, 1) == cs.H(1, 0, 1).adjoint());
}

TEST_CASE("single-element reflection conjugates the phase")
{
    const NetworkDims d{1, 1, 1, 1, 1, 1, 1};
    ChannelSet cs(d);
    cs.H(0, 0, 0) = CMat::Zero(1, 1);
    cs.G(0, 0, 0) = CMat::Ones(1, 1);
    cs.F(0, 0, 0) = CMat::Ones(1, 1);
    cs.restack();
    const double phi = 0.7;
    CVec theta(1);
    theta[0] = std::polar(1.0, phi);
    const CMat h = effective_channel(cs, theta, 0, 0, 0);
    CHECK(std::abs(h(0, 0) - std::polar(1.0, -phi)) < 1e-15);
}

TEST_CASE("effective channel matches the dense block-diagonal oracle")
{
    Rng rng(21);
    for (int trial = 0; trial < 50; ++trial)
    {
        const NetworkDims d = oracle::random_dims(rng, {}, 1);
        const ChannelSet cs = oracle::random_channels(d, rng);
        const CVec theta = oracle::random_theta(d.phase_size(), rng);
        const EffectiveChannels eff(cs, theta);
        for (int k = 0; k < d.K; ++k)
            for (int p = 0; p < d.P; ++p)
            {
                const CMat literal = oracle::literal_user_channel(cs, theta, k, p);
                const double scale = literal.norm();
                REQUIRE((user_channel(cs, theta, k, p) - literal).norm() <= 1e-12 * scale);
                REQUIRE((eff(k, p) - literal).norm() <= 1e-12 * scale);
                for (int b = 0; b < d.B; ++b)
                    REQUIRE((effective_channel(cs, theta, b, k, p) - oracle::literal_effective(cs, theta, b, k, p))
                                .norm() <= 1e-12 * scale);
            }
    }
}

TEST_CASE("stacked forms are the vertical concatenation of the RIS blocks")
{
    Rng rng(5);
    const NetworkDims d{2, 3, 2, 2, 2, 4, 2};
    const ChannelSet cs = oracle::random_channels(d, rng);
    for (int r = 0; r < d.R; ++r)
    {
        CHECK(cs.F_stacked(1, 1).middleRows(r * d.N, d.N) == cs.F(r, 1, 1));
        CHECK(cs.G_stacked(0, 1).middleRows(r * d.N, d.N) == cs.G(0, r, 1));
    }
}

TEST_CASE("index checks")
{
    Rng rng(5);
    const NetworkDims d{1, 1, 1, 2, 1, 2, 1};
    const ChannelSet cs = oracle::random_channels(d, rng);
    const CVec theta = CVec::Ones(2);
    CHECK_THROWS_AS(effective_channel(cs, theta, 1, 0, 0), std::out_of_range);
    CHECK_THROWS_AS(effective_channel(cs, theta, 0, 0, 3), std::out_of_range);
    CHECK_THROWS_AS(effective_channel(cs, CVec::Ones(3), 0, 0, 0), std::out_of_range);
}

TEST_CASE("channel set text dump round trip is bit-exact")
{
    const ChannelSet cs = generate_channel_set(scenario_fig4(25.0, 1), 12);
    const std::string text = dump_channel_set(cs);
    CHECK(load_channel_set(text) == cs);
    CHECK_THROWS(load_channel_set("{\"dims\": 3}"));
}
