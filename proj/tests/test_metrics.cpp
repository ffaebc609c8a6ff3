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

#include <doctest.h>

using namespace riscf;

namespace
{

// K = 1, U = 1, B = 1, M = 1, P = 1, no RIS, h = 1.
ChannelSet scalar_link()
{
    const NetworkDims d{1, 0, 1, 1, 1, 1, 1};
    ChannelSet cs(d);
    cs.H(0, 0, 0) = CMat::Ones(1, 1);
    cs.restack();
    return cs;
}

} // namespace

TEST_CASE("scalar SINR, ratio term and zero precoder")
{
    const ChannelSet cs = scalar_link();
    const CVec theta(0);
    PrecoderStack W(cs.dims());
    W.vector()[0] = 2.0;
    CHECK(sinr(cs, theta, W, 0, 0, 1.0) == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(ratio_term(cs, theta, W, 0, 0, 1.0) == doctest::Approx(0.8).epsilon(1e-15));

    const PrecoderStack zero(cs.dims());
    CHECK(sinr(cs, theta, zero, 0, 0, 1.0) == 0.0);
    CHECK(ratio_term(cs, theta, zero, 0, 0, 1.0) == 0.0);
}

TEST_CASE("SINR matches the literal inverse on random instances")
{
    Rng rng(31);
    for (int trial = 0; trial < 100; ++trial)
    {
        const NetworkDims d = oracle::random_dims(rng);
        const ChannelSet cs = oracle::random_channels(d, rng);
        const CVec theta = oracle::random_theta(d.phase_size(), rng);
        const PrecoderStack W = oracle::random_precoder(d, rng);
        const double noise = oracle::uniform(rng, 0.1, 2.0);
        const EffectiveChannels eff(cs, theta);
        for (int k = 0; k < d.K; ++k)
            for (int p = 0; p < d.P; ++p)
            {
                const double g = sinr(eff, W, k, p, noise);
                REQUIRE(g >= 0.0);
                REQUIRE(g == doctest::Approx(oracle::literal_sinr(cs, theta, W, k, p, noise)).epsilon(1e-10));
                // f = gamma / (1 + gamma)
                const double f = ratio_term(eff, W, k, p, noise);
                REQUIRE(f >= 0.0);
                REQUIRE(f < 1.0);
                REQUIRE(f == doctest::Approx(g / (1.0 + g)).epsilon(1e-10));
            }
    }
}

TEST_CASE("interference-plus-noise covariance is Hermitian")
{
    Rng rng(32);
    const NetworkDims d{2, 1, 3, 2, 3, 2, 2};
    const ChannelSet cs = oracle::random_channels(d, rng);
    const EffectiveChannels eff(cs, oracle::random_theta(d.phase_size(), rng));
    const PrecoderStack W = oracle::random_precoder(d, rng);
    const CMat C = receive_covariance(eff, W, 1, 1, 0.5, false);
    CHECK((C - C.adjoint()).norm() <= 1e-12 * C.norm());
}

TEST_CASE("weighted sum-rate bookkeeping")
{
    SUBCASE("gamma = 1 everywhere gives one bit per (k,p)")
    {
        // Two users on orthogonal antennas, h = I, |w|^2 = sigma^2.
        const NetworkDims d{1, 0, 2, 2, 1, 1, 2};
        ChannelSet cs(d);
        for (int p = 0; p < d.P; ++p)
            for (int k = 0; k < d.K; ++k)
            {
                CMat h = CMat::Zero(2, 1);
                h(k, 0) = 1.0;
                cs.H(0, k, p) = h;
            }
        cs.restack();
        PrecoderStack W(d);
        for (int p = 0; p < d.P; ++p)
            for (int k = 0; k < d.K; ++k)
                W.slice(0, p, k)[k] = 1.0;
        const RateReport r = wsr(cs, CVec(0), W, {1.0, 1.0}, 1.0);
        CHECK(r.gamma.isApproxToConstant(1.0, 1e-14));
        CHECK(r.wsr == doctest::Approx(4.0).epsilon(1e-14));

        const RateReport r2 = wsr(cs, CVec(0), W, {2.0, 1.0}, 1.0);
        CHECK(r2.user_rates[0] == doctest::Approx(2.0 * r.user_rates[0]));
        CHECK(r2.user_rates[1] == doctest::Approx(r.user_rates[1]));
    }
    SUBCASE("random instances: sum of independently computed rates")
    {
        Rng rng(33);
        for (int trial = 0; trial < 50; ++trial)
        {
            const NetworkDims d = oracle::random_dims(rng);
            const ChannelSet cs = oracle::random_channels(d, rng);
            const CVec theta = oracle::random_theta(d.phase_size(), rng);
            const PrecoderStack W = oracle::random_precoder(d, rng);
            const auto eta = oracle::random_weights(d.K, rng);
            double expected = 0.0;
            for (int k = 0; k < d.K; ++k)
                for (int p = 0; p < d.P; ++p)
                    expected += eta[k] * std::log2(1.0 + oracle::literal_sinr(cs, theta, W, k, p, 0.7));
            const RateReport r = wsr(cs, theta, W, eta, 0.7);
            REQUIRE(r.wsr == doctest::Approx(expected).epsilon(1e-10));
            REQUIRE(r.user_rates.sum() == doctest::Approx(r.wsr).epsilon(1e-12));
        }
    }
}

TEST_CASE("WSR is invariant under a per-stream phase rotation")
{
    Rng rng(34);
    const NetworkDims d{2, 1, 2, 2, 2, 3, 2};
    const ChannelSet cs = oracle::random_channels(d, rng);
    const CVec theta = oracle::random_theta(d.phase_size(), rng);
    PrecoderStack W = oracle::random_precoder(d, rng);
    const double before = wsr(cs, theta, W, {1.0, 1.0}, 1.0).wsr;
    W.user_slice(1, 0) *= std::polar(1.0, 1.234);
    CHECK(wsr(cs, theta, W, {1.0, 1.0}, 1.0).wsr == doctest::Approx(before).epsilon(1e-12));
}

TEST_CASE("Lagrangian objective")
{
    Rng rng(35);
    for (int trial = 0; trial < 30; ++trial)
    {
        const NetworkDims d = oracle::random_dims(rng);
        const ChannelSet cs = oracle::random_channels(d, rng);
        const CVec theta = oracle::random_theta(d.phase_size(), rng);
        const PrecoderStack W = oracle::random_precoder(d, rng);
        const auto eta = oracle::random_weights(d.K, rng);
        const RateReport r = wsr(cs, theta, W, eta, 1.0);

        // rho = gamma recovers the WSR.
        REQUIRE(lagrangian_objective(cs, theta, W, r.gamma, eta, 1.0) ==
                doctest::Approx(r.wsr).epsilon(1e-9));

        // rho = 0 leaves sum eta f (in bits).
        double weighted_f = 0.0;
        for (int k = 0; k < d.K; ++k)
            for (int p = 0; p < d.P; ++p)
                weighted_f += eta[k] * ratio_term(cs, theta, W, k, p, 1.0);
        REQUIRE(lagrangian_objective(cs, theta, W, RMat::Zero(d.K, d.P), eta, 1.0) ==
                doctest::Approx(weighted_f / std::numbers::ln2).epsilon(1e-12));

        // Any other rho, including +-10 % coordinate perturbations, is no better.
        for (int s = 0; s < 20; ++s)
        {
            RMat rho = r.gamma;
            const int k = oracle::uniform_int(rng, 0, d.K - 1), p = oracle::uniform_int(rng, 0, d.P - 1);
            rho(k, p) *= (s % 2 == 0) ? 1.1 : 0.9;
            if (s >= 10)
                rho = r.gamma.cwiseProduct(RMat::NullaryExpr(d.K, d.P, [&] { return oracle::uniform(rng, 0.0, 3.0); }));
            REQUIRE(lagrangian_objective(cs, theta, W, rho, eta, 1.0) <= r.wsr + 1e-12);
        }
    }
    CHECK_THROWS_AS(lagrangian_objective(scalar_link(), CVec(0), PrecoderStack(scalar_link().dims()),
                                         -RMat::Ones(1, 1), {1.0}, 1.0),
                    std::invalid_argument);
}

TEST_CASE("received-signal simulation")
{
    Rng rng(36);
    SUBCASE("empirical SINR agrees with the analytic value")
    {
        const NetworkDims d{2, 1, 2, 2, 2, 3, 1};
        const ChannelSet cs = oracle::random_channels(d, rng);
        const CVec theta = oracle::random_theta(d.phase_size(), rng);
        const PrecoderStack W = oracle::random_precoder(d, rng, 0.5);
        const double analytic = sinr(cs, theta, W, 1, 0, 1.0);
        const SignalSimulation s = simulate_received_signal(cs, theta, W, 1, 0, 1.0, 100000, rng);
        CHECK(s.n_trials == 100000);
        CHECK(s.empirical_sinr == doctest::Approx(analytic).epsilon(0.05));
    }
    SUBCASE("zero precoder gives zero SINR")
    {
        const NetworkDims d{1, 1, 2, 2, 2, 2, 1};
        const ChannelSet cs = oracle::random_channels(d, rng);
        const SignalSimulation s =
            simulate_received_signal(cs, CVec::Ones(2), PrecoderStack(d), 0, 0, 1.0, 1000, rng);
        CHECK(s.empirical_sinr == 0.0);
    }
    SUBCASE("noise-free single user reconstructs the symbol exactly")
    {
        const NetworkDims d{2, 1, 1, 2, 2, 2, 1};
        const ChannelSet cs = oracle::random_channels(d, rng);
        const PrecoderStack W = oracle::random_precoder(d, rng);
        const SignalSimulation s =
            simulate_received_signal(cs, oracle::random_theta(2, rng), W, 0, 0, 1.0, 500, rng, false);
        CHECK(s.reconstruction_error < 1e-12);
    }
}
