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
#include "riscf/model.hpp"

#include <vector>

namespace riscf
{

struct RateReport
{
    RMat gamma;      // K x P, linear SINR
    RMat rate;       // K x P, log2(1 + gamma)
    RVec user_rates; // eta_k * sum_p rate(k, p)
    double wsr = 0.0;
};

// Received covariance at user k on subcarrier p:
//   sum_j (h^H w_j)(h^H w_j)^H + sigma^2 I, with j = k skipped unless include_self.
CMat receive_covariance(const EffectiveChannels &eff, const PrecoderStack &W, int k, int p, double noise,
                        bool include_self);

// SINR of s_{p,k}; the interference-plus-noise covariance uses j != k.
double sinr(const EffectiveChannels &eff, const PrecoderStack &W, int k, int p, double noise);
double sinr(const ChannelSet &cs, const CVec &theta, const PrecoderStack &W, int k, int p, double noise);

// Same quadratic form with the full covariance (all j); equals gamma / (1 + gamma).
double ratio_term(const EffectiveChannels &eff, const PrecoderStack &W, int k, int p, double noise);
double ratio_term(const ChannelSet &cs, const CVec &theta, const PrecoderStack &W, int k, int p, double noise);

RateReport wsr(const EffectiveChannels &eff, const PrecoderStack &W, const std::vector<double> &weights,
               double noise);
RateReport wsr(const ChannelSet &cs, const CVec &theta, const PrecoderStack &W, const std::vector<double> &weights,
               double noise);

// (sum eta ln(1+rho) - sum eta rho + sum eta (1+rho) f_{k,p}) / ln 2, in bits.
// Maximized over rho at rho = gamma, where it equals the WSR.
// rho is K x P and must be elementwise nonnegative (std::invalid_argument otherwise).
double lagrangian_objective(const EffectiveChannels &eff, const PrecoderStack &W, const RMat &rho,
                            const std::vector<double> &weights, double noise);
double lagrangian_objective(const ChannelSet &cs, const CVec &theta, const PrecoderStack &W, const RMat &rho,
                            const std::vector<double> &weights, double noise);

struct SignalSimulation
{
    double empirical_sinr = 0.0;
    // max_t |s_hat - s| of the zero-forcing estimate of s_{p,k} along its signature.
    double reconstruction_error = 0.0;
    int n_trials = 0;
};

// Monte-Carlo evaluation of the received-signal model for user k on subcarrier p:
// draws unit-power QPSK symbols for every user and CN(0, sigma^2 I) noise, forms
// y = sum_j h^H w_j s_j + z, estimates the linear MMSE combiner from the samples
// and returns the post-combining signal-to-residual power ratio.
SignalSimulation simulate_received_signal(const ChannelSet &cs, const CVec &theta, const PrecoderStack &W, int k,
                                          int p, double noise, int n_trials, Rng &rng, bool with_noise = true);

} // namespace riscf
