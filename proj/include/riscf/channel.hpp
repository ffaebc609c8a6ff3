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

#include "riscf/model.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace riscf
{

// All random draws use a 64-bit Mersenne twister. Every (link, index) pair gets its
// own generator seeded by substream_seed(), so adding users or RISs never changes
// the draws of the links that already exist.
using Rng = std::mt19937_64;

enum class StreamTag : std::uint64_t
{
    kBsUser = 1,
    kBsRis = 2,
    kRisUser = 3,
    kUserDrop = 4,
    kInit = 5,
    kSweep = 6,
    kSimulation = 7,
};

std::uint64_t substream_seed(std::uint64_t master, StreamTag tag, std::uint64_t i = 0, std::uint64_t j = 0,
                             std::uint64_t l = 0);

// Circularly-symmetric complex Gaussian entries with unit variance per entry.
CMat complex_gaussian(int rows, int cols, Rng &rng);

// Far-field half-wavelength ULA response, a_n = exp(j pi n sin(angle)).
CVec steering_vector(int n, double angle);

// Unit-modulus rank-1 line-of-sight matrix a_rx(arrival) a_tx(departure)^H.
CMat los_matrix(int rows, int cols, double arrival_angle, double departure_angle);

// sqrt(beta/(1+beta)) * los + sqrt(1/(1+beta)) * nlos. beta = +inf returns los
// without consuming random numbers; beta = 0 returns the Gaussian draw.
// Throws std::domain_error for negative or NaN beta.
CMat rician_channel(const CMat &los, double beta, Rng &rng);
// Same with the broadside (all-ones) line-of-sight component.
CMat rician_channel(int rows, int cols, double beta, Rng &rng);

// C_d G_B G_u d^-kappa_Bu in linear scale. Throws std::domain_error for d <= 0.
double path_loss_direct(double d_Bu, const PathLossParams &params);
// C_r G_B G_u d_BR^-kappa_BR d_Ru^-kappa_Ru. Throws std::domain_error for d <= 0.
double path_loss_reflected(double d_BR, double d_Ru, const PathLossParams &params);

// Frequency-domain channels of the whole network.
//   H(b,k,p): M x U   (the BS-user link is H^H, U x M)
//   G(b,r,p): N x M   (BS -> RIS)
//   F(r,k,p): N x U   (RIS -> user is F^H, U x N)
// plus the stacked forms F_kp = [F_1kp; ...; F_Rkp] (RN x U) and
// G_bp = [G_b1p; ...; G_bRp] (RN x M).
class ChannelSet
{
  public:
    ChannelSet() = default;
    explicit ChannelSet(const NetworkDims &dims);

    const NetworkDims &dims() const { return dims_; }

    CMat &H(int b, int k, int p) { return H_[h_index(b, k, p)]; }
    const CMat &H(int b, int k, int p) const { return H_[h_index(b, k, p)]; }
    CMat &G(int b, int r, int p) { return G_[g_index(b, r, p)]; }
    const CMat &G(int b, int r, int p) const { return G_[g_index(b, r, p)]; }
    CMat &F(int r, int k, int p) { return F_[f_index(r, k, p)]; }
    const CMat &F(int r, int k, int p) const { return F_[f_index(r, k, p)]; }

    const CMat &F_stacked(int k, int p) const { return F_stack_[static_cast<std::size_t>(k) * dims_.P + p]; }
    const CMat &G_stacked(int b, int p) const { return G_stack_[static_cast<std::size_t>(b) * dims_.P + p]; }

    // Rebuilds the stacked forms from the per-RIS blocks; call after editing H/G/F.
    void restack();

    // Bit-exact comparison of dimensions and every matrix.
    bool operator==(const ChannelSet &other) const;

  private:
    std::size_t h_index(int b, int k, int p) const
    {
        return (static_cast<std::size_t>(b) * dims_.K + k) * dims_.P + p;
    }
    std::size_t g_index(int b, int r, int p) const
    {
        return (static_cast<std::size_t>(b) * dims_.R + r) * dims_.P + p;
    }
    std::size_t f_index(int r, int k, int p) const
    {
        return (static_cast<std::size_t>(r) * dims_.K + k) * dims_.P + p;
    }

    NetworkDims dims_;
    std::vector<CMat> H_, G_, F_;
    std::vector<CMat> F_stack_, G_stack_;
};

// Draws every channel of the scenario. The BS-RIS matrix carries the composite
// reflected gain C_r G_B G_u d_BR^-kappa_BR, the RIS-user matrix carries
// d_Ru^-kappa_Ru, so their cascade has exactly the reflected path loss.
// Deterministic in (config, seed).
ChannelSet generate_channel_set(const ScenarioConfig &config, std::uint64_t seed);
inline ChannelSet generate_channel_set(const ScenarioConfig &config)
{
    return generate_channel_set(config, config.seed);
}

// h_{b,k,p}^H = H^H_{b,k,p} + sum_r F^H_{r,k,p} Theta_r^H G_{b,r,p}  (U x M).
// Throws std::out_of_range for bad indices.
CMat effective_channel(const ChannelSet &cs, const CVec &theta, int b, int k, int p);

// h_{k,p}^H = [h_{1,k,p}^H, ..., h_{B,k,p}^H]  (U x BM), via the stacked forms.
CMat user_channel(const ChannelSet &cs, const CVec &theta, int k, int p);

// h_{k,p}^H for all users and subcarriers, indexed p*K + k.
class EffectiveChannels
{
  public:
    EffectiveChannels() = default;
    EffectiveChannels(const ChannelSet &cs, const CVec &theta);

    const CMat &operator()(int k, int p) const { return h_[static_cast<std::size_t>(p) * K_ + k]; }
    int K() const { return K_; }
    int P() const { return P_; }

  private:
    int K_ = 0, P_ = 0;
    std::vector<CMat> h_;
};

// Structured-text fixture format: a JSON object with "dims" and, for each of "H",
// "G", "F", an array of matrices {"index": [..], "rows": r, "cols": c,
// "data": [[re, im], ...]} stored row-major.
std::string dump_channel_set(const ChannelSet &cs);
ChannelSet load_channel_set(const std::string &text);

} // namespace riscf
