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

// Per-(k,p) vectors are stored at index p*K + k, matching the precoder ordering.
inline std::size_t kp_index(int k, int p, int K) { return static_cast<std::size_t>(p) * K + k; }

struct AuxState
{
    RMat rho;                 // K x P, Lagrangian-dual auxiliary variable
    RMat mu;                  // K x P, eta_k (1 + rho_kp)
    std::vector<CVec> xi;     // U-vectors of the active quadratic transform
    std::vector<CVec> varpi;  // U-vectors of the passive quadratic transform
};

// rho_kp = gamma_kp.
RMat update_rho(const EffectiveChannels &eff, const PrecoderStack &W, double noise);

// mu_kp = eta_k (1 + rho_kp).
RMat compute_mu(const RMat &rho, const std::vector<double> &weights);

// sum_kp mu_kp f_kp(Theta, W).
double eval_g1(const EffectiveChannels &eff, const PrecoderStack &W, const RMat &mu, double noise);
// sum mu/(1+gamma), so that g1 = sum mu - g1_deficit. Free of the cancellation that makes
// g1 itself useless for comparisons once the SINRs are large.
double g1_deficit(const EffectiveChannels &eff, const PrecoderStack &W, const RMat &mu, double noise);

// xi_kp = sqrt(mu_kp) (sum_j h^H w_j (h^H w_j)^H + sigma^2 I)^{-1} h^H w_k.
std::vector<CVec> update_xi(const EffectiveChannels &eff, const PrecoderStack &W, const RMat &mu, double noise);

// sum_kp 2 sqrt(mu) Re{xi^H h^H w_k} - xi^H (sum_j h^H w_j (h^H w_j)^H + sigma^2 I) xi.
double eval_g2(const EffectiveChannels &eff, const PrecoderStack &W, const std::vector<CVec> &xi, const RMat &mu,
               double noise);

// Active subproblem  max_W  -W^H A W + 2 Re{V^H W} - Y  s.t.  W^H D_b W <= p_max[b].
//
// A = blkdiag(I_K (x) a_1, ..., I_K (x) a_P) is kept as its P blocks a_p (BM x BM).
// V holds sqrt(mu_kp) h_kp xi_kp in the (p,k) slice of the precoder layout.
// D_b = I_PK (x) ((e_b e_b^H) (x) I_M) selects the coordinates of BS b.
struct ActiveQcqp
{
    NetworkDims dims;
    std::vector<CMat> a_blocks;
    CVec V;
    double Y = 0.0;
    std::vector<double> p_max;

    long size() const { return dims.precoder_size(); }

    CVec apply_A(const CVec &w) const;
    double quadratic(const CVec &w) const; // W^H A W
    double objective(const CVec &w) const; // g3(W)
    double bs_power(const CVec &w, int b) const;
    // Dense D_b; only for small instances and checks.
    RMat selection_matrix(int b) const;
    // Dense A; only for small instances and checks.
    CMat dense_A() const;
};

ActiveQcqp assemble_active(const EffectiveChannels &eff, const std::vector<CVec> &xi, const RMat &mu, double noise,
                           const std::vector<double> &p_max, const NetworkDims &dims);

// Q_kpj(Theta) = sum_b (H_bkp^H + F_kp^H Theta^H G_bp) w_bpj, evaluated per BS.
CVec q_vector(const ChannelSet &cs, const CVec &theta, const PrecoderStack &W, int k, int p, int j);

// varpi_kp = sqrt(mu_kp) (sum_j Q_kpj Q_kpj^H + sigma^2 I)^{-1} Q_kpk.
std::vector<CVec> update_varpi(const ChannelSet &cs, const CVec &theta, const PrecoderStack &W, const RMat &mu,
                               double noise);

// sum_kp 2 sqrt(mu) Re{varpi^H Q_kpk} - varpi^H (sum_j Q_kpj Q_kpj^H + sigma^2 I) varpi.
double eval_g5(const ChannelSet &cs, const CVec &theta, const PrecoderStack &W, const std::vector<CVec> &varpi,
               const RMat &mu, double noise);

// Passive subproblem  max_theta  -theta^H Lambda theta + 2 Re{theta^H nu} - zeta.
struct PassiveQcqp
{
    int K = 0, P = 0;
    CMat Lambda;
    CVec nu;
    double zeta = 0.0;
    // c_kpj and g_kpj at index (p*K + k)*K + j.
    std::vector<cdouble> c;
    std::vector<CVec> g;

    long size() const { return nu.size(); }
    double objective(const CVec &theta) const; // g6(theta)
    // Columns g_kpj, so that Lambda = Gmat Gmat^H.
    CMat gram_factor() const;
};

PassiveQcqp assemble_passive(const ChannelSet &cs, const PrecoderStack &W, const std::vector<CVec> &varpi,
                             const RMat &mu, double noise);

} // namespace riscf
