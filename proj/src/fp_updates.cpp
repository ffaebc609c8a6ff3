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

#include "riscf/fp_updates.hpp"

#include "riscf/metrics.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>
#include <stdexcept>

namespace riscf
{

namespace
{

// sqrt(mu) C^{-1} s with C Hermitian positive definite.
CVec scaled_solve(const CMat &C, const CVec &s, double mu)
{
    Eigen::LLT<CMat> llt(C);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("covariance is not positive definite");
    return std::sqrt(mu) * llt.solve(s);
}

// sum_j s_j s_j^H + sigma^2 I
CMat full_covariance(const CMat &signatures, double noise)
{
    const long U = signatures.rows();
    CMat C = noise * CMat::Identity(U, U);
    C.noalias() += signatures * signatures.adjoint();
    return C;
}

CMat user_signatures(const EffectiveChannels &eff, const PrecoderStack &W, int k, int p)
{
    const CMat &h = eff(k, p);
    CMat S(h.rows(), W.K());
    for (int j = 0; j < W.K(); ++j)
        S.col(j) = h * W.user_slice(p, j);
    return S;
}

double transformed_term(const CMat &signatures, int k, const CVec &aux, double mu, double noise)
{
    const CMat C = full_covariance(signatures, noise);
    const double linear = 2.0 * std::sqrt(mu) * aux.dot(signatures.col(k)).real();
    const double quad = aux.dot(C * aux).real();
    return linear - quad;
}

void check_mu(const RMat &mu, int K, int P)
{
    if (mu.rows() != K || mu.cols() != P)
        throw std::invalid_argument("mu must be K x P");
    if ((mu.array() < 0.0).any())
        throw std::invalid_argument("mu must be nonnegative");
}

} // namespace

RMat update_rho(const EffectiveChannels &eff, const PrecoderStack &W, double noise)
{
    RMat rho(W.K(), W.P());
    for (int k = 0; k < W.K(); ++k)
        for (int p = 0; p < W.P(); ++p)
            rho(k, p) = sinr(eff, W, k, p, noise);
    return rho;
}

RMat compute_mu(const RMat &rho, const std::vector<double> &weights)
{
    if (static_cast<long>(weights.size()) != rho.rows())
        throw std::invalid_argument("weights and rho disagree on K");
    RMat mu(rho.rows(), rho.cols());
    for (long k = 0; k < rho.rows(); ++k)
        for (long p = 0; p < rho.cols(); ++p)
            mu(k, p) = weights[k] * (1.0 + rho(k, p));
    return mu;
}

double eval_g1(const EffectiveChannels &eff, const PrecoderStack &W, const RMat &mu, double noise)
{
    check_mu(mu, W.K(), W.P());
    double value = 0.0;
    for (int k = 0; k < W.K(); ++k)
        for (int p = 0; p < W.P(); ++p)
            value += mu(k, p) * ratio_term(eff, W, k, p, noise);
    return value;
}

double g1_deficit(const EffectiveChannels &eff, const PrecoderStack &W, const RMat &mu, double noise)
{
    check_mu(mu, W.K(), W.P());
    double value = 0.0;
    for (int k = 0; k < W.K(); ++k)
        for (int p = 0; p < W.P(); ++p)
            value += mu(k, p) / (1.0 + sinr(eff, W, k, p, noise));
    return value;
}

std::vector<CVec> update_xi(const EffectiveChannels &eff, const PrecoderStack &W, const RMat &mu, double noise)
{
    const int K = W.K(), P = W.P();
    check_mu(mu, K, P);
    std::vector<CVec> xi(static_cast<std::size_t>(K) * P);
    for (int p = 0; p < P; ++p)
        for (int k = 0; k < K; ++k)
        {
            const CMat S = user_signatures(eff, W, k, p);
            xi[kp_index(k, p, K)] = scaled_solve(full_covariance(S, noise), S.col(k), mu(k, p));
        }
    return xi;
}

double eval_g2(const EffectiveChannels &eff, const PrecoderStack &W, const std::vector<CVec> &xi, const RMat &mu,
               double noise)
{
    const int K = W.K(), P = W.P();
    check_mu(mu, K, P);
    double value = 0.0;
    for (int p = 0; p < P; ++p)
        for (int k = 0; k < K; ++k)
            value += transformed_term(user_signatures(eff, W, k, p), k, xi[kp_index(k, p, K)], mu(k, p), noise);
    return value;
}

CVec ActiveQcqp::apply_A(const CVec &w) const
{
    const long BM = static_cast<long>(dims.B) * dims.M;
    CVec out(w.size());
    for (int p = 0; p < dims.P; ++p)
        for (int k = 0; k < dims.K; ++k)
        {
            const long off = (static_cast<long>(p) * dims.K + k) * BM;
            out.segment(off, BM).noalias() = a_blocks[p] * w.segment(off, BM);
        }
    return out;
}

double ActiveQcqp::quadratic(const CVec &w) const { return w.dot(apply_A(w)).real(); }

double ActiveQcqp::objective(const CVec &w) const { return -quadratic(w) + 2.0 * V.dot(w).real() - Y; }

double ActiveQcqp::bs_power(const CVec &w, int b) const
{
    const PrecoderStack stack(dims, w);
    return stack.bs_power(b);
}

RMat ActiveQcqp::selection_matrix(int b) const
{
    // I_PK (x) ((e_b e_b^H) (x) I_M)
    RMat eb = RMat::Zero(dims.B, dims.B);
    eb(b, b) = 1.0;
    const RMat inner = Eigen::kroneckerProduct(eb, RMat::Identity(dims.M, dims.M));
    return Eigen::kroneckerProduct(RMat::Identity(static_cast<long>(dims.P) * dims.K,
                                                  static_cast<long>(dims.P) * dims.K),
                                   inner);
}

CMat ActiveQcqp::dense_A() const
{
    const long BM = static_cast<long>(dims.B) * dims.M;
    CMat A = CMat::Zero(size(), size());
    for (int p = 0; p < dims.P; ++p)
        for (int k = 0; k < dims.K; ++k)
        {
            const long off = (static_cast<long>(p) * dims.K + k) * BM;
            A.block(off, off, BM, BM) = a_blocks[p];
        }
    return A;
}

ActiveQcqp assemble_active(const EffectiveChannels &eff, const std::vector<CVec> &xi, const RMat &mu, double noise,
                           const std::vector<double> &p_max, const NetworkDims &dims)
{
    const int K = dims.K, P = dims.P;
    check_mu(mu, K, P);
    if (static_cast<int>(p_max.size()) != dims.B)
        throw std::invalid_argument("p_max must have B entries");
    const long BM = static_cast<long>(dims.B) * dims.M;

    ActiveQcqp q;
    q.dims = dims;
    q.p_max = p_max;
    q.a_blocks.assign(P, CMat::Zero(BM, BM));
    q.V = CVec::Zero(dims.precoder_size());
    for (int p = 0; p < P; ++p)
        for (int k = 0; k < K; ++k)
        {
            const CMat &hH = eff(k, p); // U x BM
            const CVec &x = xi[kp_index(k, p, K)];
            const CVec hx = hH.adjoint() * x; // h_kp xi_kp
            q.a_blocks[p].noalias() += hx * hx.adjoint();
            q.V.segment((static_cast<long>(p) * K + k) * BM, BM) = std::sqrt(mu(k, p)) * hx;
            q.Y += noise * x.squaredNorm();
        }
    return q;
}

CVec q_vector(const ChannelSet &cs, const CVec &theta, const PrecoderStack &W, int k, int p, int j)
{
    const NetworkDims &d = cs.dims();
    CVec q = CVec::Zero(d.U);
    for (int b = 0; b < d.B; ++b)
    {
        const auto w = W.slice(b, p, j);
        q.noalias() += cs.H(b, k, p).adjoint() * w;
        if (d.R > 0)
        {
            const CVec gw = cs.G_stacked(b, p) * w;
            q.noalias() += cs.F_stacked(k, p).adjoint() * theta.conjugate().cwiseProduct(gw);
        }
    }
    return q;
}

namespace
{
CMat q_matrix(const ChannelSet &cs, const CVec &theta, const PrecoderStack &W, int k, int p)
{
    CMat Q(cs.dims().U, W.K());
    for (int j = 0; j < W.K(); ++j)
        Q.col(j) = q_vector(cs, theta, W, k, p, j);
    return Q;
}
} // namespace

std::vector<CVec> update_varpi(const ChannelSet &cs, const CVec &theta, const PrecoderStack &W, const RMat &mu,
                               double noise)
{
    const int K = W.K(), P = W.P();
    check_mu(mu, K, P);
    std::vector<CVec> varpi(static_cast<std::size_t>(K) * P);
    for (int p = 0; p < P; ++p)
        for (int k = 0; k < K; ++k)
        {
            const CMat Q = q_matrix(cs, theta, W, k, p);
            varpi[kp_index(k, p, K)] = scaled_solve(full_covariance(Q, noise), Q.col(k), mu(k, p));
        }
    return varpi;
}

double eval_g5(const ChannelSet &cs, const CVec &theta, const PrecoderStack &W, const std::vector<CVec> &varpi,
               const RMat &mu, double noise)
{
    const int K = W.K(), P = W.P();
    check_mu(mu, K, P);
    double value = 0.0;
    for (int p = 0; p < P; ++p)
        for (int k = 0; k < K; ++k)
            value += transformed_term(q_matrix(cs, theta, W, k, p), k, varpi[kp_index(k, p, K)], mu(k, p), noise);
    return value;
}

double PassiveQcqp::objective(const CVec &theta) const
{
    return -theta.dot(Lambda * theta).real() + 2.0 * theta.dot(nu).real() - zeta;
}

CMat PassiveQcqp::gram_factor() const
{
    CMat out(nu.size(), static_cast<long>(g.size()));
    for (std::size_t i = 0; i < g.size(); ++i)
        out.col(static_cast<long>(i)) = g[i];
    return out;
}

PassiveQcqp assemble_passive(const ChannelSet &cs, const PrecoderStack &W, const std::vector<CVec> &varpi,
                             const RMat &mu, double noise)
{
    const NetworkDims &d = cs.dims();
    const int K = d.K, P = d.P;
    check_mu(mu, K, P);
    const long RN = d.phase_size();

    PassiveQcqp q;
    q.K = K;
    q.P = P;
    q.nu = CVec::Zero(RN);
    q.c.resize(static_cast<std::size_t>(K) * P * K);
    q.g.resize(static_cast<std::size_t>(K) * P * K);

    for (int p = 0; p < P; ++p)
    {
        // sum_b G_bp w_bpj and sum_b H_bkp^H w_bpj are shared across the inner loops.
        std::vector<CVec> gw(K, CVec::Zero(RN));
        for (int j = 0; j < K; ++j)
            for (int b = 0; b < d.B; ++b)
                if (RN > 0)
                    gw[j].noalias() += cs.G_stacked(b, p) * W.slice(b, p, j);

        for (int k = 0; k < K; ++k)
        {
            const CVec &vp = varpi[kp_index(k, p, K)];
            const double smu = std::sqrt(mu(k, p));
            // diag(varpi^H F_kp^H) = conj(F_kp varpi)
            const CVec fv = RN > 0 ? CVec((cs.F_stacked(k, p) * vp).conjugate()) : CVec(0);
            for (int j = 0; j < K; ++j)
            {
                CVec hw = CVec::Zero(d.U);
                for (int b = 0; b < d.B; ++b)
                    hw.noalias() += cs.H(b, k, p).adjoint() * W.slice(b, p, j);
                const std::size_t idx = kp_index(k, p, K) * K + j;
                q.c[idx] = vp.dot(hw);
                q.g[idx] = fv.cwiseProduct(gw[j]);

                q.nu.noalias() -= std::conj(q.c[idx]) * q.g[idx];
                q.zeta += std::norm(q.c[idx]);
            }
            const std::size_t own = kp_index(k, p, K) * K + k;
            q.nu.noalias() += smu * q.g[own];
            q.zeta += noise * vp.squaredNorm() - 2.0 * smu * q.c[own].real();
        }
    }

    const CMat Gm = q.gram_factor();
    q.Lambda = Gm * Gm.adjoint();
    return q;
}

} // namespace riscf
