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

#include "riscf/metrics.hpp"

#include <cassert>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace riscf
{

namespace
{

// s^H C^{-1} s for Hermitian positive-definite C.
double hermitian_quadratic_inverse(const CMat &C, const CVec &s)
{
    Eigen::LLT<CMat> llt(C);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("receive covariance is not positive definite");
    const CVec x = llt.solve(s);
    const cdouble q = s.dot(x); // s^H x
    assert(std::abs(q.imag()) <= 1e-10 * std::max(1.0, std::abs(q.real())));
    return std::max(0.0, q.real());
}

void check_weights(const std::vector<double> &weights, int K)
{
    if (static_cast<int>(weights.size()) != K)
        throw std::invalid_argument("expected " + std::to_string(K) + " user weights");
}

} // namespace

CMat receive_covariance(const EffectiveChannels &eff, const PrecoderStack &W, int k, int p, double noise,
                        bool include_self)
{
    const CMat &h = eff(k, p);
    CMat C = noise * CMat::Identity(h.rows(), h.rows());
    for (int j = 0; j < W.K(); ++j)
    {
        if (j == k && !include_self)
            continue;
        const CVec s = h * W.user_slice(p, j);
        C.noalias() += s * s.adjoint();
    }
    return C;
}

double sinr(const EffectiveChannels &eff, const PrecoderStack &W, int k, int p, double noise)
{
    const CVec s = eff(k, p) * W.user_slice(p, k);
    return hermitian_quadratic_inverse(receive_covariance(eff, W, k, p, noise, false), s);
}

double sinr(const ChannelSet &cs, const CVec &theta, const PrecoderStack &W, int k, int p, double noise)
{
    return sinr(EffectiveChannels(cs, theta), W, k, p, noise);
}

double ratio_term(const EffectiveChannels &eff, const PrecoderStack &W, int k, int p, double noise)
{
    const CVec s = eff(k, p) * W.user_slice(p, k);
    return hermitian_quadratic_inverse(receive_covariance(eff, W, k, p, noise, true), s);
}

double ratio_term(const ChannelSet &cs, const CVec &theta, const PrecoderStack &W, int k, int p, double noise)
{
    return ratio_term(EffectiveChannels(cs, theta), W, k, p, noise);
}

RateReport wsr(const EffectiveChannels &eff, const PrecoderStack &W, const std::vector<double> &weights, double noise)
{
    const int K = W.K(), P = W.P();
    check_weights(weights, K);
    RateReport out;
    out.gamma.resize(K, P);
    out.rate.resize(K, P);
    out.user_rates = RVec::Zero(K);
    for (int k = 0; k < K; ++k)
        for (int p = 0; p < P; ++p)
        {
            const double g = sinr(eff, W, k, p, noise);
            out.gamma(k, p) = g;
            out.rate(k, p) = std::log2(1.0 + g);
            out.user_rates[k] += weights[k] * out.rate(k, p);
        }
    out.wsr = out.user_rates.sum();
    return out;
}

RateReport wsr(const ChannelSet &cs, const CVec &theta, const PrecoderStack &W, const std::vector<double> &weights,
               double noise)
{
    return wsr(EffectiveChannels(cs, theta), W, weights, noise);
}

double lagrangian_objective(const EffectiveChannels &eff, const PrecoderStack &W, const RMat &rho,
                            const std::vector<double> &weights, double noise)
{
    const int K = W.K(), P = W.P();
    check_weights(weights, K);
    if (rho.rows() != K || rho.cols() != P)
        throw std::invalid_argument("rho must be K x P");
    if ((rho.array() < 0.0).any())
        throw std::invalid_argument("rho must be nonnegative");
    double value = 0.0;
    for (int k = 0; k < K; ++k)
        for (int p = 0; p < P; ++p)
        {
            const double eta = weights[k];
            const double r = rho(k, p);
            value += eta * (std::log1p(r) - r + (1.0 + r) * ratio_term(eff, W, k, p, noise));
        }
    // Natural-log form scaled to bits, so that rho = gamma is both the maximizer and tight.
    return value / std::numbers::ln2;
}

double lagrangian_objective(const ChannelSet &cs, const CVec &theta, const PrecoderStack &W, const RMat &rho,
                            const std::vector<double> &weights, double noise)
{
    return lagrangian_objective(EffectiveChannels(cs, theta), W, rho, weights, noise);
}

SignalSimulation simulate_received_signal(const ChannelSet &cs, const CVec &theta, const PrecoderStack &W, int k,
                                          int p, double noise, int n_trials, Rng &rng, bool with_noise)
{
    if (n_trials < 1)
        throw std::invalid_argument("n_trials must be ≥ 1");
    const int K = W.K();
    const CMat h = user_channel(cs, theta, k, p);
    const long U = h.rows();

    // Received signature of every user's symbol.
    CMat signatures(U, K);
    for (int j = 0; j < K; ++j)
        signatures.col(j) = h * W.user_slice(p, j);
    const CVec desired = signatures.col(k);

    std::bernoulli_distribution coin(0.5);
    std::normal_distribution<double> normal(0.0, std::sqrt(noise / 2.0));
    const double a = 1.0 / std::sqrt(2.0);

    CMat Y(U, n_trials), D(U, n_trials);
    CVec sk(n_trials);
    CVec symbols(K);
    for (int t = 0; t < n_trials; ++t)
    {
        for (int j = 0; j < K; ++j)
            symbols[j] = {coin(rng) ? a : -a, coin(rng) ? a : -a};
        CVec y = signatures * symbols;
        if (with_noise)
            for (long u = 0; u < U; ++u)
            {
                const double re = normal(rng);
                const double im = normal(rng);
                y[u] += cdouble(re, im);
            }
        Y.col(t) = y;
        D.col(t) = desired * symbols[k];
        sk[t] = symbols[k];
    }

    SignalSimulation out;
    out.n_trials = n_trials;

    const double sig_energy = desired.squaredNorm();
    if (sig_energy == 0.0)
    {
        out.empirical_sinr = 0.0;
        out.reconstruction_error = kInf;
        return out;
    }

    // Zero-forcing along the desired signature.
    const CVec s_hat = (desired.adjoint() * Y).transpose() / sig_energy;
    out.reconstruction_error = (s_hat - sk).cwiseAbs().maxCoeff();

    // Sample MMSE combiner g = R_y^{-1} E{y s_k^*}.
    const CMat Ry = Y * Y.adjoint() / static_cast<double>(n_trials);
    const CVec cross = Y * sk.conjugate() / static_cast<double>(n_trials);
    const double ridge = 1e-14 * std::max(Ry.trace().real(), 1e-300);
    const CVec g = (Ry + ridge * CMat::Identity(U, U)).ldlt().solve(cross);

    const CMat residual = Y - D;
    const double sig = (g.adjoint() * D).squaredNorm();
    const double res = (g.adjoint() * residual).squaredNorm();
    out.empirical_sinr = res > 0.0 ? sig / res : kInf;
    return out;
}

} // namespace riscf
