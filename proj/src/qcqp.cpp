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

#include "riscf/qcqp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace riscf
{

namespace
{

constexpr double kTiny = 1e-300;

double ridge_for(const CMat &m)
{
    const double mean_diag = m.rows() > 0 ? m.trace().real() / static_cast<double>(m.rows()) : 0.0;
    return std::max(1e-12 * mean_diag, 1e3 * std::numeric_limits<double>::min());
}

// Largest |theta_j|^2 - 1 over entries, clipped at 0.
double disc_violation(const CVec &theta)
{
    double worst = 0.0;
    for (Eigen::Index j = 0; j < theta.size(); ++j)
        worst = std::max(worst, std::norm(theta[j]) - 1.0);
    return worst;
}

void project_to_discs(CVec &theta)
{
    for (Eigen::Index j = 0; j < theta.size(); ++j)
    {
        const double mag = std::abs(theta[j]);
        if (mag > 1.0)
            theta[j] /= mag;
    }
}

} // namespace

double KktResiduals::worst() const { return std::max({stationarity, primal, dual, complementary}); }

// ---- Active ------------------------------------------------------------

PrecoderStack primal_w(const RVec &lambda, const ActiveQcqp &q)
{
    const NetworkDims &d = q.dims;
    if (lambda.size() != d.B)
        throw std::invalid_argument("lambda must have B entries");
    if ((lambda.array() < 0.0).any())
        throw std::invalid_argument("lambda must be nonnegative");
    const long BM = static_cast<long>(d.B) * d.M;

    PrecoderStack W(d);
    for (int p = 0; p < d.P; ++p)
    {
        CMat m = q.a_blocks[p];
        const double eps = ridge_for(m);
        for (int b = 0; b < d.B; ++b)
            for (int i = 0; i < d.M; ++i)
            {
                const long c = static_cast<long>(b) * d.M + i;
                m(c, c) += lambda[b] + eps;
            }
        Eigen::LLT<CMat> llt(m);
        for (int k = 0; k < d.K; ++k)
        {
            const long off = (static_cast<long>(p) * d.K + k) * BM;
            W.vector().segment(off, BM) = llt.solve(q.V.segment(off, BM));
        }
    }
    return W;
}

KktResiduals active_kkt(const ActiveQcqp &q, const CVec &w, const RVec &lambda)
{
    const NetworkDims &d = q.dims;
    const PrecoderStack W(d, w);
    KktResiduals r;

    CVec grad = q.apply_A(w) - q.V;
    for (int b = 0; b < d.B; ++b)
        for (int p = 0; p < d.P; ++p)
            for (int k = 0; k < d.K; ++k)
                grad.segment(W.offset(b, p, k), d.M) += lambda[b] * W.slice(b, p, k);
    r.stationarity = grad.norm() / std::max(q.V.norm(), kTiny);

    const double scale = std::max(q.V.dot(w).real(), kTiny);
    for (int b = 0; b < d.B; ++b)
    {
        const double power = W.bs_power(b);
        r.primal = std::max(r.primal, (power - q.p_max[b]) / q.p_max[b]);
        r.dual = std::max(r.dual, -lambda[b]);
        r.complementary = std::max(r.complementary, lambda[b] * std::abs(q.p_max[b] - power) / scale);
    }
    r.primal = std::max(r.primal, 0.0);
    return r;
}

ActiveSolution solve_active(const ActiveQcqp &q, double tol, int max_iter)
{
    const NetworkDims &d = q.dims;
    ActiveSolution out{PrecoderStack(d), RVec::Zero(d.B), 0, {}};
    if (q.V.norm() == 0.0)
        return out; // g3 is maximized at the origin

    double total_budget = 0.0, inv_sq = 0.0;
    for (double pb : q.p_max)
    {
        total_budget += pb;
        inv_sq += 1.0 / (pb * pb);
    }
    // Stationarity gives sum_b lambda_b P_b <= Re{V^H W} <= ||V|| sqrt(sum_b P_b).
    const double radius = 2.0 * q.V.norm() * std::sqrt(total_budget) * std::sqrt(inv_sq);
    if (max_iter <= 0)
        max_iter = default_ellipsoid_iterations(d.B, radius, tol);

    auto oracle = [&](const RVec &lambda) {
        const PrecoderStack W = primal_w(lambda, q);
        const double scale = std::max(q.V.dot(W.vector()).real(), kTiny);
        DualCut cut{RVec(d.B), 0.0};
        for (int b = 0; b < d.B; ++b)
        {
            const double power = W.bs_power(b);
            cut.subgradient[b] = q.p_max[b] - power;
            const double violation = std::max(0.0, power - q.p_max[b]) / q.p_max[b];
            const double slack = lambda[b] * std::abs(q.p_max[b] - power) / scale;
            cut.gap_surrogate = std::max({cut.gap_surrogate, violation, slack});
        }
        return cut;
    };

    const EllipsoidResult res = ellipsoid_minimize(oracle, d.B, radius, tol, max_iter);
    out.lambda = res.dual;
    out.iterations = res.iterations;
    out.W = primal_w(res.dual, q);
    // Remove the residual violation (at most tol * P_b) so the iterate is feasible.
    for (int b = 0; b < d.B; ++b)
    {
        const double power = out.W.bs_power(b);
        if (power > q.p_max[b])
        {
            const double s = std::sqrt(q.p_max[b] / power);
            for (int p = 0; p < d.P; ++p)
                for (int k = 0; k < d.K; ++k)
                    out.W.slice(b, p, k) *= s;
        }
    }
    out.kkt = active_kkt(q, out.W.vector(), out.lambda);
    return out;
}

// ---- Passive -----------------------------------------------------------

PassiveOptions PassiveOptions::from(const SolverSettings &s)
{
    PassiveOptions o;
    o.tol = s.dual_tol;
    o.max_iter = s.max_dual_iter;
    o.method = s.passive_method;
    o.ellipsoid_max_dim = s.ellipsoid_max_dim;
    o.gradient_tol = s.gradient_tol;
    o.gradient_max_iter = s.gradient_max_iter;
    return o;
}

PhaseConfig primal_theta(const RVec &chi, const PassiveQcqp &q)
{
    if (chi.size() != q.size())
        throw std::invalid_argument("chi must have R*N entries");
    if ((chi.array() < 0.0).any())
        throw std::invalid_argument("chi must be nonnegative");
    CMat m = q.Lambda;
    const double eps = ridge_for(m);
    for (Eigen::Index j = 0; j < m.rows(); ++j)
        m(j, j) += chi[j] + eps;
    PhaseConfig out;
    out.constraint_set = PhaseConstraint::ideal();
    out.theta = m.llt().solve(q.nu);
    return out;
}

KktResiduals passive_kkt(const PassiveQcqp &q, const CVec &theta, const RVec &chi)
{
    KktResiduals r;
    const CVec ascent = q.nu - q.Lambda * theta;
    r.stationarity = (ascent - chi.cast<cdouble>().cwiseProduct(theta)).norm() / std::max(q.nu.norm(), kTiny);
    r.primal = disc_violation(theta);
    r.dual = std::max(0.0, chi.size() > 0 ? -chi.minCoeff() : 0.0);
    const double scale = std::max(q.nu.dot(theta).real(), kTiny);
    for (Eigen::Index j = 0; j < theta.size(); ++j)
        r.complementary = std::max(r.complementary, chi[j] * std::abs(1.0 - std::norm(theta[j])) / scale);
    return r;
}

namespace
{

// Multipliers consistent with a primal point: chi_j = Re{conj(theta_j) r_j} on the
// unit circle, 0 inside.
RVec recover_multipliers(const PassiveQcqp &q, const CVec &theta)
{
    const CVec ascent = q.nu - q.Lambda * theta;
    RVec chi = RVec::Zero(theta.size());
    for (Eigen::Index j = 0; j < theta.size(); ++j)
        if (std::abs(theta[j]) >= 1.0 - 1e-9)
            chi[j] = std::max(0.0, (std::conj(theta[j]) * ascent[j]).real() / std::norm(theta[j]));
    return chi;
}

CVec solve_relaxed_ellipsoid(const PassiveQcqp &q, const PassiveOptions &opt, RVec &chi, int &iterations)
{
    const long n = q.size();
    if (q.nu.norm() == 0.0)
    {
        chi = RVec::Zero(n);
        iterations = 0;
        return CVec::Zero(n);
    }
    // On an active element |theta_j| = 1, so chi_j = |(nu - Lambda theta)_j| <= |nu_j| + sum_i |Lambda_ji|.
    RVec bound(n);
    for (long j = 0; j < n; ++j)
        bound[j] = std::abs(q.nu[j]) + q.Lambda.row(j).cwiseAbs().sum();
    const double radius = 2.0 * bound.norm() + kTiny;
    const int max_iter =
        opt.max_iter > 0 ? opt.max_iter : default_ellipsoid_iterations(static_cast<int>(n), radius, opt.tol);

    auto oracle = [&](const RVec &x) {
        const CVec theta = primal_theta(x, q).theta;
        const double scale = std::max(q.nu.dot(theta).real(), kTiny);
        DualCut cut{RVec(n), 0.0};
        for (long j = 0; j < n; ++j)
        {
            const double mag2 = std::norm(theta[j]);
            cut.subgradient[j] = 1.0 - mag2;
            cut.gap_surrogate =
                std::max({cut.gap_surrogate, mag2 - 1.0, x[j] * std::abs(1.0 - mag2) / scale});
        }
        return cut;
    };

    const EllipsoidResult res = ellipsoid_minimize(oracle, static_cast<int>(n), radius, opt.tol, max_iter);
    chi = res.dual;
    iterations = res.iterations;
    CVec theta = primal_theta(chi, q).theta;
    project_to_discs(theta);
    return theta;
}

// Accelerated projected gradient with adaptive restart on min theta^H Lambda theta - 2 Re{theta^H nu}.
CVec solve_relaxed_gradient(const PassiveQcqp &q, const PassiveOptions &opt, const CVec *warm, int &iterations)
{
    const long n = q.size();
    const CMat Gm = q.gram_factor();
    const bool use_factor = Gm.cols() > 0 && Gm.cols() < n / 2;

    double lipschitz = 0.0;
    if (use_factor)
        lipschitz = Eigen::SelfAdjointEigenSolver<CMat>(Gm.adjoint() * Gm, Eigen::EigenvaluesOnly)
                        .eigenvalues()
                        .maxCoeff();
    else
        lipschitz = Eigen::SelfAdjointEigenSolver<CMat>(q.Lambda, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
    lipschitz *= 1.0 + 1e-10;

    iterations = 0;
    if (!(lipschitz > 0.0))
    {
        // Linear objective: align each element with nu.
        CVec theta(n);
        for (long j = 0; j < n; ++j)
            theta[j] = std::abs(q.nu[j]) > 0.0 ? q.nu[j] / std::abs(q.nu[j]) : cdouble(0.0);
        return theta;
    }

    auto apply = [&](const CVec &v) -> CVec {
        if (use_factor)
            return Gm * (Gm.adjoint() * v);
        return q.Lambda * v;
    };
    auto step = [&](const CVec &y, const CVec &Ly) {
        CVec x = y - (Ly - q.nu) / lipschitz;
        project_to_discs(x);
        return x;
    };

    const double nu_norm = std::max(q.nu.norm(), kTiny);
    CVec x = CVec::Zero(n);
    if (warm != nullptr && warm->size() == n)
    {
        x = *warm;
        project_to_discs(x);
    }
    CVec y = x;
    double t = 1.0;
    for (int it = 1; it <= opt.gradient_max_iter; ++it)
    {
        const CVec x_new = step(y, apply(y));
        if ((y - x_new).dot(x_new - x).real() > 0.0)
        {
            t = 1.0;
            y = x_new;
        }
        else
        {
            const double t_new = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
            y = x_new + ((t - 1.0) / t_new) * (x_new - x);
            t = t_new;
        }
        x = x_new;
        iterations = it;
        if (it % 10 == 0)
        {
            const double residual = lipschitz * (x - step(x, apply(x))).norm() / nu_norm;
            if (residual <= opt.gradient_tol)
                break;
        }
    }
    return x;
}

} // namespace

PassiveSolution solve_passive(const PassiveQcqp &q, const PhaseConstraint &constraint, const PassiveOptions &options,
                              const CVec *warm_start)
{
    const long n = q.size();
    PassiveSolution out;
    out.theta.constraint_set = constraint;
    if (n == 0)
    {
        out.theta.theta = CVec(0);
        out.relaxed = CVec(0);
        out.chi = RVec(0);
        return out;
    }

    PassiveMethod method = options.method;
    if (method == PassiveMethod::kAuto)
        method = n <= options.ellipsoid_max_dim ? PassiveMethod::kEllipsoid : PassiveMethod::kProjectedGradient;
    out.method_used = method;

    if (method == PassiveMethod::kEllipsoid)
    {
        out.relaxed = solve_relaxed_ellipsoid(q, options, out.chi, out.iterations);
    }
    else
    {
        out.relaxed = solve_relaxed_gradient(q, options, warm_start, out.iterations);
        out.chi = recover_multipliers(q, out.relaxed);
    }

    if (warm_start != nullptr && warm_start->size() == n && disc_violation(*warm_start) <= 1e-12 &&
        q.objective(*warm_start) > q.objective(out.relaxed))
    {
        out.relaxed = *warm_start;
        out.chi = recover_multipliers(q, out.relaxed);
    }
    out.kkt = passive_kkt(q, out.relaxed, out.chi);

    if (constraint.kind() == PhaseConstraint::Kind::kIdeal)
        out.theta.theta = out.relaxed;
    else
        out.theta = quantize_phases(out.relaxed, constraint);
    return out;
}

PhaseConfig quantize_phases(const CVec &relaxed, const PhaseConstraint &constraint)
{
    if (constraint.kind() == PhaseConstraint::Kind::kIdeal)
        throw std::invalid_argument("quantize_phases needs the continuous or discrete phase set");
    constexpr double two_pi = 2.0 * std::numbers::pi;
    PhaseConfig out;
    out.constraint_set = constraint;
    out.theta.resize(relaxed.size());
    for (Eigen::Index j = 0; j < relaxed.size(); ++j)
    {
        const cdouble z = relaxed[j];
        const double angle = (z == cdouble(0.0)) ? 0.0 : std::arg(z);
        if (constraint.kind() == PhaseConstraint::Kind::kContinuous)
        {
            out.theta[j] = std::polar(1.0, angle);
            continue;
        }
        const int L = constraint.levels();
        int best = 0;
        double best_dist = kInf;
        for (int l = 0; l < L; ++l)
        {
            double dist = std::fmod(std::abs(angle - two_pi * l / L), two_pi);
            dist = std::min(dist, two_pi - dist);
            if (dist < best_dist - 1e-12)
            {
                best = l;
                best_dist = dist;
            }
        }
        out.theta[j] = best == 0 ? cdouble(1.0) : std::polar(1.0, two_pi * best / L);
    }
    return out;
}

} // namespace riscf
