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

#include "riscf/fp_updates.hpp"
#include "riscf/model.hpp"

#include <functional>
#include <stdexcept>
#include <string>

namespace riscf
{

class EllipsoidNotConverged : public std::runtime_error
{
  public:
    EllipsoidNotConverged(const std::string &what, int iterations, double residual)
        : std::runtime_error(what), iterations_(iterations), residual_(residual)
    {
    }

    int iterations() const { return iterations_; }
    double residual() const { return residual_; }

  private:
    int iterations_;
    double residual_;
};

// What the dual oracle reports at a nonnegative dual point.
struct DualCut
{
    RVec subgradient;     // subgradient of the dual function
    double gap_surrogate; // max of scaled constraint violation and complementary slackness
};

using DualOracle = std::function<DualCut(const RVec &dual)>;

struct EllipsoidResult
{
    RVec dual;
    RMat shape;
    int iterations = 0;
    double gap_surrogate = 0.0;
};

// Central-cut ellipsoid method over the nonnegative orthant, started from the ball
// of radius init_radius around the origin. Centers with a negative component get a
// feasibility cut; otherwise the oracle's subgradient is the cut. Stops at the first
// feasible center whose gap surrogate is <= tol. When the shape matrix becomes too
// eccentric to resolve the next cut it is reset to the enclosing ball.
// Throws EllipsoidNotConverged after max_iter cuts.
EllipsoidResult ellipsoid_minimize(const DualOracle &oracle, int dim, double init_radius, double tol, int max_iter);

// Default iteration cap: the classical 2 n^2 ln(R/tol) bound with room for resets.
int default_ellipsoid_iterations(int dim, double init_radius, double tol);

struct KktResiduals
{
    double stationarity = 0.0;  // relative to ||V|| (or ||nu||)
    double primal = 0.0;        // worst scaled constraint violation
    double dual = 0.0;          // worst negative multiplier
    double complementary = 0.0; // relative to the objective scale Re{V^H W}

    double worst() const;
};

// ---- Active subproblem -------------------------------------------------

// (sum_b lambda_b D_b + A + eps I)^{-1} V, solved block by block.
PrecoderStack primal_w(const RVec &lambda, const ActiveQcqp &q);

KktResiduals active_kkt(const ActiveQcqp &q, const CVec &w, const RVec &lambda);

struct ActiveSolution
{
    PrecoderStack W;
    RVec lambda;
    int iterations = 0;
    KktResiduals kkt;
};

// Global maximizer of g3 under the per-BS power budgets. max_iter = 0 picks
// default_ellipsoid_iterations().
ActiveSolution solve_active(const ActiveQcqp &q, double tol = 1e-7, int max_iter = 0);

// ---- Passive subproblem ------------------------------------------------

// (diag(chi) + Lambda + eps I)^{-1} nu.
PhaseConfig primal_theta(const RVec &chi, const PassiveQcqp &q);

KktResiduals passive_kkt(const PassiveQcqp &q, const CVec &theta, const RVec &chi);

struct PassiveOptions
{
    double tol = 1e-7;
    int max_iter = 0;
    PassiveMethod method = PassiveMethod::kAuto;
    int ellipsoid_max_dim = 8;
    double gradient_tol = 1e-8;
    int gradient_max_iter = 20000;

    static PassiveOptions from(const SolverSettings &s);
};

struct PassiveSolution
{
    PhaseConfig theta;   // in the requested constraint set
    CVec relaxed;        // optimum of the |theta| <= 1 relaxation
    RVec chi;            // multipliers of the relaxation
    int iterations = 0;
    KktResiduals kkt;    // of the relaxation
    PassiveMethod method_used = PassiveMethod::kEllipsoid;
};

// Solves max g6 over |theta_j| <= 1 and, for the continuous or discrete sets, maps
// the result to the nearest feasible point. warm_start (optional, feasible for the
// relaxation) is returned instead when it scores better on g6.
PassiveSolution solve_passive(const PassiveQcqp &q, const PhaseConstraint &constraint,
                              const PassiveOptions &options = {}, const CVec *warm_start = nullptr);

// Unit-modulus lift keeping the phase (continuous set) or snapping it to the nearest
// of the L grid angles (discrete set). Zero entries take angle 0; exact ties go to
// the lower grid index. Throws std::invalid_argument for the ideal set.
PhaseConfig quantize_phases(const CVec &relaxed, const PhaseConstraint &constraint);

} // namespace riscf
