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

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace riscf
{

using cdouble = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Network dimensions. R = 0 selects the conventional cell-free network without RIS.
struct NetworkDims
{
    int B = 1; // base stations
    int R = 0; // reflecting surfaces
    int K = 1; // users
    int M = 1; // antennas per BS
    int U = 1; // antennas per user
    int N = 1; // elements per RIS
    int P = 1; // subcarriers

    // Length of the stacked precoder W.
    long precoder_size() const { return static_cast<long>(B) * M * P * K; }
    // Length of the stacked reflection vector theta.
    long phase_size() const { return static_cast<long>(R) * N; }

    bool operator==(const NetworkDims &) const = default;
};

struct Point2
{
    double x = 0.0;
    double y = 0.0;

    bool operator==(const Point2 &) const = default;
};

double distance(const Point2 &a, const Point2 &b);

// Feasible set of a single reflection coefficient.
class PhaseConstraint
{
  public:
    enum class Kind
    {
        kIdeal,      // |theta| <= 1
        kContinuous, // |theta| == 1
        kDiscrete    // theta in {exp(j 2 pi l / L)}
    };

    static PhaseConstraint ideal() { return PhaseConstraint(Kind::kIdeal, 0); }
    static PhaseConstraint continuous() { return PhaseConstraint(Kind::kContinuous, 0); }
    // Throws std::invalid_argument for levels < 2.
    static PhaseConstraint discrete(int levels);

    // Accepts "f1", "f2", "f3:<L>" (case-insensitive).
    static PhaseConstraint parse(const std::string &text);

    PhaseConstraint() = default;

    Kind kind() const { return kind_; }
    int levels() const { return levels_; }
    bool is_convex() const { return kind_ == Kind::kIdeal; }

    // True iff z lies in the closure of the feasible set, within tol.
    bool contains(cdouble z, double tol = 1e-9) const;

    std::string to_string() const;

    bool operator==(const PhaseConstraint &) const = default;

  private:
    PhaseConstraint(Kind kind, int levels) : kind_(kind), levels_(levels) {}

    Kind kind_ = Kind::kIdeal;
    int levels_ = 0;
};

struct RicianFactors
{
    double beta_BR = kInf; // BS-RIS
    double beta_Bu = 0.0;  // BS-user
    double beta_Ru = 0.0;  // RIS-user
};

struct PathLossParams
{
    double C_dGG_dB = -30.0; // composite gain of the direct link
    double C_rGG_dB = -40.0; // composite gain of the reflected link
    double kappa_Bu = 3.0;
    double kappa_BR = 2.0;
    double kappa_Ru = 2.0;
};

// Method used for the reflection subproblem.
enum class PassiveMethod
{
    kAuto,             // ellipsoid up to ellipsoid_max_dim, projected gradient above
    kEllipsoid,        // Lagrange dual + ellipsoid method
    kProjectedGradient // accelerated projected gradient with KKT certificate
};

struct SolverSettings
{
    double dual_tol = 1e-7;
    int max_dual_iter = 0; // 0 selects default_ellipsoid_iterations()
    double rel_tol = 1e-3; // outer-loop stopping rule on |dR|/R
    int max_outer = 100;
    double init_power_fraction = 1.0;
    PassiveMethod passive_method = PassiveMethod::kAuto;
    int ellipsoid_max_dim = 8;
    double gradient_tol = 1e-8;
    int gradient_max_iter = 20000;

    // Outer-loop preset with a 2 % relative convergence error.
    static SolverSettings coarse()
    {
        SolverSettings s;
        s.rel_tol = 2e-2;
        return s;
    }
};

struct ScenarioConfig
{
    std::string name = "custom";
    NetworkDims dims;
    std::vector<Point2> bs_positions;
    std::vector<Point2> ris_positions;
    std::vector<Point2> user_positions;
    std::vector<double> p_max; // watts, per BS
    double noise_power = 1e-15; // watts
    std::vector<double> user_weights;
    RicianFactors rician;
    PathLossParams pathloss;
    PhaseConstraint constraint_set;
    std::uint64_t seed = 0;
    SolverSettings solver;
};

struct ValidationReport
{
    std::vector<std::string> issues;

    bool ok() const { return issues.empty(); }
    // True if any issue contains the given text.
    bool mentions(const std::string &text) const;
};

ValidationReport validate(const ScenarioConfig &config);

double dbm_to_watts(double x_dbm);
double db_to_linear(double x_db);
double linear_to_db(double x);

// Stacked active precoder W = [w_{1,1}; ...; w_{1,K}; w_{2,1}; ...; w_{P,K}],
// each w_{p,k} = [w_{1,p,k}; ...; w_{B,p,k}] of length B*M.
class PrecoderStack
{
  public:
    PrecoderStack() = default;
    explicit PrecoderStack(const NetworkDims &dims);
    PrecoderStack(const NetworkDims &dims, CVec w);

    long offset(int b, int p, int k) const
    {
        return ((static_cast<long>(p) * K_ + k) * B_ + b) * M_;
    }
    long user_offset(int p, int k) const { return (static_cast<long>(p) * K_ + k) * B_ * M_; }

    // M-length slice w_{b,p,k}.
    auto slice(int b, int p, int k) { return w_.segment(offset(b, p, k), M_); }
    auto slice(int b, int p, int k) const { return w_.segment(offset(b, p, k), M_); }

    // B*M-length slice w_{p,k}.
    auto user_slice(int p, int k) { return w_.segment(user_offset(p, k), static_cast<long>(B_) * M_); }
    auto user_slice(int p, int k) const
    {
        return w_.segment(user_offset(p, k), static_cast<long>(B_) * M_);
    }

    // sum_{k,p} ||w_{b,p,k}||^2
    double bs_power(int b) const;
    double total_power() const { return w_.squaredNorm(); }

    const CVec &vector() const { return w_; }
    CVec &vector() { return w_; }

    int B() const { return B_; }
    int M() const { return M_; }
    int P() const { return P_; }
    int K() const { return K_; }

  private:
    int B_ = 0, M_ = 0, P_ = 0, K_ = 0;
    CVec w_;
};

// Reflection coefficients theta = diag(Theta_1, ..., Theta_R) * 1, ordered RIS-major.
struct PhaseConfig
{
    CVec theta;
    PhaseConstraint constraint_set;

    // Largest distance of an entry from its feasible set (0 when feasible).
    double max_violation() const;
    bool feasible(double tol = 1e-9) const;
};

} // namespace riscf
