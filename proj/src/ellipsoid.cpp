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
#include <sstream>

namespace riscf
{

int default_ellipsoid_iterations(int dim, double init_radius, double tol)
{
    const double n2 = static_cast<double>(dim) * dim;
    const double logs = std::max(1.0, std::log(std::max(init_radius, tol) / tol));
    return static_cast<int>(std::max(10.0 * n2, std::ceil(16.0 * n2 * logs) + 100.0));
}

EllipsoidResult ellipsoid_minimize(const DualOracle &oracle, int dim, double init_radius, double tol, int max_iter)
{
    if (dim < 1)
        throw std::invalid_argument("ellipsoid dimension must be ≥ 1");
    if (!(init_radius > 0.0) || !std::isfinite(init_radius))
        throw std::invalid_argument("ellipsoid radius must be positive and finite");
    if (!(tol > 0.0))
        throw std::invalid_argument("ellipsoid tolerance must be positive");

    const double n = dim;
    RVec x = RVec::Zero(dim);
    RMat P = RMat::Identity(dim, dim) * (init_radius * init_radius);
    double best_gap = kInf;

    for (int it = 0;; ++it)
    {
        RVec g;
        Eigen::Index worst = 0;
        if (x.minCoeff(&worst) < 0.0)
        {
            // Feasibility cut: keep the half-space x_worst >= current value.
            g = RVec::Zero(dim);
            g[worst] = -1.0;
        }
        else
        {
            DualCut cut = oracle(x);
            if (cut.subgradient.size() != dim)
                throw std::invalid_argument("dual oracle returned a subgradient of the wrong size");
            best_gap = std::min(best_gap, cut.gap_surrogate);
            if (cut.gap_surrogate <= tol)
                return {x, P, it, cut.gap_surrogate};
            g = std::move(cut.subgradient);
        }

        double gPg = g.dot(P * g);
        const double width = P.trace();
        if (gPg <= 1e-13 * g.squaredNorm() * width && it < max_iter)
        {
            // P has become too eccentric for the next cut to be resolved in double precision.
            // The ball of radius sqrt(trace P) about x contains the current ellipsoid.
            P = RMat::Identity(dim, dim) * width;
            gPg = g.dot(P * g);
        }
        if (!(gPg > 0.0) || !std::isfinite(gPg) || it >= max_iter)
        {
            std::ostringstream os;
            os << "ellipsoid method stopped after " << it << " iterations (dim " << dim
               << ") with gap surrogate " << best_gap << " > " << tol;
            throw EllipsoidNotConverged(os.str(), it, best_gap);
        }

        const RVec step = P * g / std::sqrt(gPg);
        if (dim == 1)
        {
            x -= 0.5 * step;
            P *= 0.25;
        }
        else
        {
            x -= step / (n + 1.0);
            P = (n * n / (n * n - 1.0)) * (P - (2.0 / (n + 1.0)) * step * step.transpose());
            P = 0.5 * (P + P.transpose()).eval();
        }
    }
}

} // namespace riscf
