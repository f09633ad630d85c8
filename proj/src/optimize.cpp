// Copyright 2026 The Paranet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "paranet/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace paranet {

namespace {

constexpr double kDegenerateSensitivity = 1e-7;

struct Evaluator {
    const ResidualFunction &fn;
    int count = 0;

    bool operator()(const VectorXd &x, VectorXd &r) {
        ++count;
        if (!fn(x, r)) return false;
        return r.allFinite();
    }
};

std::string param_name(const std::vector<std::string> &names, Eigen::Index i) {
    return i < static_cast<Eigen::Index>(names.size()) ? names[i] : "#" + std::to_string(i);
}

MatrixXd jacobian(Evaluator &eval, const VectorXd &x, const VectorXd &r0, const VectorXd &lower,
                  const VectorXd &upper, double step) {
    MatrixXd J(r0.size(), x.size());
    VectorXd rp(r0.size()), rm(r0.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double h = step * std::max(std::abs(x(i)), 1e-3);
        VectorXd xp = x, xm = x;
        xp(i) += h;
        xm(i) -= h;
        const bool up = xp(i) <= upper(i) && eval(xp, rp);
        const bool dn = xm(i) >= lower(i) && eval(xm, rm);
        if (up && dn)
            J.col(i) = (rp - rm) / (2.0 * h);
        else if (up)
            J.col(i) = (rp - r0) / h;
        else if (dn)
            J.col(i) = (r0 - rm) / h;
        else
            J.col(i).setZero();
    }
    return J;
}

}  // namespace

LmResult levenberg_marquardt(const ResidualFunction &residual, VectorXd x0, const VectorXd &lower,
                             const VectorXd &upper, const LmOptions &options,
                             const std::vector<std::string> &names) {
    const Eigen::Index p = x0.size();
    if (lower.size() != p || upper.size() != p)
        throw Error(Errc::InvalidArgument, "bounds and start vector differ in length");
    if (!lower.allFinite() || !upper.allFinite() || (lower.array() > upper.array()).any())
        throw Error(Errc::InvalidArgument, "bounds must be finite and ordered");

    Evaluator eval{residual};
    LmResult res;
    res.x = x0.cwiseMax(lower).cwiseMin(upper);
    if (!eval(res.x, res.residual))
        throw Error(Errc::InvalidArgument, "model cannot be evaluated at the initial guess");
    if (res.residual.size() < p)
        throw Error(Errc::InvalidArgument, "fewer residuals than free parameters");
    res.cost = 0.5 * res.residual.squaredNorm();

    double lambda = options.initial_lambda;
    VectorXd scale = VectorXd::Zero(p);
    VectorXd trial_r(res.residual.size());
    bool fresh_jacobian = true;
    MatrixXd A;
    VectorXd g;

    while (true) {
        if (fresh_jacobian) {
            res.jacobian = jacobian(eval, res.x, res.residual, lower, upper, options.fd_step);
            // Sensitivity of the residuals to a relative change of each
            // parameter; finite-difference roundoff sits near 1e-9.
            VectorXd sens(p);
            for (Eigen::Index i = 0; i < p; ++i)
                sens(i) = res.jacobian.col(i).norm() * std::max(std::abs(res.x(i)), 1e-3);
            for (Eigen::Index i = 0; i < p; ++i)
                if (!(sens(i) > kDegenerateSensitivity * sens.maxCoeff()))
                    throw Error(Errc::DegenerateProblem,
                                "parameter '" + param_name(names, i) + "' does not affect the residuals",
                                param_name(names, i));
            A = res.jacobian.transpose() * res.jacobian;
            g = res.jacobian.transpose() * res.residual;
            scale = scale.cwiseMax(A.diagonal());
            fresh_jacobian = false;

            const double gnorm = (g.array() / scale.array().sqrt()).abs().maxCoeff();
            if (res.cost == 0.0 || gnorm <= options.gtol * std::max(1.0, std::sqrt(2.0 * res.cost))) {
                res.converged = true;
                res.status = "gradient below tolerance";
                break;
            }
        }
        if (res.iterations >= options.max_iterations)
            throw Error(Errc::NonConvergence,
                        "no convergence after " + std::to_string(options.max_iterations) + " iterations");
        ++res.iterations;

        MatrixXd lhs = A;
        lhs.diagonal() += lambda * scale;
        const VectorXd dx = lhs.ldlt().solve(-g);
        const VectorXd xt = (res.x + dx).cwiseMax(lower).cwiseMin(upper);
        const VectorXd step = xt - res.x;
        const bool ok = dx.allFinite() && eval(xt, trial_r);
        const double cost = ok ? 0.5 * trial_r.squaredNorm() : std::numeric_limits<double>::infinity();

        if (ok && cost < res.cost) {
            const double reduction = (res.cost - cost) / res.cost;
            res.x = xt;
            res.residual = trial_r;
            res.cost = cost;
            lambda = std::max(lambda / 10.0, 1e-15);
            fresh_jacobian = true;
            const double xnorm = (res.x.array() * scale.array().sqrt()).matrix().norm();
            const double snorm = (step.array() * scale.array().sqrt()).matrix().norm();
            if (reduction < options.ftol || snorm <= options.xtol * (xnorm + options.xtol)) {
                res.converged = true;
                res.status = reduction < options.ftol ? "cost reduction below tolerance" : "step below tolerance";
                res.jacobian = jacobian(eval, res.x, res.residual, lower, upper, options.fd_step);
                break;
            }
        } else {
            lambda *= 10.0;
            if (lambda > 1e16) {
                res.converged = true;
                res.status = "no further descent";
                break;
            }
        }
    }

    res.evaluations = eval.count;
    const Eigen::Index m = res.residual.size();
    res.std_error = VectorXd::Constant(p, std::numeric_limits<double>::quiet_NaN());
    if (m > p) {
        const double s2 = 2.0 * res.cost / double(m - p);
        // Column-equilibrated so parameters on very different scales survive
        // the pseudo-inverse rank cut.
        VectorXd d = res.jacobian.colwise().norm().transpose();
        d = (d.array() > 0.0).select(d, 1.0);
        const MatrixXd Jn = res.jacobian * d.cwiseInverse().asDiagonal();
        const MatrixXd cov_n = (Jn.transpose() * Jn).completeOrthogonalDecomposition().pseudoInverse() * s2;
        res.std_error = (cov_n.diagonal().cwiseMax(0.0).cwiseSqrt().array() / d.array()).matrix();
    }
    return res;
}

}  // namespace paranet
