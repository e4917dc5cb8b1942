/*
* Copyright (C) 2026 The epiregion authors
*
* Licensed under the Apache License, Version 2.0 (the "License");
* you may not use this file except in compliance with the License.
* You may obtain a copy of the License at
*
*     http://www.apache.org/licenses/LICENSE-2.0
*
* Unless required by applicable law or agreed to in writing, software
* distributed under the License is distributed on an "AS IS" BASIS,
* WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
* See the License for the specific language governing permissions and
* limitations under the License.
*/
#ifndef EPIREGION_SPECTRAL_HPP
#define EPIREGION_SPECTRAL_HPP

#include "epiregion/integrator.hpp"

#include <string>
#include <vector>

namespace epiregion
{

struct EigenPair {
    double eigenvalue = 0.0;
    /// Positive eigenvector with sup-norm 1; zero on eliminated (Dirichlet) nodes.
    Vector eigenvector;
    double residual = 0.0;
    std::string method;
    int iterations = 0;
    double shift   = 0.0;
    /// False when the complement of omega is not node-connected.
    bool complement_connected = true;
};

struct DirectConfig {
    int max_iterations = 50000;
    double tolerance   = 1e-10;
};

/**
 * A = L + a11 I - (a21/a22) K + diag(control), the linearization at zero of
 * the controlled man-environment system with u2 eliminated.
 */
DenseMatrix assemble_eigen_operator(const SparseMatrix& diffusion, const DenseMatrix& kernel, double a11, double a21,
                                    double a22, const Vector& control_diagonal);

DenseMatrix assemble_eigen_operator(const RobinOperator& diffusion, const KernelOperator& kernel,
                                    const ModelSpec& spec, const ForceOfInfection& g, const ControlRegion* region,
                                    double gamma);

/**
 * Smallest-real eigenvalue of a Z-matrix by inverse power iteration on
 * (A + sigma I)^{-1}, started from the all-ones vector. sigma comes from the
 * Gershgorin discs so that A + sigma I is an inverse-positive M-matrix.
 */
EigenPair principal_eigenvalue_direct(const DenseMatrix& A, const DirectConfig& config = {});

/// lambda_{1,gamma}^omega on the whole domain.
EigenPair principal_eigenvalue_controlled(const Problem& problem, const ControlRegion* region, double gamma,
                                          const DirectConfig& config = {});

/// lambda_1(omega): Dirichlet data on the closure of omega, no control term.
EigenPair principal_eigenvalue_dirichlet_complement(const Problem& problem, const ControlRegion& region,
                                                    const DirectConfig& config = {});

struct LogisticConfig {
    double y0              = 1.0;
    /// 0 selects a step from the explicit stability bound.
    double dt              = 0.0;
    double max_time        = 5000.0;
    double record_interval = 0.5;
    double tolerance       = 1e-8;
};

struct LogisticEstimate {
    double zeta     = 0.0;
    double horizon  = 0.0;
    double estimate = 0.0;
    double y0       = 1.0;
    double dt       = 0.0;
    /// Integral of y at each recording time.
    std::vector<double> history;
};

/**
 * Runs y_t = -A y + zeta y - (int y) y from y(0) = y0 until the total mass
 * settles; the eigenvalue estimate is zeta minus the limiting mass.
 * Throws ZetaTooSmall when the mass dies out (zeta <= lambda).
 */
LogisticEstimate principal_eigenvalue_logistic(const Problem& problem, const ControlRegion* region, double gamma,
                                               double zeta, const LogisticConfig& config = {});

/// Starts at zeta = a11 + gamma + 1 and enlarges the shift on ZetaTooSmall.
LogisticEstimate principal_eigenvalue_logistic_auto(const Problem& problem, const ControlRegion* region,
                                                    double gamma, const LogisticConfig& config = {});

struct PeriodicConfig {
    int steps_per_period = 400;
    int phase_samples    = 16;
    int max_evaluations  = 100;
};

struct PeriodicEigenPair {
    double eigenvalue = 0.0;
    double slope      = 0.0;
    /// Dominant period-map multiplier at the computed eigenvalue (1 up to root tolerance).
    double multiplier = 0.0;
    /// Multiplier of the unshifted (lambda = 0) period map.
    double multiplier_at_zero = 0.0;
    double periodicity_residual = 0.0;
    std::vector<double> phases;
    std::vector<Vector> phi;
    std::vector<Vector> psi;
    int evaluations = 0;
};

/**
 * Principal eigenvalue of the T-periodic problem on the complement of omega
 * with psi driven by slope * p(t) * phi and lambda acting on the phi equation.
 * lambda is the root of log(rho(P_lambda)) where P_lambda is the period map.
 */
PeriodicEigenPair periodic_principal_eigenvalue(const Problem& problem, const ControlRegion& region,
                                                const Seasonality& season, double slope,
                                                const PeriodicConfig& config = {});

} // namespace epiregion

#endif // EPIREGION_SPECTRAL_HPP
