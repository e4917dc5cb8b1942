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
#ifndef EPIREGION_CONTROL_HPP
#define EPIREGION_CONTROL_HPP

#include "epiregion/spectral.hpp"

#include <optional>
#include <string>
#include <vector>

namespace epiregion
{

enum class Verdict
{
    ZeroStabilizable,
    LocallyZeroStabilizable,
    NotStabilizable,
    Inconclusive,
};

const char* to_string(Verdict verdict);

enum class CertifyMode
{
    Homogeneous,
    Periodic,
};

const char* to_string(CertifyMode mode);
CertifyMode certify_mode_from_string(const std::string& name);

/// Eigenvalues within this distance of zero leave the sign undetermined.
inline constexpr double inconclusive_band = 1e-7;

/**
 * Decision table for the periodic problem: lambda1T > 0 gives global
 * stabilizability, lambda1T <= 0 < lambda1T_local gives local
 * stabilizability, lambda1T_local < 0 rules out both.
 */
Verdict classify_periodic(double lambda1T, double lambda1T_local, double band = inconclusive_band);

/**
 * lambda1 > 0 certifies stabilizability for large gamma. A negative lambda1
 * rules it out only when g'(0) equals a21; otherwise the test is silent.
 */
Verdict classify_homogeneous(double lambda1, bool derivative_matches_bound, double band = inconclusive_band);

struct StabilizationReport {
    CertifyMode mode = CertifyMode::Homogeneous;
    RegionShape shape = RegionShape::Interval;
    Point center{0.0, 0.0};
    Point size{0.0, 0.0};
    double gamma = 0.0;
    /// lambda_{1,gamma}^omega
    double lambda_controlled = 0.0;
    /// lambda_1(omega), Dirichlet data on omega
    double lambda_dirichlet  = 0.0;
    std::optional<double> lambda_periodic;
    std::optional<double> lambda_periodic_local;
    Verdict verdict = Verdict::Inconclusive;
    /// The given gamma alone yields exponential decay (lambda_{1,gamma}^omega > 0).
    bool gamma_sufficient = false;
    std::optional<double> decay_rate;
};

/// Copy of the problem with feedback gain gamma acting on region.
Problem with_control(const Problem& problem, const ControlRegion& region, double gamma);

StabilizationReport certify(const Problem& problem, const ControlRegion& region, double gamma, CertifyMode mode,
                            const PeriodicConfig& periodic = {});

struct FeedbackRun {
    Trajectory trajectory;
    StabilizationReport report;
};

/**
 * Simulates the system under v = -gamma u1 on omega and measures the decay
 * rate of |u1|_inf over the trailing `rate_window` (a quarter of the horizon
 * when zero). Throws PositivityViolation when a field drops below -1e-12.
 */
FeedbackRun run_feedback(const Problem& problem, const ControlRegion& region, double gamma,
                         const StateField& initial, const SolverConfig& config, double rate_window = 0.0,
                         bool with_certificate = true);

enum class DomainFlag
{
    Whole,
    Region,
};

const char* to_string(DomainFlag flag);
DomainFlag domain_flag_from_string(const std::string& name);

/// Integral of u1 + u2 over the domain or over omega only.
double compute_R(const Domain& domain, const StateField& terminal, const ControlRegion* region,
                 DomainFlag flag = DomainFlag::Whole);

double compute_R(const Domain& domain, const Trajectory& trajectory, const ControlRegion* region,
                 DomainFlag flag = DomainFlag::Whole);

struct AdjointSolution {
    /// Aligned with the forward steps: p1[n], p2[n] live at t_n.
    std::vector<Vector> p1;
    std::vector<Vector> p2;
    std::vector<double> times;
    double terminal_value = 1.0;
};

/**
 * Exact discrete adjoint of the forward scheme for the whole-domain R with
 * terminal data p1 = p2 = 1: kernel transposed, g' taken from the stored
 * forward states. Needs a trajectory stored at every step.
 */
AdjointSolution solve_adjoint(const Problem& problem, const Trajectory& forward, const ControlRegion& region,
                              double gamma);

struct ShapeGradient {
    std::vector<Point> directions;
    std::vector<double> derivatives;
    Point gradient{0.0, 0.0};
    /// Time integral of the facet average of u1 p1, one entry per facet.
    std::vector<double> facet_integrals;
};

/// gamma * int_0^T sum_facets weight * (normal . V) * u1 * p1, trapezoid in time.
double shape_derivative(const Trajectory& forward, const AdjointSolution& adjoint, const ControlRegion& region,
                        double gamma, const Point& direction);

ShapeGradient shape_gradient(const Domain& domain, const Trajectory& forward, const AdjointSolution& adjoint,
                             const ControlRegion& region, double gamma);

enum class Termination
{
    GradientSmall,
    MaxIter,
    BoundaryClamp,
    NoDecrease,
};

const char* to_string(Termination reason);

struct OptimizerConfig {
    double eta0     = 0.1;
    /// Smallest step tried; 0 means one grid cell.
    double eta_min  = 0.0;
    double grad_tol = 1e-10;
    int max_iter    = 20;
};

struct TranslationPath {
    std::vector<Point> centers;
    std::vector<double> values;
    /// Step length that produced each accepted iterate (0 for the start).
    std::vector<double> step_sizes;
    std::vector<ShapeGradient> gradients;
    /// True where the accepted center was clamped to keep omega inside the domain.
    std::vector<bool> clamped;
    Termination termination = Termination::MaxIter;
};

/**
 * Moves omega by -eta * gradient / |gradient| with backtracking until R
 * decreases, keeping a clearance of 2h from the outer boundary.
 */
TranslationPath optimize_translation(const Problem& problem, const ControlRegion& initial_region, double gamma,
                                     const StateField& initial, const SolverConfig& solver,
                                     const OptimizerConfig& config = {});

} // namespace epiregion

#endif // EPIREGION_CONTROL_HPP
