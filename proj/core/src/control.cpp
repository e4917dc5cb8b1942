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
#include "epiregion/control.hpp"
#include "epiregion/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace epiregion
{

namespace
{

bool derivative_matches(const ForceOfInfection& g)
{
    const double a21 = g.linear_bound();
    const double d0  = g.derivative_at_zero();
    return std::isfinite(a21) && std::abs(d0 - a21) <= 1e-12 * std::max(1.0, a21);
}

StabilizationReport base_report(const ControlRegion& region, double gamma, CertifyMode mode)
{
    StabilizationReport r;
    r.mode   = mode;
    r.shape  = region.shape;
    r.center = region.center;
    r.size   = region.size;
    r.gamma  = gamma;
    return r;
}

double seasonal_factor(const Problem& problem, double t)
{
    return problem.model.tag == ModelTag::Periodic ? problem.season(t) : 1.0;
}

/// Linearized reaction, W-adjoint, applied to (a, b) at forward state u1 and time t.
struct AdjointReaction {
    const Problem* problem;
    Vector decay;

    std::pair<Vector, Vector> operator()(double t, const Vector& u1, const Vector& a, const Vector& b) const
    {
        const ForceOfInfection& g = problem->force;
        const double s            = seasonal_factor(*problem, t);
        Vector slope(u1.size());
        for (Index i = 0; i < u1.size(); ++i) {
            slope[i] = s * g.derivative(u1[i]);
        }
        Vector fa = -decay.cwiseProduct(a) + slope.cwiseProduct(b);
        Vector fb = problem->kernel.apply_transposed(a) - problem->model.a22 * b;
        return {std::move(fa), std::move(fb)};
    }
};

void require_dense(const Trajectory& forward)
{
    if (!forward.dense || forward.snapshots.size() != forward.times.size()) {
        throw Error(ErrorKind::MissingDenseTrajectory,
                    "adjoint and shape derivative need a forward run stored at every step");
    }
}

Point clamp_center(const Domain& domain, const ControlRegion& region, const Point& c, bool& clamped)
{
    Point out = c;
    clamped   = false;
    for (int axis = 0; axis < domain.dimension; ++axis) {
        const auto a   = static_cast<std::size_t>(axis);
        const double r = region_half_extent(region, axis);
        const double lo = r + 2.0 * domain.spacing[a];
        const double hi = domain.extents[a] - r - 2.0 * domain.spacing[a];
        const double v  = std::clamp(c[a], lo, hi);
        if (v != c[a]) {
            clamped = true;
        }
        out[a] = v;
    }
    return out;
}

ControlRegion region_at(const Domain& domain, const ControlRegion& region, const Point& center)
{
    const std::size_t size_entries = region.shape == RegionShape::Box ? 2 : 1;
    return make_region(domain, region.shape, std::span<const double>(center.data(), 2),
                       std::span<const double>(region.size.data(), size_entries));
}

} // namespace

const char* to_string(Verdict verdict)
{
    switch (verdict) {
    case Verdict::ZeroStabilizable:
        return "zero-stabilizable";
    case Verdict::LocallyZeroStabilizable:
        return "locally-zero-stabilizable";
    case Verdict::NotStabilizable:
        return "not-stabilizable";
    case Verdict::Inconclusive:
        return "inconclusive";
    }
    return "inconclusive";
}

const char* to_string(CertifyMode mode)
{
    return mode == CertifyMode::Homogeneous ? "homogeneous" : "periodic";
}

CertifyMode certify_mode_from_string(const std::string& name)
{
    if (name == "homogeneous") {
        return CertifyMode::Homogeneous;
    }
    if (name == "periodic") {
        return CertifyMode::Periodic;
    }
    throw Error(ErrorKind::InvalidArgument, "unknown certification mode '" + name + "'");
}

Verdict classify_periodic(double lambda1T, double lambda1T_local, double band)
{
    if (lambda1T > band) {
        return Verdict::ZeroStabilizable;
    }
    if (lambda1T_local > band) {
        return Verdict::LocallyZeroStabilizable;
    }
    if (lambda1T_local < -band) {
        return Verdict::NotStabilizable;
    }
    return Verdict::Inconclusive;
}

Verdict classify_homogeneous(double lambda1, bool derivative_matches_bound, double band)
{
    if (lambda1 > band) {
        return Verdict::ZeroStabilizable;
    }
    if (lambda1 < -band && derivative_matches_bound) {
        return Verdict::NotStabilizable;
    }
    return Verdict::Inconclusive;
}

Problem with_control(const Problem& problem, const ControlRegion& region, double gamma)
{
    if (!(gamma >= 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "feedback gain gamma must be nonnegative");
    }
    if (region.indicator.size() != problem.domain.size()) {
        throw Error(ErrorKind::ShapeMismatch, "region indicator does not match the domain");
    }
    Problem p = problem;
    if (p.model.tag == ModelTag::Core) {
        p.model.tag = ModelTag::Controlled;
    }
    if (!p.model.has_control()) {
        throw Error(ErrorKind::InvalidArgument, std::string("model '") + to_string(p.model.tag) +
                                                    "' does not take a regional control");
    }
    p.model.gamma = gamma;
    p.region      = region;
    return p;
}

StabilizationReport certify(const Problem& problem, const ControlRegion& region, double gamma, CertifyMode mode,
                            const PeriodicConfig& periodic)
{
    StabilizationReport report = base_report(region, gamma, mode);
    report.lambda_controlled   = principal_eigenvalue_controlled(problem, &region, gamma).eigenvalue;
    report.lambda_dirichlet    = principal_eigenvalue_dirichlet_complement(problem, region).eigenvalue;
    report.gamma_sufficient    = report.lambda_controlled > inconclusive_band;

    if (mode == CertifyMode::Homogeneous) {
        report.verdict = classify_homogeneous(report.lambda_dirichlet, derivative_matches(problem.force));
        return report;
    }
    const double a21 = problem.force.linear_bound();
    const double d0  = problem.force.derivative_at_zero();
    report.lambda_periodic =
        periodic_principal_eigenvalue(problem, region, problem.season, a21, periodic).eigenvalue;
    report.lambda_periodic_local =
        periodic_principal_eigenvalue(problem, region, problem.season, d0, periodic).eigenvalue;
    report.verdict = classify_periodic(*report.lambda_periodic, *report.lambda_periodic_local);
    return report;
}

FeedbackRun run_feedback(const Problem& problem, const ControlRegion& region, double gamma,
                         const StateField& initial, const SolverConfig& config, double rate_window,
                         bool with_certificate)
{
    const Problem controlled = with_control(problem, region, gamma);
    FeedbackRun run;
    run.trajectory = simulate(controlled, initial, config);
    if (run.trajectory.min_value < -1e-12) {
        throw Error(ErrorKind::PositivityViolation, "controlled run produced negative values",
                    run.trajectory.min_value);
    }
    run.report = with_certificate ? certify(problem, region, gamma, CertifyMode::Homogeneous)
                                  : base_report(region, gamma, CertifyMode::Homogeneous);

    const auto& u1_norms = run.trajectory.sup_norms[0];
    if (!u1_norms.empty() && u1_norms.front() > 0.0) {
        const double window = rate_window > 0.0 ? rate_window : 0.25 * run.trajectory.end_time();
        try {
            run.report.decay_rate = measure_decay_rate(run.trajectory, 0, window);
        }
        catch (const Error& e) {
            if (e.kind() != ErrorKind::NormUnderflow) {
                throw;
            }
        }
    }
    return run;
}

const char* to_string(DomainFlag flag)
{
    return flag == DomainFlag::Whole ? "whole" : "region";
}

DomainFlag domain_flag_from_string(const std::string& name)
{
    if (name == "whole") {
        return DomainFlag::Whole;
    }
    if (name == "region") {
        return DomainFlag::Region;
    }
    throw Error(ErrorKind::InvalidArgument, "unknown domain flag '" + name + "'");
}

double compute_R(const Domain& domain, const StateField& terminal, const ControlRegion* region, DomainFlag flag)
{
    if (terminal.size() < 2) {
        throw Error(ErrorKind::ShapeMismatch, "R needs the two fields u1 and u2");
    }
    const Vector total = terminal[0] + terminal[1];
    if (flag == DomainFlag::Whole) {
        return domain.integrate(total);
    }
    if (region == nullptr) {
        throw Error(ErrorKind::InvalidArgument, "region-only R needs a region");
    }
    return domain.integrate(Vector(total.cwiseProduct(region->indicator)));
}

double compute_R(const Domain& domain, const Trajectory& trajectory, const ControlRegion* region, DomainFlag flag)
{
    return compute_R(domain, trajectory.final_state(), region, flag);
}

AdjointSolution solve_adjoint(const Problem& problem, const Trajectory& forward, const ControlRegion& region,
                              double gamma)
{
    require_dense(forward);
    const ModelTag tag = problem.model.tag;
    if (tag == ModelTag::Malaria || tag == ModelTag::SirKendall) {
        throw Error(ErrorKind::InvalidArgument, "adjoint is defined for the man-environment models only");
    }
    const Problem controlled = with_control(problem, region, gamma);
    const Index n            = problem.domain.size();
    const double dt          = forward.dt;
    const Scheme scheme      = forward.scheme;
    const ImexStepper stepper({problem.diffusion.matrix}, dt, scheme);

    AdjointReaction reaction{&controlled, Vector::Constant(n, problem.model.a11) + controlled.control_diagonal()};

    const std::size_t steps = forward.step_count();
    AdjointSolution adj;
    adj.times = forward.times;
    adj.p1.resize(steps + 1);
    adj.p2.resize(steps + 1);
    adj.p1[steps] = Vector::Ones(n);
    adj.p2[steps] = Vector::Ones(n);

    for (std::size_t k = steps; k-- > 0;) {
        const double t  = forward.times[k];
        const Vector& u1 = forward.snapshots[k][0];
        const Vector q1 = stepper.solve(0, adj.p1[k + 1]);
        const Vector& q2 = adj.p2[k + 1];

        if (scheme == Scheme::BackwardEuler) {
            auto [fa, fb] = reaction(t, u1, q1, q2);
            adj.p1[k]     = q1 + dt * fa;
            adj.p2[k]     = q2 + dt * fb;
            continue;
        }

        // Recompute the Heun predictor of the forward step.
        const std::vector<Vector>& u = forward.snapshots[k];
        const auto f0                = evaluate_reaction(controlled, t, u);
        const Vector u1_star         = stepper.solve(0, Vector(stepper.apply_explicit(0, u[0]) + dt * f0[0]));

        auto [ra, rb]   = reaction(t + dt, u1_star, q1, q2);
        const Vector z1 = stepper.solve(0, Vector((0.5 * dt) * ra));
        const Vector z2 = (0.5 * dt) * rb;
        auto [za, zb]   = reaction(t, u1, z1, z2);
        auto [qa, qb]   = reaction(t, u1, q1, q2);

        adj.p1[k] = stepper.apply_explicit(0, q1) + (0.5 * dt) * qa + stepper.apply_explicit(0, z1) + dt * za;
        adj.p2[k] = q2 + (0.5 * dt) * qb + z2 + dt * zb;
    }
    return adj;
}

namespace
{

std::vector<double> facet_time_integrals(const Trajectory& forward, const AdjointSolution& adjoint,
                                         const ControlRegion& region)
{
    require_dense(forward);
    if (adjoint.p1.size() != forward.snapshots.size()) {
        throw Error(ErrorKind::ShapeMismatch, "adjoint and forward trajectories are not aligned");
    }
    const std::size_t steps = forward.step_count();
    std::vector<double> out(region.facets.size(), 0.0);
    for (std::size_t k = 0; k <= steps; ++k) {
        const double w  = (k == 0 || k == steps) ? 0.5 * forward.dt : forward.dt;
        const Vector& u1 = forward.snapshots[k][0];
        const Vector& p1 = adjoint.p1[k];
        for (std::size_t f = 0; f < region.facets.size(); ++f) {
            const Facet& facet = region.facets[f];
            const double u     = 0.5 * (u1[facet.inside] + u1[facet.outside]);
            const double p     = 0.5 * (p1[facet.inside] + p1[facet.outside]);
            out[f] += w * u * p;
        }
    }
    return out;
}

double assemble_derivative(const std::vector<double>& integrals, const ControlRegion& region, double gamma,
                           const Point& direction)
{
    double sum = 0.0;
    for (std::size_t f = 0; f < region.facets.size(); ++f) {
        const Facet& facet = region.facets[f];
        const double nv    = facet.normal[0] * direction[0] + facet.normal[1] * direction[1];
        sum += facet.weight * nv * integrals[f];
    }
    return gamma * sum;
}

} // namespace

double shape_derivative(const Trajectory& forward, const AdjointSolution& adjoint, const ControlRegion& region,
                        double gamma, const Point& direction)
{
    return assemble_derivative(facet_time_integrals(forward, adjoint, region), region, gamma, direction);
}

ShapeGradient shape_gradient(const Domain& domain, const Trajectory& forward, const AdjointSolution& adjoint,
                             const ControlRegion& region, double gamma)
{
    ShapeGradient g;
    g.facet_integrals = facet_time_integrals(forward, adjoint, region);
    for (int axis = 0; axis < domain.dimension; ++axis) {
        Point e{0.0, 0.0};
        e[static_cast<std::size_t>(axis)] = 1.0;
        const double d                    = assemble_derivative(g.facet_integrals, region, gamma, e);
        g.directions.push_back(e);
        g.derivatives.push_back(d);
        g.gradient[static_cast<std::size_t>(axis)] = d;
    }
    return g;
}

const char* to_string(Termination reason)
{
    switch (reason) {
    case Termination::GradientSmall:
        return "gradient-small";
    case Termination::MaxIter:
        return "max-iter";
    case Termination::BoundaryClamp:
        return "boundary-clamp";
    case Termination::NoDecrease:
        return "no-decrease";
    }
    return "max-iter";
}

TranslationPath optimize_translation(const Problem& problem, const ControlRegion& initial_region, double gamma,
                                     const StateField& initial, const SolverConfig& solver,
                                     const OptimizerConfig& config)
{
    if (!(config.eta0 > 0.0) || config.max_iter < 0 || config.eta_min < 0.0) {
        throw Error(ErrorKind::InvalidArgument, "optimizer needs eta0 > 0, eta_min >= 0 and max_iter >= 0");
    }
    const Domain& domain = problem.domain;
    const double eta_min = config.eta_min > 0.0 ? config.eta_min : domain.h();

    SolverConfig dense_cfg      = solver;
    dense_cfg.store_every_step  = true;
    SolverConfig sparse_cfg     = solver;
    sparse_cfg.store_every_step = false;
    sparse_cfg.snapshot_stride  = 0;

    auto objective = [&](const ControlRegion& region) {
        const Problem p = with_control(problem, region, gamma);
        return compute_R(domain, simulate(p, initial, sparse_cfg), &region);
    };
    auto gradient_at = [&](const ControlRegion& region) {
        const Problem p          = with_control(problem, region, gamma);
        const Trajectory forward = simulate(p, initial, dense_cfg);
        const AdjointSolution adj = solve_adjoint(problem, forward, region, gamma);
        return std::make_pair(compute_R(domain, forward, &region), shape_gradient(domain, forward, adj, region, gamma));
    };

    TranslationPath path;
    ControlRegion region = initial_region;
    auto [value, grad]   = gradient_at(region);
    path.centers.push_back(region.center);
    path.values.push_back(value);
    path.step_sizes.push_back(0.0);
    path.gradients.push_back(grad);
    path.clamped.push_back(false);

    double eta = config.eta0;
    for (int iter = 0;; ++iter) {
        const double gnorm = std::hypot(grad.gradient[0], grad.gradient[1]);
        if (gnorm < config.grad_tol) {
            path.termination = Termination::GradientSmall;
            return path;
        }
        if (iter >= config.max_iter) {
            path.termination = Termination::MaxIter;
            return path;
        }

        bool accepted = false;
        bool stuck    = false;
        bool clamped  = false;
        ControlRegion candidate;
        double candidate_value = 0.0;
        while (eta >= eta_min) {
            Point c{region.center[0] - eta * grad.gradient[0] / gnorm, region.center[1] - eta * grad.gradient[1] / gnorm};
            c = clamp_center(domain, region, c, clamped);
            if (std::hypot(c[0] - region.center[0], c[1] - region.center[1]) < 1e-12) {
                stuck = true;
                break;
            }
            candidate       = region_at(domain, region, c);
            candidate_value = objective(candidate);
            if (candidate_value < value) {
                accepted = true;
                break;
            }
            eta *= 0.5;
        }
        if (stuck) {
            path.termination = Termination::BoundaryClamp;
            return path;
        }
        if (!accepted) {
            path.termination = Termination::NoDecrease;
            return path;
        }

        region = std::move(candidate);
        std::tie(value, grad) = gradient_at(region);
        path.centers.push_back(region.center);
        path.values.push_back(value);
        path.step_sizes.push_back(eta);
        path.gradients.push_back(grad);
        path.clamped.push_back(clamped);
        eta = std::min(2.0 * eta, config.eta0);
    }
}

} // namespace epiregion
