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
// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "epiregion/control.hpp"
#include "epiregion/error.hpp"
#include "epiregion/scenario.hpp"

#include "fixtures.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace epiregion;

namespace
{

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool condition, const std::string& what)
    {
        if (!condition) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

struct Loaded {
    Scenario scenario;
    Problem problem;
    std::optional<ControlRegion> region;
    StateField initial;
};

Loaded load(const std::string& name)
{
    Loaded l;
    l.scenario = fixture::scenario(name);
    l.problem  = build_problem(l.scenario);
    l.region   = l.problem.region;
    l.initial  = build_initial(l.scenario, l.problem.domain);
    return l;
}

ControlRegion interval(const Domain& domain, double center, double half_width)
{
    return make_region(domain, RegionShape::Interval, std::span<const double>(&center, 1),
                       std::span<const double>(&half_width, 1));
}

double rel_diff(double a, double b)
{
    return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}

// Eigenvalue cross-validation between the direct solver and the logistic estimator.
void criterion_eigen(Outcome& out)
{
    const auto start = std::chrono::steady_clock::now();
    Loaded l         = load("reference_eigen.json");
    const double gamma = l.scenario.gamma;
    const EigenPair direct = principal_eigenvalue_controlled(l.problem, &*l.region, gamma, l.scenario.direct);
    const LogisticEstimate automatic =
        principal_eigenvalue_logistic_auto(l.problem, &*l.region, gamma, l.scenario.logistic);
    const double lambda = direct.eigenvalue;
    const double tol    = 1e-2 * std::max(1.0, std::abs(lambda));
    out.require(std::abs(automatic.estimate - lambda) <= tol, "direct vs logistic");

    double spread = 0.0;
    std::vector<double> estimates;
    for (double shift : {1.0, 2.0}) {
        estimates.push_back(
            principal_eigenvalue_logistic(l.problem, &*l.region, gamma, automatic.estimate + shift, l.scenario.logistic)
                .estimate);
    }
    for (double y0 : {0.5, 1.0, 2.0}) {
        LogisticConfig cfg = l.scenario.logistic;
        cfg.y0             = y0;
        estimates.push_back(
            principal_eigenvalue_logistic(l.problem, &*l.region, gamma, automatic.estimate + 1.0, cfg).estimate);
    }
    const auto [lo, hi] = std::minmax_element(estimates.begin(), estimates.end());
    spread              = *hi - *lo;
    out.require(spread <= 1e-2, "zeta and y0 invariance");

    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.require(seconds < 10.0, "runtime under 10 s");
    out.detail << "direct=" << lambda << " logistic=" << automatic.estimate
               << " diff=" << std::abs(automatic.estimate - lambda) << " spread=" << spread << " time=" << seconds
               << "s";
}

// Measured decay under feedback tracks the controlled eigenvalue.
void criterion_rate(Outcome& out)
{
    Loaded l           = load("feedback_rate.json");
    const double gamma = l.scenario.gamma;
    const double lambda = principal_eigenvalue_controlled(l.problem, &*l.region, gamma).eigenvalue;
    out.require(lambda > 0.2, "controlled eigenvalue above 0.2");

    const FeedbackRun run = run_feedback(l.problem, *l.region, gamma, l.initial, l.scenario.solver, 10.0, false);
    const Trajectory& tr  = run.trajectory;
    const double rate     = run.report.decay_rate.value_or(0.0);
    out.require(rel_diff(rate, lambda) <= 0.15, "rate within 15%");
    out.require(tr.min_value >= -1e-12, "nonnegative fields");
    const double drop1 = tr.sup_norms[0].back() / tr.sup_norms[0].front();
    const double drop2 = tr.sup_norms[1].back() / tr.sup_norms[1].front();
    out.require(drop1 < 1e-6 && drop2 < 1e-6, "sup-norms below 1e-6 of initial");

    const double lambda_off = principal_eigenvalue_controlled(l.problem, &*l.region, 0.0).eigenvalue;
    const FeedbackRun off   = run_feedback(l.problem, *l.region, 0.0, l.initial, l.scenario.solver, 10.0, false);
    const double growth     = off.trajectory.sup_norms[0].back() / off.trajectory.sup_norms[0].front();
    out.require(lambda_off < 0.0 && growth >= 1.0, "uncontrolled run does not decay");

    out.detail << "lambda=" << lambda << " rate=" << rate << " rel=" << rel_diff(rate, lambda)
               << " drop_u1=" << drop1 << " drop_u2=" << drop2 << " min=" << tr.min_value
               << " lambda(gamma=0)=" << lambda_off << " growth(gamma=0)=" << growth;
}

double derivative_at(const Loaded& l, const ControlRegion& region, double gamma, SolverConfig cfg)
{
    cfg.store_every_step = true;
    const Trajectory tr  = simulate(with_control(l.problem, region, gamma), l.initial, cfg);
    const AdjointSolution adj = solve_adjoint(l.problem, tr, region, gamma);
    return shape_derivative(tr, adj, region, gamma, Point{1.0, 0.0});
}

double objective_at(const Loaded& l, double center, double half_width, double gamma, const SolverConfig& cfg)
{
    const ControlRegion region = interval(l.problem.domain, center, half_width);
    return compute_R(l.problem.domain, simulate(with_control(l.problem, region, gamma), l.initial, cfg), &region);
}

// Adjoint shape derivative against a central difference of R.
void criterion_shape(Outcome& out)
{
    Loaded l             = load("hotspot_asymmetric.json");
    const double gamma   = l.scenario.gamma;
    const double center  = l.region->center[0];
    const double half    = l.region->size[0];
    const double h       = l.problem.domain.h();
    const double formula = derivative_at(l, *l.region, gamma, l.scenario.solver);
    const double fd      = (objective_at(l, center + h, half, gamma, l.scenario.solver) -
                       objective_at(l, center - h, half, gamma, l.scenario.solver)) /
                      (2.0 * h);
    out.require(rel_diff(formula, fd) <= 0.05, "formula vs finite difference within 5%");

    Loaded s              = load("hotspot_symmetric.json");
    const double sym      = derivative_at(s, *s.region, s.scenario.gamma, s.scenario.solver);
    const double sym_R    = objective_at(s, s.region->center[0], s.region->size[0], s.scenario.gamma, s.scenario.solver);
    out.require(std::abs(sym) <= 1e-6 * std::abs(sym_R), "symmetric derivative vanishes");

    out.detail << "dR=" << formula << " fd=" << fd << " rel=" << rel_diff(formula, fd) << " symmetric dR=" << sym
               << " R=" << sym_R;
}

// Translation optimizer moves omega toward the hotspot.
void criterion_optimizer(Outcome& out)
{
    Loaded l = load("hotspot_left.json");
    const TranslationPath path =
        optimize_translation(l.problem, *l.region, l.scenario.gamma, l.initial, l.scenario.solver, l.scenario.optimizer);
    const double hotspot = l.scenario.initial.center[0];
    const auto& c        = path.centers;
    out.require(c.size() >= 2, "at least one accepted step");
    out.require(path.values.size() <= 21, "within 20 iterations");
    bool toward = true;
    bool decreasing = true;
    for (std::size_t k = 1; k < c.size(); ++k) {
        toward     = toward && std::abs(c[k][0] - hotspot) < std::abs(c[k - 1][0] - hotspot) + 1e-12;
        decreasing = decreasing && path.values[k] < path.values[k - 1];
    }
    out.require(toward, "centers approach the hotspot");
    out.require(decreasing, "R strictly decreasing");
    out.require(path.values.back() < 0.9 * path.values.front(), "final R below 0.9 initial");
    out.detail << "center " << c.front()[0] << " -> " << c.back()[0] << " R " << path.values.front() << " -> "
               << path.values.back() << " iterations=" << c.size() - 1 << " termination=" << to_string(path.termination);
}

// Period-map eigenvalue and the three-way verdict table.
void criterion_periodic(Outcome& out)
{
    Loaded flat = load("periodic_flat.json");
    const double slope = flat.problem.force.linear_bound();
    const PeriodicEigenPair per =
        periodic_principal_eigenvalue(flat.problem, *flat.region, flat.problem.season, slope, flat.scenario.periodic);
    const EigenPair dir = principal_eigenvalue_dirichlet_complement(flat.problem, *flat.region);
    out.require(std::abs(per.eigenvalue - dir.eigenvalue) <= 1e-2, "constant seasonality matches lambda1");
    out.detail << "flat: periodic=" << per.eigenvalue << " direct=" << dir.eigenvalue;

    const std::pair<const char*, Verdict> cases[] = {{"periodic_zero.json", Verdict::ZeroStabilizable},
                                                      {"periodic_local.json", Verdict::LocallyZeroStabilizable},
                                                      {"periodic_none.json", Verdict::NotStabilizable}};
    for (const auto& [name, expected] : cases) {
        Loaded l = load(name);
        const StabilizationReport r =
            certify(l.problem, *l.region, l.scenario.gamma, CertifyMode::Periodic, l.scenario.periodic);
        out.require(r.verdict == expected, std::string(name) + " verdict");
        out.detail << "; " << name << ": " << to_string(r.verdict) << " (" << r.lambda_periodic.value_or(NAN) << ", "
                   << r.lambda_periodic_local.value_or(NAN) << ")";
        if (l.problem.force.family == ForceFamily::Sigmoid) {
            out.require(l.problem.force.derivative_at_zero() < l.problem.force.linear_bound(), "sigmoid g'(0) < a21");
            out.require(*r.lambda_periodic <= *r.lambda_periodic_local, "lambda1T <= local lambda1T");
        }
    }
}

// Small outbreaks die out, large ones settle on an endemic state.
void criterion_bistability(Outcome& out)
{
    Loaded l = load("bistable.json");
    out.require(l.problem.force.family == ForceFamily::Sigmoid, "sigmoid force");
    SolverConfig cfg = l.scenario.solver;

    SolverConfig short_run = cfg;
    short_run.end_time     = 100.0;
    const Trajectory small = simulate(l.problem, l.initial, short_run);
    const double small_sup = small.sup_norms[0].back();
    out.require(small_sup < 1e-4, "small bump decays");

    Scenario big_scenario        = l.scenario;
    big_scenario.initial.values  = {5.0, 0.0};
    big_scenario.initial.width   = 0.3;
    const StateField big_initial = build_initial(big_scenario, l.problem.domain);
    const SteadyState big        = steady_state(l.problem, big_initial, cfg);
    const double big_sup         = big.state[0].lpNorm<Eigen::Infinity>();
    out.require(big_sup > 0.05, "large bump persists");
    out.detail << "small sup(u1)=" << small_sup << " large steady sup(u1)=" << big_sup << " at t=" << big.time;
}

// Shrinking the kernel width approaches the local (delta) dynamics.
void criterion_local_limit(Outcome& out)
{
    Loaded l               = load("local_limit.json");
    const Trajectory local = simulate(l.problem, l.initial, l.scenario.solver);
    std::vector<double> gaps;
    for (double sigma : {0.2, 0.1, 0.05}) {
        Scenario s         = l.scenario;
        s.kernel.family    = KernelFamily::Gaussian;
        s.kernel.params.sigma = sigma;
        const Problem p    = build_problem(s);
        const Trajectory tr = simulate(p, l.initial, s.solver);
        double gap = 0.0;
        for (std::size_t k = 0; k < tr.snapshots.size(); ++k) {
            for (std::size_t f = 0; f < tr.snapshots[k].size(); ++f) {
                gap = std::max(gap, (tr.snapshots[k][f] - local.snapshots[k][f]).lpNorm<Eigen::Infinity>());
            }
        }
        gaps.push_back(gap);
    }
    out.require(gaps[0] > gaps[1] && gaps[1] > gaps[2], "monotone decrease of the gap");
    out.detail << "gap(0.2)=" << gaps[0] << " gap(0.1)=" << gaps[1] << " gap(0.05)=" << gaps[2];
}

void conservation_check(Outcome& out)
{
    fixture::Setup s;
    s.nodes     = 33;
    s.kernel    = KernelFamily::Delta;
    s.amplitude = 0.7;
    s.a11       = 0.7;
    s.a22       = 0.7;
    s.force     = ForceOfInfection::linear(0.7);
    const Problem p = fixture::problem_1d(s);
    StateField init = fixture::constant_state(p, 0.0, 0.0);
    for (Index i = 0; i < p.domain.size(); ++i) {
        const double x = p.domain.coordinates[static_cast<std::size_t>(i)][0];
        init[0][i]     = 1.0 + std::cos(3.0 * x);
        init[1][i]     = std::exp(-10.0 * (x - 0.7) * (x - 0.7));
    }
    SolverConfig cfg;
    cfg.scheme   = Scheme::CrankNicolson;
    cfg.dt       = 0.005;
    cfg.end_time = 5.0;
    const Trajectory tr = simulate(p, init, cfg);
    double worst = 0.0;
    for (std::size_t k = 1; k < tr.times.size(); ++k) {
        const double before = tr.integrals[0][k - 1] + tr.integrals[1][k - 1];
        const double after  = tr.integrals[0][k] + tr.integrals[1][k];
        worst               = std::max(worst, std::abs(after - before));
    }
    out.require(worst <= 1e-10, "CN conservation per step");
    out.detail << "conservation drift/step=" << worst;
}

void order_check(Outcome& out)
{
    fixture::Setup s;
    s.nodes  = 8;
    s.tag    = ModelTag::Controlled;
    s.gamma  = 1.0;
    s.a11    = 0.5;
    s.a22    = 0.8;
    s.force  = ForceOfInfection::linear(1.2);
    s.region = std::array<double, 2>{0.5, 0.1};
    const Problem p = fixture::problem_1d(s);
    const Index n   = p.domain.size();

    const oracle::Matrix L = oracle::robin_laplacian_1d(static_cast<int>(n), 1.0, s.d1, s.alpha);
    oracle::Matrix G       = oracle::Matrix::Zero(2 * n, 2 * n);
    G.topLeftCorner(n, n)  = -L;
    for (Index i = 0; i < n; ++i) {
        G(i, i) -= s.a11 + s.gamma * p.region->indicator[i];
        G(n + i, i) = s.force.k;
        G(n + i, n + i) = -s.a22;
    }
    G.topRightCorner(n, n) = p.kernel.matrix;

    oracle::Vec y0(2 * n);
    for (Index i = 0; i < n; ++i) {
        const double x = p.domain.coordinates[static_cast<std::size_t>(i)][0];
        y0[i]          = 1.5 + std::cos(M_PI * x);
        y0[n + i]      = 0.5 + x * x;
    }
    const double T         = 1.0;
    const oracle::Vec ref  = oracle::expm(T * G) * y0;
    const StateField init{y0.head(n), y0.tail(n)};

    auto error = [&](int steps) {
        SolverConfig cfg;
        cfg.scheme   = Scheme::CrankNicolson;
        cfg.dt       = T / steps;
        cfg.end_time = T;
        const StateField end = simulate(p, init, cfg).final_state();
        oracle::Vec y(2 * n);
        y << end[0], end[1];
        return (y - ref).lpNorm<Eigen::Infinity>();
    };
    const double e1    = error(20);
    const double e2    = error(40);
    const double ratio = e1 / e2;
    out.require(ratio >= 3.5 && ratio <= 4.5, "second-order ratio");
    out.detail << "; error(dt)=" << e1 << " error(dt/2)=" << e2 << " ratio=" << ratio;
}

void residual_check(Outcome& out)
{
    double worst = 0.0;
    int count    = 0;
    for (const auto& entry : std::filesystem::directory_iterator(fixture::path(""))) {
        if (entry.path().extension() != ".json") {
            continue;
        }
        Scenario sc;
        try {
            sc = load_scenario(entry.path());
        }
        catch (const Error&) {
            continue;
        }
        const Problem p = build_problem(sc);
        std::vector<EigenPair> pairs;
        if (p.region) {
            pairs.push_back(principal_eigenvalue_controlled(p, &*p.region, sc.gamma, sc.direct));
            pairs.push_back(principal_eigenvalue_dirichlet_complement(p, *p.region, sc.direct));
        }
        else if (std::isfinite(p.force.linear_bound())) {
            pairs.push_back(principal_eigenvalue_controlled(p, nullptr, 0.0, sc.direct));
        }
        for (const auto& e : pairs) {
            worst = std::max(worst, e.residual);
            ++count;
        }
    }
    out.require(count > 0 && worst <= 1e-8, "eigen residuals");
    out.detail << "; max residual=" << worst << " over " << count << " solves";
}

// Conservation, convergence order and eigen residuals.
void criterion_hygiene(Outcome& out)
{
    conservation_check(out);
    order_check(out);
    residual_check(out);
}

} // namespace

int main()
{
    const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria = {
        {"eigen cross-validation", criterion_eigen},
        {"feedback decay rate", criterion_rate},
        {"shape derivative", criterion_shape},
        {"region optimizer", criterion_optimizer},
        {"periodic eigenvalue and verdicts", criterion_periodic},
        {"bistability", criterion_bistability},
        {"local limit", criterion_local_limit},
        {"numerical hygiene", criterion_hygiene},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome out;
        try {
            criteria[i].second(out);
        }
        catch (const std::exception& e) {
            out.pass = false;
            out.detail << " [exception: " << e.what() << "]";
        }
        failures += out.pass ? 0 : 1;
        std::printf("criterion %zu %s: %s: %s\n", i + 1, out.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                    out.detail.str().c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
