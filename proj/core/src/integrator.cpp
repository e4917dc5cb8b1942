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
#include "epiregion/integrator.hpp"
#include "epiregion/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace epiregion
{

namespace
{

SparseMatrix identity(Index n)
{
    SparseMatrix I(n, n);
    I.setIdentity();
    return I;
}

std::vector<SparseMatrix> diffusion_operators(const Problem& problem)
{
    const SparseMatrix& L = problem.diffusion.matrix;
    std::vector<SparseMatrix> ops;
    if (problem.model.tag == ModelTag::SirKendall) {
        const double d1 = problem.diffusion.d1;
        ops.push_back(L);
        for (double d : {problem.model.sir.d2, problem.model.sir.d3}) {
            ops.push_back(d > 0.0 ? SparseMatrix((d / d1) * L) : SparseMatrix());
        }
    }
    else {
        ops.push_back(L);
        ops.emplace_back();
    }
    return ops;
}

double max_diagonal(const SparseMatrix& m)
{
    double d = 0.0;
    for (Index i = 0; i < m.rows(); ++i) {
        d = std::max(d, m.coeff(i, i));
    }
    return d;
}

double nodal_min(const StateField& state)
{
    double m = std::numeric_limits<double>::infinity();
    for (const auto& f : state) {
        if (f.size() > 0) {
            m = std::min(m, f.minCoeff());
        }
    }
    return m;
}

void record_norms(const Domain& domain, const StateField& state, Trajectory& traj)
{
    for (std::size_t f = 0; f < state.size(); ++f) {
        traj.sup_norms[f].push_back(state[f].cwiseAbs().maxCoeff());
        traj.integrals[f].push_back(domain.integrate(state[f]));
    }
}

void check_state(const Problem& problem, const StateField& state)
{
    if (static_cast<int>(state.size()) != problem.model.field_count()) {
        throw Error(ErrorKind::ShapeMismatch, "initial state has the wrong number of fields");
    }
    for (const auto& f : state) {
        if (f.size() != problem.domain.size()) {
            throw Error(ErrorKind::ShapeMismatch, "initial field does not match the domain size");
        }
    }
}

} // namespace

const char* to_string(Scheme scheme)
{
    return scheme == Scheme::BackwardEuler ? "backward-euler" : "crank-nicolson";
}

Scheme scheme_from_string(const std::string& name)
{
    if (name == "backward-euler" || name == "backward-euler-diffusion") {
        return Scheme::BackwardEuler;
    }
    if (name == "crank-nicolson" || name == "crank-nicolson-diffusion") {
        return Scheme::CrankNicolson;
    }
    throw Error(ErrorKind::InvalidArgument, "unknown scheme '" + name + "'");
}

double positivity_dt_bound(const Problem& problem, Scheme scheme)
{
    const ModelSpec& m = problem.model;
    const double knorm = problem.kernel.inf_norm();
    double rate        = 0.0;
    switch (m.tag) {
    case ModelTag::Core:
    case ModelTag::Malaria:
        rate = std::max(m.a11 + knorm, m.a22);
        break;
    case ModelTag::Controlled:
    case ModelTag::Periodic:
        rate = std::max(m.a11 + (problem.region ? m.gamma : 0.0) + knorm, m.a22);
        break;
    case ModelTag::SirKendall:
        rate = std::max(knorm + m.sir.mu, m.sir.mu + m.sir.recovery);
        break;
    }
    double bound = rate > 0.0 ? 1.0 / rate : std::numeric_limits<double>::infinity();
    if (scheme == Scheme::CrankNicolson) {
        for (const auto& op : diffusion_operators(problem)) {
            if (op.size() > 0) {
                bound = std::min(bound, 2.0 / max_diagonal(op));
            }
        }
    }
    return bound;
}

void validate_config(const SolverConfig& config, const Problem& problem)
{
    if (!(config.dt > 0.0) || !(config.end_time > 0.0)) {
        throw Error(ErrorKind::ValidationError, "dt and end_time must be positive");
    }
    if (!(config.steady_tolerance > 0.0) || config.snapshot_stride < 0) {
        throw Error(ErrorKind::ValidationError, "steady_tolerance must be positive and snapshot_stride nonnegative");
    }
    const double bound = positivity_dt_bound(problem, config.scheme);
    if (config.dt > bound * (1.0 + 1e-12)) {
        std::ostringstream os;
        os.precision(10);
        os << "dt=" << config.dt << " exceeds the positivity bound " << bound;
        throw Error(ErrorKind::ValidationError, os.str(), bound);
    }
}

ImexStepper::ImexStepper(std::vector<SparseMatrix> diffusion, double dt, Scheme scheme)
    : m_diffusion(std::move(diffusion))
    , m_dt(dt)
    , m_scheme(scheme)
{
    m_solvers.resize(m_diffusion.size());
    for (std::size_t f = 0; f < m_diffusion.size(); ++f) {
        if (m_diffusion[f].size() == 0) {
            continue;
        }
        const SparseMatrix& L = m_diffusion[f];
        SparseMatrix M        = identity(L.rows()) + (theta() * dt) * L;
        M.makeCompressed();
        auto solver = std::make_shared<Eigen::SparseLU<SparseMatrix>>();
        solver->analyzePattern(M);
        solver->factorize(M);
        if (solver->info() != Eigen::Success) {
            throw Error(ErrorKind::LinearSolveFailure, "factorization of the diffusion matrix failed");
        }
        m_solvers[f] = std::move(solver);
    }
}

Vector ImexStepper::solve(std::size_t field, const Vector& rhs) const
{
    if (!diffuses(field)) {
        return rhs;
    }
    Vector x = m_solvers[field]->solve(rhs);
    if (m_solvers[field]->info() != Eigen::Success) {
        throw Error(ErrorKind::LinearSolveFailure, "diffusion solve failed");
    }
    return x;
}

DenseMatrix ImexStepper::solve_block(std::size_t field, const DenseMatrix& rhs) const
{
    if (!diffuses(field)) {
        return rhs;
    }
    DenseMatrix x = m_solvers[field]->solve(rhs);
    if (m_solvers[field]->info() != Eigen::Success) {
        throw Error(ErrorKind::LinearSolveFailure, "diffusion solve failed");
    }
    return x;
}

Vector ImexStepper::apply_explicit(std::size_t field, const Vector& v) const
{
    if (!diffuses(field) || m_scheme == Scheme::BackwardEuler) {
        return v;
    }
    return v - ((1.0 - theta()) * m_dt) * (m_diffusion[field] * v);
}

DenseMatrix ImexStepper::apply_explicit_block(std::size_t field, const DenseMatrix& v) const
{
    if (!diffuses(field) || m_scheme == Scheme::BackwardEuler) {
        return v;
    }
    return v - ((1.0 - theta()) * m_dt) * (m_diffusion[field] * v);
}

std::vector<Vector> ImexStepper::step(double t, const std::vector<Vector>& u, const ReactionFn& reaction) const
{
    const std::size_t nf = u.size();
    const auto f0        = reaction(t, u);
    std::vector<Vector> explicit_part(nf);
    for (std::size_t f = 0; f < nf; ++f) {
        explicit_part[f] = apply_explicit(f, u[f]);
    }

    std::vector<Vector> next(nf);
    if (m_scheme == Scheme::BackwardEuler) {
        for (std::size_t f = 0; f < nf; ++f) {
            next[f] = solve(f, explicit_part[f] + m_dt * f0[f]);
        }
        return next;
    }

    std::vector<Vector> predictor(nf);
    for (std::size_t f = 0; f < nf; ++f) {
        predictor[f] = solve(f, explicit_part[f] + m_dt * f0[f]);
    }
    const auto f1 = reaction(t + m_dt, predictor);
    for (std::size_t f = 0; f < nf; ++f) {
        next[f] = solve(f, explicit_part[f] + (0.5 * m_dt) * (f0[f] + f1[f]));
    }
    return next;
}

std::vector<std::string> field_names(ModelTag tag)
{
    if (tag == ModelTag::SirKendall) {
        return {"s", "i", "r"};
    }
    return {"u1", "u2"};
}

Simulator::Simulator(const Problem& problem, const SolverConfig& config)
    : m_problem(&problem)
    , m_config(config)
    , m_stepper((validate_config(config, problem), diffusion_operators(problem)), config.dt, config.scheme)
{
}

StateField Simulator::step(const StateField& state, double t) const
{
    const Problem& p = *m_problem;
    return m_stepper.step(t, state, [&p](double time, const std::vector<Vector>& u) {
        return evaluate_reaction(p, time, u);
    });
}

Trajectory Simulator::run(const StateField& initial) const
{
    const Problem& p = *m_problem;
    check_state(p, initial);

    const double dt  = m_config.dt;
    const auto steps = static_cast<Index>(std::ceil(m_config.end_time / dt - 1e-9));
    const int stride = m_config.store_every_step ? 1 : m_config.snapshot_stride;

    Trajectory traj;
    traj.dt          = dt;
    traj.scheme      = m_config.scheme;
    traj.dense       = stride == 1;
    traj.field_names = field_names(p.model.tag);
    traj.sup_norms.resize(initial.size());
    traj.integrals.resize(initial.size());
    traj.times.reserve(static_cast<std::size_t>(steps + 1));

    StateField state = initial;
    traj.times.push_back(0.0);
    record_norms(p.domain, state, traj);
    traj.snapshot_steps.push_back(0);
    traj.snapshot_times.push_back(0.0);
    traj.snapshots.push_back(state);
    traj.min_value = nodal_min(state);

    for (Index n = 0; n < steps; ++n) {
        state        = step(state, static_cast<double>(n) * dt);
        const auto k = n + 1;
        const double t = static_cast<double>(k) * dt;
        traj.times.push_back(t);
        record_norms(p.domain, state, traj);
        traj.min_value = std::min(traj.min_value, nodal_min(state));
        if ((stride > 0 && k % stride == 0) || k == steps) {
            traj.snapshot_steps.push_back(k);
            traj.snapshot_times.push_back(t);
            traj.snapshots.push_back(state);
        }
    }
    return traj;
}

StateField step(const StateField& state, double t, const Problem& problem, const SolverConfig& config)
{
    return Simulator(problem, config).step(state, t);
}

Trajectory simulate(const Problem& problem, const StateField& initial, const SolverConfig& config)
{
    return Simulator(problem, config).run(initial);
}

double measure_decay_rate(const Trajectory& trajectory, std::size_t field, double window)
{
    if (field >= trajectory.sup_norms.size() || trajectory.times.size() < 2) {
        throw Error(ErrorKind::InvalidArgument, "trajectory has no such field or too few steps");
    }
    const double t_end = trajectory.end_time();
    const auto& norms  = trajectory.sup_norms[field];

    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    std::size_t count = 0;
    for (std::size_t k = 0; k < trajectory.times.size(); ++k) {
        const double t = trajectory.times[k];
        if (t < t_end - window - 1e-12) {
            continue;
        }
        if (!(norms[k] >= 1e-300)) {
            throw Error(ErrorKind::NormUnderflow, "sup-norm underflows inside the fitting window");
        }
        const double y = std::log(norms[k]);
        sx += t;
        sy += y;
        sxx += t * t;
        sxy += t * y;
        ++count;
    }
    if (count < 2) {
        throw Error(ErrorKind::InvalidArgument, "decay-rate window contains fewer than two samples");
    }
    const double n     = static_cast<double>(count);
    const double denom = n * sxx - sx * sx;
    const double slope = (n * sxy - sx * sy) / denom;
    return -slope;
}

SteadyState steady_state(const Problem& problem, const StateField& initial, const SolverConfig& config)
{
    check_state(problem, initial);
    const Simulator sim(problem, config);
    const double dt  = config.dt;
    const auto steps = static_cast<Index>(std::ceil(config.end_time / dt - 1e-9));

    SteadyState result;
    result.state    = initial;
    result.residual = std::numeric_limits<double>::infinity();
    for (Index n = 0; n < steps; ++n) {
        StateField next = sim.step(result.state, static_cast<double>(n) * dt);
        double change   = 0.0;
        for (std::size_t f = 0; f < next.size(); ++f) {
            change = std::max(change, (next[f] - result.state[f]).cwiseAbs().maxCoeff());
        }
        result.state    = std::move(next);
        result.residual = change / dt;
        result.steps    = n + 1;
        result.time     = static_cast<double>(n + 1) * dt;
        if (result.residual < config.steady_tolerance) {
            return result;
        }
    }
    throw Error(ErrorKind::NotConverged, "steady state not reached before end_time", result.residual);
}

} // namespace epiregion
