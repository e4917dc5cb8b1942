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
#ifndef EPIREGION_INTEGRATOR_HPP
#define EPIREGION_INTEGRATOR_HPP

#include "epiregion/models.hpp"

#include <Eigen/SparseLU>

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace epiregion
{

/// One vector per model field: (u1, u2) or (s, i, r).
using StateField = std::vector<Vector>;

enum class Scheme
{
    /// Backward Euler diffusion, forward Euler reaction. First order, positivity preserving.
    BackwardEuler,
    /// Crank-Nicolson diffusion with a Heun predictor/corrector for the reaction. Second order.
    CrankNicolson,
};

const char* to_string(Scheme scheme);
Scheme scheme_from_string(const std::string& name);

struct SolverConfig {
    double dt              = 1e-2;
    double end_time        = 1.0;
    Scheme scheme          = Scheme::BackwardEuler;
    /// Snapshot every n steps; 0 keeps only the initial and final states.
    int snapshot_stride    = 0;
    /// Keep every state; required by the adjoint solver.
    bool store_every_step  = false;
    double steady_tolerance = 1e-8;
};

/**
 * Largest dt for which the explicit reaction update keeps nonnegative data
 * nonnegative: 1 / max(a11 + gamma + |K|_inf, a22). The Crank-Nicolson
 * scheme additionally needs I - dt/2 L >= 0.
 */
double positivity_dt_bound(const Problem& problem, Scheme scheme);

/// Throws ValidationError when dt is not positive or exceeds the positivity bound.
void validate_config(const SolverConfig& config, const Problem& problem);

/**
 * Implicit-explicit stepper: diffusion implicit with a prefactored matrix
 * I + theta dt L per diffusing field, everything else explicit.
 */
class ImexStepper
{
public:
    using ReactionFn = std::function<std::vector<Vector>(double t, const std::vector<Vector>&)>;

    /// An empty matrix marks a field without diffusion.
    ImexStepper(std::vector<SparseMatrix> diffusion, double dt, Scheme scheme);

    std::vector<Vector> step(double t, const std::vector<Vector>& u, const ReactionFn& reaction) const;

    /// (I + theta dt L)^{-1} rhs
    Vector solve(std::size_t field, const Vector& rhs) const;
    DenseMatrix solve_block(std::size_t field, const DenseMatrix& rhs) const;
    /// (I - (1 - theta) dt L) v
    Vector apply_explicit(std::size_t field, const Vector& v) const;
    DenseMatrix apply_explicit_block(std::size_t field, const DenseMatrix& v) const;

    double dt() const
    {
        return m_dt;
    }
    Scheme scheme() const
    {
        return m_scheme;
    }
    std::size_t field_count() const
    {
        return m_diffusion.size();
    }
    bool diffuses(std::size_t field) const
    {
        return m_diffusion[field].size() > 0;
    }

private:
    double theta() const
    {
        return m_scheme == Scheme::BackwardEuler ? 1.0 : 0.5;
    }

    std::vector<SparseMatrix> m_diffusion;
    std::vector<std::shared_ptr<Eigen::SparseLU<SparseMatrix>>> m_solvers;
    double m_dt;
    Scheme m_scheme;
};

struct Trajectory {
    double dt     = 0.0;
    Scheme scheme = Scheme::BackwardEuler;
    bool dense    = false;
    std::vector<std::string> field_names;
    /// Every step, starting at t = 0.
    std::vector<double> times;
    /// [field][step]
    std::vector<std::vector<double>> sup_norms;
    std::vector<std::vector<double>> integrals;
    std::vector<Index> snapshot_steps;
    std::vector<double> snapshot_times;
    std::vector<StateField> snapshots;
    /// Smallest nodal value seen over all fields and steps.
    double min_value = 0.0;

    std::size_t step_count() const
    {
        return times.empty() ? 0 : times.size() - 1;
    }
    double end_time() const
    {
        return times.empty() ? 0.0 : times.back();
    }
    const StateField& final_state() const
    {
        return snapshots.back();
    }
};

std::vector<std::string> field_names(ModelTag tag);

/// Prefactored time stepper for one problem. The problem must outlive the simulator.
class Simulator
{
public:
    Simulator(const Problem& problem, const SolverConfig& config);

    StateField step(const StateField& state, double t) const;
    Trajectory run(const StateField& initial) const;

    const ImexStepper& stepper() const
    {
        return m_stepper;
    }
    const SolverConfig& config() const
    {
        return m_config;
    }
    const Problem& problem() const
    {
        return *m_problem;
    }

private:
    const Problem* m_problem;
    SolverConfig m_config;
    ImexStepper m_stepper;
};

StateField step(const StateField& state, double t, const Problem& problem, const SolverConfig& config);

Trajectory simulate(const Problem& problem, const StateField& initial, const SolverConfig& config);

/// -slope of a least-squares fit of log(sup-norm) over the trailing time window.
double measure_decay_rate(const Trajectory& trajectory, std::size_t field, double window);

struct SteadyState {
    StateField state;
    double residual = 0.0;
    double time     = 0.0;
    Index steps     = 0;
};

/// Integrates until |u(t+dt) - u(t)|_inf / dt < steady_tolerance; NotConverged at end_time.
SteadyState steady_state(const Problem& problem, const StateField& initial, const SolverConfig& config);

} // namespace epiregion

#endif // EPIREGION_INTEGRATOR_HPP
