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
#ifndef EPIREGION_MODELS_HPP
#define EPIREGION_MODELS_HPP

#include "epiregion/grid.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace epiregion
{

enum class ForceFamily
{
    Linear,
    Power,
    Holling,
    Sigmoid,
};

/**
 * Force of infection g acting on the pollutant concentration.
 *
 * linear:  g(x) = k x
 * power:   g(x) = k x^p
 * holling: g(x) = k x^p / (alpha + beta x^q)
 * sigmoid: g(x) = k x^2 / (alpha + beta x^2)
 *
 * All families vanish for x <= 0.
 */
struct ForceOfInfection {
    ForceFamily family = ForceFamily::Linear;
    double k     = 1.0;
    double p     = 1.0;
    double q     = 1.0;
    double alpha = 1.0;
    double beta  = 1.0;

    static ForceOfInfection linear(double k);
    static ForceOfInfection power(double k, double p);
    static ForceOfInfection holling(double k, double p, double q, double alpha, double beta);
    static ForceOfInfection sigmoid(double k, double alpha, double beta);

    double operator()(double x) const
    {
        return eval(x);
    }
    double eval(double x) const;
    /// One-sided derivative; zero for x < 0, right derivative at 0.
    double derivative(double x) const;

    /// sup_{x>0} g(x)/x, computed in closed form; +inf when unbounded.
    double linear_bound() const;
    double derivative_at_zero() const
    {
        return derivative(0.0);
    }
};

struct H1Report {
    bool ok = true;
    std::string violation;
};

/// Sample checks of g(x)=0 for x<=0, monotonicity and g(x) <= a21 x on [0, x_max].
H1Report check_h1(const ForceOfInfection& g, double x_max = 10.0, int samples = 1000);

enum class SeasonalityFamily
{
    Constant,
    Cosine,
};

/// p(t) = mean * (1 + depth * cos(2 pi t / period)) for the cosine family.
struct Seasonality {
    SeasonalityFamily family = SeasonalityFamily::Constant;
    double mean   = 1.0;
    double depth  = 0.0;
    double period = 1.0;

    double operator()(double t) const;
    double max_value() const;
    void validate() const;
};

enum class ModelTag
{
    Core,
    Controlled,
    Periodic,
    Malaria,
    SirKendall,
};

const char* to_string(ModelTag tag);
ModelTag model_tag_from_string(const std::string& name);

struct SirParams {
    double d2       = 0.0;
    double d3       = 0.0;
    double mu       = 0.0;
    double recovery = 0.0;
};

struct ModelSpec {
    ModelTag tag = ModelTag::Core;
    double a11   = 0.0;
    double a22   = 0.0;
    double gamma = 0.0;
    /// Malaria: total human density C(x) per node.
    Vector capacity;
    /// Malaria: functional response h of the human incidence.
    ForceOfInfection response;
    SirParams sir;

    void validate() const;
    bool has_control() const
    {
        return tag == ModelTag::Controlled || tag == ModelTag::Periodic;
    }
    int field_count() const
    {
        return tag == ModelTag::SirKendall ? 3 : 2;
    }
};

/// Everything a simulation needs: grid, operators and reaction terms.
struct Problem {
    Domain domain;
    RobinOperator diffusion;
    KernelOperator kernel;
    ModelSpec model;
    ForceOfInfection force;
    Seasonality season;
    std::optional<ControlRegion> region;

    /// Diagonal gamma * chi_omega, zero when no control acts.
    Vector control_diagonal() const;
};

struct ReactionContext {
    double t                     = 0.0;
    const Seasonality* season    = nullptr;
    const ControlRegion* region  = nullptr;
};

struct Reaction {
    Vector du1;
    Vector du2;
};

struct SirReaction {
    Vector ds;
    Vector di;
    Vector dr;
};

/**
 * Reaction part of the man-environment system (diffusion excluded):
 * du1 = -a11 u1 + K u2 [- gamma chi u1], du2 = -a22 u2 + p(t) g(u1).
 */
Reaction rhs_core(const Domain& domain, const KernelOperator& kernel, const ModelSpec& spec,
                  const ForceOfInfection& g, const Vector& u1, const Vector& u2, const ReactionContext& ctx = {});

Reaction rhs_malaria(const Domain& domain, const KernelOperator& kernel, const ModelSpec& spec, const Vector& u1,
                     const Vector& u2);

SirReaction rhs_sir_kendall(const Domain& domain, const KernelOperator& kernel, const ModelSpec& spec,
                            const Vector& s, const Vector& i, const Vector& r);

/// Reaction of every field of the problem at time t.
std::vector<Vector> evaluate_reaction(const Problem& problem, double t, const std::vector<Vector>& fields);

struct RossMacdonaldParams {
    double biting_rate = 0.0;
    double b           = 1.0;
    double c           = 1.0;
    double humans      = 1.0;
    double mosquitoes  = 1.0;
    double recovery    = 0.0;
    double mosquito_mortality = 0.0;

    void validate() const;
};

std::pair<double, double> rossmacdonald_rhs(const RossMacdonaldParams& params, double X, double Y);

/// Step size below which one RK4 step keeps (X, Y) inside [0,H]x[0,M].
double rossmacdonald_dt_bound(const RossMacdonaldParams& params);

std::pair<double, double> rossmacdonald_step(const RossMacdonaldParams& params, double X, double Y, double dt);

} // namespace epiregion

#endif // EPIREGION_MODELS_HPP
