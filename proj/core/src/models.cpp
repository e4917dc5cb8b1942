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
#include "epiregion/models.hpp"
#include "epiregion/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace epiregion
{

namespace
{

constexpr double infinity = std::numeric_limits<double>::infinity();

void require_size(const Domain& domain, const Vector& v, const char* name)
{
    if (v.size() != domain.size()) {
        throw Error(ErrorKind::ShapeMismatch, std::string("field ") + name + " does not match the domain size");
    }
}

// sup_{x>0} k x^(p-1) / (alpha + beta x^q)
double holling_bound(double k, double p, double q, double alpha, double beta)
{
    if (k == 0.0) {
        return 0.0;
    }
    if (p < 1.0) {
        return infinity;
    }
    if (p == 1.0) {
        return alpha > 0.0 ? k / alpha : infinity;
    }
    const double e = p - 1.0;
    if (beta == 0.0 || q < e) {
        return infinity;
    }
    if (alpha == 0.0) {
        return q == e ? k / beta : infinity;
    }
    if (q == e) {
        return k / beta;
    }
    const double xs = std::pow(e * alpha / (beta * (q - e)), 1.0 / q);
    return k * std::pow(xs, e) / (alpha + beta * std::pow(xs, q));
}

std::string format_double(double x)
{
    std::ostringstream os;
    os.precision(10);
    os << x;
    return os.str();
}

} // namespace

ForceOfInfection ForceOfInfection::linear(double k)
{
    ForceOfInfection g;
    g.family = ForceFamily::Linear;
    g.k      = k;
    return g;
}

ForceOfInfection ForceOfInfection::power(double k, double p)
{
    ForceOfInfection g;
    g.family = ForceFamily::Power;
    g.k      = k;
    g.p      = p;
    return g;
}

ForceOfInfection ForceOfInfection::holling(double k, double p, double q, double alpha, double beta)
{
    ForceOfInfection g;
    g.family = ForceFamily::Holling;
    g.k      = k;
    g.p      = p;
    g.q      = q;
    g.alpha  = alpha;
    g.beta   = beta;
    return g;
}

ForceOfInfection ForceOfInfection::sigmoid(double k, double alpha, double beta)
{
    ForceOfInfection g;
    g.family = ForceFamily::Sigmoid;
    g.k      = k;
    g.p      = 2.0;
    g.q      = 2.0;
    g.alpha  = alpha;
    g.beta   = beta;
    return g;
}

double ForceOfInfection::eval(double x) const
{
    if (!(x > 0.0)) {
        return 0.0;
    }
    switch (family) {
    case ForceFamily::Linear:
        return k * x;
    case ForceFamily::Power:
        return k * std::pow(x, p);
    case ForceFamily::Holling:
        return k * std::pow(x, p) / (alpha + beta * std::pow(x, q));
    case ForceFamily::Sigmoid:
        return k * x * x / (alpha + beta * x * x);
    }
    return 0.0;
}

double ForceOfInfection::derivative(double x) const
{
    if (x < 0.0) {
        return 0.0;
    }
    switch (family) {
    case ForceFamily::Linear:
        return k;
    case ForceFamily::Power:
        if (x == 0.0) {
            return p == 1.0 ? k : (p > 1.0 ? 0.0 : infinity);
        }
        return k * p * std::pow(x, p - 1.0);
    case ForceFamily::Holling: {
        if (x == 0.0) {
            if (p > 1.0) {
                return 0.0;
            }
            if (p == 1.0) {
                return alpha > 0.0 ? k / alpha : infinity;
            }
            return infinity;
        }
        const double xq = std::pow(x, q);
        const double d  = alpha + beta * xq;
        return k * std::pow(x, p - 1.0) * (p * alpha + beta * (p - q) * xq) / (d * d);
    }
    case ForceFamily::Sigmoid: {
        const double d = alpha + beta * x * x;
        return 2.0 * k * alpha * x / (d * d);
    }
    }
    return 0.0;
}

double ForceOfInfection::linear_bound() const
{
    switch (family) {
    case ForceFamily::Linear:
        return k;
    case ForceFamily::Power:
        return (p == 1.0 || k == 0.0) ? k : infinity;
    case ForceFamily::Holling:
        return holling_bound(k, p, q, alpha, beta);
    case ForceFamily::Sigmoid:
        return holling_bound(k, 2.0, 2.0, alpha, beta);
    }
    return infinity;
}

H1Report check_h1(const ForceOfInfection& g, double x_max, int samples)
{
    H1Report report;
    auto fail = [&](std::string message) {
        report.ok        = false;
        report.violation = std::move(message);
        return report;
    };

    if (!(g.k > 0.0)) {
        return fail("H1 violated: coefficient k must be positive");
    }
    if (g.family != ForceFamily::Linear && !(g.p > 0.0)) {
        return fail("H1 violated: exponent p must be positive");
    }
    if ((g.family == ForceFamily::Holling || g.family == ForceFamily::Sigmoid) &&
        (!(g.q > 0.0) || g.alpha < 0.0 || g.beta < 0.0)) {
        return fail("H1 violated: Holling parameters require q > 0, alpha >= 0, beta >= 0");
    }

    for (double x : {0.0, -1e-3, -1.0, -x_max}) {
        if (g.eval(x) != 0.0) {
            return fail("H1-a violated: g(x) != 0 at x=" + format_double(x));
        }
    }

    const double a21 = g.linear_bound();
    if (!std::isfinite(a21) || !(a21 > 0.0)) {
        return fail("H1-c violated: g(x)/x has no finite positive bound a21");
    }

    double previous = 0.0;
    for (int i = 1; i < samples; ++i) {
        const double x  = x_max * i / (samples - 1);
        const double gx = g.eval(x);
        if (gx < previous) {
            return fail("H1-b violated: g decreases at x=" + format_double(x));
        }
        if (gx > a21 * x * (1.0 + 1e-12)) {
            return fail("H1-c violated: g(x) > a21*x at x=" + format_double(x));
        }
        previous = gx;

        if (x > 0.01 * x_max) {
            const double step = 1e-5 * std::max(1.0, x);
            const double fd   = (g.eval(x + step) - g.eval(x - step)) / (2.0 * step);
            const double d    = g.derivative(x);
            if (std::abs(fd - d) > 1e-6 * std::max(std::abs(d), 1e-8)) {
                return fail("g' disagrees with finite differences at x=" + format_double(x));
            }
        }
    }
    return report;
}

double Seasonality::operator()(double t) const
{
    switch (family) {
    case SeasonalityFamily::Constant:
        return mean;
    case SeasonalityFamily::Cosine:
        return mean * (1.0 + depth * std::cos(2.0 * M_PI * t / period));
    }
    return mean;
}

double Seasonality::max_value() const
{
    return family == SeasonalityFamily::Cosine ? mean * (1.0 + std::abs(depth)) : mean;
}

void Seasonality::validate() const
{
    if (!(mean > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "seasonality mean must be positive");
    }
    if (!(period > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "seasonality period must be positive");
    }
    if (family == SeasonalityFamily::Cosine && !(depth >= 0.0 && depth < 1.0)) {
        throw Error(ErrorKind::InvalidArgument, "seasonality depth must lie in [0,1)");
    }
}

const char* to_string(ModelTag tag)
{
    switch (tag) {
    case ModelTag::Core:
        return "core";
    case ModelTag::Controlled:
        return "controlled";
    case ModelTag::Periodic:
        return "periodic";
    case ModelTag::Malaria:
        return "malaria";
    case ModelTag::SirKendall:
        return "sir_kendall";
    }
    return "core";
}

ModelTag model_tag_from_string(const std::string& name)
{
    for (ModelTag tag :
         {ModelTag::Core, ModelTag::Controlled, ModelTag::Periodic, ModelTag::Malaria, ModelTag::SirKendall}) {
        if (name == to_string(tag)) {
            return tag;
        }
    }
    throw Error(ErrorKind::InvalidArgument, "unknown model tag '" + name + "'");
}

void ModelSpec::validate() const
{
    if (!(a11 >= 0.0) || !(a22 >= 0.0) || !(gamma >= 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "rates a11, a22 and gamma must be nonnegative");
    }
    if (tag == ModelTag::Malaria) {
        if (capacity.size() == 0 || (capacity.array() < 0.0).any()) {
            throw Error(ErrorKind::InvalidArgument, "malaria capacity C(x) must be given and nonnegative");
        }
    }
    if (tag == ModelTag::SirKendall) {
        if (!(sir.d2 >= 0.0) || !(sir.d3 >= 0.0) || !(sir.mu >= 0.0) || !(sir.recovery >= 0.0)) {
            throw Error(ErrorKind::InvalidArgument, "SIR rates and diffusivities must be nonnegative");
        }
    }
}

Vector Problem::control_diagonal() const
{
    if (model.has_control() && region) {
        return model.gamma * region->indicator;
    }
    return Vector::Zero(domain.size());
}

Reaction rhs_core(const Domain& domain, const KernelOperator& kernel, const ModelSpec& spec,
                  const ForceOfInfection& g, const Vector& u1, const Vector& u2, const ReactionContext& ctx)
{
    require_size(domain, u1, "u1");
    require_size(domain, u2, "u2");

    Reaction r;
    r.du1 = kernel.apply(u2) - spec.a11 * u1;
    if (spec.has_control() && ctx.region != nullptr && spec.gamma > 0.0) {
        r.du1 -= spec.gamma * ctx.region->indicator.cwiseProduct(u1);
    }

    const double season = (spec.tag == ModelTag::Periodic && ctx.season != nullptr) ? (*ctx.season)(ctx.t) : 1.0;
    r.du2.resize(u2.size());
    for (Index i = 0; i < u2.size(); ++i) {
        r.du2[i] = -spec.a22 * u2[i] + season * g.eval(u1[i]);
    }
    return r;
}

Reaction rhs_malaria(const Domain& domain, const KernelOperator& kernel, const ModelSpec& spec, const Vector& u1,
                     const Vector& u2)
{
    require_size(domain, u1, "u1");
    require_size(domain, u2, "u2");
    require_size(domain, spec.capacity, "capacity");

    Reaction r;
    r.du1 = kernel.apply(u2) - spec.a11 * u1;
    r.du2.resize(u2.size());
    for (Index i = 0; i < u2.size(); ++i) {
        if (u2[i] > spec.capacity[i] + 1e-9) {
            throw Error(ErrorKind::CapacityExceeded, "infected humans exceed the local population C(x)");
        }
        r.du2[i] = -spec.a22 * u2[i] + (spec.capacity[i] - u2[i]) * spec.response.eval(u1[i]);
    }
    return r;
}

SirReaction rhs_sir_kendall(const Domain& domain, const KernelOperator& kernel, const ModelSpec& spec,
                            const Vector& s, const Vector& i, const Vector& r)
{
    require_size(domain, s, "s");
    require_size(domain, i, "i");
    require_size(domain, r, "r");

    const double mu  = spec.sir.mu;
    const double rec = spec.sir.recovery;
    const Vector incidence = kernel.apply(i).cwiseProduct(s);

    SirReaction out;
    out.ds = -incidence + (Vector::Constant(s.size(), mu) - mu * s);
    out.di = incidence - (mu + rec) * i;
    out.dr = rec * i - mu * r;
    return out;
}

std::vector<Vector> evaluate_reaction(const Problem& problem, double t, const std::vector<Vector>& fields)
{
    if (static_cast<int>(fields.size()) != problem.model.field_count()) {
        throw Error(ErrorKind::ShapeMismatch, "state has the wrong number of fields for this model");
    }
    switch (problem.model.tag) {
    case ModelTag::Core:
    case ModelTag::Controlled:
    case ModelTag::Periodic: {
        ReactionContext ctx;
        ctx.t      = t;
        ctx.season = &problem.season;
        ctx.region = problem.region ? &*problem.region : nullptr;
        auto r = rhs_core(problem.domain, problem.kernel, problem.model, problem.force, fields[0], fields[1], ctx);
        return {std::move(r.du1), std::move(r.du2)};
    }
    case ModelTag::Malaria: {
        auto r = rhs_malaria(problem.domain, problem.kernel, problem.model, fields[0], fields[1]);
        return {std::move(r.du1), std::move(r.du2)};
    }
    case ModelTag::SirKendall: {
        auto r = rhs_sir_kendall(problem.domain, problem.kernel, problem.model, fields[0], fields[1], fields[2]);
        return {std::move(r.ds), std::move(r.di), std::move(r.dr)};
    }
    }
    return {};
}

void RossMacdonaldParams::validate() const
{
    if (!(biting_rate > 0.0) || !(humans > 0.0) || !(mosquitoes > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "Ross-Macdonald biting rate and populations must be positive");
    }
    if (!(recovery >= 0.0) || !(mosquito_mortality >= 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "Ross-Macdonald removal rates must be nonnegative");
    }
    if (!(b > 0.0 && b <= 1.0) || !(c > 0.0 && c <= 1.0)) {
        throw Error(ErrorKind::InvalidArgument, "infection proportions b and c must lie in (0,1]");
    }
}

std::pair<double, double> rossmacdonald_rhs(const RossMacdonaldParams& p, double X, double Y)
{
    const double bite = p.biting_rate / p.humans;
    return {-p.recovery * X + bite * p.b * (p.humans - X) * Y,
            -p.mosquito_mortality * Y + bite * p.c * X * (p.mosquitoes - Y)};
}

double rossmacdonald_dt_bound(const RossMacdonaldParams& p)
{
    const double bite = p.biting_rate / p.humans;
    const double lx   = p.recovery + bite * p.b * p.mosquitoes;
    const double ly   = p.mosquito_mortality + bite * p.c * p.humans;
    return 1.0 / std::max(lx, ly);
}

std::pair<double, double> rossmacdonald_step(const RossMacdonaldParams& p, double X, double Y, double dt)
{
    p.validate();
    if (!(dt > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "time step must be positive");
    }
    if (X < 0.0 || X > p.humans || Y < 0.0 || Y > p.mosquitoes) {
        throw Error(ErrorKind::InvalidArgument, "state must lie in [0,H]x[0,M]");
    }

    const auto [k1x, k1y] = rossmacdonald_rhs(p, X, Y);
    const auto [k2x, k2y] = rossmacdonald_rhs(p, X + 0.5 * dt * k1x, Y + 0.5 * dt * k1y);
    const auto [k3x, k3y] = rossmacdonald_rhs(p, X + 0.5 * dt * k2x, Y + 0.5 * dt * k2y);
    const auto [k4x, k4y] = rossmacdonald_rhs(p, X + dt * k3x, Y + dt * k3y);
    const double nx       = X + dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
    const double ny       = Y + dt / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);

    const double tx = 1e-12 * p.humans;
    const double ty = 1e-12 * p.mosquitoes;
    if (nx < -tx || nx > p.humans + tx || ny < -ty || ny > p.mosquitoes + ty) {
        throw Error(ErrorKind::StepTooLarge, "RK4 step left the invariant box; reduce dt below " +
                                                 format_double(rossmacdonald_dt_bound(p)));
    }
    return {std::clamp(nx, 0.0, p.humans), std::clamp(ny, 0.0, p.mosquitoes)};
}

} // namespace epiregion
