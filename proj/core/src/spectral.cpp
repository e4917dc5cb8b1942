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
#include "epiregion/spectral.hpp"
#include "epiregion/error.hpp"

#include <boost/math/tools/roots.hpp>

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace epiregion
{

namespace
{

double infection_ratio(const ModelSpec& spec, const ForceOfInfection& g)
{
    if (!(spec.a22 > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "eigenproblem needs a22 > 0");
    }
    const double a21 = g.linear_bound();
    if (!std::isfinite(a21)) {
        throw Error(ErrorKind::InvalidArgument, "H1-c violated: g(x)/x is unbounded, no finite a21");
    }
    return a21 / spec.a22;
}

Vector control_vector(const Domain& domain, const ControlRegion* region, double gamma)
{
    if (region == nullptr || gamma == 0.0) {
        return Vector::Zero(domain.size());
    }
    if (region->indicator.size() != domain.size()) {
        throw Error(ErrorKind::ShapeMismatch, "region indicator does not match the domain");
    }
    return gamma * region->indicator;
}

double gershgorin_lower_bound(const DenseMatrix& A)
{
    double lower = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < A.rows(); ++i) {
        const double off = A.row(i).cwiseAbs().sum() - std::abs(A(i, i));
        lower            = std::min(lower, A(i, i) - off);
    }
    return lower;
}

struct PowerResult {
    double lambda   = 0.0;
    Vector vector;
    double residual = std::numeric_limits<double>::infinity();
    int iterations  = 0;
    bool failed     = false;
};

PowerResult inverse_iteration(const DenseMatrix& A, double sigma, const DirectConfig& config)
{
    const Index n = A.rows();
    const Eigen::PartialPivLU<DenseMatrix> lu(A + sigma * DenseMatrix::Identity(n, n));

    PowerResult best;
    Vector phi    = Vector::Ones(n);
    int best_iter = 0;
    for (int it = 1; it <= config.max_iterations; ++it) {
        Vector y = lu.solve(phi);
        if (!y.allFinite()) {
            best.failed = true;
            return best;
        }
        const Index imax = [&] {
            Index k;
            y.cwiseAbs().maxCoeff(&k);
            return k;
        }();
        const double scale = y(imax);
        if (scale == 0.0) {
            best.failed = true;
            return best;
        }
        phi                 = y / scale;
        const Vector Aphi   = A * phi;
        const double lambda = phi.dot(Aphi) / phi.dot(phi);
        const double res    = (Aphi - lambda * phi).cwiseAbs().maxCoeff();
        if (res < best.residual) {
            best.residual   = res;
            best.lambda     = lambda;
            best.vector     = phi;
            best.iterations = it;
            best_iter       = it;
        }
        if (res <= config.tolerance || it - best_iter > 500) {
            break;
        }
    }
    return best;
}

EigenPair finish_direct(PowerResult r, double sigma, const DirectConfig& config)
{
    if (!(r.residual <= std::max(config.tolerance, 1e-8))) {
        std::ostringstream os;
        os << "inverse power iteration stalled at residual " << r.residual;
        throw Error(ErrorKind::NoConvergence, os.str(), r.residual);
    }
    if (r.vector.minCoeff() < -1e-10) {
        throw Error(ErrorKind::NonPositiveEigenvector, "principal eigenvector has negative entries",
                    r.vector.minCoeff());
    }
    EigenPair pair;
    pair.eigenvalue  = r.lambda;
    pair.eigenvector = r.vector.cwiseMax(0.0);
    pair.residual    = r.residual;
    pair.method      = "direct";
    pair.iterations  = r.iterations;
    pair.shift       = sigma;
    return pair;
}

/**
 * Dense period map of the shifted linear periodic problem on the free nodes.
 * Columns are the images of the unit vectors of (phi, psi).
 */
class PeriodMap
{
public:
    PeriodMap(const RestrictedOperator& restricted, const ModelSpec& spec, const Seasonality& season, double slope,
              int steps)
        : m_op(&restricted)
        , m_a11(spec.a11)
        , m_a22(spec.a22)
        , m_season(season)
        , m_slope(slope)
        , m_steps(steps)
        , m_dt(season.period / steps)
    {
    }

    double dt() const
    {
        return m_dt;
    }
    int steps() const
    {
        return m_steps;
    }

    /// Propagates the block [phi; psi] (2n rows) through `count` steps starting at step `first`.
    DenseMatrix propagate(double lambda, const DenseMatrix& start, int first, int count) const
    {
        const Index n          = m_op->size();
        const double shift     = m_a11 - lambda;
        const double implicit  = std::max(shift, 0.0);
        const double explicit_ = std::max(-shift, 0.0);
        SparseMatrix M         = m_dt * m_op->diffusion;
        for (Index i = 0; i < n; ++i) {
            M.coeffRef(i, i) += 1.0 + m_dt * implicit;
        }
        M.makeCompressed();
        Eigen::SparseLU<SparseMatrix> lu;
        lu.compute(M);
        if (lu.info() != Eigen::Success) {
            throw Error(ErrorKind::LinearSolveFailure, "period-map factorization failed");
        }

        DenseMatrix phi = start.topRows(n);
        DenseMatrix psi = start.bottomRows(n);
        for (int s = first; s < first + count; ++s) {
            const double t     = static_cast<double>(s) * m_dt;
            DenseMatrix rhs    = (1.0 + m_dt * explicit_) * phi + m_dt * (m_op->kernel * psi);
            DenseMatrix next   = lu.solve(rhs);
            psi                = (1.0 - m_dt * m_a22) * psi + (m_dt * m_slope * m_season(t)) * phi;
            phi                = std::move(next);
        }
        DenseMatrix out(2 * n, start.cols());
        out.topRows(n)    = phi;
        out.bottomRows(n) = psi;
        return out;
    }

    DenseMatrix matrix(double lambda) const
    {
        const Index n2 = 2 * m_op->size();
        return propagate(lambda, DenseMatrix::Identity(n2, n2), 0, m_steps);
    }

private:
    const RestrictedOperator* m_op;
    double m_a11;
    double m_a22;
    Seasonality m_season;
    double m_slope;
    int m_steps;
    double m_dt;
};

struct Multiplier {
    double rho = 0.0;
    Vector vector;
};

/// Perron root of a nonnegative matrix by repeated squaring followed by power steps.
Multiplier dominant_multiplier(const DenseMatrix& P)
{
    const Index n      = P.rows();
    const double pmax  = P.cwiseAbs().maxCoeff();
    if (!(pmax > 0.0) || !P.allFinite()) {
        throw Error(ErrorKind::NonPositiveMultiplier, "period map vanishes or is not finite");
    }
    DenseMatrix Q = P / pmax;
    Vector v      = Vector::Ones(n);
    Vector prev   = v;
    for (int k = 0; k < 40; ++k) {
        Q = Q * Q;
        const double qmax = Q.cwiseAbs().maxCoeff();
        if (!(qmax > 0.0)) {
            break;
        }
        Q /= qmax;
        v = Q * Vector::Ones(n);
        v /= v.cwiseAbs().maxCoeff();
        if ((v - prev).cwiseAbs().maxCoeff() < 1e-15) {
            break;
        }
        prev = v;
    }

    Multiplier m;
    for (int it = 0; it < 500; ++it) {
        const Vector w   = P * v;
        const double rho = w.cwiseAbs().maxCoeff();
        if (!(rho > 0.0)) {
            throw Error(ErrorKind::NonPositiveMultiplier, "period map annihilates its dominant direction");
        }
        const Vector next = w / rho;
        const double diff = (next - v).cwiseAbs().maxCoeff();
        v                 = next;
        m.rho             = rho;
        if (diff < 1e-14) {
            break;
        }
    }
    if (v.minCoeff() < -1e-10) {
        throw Error(ErrorKind::NonPositiveMultiplier, "dominant period-map vector is not nonnegative", v.minCoeff());
    }
    m.vector = v.cwiseMax(0.0);
    return m;
}

} // namespace

DenseMatrix assemble_eigen_operator(const SparseMatrix& diffusion, const DenseMatrix& kernel, double a11, double a21,
                                    double a22, const Vector& control_diagonal)
{
    if (!(a22 > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "eigenproblem needs a22 > 0");
    }
    const Index n = diffusion.rows();
    if (diffusion.cols() != n || kernel.rows() != n || kernel.cols() != n || control_diagonal.size() != n) {
        throw Error(ErrorKind::ShapeMismatch, "eigen operator blocks have inconsistent sizes");
    }
    DenseMatrix A = DenseMatrix(diffusion) - (a21 / a22) * kernel;
    A.diagonal() += Vector::Constant(n, a11) + control_diagonal;
    return A;
}

DenseMatrix assemble_eigen_operator(const RobinOperator& diffusion, const KernelOperator& kernel,
                                    const ModelSpec& spec, const ForceOfInfection& g, const ControlRegion* region,
                                    double gamma)
{
    const double ratio = infection_ratio(spec, g);
    const Index n      = diffusion.matrix.rows();
    Vector control     = Vector::Zero(n);
    if (region != nullptr && gamma != 0.0) {
        if (region->indicator.size() != n) {
            throw Error(ErrorKind::ShapeMismatch, "region indicator does not match the operator");
        }
        control = gamma * region->indicator;
    }
    return assemble_eigen_operator(diffusion.matrix, kernel.matrix, spec.a11, ratio * spec.a22, spec.a22, control);
}

EigenPair principal_eigenvalue_direct(const DenseMatrix& A, const DirectConfig& config)
{
    if (A.rows() == 0 || A.rows() != A.cols()) {
        throw Error(ErrorKind::ShapeMismatch, "eigen operator must be square and nonempty");
    }
    double sigma = 1.0 + std::max(0.0, -gershgorin_lower_bound(A));
    for (int attempt = 0; attempt < 8; ++attempt, sigma *= 2.0) {
        PowerResult r = inverse_iteration(A, sigma, config);
        if (!r.failed) {
            return finish_direct(std::move(r), sigma, config);
        }
    }
    throw Error(ErrorKind::LinearSolveFailure, "shifted eigen operator stays singular");
}

EigenPair principal_eigenvalue_controlled(const Problem& problem, const ControlRegion* region, double gamma,
                                          const DirectConfig& config)
{
    const DenseMatrix A =
        assemble_eigen_operator(problem.diffusion, problem.kernel, problem.model, problem.force, region, gamma);
    EigenPair pair = principal_eigenvalue_direct(A, config);
    pair.method    = "direct";
    return pair;
}

EigenPair principal_eigenvalue_dirichlet_complement(const Problem& problem, const ControlRegion& region,
                                                    const DirectConfig& config)
{
    const double ratio                 = infection_ratio(problem.model, problem.force);
    const RestrictedOperator restricted = restrict_to_complement(problem.diffusion, problem.kernel, region);
    if (restricted.size() == 0) {
        throw Error(ErrorKind::EmptyRegion, "region covers every node");
    }
    DenseMatrix A = DenseMatrix(restricted.diffusion) - ratio * restricted.kernel;
    A.diagonal().array() += problem.model.a11;

    EigenPair pair            = principal_eigenvalue_direct(A, config);
    pair.eigenvector          = restricted.expand(pair.eigenvector);
    pair.method               = "direct-dirichlet";
    pair.complement_connected = restricted.connected;
    return pair;
}

LogisticEstimate principal_eigenvalue_logistic(const Problem& problem, const ControlRegion* region, double gamma,
                                               double zeta, const LogisticConfig& config)
{
    if (!(config.y0 > 0.0) || !(config.record_interval > 0.0) || !(config.max_time > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "logistic estimator needs y0, record_interval and max_time > 0");
    }
    const Domain& domain  = problem.domain;
    const double ratio    = infection_ratio(problem.model, problem.force);
    const Vector control  = control_vector(domain, region, gamma);
    const DenseMatrix K   = ratio * problem.kernel.matrix;
    const double a11      = problem.model.a11;
    const double mass0    = config.y0 * domain.measure();
    const double knorm    = ratio * problem.kernel.inf_norm();

    double dt = config.dt;
    if (dt <= 0.0) {
        const double rate =
            a11 + gamma + knorm + std::abs(zeta) + std::max(mass0, std::abs(zeta) + knorm);
        dt = 0.5 / rate;
    }
    const int per_record = std::max(1, static_cast<int>(std::ceil(config.record_interval / dt - 1e-9)));
    dt                   = config.record_interval / per_record;

    const ImexStepper stepper({problem.diffusion.matrix}, dt, Scheme::BackwardEuler);
    const Vector growth = Vector::Constant(domain.size(), zeta - a11) - control;

    LogisticEstimate est;
    est.zeta = zeta;
    est.y0   = config.y0;
    est.dt   = dt;

    Vector y    = Vector::Constant(domain.size(), config.y0);
    double mass = domain.integrate(y);
    est.history.push_back(mass);
    const auto records = static_cast<long>(std::ceil(config.max_time / config.record_interval));
    for (long r = 1; r <= records; ++r) {
        for (int s = 0; s < per_record; ++s) {
            const Vector reaction = growth.cwiseProduct(y) + K * y - mass * y;
            y                     = stepper.solve(0, Vector(y + dt * reaction));
            mass                  = domain.integrate(y);
        }
        est.history.push_back(mass);
        est.horizon = static_cast<double>(r) * config.record_interval;
        if (!std::isfinite(mass)) {
            throw Error(ErrorKind::NotConverged, "logistic mass is not finite");
        }
        if (mass < 1e-10 * mass0) {
            throw Error(ErrorKind::ZetaTooSmall, "logistic mass dies out; zeta is below the eigenvalue", zeta);
        }
        const double change = std::abs(mass - est.history[est.history.size() - 2]);
        if (change <= config.tolerance) {
            if (mass < 1e-6 * mass0) {
                throw Error(ErrorKind::ZetaTooSmall, "logistic mass settles at zero; zeta is below the eigenvalue",
                            zeta);
            }
            est.estimate = zeta - mass;
            return est;
        }
    }
    throw Error(ErrorKind::NotConverged, "logistic mass did not settle before max_time",
                std::abs(est.history.back() - est.history[est.history.size() - 2]));
}

LogisticEstimate principal_eigenvalue_logistic_auto(const Problem& problem, const ControlRegion* region,
                                                    double gamma, const LogisticConfig& config)
{
    double zeta = problem.model.a11 + gamma + 1.0;
    for (int attempt = 0; attempt < 40; ++attempt) {
        try {
            return principal_eigenvalue_logistic(problem, region, gamma, zeta, config);
        }
        catch (const Error& e) {
            if (e.kind() != ErrorKind::ZetaTooSmall) {
                throw;
            }
            zeta += std::max(1.0, std::abs(zeta));
        }
    }
    throw Error(ErrorKind::ZetaTooSmall, "no admissible zeta found", zeta);
}

PeriodicEigenPair periodic_principal_eigenvalue(const Problem& problem, const ControlRegion& region,
                                                const Seasonality& season, double slope,
                                                const PeriodicConfig& config)
{
    season.validate();
    if (!(problem.model.a22 > 0.0) || slope < 0.0 || !std::isfinite(slope)) {
        throw Error(ErrorKind::InvalidArgument, "periodic eigenproblem needs a22 > 0 and a finite slope >= 0");
    }
    if (config.steps_per_period < 1 || config.phase_samples < 1) {
        throw Error(ErrorKind::InvalidArgument, "steps_per_period and phase_samples must be positive");
    }
    const RestrictedOperator restricted = restrict_to_complement(problem.diffusion, problem.kernel, region);
    if (restricted.size() == 0) {
        throw Error(ErrorKind::EmptyRegion, "region covers every node");
    }
    const double T = season.period;

    int steps = std::max(config.steps_per_period,
                         static_cast<int>(std::ceil(T * problem.model.a22 * (1.0 + 1e-9))));
    steps     = ((steps + config.phase_samples - 1) / config.phase_samples) * config.phase_samples;
    const PeriodMap map(restricted, problem.model, season, slope, steps);

    PeriodicEigenPair result;
    result.slope = slope;
    auto log_rho = [&](double lambda) {
        ++result.evaluations;
        if (result.evaluations > config.max_evaluations) {
            throw Error(ErrorKind::NoConvergence, "periodic eigenvalue root search exceeded its budget");
        }
        return std::log(dominant_multiplier(map.matrix(lambda)).rho);
    };

    const double f0           = log_rho(0.0);
    result.multiplier_at_zero = std::exp(f0);
    double a = 0.0, fa = f0;
    double b = -f0 / T, fb = (b == 0.0) ? f0 : log_rho(b);
    if (fa == 0.0) {
        b  = a;
        fb = fa;
    }
    double step = std::max(std::abs(b), 1.0 / T);
    while (fa * fb > 0.0) {
        const double direction = fb < 0.0 ? 1.0 : -1.0;
        a                      = b;
        fa                     = fb;
        b                      = a + direction * step;
        fb                     = log_rho(b);
        step *= 2.0;
    }

    double lambda = b;
    if (fb != 0.0 && fa != 0.0) {
        if (a > b) {
            std::swap(a, b);
            std::swap(fa, fb);
        }
        boost::uintmax_t max_iter = static_cast<boost::uintmax_t>(
            std::max(1, config.max_evaluations - result.evaluations));
        const auto bracket = boost::math::tools::toms748_solve(
            log_rho, a, b, fa, fb, boost::math::tools::eps_tolerance<double>(48), max_iter);
        lambda = 0.5 * (bracket.first + bracket.second);
    }
    else if (fa == 0.0) {
        lambda = a;
    }

    const Multiplier m = dominant_multiplier(map.matrix(lambda));
    result.eigenvalue  = lambda;
    result.multiplier  = m.rho;

    const Index n          = restricted.size();
    const int per_sample   = steps / config.phase_samples;
    DenseMatrix state      = m.vector;
    for (int k = 0; k < config.phase_samples; ++k) {
        result.phases.push_back(static_cast<double>(k * per_sample) * map.dt());
        result.phi.push_back(restricted.expand(state.col(0).head(n)));
        result.psi.push_back(restricted.expand(state.col(0).tail(n)));
        state = map.propagate(lambda, state, k * per_sample, per_sample);
    }
    result.periodicity_residual = (state.col(0) - m.vector).cwiseAbs().maxCoeff();
    return result;
}

} // namespace epiregion
