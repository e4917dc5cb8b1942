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
#include "epiregion/error.hpp"
#include "epiregion/spectral.hpp"

#include "fixtures.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

using namespace epiregion;

namespace
{

ControlRegion interval(const Domain& d, double c, double r)
{
    return make_region(d, RegionShape::Interval, std::span<const double>(&c, 1), std::span<const double>(&r, 1));
}

fixture::Setup reference_setup()
{
    fixture::Setup s;
    s.tag    = ModelTag::Controlled;
    s.gamma  = 5.0;
    s.force  = ForceOfInfection::linear(2.0);
    s.region = std::array<double, 2>{0.5, 0.1};
    return s;
}

void expect_positive_unit(const EigenPair& e)
{
    EXPECT_NEAR(e.eigenvector.lpNorm<Eigen::Infinity>(), 1.0, 1e-12);
    EXPECT_GE(e.eigenvector.minCoeff(), 0.0);
    EXPECT_LE(e.residual, 1e-8);
}

} // namespace

TEST(Assembly, NoKernelNoControl)
{
    fixture::Setup s;
    s.nodes          = 10;
    s.alpha          = 1.0;
    s.amplitude      = 0.0;
    s.kernel         = KernelFamily::Delta;
    s.a11            = 0.7;
    const Problem p  = fixture::problem_1d(s);
    const DenseMatrix A = assemble_eigen_operator(p.diffusion, p.kernel, p.model, p.force, nullptr, 0.0);
    const DenseMatrix expected = DenseMatrix(p.diffusion.matrix) + 0.7 * DenseMatrix::Identity(10, 10);
    EXPECT_LE((A - expected).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Assembly, ThreeNodeHandComputed)
{
    fixture::Setup s;
    s.nodes     = 3;
    s.d1        = 0.5;
    s.alpha     = 2.0;
    s.kernel    = KernelFamily::Uniform;
    s.amplitude = 1.5;
    s.a11       = 0.4;
    s.a22       = 2.0;
    s.force     = ForceOfInfection::linear(3.0);
    const Problem p = fixture::problem_1d(s);
    Vector control(3);
    control << 0.0, 5.0, 0.0;
    const DenseMatrix A = assemble_eigen_operator(p.diffusion.matrix, p.kernel.matrix, 0.4, 3.0, 2.0, control);

    // h = 1/2: interior row d/h^2 (-1, 2, -1); boundary rows 2d/h^2 ((1 + h alpha), -1)
    // uniform kernel with weights (1/4, 1/2, 1/4) times amplitude 1.5, scaled by a21/a22 = 1.5
    DenseMatrix ref(3, 3);
    ref << 4.0, -4.0, 0.0, -2.0, 4.0, -2.0, 0.0, -4.0, 4.0;
    ref.row(0)(0) = 2.0 * 0.5 * 4.0 * 2.0;
    ref.row(2)(2) = ref(0, 0);
    const double kw[3] = {0.25, 0.5, 0.25};
    for (int i = 0; i < 3; ++i) {
        ref(i, i) += 0.4 + control[i];
        for (int j = 0; j < 3; ++j) {
            ref(i, j) -= 1.5 * 1.5 * kw[j];
        }
    }
    EXPECT_LE((A - ref).cwiseAbs().maxCoeff(), 1e-13) << A << "\n\n" << ref;
}

TEST(Assembly, ConstantModeOfDeltaKernel)
{
    fixture::Setup s;
    s.nodes     = 16;
    s.kernel    = KernelFamily::Delta;
    s.amplitude = 1.5;
    s.a11       = 2.0;
    s.a22       = 0.5;
    s.force     = ForceOfInfection::linear(0.4);
    const Problem p = fixture::problem_1d(s);
    const EigenPair e = principal_eigenvalue_controlled(p, nullptr, 0.0);
    EXPECT_NEAR(e.eigenvalue, 2.0 - 1.5 * 0.4 / 0.5, 1e-10);
    EXPECT_LE((e.eigenvector.array() - 1.0).abs().maxCoeff(), 1e-8);
}

TEST(Assembly, UnboundedForceRejected)
{
    fixture::Setup s;
    s.nodes         = 10;
    s.force         = ForceOfInfection::power(1.0, 2.0);
    const Problem p = fixture::problem_1d(s);
    EXPECT_THROW(principal_eigenvalue_controlled(p, nullptr, 0.0), Error);
}

TEST(Direct, ScaledIdentity)
{
    const EigenPair e = principal_eigenvalue_direct(2.0 * DenseMatrix::Identity(7, 7));
    EXPECT_NEAR(e.eigenvalue, 2.0, 1e-14);
    EXPECT_LE((e.eigenvector.array() - 1.0).abs().maxCoeff(), 1e-14);
}

TEST(Direct, AbsorbingDiffusion)
{
    fixture::Setup s;
    s.nodes     = 65;
    s.d1        = 0.3;
    s.alpha     = 1e4;
    s.kernel    = KernelFamily::Delta;
    s.amplitude = 0.0;
    s.a11       = 0.0;
    const Problem p = fixture::problem_1d(s);
    const DenseMatrix A = DenseMatrix(p.diffusion.matrix);
    const EigenPair e   = principal_eigenvalue_direct(A);
    const Vector w      = p.domain.weights.cwiseSqrt();
    const DenseMatrix S = w.asDiagonal() * A * w.cwiseInverse().asDiagonal();
    EXPECT_NEAR(e.eigenvalue, oracle::min_symmetric_eigenvalue(0.5 * (S + S.transpose())), 1e-9);
    EXPECT_NEAR(e.eigenvalue, 0.3 * M_PI * M_PI, 0.3 * M_PI * M_PI * 5e-3);
    expect_positive_unit(e);
}

TEST(Direct, NonsymmetricGaussianAgainstDenseSpectrum)
{
    oracle::Gen gen(101);
    for (int trial = 0; trial < 10; ++trial) {
        fixture::Setup s;
        s.nodes     = 12;
        s.d1        = gen.uniform(0.01, 0.3);
        s.alpha     = gen.uniform(0.0, 5.0);
        s.sigma     = gen.uniform(0.05, 0.4);
        s.amplitude = gen.uniform(0.2, 3.0);
        s.a11       = gen.uniform(0.0, 2.0);
        s.a22       = gen.uniform(0.3, 2.0);
        s.force     = ForceOfInfection::linear(gen.uniform(0.2, 3.0));
        s.tag       = ModelTag::Controlled;
        s.region    = std::array<double, 2>{0.5, 0.1};
        const Problem p     = fixture::problem_1d(s);
        const double gamma  = gen.uniform(0.0, 8.0);
        const DenseMatrix A = assemble_eigen_operator(p.diffusion, p.kernel, p.model, p.force, &*p.region, gamma);
        const EigenPair e   = principal_eigenvalue_controlled(p, &*p.region, gamma);
        const auto ref      = oracle::min_real_eigenvalue(A);
        EXPECT_NEAR(ref.imag(), 0.0, 1e-10);
        EXPECT_NEAR(e.eigenvalue, ref.real(), 1e-9);
        expect_positive_unit(e);
        EXPECT_LE((A * e.eigenvector - e.eigenvalue * e.eigenvector).lpNorm<Eigen::Infinity>(), 1e-8);
    }
}

TEST(Dirichlet, EmptyRegionMatchesWholeDomain)
{
    const Problem p = fixture::problem_1d(reference_setup());
    ControlRegion none;
    none.indicator    = Vector::Zero(p.domain.size());
    const EigenPair a = principal_eigenvalue_dirichlet_complement(p, none);
    const EigenPair b = principal_eigenvalue_controlled(p, nullptr, 0.0);
    EXPECT_NEAR(a.eigenvalue, b.eigenvalue, 1e-10);
}

TEST(Dirichlet, NestedRegionsRaiseEigenvalue)
{
    const Problem p = fixture::problem_1d(reference_setup());
    double previous = -std::numeric_limits<double>::infinity();
    for (double r : {0.05, 0.1, 0.2, 0.3}) {
        const ControlRegion om = interval(p.domain, 0.5, r);
        const EigenPair e      = principal_eigenvalue_dirichlet_complement(p, om);
        EXPECT_GE(e.eigenvalue, previous);
        expect_positive_unit(e);
        for (Index i = 0; i < p.domain.size(); ++i) {
            if (om.indicator[i] > 0.5) {
                EXPECT_EQ(e.eigenvector[i], 0.0);
            }
            else {
                EXPECT_GT(e.eigenvector[i], 0.0);
            }
        }

        const RestrictedOperator restricted = restrict_to_complement(p.diffusion, p.kernel, om);
        const DenseMatrix reduced = DenseMatrix(restricted.diffusion) +
                                    p.model.a11 * DenseMatrix::Identity(restricted.size(), restricted.size()) -
                                    p.force.k / p.model.a22 * restricted.kernel;
        EXPECT_NEAR(e.eigenvalue, oracle::min_real_eigenvalue(reduced).real(), 1e-9);
        previous = e.eigenvalue;
    }
}

TEST(Controlled, MonotoneInGainAndBelowDirichletBarrier)
{
    const Problem p      = fixture::problem_1d(reference_setup());
    const double barrier = principal_eigenvalue_dirichlet_complement(p, *p.region).eigenvalue;
    double previous      = -std::numeric_limits<double>::infinity();
    double previous_gap  = std::numeric_limits<double>::infinity();
    for (double gamma : {0.0, 1.0, 10.0, 100.0, 1000.0}) {
        const EigenPair e = principal_eigenvalue_controlled(p, &*p.region, gamma);
        EXPECT_GE(e.eigenvalue, previous);
        EXPECT_LE(e.eigenvalue, barrier + 1e-10);
        EXPECT_LT(barrier - e.eigenvalue, previous_gap);
        expect_positive_unit(e);
        previous     = e.eigenvalue;
        previous_gap = barrier - e.eigenvalue;
    }
}

TEST(Logistic, HomogeneousModeRecoversShiftedMass)
{
    fixture::Setup s;
    s.nodes     = 3;
    s.kernel    = KernelFamily::Delta;
    s.amplitude = 1.0;
    s.a11       = 1.5;
    s.a22       = 1.0;
    s.force     = ForceOfInfection::linear(0.5);
    const Problem p     = fixture::problem_1d(s);
    const double lambda = 1.5 - 0.5;
    const LogisticEstimate est = principal_eigenvalue_logistic(p, nullptr, 0.0, 3.0);
    EXPECT_NEAR(est.estimate, lambda, 1e-7);
    EXPECT_NEAR(est.history.back(), 3.0 - lambda, 1e-7);
}

TEST(Logistic, AgreesWithDirectAndIsParameterFree)
{
    const Problem p   = fixture::problem_1d(reference_setup());
    const EigenPair e = principal_eigenvalue_controlled(p, &*p.region, 5.0);
    const LogisticEstimate a = principal_eigenvalue_logistic_auto(p, &*p.region, 5.0);
    EXPECT_NEAR(a.estimate, e.eigenvalue, 1e-2 * std::max(1.0, std::abs(e.eigenvalue)));
    const double b = principal_eigenvalue_logistic(p, &*p.region, 5.0, a.estimate + 1.0).estimate;
    const double c = principal_eigenvalue_logistic(p, &*p.region, 5.0, a.estimate + 2.0).estimate;
    EXPECT_NEAR(b, c, 1e-2);
    for (double y0 : {0.5, 2.0}) {
        LogisticConfig cfg;
        cfg.y0 = y0;
        EXPECT_NEAR(principal_eigenvalue_logistic(p, &*p.region, 5.0, a.estimate + 1.0, cfg).estimate, b, 1e-2);
    }
}

TEST(Logistic, ShiftBelowEigenvalueRejected)
{
    const Problem p   = fixture::problem_1d(reference_setup());
    const EigenPair e = principal_eigenvalue_controlled(p, &*p.region, 5.0);
    try {
        principal_eigenvalue_logistic(p, &*p.region, 5.0, e.eigenvalue - 0.5);
        FAIL() << "expected ZetaTooSmall";
    }
    catch (const Error& err) {
        EXPECT_EQ(err.kind(), ErrorKind::ZetaTooSmall);
    }
}

TEST(Periodic, ConstantSeasonReducesToDirichletEigenvalue)
{
    fixture::Setup s = reference_setup();
    s.tag            = ModelTag::Periodic;
    const Problem p  = fixture::problem_1d(s);
    const PeriodicEigenPair per = periodic_principal_eigenvalue(p, *p.region, p.season, p.force.k);
    const EigenPair dir         = principal_eigenvalue_dirichlet_complement(p, *p.region);
    EXPECT_NEAR(per.eigenvalue, dir.eigenvalue, 1e-2);
    EXPECT_NEAR(per.multiplier, 1.0, 1e-8);
    EXPECT_EQ(per.phi.size(), per.phases.size());
    for (const Vector& phi : per.phi) {
        EXPECT_GE(phi.minCoeff(), 0.0);
    }
}

TEST(Periodic, ZeroSlopeDecouplesInfectives)
{
    fixture::Setup s = reference_setup();
    s.tag            = ModelTag::Periodic;
    s.season.family  = SeasonalityFamily::Cosine;
    s.season.depth   = 0.5;
    const Problem p  = fixture::problem_1d(s);
    const PeriodicEigenPair per = periodic_principal_eigenvalue(p, *p.region, p.season, 0.0);
    const RestrictedOperator r  = restrict_to_complement(p.diffusion, p.kernel, *p.region);
    const DenseMatrix B = DenseMatrix(r.diffusion) + p.model.a11 * DenseMatrix::Identity(r.size(), r.size());
    EXPECT_NEAR(per.eigenvalue, oracle::min_real_eigenvalue(B).real(), 1e-2);
}

TEST(Periodic, SigmoidLinearBoundGivesLowerEigenvalue)
{
    fixture::Setup s = reference_setup();
    s.tag            = ModelTag::Periodic;
    s.force          = ForceOfInfection::sigmoid(6.0, 1.0, 1.0);
    s.season.family  = SeasonalityFamily::Cosine;
    s.season.depth   = 0.4;
    s.season.period  = 2.0;
    const Problem p  = fixture::problem_1d(s);
    ASSERT_LT(p.force.derivative_at_zero(), p.force.linear_bound());
    const double bound = periodic_principal_eigenvalue(p, *p.region, p.season, p.force.linear_bound()).eigenvalue;
    const double local = periodic_principal_eigenvalue(p, *p.region, p.season, p.force.derivative_at_zero()).eigenvalue;
    EXPECT_LE(bound, local);
}

TEST(Periodic, SlopeMonotonicity)
{
    fixture::Setup s = reference_setup();
    s.tag            = ModelTag::Periodic;
    s.season.family  = SeasonalityFamily::Cosine;
    s.season.depth   = 0.3;
    const Problem p  = fixture::problem_1d(s);
    PeriodicConfig cfg;
    cfg.steps_per_period = 200;
    double previous = std::numeric_limits<double>::infinity();
    for (double slope : {0.0, 1.0, 2.0, 4.0}) {
        const double v = periodic_principal_eigenvalue(p, *p.region, p.season, slope, cfg).eigenvalue;
        EXPECT_LE(v, previous + 1e-9);
        previous = v;
    }
}
