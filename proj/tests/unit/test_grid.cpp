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
#include "epiregion/grid.hpp"

#include "oracles.hpp"

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

using namespace epiregion;

namespace
{

Domain line(int nodes, double length = 1.0)
{
    return build_domain(1, std::span<const double>(&length, 1), std::span<const int>(&nodes, 1));
}

Domain square(int nodes, double length = 1.0)
{
    const std::array<double, 2> e{length, length};
    const std::array<int, 2> n{nodes, nodes};
    return build_domain(2, e, n);
}

ControlRegion interval(const Domain& d, double c, double r)
{
    return make_region(d, RegionShape::Interval, std::span<const double>(&c, 1), std::span<const double>(&r, 1));
}

std::vector<double> sorted_real_eigenvalues(const DenseMatrix& A)
{
    Eigen::EigenSolver<DenseMatrix> es(A, false);
    std::vector<double> out;
    for (Index i = 0; i < es.eigenvalues().size(); ++i) {
        out.push_back(es.eigenvalues()[i].real());
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

TEST(Domain, UnitIntervalTrapezoid)
{
    const Domain d = line(9);
    EXPECT_EQ(d.size(), 9);
    EXPECT_DOUBLE_EQ(d.spacing[0], 0.125);
    EXPECT_NEAR(d.weights.sum(), 1.0, 1e-14);
    EXPECT_NEAR((d.weights - oracle::trapezoid_weights_1d(9, 1.0)).cwiseAbs().maxCoeff(), 0.0, 1e-15);
}

TEST(Domain, SquareTensorProduct)
{
    const Domain d = square(9);
    EXPECT_EQ(d.size(), 81);
    EXPECT_NEAR(d.weights.sum(), 1.0, 1e-14);
    EXPECT_EQ(d.boundary_nodes.size() + d.interior_nodes.size(), 81u);
}

TEST(Domain, MeasureOfLongerInterval)
{
    const Domain d = line(5, 2.0);
    EXPECT_NEAR(d.weights.sum(), 2.0, 1e-14);
    EXPECT_NEAR(d.measure(), 2.0, 1e-14);
}

TEST(Domain, RejectsBadInput)
{
    EXPECT_THROW(line(2), Error);
    const double bad = -1.0;
    const int n      = 9;
    EXPECT_THROW(build_domain(1, std::span<const double>(&bad, 1), std::span<const int>(&n, 1)), Error);
    EXPECT_THROW(build_domain(3, std::span<const double>(&bad, 1), std::span<const int>(&n, 1)), Error);
}

TEST(Robin, NeumannAnnihilatesConstants)
{
    for (const Domain& d : {line(17), square(9)}) {
        const RobinOperator L = assemble_robin_laplacian(d, 0.3, 0.0);
        const Vector r        = L.matrix * Vector::Ones(d.size());
        EXPECT_LE(r.cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(Robin, MatchesGhostNodeOracle)
{
    for (double alpha : {0.0, 1.5, 40.0}) {
        const Domain d        = line(12, 2.0);
        const RobinOperator L = assemble_robin_laplacian(d, 0.7, alpha);
        const DenseMatrix ref = oracle::robin_laplacian_1d(12, 2.0, 0.7, alpha);
        EXPECT_LE((DenseMatrix(L.matrix) - ref).cwiseAbs().maxCoeff(), 1e-10 * ref.cwiseAbs().maxCoeff());
    }
}

TEST(Robin, WeightedSymmetric)
{
    const Domain d        = square(7);
    const RobinOperator L = assemble_robin_laplacian(d, 0.2, 3.0);
    const DenseMatrix WL  = d.weights.asDiagonal() * DenseMatrix(L.matrix);
    EXPECT_LE((WL - WL.transpose()).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Robin, FirstNeumannModeNearPiSquared)
{
    const Domain d        = line(65);
    const RobinOperator L = assemble_robin_laplacian(d, 1.0, 0.0);
    const auto ev         = sorted_real_eigenvalues(DenseMatrix(L.matrix));
    const double h        = d.h();
    EXPECT_NEAR(ev[0], 0.0, 1e-9);
    EXPECT_NEAR(ev[1], M_PI * M_PI, std::pow(M_PI, 4) * h * h / 6.0);
}

TEST(Robin, AbsorptionTrendTowardDirichlet)
{
    const Domain d = line(65);
    double previous = -1.0;
    for (double alpha : {0.0, 1.0, 10.0, 100.0}) {
        const double lowest = sorted_real_eigenvalues(DenseMatrix(assemble_robin_laplacian(d, 1.0, alpha).matrix))[0];
        EXPECT_GT(lowest, previous);
        EXPECT_LT(lowest, M_PI * M_PI);
        previous = lowest;
    }
    EXPECT_NEAR(previous, M_PI * M_PI, 0.05 * M_PI * M_PI);
}

TEST(Kernel, DeltaIsScaledIdentity)
{
    const Domain d = line(10);
    KernelParams p;
    p.amplitude            = 2.0;
    const KernelOperator K = build_kernel(d, KernelFamily::Delta, p);
    EXPECT_TRUE(K.matrix == 2.0 * DenseMatrix::Identity(10, 10));
}

TEST(Kernel, GaussianInteriorColumnsIntegrateToAmplitude)
{
    const Domain d = line(101);
    KernelParams p;
    p.sigma                = 0.05;
    const KernelOperator K = build_kernel(d, KernelFamily::Gaussian, p);
    for (Index j = 0; j < d.size(); ++j) {
        const double x = d.coordinates[static_cast<std::size_t>(j)][0];
        if (x > 0.3 && x < 0.7) {
            EXPECT_NEAR(d.weights.dot(K.matrix.col(j)) / d.weights[j], 1.0, 1e-6);
        }
    }
}

TEST(Kernel, UniformRowsAreFlat)
{
    const Domain d = line(11);
    KernelParams p;
    p.amplitude            = 3.0;
    const KernelOperator K = build_kernel(d, KernelFamily::Uniform, p);
    for (Index i = 0; i < d.size(); ++i) {
        EXPECT_NEAR(K.matrix.row(i).sum(), 3.0, 1e-12);
        EXPECT_NEAR((K.matrix.row(i) - K.matrix.row(0)).cwiseAbs().maxCoeff(), 0.0, 1e-15);
    }
}

TEST(Kernel, EntriesNonnegativeForEveryFamily)
{
    const Domain d = square(8);
    for (auto family :
         {KernelFamily::Gaussian, KernelFamily::Uniform, KernelFamily::SeparableProduct, KernelFamily::Delta}) {
        const KernelOperator K = build_kernel(d, family, KernelParams{});
        EXPECT_GE(K.matrix.minCoeff(), 0.0);
        EXPECT_GT(K.matrix.colwise().sum().minCoeff(), 0.0);
    }
}

TEST(Kernel, TransposedApplicationIsWeightedAdjoint)
{
    oracle::Gen gen(7);
    const Domain d = line(13);
    KernelParams p;
    p.center               = Point{0.3, 0.0};
    const KernelOperator K = build_kernel(d, KernelFamily::SeparableProduct, p);
    for (int trial = 0; trial < 20; ++trial) {
        const Vector u = gen.positive_vector(d.size());
        const Vector v = gen.positive_vector(d.size());
        const double lhs = d.weights.dot(v.cwiseProduct(K.apply(u)));
        const double rhs = d.weights.dot(u.cwiseProduct(K.apply_transposed(v)));
        EXPECT_NEAR(lhs, rhs, 1e-12 * std::abs(lhs));
    }
}

TEST(Kernel, RejectsNegativeAmplitude)
{
    KernelParams p;
    p.amplitude = -1.0;
    EXPECT_THROW(build_kernel(line(9), KernelFamily::Gaussian, p), Error);
}

TEST(Region, IntervalIndicator)
{
    const Domain d         = line(11);
    const ControlRegion om = interval(d, 0.5, 0.1);
    for (Index i = 0; i < d.size(); ++i) {
        const double x = d.coordinates[static_cast<std::size_t>(i)][0];
        EXPECT_EQ(om.indicator[i] > 0.5, x >= 0.4 - 1e-12 && x <= 0.6 + 1e-12) << x;
    }
    EXPECT_EQ(om.node_count(), 3);
    ASSERT_EQ(om.facets.size(), 2u);
    for (const Facet& f : om.facets) {
        EXPECT_DOUBLE_EQ(f.normal[0], f.midpoint[0] < 0.5 ? 1.0 : -1.0);
    }
}

TEST(Region, BallBoundaryNearCircumference)
{
    const Domain d = square(81);
    const std::array<double, 2> c{0.5, 0.5};
    const double r         = 0.2;
    const ControlRegion om = make_region(d, RegionShape::Ball, c, std::span<const double>(&r, 1));
    EXPECT_NEAR(om.boundary_measure(), 2.0 * M_PI * r, 2.0 * d.h());
    for (const Facet& f : om.facets) {
        EXPECT_NEAR(std::hypot(f.normal[0], f.normal[1]), 1.0, 1e-12);
        const double radial = (f.midpoint[0] - 0.5) * f.normal[0] + (f.midpoint[1] - 0.5) * f.normal[1];
        EXPECT_LT(radial, 0.0);
    }
}

TEST(Region, ClearanceViolation)
{
    const Domain d = line(41);
    try {
        interval(d, 0.95, 0.1);
        FAIL() << "expected RegionTouchesBoundary";
    }
    catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::RegionTouchesBoundary);
    }
}

TEST(Region, TranslationIdentityAndInverse)
{
    const Domain d         = line(41);
    const ControlRegion om = interval(d, 0.5, 0.1);
    const double zero      = 0.0;
    EXPECT_TRUE(translate_region(d, om, std::span<const double>(&zero, 1)).indicator == om.indicator);

    oracle::Gen gen(11);
    for (int trial = 0; trial < 25; ++trial) {
        const double v     = gen.uniform(-0.25, 0.25);
        const double back  = -v;
        const ControlRegion moved = translate_region(d, om, std::span<const double>(&v, 1));
        const ControlRegion again = translate_region(d, moved, std::span<const double>(&back, 1));
        EXPECT_TRUE(again.indicator == om.indicator) << v;
    }
}

TEST(Region, ShiftMovesSupportByWholeCells)
{
    const Domain d         = line(41);
    const ControlRegion om = interval(d, 0.4, 0.1);
    const double shift     = 0.25;
    const ControlRegion moved = translate_region(d, om, std::span<const double>(&shift, 1));
    const Index cells         = std::lround(shift / d.h());
    for (Index i = 0; i + cells < d.size(); ++i) {
        EXPECT_EQ(om.indicator[i], moved.indicator[i + cells]);
    }
}

TEST(Restriction, EmptyRegionLeavesOperatorUnchanged)
{
    const Domain d        = line(16);
    const RobinOperator L = assemble_robin_laplacian(d, 0.1, 1.0);
    const KernelOperator K = build_kernel(d, KernelFamily::Gaussian, KernelParams{});
    ControlRegion none;
    none.indicator = Vector::Zero(d.size());
    const RestrictedOperator r = restrict_to_complement(L, K, none);
    EXPECT_EQ(r.size(), d.size());
    EXPECT_TRUE(DenseMatrix(r.diffusion) == DenseMatrix(L.matrix));
    EXPECT_TRUE(r.kernel == K.matrix);
}

TEST(Restriction, ConstantResidualIsLocalToRegion)
{
    const Domain d         = line(41);
    const RobinOperator L  = assemble_robin_laplacian(d, 1.0, 0.0);
    const KernelOperator K = build_kernel(d, KernelFamily::Delta, KernelParams{0.1, 0.0, std::nullopt});
    const ControlRegion om = interval(d, 0.5, 0.1);
    const RestrictedOperator r = restrict_to_complement(L, K, om);
    const Vector res           = r.diffusion * Vector::Ones(r.size());
    for (Index k = 0; k < r.size(); ++k) {
        const Index node   = r.free_nodes[static_cast<std::size_t>(k)];
        const bool touches = om.indicator[std::max<Index>(node - 1, 0)] > 0.5 ||
                             om.indicator[std::min<Index>(node + 1, d.size() - 1)] > 0.5;
        if (touches) {
            EXPECT_GT(std::abs(res[k]), 1e-8);
        }
        else {
            EXPECT_LE(std::abs(res[k]), 1e-12);
        }
    }
    EXPECT_FALSE(r.connected);
}

TEST(Restriction, RemovingRegionRaisesLowestEigenvalue)
{
    const Domain d         = line(16);
    const RobinOperator L  = assemble_robin_laplacian(d, 0.1, 0.0);
    const KernelOperator K = build_kernel(d, KernelFamily::Gaussian, KernelParams{});
    const ControlRegion om = interval(d, 0.5, 0.1);
    const RestrictedOperator r = restrict_to_complement(L, K, om);
    const DenseMatrix full     = DenseMatrix(L.matrix) - K.matrix;
    const DenseMatrix reduced  = DenseMatrix(r.diffusion) - r.kernel;
    EXPECT_GT(oracle::min_real_eigenvalue(reduced).real(), oracle::min_real_eigenvalue(full).real());

    const Vector v = Vector::LinSpaced(r.size(), 1.0, 2.0);
    EXPECT_TRUE(r.reduce(r.expand(v)) == v);
}
