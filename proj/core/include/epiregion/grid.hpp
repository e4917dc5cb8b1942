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
#ifndef EPIREGION_GRID_HPP
#define EPIREGION_GRID_HPP

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <array>
#include <optional>
#include <span>
#include <vector>

namespace epiregion
{

using Index        = Eigen::Index;
using Vector       = Eigen::VectorXd;
using DenseMatrix  = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<double>;
using Point        = std::array<double, 2>;

/**
 * Uniform tensor grid on (0,L) or (0,Lx)x(0,Ly), vertex centered, with
 * trapezoid quadrature weights. Node (i,j) has flat index i + nx*j.
 */
struct Domain {
    int dimension = 1;
    std::array<double, 2> extents{0.0, 0.0};
    std::array<int, 2> nodes_per_axis{1, 1};
    std::array<double, 2> spacing{0.0, 0.0};
    std::vector<Point> coordinates;
    std::vector<Index> interior_nodes;
    std::vector<Index> boundary_nodes;
    Vector weights;

    Index size() const
    {
        return static_cast<Index>(coordinates.size());
    }

    /// Largest grid spacing over the active axes.
    double h() const;

    double measure() const;

    Index node(int i, int j = 0) const
    {
        return static_cast<Index>(i) + static_cast<Index>(nodes_per_axis[0]) * j;
    }

    double integrate(const Vector& values) const;
};

Domain build_domain(int dimension, std::span<const double> extents, std::span<const int> nodes_per_axis);

/// Discretization of -d1*Laplace with du/dnu + alpha*u = 0 on the outer boundary.
struct RobinOperator {
    SparseMatrix matrix;
    double d1    = 0.0;
    double alpha = 0.0;
};

RobinOperator assemble_robin_laplacian(const Domain& domain, double d1, double alpha);

enum class KernelFamily
{
    Gaussian,
    Uniform,
    SeparableProduct,
    Delta,
};

struct KernelParams {
    double sigma     = 0.1;
    double amplitude = 1.0;
    /// Hub location of the separable-product kernel; defaults to the domain center.
    std::optional<Point> center;
};

/**
 * Quadrature-weighted kernel matrix, K(i,j) = k(x_i, x_j) * w_j, so that
 * (K u)_i approximates the integral of k(x_i, x') u(x') over the domain.
 */
struct KernelOperator {
    KernelFamily family = KernelFamily::Delta;
    KernelParams params;
    DenseMatrix matrix;
    Vector weights;

    Vector apply(const Vector& u) const
    {
        return matrix * u;
    }

    /// (K~ p)_i = sum_j k(x_j, x_i) w_j p_j, the quadrature of the transposed kernel.
    Vector apply_transposed(const Vector& p) const;

    double inf_norm() const;
};

KernelOperator build_kernel(const Domain& domain, KernelFamily family, const KernelParams& params);

enum class RegionShape
{
    Interval,
    Ball,
    Box,
};

/// A piece of the discrete boundary of omega, crossing the grid edge between two nodes.
struct Facet {
    Index inside  = 0;
    Index outside = 0;
    Point midpoint{0.0, 0.0};
    /// Unit normal pointing into omega.
    Point normal{0.0, 0.0};
    double weight = 0.0;
};

struct ControlRegion {
    RegionShape shape = RegionShape::Interval;
    Point center{0.0, 0.0};
    /// Half-widths (interval, box) or radius in size[0] (ball).
    Point size{0.0, 0.0};
    Vector indicator;
    std::vector<Facet> facets;

    Index node_count() const;
    double measure(const Domain& domain) const;
    double boundary_measure() const;
    bool contains(const Point& x, double tolerance) const;
};

ControlRegion make_region(const Domain& domain, RegionShape shape, std::span<const double> center,
                          std::span<const double> size);

ControlRegion translate_region(const Domain& domain, const ControlRegion& region, std::span<const double> shift);

/// Half-extent of the region along an axis.
double region_half_extent(const ControlRegion& region, int axis);

/**
 * Diffusion and kernel operators restricted to the nodes outside the closure
 * of omega, i.e. homogeneous Dirichlet data on omega eliminated from the system.
 */
struct RestrictedOperator {
    std::vector<Index> free_nodes;
    /// -1 for eliminated nodes.
    std::vector<Index> full_to_free;
    SparseMatrix diffusion;
    DenseMatrix kernel;
    Index full_size = 0;
    /// Node connectivity of the complement through the diffusion stencil.
    bool connected = true;

    Index size() const
    {
        return static_cast<Index>(free_nodes.size());
    }

    Vector expand(const Vector& reduced) const;
    Vector reduce(const Vector& full) const;
};

RestrictedOperator restrict_to_complement(const RobinOperator& op, const KernelOperator& kernel,
                                          const ControlRegion& region);

} // namespace epiregion

#endif // EPIREGION_GRID_HPP
