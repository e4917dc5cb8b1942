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
#include "epiregion/grid.hpp"
#include "epiregion/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <string>

namespace epiregion
{

namespace
{

constexpr int min_nodes_per_axis = 3;

std::vector<double> trapezoid_weights(int n, double h)
{
    std::vector<double> w(static_cast<std::size_t>(n), h);
    w.front() = 0.5 * h;
    w.back()  = 0.5 * h;
    return w;
}

// 1D ghost-node Robin stencil scaled by 1/h^2 (without the diffusivity).
std::vector<Eigen::Triplet<double>> robin_stencil_1d(int n, double h, double alpha)
{
    std::vector<Eigen::Triplet<double>> t;
    const double s = 1.0 / (h * h);
    t.reserve(static_cast<std::size_t>(3 * n));
    for (int i = 0; i < n; ++i) {
        if (i == 0) {
            t.emplace_back(0, 0, 2.0 * (1.0 + h * alpha) * s);
            t.emplace_back(0, 1, -2.0 * s);
        }
        else if (i == n - 1) {
            t.emplace_back(i, i, 2.0 * (1.0 + h * alpha) * s);
            t.emplace_back(i, i - 1, -2.0 * s);
        }
        else {
            t.emplace_back(i, i - 1, -s);
            t.emplace_back(i, i, 2.0 * s);
            t.emplace_back(i, i + 1, -s);
        }
    }
    return t;
}

double squared_distance(const Point& a, const Point& b)
{
    const double dx = a[0] - b[0];
    const double dy = a[1] - b[1];
    return dx * dx + dy * dy;
}

// Lattice sum of the 1D Gaussian over an infinite grid of spacing h.
double gaussian_lattice_sum(double h, double sigma)
{
    double total = 1.0;
    for (int m = 1;; ++m) {
        const double x    = m * h;
        const double term = std::exp(-x * x / (2.0 * sigma * sigma));
        total += 2.0 * term;
        if (term < 1e-18) {
            break;
        }
    }
    return h * total;
}

Point normalize(const Point& p)
{
    const double n = std::hypot(p[0], p[1]);
    if (n == 0.0) {
        return {0.0, 0.0};
    }
    return {p[0] / n, p[1] / n};
}

Point inward_normal(const ControlRegion& region, const Point& m, int dimension, int axis)
{
    const double dx = region.center[0] - m[0];
    const double dy = region.center[1] - m[1];
    if (dimension == 1) {
        return {dx >= 0.0 ? 1.0 : -1.0, 0.0};
    }
    switch (region.shape) {
    case RegionShape::Ball:
        return normalize({dx, dy});
    case RegionShape::Box:
    case RegionShape::Interval: {
        Point n{0.0, 0.0};
        const double d = axis == 0 ? dx : dy;
        n[static_cast<std::size_t>(axis)] = d >= 0.0 ? 1.0 : -1.0;
        return n;
    }
    }
    return {0.0, 0.0};
}

void fill_region_nodes(const Domain& domain, ControlRegion& region)
{
    const double tol = 1e-9 * domain.h();
    const Index n    = domain.size();
    region.indicator = Vector::Zero(n);
    for (Index i = 0; i < n; ++i) {
        if (region.contains(domain.coordinates[static_cast<std::size_t>(i)], tol)) {
            region.indicator[i] = 1.0;
        }
    }

    region.facets.clear();
    const int nx = domain.nodes_per_axis[0];
    const int ny = domain.dimension == 2 ? domain.nodes_per_axis[1] : 1;
    for (int axis = 0; axis < domain.dimension; ++axis) {
        const int other = 1 - axis;
        for (int j = 0; j < ny; ++j) {
            for (int i = 0; i < nx; ++i) {
                const int ii = axis == 0 ? i + 1 : i;
                const int jj = axis == 1 ? j + 1 : j;
                if (ii >= nx || jj >= ny) {
                    continue;
                }
                const Index a = domain.node(i, j);
                const Index b = domain.node(ii, jj);
                if (region.indicator[a] == region.indicator[b]) {
                    continue;
                }
                Facet f;
                f.inside          = region.indicator[a] > 0.5 ? a : b;
                f.outside         = region.indicator[a] > 0.5 ? b : a;
                const Point& pa   = domain.coordinates[static_cast<std::size_t>(a)];
                const Point& pb   = domain.coordinates[static_cast<std::size_t>(b)];
                f.midpoint        = {0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])};
                f.normal          = inward_normal(region, f.midpoint, domain.dimension, axis);
                // A boundary piece of length ds crosses |nu_axis| ds / h_other edges along this axis.
                f.weight = domain.dimension == 1 ? 1.0
                                                 : domain.spacing[static_cast<std::size_t>(other)] *
                                                       std::abs(f.normal[static_cast<std::size_t>(axis)]);
                region.facets.push_back(f);
            }
        }
    }
}

void check_clearance(const Domain& domain, const ControlRegion& region)
{
    for (int axis = 0; axis < domain.dimension; ++axis) {
        const auto a     = static_cast<std::size_t>(axis);
        const double r   = region_half_extent(region, axis);
        const double gap = 2.0 * domain.spacing[a];
        const double tol = 1e-9 * domain.spacing[a];
        if (region.center[a] - r < gap - tol || region.center[a] + r > domain.extents[a] - gap + tol) {
            throw Error(ErrorKind::RegionTouchesBoundary,
                        "control region must keep a clearance of 2h from the outer boundary along axis " +
                            std::to_string(axis));
        }
    }
}

} // namespace

double Domain::h() const
{
    return dimension == 2 ? std::max(spacing[0], spacing[1]) : spacing[0];
}

double Domain::measure() const
{
    return dimension == 2 ? extents[0] * extents[1] : extents[0];
}

double Domain::integrate(const Vector& values) const
{
    if (values.size() != weights.size()) {
        throw Error(ErrorKind::ShapeMismatch, "field size does not match the domain");
    }
    return weights.dot(values);
}

Domain build_domain(int dimension, std::span<const double> extents, std::span<const int> nodes_per_axis)
{
    if (dimension != 1 && dimension != 2) {
        throw Error(ErrorKind::InvalidArgument, "dimension must be 1 or 2");
    }
    const auto dim = static_cast<std::size_t>(dimension);
    if (extents.size() < dim || nodes_per_axis.size() < dim) {
        throw Error(ErrorKind::InvalidArgument, "extents and nodes_per_axis need one entry per axis");
    }

    Domain d;
    d.dimension = dimension;
    for (std::size_t a = 0; a < dim; ++a) {
        if (!(extents[a] > 0.0) || !std::isfinite(extents[a])) {
            throw Error(ErrorKind::InvalidArgument, "domain extents must be positive and finite");
        }
        if (nodes_per_axis[a] < min_nodes_per_axis) {
            throw Error(ErrorKind::InvalidArgument, "at least 3 nodes per axis are required");
        }
        d.extents[a]        = extents[a];
        d.nodes_per_axis[a] = nodes_per_axis[a];
        d.spacing[a]        = extents[a] / (nodes_per_axis[a] - 1);
    }

    const int nx = d.nodes_per_axis[0];
    const int ny = dimension == 2 ? d.nodes_per_axis[1] : 1;
    const auto wx = trapezoid_weights(nx, d.spacing[0]);
    const auto wy = dimension == 2 ? trapezoid_weights(ny, d.spacing[1]) : std::vector<double>{1.0};

    d.coordinates.reserve(static_cast<std::size_t>(nx * ny));
    d.weights.resize(static_cast<Index>(nx) * ny);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const Index k = d.node(i, j);
            d.coordinates.push_back({i * d.spacing[0], dimension == 2 ? j * d.spacing[1] : 0.0});
            d.weights[k] = wx[static_cast<std::size_t>(i)] * wy[static_cast<std::size_t>(j)];
            const bool on_boundary =
                i == 0 || i == nx - 1 || (dimension == 2 && (j == 0 || j == ny - 1));
            (on_boundary ? d.boundary_nodes : d.interior_nodes).push_back(k);
        }
    }
    return d;
}

RobinOperator assemble_robin_laplacian(const Domain& domain, double d1, double alpha)
{
    if (!(d1 > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "diffusivity d1 must be positive");
    }
    if (!(alpha >= 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "Robin coefficient alpha must be nonnegative");
    }

    const int nx = domain.nodes_per_axis[0];
    const int ny = domain.dimension == 2 ? domain.nodes_per_axis[1] : 1;

    std::vector<Eigen::Triplet<double>> triplets;
    const auto tx = robin_stencil_1d(nx, domain.spacing[0], alpha);
    for (int j = 0; j < ny; ++j) {
        for (const auto& t : tx) {
            triplets.emplace_back(domain.node(static_cast<int>(t.row()), j),
                                  domain.node(static_cast<int>(t.col()), j), d1 * t.value());
        }
    }
    if (domain.dimension == 2) {
        const auto ty = robin_stencil_1d(ny, domain.spacing[1], alpha);
        for (int i = 0; i < nx; ++i) {
            for (const auto& t : ty) {
                triplets.emplace_back(domain.node(i, static_cast<int>(t.row())),
                                      domain.node(i, static_cast<int>(t.col())), d1 * t.value());
            }
        }
    }

    RobinOperator op;
    op.d1    = d1;
    op.alpha = alpha;
    op.matrix.resize(domain.size(), domain.size());
    op.matrix.setFromTriplets(triplets.begin(), triplets.end());
    op.matrix.makeCompressed();
    return op;
}

Vector KernelOperator::apply_transposed(const Vector& p) const
{
    Vector wp = weights.cwiseProduct(p);
    Vector r  = matrix.transpose() * wp;
    return r.cwiseQuotient(weights);
}

double KernelOperator::inf_norm() const
{
    return matrix.cwiseAbs().rowwise().sum().maxCoeff();
}

KernelOperator build_kernel(const Domain& domain, KernelFamily family, const KernelParams& params)
{
    if (!(params.amplitude >= 0.0) || !std::isfinite(params.amplitude)) {
        throw Error(ErrorKind::InvalidArgument, "kernel amplitude must be nonnegative (H2)");
    }
    const bool smooth = family == KernelFamily::Gaussian || family == KernelFamily::SeparableProduct;
    if (smooth && !(params.sigma > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "kernel width sigma must be positive");
    }

    const Index n = domain.size();
    KernelOperator k;
    k.family  = family;
    k.params  = params;
    k.weights = domain.weights;
    k.matrix  = DenseMatrix::Zero(n, n);

    switch (family) {
    case KernelFamily::Delta:
        for (Index i = 0; i < n; ++i) {
            k.matrix(i, i) = params.amplitude;
        }
        break;
    case KernelFamily::Uniform: {
        const double value = params.amplitude / domain.measure();
        for (Index j = 0; j < n; ++j) {
            k.matrix.col(j).setConstant(value * domain.weights[j]);
        }
        break;
    }
    case KernelFamily::Gaussian: {
        double z = 1.0;
        for (int a = 0; a < domain.dimension; ++a) {
            z *= gaussian_lattice_sum(domain.spacing[static_cast<std::size_t>(a)], params.sigma);
        }
        const double s2 = 2.0 * params.sigma * params.sigma;
        for (Index j = 0; j < n; ++j) {
            const Point& xj = domain.coordinates[static_cast<std::size_t>(j)];
            for (Index i = 0; i < n; ++i) {
                const double r2 = squared_distance(domain.coordinates[static_cast<std::size_t>(i)], xj);
                k.matrix(i, j)  = params.amplitude * std::exp(-r2 / s2) / z * domain.weights[j];
            }
        }
        break;
    }
    case KernelFamily::SeparableProduct: {
        const Point c = params.center.value_or(Point{0.5 * domain.extents[0], 0.5 * domain.extents[1]});
        const double s2 = 2.0 * params.sigma * params.sigma;
        Vector f(n);
        for (Index i = 0; i < n; ++i) {
            f[i] = std::exp(-squared_distance(domain.coordinates[static_cast<std::size_t>(i)], c) / s2);
        }
        const double mass = domain.weights.dot(f);
        for (Index j = 0; j < n; ++j) {
            k.matrix.col(j) = params.amplitude * f * f[j] / mass * domain.weights[j];
        }
        break;
    }
    }
    return k;
}

Index ControlRegion::node_count() const
{
    return static_cast<Index>(std::llround(indicator.sum()));
}

double ControlRegion::measure(const Domain& domain) const
{
    return domain.weights.dot(indicator);
}

double ControlRegion::boundary_measure() const
{
    return std::accumulate(facets.begin(), facets.end(), 0.0,
                           [](double acc, const Facet& f) { return acc + f.weight; });
}

bool ControlRegion::contains(const Point& x, double tolerance) const
{
    switch (shape) {
    case RegionShape::Interval:
        return std::abs(x[0] - center[0]) <= size[0] + tolerance;
    case RegionShape::Ball: {
        const double r = size[0] + tolerance;
        return squared_distance(x, center) <= r * r;
    }
    case RegionShape::Box:
        return std::abs(x[0] - center[0]) <= size[0] + tolerance &&
               std::abs(x[1] - center[1]) <= size[1] + tolerance;
    }
    return false;
}

double region_half_extent(const ControlRegion& region, int axis)
{
    switch (region.shape) {
    case RegionShape::Interval:
    case RegionShape::Ball:
        return region.size[0];
    case RegionShape::Box:
        return region.size[static_cast<std::size_t>(axis)];
    }
    return 0.0;
}

ControlRegion make_region(const Domain& domain, RegionShape shape, std::span<const double> center,
                          std::span<const double> size)
{
    const auto dim = static_cast<std::size_t>(domain.dimension);
    if (center.size() < dim) {
        throw Error(ErrorKind::InvalidArgument, "region center needs one coordinate per axis");
    }
    if (shape == RegionShape::Interval && domain.dimension != 1) {
        throw Error(ErrorKind::InvalidArgument, "interval regions are only defined in 1D");
    }
    const std::size_t size_entries = shape == RegionShape::Box ? dim : 1;
    if (size.size() < size_entries) {
        throw Error(ErrorKind::InvalidArgument, "region size has too few entries");
    }

    ControlRegion region;
    // In 1D balls and boxes are intervals.
    region.shape = domain.dimension == 1 ? RegionShape::Interval : shape;
    for (std::size_t a = 0; a < dim; ++a) {
        region.center[a] = center[a];
    }
    for (std::size_t a = 0; a < size_entries; ++a) {
        if (!(size[a] > 0.0)) {
            throw Error(ErrorKind::InvalidArgument, "region size must be positive");
        }
        region.size[a] = size[a];
    }

    check_clearance(domain, region);
    fill_region_nodes(domain, region);
    if (region.node_count() == 0) {
        throw Error(ErrorKind::EmptyRegion, "no grid node lies inside the control region");
    }
    return region;
}

ControlRegion translate_region(const Domain& domain, const ControlRegion& region, std::span<const double> shift)
{
    std::array<double, 2> c = region.center;
    for (std::size_t a = 0; a < static_cast<std::size_t>(domain.dimension) && a < shift.size(); ++a) {
        c[a] += shift[a];
    }
    const std::size_t size_entries = region.shape == RegionShape::Box ? 2 : 1;
    return make_region(domain, region.shape, std::span<const double>(c.data(), 2),
                       std::span<const double>(region.size.data(), size_entries));
}

Vector RestrictedOperator::expand(const Vector& reduced) const
{
    Vector full = Vector::Zero(full_size);
    for (std::size_t k = 0; k < free_nodes.size(); ++k) {
        full[free_nodes[k]] = reduced[static_cast<Index>(k)];
    }
    return full;
}

Vector RestrictedOperator::reduce(const Vector& full) const
{
    Vector r(size());
    for (std::size_t k = 0; k < free_nodes.size(); ++k) {
        r[static_cast<Index>(k)] = full[free_nodes[k]];
    }
    return r;
}

RestrictedOperator restrict_to_complement(const RobinOperator& op, const KernelOperator& kernel,
                                          const ControlRegion& region)
{
    const Index n = op.matrix.rows();
    if (region.indicator.size() != n || kernel.matrix.rows() != n) {
        throw Error(ErrorKind::ShapeMismatch, "region, kernel and operator sizes differ");
    }

    RestrictedOperator r;
    r.full_size = n;
    r.full_to_free.assign(static_cast<std::size_t>(n), -1);
    for (Index i = 0; i < n; ++i) {
        if (region.indicator[i] < 0.5) {
            r.full_to_free[static_cast<std::size_t>(i)] = static_cast<Index>(r.free_nodes.size());
            r.free_nodes.push_back(i);
        }
    }
    const Index m = r.size();

    std::vector<Eigen::Triplet<double>> triplets;
    std::vector<std::vector<Index>> adjacency(static_cast<std::size_t>(m));
    for (Index col = 0; col < op.matrix.outerSize(); ++col) {
        for (SparseMatrix::InnerIterator it(op.matrix, col); it; ++it) {
            const Index fi = r.full_to_free[static_cast<std::size_t>(it.row())];
            const Index fj = r.full_to_free[static_cast<std::size_t>(it.col())];
            if (fi < 0 || fj < 0) {
                continue;
            }
            triplets.emplace_back(fi, fj, it.value());
            if (fi != fj) {
                adjacency[static_cast<std::size_t>(fi)].push_back(fj);
            }
        }
    }
    r.diffusion.resize(m, m);
    r.diffusion.setFromTriplets(triplets.begin(), triplets.end());
    r.diffusion.makeCompressed();

    r.kernel.resize(m, m);
    for (Index j = 0; j < m; ++j) {
        for (Index i = 0; i < m; ++i) {
            r.kernel(i, j) = kernel.matrix(r.free_nodes[static_cast<std::size_t>(i)],
                                           r.free_nodes[static_cast<std::size_t>(j)]);
        }
    }

    if (m > 0) {
        std::vector<char> seen(static_cast<std::size_t>(m), 0);
        std::queue<Index> queue;
        queue.push(0);
        seen[0]     = 1;
        Index count = 1;
        while (!queue.empty()) {
            const Index v = queue.front();
            queue.pop();
            for (Index w : adjacency[static_cast<std::size_t>(v)]) {
                if (!seen[static_cast<std::size_t>(w)]) {
                    seen[static_cast<std::size_t>(w)] = 1;
                    ++count;
                    queue.push(w);
                }
            }
        }
        r.connected = count == m;
    }
    return r;
}

} // namespace epiregion
