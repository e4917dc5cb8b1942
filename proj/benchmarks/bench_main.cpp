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

#include <benchmark/benchmark.h>

#include <span>

using namespace epiregion;

namespace
{

Problem make_problem(int nodes)
{
    Problem p;
    const double extent = 1.0;
    p.domain     = build_domain(1, std::span<const double>(&extent, 1), std::span<const int>(&nodes, 1));
    p.diffusion  = assemble_robin_laplacian(p.domain, 0.1, 0.0);
    p.kernel     = build_kernel(p.domain, KernelFamily::Gaussian, KernelParams{});
    p.model.tag  = ModelTag::Controlled;
    p.model.a11  = 1.0;
    p.model.a22  = 1.0;
    p.model.gamma = 5.0;
    p.force      = ForceOfInfection::linear(2.0);
    const double c = 0.5;
    const double r = 0.1;
    p.region = make_region(p.domain, RegionShape::Interval, std::span<const double>(&c, 1), std::span<const double>(&r, 1));
    return p;
}

void bm_step(benchmark::State& state)
{
    const Problem p = make_problem(static_cast<int>(state.range(0)));
    SolverConfig cfg;
    cfg.scheme = state.range(1) == 0 ? Scheme::BackwardEuler : Scheme::CrankNicolson;
    const Simulator sim(p, cfg);
    StateField u{Vector::Ones(p.domain.size()), Vector::Zero(p.domain.size())};
    for (auto _ : state) {
        u = sim.step(u, 0.0);
        benchmark::DoNotOptimize(u[0].data());
    }
}
BENCHMARK(bm_step)->ArgsProduct({{64, 256, 1024}, {0, 1}});

void bm_direct_eigen(benchmark::State& state)
{
    const Problem p = make_problem(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(principal_eigenvalue_controlled(p, &*p.region, p.model.gamma).eigenvalue);
    }
}
BENCHMARK(bm_direct_eigen)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void bm_logistic(benchmark::State& state)
{
    const Problem p = make_problem(64);
    for (auto _ : state) {
        benchmark::DoNotOptimize(principal_eigenvalue_logistic_auto(p, &*p.region, p.model.gamma).estimate);
    }
}
BENCHMARK(bm_logistic)->Unit(benchmark::kMillisecond);

} // namespace
BENCHMARK_MAIN();
