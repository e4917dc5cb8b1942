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
#ifndef EPIREGION_TEST_FIXTURES_HPP
#define EPIREGION_TEST_FIXTURES_HPP

#include "epiregion/scenario.hpp"

#include <array>
#include <filesystem>
#include <optional>
#include <string>

namespace fixture
{

inline std::filesystem::path path(const std::string& name)
{
    return std::filesystem::path(EPIREGION_FIXTURE_DIR) / name;
}

inline epiregion::Scenario scenario(const std::string& name)
{
    return epiregion::load_scenario(path(name));
}

struct Setup {
    int nodes          = 64;
    double length      = 1.0;
    double d1          = 0.1;
    double alpha       = 0.0;
    epiregion::KernelFamily kernel = epiregion::KernelFamily::Gaussian;
    double sigma       = 0.1;
    double amplitude   = 1.0;
    epiregion::ModelTag tag = epiregion::ModelTag::Core;
    double a11         = 1.0;
    double a22         = 1.0;
    double gamma       = 0.0;
    epiregion::ForceOfInfection force = epiregion::ForceOfInfection::linear(1.0);
    epiregion::Seasonality season;
    /// (center, half-width) of an interval region
    std::optional<std::array<double, 2>> region;
};

inline epiregion::Problem problem_1d(const Setup& s)
{
    using namespace epiregion;
    Problem p;
    const double extent = s.length;
    const int nodes     = s.nodes;
    p.domain            = build_domain(1, std::span<const double>(&extent, 1), std::span<const int>(&nodes, 1));
    p.diffusion         = assemble_robin_laplacian(p.domain, s.d1, s.alpha);
    KernelParams kp;
    kp.sigma     = s.sigma;
    kp.amplitude = s.amplitude;
    p.kernel     = build_kernel(p.domain, s.kernel, kp);
    p.model.tag  = s.tag;
    p.model.a11  = s.a11;
    p.model.a22  = s.a22;
    p.model.gamma = s.gamma;
    p.force      = s.force;
    p.season     = s.season;
    if (s.region) {
        const double c = (*s.region)[0];
        const double r = (*s.region)[1];
        p.region       = make_region(p.domain, RegionShape::Interval, std::span<const double>(&c, 1),
                                     std::span<const double>(&r, 1));
    }
    return p;
}

inline epiregion::StateField constant_state(const epiregion::Problem& p, double u1, double u2)
{
    return {epiregion::Vector::Constant(p.domain.size(), u1), epiregion::Vector::Constant(p.domain.size(), u2)};
}

} // namespace fixture

#endif // EPIREGION_TEST_FIXTURES_HPP
