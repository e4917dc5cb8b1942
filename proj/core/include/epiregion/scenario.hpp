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
#ifndef EPIREGION_SCENARIO_HPP
#define EPIREGION_SCENARIO_HPP

#include "epiregion/control.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace epiregion
{

struct DomainSpec {
    int dimension = 1;
    std::array<double, 2> extents{1.0, 1.0};
    std::array<int, 2> nodes{64, 1};
};

struct KernelSpec {
    KernelFamily family = KernelFamily::Gaussian;
    KernelParams params;
};

struct RegionSpec {
    RegionShape shape = RegionShape::Interval;
    Point center{0.5, 0.5};
    /// Half-widths, or the radius in the first entry for balls.
    Point size{0.1, 0.1};
};

enum class InitialKind
{
    Constant,
    GaussianBump,
    FromFile,
};

/**
 * constant:      every field equal to values[f]
 * gaussian-bump: heights[f] * exp(-|x - center|^2 / (2 width^2))
 * from-file:     CSV with one column per field and one row per node
 */
struct InitialSpec {
    InitialKind kind = InitialKind::Constant;
    std::vector<double> values{1.0, 0.0};
    Point center{0.5, 0.5};
    double width = 0.1;
    std::string path;
};

struct Scenario {
    std::string name;
    DomainSpec domain;
    double d1    = 0.1;
    double alpha = 0.0;
    KernelSpec kernel;
    ModelTag tag = ModelTag::Core;
    double a11   = 1.0;
    double a22   = 1.0;
    double gamma = 0.0;
    /// Malaria capacity C(x); a single entry is a constant field.
    std::vector<double> capacity;
    ForceOfInfection response;
    SirParams sir;
    ForceOfInfection force;
    Seasonality season;
    std::optional<RegionSpec> region;
    SolverConfig solver;
    InitialSpec initial;
    DirectConfig direct;
    LogisticConfig logistic;
    /// Fixed logistic shift; automatic selection when absent.
    std::optional<double> zeta;
    PeriodicConfig periodic;
    OptimizerConfig optimizer;
    DomainFlag domain_flag = DomainFlag::Whole;

    /// Directory that relative file references resolve against; not serialized.
    std::filesystem::path base_dir;
};

nlohmann::json to_json(const Scenario& scenario);

/// Throws ParseError naming the offending field.
Scenario scenario_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});

/// Parses and validates; ParseError for malformed input, ValidationError naming the violated hypothesis.
Scenario load_scenario(const std::filesystem::path& path);

Scenario parse_scenario(std::string_view text, const std::filesystem::path& base_dir = {});

/// H1 samples, H2 kernel sign, H3 initial sign, dt bound and region clearance.
void validate_scenario(const Scenario& scenario);

/// Canonical serialization used for hashing.
std::string canonical_dump(const Scenario& scenario);

std::string sha256_hex(std::string_view bytes);

std::string scenario_digest(const Scenario& scenario);

Problem build_problem(const Scenario& scenario);

std::optional<ControlRegion> build_region(const Scenario& scenario, const Domain& domain);

StateField build_initial(const Scenario& scenario, const Domain& domain);

const char* to_string(KernelFamily family);
const char* to_string(ForceFamily family);
const char* to_string(RegionShape shape);
const char* to_string(InitialKind kind);
const char* to_string(SeasonalityFamily family);

} // namespace epiregion

#endif // EPIREGION_SCENARIO_HPP
