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
#ifndef EPIREGION_IO_HPP
#define EPIREGION_IO_HPP

#include "epiregion/scenario.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace epiregion
{

/// t followed by sup and integral columns per field.
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& trajectory);

/// node, x, y and one column per field.
void write_snapshot_csv(const std::filesystem::path& path, const Domain& domain, const StateField& state,
                        const std::vector<std::string>& names);

void write_field_csv(const std::filesystem::path& path, const Domain& domain, const Vector& values,
                     const std::string& name);

nlohmann::json to_json(const EigenPair& pair);
nlohmann::json to_json(const LogisticEstimate& estimate);
nlohmann::json to_json(const PeriodicEigenPair& pair);
nlohmann::json to_json(const StabilizationReport& report);
nlohmann::json to_json(const TranslationPath& path);

/// One row per iterate and direction: center, derivative and per-facet time integrals.
void write_gradient_csv(const std::filesystem::path& path, const TranslationPath& translation);

void write_json(const std::filesystem::path& path, const nlohmann::json& doc);
nlohmann::json read_json(const std::filesystem::path& path);

std::string file_sha256(const std::filesystem::path& path);

struct OutputEntry {
    std::string path;
    std::string sha256;
};

struct RunRecord {
    std::string command;
    std::string scenario_digest;
    std::string version;
    std::vector<OutputEntry> outputs;
    double wall_seconds = 0.0;
    long long steps     = 0;
    int threads         = 1;
    nlohmann::json summary;
};

nlohmann::json to_json(const RunRecord& record);
RunRecord run_record_from_json(const nlohmann::json& doc);

const char* library_version();

} // namespace epiregion

#endif // EPIREGION_IO_HPP
