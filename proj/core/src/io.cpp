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
#include "epiregion/io.hpp"
#include "epiregion/error.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#ifndef EPIREGION_VERSION
#define EPIREGION_VERSION "0.0.0"
#endif

namespace epiregion
{

using nlohmann::json;

namespace
{

std::ofstream open_output(const std::filesystem::path& path)
{
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorKind::IoError, "cannot write " + path.string());
    }
    out << std::setprecision(17);
    return out;
}

json optional_number(const std::optional<double>& v)
{
    return v ? json(*v) : json(nullptr);
}

} // namespace

const char* library_version()
{
    return EPIREGION_VERSION;
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj)
{
    std::ofstream out = open_output(path);
    out << "t";
    for (const auto& name : traj.field_names) {
        out << ",sup_" << name;
    }
    for (const auto& name : traj.field_names) {
        out << ",int_" << name;
    }
    out << '\n';
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        out << traj.times[k];
        for (const auto& s : traj.sup_norms) {
            out << ',' << s[k];
        }
        for (const auto& s : traj.integrals) {
            out << ',' << s[k];
        }
        out << '\n';
    }
}

void write_snapshot_csv(const std::filesystem::path& path, const Domain& domain, const StateField& state,
                        const std::vector<std::string>& names)
{
    std::ofstream out = open_output(path);
    out << "node,x,y";
    for (const auto& name : names) {
        out << ',' << name;
    }
    out << '\n';
    for (Index i = 0; i < domain.size(); ++i) {
        const Point& x = domain.coordinates[static_cast<std::size_t>(i)];
        out << i << ',' << x[0] << ',' << x[1];
        for (const auto& f : state) {
            out << ',' << f[i];
        }
        out << '\n';
    }
}

void write_field_csv(const std::filesystem::path& path, const Domain& domain, const Vector& values,
                     const std::string& name)
{
    write_snapshot_csv(path, domain, StateField{values}, {name});
}

json to_json(const EigenPair& pair)
{
    return json{{"eigenvalue", pair.eigenvalue},
                {"residual", pair.residual},
                {"method", pair.method},
                {"iterations", pair.iterations},
                {"shift", pair.shift},
                {"complement_connected", pair.complement_connected}};
}

json to_json(const LogisticEstimate& est)
{
    return json{{"eigenvalue", est.estimate},
                {"method", "logistic"},
                {"zeta", est.zeta},
                {"y0", est.y0},
                {"dt", est.dt},
                {"horizon", est.horizon},
                {"final_mass", est.history.empty() ? 0.0 : est.history.back()},
                {"history", est.history}};
}

json to_json(const PeriodicEigenPair& pair)
{
    return json{{"eigenvalue", pair.eigenvalue},
                {"method", "period-map"},
                {"slope", pair.slope},
                {"multiplier", pair.multiplier},
                {"multiplier_at_zero", pair.multiplier_at_zero},
                {"periodicity_residual", pair.periodicity_residual},
                {"evaluations", pair.evaluations},
                {"phases", pair.phases}};
}

json to_json(const StabilizationReport& r)
{
    return json{{"mode", to_string(r.mode)},
                {"region", {{"shape", to_string(r.shape)}, {"center", r.center}, {"size", r.size}}},
                {"gamma", r.gamma},
                {"lambda_controlled", r.lambda_controlled},
                {"lambda_dirichlet", r.lambda_dirichlet},
                {"lambda_periodic", optional_number(r.lambda_periodic)},
                {"lambda_periodic_local", optional_number(r.lambda_periodic_local)},
                {"verdict", to_string(r.verdict)},
                {"gamma_sufficient", r.gamma_sufficient},
                {"decay_rate", optional_number(r.decay_rate)}};
}

json to_json(const TranslationPath& path)
{
    json gradients = json::array();
    for (const auto& g : path.gradients) {
        gradients.push_back(g.derivatives);
    }
    return json{{"centers", path.centers},
                {"values", path.values},
                {"step_sizes", path.step_sizes},
                {"clamped", path.clamped},
                {"gradients", gradients},
                {"termination", to_string(path.termination)}};
}

void write_gradient_csv(const std::filesystem::path& path, const TranslationPath& translation)
{
    std::ofstream out = open_output(path);
    out << "iterate,center_x,center_y,direction,derivative,facet,facet_integral\n";
    for (std::size_t k = 0; k < translation.gradients.size(); ++k) {
        const ShapeGradient& g = translation.gradients[k];
        const Point& c         = translation.centers[k];
        for (std::size_t d = 0; d < g.derivatives.size(); ++d) {
            for (std::size_t f = 0; f < g.facet_integrals.size(); ++f) {
                out << k << ',' << c[0] << ',' << c[1] << ',' << d << ',' << g.derivatives[d] << ',' << f << ','
                    << g.facet_integrals[f] << '\n';
            }
        }
    }
}

void write_json(const std::filesystem::path& path, const json& doc)
{
    std::ofstream out = open_output(path);
    out << doc.dump(2) << '\n';
}

json read_json(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::IoError, "cannot open " + path.string());
    }
    try {
        return json::parse(in);
    }
    catch (const json::parse_error& e) {
        throw Error(ErrorKind::ParseError, path.string() + ": " + e.what());
    }
}

std::string file_sha256(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorKind::IoError, "cannot open " + path.string());
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return sha256_hex(buffer.str());
}

json to_json(const RunRecord& r)
{
    json outputs = json::array();
    for (const auto& o : r.outputs) {
        outputs.push_back({{"path", o.path}, {"sha256", o.sha256}});
    }
    return json{{"command", r.command},
                {"scenario_digest", r.scenario_digest},
                {"version", r.version},
                {"outputs", outputs},
                {"wall_seconds", r.wall_seconds},
                {"steps", r.steps},
                {"threads", r.threads},
                {"summary", r.summary}};
}

RunRecord run_record_from_json(const json& doc)
{
    RunRecord r;
    try {
        r.command         = doc.at("command").get<std::string>();
        r.scenario_digest = doc.at("scenario_digest").get<std::string>();
        r.version         = doc.at("version").get<std::string>();
        for (const auto& o : doc.at("outputs")) {
            r.outputs.push_back({o.at("path").get<std::string>(), o.at("sha256").get<std::string>()});
        }
        r.wall_seconds = doc.at("wall_seconds").get<double>();
        r.steps        = doc.at("steps").get<long long>();
        r.threads      = doc.at("threads").get<int>();
        r.summary      = doc.value("summary", json::object());
    }
    catch (const json::exception& e) {
        throw Error(ErrorKind::ParseError, std::string("malformed run record: ") + e.what());
    }
    return r;
}

} // namespace epiregion
