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
#include "epiregion/cli.hpp"
#include "epiregion/error.hpp"
#include "epiregion/io.hpp"

#include <CLI11.hpp>
#include <Eigen/Core>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <future>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <sstream>
#include <utility>

namespace epiregion
{

namespace fs = std::filesystem;
using nlohmann::json;

namespace
{

enum class Method
{
    Direct,
    Logistic,
    Both,
};

struct Options {
    std::vector<std::string> scenarios;
    std::string out = "epiregion-out";
    std::string method = "both";
    std::string mode   = "homogeneous";
    std::string domain_flag;
    int jobs           = 1;
    std::vector<std::string> records;
};

int pinned_threads()
{
    if (const char* env = std::getenv("EPIREGION_THREADS")) {
        try {
            const int n = std::stoi(env);
            if (n > 0) {
                return n;
            }
        }
        catch (const std::exception&) {
        }
        throw Error(ErrorKind::ValidationError, "EPIREGION_THREADS must be a positive integer");
    }
    return 1;
}

Method method_from(const std::string& name)
{
    if (name == "direct") {
        return Method::Direct;
    }
    if (name == "logistic") {
        return Method::Logistic;
    }
    return Method::Both;
}

/// Collects written files so the run record can list them with their hashes.
class Outputs
{
public:
    explicit Outputs(fs::path dir)
        : m_dir(std::move(dir))
    {
        fs::create_directories(m_dir);
    }

    fs::path path(const std::string& name) const
    {
        return m_dir / name;
    }

    void add(const std::string& name)
    {
        m_entries.push_back({name, file_sha256(m_dir / name)});
    }

    void json_file(const std::string& name, const json& doc)
    {
        write_json(path(name), doc);
        add(name);
    }

    const std::vector<OutputEntry>& entries() const
    {
        return m_entries;
    }
    const fs::path& dir() const
    {
        return m_dir;
    }

private:
    fs::path m_dir;
    std::vector<OutputEntry> m_entries;
};

struct Context {
    Scenario scenario;
    Problem problem;
    Options options;
    int threads = 1;
};

LogisticEstimate run_logistic(const Context& ctx, const ControlRegion* region, double gamma)
{
    if (ctx.scenario.zeta) {
        return principal_eigenvalue_logistic(ctx.problem, region, gamma, *ctx.scenario.zeta, ctx.scenario.logistic);
    }
    return principal_eigenvalue_logistic_auto(ctx.problem, region, gamma, ctx.scenario.logistic);
}

const ControlRegion& require_region(const Context& ctx, const char* what)
{
    if (!ctx.problem.region) {
        throw Error(ErrorKind::ValidationError, std::string(what) + " needs a control region in the scenario");
    }
    return *ctx.problem.region;
}

json cmd_simulate(const Context& ctx, Outputs& out, long long& steps)
{
    const StateField initial = build_initial(ctx.scenario, ctx.problem.domain);
    const Trajectory traj    = simulate(ctx.problem, initial, ctx.scenario.solver);
    steps                    = static_cast<long long>(traj.step_count());

    write_trajectory_csv(out.path("trajectory.csv"), traj);
    out.add("trajectory.csv");
    for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
        std::ostringstream name;
        name << "snapshot_" << std::setw(6) << std::setfill('0') << traj.snapshot_steps[k] << ".csv";
        write_snapshot_csv(out.path(name.str()), ctx.problem.domain, traj.snapshots[k], traj.field_names);
        out.add(name.str());
    }
    json summary{{"steps", traj.step_count()}, {"end_time", traj.end_time()}, {"min_value", traj.min_value}};
    for (std::size_t f = 0; f < traj.field_names.size(); ++f) {
        summary["final_sup_" + traj.field_names[f]] = traj.sup_norms[f].back();
    }
    return summary;
}

json cmd_eigen(const Context& ctx, Outputs& out)
{
    const ControlRegion* region = ctx.problem.region ? &*ctx.problem.region : nullptr;
    const double gamma          = ctx.scenario.gamma;
    json summary;

    if (certify_mode_from_string(ctx.options.mode) == CertifyMode::Periodic) {
        const ControlRegion& r = require_region(ctx, "periodic eigen");
        const double a21       = ctx.problem.force.linear_bound();
        const double d0        = ctx.problem.force.derivative_at_zero();
        const auto global      = periodic_principal_eigenvalue(ctx.problem, r, ctx.problem.season, a21,
                                                               ctx.scenario.periodic);
        const auto local       = periodic_principal_eigenvalue(ctx.problem, r, ctx.problem.season, d0,
                                                               ctx.scenario.periodic);
        summary["periodic"]       = to_json(global);
        summary["periodic_local"] = to_json(local);
        write_field_csv(out.path("periodic_phi.csv"), ctx.problem.domain, global.phi.front(), "phi");
        out.add("periodic_phi.csv");
        out.json_file("eigen.json", summary);
        return summary;
    }

    const Method method = method_from(ctx.options.method);
    std::optional<EigenPair> direct;
    if (method != Method::Logistic) {
        direct = principal_eigenvalue_controlled(ctx.problem, region, gamma, ctx.scenario.direct);
        summary["direct"] = to_json(*direct);
        write_field_csv(out.path("eigenvector.csv"), ctx.problem.domain, direct->eigenvector, "phi");
        out.add("eigenvector.csv");
    }
    if (method != Method::Direct) {
        const LogisticEstimate est = run_logistic(ctx, region, gamma);
        summary["logistic"]        = to_json(est);
        if (direct) {
            summary["delta"] = std::abs(est.estimate - direct->eigenvalue);
        }
    }
    out.json_file("eigen.json", summary);
    return summary;
}

json cmd_certify(const Context& ctx, Outputs& out)
{
    const ControlRegion& region = require_region(ctx, "certify");
    const StabilizationReport report =
        certify(ctx.problem, region, ctx.scenario.gamma, certify_mode_from_string(ctx.options.mode),
                ctx.scenario.periodic);
    const json doc = to_json(report);
    out.json_file("certificate.json", doc);
    return doc;
}

json cmd_optimize(const Context& ctx, Outputs& out, long long& steps)
{
    const ControlRegion& region = require_region(ctx, "optimize-region");
    const StateField initial    = build_initial(ctx.scenario, ctx.problem.domain);
    const TranslationPath path  = optimize_translation(ctx.problem, region, ctx.scenario.gamma, initial,
                                                       ctx.scenario.solver, ctx.scenario.optimizer);
    steps = static_cast<long long>(path.values.size());
    const json doc = to_json(path);
    out.json_file("path.json", doc);
    write_gradient_csv(out.path("gradient.csv"), path);
    out.add("gradient.csv");
    return json{{"iterates", path.values.size()},
                {"initial_R", path.values.front()},
                {"final_R", path.values.back()},
                {"termination", to_string(path.termination)}};
}

json cmd_compare(const Context& ctx, Outputs& out)
{
    const ControlRegion* region = ctx.problem.region ? &*ctx.problem.region : nullptr;
    const double gamma          = ctx.scenario.gamma;

    struct Row {
        std::string quantity;
        std::string method;
        double value;
        double delta;
    };
    std::vector<Row> rows;
    const EigenPair direct     = principal_eigenvalue_controlled(ctx.problem, region, gamma, ctx.scenario.direct);
    const LogisticEstimate est = run_logistic(ctx, region, gamma);
    rows.push_back({"lambda_controlled", "direct", direct.eigenvalue, 0.0});
    rows.push_back({"lambda_controlled", "logistic", est.estimate, est.estimate - direct.eigenvalue});
    if (region != nullptr) {
        const EigenPair dirichlet = principal_eigenvalue_dirichlet_complement(ctx.problem, *region, ctx.scenario.direct);
        Seasonality flat;
        flat.period = ctx.problem.season.period;
        const auto periodic = periodic_principal_eigenvalue(ctx.problem, *region, flat,
                                                            ctx.problem.force.linear_bound(), ctx.scenario.periodic);
        rows.push_back({"lambda_dirichlet", "direct", dirichlet.eigenvalue, 0.0});
        rows.push_back(
            {"lambda_dirichlet", "periodic-reduction", periodic.eigenvalue, periodic.eigenvalue - dirichlet.eigenvalue});
    }

    {
        std::ofstream csv(out.path("compare.csv"));
        csv << std::setprecision(17) << "quantity,method,value,delta\n";
        for (const auto& r : rows) {
            csv << r.quantity << ',' << r.method << ',' << r.value << ',' << r.delta << '\n';
        }
    }
    out.add("compare.csv");
    json summary = json::array();
    for (const auto& r : rows) {
        summary.push_back({{"quantity", r.quantity}, {"method", r.method}, {"value", r.value}, {"delta", r.delta}});
    }
    return summary;
}

json dispatch(const Context& ctx, const std::string& command, Outputs& out, long long& steps)
{
    if (command == "simulate") {
        return cmd_simulate(ctx, out, steps);
    }
    if (command == "eigen") {
        return cmd_eigen(ctx, out);
    }
    if (command == "certify") {
        return cmd_certify(ctx, out);
    }
    if (command == "optimize-region") {
        return cmd_optimize(ctx, out, steps);
    }
    return cmd_compare(ctx, out);
}

RunRecord run_scenario(const std::string& command, const std::string& scenario_path, const fs::path& out_dir,
                       const Options& options, int threads)
{
    const auto start = std::chrono::steady_clock::now();
    Context ctx;
    ctx.scenario = load_scenario(scenario_path);
    if (!options.domain_flag.empty()) {
        ctx.scenario.domain_flag = domain_flag_from_string(options.domain_flag);
    }
    ctx.problem = build_problem(ctx.scenario);
    ctx.options = options;
    ctx.threads = threads;

    Outputs out(out_dir);
    RunRecord record;
    record.command         = command;
    record.scenario_digest = scenario_digest(ctx.scenario);
    record.version         = library_version();
    record.threads         = threads;
    record.summary         = dispatch(ctx, command, out, record.steps);
    record.outputs      = out.entries();
    record.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_json(out.path("run_record.json"), to_json(record));
    return record;
}

void cmd_report(const Options& options, std::ostream& out)
{
    std::vector<fs::path> files;
    for (const auto& r : options.records) {
        const fs::path p(r);
        if (fs::is_directory(p)) {
            for (const auto& entry : fs::recursive_directory_iterator(p)) {
                if (entry.path().filename() == "run_record.json") {
                    files.push_back(entry.path());
                }
            }
        }
        else {
            files.push_back(p);
        }
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) {
        throw Error(ErrorKind::ValidationError, "report needs at least one run record");
    }
    fs::create_directories(options.out);
    const fs::path csv_path = fs::path(options.out) / "summary.csv";
    std::ofstream csv(csv_path);
    csv << std::setprecision(17) << "record,command,scenario_digest,version,steps,threads,outputs,wall_seconds\n";
    for (const auto& f : files) {
        const RunRecord r = run_record_from_json(read_json(f));
        csv << f.string() << ',' << r.command << ',' << r.scenario_digest << ',' << r.version << ',' << r.steps
            << ',' << r.threads << ',' << r.outputs.size() << ',' << r.wall_seconds << '\n';
    }
    out << json{{"summary", csv_path.string()}, {"records", files.size()}}.dump() << '\n';
}

int report_error(std::ostream& err, ErrorKind kind, const std::string& message, std::optional<double> value)
{
    json doc{{"error", to_string(kind)}, {"message", message}};
    if (value) {
        doc["value"] = *value;
    }
    err << doc.dump() << '\n';
    return is_validation_error(kind) ? 2 : 3;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Nonlocal reaction-diffusion epidemic toolkit with regional feedback control", "epiregion"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(library_version()));

    Options options;
    const std::vector<std::pair<std::string, std::string>> commands{
        {"simulate", "Integrate a scenario and write trajectory and snapshots"},
        {"eigen", "Principal eigenvalue of the linearized problem"},
        {"certify", "Stabilizability verdict for the control region"},
        {"optimize-region", "Translate the control region to lower R"},
        {"compare-eigen", "Direct versus logistic eigenvalue table"}};
    for (const auto& [name, description] : commands) {
        CLI::App* sub = app.add_subcommand(name, description);
        sub->add_option("--scenario", options.scenarios, "Scenario JSON file (repeat for a sweep)")
            ->required()
            ->check(CLI::ExistingFile);
        sub->add_option("--out", options.out, "Output directory")->capture_default_str();
        sub->add_option("--jobs", options.jobs, "Scenarios run concurrently")->check(CLI::PositiveNumber);
        sub->add_option("--domain-flag", options.domain_flag, "Integration domain of R")
            ->check(CLI::IsMember({"whole", "region"}));
        if (name == "eigen" || name == "certify") {
            sub->add_option("--mode", options.mode, "Time-homogeneous or periodic problem")
                ->check(CLI::IsMember({"homogeneous", "periodic"}))
                ->capture_default_str();
        }
        if (name == "eigen") {
            sub->add_option("--method", options.method, "Eigenvalue route")
                ->check(CLI::IsMember({"direct", "logistic", "both"}))
                ->capture_default_str();
        }
    }
    CLI::App* report = app.add_subcommand("report", "Merge run records into a summary CSV");
    report->add_option("records", options.records, "run_record.json files or directories")->required();
    report->add_option("--out", options.out, "Output directory")->capture_default_str();

    try {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            app.exit(e, out, err);
            return 0;
        }
        return report_error(err, ErrorKind::ParseError, e.what(), std::nullopt);
    }

    try {
        const int threads = pinned_threads();
        Eigen::setNbThreads(threads);
        if (report->parsed()) {
            cmd_report(options, out);
            return 0;
        }
        std::string command;
        for (const auto& [name, description] : commands) {
            if (app.got_subcommand(name)) {
                command = name;
            }
        }

        const bool sweep = options.scenarios.size() > 1;
        auto target      = [&](const std::string& scenario) {
            const fs::path base = options.out;
            return sweep ? base / fs::path(scenario).stem() : base;
        };

        std::vector<json> summaries(options.scenarios.size());
        std::size_t next = 0;
        std::mutex lock;
        auto worker = [&]() {
            for (;;) {
                std::size_t k;
                {
                    std::lock_guard<std::mutex> guard(lock);
                    if (next >= options.scenarios.size()) {
                        return;
                    }
                    k = next++;
                }
                const RunRecord record =
                    run_scenario(command, options.scenarios[k], target(options.scenarios[k]), options, threads);
                summaries[k] = {{"scenario", options.scenarios[k]},
                                {"digest", record.scenario_digest},
                                {"summary", record.summary}};
            }
        };
        const auto workers = static_cast<std::size_t>(std::max(1, options.jobs));
        std::vector<std::future<void>> pool;
        for (std::size_t w = 0; w < std::min(workers, options.scenarios.size()); ++w) {
            pool.push_back(std::async(std::launch::async, worker));
        }
        for (auto& f : pool) {
            f.get();
        }
        out << (sweep ? json(summaries) : summaries.front()).dump(2) << '\n';
        return 0;
    }
    catch (const Error& e) {
        return report_error(err, e.kind(), e.what(), e.value());
    }
    catch (const std::filesystem::filesystem_error& e) {
        return report_error(err, ErrorKind::IoError, e.what(), std::nullopt);
    }
    catch (const std::exception& e) {
        return report_error(err, ErrorKind::NotConverged, e.what(), std::nullopt);
    }
}

} // namespace epiregion
