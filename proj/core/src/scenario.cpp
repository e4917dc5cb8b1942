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
#include "epiregion/scenario.hpp"
#include "epiregion/error.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

namespace epiregion
{

using nlohmann::json;

namespace
{

/// Strict object reader: typed access with field paths in errors, unknown keys rejected.
class Reader
{
public:
    Reader(const json& node, std::string path)
        : m_node(node)
        , m_path(std::move(path))
    {
        if (!node.is_object()) {
            throw Error(ErrorKind::ParseError, "field '" + m_path + "': expected an object");
        }
    }

    bool has(const std::string& key) const
    {
        return m_node.contains(key) && !m_node.at(key).is_null();
    }

    template <class T>
    T get(const std::string& key, const T& fallback)
    {
        m_seen.insert(key);
        if (!has(key)) {
            return fallback;
        }
        return convert<T>(key);
    }

    template <class T>
    T required(const std::string& key)
    {
        m_seen.insert(key);
        if (!has(key)) {
            throw Error(ErrorKind::ParseError, "field '" + child_path(key) + "' is required");
        }
        return convert<T>(key);
    }

    Reader child(const std::string& key)
    {
        m_seen.insert(key);
        if (!has(key)) {
            throw Error(ErrorKind::ParseError, "field '" + child_path(key) + "' is required");
        }
        if (!m_node.at(key).is_object()) {
            throw Error(ErrorKind::ParseError, "field '" + child_path(key) + "' has the wrong type");
        }
        return Reader(m_node.at(key), child_path(key));
    }

    void finish() const
    {
        for (const auto& item : m_node.items()) {
            if (!m_seen.count(item.key())) {
                throw Error(ErrorKind::ParseError, "unknown field '" + child_path(item.key()) + "'");
            }
        }
    }

    std::string child_path(const std::string& key) const
    {
        return m_path.empty() ? key : m_path + "." + key;
    }

private:
    template <class T>
    T convert(const std::string& key) const
    {
        try {
            return m_node.at(key).get<T>();
        }
        catch (const json::exception&) {
            throw Error(ErrorKind::ParseError, "field '" + child_path(key) + "' has the wrong type");
        }
    }

    const json& m_node;
    std::string m_path;
    std::set<std::string> m_seen;
};

template <class Enum, std::size_t N>
Enum enum_from(const std::string& value, const std::array<Enum, N>& options, const std::string& field)
{
    for (Enum e : options) {
        if (value == to_string(e)) {
            return e;
        }
    }
    throw Error(ErrorKind::ParseError, "field '" + field + "': unknown value '" + value + "'");
}

constexpr std::array<KernelFamily, 4> kernel_families{KernelFamily::Gaussian, KernelFamily::Uniform,
                                                      KernelFamily::SeparableProduct, KernelFamily::Delta};
constexpr std::array<ForceFamily, 4> force_families{ForceFamily::Linear, ForceFamily::Power, ForceFamily::Holling,
                                                    ForceFamily::Sigmoid};
constexpr std::array<RegionShape, 3> region_shapes{RegionShape::Interval, RegionShape::Ball, RegionShape::Box};
constexpr std::array<InitialKind, 3> initial_kinds{InitialKind::Constant, InitialKind::GaussianBump,
                                                   InitialKind::FromFile};
constexpr std::array<ModelTag, 5> model_tags{ModelTag::Core, ModelTag::Controlled, ModelTag::Periodic,
                                             ModelTag::Malaria, ModelTag::SirKendall};
constexpr std::array<Scheme, 2> schemes{Scheme::BackwardEuler, Scheme::CrankNicolson};
constexpr std::array<DomainFlag, 2> domain_flags{DomainFlag::Whole, DomainFlag::Region};

constexpr std::array<SeasonalityFamily, 2> season_families{SeasonalityFamily::Constant, SeasonalityFamily::Cosine};

json force_to_json(const ForceOfInfection& g)
{
    return json{{"family", to_string(g.family)}, {"k", g.k},         {"p", g.p},
                {"q", g.q},                      {"alpha", g.alpha}, {"beta", g.beta}};
}

ForceOfInfection force_from_json(Reader r)
{
    ForceOfInfection g;
    g.family = enum_from(r.get<std::string>("family", "linear"), force_families, r.child_path("family"));
    g.k      = r.get<double>("k", g.k);
    g.p      = r.get<double>("p", g.p);
    g.q      = r.get<double>("q", g.q);
    g.alpha  = r.get<double>("alpha", g.alpha);
    g.beta   = r.get<double>("beta", g.beta);
    r.finish();
    if (g.family == ForceFamily::Linear) {
        g.p = 1.0;
        g.q = 1.0;
    }
    if (g.family == ForceFamily::Sigmoid) {
        g.p = 2.0;
        g.q = 2.0;
    }
    return g;
}

template <std::size_t N>
std::array<double, N> read_point(Reader& r, const std::string& key, const std::array<double, N>& fallback)
{
    const auto v = r.get<std::vector<double>>(key, std::vector<double>(fallback.begin(), fallback.end()));
    if (v.empty() || v.size() > N) {
        throw Error(ErrorKind::ParseError, "field '" + r.child_path(key) + "' needs 1 to " + std::to_string(N) +
                                               " entries");
    }
    std::array<double, N> out = fallback;
    for (std::size_t i = 0; i < v.size(); ++i) {
        out[i] = v[i];
    }
    return out;
}

std::vector<double> point_to_vector(const Point& p, int entries)
{
    return std::vector<double>(p.begin(), p.begin() + entries);
}

int region_size_entries(const RegionSpec& r, int dimension)
{
    return r.shape == RegionShape::Box ? dimension : 1;
}

Vector read_initial_file(const std::filesystem::path& path, Index nodes, int fields)
{
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::IoError, "cannot open initial-data file " + path.string());
    }
    std::vector<double> values;
    std::string line;
    Index rows = 0;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> row;
        bool numeric = true;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t used = 0;
                row.push_back(std::stod(cell, &used));
            }
            catch (const std::exception&) {
                numeric = false;
                break;
            }
        }
        if (!numeric) {
            if (rows == 0 && values.empty()) {
                continue; // header
            }
            throw Error(ErrorKind::ParseError, "non-numeric entry in " + path.string());
        }
        if (static_cast<int>(row.size()) != fields) {
            throw Error(ErrorKind::ParseError, "initial-data rows need one column per field in " + path.string());
        }
        values.insert(values.end(), row.begin(), row.end());
        ++rows;
    }
    if (rows != nodes) {
        throw Error(ErrorKind::ShapeMismatch, "initial-data file has " + std::to_string(rows) + " rows, expected " +
                                                  std::to_string(nodes));
    }
    return Eigen::Map<Vector>(values.data(), static_cast<Index>(values.size()));
}

Vector capacity_field(const Scenario& s, const Domain& domain)
{
    if (s.capacity.empty()) {
        return Vector();
    }
    if (s.capacity.size() == 1) {
        return Vector::Constant(domain.size(), s.capacity.front());
    }
    if (static_cast<Index>(s.capacity.size()) != domain.size()) {
        throw Error(ErrorKind::ShapeMismatch, "malaria capacity needs one value or one value per node");
    }
    return Eigen::Map<const Vector>(s.capacity.data(), domain.size());
}

} // namespace

const char* to_string(SeasonalityFamily family)
{
    return family == SeasonalityFamily::Constant ? "constant" : "cosine";
}

const char* to_string(KernelFamily family)
{
    switch (family) {
    case KernelFamily::Gaussian:
        return "gaussian";
    case KernelFamily::Uniform:
        return "uniform";
    case KernelFamily::SeparableProduct:
        return "separable-product";
    case KernelFamily::Delta:
        return "delta";
    }
    return "delta";
}

const char* to_string(ForceFamily family)
{
    switch (family) {
    case ForceFamily::Linear:
        return "linear";
    case ForceFamily::Power:
        return "power";
    case ForceFamily::Holling:
        return "holling";
    case ForceFamily::Sigmoid:
        return "sigmoid";
    }
    return "linear";
}

const char* to_string(RegionShape shape)
{
    switch (shape) {
    case RegionShape::Interval:
        return "interval";
    case RegionShape::Ball:
        return "ball";
    case RegionShape::Box:
        return "box";
    }
    return "interval";
}

const char* to_string(InitialKind kind)
{
    switch (kind) {
    case InitialKind::Constant:
        return "constant";
    case InitialKind::GaussianBump:
        return "gaussian-bump";
    case InitialKind::FromFile:
        return "from-file";
    }
    return "constant";
}

json to_json(const Scenario& s)
{
    const int dim = s.domain.dimension;
    json doc;
    doc["name"]   = s.name;
    doc["domain"] = {{"dimension", dim},
                     {"extents", point_to_vector(s.domain.extents, dim)},
                     {"nodes", std::vector<int>(s.domain.nodes.begin(), s.domain.nodes.begin() + dim)}};
    doc["diffusion"] = {{"d1", s.d1}, {"alpha", s.alpha}};

    json kernel = {{"family", to_string(s.kernel.family)},
                   {"sigma", s.kernel.params.sigma},
                   {"amplitude", s.kernel.params.amplitude}};
    kernel["center"] = s.kernel.params.center ? json(point_to_vector(*s.kernel.params.center, dim)) : json(nullptr);
    doc["kernel"]    = kernel;

    doc["model"] = {{"tag", to_string(s.tag)},
                    {"a11", s.a11},
                    {"a22", s.a22},
                    {"gamma", s.gamma},
                    {"capacity", s.capacity},
                    {"response", force_to_json(s.response)},
                    {"sir", {{"d2", s.sir.d2}, {"d3", s.sir.d3}, {"mu", s.sir.mu}, {"recovery", s.sir.recovery}}}};
    doc["force"]       = force_to_json(s.force);
    doc["seasonality"] = {{"family", to_string(s.season.family)},
                          {"mean", s.season.mean},
                          {"depth", s.season.depth},
                          {"period", s.season.period}};
    if (s.region) {
        doc["region"] = {{"shape", to_string(s.region->shape)},
                         {"center", point_to_vector(s.region->center, dim)},
                         {"size", point_to_vector(s.region->size, region_size_entries(*s.region, dim))}};
    }
    else {
        doc["region"] = nullptr;
    }
    doc["solver"] = {{"dt", s.solver.dt},
                     {"end_time", s.solver.end_time},
                     {"scheme", to_string(s.solver.scheme)},
                     {"snapshot_stride", s.solver.snapshot_stride},
                     {"store_every_step", s.solver.store_every_step},
                     {"steady_tolerance", s.solver.steady_tolerance}};

    json initial = {{"kind", to_string(s.initial.kind)}};
    switch (s.initial.kind) {
    case InitialKind::Constant:
        initial["value"] = s.initial.values;
        break;
    case InitialKind::GaussianBump:
        initial["center"] = point_to_vector(s.initial.center, dim);
        initial["width"]  = s.initial.width;
        initial["height"] = s.initial.values;
        break;
    case InitialKind::FromFile:
        initial["path"] = s.initial.path;
        break;
    }
    doc["initial"] = initial;

    doc["eigen"] = {{"max_iterations", s.direct.max_iterations},
                    {"tolerance", s.direct.tolerance},
                    {"zeta", s.zeta ? json(*s.zeta) : json(nullptr)},
                    {"logistic",
                     {{"y0", s.logistic.y0},
                      {"dt", s.logistic.dt},
                      {"max_time", s.logistic.max_time},
                      {"record_interval", s.logistic.record_interval},
                      {"tolerance", s.logistic.tolerance}}},
                    {"periodic",
                     {{"steps_per_period", s.periodic.steps_per_period},
                      {"phase_samples", s.periodic.phase_samples},
                      {"max_evaluations", s.periodic.max_evaluations}}}};
    doc["optimizer"] = {{"eta0", s.optimizer.eta0},
                        {"eta_min", s.optimizer.eta_min},
                        {"grad_tol", s.optimizer.grad_tol},
                        {"max_iter", s.optimizer.max_iter}};
    doc["domain_flag"] = to_string(s.domain_flag);
    return doc;
}

Scenario scenario_from_json(const json& doc, const std::filesystem::path& base_dir)
{
    Scenario s;
    s.base_dir = base_dir;
    Reader root(doc, "");
    s.name = root.get<std::string>("name", "");

    {
        Reader r             = root.child("domain");
        s.domain.dimension   = r.required<int>("dimension");
        if (s.domain.dimension != 1 && s.domain.dimension != 2) {
            throw Error(ErrorKind::ParseError, "field 'domain.dimension' must be 1 or 2");
        }
        const auto extents = r.required<std::vector<double>>("extents");
        const auto nodes   = r.required<std::vector<int>>("nodes");
        const auto dim     = static_cast<std::size_t>(s.domain.dimension);
        if (extents.size() != dim || nodes.size() != dim) {
            throw Error(ErrorKind::ParseError, "fields 'domain.extents' and 'domain.nodes' need one entry per axis");
        }
        s.domain.extents = {1.0, 1.0};
        s.domain.nodes   = {1, 1};
        for (std::size_t a = 0; a < dim; ++a) {
            s.domain.extents[a] = extents[a];
            s.domain.nodes[a]   = nodes[a];
        }
        r.finish();
    }
    if (root.has("diffusion")) {
        Reader r = root.child("diffusion");
        s.d1     = r.get<double>("d1", s.d1);
        s.alpha  = r.get<double>("alpha", s.alpha);
        r.finish();
    }
    if (root.has("kernel")) {
        Reader r                  = root.child("kernel");
        s.kernel.family           = enum_from(r.get<std::string>("family", "gaussian"), kernel_families,
                                              r.child_path("family"));
        s.kernel.params.sigma     = r.get<double>("sigma", s.kernel.params.sigma);
        s.kernel.params.amplitude = r.get<double>("amplitude", s.kernel.params.amplitude);
        if (r.has("center")) {
            s.kernel.params.center = read_point(r, "center", Point{0.0, 0.0});
        }
        else {
            r.get<json>("center", json(nullptr));
        }
        r.finish();
    }
    else {
        root.get<json>("kernel", json(nullptr));
    }
    {
        Reader r = root.child("model");
        s.tag    = enum_from(r.required<std::string>("tag"), model_tags, r.child_path("tag"));
        s.a11    = r.get<double>("a11", s.a11);
        s.a22    = r.get<double>("a22", s.a22);
        s.gamma  = r.get<double>("gamma", s.gamma);
        if (r.has("capacity") && r.get<json>("capacity", json()).is_number()) {
            s.capacity = {r.get<double>("capacity", 0.0)};
        }
        else {
            s.capacity = r.get<std::vector<double>>("capacity", {});
        }
        if (r.has("response")) {
            s.response = force_from_json(r.child("response"));
        }
        else {
            r.get<json>("response", json(nullptr));
        }
        if (r.has("sir")) {
            Reader sir      = r.child("sir");
            s.sir.d2        = sir.get<double>("d2", 0.0);
            s.sir.d3        = sir.get<double>("d3", 0.0);
            s.sir.mu        = sir.get<double>("mu", 0.0);
            s.sir.recovery  = sir.get<double>("recovery", 0.0);
            sir.finish();
        }
        else {
            r.get<json>("sir", json(nullptr));
        }
        r.finish();
    }
    if (root.has("force")) {
        s.force = force_from_json(root.child("force"));
    }
    else {
        root.get<json>("force", json(nullptr));
    }
    if (root.has("seasonality")) {
        Reader r        = root.child("seasonality");
        s.season.family = enum_from(r.get<std::string>("family", "constant"), season_families,
                                    r.child_path("family"));
        s.season.mean   = r.get<double>("mean", 1.0);
        s.season.depth  = r.get<double>("depth", 0.0);
        s.season.period = r.get<double>("period", 1.0);
        r.finish();
    }
    else {
        root.get<json>("seasonality", json(nullptr));
    }
    if (root.has("region")) {
        Reader r = root.child("region");
        RegionSpec region;
        region.shape  = enum_from(r.required<std::string>("shape"), region_shapes, r.child_path("shape"));
        region.center = read_point(r, "center", region.center);
        region.size   = read_point(r, "size", region.size);
        if (s.domain.dimension == 1) {
            region.shape = RegionShape::Interval;
        }
        if (region.shape != RegionShape::Box) {
            region.size[1] = region.size[0];
        }
        if (s.domain.dimension == 1) {
            region.center[1] = 0.0;
            region.size[1]   = region.size[0];
        }
        s.region = region;
        r.finish();
    }
    else {
        root.get<json>("region", json(nullptr));
    }
    if (root.has("solver")) {
        Reader r                   = root.child("solver");
        s.solver.dt                = r.get<double>("dt", s.solver.dt);
        s.solver.end_time          = r.get<double>("end_time", s.solver.end_time);
        s.solver.scheme            = enum_from(r.get<std::string>("scheme", to_string(s.solver.scheme)), schemes,
                                               r.child_path("scheme"));
        s.solver.snapshot_stride   = r.get<int>("snapshot_stride", s.solver.snapshot_stride);
        s.solver.store_every_step  = r.get<bool>("store_every_step", s.solver.store_every_step);
        s.solver.steady_tolerance  = r.get<double>("steady_tolerance", s.solver.steady_tolerance);
        r.finish();
    }
    else {
        root.get<json>("solver", json(nullptr));
    }
    {
        Reader r         = root.child("initial");
        s.initial.kind   = enum_from(r.required<std::string>("kind"), initial_kinds, r.child_path("kind"));
        switch (s.initial.kind) {
        case InitialKind::Constant:
            s.initial.values = r.required<std::vector<double>>("value");
            break;
        case InitialKind::GaussianBump:
            s.initial.center = read_point(r, "center", s.initial.center);
            s.initial.width  = r.required<double>("width");
            s.initial.values = r.required<std::vector<double>>("height");
            if (s.domain.dimension == 1) {
                s.initial.center[1] = 0.0;
            }
            break;
        case InitialKind::FromFile:
            s.initial.path = r.required<std::string>("path");
            s.initial.values.clear();
            break;
        }
        r.finish();
    }
    if (root.has("eigen")) {
        Reader r                 = root.child("eigen");
        s.direct.max_iterations  = r.get<int>("max_iterations", s.direct.max_iterations);
        s.direct.tolerance       = r.get<double>("tolerance", s.direct.tolerance);
        if (r.has("zeta")) {
            s.zeta = r.get<double>("zeta", 0.0);
        }
        else {
            r.get<json>("zeta", json(nullptr));
        }
        if (r.has("logistic")) {
            Reader l                   = r.child("logistic");
            s.logistic.y0              = l.get<double>("y0", s.logistic.y0);
            s.logistic.dt              = l.get<double>("dt", s.logistic.dt);
            s.logistic.max_time        = l.get<double>("max_time", s.logistic.max_time);
            s.logistic.record_interval = l.get<double>("record_interval", s.logistic.record_interval);
            s.logistic.tolerance       = l.get<double>("tolerance", s.logistic.tolerance);
            l.finish();
        }
        else {
            r.get<json>("logistic", json(nullptr));
        }
        if (r.has("periodic")) {
            Reader p                    = r.child("periodic");
            s.periodic.steps_per_period = p.get<int>("steps_per_period", s.periodic.steps_per_period);
            s.periodic.phase_samples    = p.get<int>("phase_samples", s.periodic.phase_samples);
            s.periodic.max_evaluations  = p.get<int>("max_evaluations", s.periodic.max_evaluations);
            p.finish();
        }
        else {
            r.get<json>("periodic", json(nullptr));
        }
        r.finish();
    }
    else {
        root.get<json>("eigen", json(nullptr));
    }
    if (root.has("optimizer")) {
        Reader r             = root.child("optimizer");
        s.optimizer.eta0     = r.get<double>("eta0", s.optimizer.eta0);
        s.optimizer.eta_min  = r.get<double>("eta_min", s.optimizer.eta_min);
        s.optimizer.grad_tol = r.get<double>("grad_tol", s.optimizer.grad_tol);
        s.optimizer.max_iter = r.get<int>("max_iter", s.optimizer.max_iter);
        r.finish();
    }
    else {
        root.get<json>("optimizer", json(nullptr));
    }
    s.domain_flag = enum_from(root.get<std::string>("domain_flag", "whole"), domain_flags, "domain_flag");
    root.finish();
    return s;
}

Scenario parse_scenario(std::string_view text, const std::filesystem::path& base_dir)
{
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    }
    catch (const json::parse_error& e) {
        throw Error(ErrorKind::ParseError, e.what(), static_cast<double>(e.byte));
    }
    Scenario s = scenario_from_json(doc, base_dir);
    validate_scenario(s);
    return s;
}

Scenario load_scenario(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorKind::IoError, "cannot open scenario file " + path.string());
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_scenario(buffer.str(), path.parent_path());
}

void validate_scenario(const Scenario& s)
{
    auto fail = [](const std::string& message, std::optional<double> value = std::nullopt) {
        throw Error(ErrorKind::ValidationError, message, value);
    };

    if (s.kernel.params.amplitude < 0.0) {
        fail("H2 violated: kernel amplitude must be nonnegative");
    }
    if (!(s.kernel.params.sigma > 0.0)) {
        fail("H2 violated: kernel width sigma must be positive");
    }
    if (s.tag != ModelTag::Malaria && s.tag != ModelTag::SirKendall) {
        const H1Report h1 = check_h1(s.force);
        if (!h1.ok) {
            fail(h1.violation);
        }
    }
    if (s.tag == ModelTag::Malaria) {
        const H1Report h1 = check_h1(s.response);
        if (!h1.ok) {
            fail("malaria response: " + h1.violation);
        }
    }
    if (s.tag == ModelTag::Periodic || s.season.family != SeasonalityFamily::Constant) {
        try {
            s.season.validate();
        }
        catch (const Error& e) {
            fail(e.what());
        }
    }
    if (s.initial.kind == InitialKind::FromFile) {
        const auto p = s.base_dir / s.initial.path;
        if (!std::filesystem::exists(p)) {
            fail("initial-data file does not exist: " + p.string());
        }
    }
    else {
        for (double v : s.initial.values) {
            if (!(v >= 0.0)) {
                fail("H3 violated: initial data must be nonnegative");
            }
        }
        if (s.initial.kind == InitialKind::GaussianBump && !(s.initial.width > 0.0)) {
            fail("initial bump width must be positive");
        }
    }

    Problem problem;
    try {
        problem = build_problem(s);
    }
    catch (const Error& e) {
        if (e.kind() == ErrorKind::RegionTouchesBoundary) {
            fail(std::string("region clearance violated: ") + e.what());
        }
        if (e.kind() == ErrorKind::ValidationError) {
            throw;
        }
        fail(e.what(), e.value());
    }
    const StateField initial = build_initial(s, problem.domain);
    for (const auto& f : initial) {
        if (f.size() > 0 && f.minCoeff() < 0.0) {
            fail("H3 violated: initial data must be nonnegative");
        }
    }
    try {
        validate_config(s.solver, problem);
    }
    catch (const Error& e) {
        fail(e.what(), e.value());
    }
}

std::string canonical_dump(const Scenario& scenario)
{
    return to_json(scenario).dump();
}

std::string sha256_hex(std::string_view bytes)
{
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
        throw Error(ErrorKind::IoError, "SHA-256 digest failed");
    }
    std::ostringstream os;
    for (unsigned int i = 0; i < length; ++i) {
        os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
    }
    return os.str();
}

std::string scenario_digest(const Scenario& scenario)
{
    return sha256_hex(canonical_dump(scenario));
}

std::optional<ControlRegion> build_region(const Scenario& s, const Domain& domain)
{
    if (!s.region) {
        return std::nullopt;
    }
    const RegionSpec& r = *s.region;
    return make_region(domain, r.shape, std::span<const double>(r.center.data(), 2),
                       std::span<const double>(r.size.data(), 2));
}

Problem build_problem(const Scenario& s)
{
    Problem p;
    const auto dim = static_cast<std::size_t>(s.domain.dimension);
    p.domain       = build_domain(s.domain.dimension, std::span<const double>(s.domain.extents.data(), dim),
                                  std::span<const int>(s.domain.nodes.data(), dim));
    p.diffusion    = assemble_robin_laplacian(p.domain, s.d1, s.alpha);
    p.kernel       = build_kernel(p.domain, s.kernel.family, s.kernel.params);
    p.model.tag    = s.tag;
    p.model.a11    = s.a11;
    p.model.a22    = s.a22;
    p.model.gamma  = s.gamma;
    p.model.capacity = capacity_field(s, p.domain);
    p.model.response = s.response;
    p.model.sir      = s.sir;
    p.model.validate();
    p.force  = s.force;
    p.season = s.season;
    p.region = build_region(s, p.domain);
    if (p.model.has_control() && p.model.gamma > 0.0 && !p.region) {
        throw Error(ErrorKind::ValidationError, "a positive gamma needs a control region");
    }
    return p;
}

StateField build_initial(const Scenario& s, const Domain& domain)
{
    const int fields = s.tag == ModelTag::SirKendall ? 3 : 2;
    StateField state(static_cast<std::size_t>(fields));
    const Index n = domain.size();

    if (s.initial.kind == InitialKind::FromFile) {
        const Vector flat = read_initial_file(s.base_dir / s.initial.path, n, fields);
        for (int f = 0; f < fields; ++f) {
            state[static_cast<std::size_t>(f)] = Vector(n);
            for (Index i = 0; i < n; ++i) {
                state[static_cast<std::size_t>(f)][i] = flat[i * fields + f];
            }
        }
        return state;
    }
    if (static_cast<int>(s.initial.values.size()) != fields) {
        throw Error(ErrorKind::ValidationError, "initial data needs one value per field (" +
                                                    std::to_string(fields) + ")");
    }
    for (int f = 0; f < fields; ++f) {
        const double v = s.initial.values[static_cast<std::size_t>(f)];
        Vector field(n);
        for (Index i = 0; i < n; ++i) {
            if (s.initial.kind == InitialKind::Constant) {
                field[i] = v;
                continue;
            }
            const Point& x = domain.coordinates[static_cast<std::size_t>(i)];
            double r2      = 0.0;
            for (int a = 0; a < domain.dimension; ++a) {
                const double d = x[static_cast<std::size_t>(a)] - s.initial.center[static_cast<std::size_t>(a)];
                r2 += d * d;
            }
            field[i] = v * std::exp(-r2 / (2.0 * s.initial.width * s.initial.width));
        }
        state[static_cast<std::size_t>(f)] = std::move(field);
    }
    return state;
}

} // namespace epiregion
