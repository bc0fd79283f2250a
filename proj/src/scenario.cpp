#include "ftdkf/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ftdkf/error.hpp"

namespace ftdkf {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& what) {
    throw ValidationError(field + ": " + what);
}

const json& member(const json& obj, const std::string& key, const std::string& path) {
    const std::string field = path.empty() ? key : path + "." + key;
    if (!obj.is_object()) fail(path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) fail(field, "missing");
    return *it;
}

const json* optional_member(const json& obj, const std::string& key) {
    auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

double number(const json& v, const std::string& field) {
    if (!v.is_number()) fail(field, "expected a number");
    return v.get<double>();
}

std::int64_t integer(const json& v, const std::string& field) {
    if (!v.is_number_integer()) fail(field, "expected an integer");
    return v.get<std::int64_t>();
}

Mat matrix(const json& v, const std::string& field) {
    if (!v.is_array() || v.empty()) fail(field, "expected a non-empty array of rows");
    // A flat array is a single row.
    const bool flat = !v.front().is_array();
    const auto rows = flat ? 1 : static_cast<Eigen::Index>(v.size());
    const auto cols = static_cast<Eigen::Index>(flat ? v.size() : v.front().size());
    if (rows > kMaxDim || cols > kMaxDim || cols == 0) fail(field, "matrix dimensions must lie in 1..12");
    Mat m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const json& row = flat ? v : v[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) fail(field, "ragged matrix rows");
        for (Eigen::Index c = 0; c < cols; ++c) {
            m(r, c) = number(row[static_cast<std::size_t>(c)], field);
        }
    }
    return m;
}

// A number means that multiple of the identity.
Mat square_matrix(const json& v, int dim, const std::string& field) {
    if (v.is_number()) return v.get<double>() * identity(dim);
    Mat m = matrix(v, field);
    if (m.rows() != dim || m.cols() != dim) {
        fail(field, "expected a " + std::to_string(dim) + "x" + std::to_string(dim) + " matrix");
    }
    return m;
}

Vec vector(const json& v, int dim, const std::string& field) {
    if (!v.is_array() || static_cast<int>(v.size()) != dim) {
        fail(field, "expected an array of length " + std::to_string(dim));
    }
    Vec out(dim);
    for (int i = 0; i < dim; ++i) out(i) = number(v[static_cast<std::size_t>(i)], field);
    return out;
}

SystemModel parse_system(const json& j) {
    const std::string p = "system";
    const auto dim = integer(member(j, "state_dim", p), "system.state_dim");
    if (dim < 1 || dim > kMaxDim) fail("system.state_dim", "must lie in 1..12");
    const int n = static_cast<int>(dim);

    const json& tr = member(j, "transition", p);
    Mat phi;
    if (tr.is_object()) {
        const double period = number(member(tr, "constant_acceleration_period", "system.transition"),
                                     "system.transition.constant_acceleration_period");
        if (!(period > 0.0)) fail("system.transition.constant_acceleration_period", "must be positive");
        if (n != 3) fail("system.transition", "constant-acceleration model needs state_dim 3");
        phi = constant_acceleration_transition(period);
    } else {
        phi = square_matrix(tr, n, "system.transition");
    }
    SystemModel m = SystemModel::constant(phi, square_matrix(member(j, "process_cov", p), n, "system.process_cov"),
                                          vector(member(j, "init_mean", p), n, "system.init_mean"),
                                          square_matrix(member(j, "init_cov", p), n, "system.init_cov"));
    return m;
}

std::vector<SensorModel> parse_sensors(const json& j, int state_dim) {
    if (!j.is_array() || j.empty()) fail("sensors", "expected a non-empty array");
    std::vector<SensorModel> out;
    std::set<std::int64_t> ids;
    for (std::size_t idx = 0; idx < j.size(); ++idx) {
        const std::string p = "sensors[" + std::to_string(idx) + "]";
        const json& s = j[idx];
        const auto id = integer(member(s, "id", p), p + ".id");
        if (!ids.insert(id).second) fail(p + ".id", "duplicate sensor id");
        const Mat h = matrix(member(s, "obs", p), p + ".obs");
        if (h.cols() != state_dim) fail(p + ".obs", "needs state_dim columns");
        const Mat r = square_matrix(member(s, "meas_cov", p), static_cast<int>(h.rows()), p + ".meas_cov");
        out.push_back(SensorModel::constant(static_cast<int>(id), h, r));
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.sensor_id < b.sensor_id; });
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (out[i].sensor_id != static_cast<int>(i) + 1) fail("sensors", "ids must be exactly 1..n");
    }
    return out;
}

Topology parse_topology(const json& j, std::vector<std::string>& warnings) {
    const std::string p = "topology";
    const auto nodes = integer(member(j, "nodes", p), "topology.nodes");
    if (nodes < 1) fail("topology.nodes", "must be >= 1");
    bool directed = false;
    if (const json* d = optional_member(j, "directed")) {
        if (!d->is_boolean()) fail("topology.directed", "expected true or false");
        directed = d->get<bool>();
    }
    const json& edges_json = member(j, "edges", p);
    if (!edges_json.is_array()) fail("topology.edges", "expected an array of [from, to] pairs");
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (std::size_t idx = 0; idx < edges_json.size(); ++idx) {
        const std::string f = "topology.edges[" + std::to_string(idx) + "]";
        const json& e = edges_json[idx];
        if (!e.is_array() || e.size() != 2) fail(f, "expected [from, to]");
        const auto a = integer(e[0], f);
        const auto b = integer(e[1], f);
        if (a < 1 || b < 1 || a > nodes || b > nodes) fail(f, "node id outside 1..nodes");
        edges.emplace_back(static_cast<NodeId>(a - 1), static_cast<NodeId>(b - 1));
    }
    Topology topo;
    try {
        topo = Topology(static_cast<int>(nodes), directed, std::move(edges));
    } catch (const ValidationError& e) {
        fail("topology.edges", e.what());
    }

    const auto cls = classify(topo);
    if (cls.kind == TopologyKind::Invalid) {
        fail("topology", directed ? "digraph is not strongly connected" : "graph is not connected");
    }
    if (cls.kind == TopologyKind::ConnectedUndirected) {
        warnings.emplace_back("topology has cycles: consensus aggregates may double count");
    }

    const json* w = optional_member(j, "weights");
    std::string mode = "uniform";
    if (w && w->is_string()) mode = w->get<std::string>();
    try {
        if (w && w->is_array()) {
            DynMat m(nodes, nodes);
            if (w->size() != static_cast<std::size_t>(nodes)) fail("topology.weights", "expected nodes x nodes");
            for (std::size_t r = 0; r < w->size(); ++r) {
                const json& row = (*w)[r];
                if (!row.is_array() || row.size() != static_cast<std::size_t>(nodes)) {
                    fail("topology.weights", "expected nodes x nodes");
                }
                for (std::size_t c = 0; c < row.size(); ++c) {
                    m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = number(row[c], "topology.weights");
                }
            }
            return topo.with_weights(m);
        }
        if (mode == "uniform") return topo.with_weights(default_weights(topo));
        if (mode == "unit") return topo;
    } catch (const ValidationError& e) {
        const std::string msg = e.what();
        if (msg.rfind("topology", 0) == 0) throw;
        fail("topology.weights", msg);
    }
    fail("topology.weights", "expected \"uniform\", \"unit\" or a matrix");
}

DelayProfile parse_delays(const json& j, int& buffer_length) {
    const std::string p = "delays";
    const auto d = integer(member(j, "max_delay", p), "delays.max_delay");
    if (d < 0) fail("delays.max_delay", "must be >= 0");
    if (d > 64) fail("delays.max_delay", "must be <= 64");
    DelayProfile profile;
    const json* dist = optional_member(j, "distribution");
    try {
        if (!dist || (dist->is_string() && dist->get<std::string>() == "uniform")) {
            profile = DelayProfile::uniform(static_cast<int>(d));
        } else if (dist->is_array()) {
            std::vector<double> probs;
            for (const auto& v : *dist) probs.push_back(number(v, "delays.distribution"));
            profile = DelayProfile(static_cast<int>(d), std::move(probs));
        } else {
            fail("delays.distribution", "expected \"uniform\" or a probability list");
        }
    } catch (const ValidationError& e) {
        const std::string msg = e.what();
        if (msg.rfind("delays", 0) == 0) throw;
        fail("delays.distribution", msg);
    }
    buffer_length = 0;
    if (const json* b = optional_member(j, "buffer_length")) {
        const auto len = integer(*b, "delays.buffer_length");
        if (len < d + 1) fail("delays.buffer_length", "must be >= max_delay + 1");
        buffer_length = static_cast<int>(len);
    }
    return profile;
}

void parse_run(const json& j, Scenario& sc) {
    const std::string p = "run";
    const auto horizon = integer(member(j, "horizon", p), "run.horizon");
    if (horizon < 1) fail("run.horizon", "must be >= 1");
    sc.horizon = static_cast<int>(horizon);
    if (const json* r = optional_member(j, "monte_carlo_runs")) {
        const auto runs = integer(*r, "run.monte_carlo_runs");
        if (runs < 1) fail("run.monte_carlo_runs", "must be >= 1");
        sc.runs = static_cast<int>(runs);
    }
    if (const json* f = optional_member(j, "fusion")) {
        if (!f->is_string()) fail("run.fusion", "expected a string");
        try {
            sc.fusion = parse_fusion_mode(f->get<std::string>());
        } catch (const ValidationError& e) {
            fail("run.fusion", e.what());
        }
    }
    if (const json* e = optional_member(j, "estimators")) {
        if (!e->is_array() || e->empty()) fail("run.estimators", "expected a non-empty array");
        std::string joined;
        for (const auto& v : *e) {
            if (!v.is_string()) fail("run.estimators", "expected strings");
            joined += (joined.empty() ? "" : ",") + v.get<std::string>();
        }
        try {
            sc.estimators = parse_estimator_list(joined);
        } catch (const ValidationError& ex) {
            fail("run.estimators", ex.what());
        }
    }
    if (const json* s = optional_member(j, "seed")) {
        if (!s->is_number_unsigned() && !(s->is_number_integer() && s->get<std::int64_t>() >= 0)) {
            fail("run.seed", "expected a nonnegative integer");
        }
        sc.seed = s->get<std::uint64_t>();
    }
    if (const json* w = optional_member(j, "workers")) {
        const auto workers = integer(*w, "run.workers");
        if (workers < 0) fail("run.workers", "must be >= 0");
        sc.workers = static_cast<int>(workers);
    }
}

}  // namespace

std::string to_string(EstimatorKind kind) {
    switch (kind) {
        case EstimatorKind::Ftdkf: return "ftdkf";
        case EstimatorKind::DropLate: return "droplate";
        case EstimatorKind::Centralized: return "centralized";
    }
    return "ftdkf";
}

EstimatorKind parse_estimator(const std::string& text) {
    if (text == "ftdkf") return EstimatorKind::Ftdkf;
    if (text == "droplate") return EstimatorKind::DropLate;
    if (text == "centralized") return EstimatorKind::Centralized;
    throw ValidationError("unknown estimator \"" + text + "\" (expected ftdkf, droplate or centralized)");
}

std::vector<EstimatorKind> parse_estimator_list(const std::string& text) {
    std::vector<EstimatorKind> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto kind = parse_estimator(item);
        if (std::find(out.begin(), out.end(), kind) != out.end()) {
            throw ValidationError("estimator \"" + item + "\" listed twice");
        }
        out.push_back(kind);
    }
    if (out.empty()) throw ValidationError("no estimators selected");
    return out;
}

Scenario Scenario::with_max_delay(int d) const {
    Scenario out = *this;
    out.delays = DelayProfile::uniform(d);
    out.buffer_length = 0;
    return out;
}

Scenario parse_scenario(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("parse error: ") + e.what());
    }
    if (!doc.is_object()) throw ValidationError("scenario: expected a JSON object");

    Scenario sc;
    if (const json* n = optional_member(doc, "name")) {
        if (!n->is_string()) fail("name", "expected a string");
        sc.name = n->get<std::string>();
    } else {
        sc.name = "scenario";
    }
    sc.system = parse_system(member(doc, "system", ""));
    sc.sensors = parse_sensors(member(doc, "sensors", ""), sc.system.state_dim);
    sc.topology = parse_topology(member(doc, "topology", ""), sc.warnings);
    if (sc.topology.node_count() != static_cast<int>(sc.sensors.size())) {
        fail("topology.nodes", "must equal the number of sensors");
    }
    sc.delays = parse_delays(member(doc, "delays", ""), sc.buffer_length);
    parse_run(member(doc, "run", ""), sc);
    validate_model(sc.system, sc.sensors).throw_if_invalid();
    return sc;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open scenario file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

}  // namespace ftdkf
