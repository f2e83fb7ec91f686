#pragma once

// JSON and CSV serialization for bundles, graphs, generator configs, sweep
// specs and sweep results.

#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "acnet/causal_graph.hpp"
#include "acnet/ci_test.hpp"
#include "acnet/evaluation.hpp"
#include "acnet/event_sequence.hpp"
#include "acnet/generator.hpp"

namespace acnet::io {

using json = nlohmann::json;

class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::ios_base::failure("cannot open '" + path + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::ios_base::failure("cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw std::ios_base::failure("write to '" + path + "' failed");
}

inline json parse_json(const std::string& text, const std::string& what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw FormatError(what + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// Sequence bundles

inline json to_json(const SequenceBundle& b) {
    auto seqs = [](const std::vector<BinaryEventSequence>& v) {
        json arr = json::array();
        for (const auto& s : v) {
            json values = json::array();
            for (auto x : s.values) values.push_back(static_cast<int>(x));
            arr.push_back({{"name", s.name}, {"values", std::move(values)}});
        }
        return arr;
    };
    return {{"grid", {{"step_minutes", b.grid.step_minutes}, {"T", b.grid.horizon}}},
            {"situations", seqs(b.situations)},
            {"emotions", seqs(b.emotions)}};
}

/// Structural problems raise FormatError; out-of-range values are kept (as a
/// byte) for validate_bundle to report with their index.
inline SequenceBundle bundle_from_json(const json& j) {
    try {
        SequenceBundle b;
        const auto& grid = j.at("grid");
        b.grid.step_minutes = grid.at("step_minutes").get<int>();
        b.grid.horizon = grid.at("T").get<std::size_t>();
        auto read = [](const json& arr, SequenceKind kind) {
            std::vector<BinaryEventSequence> out;
            for (const auto& s : arr) {
                BinaryEventSequence seq;
                seq.name = s.at("name").get<std::string>();
                seq.kind = kind;
                for (const auto& v : s.at("values")) {
                    const auto x = v.get<long long>();
                    seq.values.push_back(x >= 0 && x <= 255 ? static_cast<std::uint8_t>(x) : std::uint8_t{255});
                }
                out.push_back(std::move(seq));
            }
            return out;
        };
        b.situations = read(j.value("situations", json::array()), SequenceKind::Situation);
        b.emotions = read(j.value("emotions", json::array()), SequenceKind::Emotion);
        return b;
    } catch (const json::exception& e) {
        throw FormatError(std::string("malformed bundle: ") + e.what());
    }
}

/// One column per sequence; header names carry an "S:" or "E:" prefix.
inline SequenceBundle bundle_from_csv(const std::string& text, int step_minutes = 10) {
    std::istringstream in(text);
    std::string line;
    auto split = [](const std::string& l) {
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(l);
        while (std::getline(ls, cell, ',')) {
            while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
            while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
            cells.push_back(cell);
        }
        return cells;
    };
    if (!std::getline(in, line)) throw FormatError("CSV bundle: missing header row");
    const auto header = split(line);
    SequenceBundle b;
    b.grid.step_minutes = step_minutes;
    std::vector<BinaryEventSequence*> columns;
    // Reserve first so the column pointers stay valid.
    b.situations.reserve(header.size());
    b.emotions.reserve(header.size());
    for (const auto& h : header) {
        if (h.size() < 3 || h[1] != ':' || (h[0] != 'S' && h[0] != 'E'))
            throw FormatError("CSV bundle: column '" + h + "' must be prefixed with S: or E:");
        auto& target = h[0] == 'S' ? b.situations : b.emotions;
        target.push_back({h.substr(2), h[0] == 'S' ? SequenceKind::Situation : SequenceKind::Emotion, {}});
        columns.push_back(&target.back());
    }
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        ++row;
        const auto cells = split(line);
        if (cells.size() != columns.size())
            throw FormatError("CSV bundle: row " + std::to_string(row) + " has " + std::to_string(cells.size()) +
                              " cells, expected " + std::to_string(columns.size()));
        for (std::size_t c = 0; c < cells.size(); ++c) {
            int v = 0;
            try {
                v = std::stoi(cells[c]);
            } catch (const std::exception&) {
                throw FormatError("CSV bundle: row " + std::to_string(row) + " column " + std::to_string(c + 1) +
                                  " is not an integer");
            }
            columns[c]->values.push_back(v >= 0 && v <= 255 ? static_cast<std::uint8_t>(v) : std::uint8_t{255});
        }
    }
    b.grid.horizon = row;
    return b;
}

inline SequenceBundle read_bundle(const std::string& path) {
    const auto text = read_text(path);
    if (path.size() >= 4 && path.substr(path.size() - 4) == ".csv") return bundle_from_csv(text);
    return bundle_from_json(parse_json(text, path));
}

// ---------------------------------------------------------------------------
// Graphs

inline SequenceKind sequence_kind_from_string(const std::string& s) {
    if (s == "situation") return SequenceKind::Situation;
    if (s == "emotion") return SequenceKind::Emotion;
    throw FormatError("unknown node kind '" + s + "'");
}

inline json to_json(const CausalGraph& g) {
    json nodes = json::array(), edges = json::array();
    for (const auto& n : g.nodes()) nodes.push_back({{"name", n.name}, {"kind", to_string(n.kind)}});
    for (const auto& e : g.edges()) {
        json je = {{"from", e.from}, {"to", e.to}, {"kind", to_string(e.kind)}};
        if (e.latent_id) je["latent_id"] = *e.latent_id;
        if (e.s1) je["s1"] = *e.s1;
        if (e.s2) je["s2"] = *e.s2;
        if (e.eta_c) je["eta_c"] = *e.eta_c;
        if (e.eta_m) je["eta_m"] = *e.eta_m;
        edges.push_back(std::move(je));
    }
    return {{"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
}

inline CausalGraph graph_from_json(const json& j) {
    try {
        CausalGraph g;
        for (const auto& n : j.at("nodes"))
            g.add_node(n.at("name").get<std::string>(), sequence_kind_from_string(n.at("kind").get<std::string>()));
        for (const auto& je : j.at("edges")) {
            GraphEdge e;
            e.from = je.at("from").get<std::string>();
            e.to = je.at("to").get<std::string>();
            e.kind = edge_kind_from_string(je.at("kind").get<std::string>());
            if (je.contains("latent_id")) e.latent_id = je["latent_id"].get<std::string>();
            if (je.contains("s1")) e.s1 = je["s1"].get<bool>();
            if (je.contains("s2")) e.s2 = je["s2"].get<bool>();
            if (je.contains("eta_c")) e.eta_c = je["eta_c"].get<int>();
            if (je.contains("eta_m")) e.eta_m = je["eta_m"].get<int>();
            g.add_edge(std::move(e));
        }
        return g;
    } catch (const json::exception& e) {
        throw FormatError(std::string("malformed graph: ") + e.what());
    }
}

inline json to_json(const GroundTruthGraph& t) {
    json j = to_json(t.graph);
    json latents = json::array();
    for (const auto& h : t.latents) latents.push_back({{"id", h.id}, {"situation", h.situation}, {"emotion", h.emotion}});
    j["latents"] = std::move(latents);
    return j;
}

inline GroundTruthGraph truth_from_json(const json& j) {
    GroundTruthGraph t;
    t.graph = graph_from_json(j);
    try {
        for (const auto& h : j.value("latents", json::array()))
            t.latents.push_back({h.at("id").get<std::string>(), h.at("situation").get<std::string>(),
                                 h.at("emotion").get<std::string>()});
    } catch (const json::exception& e) {
        throw FormatError(std::string("malformed latent list: ") + e.what());
    }
    return t;
}

// ---------------------------------------------------------------------------
// Generator config and sweep spec

inline const char* to_string(LagModel m) { return m == LagModel::Rate ? "rate" : "mean_lag"; }
inline const char* to_string(LatentMode m) { return m == LatentMode::Persistent ? "persistent" : "instantaneous"; }

inline LagModel lag_model_from_string(const std::string& s) {
    if (s == "rate") return LagModel::Rate;
    if (s == "mean_lag") return LagModel::MeanLag;
    throw ConfigError("lag_model", "expected 'rate' or 'mean_lag', got '" + s + "'");
}

inline LatentMode latent_mode_from_string(const std::string& s) {
    if (s == "persistent") return LatentMode::Persistent;
    if (s == "instantaneous") return LatentMode::Instantaneous;
    throw ConfigError("latent_mode", "expected 'persistent' or 'instantaneous', got '" + s + "'");
}

inline json to_json(const GenConfig& c) {
    return {{"n_situations", c.n_situations}, {"n_emotions", c.n_emotions},
            {"epsilon", c.epsilon},           {"eta", c.eta},
            {"d_g", c.d_g},                   {"n_c", c.n_c},
            {"days", c.days},                 {"step_minutes", c.step_minutes},
            {"seed", c.seed},                 {"effect_background", c.effect_background},
            {"lag_model", to_string(c.lag_model)}, {"latent_mode", to_string(c.latent_mode)}};
}

namespace detail {

template <typename T>
void read_field(const json& j, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(key, "has the wrong type");
    }
}

inline void reject_unknown(const json& j, std::initializer_list<const char*> known, const std::string& prefix = "") {
    for (const auto& item : j.items()) {
        const auto& key = item.key();
        if (std::none_of(known.begin(), known.end(), [&](const char* k) { return key == k; }))
            throw ConfigError(prefix + key, "unknown field");
    }
}

}  // namespace detail

/// Missing keys keep the values already in `base`.
inline GenConfig gen_config_from_json(const json& j, GenConfig base = {}) {
    if (!j.is_object()) throw ConfigError("config", "expected a JSON object");
    detail::reject_unknown(j, {"n_situations", "n_emotions", "epsilon", "eta", "d_g", "n_c", "days", "step_minutes",
                               "seed", "effect_background", "lag_model", "latent_mode"});
    detail::read_field(j, "n_situations", base.n_situations);
    detail::read_field(j, "n_emotions", base.n_emotions);
    detail::read_field(j, "epsilon", base.epsilon);
    detail::read_field(j, "eta", base.eta);
    detail::read_field(j, "d_g", base.d_g);
    detail::read_field(j, "n_c", base.n_c);
    detail::read_field(j, "days", base.days);
    detail::read_field(j, "step_minutes", base.step_minutes);
    detail::read_field(j, "seed", base.seed);
    detail::read_field(j, "effect_background", base.effect_background);
    std::string s;
    if (j.contains("lag_model")) {
        detail::read_field(j, "lag_model", s);
        base.lag_model = lag_model_from_string(s);
    }
    if (j.contains("latent_mode")) {
        detail::read_field(j, "latent_mode", s);
        base.latent_mode = latent_mode_from_string(s);
    }
    return base;
}

/// {"base": {GenConfig}, "epsilon": [...], "eta": [...], "n_c": [...],
///  "trials": n, "methods": ["acnet", "te", "gc"], "alpha": a, "eta_max": k,
///  "te": {"k", "l", "permutations"}, "gc_lag": p}
inline SweepSpec sweep_spec_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("spec", "expected a JSON object");
    detail::reject_unknown(j, {"base", "epsilon", "eta", "n_c", "trials", "methods", "alpha", "eta_max", "te", "gc_lag"});
    SweepSpec spec;
    if (j.contains("base")) spec.base = gen_config_from_json(j["base"]);
    detail::read_field(j, "epsilon", spec.epsilons);
    detail::read_field(j, "eta", spec.etas);
    detail::read_field(j, "n_c", spec.n_cs);
    detail::read_field(j, "trials", spec.trials);
    if (j.contains("methods")) {
        std::vector<std::string> names;
        detail::read_field(j, "methods", names);
        spec.methods.clear();
        for (const auto& n : names) {
            try {
                spec.methods.push_back(method_from_string(n));
            } catch (const std::invalid_argument& e) {
                throw ConfigError("methods", e.what());
            }
        }
    }
    detail::read_field(j, "alpha", spec.learner.alpha);
    spec.te.alpha = spec.learner.alpha;
    spec.gc_alpha = spec.learner.alpha;
    detail::read_field(j, "eta_max", spec.learner.eta_max);
    if (j.contains("te")) {
        if (!j["te"].is_object()) throw ConfigError("te", "expected a JSON object");
        detail::reject_unknown(j["te"], {"k", "l", "permutations"}, "te.");
        detail::read_field(j["te"], "k", spec.te.k);
        detail::read_field(j["te"], "l", spec.te.l);
        detail::read_field(j["te"], "permutations", spec.te.permutations);
    }
    if (j.contains("gc_lag")) {
        int lag = 0;
        detail::read_field(j, "gc_lag", lag);
        spec.gc_lag = lag;
    }
    return spec;
}

inline json to_json(const SweepSpec& s) {
    std::vector<std::string> methods;
    for (auto m : s.methods) methods.emplace_back(to_string(m));
    json j = {{"base", to_json(s.base)},
              {"epsilon", s.epsilons},
              {"eta", s.etas},
              {"n_c", s.n_cs},
              {"trials", s.trials},
              {"methods", methods},
              {"alpha", s.learner.alpha},
              {"eta_max", s.learner.eta_max},
              {"te", {{"k", s.te.k}, {"l", s.te.l}, {"permutations", s.te.permutations}}}};
    if (s.gc_lag) j["gc_lag"] = *s.gc_lag;
    return j;
}

// ---------------------------------------------------------------------------
// Results

inline std::string format_number(double v) {
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

inline std::string sweep_csv(const SweepResult& r) {
    std::string out = "epsilon,eta,n_c,method,metric,mean,std,n_trials\n";
    const auto& names = metric_names();
    for (const auto& c : r.cells)
        for (std::size_t k = 0; k < names.size(); ++k) {
            out += format_number(c.cell.epsilon) + "," + format_number(c.cell.eta) + "," + std::to_string(c.cell.n_c) +
                   "," + to_string(c.method) + "," + names[k] + "," + format_number(c.metrics[k].mean) + "," +
                   format_number(c.metrics[k].std) + "," + std::to_string(c.n_trials) + "\n";
        }
    return out;
}

inline json to_json(const SweepResult& r) {
    json cells = json::array();
    const auto& names = metric_names();
    for (const auto& c : r.cells) {
        json metrics = json::object();
        for (std::size_t k = 0; k < names.size(); ++k)
            metrics[names[k]] = {{"mean", c.metrics[k].mean}, {"std", c.metrics[k].std}};
        cells.push_back({{"epsilon", c.cell.epsilon},
                         {"eta", c.cell.eta},
                         {"n_c", c.cell.n_c},
                         {"method", to_string(c.method)},
                         {"n_trials", c.n_trials},
                         {"n_failed", c.n_failed},
                         {"metrics", std::move(metrics)}});
    }
    json failures = json::array();
    for (const auto& t : r.trials)
        if (!t.score) failures.push_back({{"cell", t.cell}, {"trial", t.trial}, {"method", to_string(t.method)},
                                          {"error", t.error}});
    return {{"cells", std::move(cells)}, {"failures", std::move(failures)}};
}

inline json to_json(const CiVerdict& v) {
    return {{"g2", v.g2}, {"df", v.df}, {"p_value", v.p_value}, {"independent", v.independent}};
}

}  // namespace acnet::io
