// acnet: command-line front end.
//
// Exit codes: 0 success, 2 usage or configuration error, 3 invalid input data,
// 4 numerical failure. Errors are reported as one JSON object on stderr.

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "acnet/acnet.hpp"
#include "acnet/io.hpp"

namespace fs = std::filesystem;
using acnet::io::json;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

[[noreturn]] void usage(const std::string& msg) { throw UsageError(msg); }

fs::path output_dir(const std::string& dir) {
    const fs::path p(dir);
    if (!fs::is_directory(p)) usage("output directory '" + dir + "' does not exist");
    return p;
}

class Manifest {
public:
    explicit Manifest(std::string subcommand) : start_(std::chrono::steady_clock::now()) {
        doc_ = {{"subcommand", std::move(subcommand)}, {"version", acnet::kVersion}, {"inputs", json::array()},
                {"outputs", json::array()}, {"parameters", json::object()}};
    }
    json& parameters() { return doc_["parameters"]; }
    void seed(std::uint64_t s) { doc_["seed"] = s; }
    void input(const std::string& path) { doc_["inputs"].push_back(path); }

    void write(const fs::path& path, const std::string& text) {
        acnet::io::write_text(path.string(), text);
        doc_["outputs"].push_back(path.string());
    }

    void finish(const fs::path& dir) {
        const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start_;
        doc_["duration_seconds"] = elapsed.count();
        const auto path = dir / ("manifest-" + doc_["subcommand"].get<std::string>() + ".json");
        acnet::io::write_text(path.string(), doc_.dump(2) + "\n");
    }

private:
    json doc_;
    std::chrono::steady_clock::time_point start_;
};

acnet::SequenceBundle load_bundle(const std::string& path) {
    auto bundle = acnet::io::read_bundle(path);
    acnet::require_valid(bundle);
    return bundle;
}

// ---------------------------------------------------------------------------

struct GenerateArgs {
    std::string out;
    std::string config;
    std::optional<int> n_situations, n_emotions, nc, days, step;
    std::optional<double> epsilon, eta, dg;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> lag_model, latent_mode;
};

int cmd_generate(const GenerateArgs& a) {
    acnet::GenConfig cfg;
    if (!a.config.empty())
        cfg = acnet::io::gen_config_from_json(acnet::io::parse_json(acnet::io::read_text(a.config), a.config));
    if (a.n_situations) cfg.n_situations = *a.n_situations;
    if (a.n_emotions) cfg.n_emotions = *a.n_emotions;
    if (a.epsilon) cfg.epsilon = *a.epsilon;
    if (a.eta) cfg.eta = *a.eta;
    if (a.dg) cfg.d_g = *a.dg;
    if (a.nc) cfg.n_c = *a.nc;
    if (a.days) cfg.days = *a.days;
    if (a.step) cfg.step_minutes = *a.step;
    if (a.seed) cfg.seed = *a.seed;
    if (a.lag_model) cfg.lag_model = acnet::io::lag_model_from_string(*a.lag_model);
    if (a.latent_mode) cfg.latent_mode = acnet::io::latent_mode_from_string(*a.latent_mode);
    cfg.validate();
    const auto dir = output_dir(a.out);

    Manifest manifest("generate");
    manifest.parameters() = acnet::io::to_json(cfg);
    manifest.seed(cfg.seed);
    if (!a.config.empty()) manifest.input(a.config);

    const auto [bundle, truth] = acnet::gen_dataset(cfg);
    manifest.write(dir / "bundle.json", acnet::io::to_json(bundle).dump() + "\n");
    manifest.write(dir / "truth.json", acnet::io::to_json(truth).dump(2) + "\n");
    manifest.write(dir / "truth.dot", truth.graph.to_dot());
    manifest.finish(dir);
    std::cout << "generated " << bundle.situations.size() << " situations and " << bundle.emotions.size()
              << " emotions over " << bundle.grid.horizon << " steps; " << truth.graph.edges().size()
              << " planted edges\n";
    return 0;
}

// ---------------------------------------------------------------------------

struct DiscoverArgs {
    std::string bundle, out;
    double alpha = 0.05;
    int eta_max = acnet::LearnerOptions{}.eta_max;
};

void print_edges(const acnet::CausalGraph& g) {
    if (g.edges().empty()) {
        std::cout << "no edges\n";
        return;
    }
    std::printf("%-16s %-16s %-8s %-4s %-4s %-5s %-5s\n", "from", "to", "kind", "S1", "S2", "eta_c", "eta_m");
    auto opt = [](const std::optional<int>& v) { return v ? std::to_string(*v) : std::string("-"); };
    auto flag = [](const std::optional<bool>& v) { return v ? (*v ? "yes" : "no") : "-"; };
    for (const auto& e : g.edges())
        std::printf("%-16s %-16s %-8s %-4s %-4s %-5s %-5s\n", e.from.c_str(), e.to.c_str(), acnet::to_string(e.kind),
                    flag(e.s1), flag(e.s2), opt(e.eta_c).c_str(), opt(e.eta_m).c_str());
}

int cmd_discover(const DiscoverArgs& a) {
    acnet::check_alpha(a.alpha);
    if (a.eta_max < 1 || a.eta_max > acnet::kMaxEtaMax) usage("--eta-max must lie in [1, 8]");
    const auto dir = output_dir(a.out);
    const auto bundle = load_bundle(a.bundle);

    Manifest manifest("discover");
    manifest.parameters() = {{"alpha", a.alpha}, {"eta_max", a.eta_max}};
    manifest.seed(0);
    manifest.input(a.bundle);

    const auto report = acnet::learn_graph_report(bundle, {a.alpha, a.eta_max});
    json doc = acnet::io::to_json(report.graph);
    doc["notes"] = report.notes;
    manifest.write(dir / "graph.json", doc.dump(2) + "\n");
    manifest.write(dir / "graph.dot", report.graph.to_dot());
    manifest.finish(dir);
    print_edges(report.graph);
    for (const auto& n : report.notes) std::cout << "note: " << n << "\n";
    return 0;
}

// ---------------------------------------------------------------------------

struct BaselineArgs {
    std::string bundle, out, method = "gc";
    double alpha = 0.05;
    int lag = 1;
    int permutations = 200;
    int k = 1, l = 1;
    std::uint64_t seed = 1;
};

int cmd_baseline(const BaselineArgs& a) {
    if (!(a.alpha > 0.0 && a.alpha < 1.0)) usage("--alpha must lie in (0, 1)");
    const auto dir = output_dir(a.out);
    const auto bundle = load_bundle(a.bundle);

    Manifest manifest("baseline");
    manifest.input(a.bundle);
    manifest.seed(a.seed);
    json verdicts = json::array();
    auto record = [&](const acnet::BinaryEventSequence& c, const acnet::BinaryEventSequence& m,
                      const acnet::BaselineVerdict& v) {
        verdicts.push_back({{"from", c.name}, {"to", m.name}, {"direction", acnet::to_string(v.direction)},
                            {"statistic", v.statistic}, {"p_value", v.p_value},
                            {"reverse_statistic", v.reverse_statistic}, {"reverse_p_value", v.reverse_p_value},
                            {"degenerate", v.degenerate}});
        return v;
    };

    acnet::CausalGraph graph;
    if (a.method == "te") {
        const acnet::TeOptions opt{a.k, a.l, a.permutations, a.alpha};
        manifest.parameters() = {{"method", "te"}, {"alpha", a.alpha}, {"k", a.k}, {"l", a.l},
                                 {"permutations", a.permutations}};
        std::size_t pair = 0;
        graph = acnet::baseline_graph(bundle, [&](const auto& c, const auto& m) {
            acnet::Rng rng(acnet::derive_seed(a.seed, {pair++}));
            return record(c, m, acnet::te_direction(c.view(), m.view(), opt, rng));
        });
    } else if (a.method == "gc") {
        manifest.parameters() = {{"method", "gc"}, {"alpha", a.alpha}, {"lag", a.lag}};
        graph = acnet::baseline_graph(bundle, [&](const auto& c, const auto& m) {
            return record(c, m, acnet::granger(c.view(), m.view(), a.lag, a.alpha));
        });
    } else {
        usage("--method must be 'te' or 'gc'");
    }
    json doc = acnet::io::to_json(graph);
    doc["verdicts"] = std::move(verdicts);
    manifest.write(dir / ("baseline-" + a.method + ".json"), doc.dump(2) + "\n");
    manifest.write(dir / ("baseline-" + a.method + ".dot"), graph.to_dot());
    manifest.finish(dir);
    print_edges(graph);
    return 0;
}

// ---------------------------------------------------------------------------

struct SweepArgs {
    std::string spec, out;
    unsigned jobs = 1;
    std::optional<std::uint64_t> seed;
};

int cmd_sweep(const SweepArgs& a) {
    auto spec = acnet::io::sweep_spec_from_json(acnet::io::parse_json(acnet::io::read_text(a.spec), a.spec));
    if (a.seed) spec.base.seed = *a.seed;
    spec.validate();
    if (a.jobs < 1) usage("--jobs must be at least 1");
    const auto dir = output_dir(a.out);

    Manifest manifest("sweep");
    manifest.parameters() = acnet::io::to_json(spec);
    manifest.parameters()["jobs"] = a.jobs;
    manifest.seed(spec.base.seed);
    manifest.input(a.spec);

    const auto result = acnet::run_sweep(spec, a.jobs);
    manifest.write(dir / "results.csv", acnet::io::sweep_csv(result));
    manifest.write(dir / "results.json", acnet::io::to_json(result).dump(2) + "\n");
    manifest.finish(dir);
    for (const auto& c : result.cells)
        std::printf("eps=%-6g eta=%-4g n_c=%-3d %-6s P=%.3f R=%.3f F1=%.3f (%zu trials, %zu failed)\n",
                    c.cell.epsilon, c.cell.eta, c.cell.n_c, acnet::to_string(c.method), c.metrics[0].mean,
                    c.metrics[1].mean, c.metrics[2].mean, c.n_trials, c.n_failed);
    return 0;
}

// ---------------------------------------------------------------------------

struct CiArgs {
    std::string bundle, x, y, given, counts, dims;
    int lag = 1;
    int eta = 1;
    double alpha = 0.05;
};

std::vector<std::size_t> parse_dims(const std::string& s) {
    std::vector<std::size_t> dims;
    std::string cur;
    for (char ch : s + "x") {
        if (ch == 'x' || ch == 'X') {
            if (cur.empty()) usage("--dims must look like 2x2x4");
            dims.push_back(std::stoul(cur));
            cur.clear();
        } else if (std::isdigit(static_cast<unsigned char>(ch))) {
            cur += ch;
        } else {
            usage("--dims must look like 2x2x4");
        }
    }
    if (dims.size() != 3) usage("--dims needs three extents");
    return dims;
}

int cmd_ci(const CiArgs& a) {
    acnet::check_alpha(a.alpha);
    acnet::CiVerdict v;
    json out;
    if (!a.counts.empty()) {
        const auto d = parse_dims(a.dims.empty() ? "2x2x1" : a.dims);
        acnet::ContingencyTable3D table(d[0], d[1], d[2]);
        std::vector<std::uint64_t> counts;
        std::stringstream ss(a.counts);
        for (std::string cell; std::getline(ss, cell, ',');) {
            if (cell.empty() || cell.find_first_not_of("0123456789 ") != std::string::npos)
                usage("--counts entries must be non-negative integers");
            counts.push_back(std::stoull(cell));
        }
        if (counts.size() != d[0] * d[1] * d[2])
            usage("--counts has " + std::to_string(counts.size()) + " entries for a " + a.dims + " table");
        std::size_t idx = 0;
        for (std::size_t o = 0; o < d[0]; ++o)
            for (std::size_t p = 0; p < d[1]; ++p)
                for (std::size_t q = 0; q < d[2]; ++q) table.add(o, p, q, counts[idx++]);
        v = acnet::ci_test(table, a.alpha);
    } else {
        if (a.bundle.empty() || a.x.empty() || a.y.empty()) usage("ci needs --counts or a bundle with --x and --y");
        if (a.lag < 0 || a.lag > 1) usage("--lag must be 0 or 1");
        if (a.eta < 1 || a.eta > acnet::kMaxWindowDepth) usage("--eta must lie in [1, 16]");
        const auto bundle = load_bundle(a.bundle);
        auto find = [&](const std::string& name) {
            const auto* s = bundle.find(name);
            if (!s) usage("no sequence named '" + name + "'");
            return s->view();
        };
        const auto x = find(a.x), y = find(a.y);
        const std::size_t start = std::max<std::size_t>(static_cast<std::size_t>(a.lag), a.given.empty() ? 0U : a.eta);
        if (bundle.grid.horizon <= start) usage("bundle too short for the requested window");
        std::vector<std::uint8_t> xi, yj;
        std::vector<std::uint32_t> state;
        std::optional<std::span<const std::uint8_t>> z;
        if (!a.given.empty()) z = find(a.given);
        for (std::size_t t = start; t < bundle.grid.horizon; ++t) {
            xi.push_back(x[t - static_cast<std::size_t>(a.lag)]);
            yj.push_back(y[t]);
            state.push_back(z ? acnet::encode_window(*z, a.eta, t) : 0U);
        }
        v = acnet::ci_test(xi, yj, state, z ? (std::size_t{1} << a.eta) : 1, a.alpha);
        out["x"] = a.x;
        out["y"] = a.y;
        out["lag"] = a.lag;
        if (z) {
            out["given"] = a.given;
            out["eta"] = a.eta;
        }
    }
    out["verdict"] = acnet::io::to_json(v);
    out["alpha"] = a.alpha;
    std::cout << out.dump(2) << "\n";
    return 0;
}

// ---------------------------------------------------------------------------

int cmd_kernels_check(std::uint64_t seed, int samples) {
    if (samples < 1) usage("--samples must be positive");
    const auto report = acnet::kernels::run_kernel_checks(seed, samples);
    json checks = json::array();
    for (const auto& c : report.checks)
        checks.push_back({{"name", c.name}, {"passed", c.passed}, {"max_error", c.max_error}, {"detail", c.detail}});
    std::cout << json{{"passed", report.passed()}, {"seed", seed}, {"samples", samples}, {"checks", checks}}.dump(2)
              << "\n";
    return report.passed() ? 0 : kExitNumeric;
}

void report_error(int code, const std::string& type, const std::string& message, json extra = json::object()) {
    json err = {{"code", code}, {"type", type}, {"message", message}};
    for (auto& [k, v] : extra.items()) err[k] = v;
    std::cerr << json{{"error", err}}.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Asymmetric causal-direction learning over binary event sequences"};
    app.require_subcommand(1);
    app.set_version_flag("--version", acnet::kVersion);

    GenerateArgs gen;
    auto* generate = app.add_subcommand("generate", "Generate a synthetic bundle with a planted ground-truth graph");
    generate->add_option("--out", gen.out, "Existing output directory")->required();
    generate->add_option("--config", gen.config, "Generator config JSON; flags override its fields");
    generate->add_option("--n-situations", gen.n_situations, "Number of situation sequences");
    generate->add_option("--n-emotions", gen.n_emotions, "Number of emotion sequences");
    generate->add_option("--epsilon", gen.epsilon, "Root occurrences per day");
    generate->add_option("--eta", gen.eta, "Influence lag");
    generate->add_option("--dg", gen.dg, "Average in-degree of the emotion nodes");
    generate->add_option("--nc", gen.nc, "Confounded situation/emotion pairs");
    generate->add_option("--days", gen.days, "Length of the record in days");
    generate->add_option("--step", gen.step, "Grid step in minutes");
    generate->add_option("--seed", gen.seed, "Random seed");
    generate->add_option("--lag-model", gen.lag_model, "mean_lag or rate");
    generate->add_option("--latent-mode", gen.latent_mode, "persistent or instantaneous");

    DiscoverArgs disc;
    auto* discover = app.add_subcommand("discover", "Learn a causal graph from a bundle");
    discover->add_option("bundle", disc.bundle, "Bundle JSON or CSV")->required();
    discover->add_option("--out", disc.out, "Existing output directory")->required();
    discover->add_option("--alpha", disc.alpha, "Significance level")->capture_default_str();
    discover->add_option("--eta-max", disc.eta_max, "Largest conditioning window")->capture_default_str();

    BaselineArgs base;
    auto* baseline = app.add_subcommand("baseline", "Pairwise transfer entropy or Granger causality");
    baseline->add_option("bundle", base.bundle, "Bundle JSON or CSV")->required();
    baseline->add_option("--out", base.out, "Existing output directory")->required();
    baseline->add_option("--method", base.method, "te or gc")->capture_default_str();
    baseline->add_option("--alpha", base.alpha, "Significance level")->capture_default_str();
    baseline->add_option("--lag", base.lag, "Granger lag order")->capture_default_str();
    baseline->add_option("--permutations", base.permutations, "TE null size")->capture_default_str();
    baseline->add_option("--k", base.k, "TE target history")->capture_default_str();
    baseline->add_option("--l", base.l, "TE source history")->capture_default_str();
    baseline->add_option("--seed", base.seed, "Seed for the TE null")->capture_default_str();

    SweepArgs sw;
    auto* sweep = app.add_subcommand("sweep", "Run a parameter sweep");
    sweep->add_option("spec", sw.spec, "Sweep spec JSON")->required();
    sweep->add_option("--out", sw.out, "Existing output directory")->required();
    sweep->add_option("--jobs", sw.jobs, "Worker threads")->capture_default_str();
    sweep->add_option("--seed", sw.seed, "Override the base seed");

    CiArgs ci;
    auto* ci_cmd = app.add_subcommand("ci", "Run one G2 conditional-independence test");
    ci_cmd->add_option("bundle", ci.bundle, "Bundle JSON or CSV");
    ci_cmd->add_option("--x", ci.x, "First sequence");
    ci_cmd->add_option("--y", ci.y, "Second sequence");
    ci_cmd->add_option("--given", ci.given, "Conditioning sequence");
    ci_cmd->add_option("--lag", ci.lag, "Lag applied to --x (0 or 1)")->capture_default_str();
    ci_cmd->add_option("--eta", ci.eta, "Window of the conditioning sequence")->capture_default_str();
    ci_cmd->add_option("--counts", ci.counts, "Comma-separated cell counts, row-major (o, p, q)");
    ci_cmd->add_option("--dims", ci.dims, "Table extents, e.g. 2x2x4");
    ci_cmd->add_option("--alpha", ci.alpha, "Significance level")->capture_default_str();

    std::uint64_t kseed = 1;
    int ksamples = 100;
    auto* kernels_check = app.add_subcommand("kernels-check", "Run the affect-kernel self checks");
    auto* kernels = app.add_subcommand("kernels", "Affect-kernel utilities");
    auto* kernels_sub = kernels->add_subcommand("check", "Run the affect-kernel self checks");
    kernels->require_subcommand(1);
    for (auto* cmd : {kernels_check, kernels_sub}) {
        cmd->add_option("--seed", kseed, "Random seed")->capture_default_str();
        cmd->add_option("--samples", ksamples, "Random inputs per gradient check")->capture_default_str();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        report_error(kExitUsage, "usage", e.what());
        return kExitUsage;
    }

    try {
        if (*generate) return cmd_generate(gen);
        if (*discover) return cmd_discover(disc);
        if (*baseline) return cmd_baseline(base);
        if (*sweep) return cmd_sweep(sw);
        if (*ci_cmd) return cmd_ci(ci);
        if (*kernels_check || *kernels_sub) return cmd_kernels_check(kseed, ksamples);
    } catch (const UsageError& e) {
        report_error(kExitUsage, "usage", e.what());
        return kExitUsage;
    } catch (const acnet::ConfigError& e) {
        report_error(kExitUsage, "config", e.what(), {{"field", e.field()}});
        return kExitUsage;
    } catch (const acnet::ValidationError& e) {
        json issues = json::array();
        for (const auto& i : e.report().issues) {
            json j = {{"sequence", i.sequence}, {"message", i.message}};
            if (i.index) j["index"] = *i.index;
            issues.push_back(std::move(j));
        }
        report_error(kExitData, "validation", e.what(), {{"issues", issues}});
        return kExitData;
    } catch (const acnet::io::FormatError& e) {
        report_error(kExitData, "format", e.what());
        return kExitData;
    } catch (const acnet::GraphError& e) {
        report_error(kExitData, "graph", e.what());
        return kExitData;
    } catch (const std::ios_base::failure& e) {
        report_error(kExitUsage, "filesystem", e.what());
        return kExitUsage;
    } catch (const std::domain_error& e) {
        report_error(kExitNumeric, "numeric", e.what());
        return kExitNumeric;
    } catch (const std::invalid_argument& e) {
        report_error(kExitUsage, "argument", e.what());
        return kExitUsage;
    } catch (const std::exception& e) {
        report_error(kExitNumeric, "runtime", e.what());
        return kExitNumeric;
    }
    return kExitUsage;
}
