// Experiment runner: executes declarative configs, writes per-round CSV
// traces and JSON summaries, and reports bound/certificate verdicts.
//
//   ocol run <config.json>      single experiment
//   ocol suite <dir>            every *.json config in a directory
//   ocol certify <config.json>  only the relative-constant certificates
//
// Exit code 0 iff every bound report (resp. certificate) is satisfied.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "ocol/experiment.hpp"

namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ocol::ExperimentConfig load_config(const std::string& path, std::optional<std::uint64_t> seed,
                                   const std::string& out_dir) {
    ocol::ExperimentConfig cfg = ocol::parse_config(slurp(path));
    if (seed) {
        cfg.seed = *seed;
        cfg.stream.seed.reset();
    }
    auto join = [&](const std::string& p, const std::string& fallback) {
        fs::path base = p.empty() ? fs::path(fallback) : fs::path(p);
        if (base.is_absolute() || out_dir.empty()) return base.string();
        return (fs::path(out_dir) / base).string();
    };
    cfg.out_csv = join(cfg.out_csv, cfg.scenario + "_trace.csv");
    cfg.out_json = join(cfg.out_json, cfg.scenario + "_summary.json");
    return cfg;
}

void print_summary(const ocol::SummaryRecord& s) {
    std::cout << s.scenario << ": " << s.status;
    if (s.status != "ok") {
        std::cout << " (" << s.error << ")\n";
        return;
    }
    std::cout << "  regret=" << s.realized_regret;
    for (const auto& b : s.bounds)
        std::cout << "  " << ocol::bound_kind_name(b.kind) << "="
                  << (b.satisfied ? "satisfied" : "VIOLATED") << " (bound " << b.bound_value
                  << ")";
    for (const auto& c : s.certificates)
        std::cout << "  cert[" << c.type << "]=" << (c.valid ? "valid" : "INVALID");
    if (s.ledger_kind != "none")
        std::cout << "  ledger=" << (s.ledger.holds ? "holds" : "VIOLATED");
    std::cout << "\n  -> " << s.csv_path << ", " << s.json_path << "\n";
}

int run_one(const std::string& path, std::optional<std::uint64_t> seed,
            const std::string& out_dir) {
    ocol::ExperimentConfig cfg = load_config(path, seed, out_dir);
    for (const auto& w : cfg.warnings) std::cerr << "warning: " << w << "\n";
    ocol::SummaryRecord s = ocol::run_experiment(cfg);
    print_summary(s);
    return s.all_satisfied() ? 0 : 1;
}

int run_suite(const std::string& dir, std::optional<std::uint64_t> seed,
              const std::string& out_dir, unsigned jobs) {
    std::vector<std::string> paths;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".json")
            paths.push_back(e.path().string());
    std::sort(paths.begin(), paths.end());
    if (paths.empty()) {
        std::cerr << "suite: no *.json configs in " << dir << "\n";
        return 2;
    }

    std::vector<ocol::SummaryRecord> results(paths.size());
    if (jobs <= 1) {
        for (std::size_t i = 0; i < paths.size(); ++i)
            results[i] = ocol::run_experiment(load_config(paths[i], seed, out_dir));
    } else {
        std::vector<std::future<ocol::SummaryRecord>> futs;
        for (const auto& p : paths)
            futs.push_back(std::async(std::launch::async, [&, p] {
                return ocol::run_experiment(load_config(p, seed, out_dir));
            }));
        for (std::size_t i = 0; i < futs.size(); ++i) results[i] = futs[i].get();
    }

    bool ok = true;
    for (const auto& s : results) {
        print_summary(s);
        ok = ok && s.all_satisfied();
    }
    std::cout << (ok ? "suite: all satisfied\n" : "suite: FAILURES\n");
    return ok ? 0 : 1;
}

int run_certify(const std::string& path, std::optional<std::uint64_t> seed) {
    ocol::ExperimentConfig cfg = load_config(path, seed, "");
    if (cfg.certify.empty()) {
        std::cerr << "certify: config has no certificate requests\n";
        return 2;
    }
    // strip everything but the certificates: a short probe run evaluates them
    cfg.bounds.clear();
    ocol::ExperimentConfig probe = cfg;
    probe.T = std::min<long>(cfg.T, 16);
    auto tmp = fs::temp_directory_path();
    probe.out_csv = (tmp / (probe.scenario + "_certify_trace.csv")).string();
    probe.out_json = (tmp / (probe.scenario + "_certify_summary.json")).string();
    ocol::SummaryRecord s = ocol::run_experiment(probe);
    bool ok = s.status == "ok";
    for (const auto& c : s.certificates) {
        std::cout << c.type << " constant=" << c.constant << " samples=" << c.samples
                  << " max_violation=" << c.max_violation << " -> "
                  << (c.valid ? "valid" : "INVALID") << "\n";
        ok = ok && c.valid;
    }
    return ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"online convex optimization experiment runner"};
    app.require_subcommand(1);

    std::string config_path, suite_dir, out_dir;
    std::optional<std::uint64_t> seed;
    unsigned jobs = 1;

    auto add_seed = [&](CLI::App* cmd) {
        cmd->add_option("--seed", [&seed](const std::vector<std::string>& v) {
            seed = std::stoull(v.front());
            return true;
        }, "override the experiment seed");
    };

    CLI::App* run = app.add_subcommand("run", "run a single experiment config");
    run->add_option("config", config_path, "config JSON path")->required();
    run->add_option("--out", out_dir, "output directory");
    add_seed(run);

    CLI::App* suite = app.add_subcommand("suite", "run every config in a directory");
    suite->add_option("dir", suite_dir, "directory of *.json configs")->required();
    suite->add_option("--out", out_dir, "output directory");
    suite->add_option("--jobs", jobs, "parallel workers");
    add_seed(suite);

    CLI::App* certify = app.add_subcommand("certify", "run only the certificates of a config");
    certify->add_option("config", config_path, "config JSON path")->required();
    add_seed(certify);

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return run_one(config_path, seed, out_dir);
        if (suite->parsed()) return run_suite(suite_dir, seed, out_dir, jobs);
        if (certify->parsed()) return run_certify(config_path, seed);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
