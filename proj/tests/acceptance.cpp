// Acceptance suite: reproduces each theorem scenario at desk scale and
// verifies the regret bounds, per-round inequality ledgers, certificates,
// and property sweeps. Prints one PASS/FAIL line per criterion.
//
// Usage: ocol_acceptance [configs_dir]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

#include "ocol/experiment.hpp"
#include "ocol/solvers.hpp"

using namespace ocol;
namespace fs = std::filesystem;

namespace {

struct Criterion {
    std::string name;
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
};

std::string g_configs = "configs";
int g_seq = 0;

ExperimentConfig load(const std::string& name) {
    std::ifstream in(fs::path(g_configs) / name);
    if (!in) throw std::runtime_error("cannot read config " + name);
    std::ostringstream ss;
    ss << in.rdbuf();
    ExperimentConfig cfg = parse_config(ss.str());
    fs::create_directories("acceptance_out");
    std::string tag = "acceptance_out/" + cfg.scenario + "_" + std::to_string(++g_seq);
    cfg.out_csv = tag + "_trace.csv";
    cfg.out_json = tag + "_summary.json";
    return cfg;
}

double elapsed_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

// rebuild the in-process run from a parsed config (for checks that need the
// full iterate trace rather than the summary)
RunTrace replay_trace(const ExperimentConfig& cfg) {
    GameConfig gc;
    gc.algo = cfg.algo;
    gc.R = cfg.algo == Algorithm::ftl ? std::nullopt : cfg.reference;
    gc.dom = cfg.domain;
    gc.schedule = cfg.schedule;
    gc.gamma_mode = cfg.gamma_mode;
    gc.psi = cfg.psi;
    gc.x0 = cfg.x0;
    std::uint64_t seed = cfg.stream.seed.value_or(cfg.seed);
    LossStream stream = cfg.stream.kind == LossStream::Kind::fixed
                            ? LossStream::Fixed(cfg.stream.base, cfg.T)
                        : cfg.stream.kind == LossStream::Kind::iid_scaled
                            ? LossStream::IidScaled(cfg.stream.base, cfg.stream.scale_lo,
                                                    cfg.stream.scale_hi, seed, cfg.T)
                        : cfg.stream.kind == LossStream::Kind::adversarial_linear
                            ? LossStream::AdversarialLinear(seed, cfg.stream.bound,
                                                            cfg.domain.dimension(), cfg.T)
                            : LossStream::Replay(cfg.stream.replay);
    return run_game(gc, stream, cfg.T);
}

// ------------------------------------------------------------ criteria

std::vector<SummaryRecord> g_ftrl_runs; // collected for the ledger-chain sweep

Criterion criterion1() {
    Criterion c{"criterion-1 ftrl sqrt-regret (fixed x^2, R=2x^4, X=[-2,2])"};
    auto t0 = std::chrono::steady_clock::now();
    double prev_ratio = std::numeric_limits<double>::infinity();
    for (const char* name : {"ftrl_sqrt_t100.json", "ftrl_sqrt_t1000.json", "ftrl_sqrt_t10000.json"}) {
        SummaryRecord s = run_experiment(load(name));
        c.require(s.status == "ok", std::string(name) + " failed: " + s.error);
        if (s.status != "ok") continue;
        g_ftrl_runs.push_back(s);
        const BoundReport& b = s.bounds.at(0);
        c.require(b.satisfied, std::string(name) + " schedule-form bound violated");
        c.require(b.closed_form.has_value() && b.realized <= *b.closed_form + b.tolerance,
                  std::string(name) + " closed-form 2L*sqrt(K(T+1)) violated");
        c.require(s.certificates.at(0).valid, std::string(name) + " L=sqrt(2) certificate");
        double ratio = s.realized_regret / std::sqrt(static_cast<double>(s.T));
        c.require(ratio <= prev_ratio + 1e-9, "regret/sqrt(T) increased at " + std::string(name));
        prev_ratio = ratio;
        c.detail += (c.detail.empty() ? "regret=" : ", ") + fmt(s.realized_regret);
    }
    double secs = elapsed_since(t0);
    c.require(secs < 30.0, "runtime " + fmt(secs) + "s >= 30s");
    c.detail += " runtime=" + fmt(secs) + "s";
    return c;
}

Criterion criterion2() {
    Criterion c{"criterion-2 ftl log-regret (iid-scaled (1/4)||x||^4 on [-1,1]^2)"};
    auto t0 = std::chrono::steady_clock::now();
    SummaryRecord s = run_experiment(load("ftl_log.json"));
    c.require(s.status == "ok", "run failed: " + s.error);
    if (s.status == "ok") {
        g_ftrl_runs.push_back(s);
        const BoundReport& b = s.bounds.at(0);
        c.require(b.satisfied, "ftl_log bound violated");
        for (const auto& cert : s.certificates)
            c.require(cert.valid, "certificate " + cert.type + " invalid");
        c.detail = "regret=" + fmt(s.realized_regret) + " bound=" + fmt(b.bound_value);
    }
    double secs = elapsed_since(t0);
    c.require(secs < 60.0, "runtime " + fmt(secs) + "s >= 60s");
    c.detail += " runtime=" + fmt(secs) + "s";
    return c;
}

Criterion criterion3() {
    Criterion c{"criterion-3 ds-omd sqrt-regret (adversarial linear, entropy, n=10)"};
    auto t0 = std::chrono::steady_clock::now();
    const double ln10 = std::log(10.0);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        ExperimentConfig cfg = load("dsomd_sqrt_simplex.json");
        cfg.seed = seed;
        cfg.stream.seed.reset();
        SummaryRecord s = run_experiment(cfg);
        std::string tag = "seed " + std::to_string(seed);
        c.require(s.status == "ok", tag + " failed: " + s.error);
        if (s.status != "ok") continue;
        const BoundReport& b = s.bounds.at(0);
        c.require(b.k_valid && std::fabs(b.K_realized - ln10) <= 1e-6,
                  tag + " realized D(z,x1) != ln(10)");
        c.require(b.closed_form.has_value() && b.realized <= *b.closed_form + b.tolerance,
                  tag + " closed-form bound violated");
        c.require(s.ledger_kind == "dsomd" && s.ledger.max_per_round_violation <= 1e-7,
                  tag + " per-round bregman bound violated (max " +
                      fmt(s.ledger.max_per_round_violation) + ")");
        c.require(s.ledger.holds, tag + " aggregate ledger violated");
        c.require(s.certificates.at(0).valid, tag + " entropy Lipschitz certificate");
        c.detail += (c.detail.empty() ? "regret=" : ", ") + fmt(s.realized_regret);
    }
    double secs = elapsed_since(t0);
    c.require(secs < 60.0, "runtime " + fmt(secs) + "s >= 60s");
    c.detail += " runtime=" + fmt(secs) + "s";
    return c;
}

Criterion criterion4() {
    Criterion c{"criterion-4 vanilla omd log-regret (gamma=1, eta=1/(t M'))"};
    SummaryRecord s = run_experiment(load("omd_log.json"));
    c.require(s.status == "ok", "run failed: " + s.error);
    if (s.status == "ok") {
        const BoundReport& b = s.bounds.at(0);
        c.require(b.satisfied, "omd_log bound violated");
        c.require(s.ledger_kind == "dsomd" && s.ledger.max_per_round_violation <= 1e-7,
                  "per-round bregman bound violated");
        for (const auto& cert : s.certificates)
            c.require(cert.valid, "certificate " + cert.type + " invalid");
        c.detail = "regret=" + fmt(s.realized_regret) + " bound=" + fmt(b.bound_value);
    }
    return c;
}

Criterion criterion5() {
    Criterion c{"criterion-5 rda composite regret + sparsity (Psi=0.05|.|_1)"};
    ExperimentConfig cfg = load("rda_l1_sparsity.json");
    SummaryRecord s = run_experiment(cfg);
    c.require(s.status == "ok", "run failed: " + s.error);
    if (s.status == "ok") {
        g_ftrl_runs.push_back(s);
        const BoundReport& b = s.bounds.at(0);
        c.require(b.satisfied, "composite_ftrl schedule bound violated");
        c.require(b.closed_form.has_value() &&
                      s.composite_regret_value <= *b.closed_form + b.tolerance,
                  "closed-form 2L*sqrt(K(T+1)) violated");
        RunTrace tr = replay_trace(cfg);
        bool sparse = false;
        for (std::size_t i = 1; i < tr.iterates.size() && !sparse; ++i)
            for (double v : tr.iterates[i])
                if (v == 0.0) sparse = true;
        c.require(sparse, "no round produced an exactly-zero coordinate");
        c.detail = "composite_regret=" + fmt(s.composite_regret_value);
    }
    return c;
}

Criterion criterion6() {
    Criterion c{"criterion-6 composite ds-omd (Psi=0.1|.|_1, squared_l2 mirror, box)"};
    SummaryRecord s = run_experiment(load("dsomd_composite_box.json"));
    c.require(s.status == "ok", "run failed: " + s.error);
    if (s.status == "ok") {
        const BoundReport& b = s.bounds.at(0);
        c.require(b.satisfied, "composite_dsomd schedule bound violated");
        c.require(s.ledger.holds, "aggregate ledger violated");
        c.detail = "composite_regret=" + fmt(s.composite_regret_value) +
                   " bound=" + fmt(b.bound_value);
    }
    return c;
}

Criterion criterion7() {
    Criterion c{"criterion-7 da == ftrl on 20 random linear streams (T=100)"};
    Rng rng(2024);
    auto sched = StepSchedule::SqrtDecay(1.0, 1.0, StepSchedule::Offset::t_plus_1);
    double worst = 0.0;
    for (int rep = 0; rep < 20; ++rep) {
        ReferenceFunction R = ReferenceFunction::SquaredL2();
        DomainSpec dom = DomainSpec::Box({0.0}, {1.0});
        if (rep % 3 == 2) {
            std::size_t n = 2 + rep % 4;
            R = ReferenceFunction::NegEntropy();
            dom = DomainSpec::Simplex(n);
        } else {
            std::size_t n = 1 + rep % 3;
            Vector lo(n), hi(n);
            for (std::size_t i = 0; i < n; ++i) {
                lo[i] = rng.uniform(-2.0, -0.1);
                hi[i] = rng.uniform(0.1, 2.0);
            }
            dom = DomainSpec::Box(lo, hi);
        }
        auto da = ftrl_init(R, sched, dom, CompositeRegularizer::Zero(), true);
        auto ft = ftrl_init(R, sched, dom, CompositeRegularizer::Zero(), false);
        for (long t = 1; t <= 100; ++t) {
            Vector g(dom.dimension());
            for (double& v : g) v = rng.uniform(-1.0, 1.0);
            Vector xa = da_step(da, g);
            Vector xb = ftrl_step(ft, LossFunction::Linear(g));
            worst = std::max(worst, linf_dist(xa, xb));
        }
    }
    c.require(worst <= 1e-7, "iterates diverged by " + fmt(worst));
    c.detail = "max iterate gap=" + fmt(worst);
    return c;
}

Criterion criterion8() {
    Criterion c{"criterion-8 property suites"};

    // three-point identity: 1000 triples x 3 kinds, residual <= 1e-9
    {
        double worst = 0.0;
        for (auto R : {ReferenceFunction::SquaredL2(), ReferenceFunction::PolyNorm(2, 8.0),
                       ReferenceFunction::NegEntropy()}) {
            Rng rng(71);
            for (int k = 0; k < 1000; ++k) {
                auto draw = [&]() {
                    Vector v(2);
                    for (double& u : v)
                        u = R.kind == ReferenceFunction::Kind::neg_entropy
                                ? rng.uniform(0.05, 1.0)
                                : rng.uniform(-1.5, 1.5);
                    return v;
                };
                worst = std::max(worst, three_point_residual(R, draw(), draw(), draw()));
            }
        }
        c.require(worst <= 1e-9, "three-point residual " + fmt(worst));
    }

    // conjugate round-trip <= 1e-8
    {
        double worst = 0.0;
        for (auto Phi : {ReferenceFunction::SquaredL2(), ReferenceFunction::PolyNorm(2, 8.0),
                         ReferenceFunction::NegEntropy()}) {
            Rng rng(72);
            for (int k = 0; k < 1000; ++k) {
                Vector x(3);
                for (double& u : x)
                    u = Phi.kind == ReferenceFunction::Kind::neg_entropy
                            ? rng.uniform(0.05, 1.0)
                            : rng.uniform(-1.5, 1.5);
                worst = std::max(worst, linf_dist(grad_conjugate(Phi, Phi.gradient(x)), x));
            }
        }
        c.require(worst <= 1e-8, "conjugate round-trip error " + fmt(worst));
    }

    // lemma A1 over 1e4 random nonnegative sequences
    {
        Rng rng(73);
        bool ok = true;
        for (int rep = 0; rep < 10000 && ok; ++rep) {
            std::vector<double> a{rng.uniform(1e-9, 4.0)};
            int len = static_cast<int>(rng.uniform(0.0, 40.0));
            for (int i = 0; i < len; ++i)
                a.push_back(rng.uniform(0.0, 1.0) < 0.25 ? 0.0 : rng.uniform(0.0, 4.0));
            ok = lemma_a1_check(a).holds;
        }
        c.require(ok, "lemma A1 violated");
    }

    // generalized pythagorean inequality for the composite prox, 1000 samples
    {
        Rng rng(74);
        auto Phi = ReferenceFunction::SquaredL2();
        auto psi = CompositeRegularizer::L1(0.5);
        auto dom = DomainSpec::Box({-2.0, -2.0}, {2.0, 2.0});
        double worst = -std::numeric_limits<double>::infinity();
        for (int k = 0; k < 1000; ++k) {
            Vector y{rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0)};
            double alpha = rng.uniform(0.0, 1.2);
            auto pr = composite_bregman_prox(Phi, y, psi, alpha, dom);
            Vector x = dom.sample(rng);
            double lhs = bregman_divergence(Phi, x, pr.point) +
                         bregman_divergence(Phi, pr.point, y);
            double rhs = bregman_divergence(Phi, x, y) +
                         alpha * (psi.value(x) - psi.value(pr.point));
            worst = std::max(worst, lhs - rhs);
        }
        c.require(worst <= 1e-7, "pythagorean prox inequality violated by " + fmt(worst));
    }

    // the two paper certificates at 1e4 samples
    {
        auto f = LossFunction::ScaledQuadratic(1.0, {0.0});
        auto R = ReferenceFunction::PolyNorm(2, 8.0);
        auto c1 = certify_relative_lipschitz(f, R, std::sqrt(2.0),
                                             DomainSpec::Box({-10.0}, {10.0}), 10000, 90);
        c.require(c1.valid, "x^2 vs 2x^4 certificate invalid");

        const int p = 4;
        const double M = (p - 1) / ((2.0 * p - 1) * std::pow(std::sqrt(2.0), p));
        auto fp = LossFunction::PnormPower(p, 1.0);
        auto Rp = ReferenceFunction::PolyNorm(p, 1.0);
        auto dom = DomainSpec::Box({-1.0, -1.0}, {1.0, 1.0});
        c.require(certify_relative_lipschitz(fp, Rp, 1.0, dom, 10000, 91).valid,
                  "pnorm L certificate invalid");
        c.require(certify_relative_strong_convexity(fp, Rp, M, dom, 10000, 92).valid,
                  "pnorm M certificate invalid");
    }

    // strong FTRL ledger dominance chain on every FTRL acceptance run
    for (const auto& s : g_ftrl_runs) {
        bool chain = s.ledger_kind == "strong_ftrl" && s.ledger.holds && !s.bounds.empty() &&
                     s.ledger.rhs <= s.bounds.front().bound_value + s.bounds.front().tolerance;
        c.require(chain, s.scenario + ": ledger dominance chain broken");
    }
    c.require(!g_ftrl_runs.empty(), "no FTRL runs collected");
    return c;
}

} // namespace

int main(int argc, char** argv) {
    if (argc > 1) g_configs = argv[1];
    std::vector<Criterion> results;
    try {
        results.push_back(criterion1());
        results.push_back(criterion2());
        results.push_back(criterion3());
        results.push_back(criterion4());
        results.push_back(criterion5());
        results.push_back(criterion6());
        results.push_back(criterion7());
        results.push_back(criterion8());
    } catch (const std::exception& e) {
        std::cerr << "acceptance aborted: " << e.what() << "\n";
        return 2;
    }

    bool all = true;
    for (const auto& c : results) {
        std::cout << (c.pass ? "[PASS] " : "[FAIL] ") << c.name;
        if (!c.detail.empty()) std::cout << "  (" << c.detail << ")";
        std::cout << "\n";
        all = all && c.pass;
    }
    std::cout << (all ? "acceptance: ALL CRITERIA SATISFIED\n"
                      : "acceptance: CRITERIA FAILED\n");
    return all ? 0 : 1;
}
