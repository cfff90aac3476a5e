#include "ocol/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "json.hpp"

namespace ocol {

namespace {

using nlohmann::json;

std::string fmt12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string fmt_exact(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string json_escape(const std::string& s) {
    std::string r;
    for (char c : s) {
        switch (c) {
            case '"': r += "\\\""; break;
            case '\\': r += "\\\\"; break;
            case '\n': r += "\\n"; break;
            case '\t': r += "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                    r += buf;
                } else {
                    r += c;
                }
        }
    }
    return r;
}

// ------------------------------------------------------------- parsing

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ParseError(path + ": " + what);
}

const json& member(const json& j, const std::string& key, const std::string& path) {
    if (!j.is_object() || !j.contains(key)) fail(path + "." + key, "missing field");
    return j.at(key);
}

double num_at(const json& j, const std::string& key, const std::string& path) {
    const json& v = member(j, key, path);
    if (!v.is_number()) fail(path + "." + key, "expected a number");
    return v.get<double>();
}

std::string str_at(const json& j, const std::string& key, const std::string& path) {
    const json& v = member(j, key, path);
    if (!v.is_string()) fail(path + "." + key, "expected a string");
    return v.get<std::string>();
}

Vector vec_at(const json& j, const std::string& key, const std::string& path) {
    const json& v = member(j, key, path);
    if (!v.is_array()) fail(path + "." + key, "expected an array");
    Vector out;
    for (const auto& e : v) {
        if (!e.is_number()) fail(path + "." + key, "expected numeric entries");
        out.push_back(e.get<double>());
    }
    return out;
}

LossFunction parse_loss(const json& j, const std::string& path) {
    std::string kind = str_at(j, "kind", path);
    if (kind == "linear") return LossFunction::Linear(vec_at(j, "g", path));
    if (kind == "scaled_quadratic")
        return LossFunction::ScaledQuadratic(num_at(j, "s", path), vec_at(j, "center", path));
    if (kind == "pnorm_power")
        return LossFunction::PnormPower(static_cast<int>(num_at(j, "p", path)),
                                        num_at(j, "s", path));
    fail(path + ".kind", "unknown loss kind '" + kind + "'");
}

ReferenceFunction parse_reference(const json& j, const std::string& path) {
    std::string kind = str_at(j, "kind", path);
    if (kind == "squared_l2") return ReferenceFunction::SquaredL2();
    if (kind == "neg_entropy") return ReferenceFunction::NegEntropy();
    if (kind == "poly_norm") {
        double scale = j.contains("scale") ? num_at(j, "scale", path) : 1.0;
        return ReferenceFunction::PolyNorm(static_cast<int>(num_at(j, "p", path)), scale);
    }
    fail(path + ".kind", "unknown reference kind '" + kind + "'");
}

DomainSpec parse_domain(const json& j, const std::string& path) {
    std::string kind = str_at(j, "kind", path);
    if (kind == "box") {
        Vector lo = vec_at(j, "lo", path), hi = vec_at(j, "hi", path);
        if (lo.size() != hi.size()) throw ValidationError(path + ": lo/hi dimension mismatch");
        for (std::size_t i = 0; i < lo.size(); ++i)
            if (!(lo[i] <= hi[i])) throw ValidationError(path + ": box needs lo <= hi");
        return DomainSpec::Box(std::move(lo), std::move(hi));
    }
    if (kind == "simplex")
        return DomainSpec::Simplex(static_cast<std::size_t>(num_at(j, "n", path)));
    if (kind == "all_space")
        return DomainSpec::AllSpace(static_cast<std::size_t>(num_at(j, "n", path)));
    fail(path + ".kind", "unknown domain kind '" + kind + "'");
}

StepSchedule parse_schedule(const json& j, const std::string& path) {
    std::string kind = str_at(j, "kind", path);
    if (kind == "constant") {
        double eta = num_at(j, "eta", path);
        if (!(eta > 0.0)) throw ValidationError(path + ".eta: eta must be positive");
        return StepSchedule::Constant(eta);
    }
    if (kind == "inverse_tM") {
        double M = num_at(j, "M", path);
        if (!(M > 0.0)) throw ValidationError(path + ".M: M must be positive");
        return StepSchedule::InverseTM(M);
    }
    if (kind == "sqrt_decay") {
        double K = num_at(j, "K", path), L = num_at(j, "L", path);
        if (!(K > 0.0)) throw ValidationError(path + ".K: K must be positive");
        if (!(L > 0.0)) throw ValidationError(path + ".L: L must be positive");
        auto off = StepSchedule::Offset::t_plus_1;
        if (j.contains("offset")) {
            std::string o = str_at(j, "offset", path);
            if (o == "t")
                off = StepSchedule::Offset::t;
            else if (o == "t_plus_1")
                off = StepSchedule::Offset::t_plus_1;
            else
                fail(path + ".offset", "expected 't' or 't_plus_1'");
        }
        auto num = StepSchedule::Numerator::sqrt_K;
        if (j.contains("numerator")) {
            std::string o = str_at(j, "numerator", path);
            if (o == "sqrt_K")
                num = StepSchedule::Numerator::sqrt_K;
            else if (o == "sqrt_2K")
                num = StepSchedule::Numerator::sqrt_2K;
            else
                fail(path + ".numerator", "expected 'sqrt_K' or 'sqrt_2K'");
        }
        return StepSchedule::SqrtDecay(K, L, off, num);
    }
    fail(path + ".kind", "unknown schedule kind '" + kind + "'");
}

} // namespace

bool ExperimentConfig::operator==(const ExperimentConfig& o) const {
    auto refeq = [](const std::optional<ReferenceFunction>& a,
                    const std::optional<ReferenceFunction>& b) {
        if (a.has_value() != b.has_value()) return false;
        return !a || *a == *b;
    };
    bool psi_eq = psi.kind == o.psi.kind && psi.lambda == o.psi.lambda &&
                  (psi.kind != CompositeRegularizer::Kind::indicator || psi.dom == o.psi.dom);
    return scenario == o.scenario && algo == o.algo && refeq(reference, o.reference) &&
           domain == o.domain && stream == o.stream && schedule == o.schedule &&
           gamma_mode == o.gamma_mode && psi_eq && T == o.T && seed == o.seed && x0 == o.x0 &&
           comparator_grid == o.comparator_grid && bounds == o.bounds && certify == o.certify &&
           out_csv == o.out_csv && out_json == o.out_json;
}

ExperimentConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw ParseError(std::string("document: ") + e.what());
    }
    if (!j.is_object()) fail("document", "expected a JSON object");

    ExperimentConfig c;
    c.scenario = str_at(j, "scenario", "");
    auto algo = algorithm_from_name(str_at(j, "algorithm", ""));
    if (!algo) fail(".algorithm", "unknown algorithm");
    c.algo = *algo;

    if (j.contains("reference")) {
        const json& r = j.at("reference");
        if (!(r.is_object() && r.contains("kind") && r.at("kind") == "none"))
            c.reference = parse_reference(r, ".reference");
    }
    c.domain = parse_domain(member(j, "domain", ""), ".domain");
    c.schedule = parse_schedule(member(j, "schedule", ""), ".schedule");

    c.T = static_cast<long>(num_at(j, "T", ""));
    if (c.T < 1) throw ValidationError(".T: horizon must be >= 1");
    c.seed = static_cast<std::uint64_t>(num_at(j, "seed", ""));

    const json& ls = member(j, "losses", "");
    std::string lk = str_at(ls, "kind", ".losses");
    if (lk == "fixed") {
        c.stream.kind = LossStream::Kind::fixed;
        c.stream.base = parse_loss(member(ls, "loss", ".losses"), ".losses.loss");
    } else if (lk == "iid_scaled") {
        c.stream.kind = LossStream::Kind::iid_scaled;
        c.stream.base = parse_loss(member(ls, "base", ".losses"), ".losses.base");
        Vector range = vec_at(ls, "range", ".losses");
        if (range.size() != 2 || !(range[0] <= range[1]) || !(range[0] >= 0.0))
            throw ValidationError(".losses.range: expected 0 <= a <= b");
        c.stream.scale_lo = range[0];
        c.stream.scale_hi = range[1];
    } else if (lk == "adversarial_linear") {
        c.stream.kind = LossStream::Kind::adversarial_linear;
        c.stream.bound = num_at(ls, "bound", ".losses");
        if (!(c.stream.bound > 0.0))
            throw ValidationError(".losses.bound: must be positive");
    } else if (lk == "replay") {
        c.stream.kind = LossStream::Kind::replay;
        const json& arr = member(ls, "losses", ".losses");
        if (!arr.is_array() || arr.empty()) fail(".losses.losses", "expected a non-empty array");
        for (const auto& e : arr) c.stream.replay.push_back(parse_loss(e, ".losses.losses[]"));
    } else {
        fail(".losses.kind", "unknown stream kind '" + lk + "'");
    }
    if (ls.contains("seed"))
        c.stream.seed = static_cast<std::uint64_t>(num_at(ls, "seed", ".losses"));

    if (j.contains("gamma_mode")) {
        std::string g = str_at(j, "gamma_mode", "");
        if (g == "ratio")
            c.gamma_mode = DsomdState::GammaMode::ratio;
        else if (g == "one")
            c.gamma_mode = DsomdState::GammaMode::one;
        else
            fail(".gamma_mode", "expected 'ratio' or 'one'");
    }

    if (j.contains("psi")) {
        const json& p = j.at("psi");
        std::string pk = str_at(p, "kind", ".psi");
        if (pk == "zero")
            c.psi = CompositeRegularizer::Zero();
        else if (pk == "l1") {
            double lam = num_at(p, "lambda", ".psi");
            if (!(lam >= 0.0)) throw ValidationError(".psi.lambda: must be >= 0");
            c.psi = CompositeRegularizer::L1(lam);
        } else if (pk == "indicator")
            c.psi = CompositeRegularizer::Indicator(c.domain);
        else
            fail(".psi.kind", "unknown psi kind '" + pk + "'");
    }

    if (j.contains("x0")) c.x0 = vec_at(j, "x0", "");
    if (j.contains("comparator_grid")) {
        c.comparator_grid = static_cast<int>(num_at(j, "comparator_grid", ""));
        if (c.comparator_grid < 2) throw ValidationError(".comparator_grid: must be >= 2");
    }

    if (j.contains("bounds")) {
        const json& arr = j.at("bounds");
        if (!arr.is_array()) fail(".bounds", "expected an array");
        for (const auto& e : arr) {
            BoundRequest b;
            auto k = bound_kind_from_name(str_at(e, "kind", ".bounds[]"));
            if (!k) fail(".bounds[].kind", "unknown bound kind");
            b.kind = *k;
            b.L = num_at(e, "L", ".bounds[]");
            if (!(b.L > 0.0)) throw ValidationError(".bounds[].L: must be positive");
            if (e.contains("M")) b.M = num_at(e, "M", ".bounds[]");
            if (e.contains("K")) b.K = num_at(e, "K", ".bounds[]");
            if ((b.kind == BoundKind::ftl_log || b.kind == BoundKind::omd_log) &&
                !(b.M.value_or(0.0) > 0.0))
                throw ValidationError(".bounds[].M: log-kind bounds need M > 0");
            c.bounds.push_back(b);
        }
    }

    if (j.contains("certify")) {
        const json& arr = j.at("certify");
        if (!arr.is_array()) fail(".certify", "expected an array");
        for (const auto& e : arr) {
            CertifyRequest r;
            std::string t = str_at(e, "type", ".certify[]");
            if (t == "lipschitz")
                r.type = CertifyRequest::Type::lipschitz;
            else if (t == "strong_convexity")
                r.type = CertifyRequest::Type::strong_convexity;
            else
                fail(".certify[].type", "expected 'lipschitz' or 'strong_convexity'");
            r.constant = num_at(e, "constant", ".certify[]");
            r.reference = parse_reference(member(e, "reference", ".certify[]"),
                                          ".certify[].reference");
            if (e.contains("samples")) r.samples = static_cast<int>(num_at(e, "samples", ".certify[]"));
            if (r.samples < 1) throw ValidationError(".certify[].samples: must be >= 1");
            if (e.contains("seed"))
                r.seed = static_cast<std::uint64_t>(num_at(e, "seed", ".certify[]"));
            c.certify.push_back(r);
        }
    }

    if (j.contains("out_csv")) c.out_csv = str_at(j, "out_csv", "");
    if (j.contains("out_json")) c.out_json = str_at(j, "out_json", "");

    // cross-field validation
    bool is_md = c.algo == Algorithm::dsomd || c.algo == Algorithm::dsomd_composite ||
                 c.algo == Algorithm::omd_vanilla;
    if (is_md && !c.reference)
        throw ValidationError(".reference: mirror descent needs a mirror map");
    if ((c.algo == Algorithm::da || c.algo == Algorithm::rda) && !c.reference)
        throw ValidationError(".reference: dual averaging needs a regularizer");
    if (c.reference && c.reference->kind == ReferenceFunction::Kind::neg_entropy &&
        c.domain.kind == DomainSpec::Kind::box)
        for (double lo : c.domain.lo)
            if (lo < 0.0)
                throw ValidationError(
                    ".domain: neg_entropy requires nonnegative box coordinates");
    if (c.gamma_mode == DsomdState::GammaMode::ratio &&
        c.schedule.kind == StepSchedule::Kind::constant && is_md)
        c.warnings.push_back("gamma_mode=ratio with a constant schedule gives gamma_t = 1");
    if (!c.psi.is_zero() && (c.algo == Algorithm::da || c.algo == Algorithm::dsomd ||
                             c.algo == Algorithm::omd_vanilla))
        throw ValidationError(
            ".psi: this algorithm ignores Psi; use rda or dsomd_composite instead");
    if (c.stream.kind == LossStream::Kind::adversarial_linear &&
        c.domain.dimension() == 0)
        throw ValidationError(".domain: adversarial_linear needs a sized domain");
    return c;
}

namespace {

std::string loss_to_json(const LossFunction& f) {
    std::string s = "{\"kind\":\"" + f.id() + "\"";
    switch (f.kind) {
        case LossFunction::Kind::linear: {
            s += ",\"g\":[";
            for (std::size_t i = 0; i < f.g.size(); ++i)
                s += (i ? "," : "") + fmt_exact(f.g[i]);
            s += "]";
            break;
        }
        case LossFunction::Kind::scaled_quadratic: {
            s += ",\"s\":" + fmt_exact(f.s) + ",\"center\":[";
            for (std::size_t i = 0; i < f.center.size(); ++i)
                s += (i ? "," : "") + fmt_exact(f.center[i]);
            s += "]";
            break;
        }
        case LossFunction::Kind::pnorm_power:
            s += ",\"p\":" + std::to_string(f.p) + ",\"s\":" + fmt_exact(f.s);
            break;
    }
    return s + "}";
}

std::string ref_to_json(const ReferenceFunction& r) {
    switch (r.kind) {
        case ReferenceFunction::Kind::squared_l2: return "{\"kind\":\"squared_l2\"}";
        case ReferenceFunction::Kind::neg_entropy: return "{\"kind\":\"neg_entropy\"}";
        case ReferenceFunction::Kind::poly_norm:
            return "{\"kind\":\"poly_norm\",\"p\":" + std::to_string(r.p) +
                   ",\"scale\":" + fmt_exact(r.scale) + "}";
    }
    return "{}";
}

std::string vec_to_json(const Vector& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt_exact(v[i]);
    return s + "]";
}

std::string domain_to_json(const DomainSpec& d) {
    switch (d.kind) {
        case DomainSpec::Kind::all_space:
            return "{\"kind\":\"all_space\",\"n\":" + std::to_string(d.dim) + "}";
        case DomainSpec::Kind::box:
            return "{\"kind\":\"box\",\"lo\":" + vec_to_json(d.lo) +
                   ",\"hi\":" + vec_to_json(d.hi) + "}";
        case DomainSpec::Kind::simplex:
            return "{\"kind\":\"simplex\",\"n\":" + std::to_string(d.dim) + "}";
    }
    return "{}";
}

std::string schedule_to_json(const StepSchedule& s) {
    switch (s.kind) {
        case StepSchedule::Kind::constant:
            return "{\"kind\":\"constant\",\"eta\":" + fmt_exact(s.eta_const) + "}";
        case StepSchedule::Kind::inverse_tM:
            return "{\"kind\":\"inverse_tM\",\"M\":" + fmt_exact(s.M) + "}";
        case StepSchedule::Kind::sqrt_decay:
            return std::string("{\"kind\":\"sqrt_decay\",\"K\":") + fmt_exact(s.K) +
                   ",\"L\":" + fmt_exact(s.L) + ",\"offset\":\"" +
                   (s.offset == StepSchedule::Offset::t ? "t" : "t_plus_1") +
                   "\",\"numerator\":\"" +
                   (s.numerator == StepSchedule::Numerator::sqrt_K ? "sqrt_K" : "sqrt_2K") +
                   "\"}";
    }
    return "{}";
}

std::string stream_to_json(const StreamSpec& s) {
    std::string out;
    switch (s.kind) {
        case LossStream::Kind::fixed:
            out = "{\"kind\":\"fixed\",\"loss\":" + loss_to_json(s.base);
            break;
        case LossStream::Kind::iid_scaled:
            out = "{\"kind\":\"iid_scaled\",\"base\":" + loss_to_json(s.base) +
                  ",\"range\":[" + fmt_exact(s.scale_lo) + "," + fmt_exact(s.scale_hi) + "]";
            break;
        case LossStream::Kind::adversarial_linear:
            out = "{\"kind\":\"adversarial_linear\",\"bound\":" + fmt_exact(s.bound);
            break;
        case LossStream::Kind::replay: {
            out = "{\"kind\":\"replay\",\"losses\":[";
            for (std::size_t i = 0; i < s.replay.size(); ++i)
                out += (i ? "," : "") + loss_to_json(s.replay[i]);
            out += "]";
            break;
        }
    }
    if (s.seed) out += ",\"seed\":" + std::to_string(*s.seed);
    return out + "}";
}

} // namespace

std::string serialize_config(const ExperimentConfig& c) {
    std::string s = "{";
    s += "\"scenario\":\"" + json_escape(c.scenario) + "\"";
    s += ",\"algorithm\":\"" + algorithm_name(c.algo) + "\"";
    s += ",\"reference\":" + (c.reference ? ref_to_json(*c.reference) : "{\"kind\":\"none\"}");
    s += ",\"domain\":" + domain_to_json(c.domain);
    s += ",\"losses\":" + stream_to_json(c.stream);
    s += ",\"schedule\":" + schedule_to_json(c.schedule);
    s += ",\"gamma_mode\":\"" +
         std::string(c.gamma_mode == DsomdState::GammaMode::ratio ? "ratio" : "one") + "\"";
    switch (c.psi.kind) {
        case CompositeRegularizer::Kind::zero: s += ",\"psi\":{\"kind\":\"zero\"}"; break;
        case CompositeRegularizer::Kind::l1:
            s += ",\"psi\":{\"kind\":\"l1\",\"lambda\":" + fmt_exact(c.psi.lambda) + "}";
            break;
        case CompositeRegularizer::Kind::indicator:
            s += ",\"psi\":{\"kind\":\"indicator\"}";
            break;
    }
    s += ",\"T\":" + std::to_string(c.T);
    s += ",\"seed\":" + std::to_string(c.seed);
    if (c.x0) s += ",\"x0\":" + vec_to_json(*c.x0);
    s += ",\"comparator_grid\":" + std::to_string(c.comparator_grid);
    if (!c.bounds.empty()) {
        s += ",\"bounds\":[";
        for (std::size_t i = 0; i < c.bounds.size(); ++i) {
            const auto& b = c.bounds[i];
            s += (i ? "," : "");
            s += "{\"kind\":\"" + bound_kind_name(b.kind) + "\",\"L\":" + fmt_exact(b.L);
            if (b.M) s += ",\"M\":" + fmt_exact(*b.M);
            if (b.K) s += ",\"K\":" + fmt_exact(*b.K);
            s += "}";
        }
        s += "]";
    }
    if (!c.certify.empty()) {
        s += ",\"certify\":[";
        for (std::size_t i = 0; i < c.certify.size(); ++i) {
            const auto& r = c.certify[i];
            s += (i ? "," : "");
            s += std::string("{\"type\":\"") +
                 (r.type == CertifyRequest::Type::lipschitz ? "lipschitz" : "strong_convexity") +
                 "\",\"constant\":" + fmt_exact(r.constant) +
                 ",\"reference\":" + ref_to_json(r.reference) +
                 ",\"samples\":" + std::to_string(r.samples) +
                 ",\"seed\":" + std::to_string(r.seed) + "}";
        }
        s += "]";
    }
    if (!c.out_csv.empty()) s += ",\"out_csv\":\"" + json_escape(c.out_csv) + "\"";
    if (!c.out_json.empty()) s += ",\"out_json\":\"" + json_escape(c.out_json) + "\"";
    return s + "}";
}

std::string config_digest(const ExperimentConfig& cfg) {
    ExperimentConfig c = cfg;
    c.out_csv.clear();
    c.out_json.clear();
    c.warnings.clear();
    std::string body = serialize_config(c);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : body) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

bool SummaryRecord::all_satisfied() const {
    if (status != "ok") return false;
    for (const auto& b : bounds)
        if (!b.satisfied) return false;
    for (const auto& c : certificates)
        if (!c.valid) return false;
    if (ledger_kind != "none" && !ledger.holds) return false;
    return true;
}

namespace {

LossStream build_stream(const ExperimentConfig& cfg) {
    std::uint64_t seed = cfg.stream.seed.value_or(cfg.seed);
    switch (cfg.stream.kind) {
        case LossStream::Kind::fixed:
            return LossStream::Fixed(cfg.stream.base, cfg.T);
        case LossStream::Kind::iid_scaled:
            return LossStream::IidScaled(cfg.stream.base, cfg.stream.scale_lo,
                                         cfg.stream.scale_hi, seed, cfg.T);
        case LossStream::Kind::adversarial_linear:
            return LossStream::AdversarialLinear(seed, cfg.stream.bound,
                                                 cfg.domain.dimension(), cfg.T);
        case LossStream::Kind::replay:
            return LossStream::Replay(cfg.stream.replay);
    }
    throw ParamError("build_stream: unknown kind");
}

// losses the certificates apply to: the base loss, or a probe of the
// adversary's first draws
std::vector<LossFunction> cert_losses(const ExperimentConfig& cfg, const LossStream& stream) {
    switch (cfg.stream.kind) {
        case LossStream::Kind::fixed:
        case LossStream::Kind::iid_scaled:
            return {cfg.stream.base};
        case LossStream::Kind::adversarial_linear: {
            std::vector<LossFunction> out;
            long k = std::min<long>(cfg.T, 16);
            for (long t = 1; t <= k; ++t) out.push_back(stream.next(t));
            return out;
        }
        case LossStream::Kind::replay: {
            std::vector<LossFunction> out;
            for (std::size_t i = 0; i < cfg.stream.replay.size() && i < 16; ++i)
                out.push_back(cfg.stream.replay[i]);
            return out;
        }
    }
    return {};
}

} // namespace

SummaryRecord run_experiment(const ExperimentConfig& cfg) {
    SummaryRecord s;
    s.scenario = cfg.scenario;
    s.algo = cfg.algo;
    s.T = cfg.T;
    s.seed = cfg.stream.seed.value_or(cfg.seed);
    s.digest = config_digest(cfg);
    s.csv_path = cfg.out_csv.empty() ? cfg.scenario + "_trace.csv" : cfg.out_csv;
    s.json_path = cfg.out_json.empty() ? cfg.scenario + "_summary.json" : cfg.out_json;

    GameConfig gc;
    gc.algo = cfg.algo;
    gc.R = cfg.algo == Algorithm::ftl ? std::nullopt : cfg.reference;
    gc.dom = cfg.domain;
    gc.schedule = cfg.schedule;
    gc.gamma_mode = cfg.gamma_mode;
    gc.psi = cfg.psi;
    gc.x0 = cfg.x0;

    LossStream stream = build_stream(cfg);
    auto t_start = std::chrono::steady_clock::now();
    RunTrace trace = run_game(gc, stream, cfg.T);
    s.rounds_completed = trace.horizon();
    s.residual_sum = trace.residual_sum;

    if (trace.failed) {
        s.status = "failed";
        s.error = trace.error;
    } else try {
        s.status = "ok";
        bool composite = !cfg.psi.is_zero();
        std::vector<LossFunction> losses;
        losses.reserve(trace.rounds.size());
        for (const auto& r : trace.rounds) losses.push_back(r.f);
        s.comparator = comparator_argmin(
            losses, composite ? cfg.psi : CompositeRegularizer::Zero(), cfg.domain,
            cfg.comparator_grid);
        s.realized_regret = regret(trace, s.comparator);
        s.composite_regret_value = composite_regret(trace, s.comparator, cfg.psi);

        for (const auto& b : cfg.bounds)
            s.bounds.push_back(evaluate_bound(b.kind, trace, s.comparator, b.L, b.M, b.K));
        if (!s.bounds.empty()) s.K_realized = s.bounds.front().K_realized;

        double led_L = !cfg.bounds.empty() ? cfg.bounds.front().L
                       : cfg.schedule.kind == StepSchedule::Kind::sqrt_decay ? cfg.schedule.L
                                                                             : 0.0;
        if (trace.ftrl_family()) {
            s.ledger_kind = "strong_ftrl";
            s.ledger = strong_ftrl_ledger(trace, s.comparator);
            s.max_ledger_violation = s.ledger.realized - s.ledger.rhs;
        } else if (led_L > 0.0) {
            s.ledger_kind = "dsomd";
            s.ledger = dsomd_ledger(trace, s.comparator, led_L);
            s.max_ledger_violation = s.ledger.max_per_round_violation;
        }

        std::vector<LossFunction> probes = cert_losses(cfg, stream);
        for (const auto& req : cfg.certify) {
            CertResult cr;
            cr.type = req.type == CertifyRequest::Type::lipschitz ? "relative_lipschitz"
                                                                  : "relative_strong_convexity";
            cr.constant = req.constant;
            cr.samples = req.samples;
            double worst = -std::numeric_limits<double>::infinity();
            int per = std::max(1, req.samples / std::max<int>(1, probes.size()));
            for (std::size_t i = 0; i < probes.size(); ++i) {
                RelativeCertificate c =
                    req.type == CertifyRequest::Type::lipschitz
                        ? certify_relative_lipschitz(probes[i], req.reference, req.constant,
                                                     cfg.domain, per, req.seed + i)
                        : certify_relative_strong_convexity(probes[i], req.reference,
                                                            req.constant, cfg.domain, per,
                                                            req.seed + i);
                worst = std::max(worst, c.max_violation);
            }
            cr.max_violation = worst;
            cr.valid = worst <= 1e-7;
            s.certificates.push_back(cr);
        }
    } catch (const std::exception& e) {
        s.status = "failed";
        s.error = std::string("analysis: ") + e.what();
    }
    s.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();

    emit_outputs(trace, s, cfg, s.csv_path, s.json_path);
    return s;
}

void emit_outputs(const RunTrace& trace, const SummaryRecord& summary,
                  const ExperimentConfig& cfg, const std::string& csv_path,
                  const std::string& json_path) {
    std::ofstream csv(csv_path);
    if (!csv) throw std::runtime_error("emit_outputs: cannot write " + csv_path);
    csv << "t,eta_t,gamma_t,loss_t,cum_loss,comparator_cum_loss,regret_t,bound_t,"
           "ledger_slack_t\n";

    const bool have_z = !summary.comparator.empty();
    const BoundRequest* br = cfg.bounds.empty() ? nullptr : &cfg.bounds.front();
    double cum = 0.0, zcum = 0.0, running = 0.0;
    for (long i = 0; i < trace.horizon(); ++i) {
        const auto& r = trace.rounds[static_cast<std::size_t>(i)];
        long t = r.t;
        cum += r.fx;
        if (have_z) zcum += r.f.value(summary.comparator);

        double bound_t = 0.0;
        if (br && have_z) {
            const auto& sch = cfg.schedule;
            double K = br->K.value_or(summary.bounds.empty() ? 0.0
                                                             : summary.bounds.front().K_realized);
            double L2 = br->L * br->L;
            switch (br->kind) {
                case BoundKind::ftl_log:
                case BoundKind::omd_log:
                    bound_t = L2 / (2.0 * br->M.value_or(1.0)) *
                              (std::log(static_cast<double>(t)) + 1.0);
                    break;
                case BoundKind::ftrl_sqrt:
                case BoundKind::composite_ftrl:
                    running += L2 * (t == 1 ? sch.eta0() : sch.eta(t - 1)) / 2.0;
                    bound_t = (br->kind == BoundKind::ftrl_sqrt ? K : 2.0 * K) / sch.eta(t) +
                              running;
                    break;
                case BoundKind::dsomd_sqrt:
                case BoundKind::composite_dsomd:
                    running += sch.eta(t) * L2 / 2.0;
                    bound_t = K / sch.eta(t + 1) + running;
                    break;
            }
        }

        // per-round ledger slack: theoretical per-round cap minus realized quantity
        double slack_t = 0.0;
        if (br && summary.ledger_kind == "dsomd") {
            slack_t = r.eta * r.eta * br->L * br->L / 2.0 - r.d_x_w;
        } else if (br && summary.ledger_kind == "strong_ftrl" &&
                   static_cast<std::size_t>(i) < summary.ledger.per_round.size()) {
            double q = summary.ledger.per_round[static_cast<std::size_t>(i)];
            double cap;
            if (br->kind == BoundKind::ftl_log || br->kind == BoundKind::omd_log) {
                cap = br->L * br->L / (2.0 * br->M.value_or(1.0) * t);
            } else {
                const auto& sch = cfg.schedule;
                const Vector& xnext = trace.iterates[static_cast<std::size_t>(t)];
                cap = br->L * br->L * (t == 1 ? sch.eta0() : sch.eta(t - 1)) / 2.0;
                if (trace.cfg.R) {
                    double inv = 1.0 / sch.eta(t);
                    double invp = 1.0 / (t == 1 ? sch.eta0() : sch.eta(t - 1));
                    cap += (inv - invp) *
                           (trace.cfg.R->value(r.x) - trace.cfg.R->value(xnext));
                }
                if (!cfg.psi.is_zero())
                    cap += cfg.psi.value(r.x) - cfg.psi.value(xnext);
            }
            slack_t = cap - q;
        }

        csv << t << ',' << fmt12(r.eta) << ',' << fmt12(r.gamma) << ',' << fmt12(r.fx) << ','
            << fmt12(cum) << ',' << fmt12(zcum) << ',' << fmt12(cum - zcum) << ','
            << fmt12(bound_t) << ',' << fmt12(slack_t) << '\n';
    }
    csv.close();

    std::ofstream js(json_path);
    if (!js) throw std::runtime_error("emit_outputs: cannot write " + json_path);
    js << summary_to_json(summary);
    js.close();
}

std::string summary_to_json(const SummaryRecord& s) {
    std::string o = "{";
    o += "\"scenario\":\"" + json_escape(s.scenario) + "\"";
    o += ",\"status\":\"" + s.status + "\"";
    if (!s.error.empty()) o += ",\"error\":\"" + json_escape(s.error) + "\"";
    o += ",\"algorithm\":\"" + algorithm_name(s.algo) + "\"";
    o += ",\"T\":" + std::to_string(s.T);
    o += ",\"seed\":" + std::to_string(s.seed);
    o += ",\"config_digest\":\"" + s.digest + "\"";
    o += ",\"rounds_completed\":" + std::to_string(s.rounds_completed);
    o += ",\"comparator\":[";
    for (std::size_t i = 0; i < s.comparator.size(); ++i)
        o += (i ? "," : "") + fmt12(s.comparator[i]);
    o += "]";
    o += ",\"K_realized\":" + fmt12(s.K_realized);
    o += ",\"realized_regret\":" + fmt12(s.realized_regret);
    o += ",\"composite_regret\":" + fmt12(s.composite_regret_value);
    o += ",\"bounds\":[";
    for (std::size_t i = 0; i < s.bounds.size(); ++i) {
        const auto& b = s.bounds[i];
        o += (i ? "," : "");
        o += "{\"kind\":\"" + bound_kind_name(b.kind) + "\"";
        o += ",\"L\":" + fmt12(b.L);
        o += ",\"M\":" + fmt12(b.M);
        o += ",\"K\":" + fmt12(b.K_used);
        o += ",\"K_realized\":" + fmt12(b.K_realized);
        o += std::string(",\"k_valid\":") + (b.k_valid ? "true" : "false");
        o += ",\"bound_value\":" + fmt12(b.bound_value);
        if (b.closed_form) o += ",\"closed_form\":" + fmt12(*b.closed_form);
        o += ",\"realized\":" + fmt12(b.realized);
        o += ",\"slack\":" + fmt12(b.slack);
        o += ",\"tolerance\":" + fmt12(b.tolerance);
        o += std::string(",\"satisfied\":") + (b.satisfied ? "true" : "false");
        o += "}";
    }
    o += "]";
    o += ",\"ledger\":{\"kind\":\"" + s.ledger_kind + "\"";
    if (s.ledger_kind != "none") {
        o += ",\"realized\":" + fmt12(s.ledger.realized);
        o += ",\"rhs\":" + fmt12(s.ledger.rhs);
        o += ",\"slack\":" + fmt12(s.ledger.slack);
        o += ",\"tolerance\":" + fmt12(s.ledger.tolerance);
        o += ",\"max_per_round_violation\":" + fmt12(s.ledger.max_per_round_violation);
        o += std::string(",\"aggregate_checked\":") +
             (s.ledger.aggregate_checked ? "true" : "false");
        o += std::string(",\"holds\":") + (s.ledger.holds ? "true" : "false");
    }
    o += "}";
    o += ",\"max_ledger_violation\":" + fmt12(s.max_ledger_violation);
    o += ",\"certificates\":[";
    for (std::size_t i = 0; i < s.certificates.size(); ++i) {
        const auto& c = s.certificates[i];
        o += (i ? "," : "");
        o += "{\"type\":\"" + c.type + "\",\"constant\":" + fmt12(c.constant) +
             ",\"samples\":" + std::to_string(c.samples) +
             ",\"max_violation\":" + fmt12(c.max_violation) + ",\"valid\":" +
             (c.valid ? "true" : "false") + "}";
    }
    o += "]";
    o += ",\"solver_residual_sum\":" + fmt12(s.residual_sum);
    o += ",\"runtime_seconds\":" + fmt12(s.runtime_seconds);
    o += ",\"outputs\":{\"csv\":\"" + json_escape(s.csv_path) + "\",\"json\":\"" +
         json_escape(s.json_path) + "\"}";
    return o + "}";
}

} // namespace ocol
