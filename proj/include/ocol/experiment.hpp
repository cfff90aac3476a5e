#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ocol/harness.hpp"

namespace ocol {

struct BoundRequest {
    BoundKind kind = BoundKind::ftrl_sqrt;
    double L = 1.0;
    std::optional<double> M;
    std::optional<double> K;
    bool operator==(const BoundRequest&) const = default;
};

struct CertifyRequest {
    enum class Type { lipschitz, strong_convexity };
    Type type = Type::lipschitz;
    double constant = 1.0;
    ReferenceFunction reference;
    int samples = 10000;
    std::uint64_t seed = 2024;
    bool operator==(const CertifyRequest&) const = default;
};

struct StreamSpec {
    LossStream::Kind kind = LossStream::Kind::fixed;
    LossFunction base;
    double scale_lo = 1.0, scale_hi = 1.0;
    std::optional<std::uint64_t> seed; // defaults to the experiment seed
    double bound = 1.0;
    std::vector<LossFunction> replay;
    bool operator==(const StreamSpec&) const = default;
};

// A fully declarative single experiment: what to run, how to check it,
// where to write the trace and summary.
struct ExperimentConfig {
    std::string scenario = "experiment";
    Algorithm algo = Algorithm::ftrl;
    std::optional<ReferenceFunction> reference;
    DomainSpec domain;
    StreamSpec stream;
    StepSchedule schedule;
    DsomdState::GammaMode gamma_mode = DsomdState::GammaMode::ratio;
    CompositeRegularizer psi;
    long T = 0;
    std::uint64_t seed = 0;
    std::optional<Vector> x0;
    int comparator_grid = 1001;
    std::vector<BoundRequest> bounds;
    std::vector<CertifyRequest> certify;
    std::string out_csv, out_json; // empty -> <scenario>_trace.csv / _summary.json

    std::vector<std::string> warnings; // populated by parse_config, not serialized

    bool operator==(const ExperimentConfig& o) const;
};

// JSON in, validated config out. Throws ParseError (with a field path) on
// malformed documents and ValidationError on out-of-range values.
ExperimentConfig parse_config(const std::string& text);

// Canonical JSON; parse_config(serialize_config(c)) == c.
std::string serialize_config(const ExperimentConfig& cfg);

// FNV-1a over the canonical serialization with output paths cleared.
std::string config_digest(const ExperimentConfig& cfg);

struct CertResult {
    std::string type;
    double constant = 0.0;
    int samples = 0;
    double max_violation = 0.0;
    bool valid = false;
};

struct SummaryRecord {
    std::string scenario, status, error;
    Algorithm algo = Algorithm::ftrl;
    long T = 0;
    std::uint64_t seed = 0;
    std::string digest;
    Vector comparator;
    double K_realized = 0.0;
    double realized_regret = 0.0;
    double composite_regret_value = 0.0;
    std::vector<BoundReport> bounds;
    std::string ledger_kind = "none";
    LedgerReport ledger;
    double max_ledger_violation = 0.0;
    std::vector<CertResult> certificates;
    double residual_sum = 0.0;
    double runtime_seconds = 0.0;
    long rounds_completed = 0;
    std::string csv_path, json_path;

    bool all_satisfied() const;
};

// Runs the experiment, evaluates bounds / ledgers / certificates, writes the
// per-round CSV and the JSON summary. Deterministic given the seed.
SummaryRecord run_experiment(const ExperimentConfig& cfg);

// CSV columns, in order:
//   t,eta_t,gamma_t,loss_t,cum_loss,comparator_cum_loss,regret_t,bound_t,ledger_slack_t
// Numbers carry 12 significant digits in both outputs.
void emit_outputs(const RunTrace& trace, const SummaryRecord& summary,
                  const ExperimentConfig& cfg, const std::string& csv_path,
                  const std::string& json_path);

std::string summary_to_json(const SummaryRecord& s);

} // namespace ocol
