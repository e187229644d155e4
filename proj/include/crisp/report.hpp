#pragma once

#include <iosfwd>
#include <string>

#include "crisp/metrics.hpp"
#include "crisp/prior_estimator.hpp"
#include "crisp/trainer.hpp"

namespace crisp {

inline constexpr const char* kToolVersion = "0.1.0";

// Architecture selection lives beside TrainConfig in the config file; it is
// a CLI concern, not a trainer one.
struct ModelSpec {
    std::string arch = "linear";   // "linear" or "mlp"
    std::size_t hidden_dim = 128;  // used by "mlp"
};

struct RunConfig {
    TrainConfig train;
    ModelSpec model;
};

// key=value lines, one per key, doubles printed with %.17g so that
// parse(emit(cfg)) reproduces cfg exactly. Unknown keys are rejected.
std::string emit_config(const RunConfig& cfg);
RunConfig parse_config(std::istream& in);
RunConfig parse_config_file(const std::string& path);

bool config_equal(const RunConfig& a, const RunConfig& b);

// JSON report writers. Schemas are documented in the README.
std::string metrics_to_json(const MetricsReport& report);
std::string prior_estimate_to_json(const PriorEstimate& estimate);

struct RunReport {
    RunConfig config;
    TrainReport train;
    MetricsReport test_metrics;
    bool has_test_metrics = false;
    double total_seconds = 0.0;
};

std::string run_report_to_json(const RunReport& report);

}  // namespace crisp
