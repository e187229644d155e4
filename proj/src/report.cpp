#include "crisp/report.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "crisp/errors.hpp"

namespace crisp {

namespace {

using nlohmann::json;

std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string join_doubles(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += fmt_double(v[i]);
    }
    return out;
}

std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    std::istringstream ss(s);
    std::string seg;
    while (std::getline(ss, seg, ',')) {
        if (seg.empty()) continue;
        char* end = nullptr;
        const double v = std::strtod(seg.c_str(), &end);
        if (end != seg.c_str() + seg.size())
            throw ParseError("malformed number in list: '" + seg + "'");
        out.push_back(v);
    }
    return out;
}

double parse_double_value(const std::string& key, const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size())
        throw ParseError("config key '" + key + "': malformed number '" + s + "'");
    return v;
}

std::uint64_t parse_uint_value(const std::string& key, const std::string& s) {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
        throw ParseError("config key '" + key + "': malformed integer '" + s + "'");
    return std::stoull(s);
}

json metrics_json(const MetricsReport& r) {
    return json{{"n", r.n},
                {"c", r.c},
                {"hamming_loss", r.hamming_loss},
                {"ranking_loss", r.ranking_loss},
                {"one_error", r.one_error},
                {"coverage", r.coverage},
                {"average_precision", r.average_precision},
                {"mean_average_precision", r.mean_average_precision},
                {"excluded",
                 {{"ranking_loss", r.ranking_excluded},
                  {"one_error", r.one_error_excluded},
                  {"coverage", r.coverage_excluded},
                  {"average_precision", r.avg_prec_excluded},
                  {"mean_average_precision_labels", r.map_labels_excluded}}}};
}

json config_json(const RunConfig& cfg) {
    json j{{"epochs", cfg.train.epochs},
           {"warmup_epochs", cfg.train.warmup_epochs},
           {"batch_size", cfg.train.batch_size},
           {"learning_rate", cfg.train.learning_rate},
           {"weight_decay", cfg.train.weight_decay},
           {"seed", cfg.train.seed},
           {"delta", cfg.train.estimator.delta},
           {"tau", cfg.train.estimator.tau},
           {"lambda", cfg.train.lambda},
           {"prior_refresh_every", cfg.train.prior_refresh_every},
           {"arch", cfg.model.arch},
           {"hidden_dim", cfg.model.hidden_dim}};
    if (cfg.train.fixed_priors) j["fixed_priors"] = *cfg.train.fixed_priors;
    return j;
}

}  // namespace

std::string emit_config(const RunConfig& cfg) {
    std::ostringstream out;
    out << "epochs=" << cfg.train.epochs << '\n';
    out << "warmup_epochs=" << cfg.train.warmup_epochs << '\n';
    out << "batch_size=" << cfg.train.batch_size << '\n';
    out << "learning_rate=" << fmt_double(cfg.train.learning_rate) << '\n';
    out << "weight_decay=" << fmt_double(cfg.train.weight_decay) << '\n';
    out << "seed=" << cfg.train.seed << '\n';
    out << "delta=" << fmt_double(cfg.train.estimator.delta) << '\n';
    out << "tau=" << fmt_double(cfg.train.estimator.tau) << '\n';
    out << "lambda=" << fmt_double(cfg.train.lambda) << '\n';
    out << "prior_refresh_every=" << cfg.train.prior_refresh_every << '\n';
    if (cfg.train.fixed_priors)
        out << "fixed_priors=" << join_doubles(*cfg.train.fixed_priors) << '\n';
    out << "arch=" << cfg.model.arch << '\n';
    out << "hidden_dim=" << cfg.model.hidden_dim << '\n';
    return out.str();
}

RunConfig parse_config(std::istream& in) {
    RunConfig cfg;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto start = line.find_first_not_of(" \t");
        if (start == std::string::npos || line[start] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError("config line " + std::to_string(line_no) + ": expected key=value");
        const std::string key = line.substr(start, eq - start);
        const std::string value = line.substr(eq + 1);

        if (key == "epochs")
            cfg.train.epochs = parse_uint_value(key, value);
        else if (key == "warmup_epochs")
            cfg.train.warmup_epochs = parse_uint_value(key, value);
        else if (key == "batch_size")
            cfg.train.batch_size = parse_uint_value(key, value);
        else if (key == "learning_rate")
            cfg.train.learning_rate = parse_double_value(key, value);
        else if (key == "weight_decay")
            cfg.train.weight_decay = parse_double_value(key, value);
        else if (key == "seed")
            cfg.train.seed = parse_uint_value(key, value);
        else if (key == "delta")
            cfg.train.estimator.delta = parse_double_value(key, value);
        else if (key == "tau")
            cfg.train.estimator.tau = parse_double_value(key, value);
        else if (key == "lambda")
            cfg.train.lambda = parse_double_value(key, value);
        else if (key == "prior_refresh_every")
            cfg.train.prior_refresh_every = parse_uint_value(key, value);
        else if (key == "fixed_priors")
            cfg.train.fixed_priors = parse_double_list(value);
        else if (key == "arch") {
            if (value != "linear" && value != "mlp")
                throw ParseError("config key 'arch' must be linear or mlp");
            cfg.model.arch = value;
        } else if (key == "hidden_dim")
            cfg.model.hidden_dim = parse_uint_value(key, value);
        else
            throw ParseError("unknown config key '" + key + "'");
    }
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config file: " + path);
    return parse_config(in);
}

bool config_equal(const RunConfig& a, const RunConfig& b) {
    return a.train.epochs == b.train.epochs && a.train.warmup_epochs == b.train.warmup_epochs &&
           a.train.batch_size == b.train.batch_size &&
           a.train.learning_rate == b.train.learning_rate &&
           a.train.weight_decay == b.train.weight_decay && a.train.seed == b.train.seed &&
           a.train.estimator.delta == b.train.estimator.delta &&
           a.train.estimator.tau == b.train.estimator.tau &&
           a.train.lambda == b.train.lambda &&
           a.train.prior_refresh_every == b.train.prior_refresh_every &&
           a.train.fixed_priors == b.train.fixed_priors && a.model.arch == b.model.arch &&
           a.model.hidden_dim == b.model.hidden_dim;
}

std::string metrics_to_json(const MetricsReport& report) {
    return metrics_json(report).dump(2) + "\n";
}

std::string prior_estimate_to_json(const PriorEstimate& estimate) {
    json labels = json::array();
    for (std::size_t j = 0; j < estimate.priors.size(); ++j) {
        labels.push_back(json{{"label", j},
                              {"prior", estimate.priors[j]},
                              {"threshold", estimate.thresholds[j]},
                              {"objective", estimate.objectives[j]},
                              {"labeled_count", estimate.labeled_counts[j]},
                              {"reused_previous", estimate.reused[j] != 0}});
    }
    json j{{"tool_version", kToolVersion},
           {"total_count", estimate.total_count},
           {"labels", labels}};
    return j.dump(2) + "\n";
}

std::string run_report_to_json(const RunReport& report) {
    json epochs = json::array();
    for (const auto& e : report.train.epochs) {
        json je{{"priors", e.priors},
                {"mean_loss", e.mean_loss},
                {"epoch_seconds", e.epoch_seconds},
                {"prior_estimation_seconds", e.prior_seconds}};
        if (e.prior_abs_error) je["prior_abs_error"] = *e.prior_abs_error;
        if (e.val_metrics) je["val_metrics"] = metrics_json(*e.val_metrics);
        epochs.push_back(std::move(je));
    }
    json j{{"tool_version", kToolVersion},
           {"config", config_json(report.config)},
           {"epochs", epochs},
           {"checkpoint", report.train.checkpoint_path},
           {"total_seconds", report.total_seconds}};
    if (report.train.true_priors) j["true_priors"] = *report.train.true_priors;
    if (report.has_test_metrics) j["test_metrics"] = metrics_json(report.test_metrics);
    return j.dump(2) + "\n";
}

}  // namespace crisp
