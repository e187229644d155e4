// Command-line front end for the single-positive multi-label pipeline:
// synthetic data generation, splitting, masking, training, standalone prior
// estimation, and evaluation. Exit codes: 0 success, 2 usage/config error,
// 3 data-condition error.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "crisp/dataset.hpp"
#include "crisp/errors.hpp"
#include "crisp/report.hpp"
#include "crisp/synth.hpp"
#include "crisp/trainer.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;

using nlohmann::json;

void write_file(const std::string& path, const std::string& content) {
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw crisp::ParseError("cannot open for writing: " + path);
    out << content;
    if (!out) throw crisp::ParseError("failed writing: " + path);
}

std::vector<double> parse_priors_arg(const std::string& arg) {
    std::vector<double> priors;
    std::string seg;
    std::istringstream ss(arg);
    while (std::getline(ss, seg, ',')) {
        if (seg.empty()) continue;
        char* end = nullptr;
        const double v = std::strtod(seg.c_str(), &end);
        if (end != seg.c_str() + seg.size())
            throw crisp::ParseError("malformed prior value '" + seg + "'");
        priors.push_back(v);
    }
    return priors;
}

struct SynthArgs {
    std::size_t n = 1000, q = 10, c = 2;
    std::string priors;
    double separability = 1.0, correlation = 0.0;
    std::uint64_t seed = 0;
    std::string out;
};

int run_synth(const SynthArgs& args) {
    crisp::SynthConfig cfg;
    cfg.n = args.n;
    cfg.q = args.q;
    cfg.c = args.c;
    cfg.target_priors = parse_priors_arg(args.priors);
    cfg.separability = args.separability;
    cfg.label_correlation = args.correlation;
    cfg.seed = args.seed;
    if (cfg.target_priors.size() != cfg.c) throw crisp::ParseError("prior count mismatch");

    const auto result = crisp::generate(cfg);
    std::ostringstream data;
    crisp::write_dataset(result.data, data);
    write_file(args.out + "dataset.txt", data.str());

    json truth{{"n", cfg.n},
               {"q", cfg.q},
               {"c", cfg.c},
               {"seed", cfg.seed},
               {"separability", cfg.separability},
               {"label_correlation", cfg.label_correlation},
               {"target_priors", cfg.target_priors},
               {"realized_priors", result.realized_priors}};
    write_file(args.out + "truth.json", truth.dump(2) + "\n");
    std::cout << "wrote " << args.out << "dataset.txt (" << cfg.n << " x " << cfg.q << ", "
              << cfg.c << " labels) and " << args.out << "truth.json\n";
    return kExitOk;
}

struct SplitArgs {
    std::string in;
    std::size_t c = 0, q = 0;
    double train_frac = 0.8, val_frac = 0.1, test_frac = 0.1;
    std::uint64_t seed = 0;
};

int run_split(const SplitArgs& args) {
    const auto data = crisp::load_dataset_file(args.in, args.c, args.q);
    crisp::SplitSpec spec{args.train_frac, args.val_frac, args.test_frac, args.seed};
    const auto parts = crisp::split(data, spec);
    const std::pair<const crisp::MultiLabelDataset*, const char*> outputs[] = {
        {&parts.train, ".train"}, {&parts.val, ".val"}, {&parts.test, ".test"}};
    for (const auto& [part, suffix] : outputs) {
        std::ostringstream text;
        crisp::write_dataset(*part, text);
        write_file(args.in + suffix, text.str());
    }
    std::cout << "split sizes: train=" << parts.train.n() << " val=" << parts.val.n()
              << " test=" << parts.test.n() << "\n";
    return kExitOk;
}

struct MaskArgs {
    std::string in, out;
    std::size_t c = 0, q = 0;
    std::uint64_t seed = 0;
};

int run_mask(const MaskArgs& args) {
    const auto data = crisp::load_dataset_file(args.in, args.c, args.q);
    const auto masked = crisp::mask_single_positive(data, args.seed);
    std::ostringstream text;
    crisp::write_single_positive(masked.data, text);
    write_file(args.out, text.str());
    std::cout << "kept " << masked.data.n() << " instances, dropped_zero_positive="
              << masked.dropped << "\n";
    return kExitOk;
}

struct TrainArgs {
    std::string config_path, train_path, val_path, truth_path, fixed_priors, out;
    std::size_t c = 0, q = 0;
};

crisp::Classifier build_model(const crisp::ModelSpec& spec, std::size_t q, std::size_t c,
                              std::uint64_t seed) {
    if (spec.arch == "mlp") return crisp::make_one_hidden(q, spec.hidden_dim, c, seed);
    return crisp::make_linear(q, c, seed);
}

int run_train(const TrainArgs& args) {
    crisp::RunConfig cfg;
    if (!args.config_path.empty()) cfg = crisp::parse_config_file(args.config_path);
    if (!args.fixed_priors.empty()) {
        auto priors = parse_priors_arg(args.fixed_priors);
        if (priors.size() != args.c) throw crisp::ParseError("fixed prior count mismatch");
        cfg.train.fixed_priors = std::move(priors);
    }
    cfg.train.validate();

    const auto sp = crisp::load_single_positive_file(args.train_path, args.c, args.q);

    std::optional<crisp::MultiLabelDataset> val;
    if (!args.val_path.empty()) val = crisp::load_dataset_file(args.val_path, args.c, args.q);

    std::optional<std::vector<double>> truth;
    if (!args.truth_path.empty()) {
        std::ifstream in(args.truth_path);
        if (!in) throw crisp::ParseError("cannot open truth file: " + args.truth_path);
        json j;
        in >> j;
        truth = j.at("realized_priors").get<std::vector<double>>();
        if (truth->size() != args.c) throw crisp::ParseError("truth prior count mismatch");
    }

    const auto start = std::chrono::steady_clock::now();
    auto model = build_model(cfg.model, args.q, args.c, cfg.train.seed);
    auto [trained, train_report] =
        crisp::train(std::move(model), sp, cfg.train, val ? &*val : nullptr,
                     truth ? &*truth : nullptr);

    const std::string ckpt_path = args.out + "checkpoint.txt";
    const auto parent = std::filesystem::path(ckpt_path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    crisp::save_checkpoint(trained, ckpt_path);
    train_report.checkpoint_path = ckpt_path;

    crisp::RunReport report;
    report.config = cfg;
    report.train = std::move(train_report);
    report.total_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_file(args.out + "report.json", crisp::run_report_to_json(report));
    std::cout << "wrote " << ckpt_path << " and " << args.out << "report.json\n";
    return kExitOk;
}

struct EstimateArgs {
    std::string checkpoint, data_path, out;
    double delta = 0.01, tau = 0.01;
};

int run_estimate_priors(const EstimateArgs& args) {
    const auto model = crisp::load_checkpoint(args.checkpoint);
    const auto sp = crisp::load_single_positive_file(args.data_path, model.output_dim(),
                                                     model.input_dim());
    const auto probs = crisp::forward_probs(model, sp.features);
    const auto estimate =
        crisp::estimate_all_priors(probs, sp, crisp::EstimatorConfig{args.delta, args.tau});
    const std::string text = crisp::prior_estimate_to_json(estimate);
    if (args.out.empty())
        std::cout << text;
    else
        write_file(args.out, text);
    return kExitOk;
}

struct EvaluateArgs {
    std::string checkpoint, data_path, out;
};

int run_evaluate(const EvaluateArgs& args) {
    const auto model = crisp::load_checkpoint(args.checkpoint);
    std::ifstream in(args.data_path);
    if (!in) throw crisp::ParseError("cannot open file: " + args.data_path);
    const auto data = crisp::parse_dataset(in, model.output_dim(), model.input_dim());
    const auto report = crisp::evaluate(model, data);
    const std::string text = crisp::metrics_to_json(report);
    if (args.out.empty())
        std::cout << text;
    else
        write_file(args.out, text);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"single-positive multi-label training with class-prior estimation"};
    app.require_subcommand(1);

    SynthArgs synth_args;
    auto* synth = app.add_subcommand("synth", "generate a synthetic dataset with known priors");
    synth->add_option("--n", synth_args.n, "instances")->required();
    synth->add_option("--q", synth_args.q, "feature dimension")->required();
    synth->add_option("--c", synth_args.c, "label count")->required();
    synth->add_option("--priors", synth_args.priors, "comma-separated target priors")->required();
    synth->add_option("--separability", synth_args.separability, "margin scale");
    synth->add_option("--correlation", synth_args.correlation, "shared-direction mix in [0,1)");
    synth->add_option("--seed", synth_args.seed, "rng seed");
    synth->add_option("--out", synth_args.out, "output prefix")->required();

    SplitArgs split_args;
    auto* split = app.add_subcommand("split", "partition a dataset into train/val/test files");
    split->add_option("--in", split_args.in, "dataset file")->required();
    split->add_option("--c", split_args.c, "label count")->required();
    split->add_option("--q", split_args.q, "feature dimension")->required();
    split->add_option("--train-frac", split_args.train_frac);
    split->add_option("--val-frac", split_args.val_frac);
    split->add_option("--test-frac", split_args.test_frac);
    split->add_option("--seed", split_args.seed, "rng seed");

    MaskArgs mask_args;
    auto* mask = app.add_subcommand("mask", "keep one random positive label per instance");
    mask->add_option("--in", mask_args.in, "fully labeled dataset")->required();
    mask->add_option("--c", mask_args.c, "label count")->required();
    mask->add_option("--q", mask_args.q, "feature dimension")->required();
    mask->add_option("--seed", mask_args.seed, "rng seed");
    mask->add_option("--out", mask_args.out, "single-positive output file")->required();

    TrainArgs train_args;
    auto* train = app.add_subcommand("train", "run the full training loop");
    train->add_option("--config", train_args.config_path, "key=value config file");
    train->add_option("--train", train_args.train_path, "single-positive training file")
        ->required();
    train->add_option("--c", train_args.c, "label count")->required();
    train->add_option("--q", train_args.q, "feature dimension")->required();
    train->add_option("--val", train_args.val_path, "fully labeled validation file");
    train->add_option("--truth", train_args.truth_path, "priors sidecar from synth");
    train->add_option("--fixed-priors", train_args.fixed_priors,
                      "comma-separated priors; disables the estimator");
    train->add_option("--out", train_args.out, "output prefix")->required();

    EstimateArgs est_args;
    auto* est = app.add_subcommand("estimate-priors",
                                   "estimate class priors with an existing checkpoint");
    est->add_option("--checkpoint", est_args.checkpoint)->required();
    est->add_option("--data", est_args.data_path, "single-positive file")->required();
    est->add_option("--delta", est_args.delta);
    est->add_option("--tau", est_args.tau);
    est->add_option("--out", est_args.out, "report path (stdout if omitted)");

    EvaluateArgs eval_args;
    auto* eval = app.add_subcommand("evaluate", "compute metrics on a fully labeled set");
    eval->add_option("--checkpoint", eval_args.checkpoint)->required();
    eval->add_option("--data", eval_args.data_path, "fully labeled file")->required();
    eval->add_option("--out", eval_args.out, "report path (stdout if omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (synth->parsed()) return run_synth(synth_args);
        if (split->parsed()) return run_split(split_args);
        if (mask->parsed()) return run_mask(mask_args);
        if (train->parsed()) return run_train(train_args);
        if (est->parsed()) return run_estimate_priors(est_args);
        if (eval->parsed()) return run_evaluate(eval_args);
    } catch (const crisp::DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
