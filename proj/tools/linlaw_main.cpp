// linlaw: law-based time-series feature transformation pipeline.
//
// Subcommands mirror the pipeline stages: convert a UCR archive pair into
// the directory layout, split it, train the law bank, transform the test
// set, classify, or run the whole repeated experiment. Every subcommand
// echoes its effective configuration to a sidecar file so a run can be
// reproduced from its outputs alone.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "linlaw/classify.hpp"
#include "linlaw/dataset.hpp"
#include "linlaw/text.hpp"
#include "linlaw/transform.hpp"

namespace fs = std::filesystem;

namespace {

using KeyValues = std::vector<std::pair<std::string, std::string>>;

void write_config_sidecar(const fs::path& path, const KeyValues& entries) {
    std::string out;
    for (const auto& [key, value] : entries) out += key + "=" + value + "\n";
    linlaw::write_text_file(path, out);
}

unsigned default_workers() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

struct ConvertArgs {
    std::string train_file, test_file, out_dir;
};

struct SplitArgs {
    std::string data_dir, out_file;
    double test_ratio = 0.0;
    std::optional<std::uint64_t> seed;
};

struct LawsArgs {
    std::string data_dir, plan_file, out_file;
    std::size_t dim = 2;
    std::size_t lag = 1;
};

struct TransformArgs {
    std::string data_dir, plan_file, laws_file, out_file;
    std::size_t lag = 1;
    std::string select = "rank";
    unsigned workers = default_workers();
};

struct ClassifyArgs {
    std::string table_file, out_file;
};

struct ExperimentArgs {
    std::string data_dir, out_dir;
    std::size_t dim = 2;
    std::size_t lag = 1;
    double test_ratio = 0.0;
    std::string select = "rank";
    std::size_t repeats = 1;
    std::optional<std::uint64_t> seed;
    unsigned workers = default_workers();
};

int run_convert(const ConvertArgs& args) {
    const auto index = linlaw::convert_ucr(args.train_file, args.test_file, args.out_dir);
    write_config_sidecar(fs::path(args.out_dir) / "convert.config",
                         {{"command", "convert"},
                          {"train", args.train_file},
                          {"test", args.test_file},
                          {"out", args.out_dir}});
    std::cout << index.instance_count() << " instances, " << index.class_count() << " classes\n";
    return 0;
}

int run_split(const SplitArgs& args) {
    const auto index = linlaw::scan_dataset(args.data_dir);
    const auto plan = linlaw::split(index, args.test_ratio, args.seed);
    linlaw::write_split_plan(plan, args.out_file);
    write_config_sidecar(args.out_file + ".config",
                         {{"command", "split"},
                          {"data", args.data_dir},
                          {"test_ratio", linlaw::format_double(args.test_ratio)},
                          {"seed", std::to_string(*plan.seed)},
                          {"generator", plan.generator},
                          {"out", args.out_file}});
    std::cout << "wrote " << args.out_file << ": tau=" << plan.tau
              << ", test=" << plan.test_count() << ", seed=" << *plan.seed << "\n";
    return 0;
}

int run_laws(const LawsArgs& args) {
    const auto index = linlaw::scan_dataset(args.data_dir);
    const auto plan = linlaw::read_split_plan(index, args.plan_file);
    const linlaw::EmbeddingConfig config{args.dim, args.lag};
    const auto bank = linlaw::train_laws(index, plan, config);
    linlaw::write_law_bank_csv(bank, args.out_file);
    write_config_sidecar(args.out_file + ".config",
                         {{"command", "laws"},
                          {"data", args.data_dir},
                          {"plan", args.plan_file},
                          {"dim", std::to_string(args.dim)},
                          {"lag", std::to_string(args.lag)},
                          {"out", args.out_file}});
    std::cout << "wrote " << args.out_file << ": " << bank.total_laws() << " laws\n";
    return 0;
}

int run_transform(const TransformArgs& args) {
    const auto criterion = linlaw::parse_select_criterion(args.select);
    const auto index = linlaw::scan_dataset(args.data_dir);
    const auto plan = linlaw::read_split_plan(index, args.plan_file);
    const auto bank = linlaw::read_law_bank_csv(args.laws_file, args.lag);
    const auto table = linlaw::transform_test(index, plan, bank, criterion,
                                              linlaw::InstanceSource{}, args.workers);
    linlaw::write_table_csv(table, args.out_file);
    linlaw::write_selection_csv(table, args.out_file + ".selection.csv");
    write_config_sidecar(args.out_file + ".config",
                         {{"command", "transform"},
                          {"data", args.data_dir},
                          {"plan", args.plan_file},
                          {"laws", args.laws_file},
                          {"lag", std::to_string(args.lag)},
                          {"select", args.select},
                          {"workers", std::to_string(args.workers)},
                          {"out", args.out_file}});
    std::cout << "wrote " << args.out_file << ": " << table.rows() << " rows, "
              << table.law_column_count() + 1 << " columns (plus block metadata)\n";
    return 0;
}

int run_classify(const ClassifyArgs& args) {
    const auto table = linlaw::read_table_csv(args.table_file);
    const auto predictions = linlaw::abs_mean_classify(table);
    std::string out = "instance_id,label,predicted\n";
    std::vector<std::string> predicted, truth;
    for (const auto& p : predictions) {
        out += p.instance_id + ',' + p.truth + ',' + p.predicted + '\n';
        predicted.push_back(p.predicted);
        truth.push_back(p.truth);
    }
    linlaw::write_text_file(args.out_file, out);
    write_config_sidecar(args.out_file + ".config", {{"command", "classify"},
                                                     {"table", args.table_file},
                                                     {"out", args.out_file}});
    std::cout << "wrote " << args.out_file
              << ": accuracy=" << linlaw::format_double(linlaw::accuracy(predicted, truth))
              << "\n";
    return 0;
}

int run_experiment(const ExperimentArgs& args) {
    linlaw::ExperimentConfig cfg;
    cfg.dataset_root = args.data_dir;
    cfg.embedding = {args.dim, args.lag};
    cfg.test_ratio = args.test_ratio;
    cfg.criterion = linlaw::parse_select_criterion(args.select);
    cfg.repeats = args.repeats;
    cfg.base_seed = args.seed ? *args.seed : std::random_device{}();
    cfg.workers = args.workers;

    const auto summary = linlaw::run_experiment(cfg);

    const fs::path out_dir(args.out_dir);
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec)
        linlaw::fail(linlaw::ErrorCode::IoError,
                     "cannot create " + out_dir.string() + ": " + ec.message());
    linlaw::write_runs_csv(summary, out_dir / "runs.csv");
    linlaw::write_summary_txt(cfg, summary, out_dir / "summary.txt");
    linlaw::write_histogram_csv(summary, out_dir / "histogram.csv");
    write_config_sidecar(out_dir / "config.txt",
                         {{"command", "experiment"},
                          {"data", args.data_dir},
                          {"dim", std::to_string(args.dim)},
                          {"lag", std::to_string(args.lag)},
                          {"test_ratio", linlaw::format_double(args.test_ratio)},
                          {"select", args.select},
                          {"repeats", std::to_string(args.repeats)},
                          {"base_seed", std::to_string(cfg.base_seed)},
                          {"workers", std::to_string(args.workers)},
                          {"out", args.out_dir}});
    std::cout << "mean=" << linlaw::format_double(summary.mean)
              << " std=" << linlaw::format_double(summary.stddev) << " over " << cfg.repeats
              << " runs -> " << args.out_dir << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Law-based time-series feature space transformation"};
    app.require_subcommand(1);

    ConvertArgs convert_args;
    auto* convert = app.add_subcommand("convert", "Convert a UCR train/test pair into a dataset tree");
    convert->add_option("--train", convert_args.train_file, "UCR training file")->required();
    convert->add_option("--test", convert_args.test_file, "UCR test file")->required();
    convert->add_option("--out", convert_args.out_dir, "Output dataset directory")->required();

    SplitArgs split_args;
    auto* split = app.add_subcommand("split", "Write a seeded class-balanced split plan");
    split->add_option("--data", split_args.data_dir, "Dataset directory")->required();
    split->add_option("--test-ratio", split_args.test_ratio, "Fraction of each class for testing")
        ->required();
    split->add_option("--seed", split_args.seed, "PRNG seed (default: from system entropy)");
    split->add_option("--out", split_args.out_file, "Plan file to write")->required();

    LawsArgs laws_args;
    auto* laws = app.add_subcommand("laws", "Extract the law bank from the training set");
    laws->add_option("--data", laws_args.data_dir, "Dataset directory")->required();
    laws->add_option("--plan", laws_args.plan_file, "Split plan file")->required();
    laws->add_option("--dim", laws_args.dim, "Embedding window length (>= 2)")->required();
    laws->add_option("--lag", laws_args.lag, "Embedding row lag")->capture_default_str();
    laws->add_option("--out", laws_args.out_file, "Law bank CSV to write")->required();

    TransformArgs transform_args;
    auto* transform = app.add_subcommand("transform", "Transform the test set with a law bank");
    transform->add_option("--data", transform_args.data_dir, "Dataset directory")->required();
    transform->add_option("--plan", transform_args.plan_file, "Split plan file")->required();
    transform->add_option("--laws", transform_args.laws_file, "Law bank CSV")->required();
    transform->add_option("--lag", transform_args.lag, "Row lag used when the laws were built")
        ->capture_default_str();
    transform->add_option("--select", transform_args.select, "Column selection: rank, var, or mean")
        ->capture_default_str();
    transform->add_option("--workers", transform_args.workers, "Concurrent instance workers")
        ->capture_default_str();
    transform->add_option("--out", transform_args.out_file, "Table CSV to write")->required();

    ClassifyArgs classify_args;
    auto* classify = app.add_subcommand("classify", "Apply the absolute-mean rule to a table");
    classify->add_option("--table", classify_args.table_file, "Transformed table CSV")->required();
    classify->add_option("--out", classify_args.out_file, "Predictions CSV to write")->required();

    ExperimentArgs experiment_args;
    auto* experiment =
        app.add_subcommand("experiment", "Repeated split/train/transform/classify runs");
    experiment->add_option("--data", experiment_args.data_dir, "Dataset directory")->required();
    experiment->add_option("--dim", experiment_args.dim, "Embedding window length (>= 2)")
        ->required();
    experiment->add_option("--lag", experiment_args.lag, "Embedding row lag")
        ->capture_default_str();
    experiment->add_option("--test-ratio", experiment_args.test_ratio,
                           "Fraction of each class for testing")
        ->required();
    experiment->add_option("--select", experiment_args.select,
                           "Column selection: rank, var, or mean")
        ->capture_default_str();
    experiment->add_option("--repeats", experiment_args.repeats, "Number of runs")->required();
    experiment->add_option("--seed", experiment_args.seed,
                           "Base seed; run r uses seed + r (default: from system entropy)");
    experiment->add_option("--workers", experiment_args.workers, "Concurrent runs")
        ->capture_default_str();
    experiment->add_option("--out", experiment_args.out_dir, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (convert->parsed()) return run_convert(convert_args);
        if (split->parsed()) return run_split(split_args);
        if (laws->parsed()) return run_laws(laws_args);
        if (transform->parsed()) return run_transform(transform_args);
        if (classify->parsed()) return run_classify(classify_args);
        if (experiment->parsed()) return run_experiment(experiment_args);
    } catch (const linlaw::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.code() == linlaw::ErrorCode::NumericalFailure ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
