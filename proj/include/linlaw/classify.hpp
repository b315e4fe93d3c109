#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "linlaw/transform.hpp"

namespace linlaw {

struct Prediction {
    std::string instance_id;
    std::string truth;
    std::string predicted;
};

/// Absolute-mean rule: per instance block, score every class by the mean
/// of |value| over the block's rows and that class's columns, and predict
/// the smallest score. Ties go to the lowest class index.
std::vector<Prediction> abs_mean_classify(const TransformedTable& table);

/// Fraction of exact matches. Throws LengthMismatch on unequal or empty
/// inputs.
double accuracy(const std::vector<std::string>& predictions,
                const std::vector<std::string>& truths);

struct ExperimentConfig {
    std::filesystem::path dataset_root;
    EmbeddingConfig embedding;
    double test_ratio = 0.1;
    SelectCriterion criterion = SelectCriterion::Rank;
    std::size_t repeats = 1;
    std::uint64_t base_seed = 0;
    unsigned workers = 1;
};

struct HistogramBin {
    double low = 0.0;
    double high = 0.0;
    std::size_t count = 0;
};

struct ExperimentSummary {
    std::vector<double> run_accuracies; // by run index
    std::vector<std::uint64_t> run_seeds;
    double mean = 0.0;
    double stddev = 0.0;       // sample standard deviation; 0 when undefined
    bool stddev_defined = false; // false for a single repeat
    std::vector<HistogramBin> histogram; // width 0.02 over [0,1], trailing empty bins trimmed
};

/// Runs the full pipeline `repeats` times with seeds base_seed + r.
/// Instances are loaded once up front; runs may execute concurrently and
/// the result is ordered by run index either way. Pipeline errors are
/// rethrown annotated with the run index and seed.
ExperimentSummary run_experiment(const ExperimentConfig& cfg);

void write_runs_csv(const ExperimentSummary& summary, const std::filesystem::path& path);
void write_summary_txt(const ExperimentConfig& cfg, const ExperimentSummary& summary,
                       const std::filesystem::path& path);
void write_histogram_csv(const ExperimentSummary& summary, const std::filesystem::path& path);

} // namespace linlaw
