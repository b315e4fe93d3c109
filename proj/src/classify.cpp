#include "linlaw/classify.hpp"

#include <cmath>
#include <cstdio>

#include "linlaw/parallel.hpp"
#include "linlaw/text.hpp"

namespace fs = std::filesystem;

namespace linlaw {

namespace {

constexpr double kHistogramBinWidth = 0.02;
constexpr std::size_t kHistogramBins = 50;

void check_table_shape(const TransformedTable& table) {
    const std::size_t c = table.class_order.size();
    const std::size_t m = table.feature_names.size();
    if (c == 0 || m == 0 || table.block_rows == 0)
        fail(ErrorCode::MalformedTable, "table is missing its class or feature metadata");
    if (table.column_names.size() != m * c)
        fail(ErrorCode::MalformedTable, "table has " + std::to_string(table.column_names.size()) +
                                            " law columns, expected " + std::to_string(m * c));
    if (table.rows() == 0 || table.rows() % table.block_rows != 0)
        fail(ErrorCode::MalformedTable, "table rows do not form whole instance blocks");
    if (table.values.size() != table.rows() * table.column_names.size() ||
        table.instance_ids.size() != table.rows() || table.row_indices.size() != table.rows())
        fail(ErrorCode::MalformedTable, "table metadata columns are ragged");
    for (std::size_t r = 0; r < table.rows(); ++r) {
        if (table.row_indices[r] != r % table.block_rows)
            fail(ErrorCode::MalformedTable, "row_index sequence is not 0.." +
                                                std::to_string(table.block_rows - 1) +
                                                " per block");
        if (r % table.block_rows != 0 &&
            (table.instance_ids[r] != table.instance_ids[r - 1] ||
             table.labels[r] != table.labels[r - 1]))
            fail(ErrorCode::MalformedTable, "instance block metadata changes mid-block");
    }
}

std::string format_bin_edge(double edge) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", edge);
    return buf;
}

} // namespace

std::vector<Prediction> abs_mean_classify(const TransformedTable& table) {
    check_table_shape(table);

    const std::size_t c = table.class_order.size();
    const std::size_t l = table.block_rows;
    const std::size_t m = table.feature_names.size();
    const std::size_t blocks = table.rows() / l;

    std::vector<Prediction> out;
    out.reserve(blocks);
    for (std::size_t b = 0; b < blocks; ++b) {
        const std::size_t first_row = b * l;
        std::size_t best_class = 0;
        double best_score = 0.0;
        for (std::size_t ci = 0; ci < c; ++ci) {
            double sum = 0.0;
            for (std::size_t row = first_row; row < first_row + l; ++row)
                for (std::size_t j = 0; j < m; ++j)
                    sum += std::abs(table.value(row, j * c + ci));
            const double score = sum / static_cast<double>(l * m);
            if (ci == 0 || score < best_score) {
                best_score = score;
                best_class = ci;
            }
        }
        out.push_back({table.instance_ids[first_row], table.labels[first_row],
                       table.class_order[best_class]});
    }
    return out;
}

double accuracy(const std::vector<std::string>& predictions,
                const std::vector<std::string>& truths) {
    if (predictions.size() != truths.size())
        fail(ErrorCode::LengthMismatch, "got " + std::to_string(predictions.size()) +
                                            " predictions for " + std::to_string(truths.size()) +
                                            " truths");
    if (predictions.empty()) fail(ErrorCode::LengthMismatch, "no predictions to score");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < predictions.size(); ++i)
        if (predictions[i] == truths[i]) ++hits;
    return static_cast<double>(hits) / static_cast<double>(predictions.size());
}

ExperimentSummary run_experiment(const ExperimentConfig& cfg) {
    if (cfg.repeats < 1) fail(ErrorCode::InvalidConfig, "repeats must be at least 1");
    validate(cfg.embedding);

    const DatasetIndex index = scan_dataset(cfg.dataset_root);
    const InstanceSource source = InstanceSource::preload(index);

    ExperimentSummary summary;
    summary.run_accuracies.assign(cfg.repeats, 0.0);
    summary.run_seeds.assign(cfg.repeats, 0);

    detail::parallel_for(cfg.repeats, cfg.workers, [&](std::size_t r) {
        const std::uint64_t seed = cfg.base_seed + r;
        summary.run_seeds[r] = seed;
        try {
            const SplitPlan plan = split(index, cfg.test_ratio, seed);
            const LawBank bank = train_laws(index, plan, cfg.embedding, source);
            const TransformedTable table =
                transform_test(index, plan, bank, cfg.criterion, source);
            const auto predictions = abs_mean_classify(table);
            std::vector<std::string> predicted, truth;
            predicted.reserve(predictions.size());
            truth.reserve(predictions.size());
            for (const auto& p : predictions) {
                predicted.push_back(p.predicted);
                truth.push_back(p.truth);
            }
            summary.run_accuracies[r] = accuracy(predicted, truth);
        } catch (const Error& e) {
            fail(e.code(), "run " + std::to_string(r) + " (seed " + std::to_string(seed) +
                               "): " + e.what());
        }
    });

    double sum = 0.0;
    for (double a : summary.run_accuracies) sum += a;
    summary.mean = sum / static_cast<double>(cfg.repeats);
    if (cfg.repeats > 1) {
        double ss = 0.0;
        for (double a : summary.run_accuracies) ss += (a - summary.mean) * (a - summary.mean);
        summary.stddev = std::sqrt(ss / static_cast<double>(cfg.repeats - 1));
        summary.stddev_defined = true;
    }

    std::vector<std::size_t> counts(kHistogramBins, 0);
    for (double a : summary.run_accuracies) {
        auto bin = static_cast<std::size_t>(a / kHistogramBinWidth);
        if (bin >= kHistogramBins) bin = kHistogramBins - 1; // accuracy 1.0 lands in the last bin
        ++counts[bin];
    }
    std::size_t last = 0;
    for (std::size_t i = 0; i < counts.size(); ++i)
        if (counts[i] > 0) last = i;
    for (std::size_t i = 0; i <= last; ++i)
        summary.histogram.push_back({static_cast<double>(i) * kHistogramBinWidth,
                                     static_cast<double>(i + 1) * kHistogramBinWidth, counts[i]});
    return summary;
}

void write_runs_csv(const ExperimentSummary& summary, const fs::path& path) {
    std::string out = "run_index,seed,accuracy\n";
    for (std::size_t r = 0; r < summary.run_accuracies.size(); ++r)
        out += std::to_string(r) + ',' + std::to_string(summary.run_seeds[r]) + ',' +
               format_double(summary.run_accuracies[r]) + '\n';
    write_text_file(path, out);
}

void write_summary_txt(const ExperimentConfig& cfg, const ExperimentSummary& summary,
                       const fs::path& path) {
    std::string out;
    out += "mean=" + format_double(summary.mean) + '\n';
    out += "std=" + format_double(summary.stddev) + '\n';
    out += std::string("std_defined=") + (summary.stddev_defined ? "1" : "0") + '\n';
    out += "repeats=" + std::to_string(cfg.repeats) + '\n';
    out += "data=" + cfg.dataset_root.string() + '\n';
    out += "dim=" + std::to_string(cfg.embedding.dim) + '\n';
    out += "lag=" + std::to_string(cfg.embedding.lag) + '\n';
    out += "test_ratio=" + format_double(cfg.test_ratio) + '\n';
    out += std::string("select=") + to_string(cfg.criterion) + '\n';
    out += "base_seed=" + std::to_string(cfg.base_seed) + '\n';
    out += "workers=" + std::to_string(cfg.workers) + '\n';
    write_text_file(path, out);
}

void write_histogram_csv(const ExperimentSummary& summary, const fs::path& path) {
    std::string out = "bin_low,bin_high,count\n";
    for (const auto& bin : summary.histogram)
        out += format_bin_edge(bin.low) + ',' + format_bin_edge(bin.high) + ',' +
               std::to_string(bin.count) + '\n';
    write_text_file(path, out);
}

} // namespace linlaw
