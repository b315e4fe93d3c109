#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "linlaw/classify.hpp"
#include "linlaw/text.hpp"

using namespace linlaw;
using testutil::TempDir;

namespace {

/// Hand-built table: blocks[i] holds one value per law column, replicated
/// across `l` rows (enough structure for the classifier rule).
TransformedTable make_table(const std::vector<std::string>& features,
                            const std::vector<std::string>& classes, std::size_t l,
                            const std::vector<std::string>& block_labels,
                            const std::vector<std::vector<double>>& block_values) {
    TransformedTable t;
    t.feature_names = features;
    t.class_order = classes;
    t.block_rows = l;
    for (const auto& f : features)
        for (const auto& c : classes) t.column_names.push_back("law_" + f + "_" + c);
    for (std::size_t b = 0; b < block_values.size(); ++b) {
        for (std::size_t r = 0; r < l; ++r) {
            for (double v : block_values[b]) t.values.push_back(v);
            t.labels.push_back(block_labels[b]);
            t.instance_ids.push_back("inst_" + std::to_string(b));
            t.row_indices.push_back(r);
        }
    }
    return t;
}

} // namespace

TEST_CASE("abs_mean_classify picks the class with the smaller score") {
    SUBCASE("zero column wins") {
        const auto t = make_table({"x"}, {"c1", "c2"}, 3, {"c2"}, {{0.0, 0.5}});
        const auto p = abs_mean_classify(t);
        REQUIRE(p.size() == 1);
        CHECK(p[0].predicted == "c1");
        CHECK(p[0].truth == "c2");
        CHECK(p[0].instance_id == "inst_0");
    }
    SUBCASE("exact ties go to the lower class index") {
        const auto t = make_table({"x"}, {"c1", "c2"}, 2, {"c1"}, {{0.25, 0.25}});
        CHECK(abs_mean_classify(t)[0].predicted == "c1");
    }
    SUBCASE("scores average over every feature") {
        const auto t = make_table({"a", "b"}, {"c1", "c2"}, 4, {"c1"},
                                  {{0.1, 0.2, 0.1, 0.2}}); // c1 cols 0.1, c2 cols 0.2
        CHECK(abs_mean_classify(t)[0].predicted == "c1");
    }
    SUBCASE("negative magnitudes count as their absolute value") {
        const auto t = make_table({"x"}, {"c1", "c2"}, 2, {"c2"}, {{-0.9, 0.5}});
        CHECK(abs_mean_classify(t)[0].predicted == "c2");
    }
    SUBCASE("single class always wins") {
        const auto t = make_table({"x"}, {"only"}, 3, {"only", "only"}, {{0.4}, {123.0}});
        const auto p = abs_mean_classify(t);
        CHECK(p[0].predicted == "only");
        CHECK(p[1].predicted == "only");
    }
}

TEST_CASE("abs_mean_classify rejects malformed tables") {
    SUBCASE("ragged metadata") {
        auto t = make_table({"x"}, {"c1", "c2"}, 2, {"c1"}, {{0.1, 0.2}});
        t.row_indices.back() = 5;
        CHECK_FAILS_WITH(abs_mean_classify(t), ErrorCode::MalformedTable);
    }
    SUBCASE("label flips mid-block") {
        auto t = make_table({"x"}, {"c1", "c2"}, 2, {"c1"}, {{0.1, 0.2}});
        t.labels.back() = "c2";
        CHECK_FAILS_WITH(abs_mean_classify(t), ErrorCode::MalformedTable);
    }
    SUBCASE("column count disagrees with metadata") {
        auto t = make_table({"x"}, {"c1", "c2"}, 2, {"c1"}, {{0.1, 0.2}});
        t.feature_names.push_back("ghost");
        CHECK_FAILS_WITH(abs_mean_classify(t), ErrorCode::MalformedTable);
    }
}

TEST_CASE("uniform positive scaling leaves predictions unchanged") {
    TempDir dir("scaling");
    testutil::write_separable_dataset(dir.path(), 5, 20, 404);
    const auto index = scan_dataset(dir.path());
    const auto plan = split(index, 0.4, 8);
    const auto bank = train_laws(index, plan, {3, 1});
    auto table = transform_test(index, plan, bank, SelectCriterion::Rank);

    const auto before = abs_mean_classify(table);
    for (double& v : table.values) v *= 37.5;
    const auto after = abs_mean_classify(table);
    REQUIRE(before.size() == after.size());
    for (std::size_t i = 0; i < before.size(); ++i)
        CHECK(before[i].predicted == after[i].predicted);
}

TEST_CASE("accuracy counts exact matches") {
    CHECK(accuracy({"1", "1", "2"}, {"1", "2", "2"}) == doctest::Approx(2.0 / 3.0));
    CHECK(accuracy({"a", "b"}, {"a", "b"}) == 1.0);
    CHECK(accuracy({"a", "b"}, {"b", "a"}) == 0.0);
    CHECK_FAILS_WITH(accuracy({"a"}, {"a", "b"}), ErrorCode::LengthMismatch);
    CHECK_FAILS_WITH(accuracy({}, {}), ErrorCode::LengthMismatch);
}

TEST_CASE("run_experiment with a single repeat reports an undefined deviation") {
    TempDir dir("exp_single");
    testutil::write_separable_dataset(dir.path(), 4, 16, 7);
    ExperimentConfig cfg;
    cfg.dataset_root = dir.path();
    cfg.embedding = {3, 1};
    cfg.test_ratio = 0.25;
    cfg.repeats = 1;
    cfg.base_seed = 5;
    const auto summary = run_experiment(cfg);
    REQUIRE(summary.run_accuracies.size() == 1);
    CHECK(summary.mean == summary.run_accuracies[0]);
    CHECK(summary.stddev == 0.0);
    CHECK_FALSE(summary.stddev_defined);
}

TEST_CASE("separable synthetic data classifies perfectly across runs") {
    TempDir dir("exp_sep");
    testutil::write_separable_dataset(dir.path(), 10, 30, 1234);
    ExperimentConfig cfg;
    cfg.dataset_root = dir.path();
    cfg.embedding = {3, 1};
    cfg.test_ratio = 0.2;
    cfg.repeats = 10;
    cfg.base_seed = 99;
    const auto summary = run_experiment(cfg);
    CHECK(summary.mean == 1.0);
    for (double a : summary.run_accuracies) CHECK(a == 1.0);
    CHECK(summary.stddev == 0.0);
}

TEST_CASE("seed ladder is deterministic and worker-count independent") {
    TempDir dir("exp_det");
    testutil::write_separable_dataset(dir.path(), 6, 18, 31);
    ExperimentConfig cfg;
    cfg.dataset_root = dir.path();
    cfg.embedding = {3, 1};
    cfg.test_ratio = 0.3;
    cfg.repeats = 6;
    cfg.base_seed = 1000;

    const auto first = run_experiment(cfg);
    const auto second = run_experiment(cfg);
    CHECK(first.run_accuracies == second.run_accuracies);
    CHECK(first.run_seeds == second.run_seeds);

    cfg.workers = 4;
    const auto threaded = run_experiment(cfg);
    CHECK(first.run_accuracies == threaded.run_accuracies);

    // seeds follow base_seed + r
    for (std::size_t r = 0; r < first.run_seeds.size(); ++r)
        CHECK(first.run_seeds[r] == cfg.base_seed + r);
}

TEST_CASE("summary statistics are recomputable from the stored runs") {
    TempDir dir("exp_sum");
    testutil::write_separable_dataset(dir.path(), 5, 16, 77);
    ExperimentConfig cfg;
    cfg.dataset_root = dir.path();
    cfg.embedding = {3, 1};
    cfg.test_ratio = 0.4;
    cfg.repeats = 7;
    cfg.base_seed = 21;
    const auto summary = run_experiment(cfg);

    double sum = 0.0;
    for (double a : summary.run_accuracies) sum += a;
    const double mean = sum / static_cast<double>(summary.run_accuracies.size());
    CHECK(summary.mean == mean); // identical arithmetic, not approximate

    double ss = 0.0;
    for (double a : summary.run_accuracies) ss += (a - mean) * (a - mean);
    CHECK(summary.stddev == std::sqrt(ss / static_cast<double>(cfg.repeats - 1)));
}

TEST_CASE("experiment failures carry the run index and seed") {
    TempDir dir("exp_fail");
    testutil::write_separable_dataset(dir.path(), 3, 10, 3);
    ExperimentConfig cfg;
    cfg.dataset_root = dir.path();
    cfg.embedding = {12, 1}; // longer than every series
    cfg.test_ratio = 0.34;
    cfg.repeats = 2;
    cfg.base_seed = 40;
    try {
        run_experiment(cfg);
        FAIL("expected SeriesTooShort");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::SeriesTooShort);
        CHECK(std::string(e.what()).find("run 0") != std::string::npos);
        CHECK(std::string(e.what()).find("seed 40") != std::string::npos);
    }
}

TEST_CASE("histogram bins span the accuracy range with trailing bins trimmed") {
    TempDir dir("exp_hist");
    testutil::write_separable_dataset(dir.path(), 8, 24, 111);
    ExperimentConfig cfg;
    cfg.dataset_root = dir.path();
    cfg.embedding = {3, 1};
    cfg.test_ratio = 0.25;
    cfg.repeats = 5;
    cfg.base_seed = 7;
    const auto summary = run_experiment(cfg);

    REQUIRE(!summary.histogram.empty());
    // perfect accuracy lands in the final [0.98, 1.00] bin, so nothing trims
    CHECK(summary.histogram.size() == 50);
    CHECK(summary.histogram.back().count == 5);
    CHECK(summary.histogram.back().low == doctest::Approx(0.98));
    CHECK(summary.histogram.back().high == doctest::Approx(1.0));
    std::size_t total = 0;
    for (const auto& bin : summary.histogram) total += bin.count;
    CHECK(total == cfg.repeats);

    SUBCASE("output files are written") {
        TempDir out("exp_out");
        write_runs_csv(summary, out / "runs.csv");
        write_summary_txt(cfg, summary, out / "summary.txt");
        write_histogram_csv(summary, out / "histogram.csv");
        const auto runs = testutil::read_file(out / "runs.csv");
        CHECK(runs.starts_with("run_index,seed,accuracy\n"));
        CHECK(runs.find("0,7,1") != std::string::npos);
        const auto hist = testutil::read_file(out / "histogram.csv");
        CHECK(hist.starts_with("bin_low,bin_high,count\n"));
        CHECK(hist.find("0.98,1.00,5") != std::string::npos);
        const auto sum_txt = testutil::read_file(out / "summary.txt");
        CHECK(sum_txt.find("mean=1") != std::string::npos);
        CHECK(sum_txt.find("std_defined=1") != std::string::npos);
        CHECK(sum_txt.find("select=rank") != std::string::npos);
    }
}
