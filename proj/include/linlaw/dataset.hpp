#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "linlaw/core.hpp"

namespace linlaw {

struct InstanceRef {
    std::string class_label;
    std::string instance_id; // file stem
    std::filesystem::path path;
};

/// Sorted view of a dataset directory: one subdirectory per class, one
/// tab-separated instance file per instance, identical feature headers
/// everywhere.
struct DatasetIndex {
    std::filesystem::path root;
    std::vector<std::string> classes;                  // lexicographic
    std::vector<std::vector<InstanceRef>> instances;   // parallel to classes, sorted by file name
    std::vector<std::string> feature_names;

    std::size_t class_count() const noexcept { return classes.size(); }
    std::size_t instance_count() const;
    std::size_t feature_count() const noexcept { return feature_names.size(); }
};

/// Indexes `root`. Classes are the immediate subdirectories; every
/// instance file must declare the same feature names in the same order.
/// Throws EmptyDataset when there are no classes or a class is empty,
/// HeaderMismatch when headers differ.
DatasetIndex scan_dataset(const std::filesystem::path& root);

/// Parses one instance file into one TimeSeries per feature column.
/// Throws ParseError on non-numeric or missing cells, ragged rows, or
/// columns shorter than 2 samples.
std::vector<TimeSeries> load_instance(const InstanceRef& ref);

struct ClassSplit {
    std::string class_label;
    std::vector<InstanceRef> train; // sorted by instance_id
    std::vector<InstanceRef> test;  // sorted by instance_id
};

struct SplitPlan {
    std::vector<ClassSplit> classes; // same order as the index
    std::size_t tau = 0;             // total training instances
    double test_ratio = 0.0;
    std::optional<std::uint64_t> seed; // absent for manual plans
    std::string generator;             // e.g. "mt19937_64-fisher-yates"

    std::size_t test_count() const;
};

/// Seeded class-balanced split: per class, a deterministic shuffle assigns
/// clamp(round(n_c * test_ratio), 1, n_c - 1) instances to the test set.
/// Without a seed one is drawn from the system entropy source and recorded
/// in the plan. Throws InvalidRatio unless 0 < test_ratio < 1 and
/// SplitInfeasible when there are fewer than 2 classes or a class has
/// fewer than 2 instances.
SplitPlan split(const DatasetIndex& index, double test_ratio,
                std::optional<std::uint64_t> seed = std::nullopt);

/// Converts a UCR-style pair of files (one instance per line: class label
/// first, then the sample values, tab- or comma-separated) into the
/// directory layout scan_dataset expects, merging train and test. Value
/// tokens are copied verbatim, so the conversion is text-exact. The output
/// directory must not already contain files.
DatasetIndex convert_ucr(const std::filesystem::path& train_file,
                         const std::filesystem::path& test_file,
                         const std::filesystem::path& out_root);

void write_split_plan(const SplitPlan& plan, const std::filesystem::path& path);

/// Reads a plan file and validates it against the index: same classes,
/// every instance assigned exactly once, at least one train and one test
/// instance per class.
SplitPlan read_split_plan(const DatasetIndex& index, const std::filesystem::path& path);

/// Optional in-memory copy of every instance, for harnesses that replay
/// the same dataset many times. Read-only after construction.
class InstanceSource {
public:
    InstanceSource() = default;

    static InstanceSource preload(const DatasetIndex& index);

    std::vector<TimeSeries> get(const InstanceRef& ref) const;

private:
    std::unordered_map<std::string, std::vector<TimeSeries>> cache_;
};

} // namespace linlaw
