#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "linlaw/dataset.hpp"

namespace linlaw {

/// Column-selection rule applied per (feature, class) group of the law
/// response matrix.
enum class SelectCriterion {
    Rank, // smallest sum of the variance rank and |mean| rank
    Var,  // smallest sample variance
    Mean, // smallest absolute mean
};

SelectCriterion parse_select_criterion(const std::string& name);
const char* to_string(SelectCriterion criterion);

/// All training laws, grouped per feature. Within a feature the columns
/// are ordered by class (index order) and then by instance id, so the
/// layout is reproducible from the plan alone.
struct LawBank {
    struct Column {
        std::string class_label;
        std::string instance_id;
        double eigenvalue = 0.0;
        bool degenerate = false;
    };

    EmbeddingConfig config;
    std::vector<std::string> feature_names;
    std::vector<std::string> class_order;
    std::vector<Matrix> laws;                       // per feature: dim x tau
    std::vector<std::vector<Column>> columns;       // per feature, parallel to law columns

    std::size_t total_laws() const;
};

/// Extracts one law per (training instance, feature).
LawBank train_laws(const DatasetIndex& index, const SplitPlan& plan,
                   const EmbeddingConfig& config,
                   const InstanceSource& source = InstanceSource{});

/// P = S * V for one feature's law matrix.
Matrix law_response(const SymmetricMatrix& test_gram, const Matrix& bank_feature);

struct SelectedColumn {
    std::size_t column_index = 0; // into the feature's law matrix
    std::vector<double> values;
};

/// Picks the winning response column for every class in `class_order`.
/// Ties are broken toward the lowest column index at every stage.
std::vector<SelectedColumn> select_columns(const Matrix& response,
                                           const std::vector<LawBank::Column>& columns,
                                           const std::vector<std::string>& class_order,
                                           SelectCriterion criterion);

/// Which training law won a (test instance, feature, class) slot.
struct SelectionRecord {
    std::string instance_id;
    std::string feature;
    std::string class_label;
    std::string law_instance_id;
    std::size_t column_index = 0;
};

/// The transformed feature space: one l-row block per test instance, one
/// numeric column per (feature, class) pair, plus the true label and the
/// (instance_id, row_index) block metadata.
struct TransformedTable {
    std::vector<std::string> feature_names;
    std::vector<std::string> class_order;
    std::size_t block_rows = 0; // dim

    std::vector<std::string> column_names; // law_<feature>_<class>, feature-major
    std::vector<double> values;            // row-major, rows() x column_names.size()
    std::vector<std::string> labels;       // per row
    std::vector<std::string> instance_ids; // per row
    std::vector<std::size_t> row_indices;  // per row, 0..block_rows-1

    std::vector<SelectionRecord> selections;

    std::size_t rows() const noexcept { return labels.size(); }
    std::size_t law_column_count() const noexcept { return column_names.size(); }
    double value(std::size_t row, std::size_t col) const {
        return values[row * column_names.size() + col];
    }
};

/// Transforms every test instance of the plan with the given bank. Blocks
/// are emitted class by class, instances in id order. `workers` > 1
/// computes instance blocks concurrently; the output is identical either
/// way.
TransformedTable transform_test(const DatasetIndex& index, const SplitPlan& plan,
                                const LawBank& bank, SelectCriterion criterion,
                                const InstanceSource& source = InstanceSource{},
                                unsigned workers = 1);

void write_law_bank_csv(const LawBank& bank, const std::filesystem::path& path);

/// Parses a law bank file. The embedding width is recovered from the v_*
/// columns; the row lag is not serialized and must be supplied by the
/// caller (it has to match the lag the laws were built with).
LawBank read_law_bank_csv(const std::filesystem::path& path, std::size_t lag);

void write_table_csv(const TransformedTable& table, const std::filesystem::path& path);
TransformedTable read_table_csv(const std::filesystem::path& path);

void write_selection_csv(const TransformedTable& table, const std::filesystem::path& path);

} // namespace linlaw
