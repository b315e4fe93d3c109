#include "linlaw/transform.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "linlaw/parallel.hpp"
#include "linlaw/text.hpp"

namespace fs = std::filesystem;

namespace linlaw {

namespace {

double sample_variance(const std::vector<double>& v) {
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double sum = 0.0;
    for (double x : v) sum += (x - mean) * (x - mean);
    return sum / static_cast<double>(v.size() - 1);
}

double abs_mean(const std::vector<double>& v) {
    return std::abs(std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()));
}

/// Ordinal 1..q ranks, ascending by score; equal scores rank in column
/// order, i.e. the earlier column gets the better rank.
std::vector<std::size_t> ordinal_ranks(const std::vector<double>& scores) {
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&scores](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    std::vector<std::size_t> ranks(scores.size());
    for (std::size_t pos = 0; pos < order.size(); ++pos) ranks[order[pos]] = pos + 1;
    return ranks;
}

std::vector<InstanceRef> test_instances_in_order(const SplitPlan& plan) {
    std::vector<InstanceRef> refs;
    for (const auto& cs : plan.classes)
        refs.insert(refs.end(), cs.test.begin(), cs.test.end());
    return refs;
}

} // namespace

SelectCriterion parse_select_criterion(const std::string& name) {
    if (name == "rank") return SelectCriterion::Rank;
    if (name == "var") return SelectCriterion::Var;
    if (name == "mean") return SelectCriterion::Mean;
    fail(ErrorCode::InvalidConfig, "unknown select criterion '" + name +
                                       "' (expected rank, var, or mean)");
}

const char* to_string(SelectCriterion criterion) {
    switch (criterion) {
    case SelectCriterion::Rank: return "rank";
    case SelectCriterion::Var: return "var";
    case SelectCriterion::Mean: return "mean";
    }
    return "?";
}

std::size_t LawBank::total_laws() const {
    std::size_t n = 0;
    for (const auto& group : columns) n += group.size();
    return n;
}

LawBank train_laws(const DatasetIndex& index, const SplitPlan& plan,
                   const EmbeddingConfig& config, const InstanceSource& source) {
    validate(config);

    LawBank bank;
    bank.config = config;
    bank.feature_names = index.feature_names;
    bank.class_order = index.classes;

    const std::size_t m = index.feature_count();
    bank.laws.assign(m, Matrix(config.dim, plan.tau));
    bank.columns.assign(m, {});
    for (auto& group : bank.columns) group.reserve(plan.tau);

    std::size_t col = 0;
    for (const auto& cs : plan.classes) {
        for (const auto& ref : cs.train) {
            const auto series = source.get(ref);
            if (series.size() != m)
                fail(ErrorCode::HeaderMismatch,
                     ref.path.string() + " no longer matches the indexed feature set");
            for (std::size_t j = 0; j < m; ++j) {
                LinearLaw law;
                try {
                    law = linear_law(series[j], config,
                                     {ref.instance_id, index.feature_names[j], ref.class_label});
                } catch (const Error& e) {
                    fail(e.code(), std::string("training instance ") + ref.path.string() +
                                       ", feature '" + index.feature_names[j] + "': " + e.what());
                }
                for (std::size_t i = 0; i < config.dim; ++i)
                    bank.laws[j](i, col) = law.coefficients[i];
                bank.columns[j].push_back(
                    {law.class_label, law.instance_id, law.eigenvalue, law.degenerate});
            }
            ++col;
        }
    }
    return bank;
}

Matrix law_response(const SymmetricMatrix& test_gram, const Matrix& bank_feature) {
    if (test_gram.order() != bank_feature.rows())
        fail(ErrorCode::DimensionMismatch,
             "test Gram order " + std::to_string(test_gram.order()) +
                 " does not match law length " + std::to_string(bank_feature.rows()));
    return multiply(test_gram.dense(), bank_feature);
}

std::vector<SelectedColumn> select_columns(const Matrix& response,
                                           const std::vector<LawBank::Column>& columns,
                                           const std::vector<std::string>& class_order,
                                           SelectCriterion criterion) {
    if (columns.size() != response.cols())
        fail(ErrorCode::DimensionMismatch, "column metadata does not match response width");

    std::vector<SelectedColumn> selected;
    selected.reserve(class_order.size());
    for (const auto& class_label : class_order) {
        std::vector<std::size_t> group;
        for (std::size_t c = 0; c < columns.size(); ++c)
            if (columns[c].class_label == class_label) group.push_back(c);
        if (group.empty())
            fail(ErrorCode::EmptyGroup, "no law columns for class " + class_label);

        std::vector<std::vector<double>> vectors(group.size());
        for (std::size_t g = 0; g < group.size(); ++g) vectors[g] = response.column(group[g]);

        std::size_t winner = 0;
        if (criterion == SelectCriterion::Var) {
            double best = sample_variance(vectors[0]);
            for (std::size_t g = 1; g < group.size(); ++g)
                if (const double s = sample_variance(vectors[g]); s < best) {
                    best = s;
                    winner = g;
                }
        } else if (criterion == SelectCriterion::Mean) {
            double best = abs_mean(vectors[0]);
            for (std::size_t g = 1; g < group.size(); ++g)
                if (const double s = abs_mean(vectors[g]); s < best) {
                    best = s;
                    winner = g;
                }
        } else {
            std::vector<double> variances(group.size());
            std::vector<double> means(group.size());
            for (std::size_t g = 0; g < group.size(); ++g) {
                variances[g] = sample_variance(vectors[g]);
                means[g] = abs_mean(vectors[g]);
            }
            const auto var_ranks = ordinal_ranks(variances);
            const auto mean_ranks = ordinal_ranks(means);
            std::size_t best = var_ranks[0] + mean_ranks[0];
            for (std::size_t g = 1; g < group.size(); ++g)
                if (const std::size_t sum = var_ranks[g] + mean_ranks[g]; sum < best) {
                    best = sum;
                    winner = g;
                }
        }
        selected.push_back({group[winner], std::move(vectors[winner])});
    }
    return selected;
}

TransformedTable transform_test(const DatasetIndex& index, const SplitPlan& plan,
                                const LawBank& bank, SelectCriterion criterion,
                                const InstanceSource& source, unsigned workers) {
    if (bank.feature_names != index.feature_names)
        fail(ErrorCode::DimensionMismatch, "law bank features do not match the dataset");
    if (bank.class_order != index.classes)
        fail(ErrorCode::DimensionMismatch, "law bank classes do not match the dataset");

    const std::size_t m = index.feature_count();
    const std::size_t c = index.class_count();
    const std::size_t l = bank.config.dim;

    TransformedTable table;
    table.feature_names = index.feature_names;
    table.class_order = index.classes;
    table.block_rows = l;
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t ci = 0; ci < c; ++ci)
            table.column_names.push_back("law_" + index.feature_names[j] + "_" +
                                         index.classes[ci]);

    const auto refs = test_instances_in_order(plan);

    struct Block {
        std::vector<double> values; // l x (m*c), row-major
        std::vector<SelectionRecord> selections;
    };
    std::vector<Block> blocks(refs.size());

    detail::parallel_for(refs.size(), workers, [&](std::size_t r) {
        const InstanceRef& ref = refs[r];
        Block block;
        block.values.assign(l * m * c, 0.0);
        const auto series = source.get(ref);
        if (series.size() != m)
            fail(ErrorCode::HeaderMismatch,
                 ref.path.string() + " no longer matches the indexed feature set");
        for (std::size_t j = 0; j < m; ++j) {
            SymmetricMatrix gram;
            try {
                gram = gram_matrix(series[j], bank.config);
            } catch (const Error& e) {
                fail(e.code(), std::string("test instance ") + ref.path.string() +
                                   ", feature '" + index.feature_names[j] + "': " + e.what());
            }
            const Matrix response = law_response(gram, bank.laws[j]);
            const auto picks = select_columns(response, bank.columns[j], index.classes, criterion);
            for (std::size_t ci = 0; ci < c; ++ci) {
                for (std::size_t row = 0; row < l; ++row)
                    block.values[row * m * c + j * c + ci] = picks[ci].values[row];
                block.selections.push_back({ref.instance_id, index.feature_names[j],
                                            index.classes[ci],
                                            bank.columns[j][picks[ci].column_index].instance_id,
                                            picks[ci].column_index});
            }
        }
        blocks[r] = std::move(block);
    });

    table.values.reserve(refs.size() * l * m * c);
    for (std::size_t r = 0; r < refs.size(); ++r) {
        table.values.insert(table.values.end(), blocks[r].values.begin(), blocks[r].values.end());
        for (std::size_t row = 0; row < l; ++row) {
            table.labels.push_back(refs[r].class_label);
            table.instance_ids.push_back(refs[r].instance_id);
            table.row_indices.push_back(row);
        }
        table.selections.insert(table.selections.end(), blocks[r].selections.begin(),
                                blocks[r].selections.end());
    }
    return table;
}

void write_law_bank_csv(const LawBank& bank, const fs::path& path) {
    std::string out = "feature,class,instance,eigenvalue,degenerate";
    for (std::size_t i = 1; i <= bank.config.dim; ++i) out += ",v_" + std::to_string(i);
    out += '\n';
    for (std::size_t j = 0; j < bank.feature_names.size(); ++j) {
        for (std::size_t col = 0; col < bank.columns[j].size(); ++col) {
            const auto& meta = bank.columns[j][col];
            out += bank.feature_names[j] + ',' + meta.class_label + ',' + meta.instance_id + ',' +
                   format_double(meta.eigenvalue) + ',' + (meta.degenerate ? "1" : "0");
            for (std::size_t i = 0; i < bank.config.dim; ++i)
                out += ',' + format_double(bank.laws[j](i, col));
            out += '\n';
        }
    }
    write_text_file(path, out);
}

LawBank read_law_bank_csv(const fs::path& path, std::size_t lag) {
    const auto lines = read_lines(path);
    if (lines.empty()) fail(ErrorCode::ParseError, path.string() + ": empty law bank file");

    const auto header = split(lines[0], ',');
    const std::vector<std::string> fixed = {"feature", "class", "instance", "eigenvalue",
                                            "degenerate"};
    if (header.size() < fixed.size() + 2)
        fail(ErrorCode::ParseError, path.string() + ": law bank header too short");
    for (std::size_t i = 0; i < fixed.size(); ++i)
        if (header[i] != fixed[i])
            fail(ErrorCode::ParseError, path.string() + ": expected header column '" + fixed[i] +
                                            "', got '" + header[i] + "'");
    const std::size_t dim = header.size() - fixed.size();
    for (std::size_t i = 0; i < dim; ++i)
        if (header[fixed.size() + i] != "v_" + std::to_string(i + 1))
            fail(ErrorCode::ParseError, path.string() + ": malformed coefficient columns");

    LawBank bank;
    bank.config = {dim, lag};
    validate(bank.config);

    struct Row {
        std::string feature, class_label, instance;
        double eigenvalue;
        bool degenerate;
        std::vector<double> v;
    };
    std::vector<Row> rows;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (trim(lines[i]).empty() && i + 1 == lines.size()) continue;
        const std::string where = path.string() + ": line " + std::to_string(i + 1);
        const auto fields = split(lines[i], ',');
        if (fields.size() != header.size())
            fail(ErrorCode::ParseError, where + ": wrong field count");
        Row row;
        row.feature = fields[0];
        row.class_label = fields[1];
        row.instance = fields[2];
        const auto eig = parse_finite_double(fields[3]);
        if (!eig) fail(ErrorCode::ParseError, where + ": bad eigenvalue");
        row.eigenvalue = *eig;
        if (fields[4] != "0" && fields[4] != "1")
            fail(ErrorCode::ParseError, where + ": degenerate flag must be 0 or 1");
        row.degenerate = fields[4] == "1";
        for (std::size_t d = 0; d < dim; ++d) {
            const auto value = parse_finite_double(fields[fixed.size() + d]);
            if (!value) fail(ErrorCode::ParseError, where + ": bad coefficient");
            row.v.push_back(*value);
        }
        if (std::abs(norm2(row.v) - 1.0) > 1e-9)
            fail(ErrorCode::ParseError, where + ": law is not unit norm");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) fail(ErrorCode::ParseError, path.string() + ": no laws in file");

    // Rebuild the per-feature grouping, enforcing the bank column order:
    // features contiguous, classes ascending within a feature, instances
    // ascending within a class.
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const std::string where = path.string() + ": line " + std::to_string(i + 2);
        if (std::find(bank.feature_names.begin(), bank.feature_names.end(), rows[i].feature) ==
            bank.feature_names.end()) {
            bank.feature_names.push_back(rows[i].feature);
        } else if (rows[i].feature != rows[i - 1].feature) {
            fail(ErrorCode::ParseError, where + ": feature groups must be contiguous");
        }
        if (i > 0 && rows[i].feature == rows[i - 1].feature) {
            if (rows[i].class_label < rows[i - 1].class_label)
                fail(ErrorCode::ParseError, where + ": classes out of order");
            if (rows[i].class_label == rows[i - 1].class_label &&
                rows[i].instance <= rows[i - 1].instance)
                fail(ErrorCode::ParseError, where + ": instances out of order");
        }
    }

    bank.laws.assign(bank.feature_names.size(), Matrix());
    bank.columns.assign(bank.feature_names.size(), {});
    std::size_t feature_idx = 0;
    std::vector<std::vector<Row*>> grouped(bank.feature_names.size());
    for (auto& row : rows) {
        if (row.feature != bank.feature_names[feature_idx])
            feature_idx = static_cast<std::size_t>(
                std::find(bank.feature_names.begin(), bank.feature_names.end(), row.feature) -
                bank.feature_names.begin());
        grouped[feature_idx].push_back(&row);
    }

    for (std::size_t j = 0; j < grouped.size(); ++j) {
        bank.laws[j] = Matrix(dim, grouped[j].size());
        for (std::size_t col = 0; col < grouped[j].size(); ++col) {
            const Row& row = *grouped[j][col];
            for (std::size_t d = 0; d < dim; ++d) bank.laws[j](d, col) = row.v[d];
            bank.columns[j].push_back(
                {row.class_label, row.instance, row.eigenvalue, row.degenerate});
            if (j == 0) {
                if (bank.class_order.empty() || bank.class_order.back() != row.class_label)
                    bank.class_order.push_back(row.class_label);
            }
        }
    }

    // Every feature must carry the same class sequence with the same
    // per-class column counts.
    for (std::size_t j = 1; j < grouped.size(); ++j) {
        if (grouped[j].size() != grouped[0].size())
            fail(ErrorCode::ParseError,
                 path.string() + ": feature '" + bank.feature_names[j] +
                     "' has a different number of laws than '" + bank.feature_names[0] + "'");
        for (std::size_t col = 0; col < grouped[j].size(); ++col)
            if (grouped[j][col]->class_label != grouped[0][col]->class_label ||
                grouped[j][col]->instance != grouped[0][col]->instance)
                fail(ErrorCode::ParseError,
                     path.string() + ": law grouping differs between features");
    }
    return bank;
}

void write_table_csv(const TransformedTable& table, const fs::path& path) {
    std::string out;
    for (const auto& name : table.column_names) {
        out += name;
        out += ',';
    }
    out += "label,instance_id,row_index\n";
    for (std::size_t r = 0; r < table.rows(); ++r) {
        for (std::size_t c = 0; c < table.law_column_count(); ++c) {
            out += format_double(table.value(r, c));
            out += ',';
        }
        out += table.labels[r] + ',' + table.instance_ids[r] + ',' +
               std::to_string(table.row_indices[r]) + '\n';
    }
    write_text_file(path, out);
}

TransformedTable read_table_csv(const fs::path& path) {
    const auto lines = read_lines(path);
    if (lines.empty()) fail(ErrorCode::MalformedTable, path.string() + ": empty table file");

    const auto header = split(lines[0], ',');
    if (header.size() < 4)
        fail(ErrorCode::MalformedTable, path.string() + ": table header too short");
    const std::size_t ncols = header.size() - 3;
    if (header[ncols] != "label" || header[ncols + 1] != "instance_id" ||
        header[ncols + 2] != "row_index")
        fail(ErrorCode::MalformedTable,
             path.string() + ": expected trailing columns label,instance_id,row_index");
    for (std::size_t i = 0; i < ncols; ++i)
        if (!header[i].starts_with("law_"))
            fail(ErrorCode::MalformedTable,
                 path.string() + ": numeric column '" + header[i] + "' lacks the law_ prefix");

    TransformedTable table;
    table.column_names.assign(header.begin(), header.begin() + static_cast<long>(ncols));

    std::vector<std::string> label_set;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (trim(lines[i]).empty() && i + 1 == lines.size()) continue;
        const std::string where = path.string() + ": line " + std::to_string(i + 1);
        const auto fields = split(lines[i], ',');
        if (fields.size() != header.size())
            fail(ErrorCode::MalformedTable, where + ": wrong field count");
        for (std::size_t c = 0; c < ncols; ++c) {
            const auto value = parse_finite_double(fields[c]);
            if (!value) fail(ErrorCode::MalformedTable, where + ": bad numeric value");
            table.values.push_back(*value);
        }
        table.labels.push_back(fields[ncols]);
        table.instance_ids.push_back(fields[ncols + 1]);
        const auto row_index = parse_uint64(fields[ncols + 2]);
        if (!row_index) fail(ErrorCode::MalformedTable, where + ": bad row_index");
        table.row_indices.push_back(static_cast<std::size_t>(*row_index));
        if (std::find(label_set.begin(), label_set.end(), fields[ncols]) == label_set.end())
            label_set.push_back(fields[ncols]);
    }
    if (table.labels.empty())
        fail(ErrorCode::MalformedTable, path.string() + ": table has no rows");

    // Recover (feature, class) per column. Column names are
    // law_<feature>_<class> and both parts may contain underscores, so
    // match the longest known class label suffix.
    std::vector<std::string> features(ncols), classes(ncols);
    for (std::size_t c = 0; c < ncols; ++c) {
        const std::string body = table.column_names[c].substr(4);
        std::size_t best_len = 0;
        for (const auto& label : label_set) {
            if (label.size() + 1 >= body.size()) continue;
            if (body.size() >= label.size() + 1 &&
                body.compare(body.size() - label.size(), label.size(), label) == 0 &&
                body[body.size() - label.size() - 1] == '_' && label.size() > best_len)
                best_len = label.size();
        }
        if (best_len == 0)
            fail(ErrorCode::MalformedTable, path.string() + ": cannot attribute column '" +
                                                table.column_names[c] +
                                                "' to a class from the label column");
        classes[c] = body.substr(body.size() - best_len);
        features[c] = body.substr(0, body.size() - best_len - 1);
    }

    // Feature-major layout: the class sequence of the first feature must
    // repeat for every feature.
    for (std::size_t c = 0; c < ncols; ++c) {
        if (features[c] != features[0]) break;
        table.class_order.push_back(classes[c]);
    }
    const std::size_t nclasses = table.class_order.size();
    if (nclasses == 0 || ncols % nclasses != 0)
        fail(ErrorCode::MalformedTable, path.string() + ": columns are not feature-major");
    for (std::size_t c = 0; c < ncols; ++c) {
        if (classes[c] != table.class_order[c % nclasses])
            fail(ErrorCode::MalformedTable, path.string() + ": columns are not feature-major");
        if (c % nclasses == 0) table.feature_names.push_back(features[c]);
        else if (features[c] != table.feature_names.back())
            fail(ErrorCode::MalformedTable, path.string() + ": columns are not feature-major");
    }

    // Validate the block structure and infer the block height.
    if (table.row_indices[0] != 0)
        fail(ErrorCode::MalformedTable, path.string() + ": first row_index must be 0");
    std::size_t block_rows = 0;
    for (std::size_t r = 1; r < table.rows(); ++r) {
        if (table.row_indices[r] == 0) {
            if (block_rows == 0) block_rows = r;
        } else if (table.row_indices[r] != table.row_indices[r - 1] + 1 ||
                   table.instance_ids[r] != table.instance_ids[r - 1]) {
            fail(ErrorCode::MalformedTable,
                 path.string() + ": row " + std::to_string(r + 2) + " breaks the block structure");
        }
    }
    if (block_rows == 0) block_rows = table.rows();
    if (table.rows() % block_rows != 0)
        fail(ErrorCode::MalformedTable, path.string() + ": ragged instance blocks");
    for (std::size_t r = 0; r < table.rows(); ++r) {
        if (table.row_indices[r] != r % block_rows)
            fail(ErrorCode::MalformedTable, path.string() + ": ragged instance blocks");
        if (r % block_rows != 0 && table.labels[r] != table.labels[r - 1])
            fail(ErrorCode::MalformedTable,
                 path.string() + ": label changes inside an instance block");
    }
    table.block_rows = block_rows;
    return table;
}

void write_selection_csv(const TransformedTable& table, const fs::path& path) {
    std::string out = "instance_id,feature,class,selected_instance,selected_column\n";
    for (const auto& s : table.selections)
        out += s.instance_id + ',' + s.feature + ',' + s.class_label + ',' + s.law_instance_id +
               ',' + std::to_string(s.column_index) + '\n';
    write_text_file(path, out);
}

} // namespace linlaw
