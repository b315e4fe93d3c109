#include "linlaw/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "linlaw/text.hpp"

namespace fs = std::filesystem;

namespace linlaw {

namespace {

constexpr const char* kPlanFormatTag = "linlaw-split-plan-v1";
constexpr const char* kGeneratorName = "mt19937_64-fisher-yates";

/// Class labels, instance ids, and feature names end up in CSV fields and
/// plan-file sections, so a small character set is off limits.
void require_plain_identifier(const std::string& value, const std::string& what) {
    if (value.empty() || value.find_first_of(",\"[]") != std::string::npos ||
        trim(value).size() != value.size())
        fail(ErrorCode::ParseError,
             what + " '" + value + "' contains unsupported characters");
}

std::vector<std::string> parse_header(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::IoError, "cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) || trim(line).empty())
        fail(ErrorCode::ParseError, path.string() + ": missing header line");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto names = split(line, '\t');
    for (auto& name : names)
        require_plain_identifier(name, path.string() + ": feature name");
    return names;
}

/// Unbiased integer in [0, n) from the raw 64-bit stream; portable across
/// standard libraries, unlike std::uniform_int_distribution.
std::uint64_t bounded_uniform(std::mt19937_64& rng, std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n; // 2^64 mod n
    for (;;) {
        const std::uint64_t r = rng();
        if (r >= threshold) return r % n;
    }
}

void fisher_yates(std::vector<std::size_t>& values, std::mt19937_64& rng) {
    for (std::size_t i = values.size(); i > 1; --i)
        std::swap(values[i - 1], values[bounded_uniform(rng, i)]);
}

char detect_delimiter(const std::string& line) {
    return line.find('\t') != std::string::npos ? '\t' : ',';
}

struct UcrInstance {
    std::string label;
    std::vector<std::string> value_tokens; // validated numeric, copied verbatim
};

void parse_ucr_file(const fs::path& path, std::vector<UcrInstance>& out) {
    const auto lines = read_lines(path);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::string& line = lines[i];
        if (trim(line).empty()) {
            if (i + 1 == lines.size()) continue; // tolerate a blank final line
            fail(ErrorCode::ParseError, path.string() + ": line " + std::to_string(i + 1) +
                                            ": empty line");
        }
        const auto fields = split(line, detect_delimiter(line));
        if (fields.size() < 3)
            fail(ErrorCode::ParseError, path.string() + ": line " + std::to_string(i + 1) +
                                            ": expected a class label and at least 2 values");
        UcrInstance inst;
        inst.label = std::string(trim(fields[0]));
        if (inst.label.empty() ||
            inst.label.find_first_of("/\\") != std::string::npos)
            fail(ErrorCode::ParseError, path.string() + ": line " + std::to_string(i + 1) +
                                            ": bad class label '" + inst.label + "'");
        require_plain_identifier(inst.label,
                                 path.string() + ": line " + std::to_string(i + 1) + ": class label");
        inst.value_tokens.reserve(fields.size() - 1);
        for (std::size_t f = 1; f < fields.size(); ++f) {
            const auto token = trim(fields[f]);
            if (!parse_finite_double(token))
                fail(ErrorCode::ParseError, path.string() + ": line " + std::to_string(i + 1) +
                                                ": non-numeric value '" + std::string(token) +
                                                "'");
            inst.value_tokens.emplace_back(token);
        }
        out.push_back(std::move(inst));
    }
}

std::size_t clamped_test_count(std::size_t class_size, double ratio) {
    const auto rounded = std::llround(static_cast<double>(class_size) * ratio);
    const auto upper = static_cast<long long>(class_size) - 1;
    return static_cast<std::size_t>(std::clamp(rounded, 1ll, upper));
}

} // namespace

std::size_t DatasetIndex::instance_count() const {
    std::size_t n = 0;
    for (const auto& group : instances) n += group.size();
    return n;
}

std::size_t SplitPlan::test_count() const {
    std::size_t n = 0;
    for (const auto& c : classes) n += c.test.size();
    return n;
}

DatasetIndex scan_dataset(const fs::path& root) {
    if (!fs::exists(root) || !fs::is_directory(root))
        fail(ErrorCode::IoError, "dataset root " + root.string() + " is not a directory");

    DatasetIndex index;
    index.root = root;

    std::vector<std::string> class_dirs;
    for (const auto& entry : fs::directory_iterator(root))
        if (entry.is_directory()) class_dirs.push_back(entry.path().filename().string());
    std::sort(class_dirs.begin(), class_dirs.end());
    if (class_dirs.empty())
        fail(ErrorCode::EmptyDataset, "no class directories under " + root.string());

    for (const auto& class_label : class_dirs) {
        require_plain_identifier(class_label, "class directory name");
        std::vector<std::string> file_names;
        for (const auto& entry : fs::directory_iterator(root / class_label)) {
            const std::string name = entry.path().filename().string();
            if (entry.is_regular_file() && !name.starts_with('.')) file_names.push_back(name);
        }
        std::sort(file_names.begin(), file_names.end());
        if (file_names.empty())
            fail(ErrorCode::EmptyDataset, "class " + class_label + " has no instance files");

        std::vector<InstanceRef> refs;
        refs.reserve(file_names.size());
        for (const auto& name : file_names) {
            InstanceRef ref;
            ref.class_label = class_label;
            ref.path = root / class_label / name;
            ref.instance_id = ref.path.stem().string();
            require_plain_identifier(ref.instance_id, "instance file name");
            if (!refs.empty() && refs.back().instance_id == ref.instance_id)
                fail(ErrorCode::ParseError, "duplicate instance id '" + ref.instance_id +
                                                "' in class " + class_label);
            refs.push_back(std::move(ref));
        }
        index.classes.push_back(class_label);
        index.instances.push_back(std::move(refs));
    }

    index.feature_names = parse_header(index.instances.front().front().path);
    for (const auto& group : index.instances) {
        for (const auto& ref : group) {
            const auto names = parse_header(ref.path);
            if (names != index.feature_names)
                fail(ErrorCode::HeaderMismatch,
                     ref.path.string() + " declares different features than " +
                         index.instances.front().front().path.string());
        }
    }
    return index;
}

std::vector<TimeSeries> load_instance(const InstanceRef& ref) {
    const auto lines = read_lines(ref.path);
    if (lines.empty()) fail(ErrorCode::ParseError, ref.path.string() + ": empty file");

    const auto names = split(lines[0], '\t');
    const std::size_t m = names.size();
    std::vector<TimeSeries> series(m);

    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto fields = split(lines[i], '\t');
        if (fields.size() != m)
            fail(ErrorCode::ParseError, ref.path.string() + ": line " + std::to_string(i + 1) +
                                            ": expected " + std::to_string(m) +
                                            " values, got " + std::to_string(fields.size()));
        for (std::size_t j = 0; j < m; ++j) {
            const auto token = trim(fields[j]);
            const auto value = parse_finite_double(token);
            if (!value)
                fail(ErrorCode::ParseError, ref.path.string() + ": line " + std::to_string(i + 1) +
                                                ": missing or non-numeric value '" +
                                                std::string(token) + "'");
            series[j].values.push_back(*value);
        }
    }

    for (std::size_t j = 0; j < m; ++j)
        if (series[j].size() < 2)
            fail(ErrorCode::ParseError,
                 ref.path.string() + ": column '" + names[j] + "' has fewer than 2 samples");
    return series;
}

SplitPlan split(const DatasetIndex& index, double test_ratio,
                std::optional<std::uint64_t> seed) {
    if (!(test_ratio > 0.0) || !(test_ratio < 1.0))
        fail(ErrorCode::InvalidRatio,
             "test_ratio must be strictly between 0 and 1, got " + format_double(test_ratio));
    if (index.class_count() < 2)
        fail(ErrorCode::SplitInfeasible, "need at least 2 classes, found " +
                                             std::to_string(index.class_count()));
    for (std::size_t c = 0; c < index.class_count(); ++c)
        if (index.instances[c].size() < 2)
            fail(ErrorCode::SplitInfeasible, "class " + index.classes[c] + " has " +
                                                 std::to_string(index.instances[c].size()) +
                                                 " instance(s); need at least 2");

    SplitPlan plan;
    plan.test_ratio = test_ratio;
    plan.seed = seed ? *seed : std::random_device{}();
    plan.generator = kGeneratorName;

    std::mt19937_64 rng(*plan.seed);
    for (std::size_t c = 0; c < index.class_count(); ++c) {
        const auto& refs = index.instances[c];
        std::vector<std::size_t> order(refs.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        fisher_yates(order, rng);

        const std::size_t n_test = clamped_test_count(refs.size(), test_ratio);
        ClassSplit cs;
        cs.class_label = index.classes[c];
        for (std::size_t i = 0; i < order.size(); ++i)
            (i < n_test ? cs.test : cs.train).push_back(refs[order[i]]);
        auto by_id = [](const InstanceRef& a, const InstanceRef& b) {
            return a.instance_id < b.instance_id;
        };
        std::sort(cs.train.begin(), cs.train.end(), by_id);
        std::sort(cs.test.begin(), cs.test.end(), by_id);
        plan.tau += cs.train.size();
        plan.classes.push_back(std::move(cs));
    }
    return plan;
}

DatasetIndex convert_ucr(const fs::path& train_file, const fs::path& test_file,
                         const fs::path& out_root) {
    std::vector<UcrInstance> merged;
    parse_ucr_file(train_file, merged);
    parse_ucr_file(test_file, merged);
    if (merged.empty())
        fail(ErrorCode::ParseError, "no instances found in " + train_file.string() + " and " +
                                        test_file.string());

    if (fs::exists(out_root) && !fs::is_empty(out_root))
        fail(ErrorCode::IoError, "output directory " + out_root.string() + " is not empty");
    std::error_code ec;
    fs::create_directories(out_root, ec);
    if (ec) fail(ErrorCode::IoError, "cannot create " + out_root.string() + ": " + ec.message());

    // Group by label in encounter order (train file first, then test).
    std::vector<std::string> labels;
    std::unordered_map<std::string, std::vector<const UcrInstance*>> by_label;
    for (const auto& inst : merged) {
        auto [it, inserted] = by_label.try_emplace(inst.label);
        if (inserted) labels.push_back(inst.label);
        it->second.push_back(&inst);
    }

    for (const auto& label : labels) {
        const auto& group = by_label[label];
        const fs::path class_dir = out_root / ("class_" + label);
        fs::create_directories(class_dir, ec);
        if (ec)
            fail(ErrorCode::IoError, "cannot create " + class_dir.string() + ": " + ec.message());

        int width = 3; // zero-padded so lexicographic and numeric order agree
        for (std::size_t n = group.size(); n >= 1000; n /= 10) ++width;

        for (std::size_t i = 0; i < group.size(); ++i) {
            std::string ordinal = std::to_string(i + 1);
            ordinal.insert(0, static_cast<std::size_t>(width) - ordinal.size(), '0');
            std::string body = "value\n";
            for (const auto& token : group[i]->value_tokens) {
                body += token;
                body += '\n';
            }
            write_text_file(class_dir / ("instance_" + ordinal + ".csv"), body);
        }
    }
    return scan_dataset(out_root);
}

void write_split_plan(const SplitPlan& plan, const fs::path& path) {
    std::string out;
    out += "format=";
    out += kPlanFormatTag;
    out += '\n';
    out += "test_ratio=" + format_double(plan.test_ratio) + '\n';
    if (plan.seed) out += "seed=" + std::to_string(*plan.seed) + '\n';
    out += "generator=" + plan.generator + '\n';
    out += "tau=" + std::to_string(plan.tau) + '\n';
    for (const auto& cs : plan.classes) {
        out += "[class " + cs.class_label + "]\n";
        for (const auto& ref : cs.train) out += "train=" + ref.instance_id + '\n';
        for (const auto& ref : cs.test) out += "test=" + ref.instance_id + '\n';
    }
    write_text_file(path, out);
}

SplitPlan read_split_plan(const DatasetIndex& index, const fs::path& path) {
    const auto lines = read_lines(path);

    SplitPlan plan;
    plan.generator = "manual";
    std::optional<std::size_t> declared_tau;
    bool have_ratio = false;

    // id -> position, per class, to resolve and check coverage
    std::vector<std::unordered_map<std::string, std::size_t>> id_maps(index.class_count());
    std::vector<std::vector<int>> assigned(index.class_count());
    for (std::size_t c = 0; c < index.class_count(); ++c) {
        assigned[c].assign(index.instances[c].size(), 0);
        for (std::size_t i = 0; i < index.instances[c].size(); ++i)
            id_maps[c][index.instances[c][i].instance_id] = i;
    }
    std::unordered_map<std::string, std::size_t> class_pos;
    for (std::size_t c = 0; c < index.class_count(); ++c) class_pos[index.classes[c]] = c;

    plan.classes.resize(index.class_count());
    for (std::size_t c = 0; c < index.class_count(); ++c)
        plan.classes[c].class_label = index.classes[c];
    std::vector<int> class_seen(index.class_count(), 0);

    std::optional<std::size_t> current;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const auto line = std::string(trim(lines[i]));
        const std::string where = path.string() + ": line " + std::to_string(i + 1);
        if (line.empty() || line[0] == '#') continue;
        if (line.front() == '[') {
            if (!line.starts_with("[class ") || line.back() != ']')
                fail(ErrorCode::ParseError, where + ": malformed section header");
            const std::string label = line.substr(7, line.size() - 8);
            auto it = class_pos.find(label);
            if (it == class_pos.end())
                fail(ErrorCode::ParseError, where + ": unknown class '" + label + "'");
            if (class_seen[it->second]++)
                fail(ErrorCode::ParseError, where + ": duplicate section for class '" + label + "'");
            current = it->second;
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            fail(ErrorCode::ParseError, where + ": expected key=value");
        const std::string key = line.substr(0, eq);
        const std::string value = line.substr(eq + 1);
        if (key == "train" || key == "test") {
            if (!current) fail(ErrorCode::ParseError, where + ": assignment outside a class section");
            auto it = id_maps[*current].find(value);
            if (it == id_maps[*current].end())
                fail(ErrorCode::ParseError, where + ": unknown instance '" + value +
                                                "' in class " + index.classes[*current]);
            if (assigned[*current][it->second]++)
                fail(ErrorCode::ParseError, where + ": instance '" + value + "' assigned twice");
            const auto& ref = index.instances[*current][it->second];
            (key == "train" ? plan.classes[*current].train : plan.classes[*current].test)
                .push_back(ref);
        } else if (key == "format") {
            if (value != kPlanFormatTag)
                fail(ErrorCode::ParseError, where + ": unsupported plan format '" + value + "'");
        } else if (key == "test_ratio") {
            const auto ratio = parse_finite_double(value);
            if (!ratio) fail(ErrorCode::ParseError, where + ": bad test_ratio");
            plan.test_ratio = *ratio;
            have_ratio = true;
        } else if (key == "seed") {
            const auto seed = parse_uint64(value);
            if (!seed) fail(ErrorCode::ParseError, where + ": bad seed");
            plan.seed = *seed;
        } else if (key == "generator") {
            plan.generator = value;
        } else if (key == "tau") {
            const auto tau = parse_uint64(value);
            if (!tau) fail(ErrorCode::ParseError, where + ": bad tau");
            declared_tau = static_cast<std::size_t>(*tau);
        } else {
            fail(ErrorCode::ParseError, where + ": unknown key '" + key + "'");
        }
    }

    for (std::size_t c = 0; c < index.class_count(); ++c) {
        auto& cs = plan.classes[c];
        if (cs.train.empty() || cs.test.empty())
            fail(ErrorCode::SplitInfeasible, path.string() + ": class " + index.classes[c] +
                                                 " needs at least 1 train and 1 test instance");
        for (std::size_t i = 0; i < assigned[c].size(); ++i)
            if (!assigned[c][i])
                fail(ErrorCode::SplitInfeasible,
                     path.string() + ": instance '" + index.instances[c][i].instance_id +
                         "' of class " + index.classes[c] + " is not assigned");
        auto by_id = [](const InstanceRef& a, const InstanceRef& b) {
            return a.instance_id < b.instance_id;
        };
        std::sort(cs.train.begin(), cs.train.end(), by_id);
        std::sort(cs.test.begin(), cs.test.end(), by_id);
        plan.tau += cs.train.size();
    }
    if (declared_tau && *declared_tau != plan.tau)
        fail(ErrorCode::ParseError, path.string() + ": declared tau " +
                                        std::to_string(*declared_tau) + " does not match " +
                                        std::to_string(plan.tau) + " train assignments");
    if (!have_ratio) {
        const std::size_t total = plan.tau + plan.test_count();
        plan.test_ratio = static_cast<double>(plan.test_count()) / static_cast<double>(total);
    }
    return plan;
}

InstanceSource InstanceSource::preload(const DatasetIndex& index) {
    InstanceSource source;
    for (const auto& group : index.instances)
        for (const auto& ref : group) source.cache_.emplace(ref.path.string(), load_instance(ref));
    return source;
}

std::vector<TimeSeries> InstanceSource::get(const InstanceRef& ref) const {
    if (cache_.empty()) return load_instance(ref);
    const auto it = cache_.find(ref.path.string());
    if (it == cache_.end()) return load_instance(ref);
    return it->second;
}

} // namespace linlaw
