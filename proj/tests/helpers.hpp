#pragma once

// Shared fixtures for the unit and acceptance suites: scratch directories,
// synthetic dataset writers, and a tiny process runner for CLI checks.

#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

/// Asserts that `expr` throws a linlaw::Error carrying `expected_code`.
/// Expands doctest macros, so include doctest.h first.
#define CHECK_FAILS_WITH(expr, expected_code)                                                      \
    do {                                                                                           \
        try {                                                                                      \
            (void)(expr);                                                                          \
            FAIL("expected an error but none was thrown");                                         \
        } catch (const linlaw::Error& e) {                                                         \
            CHECK(e.code() == (expected_code));                                                    \
        }                                                                                          \
    } while (0)

namespace testutil {

namespace fs = std::filesystem;

/// Unique scratch directory, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<unsigned> counter{0};
        path_ = fs::temp_directory_path() /
                ("linlaw_" + tag + "_" + std::to_string(::getpid()) + "_" +
                 std::to_string(counter.fetch_add(1)));
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const fs::path& path() const { return path_; }
    fs::path operator/(const std::string& name) const { return path_ / name; }

private:
    fs::path path_;
};

inline void write_file(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    out << content;
}

inline std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// One instance file in the dataset layout: tab-separated feature columns
/// with a header line.
inline void write_instance(const fs::path& path, const std::vector<std::string>& features,
                           const std::vector<std::vector<double>>& columns) {
    std::string out;
    for (std::size_t j = 0; j < features.size(); ++j) {
        if (j) out += '\t';
        out += features[j];
    }
    out += '\n';
    const std::size_t k = columns.front().size();
    for (std::size_t t = 0; t < k; ++t) {
        for (std::size_t j = 0; j < columns.size(); ++j) {
            if (j) out += '\t';
            std::ostringstream cell;
            cell.precision(17);
            cell << columns[j][t];
            out += cell.str();
        }
        out += '\n';
    }
    write_file(path, out);
}

inline std::vector<double> arithmetic_progression(double a, double b, std::size_t k) {
    std::vector<double> z(k);
    for (std::size_t t = 0; t < k; ++t) z[t] = a + b * static_cast<double>(t);
    return z;
}

/// High-variance seeded noise with an alternating carrier. Its laws sit
/// near the (1, 2, 1) direction, structurally apart from the progression
/// class, which makes the two-class synthetic dataset separable by
/// construction rather than by luck.
inline std::vector<double> noisy_oscillation(double amplitude, std::size_t k,
                                             std::mt19937_64& rng) {
    std::vector<double> z(k);
    for (std::size_t t = 0; t < k; ++t) {
        const double jitter =
            0.05 * (static_cast<double>(rng()) / 18446744073709551616.0 * 2.0 - 1.0);
        z[t] = amplitude * (t % 2 == 0 ? 1.0 : -1.0) * (1.0 + jitter);
    }
    return z;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(rng()) / 18446744073709551616.0);
}

/// Two-class dataset: arithmetic progressions vs seeded noisy
/// oscillations, `per_class` instances each, single feature "value".
inline void write_separable_dataset(const fs::path& root, std::size_t per_class, std::size_t k,
                                    std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < per_class; ++i) {
        const auto z = arithmetic_progression(uniform(rng, 0.5, 5.0), uniform(rng, 0.2, 2.0), k);
        std::ostringstream name;
        name << "instance_" << (i < 9 ? "0" : "") << i + 1 << ".csv";
        write_instance(root / "progression" / name.str(), {"value"}, {z});
    }
    for (std::size_t i = 0; i < per_class; ++i) {
        const auto z = noisy_oscillation(uniform(rng, 5.0, 12.0), k, rng);
        std::ostringstream name;
        name << "instance_" << (i < 9 ? "0" : "") << i + 1 << ".csv";
        write_instance(root / "wobble" / name.str(), {"value"}, {z});
    }
}

struct CommandResult {
    int exit_code = -1;
    std::string output; // stdout + stderr
};

/// Runs a shell command, capturing combined output. Paths in `cmd` must
/// already be quoted by the caller where needed.
inline CommandResult run_command(const std::string& cmd, const fs::path& scratch) {
    const fs::path log = scratch / "cmd_output.txt";
    const std::string full = cmd + " > " + log.string() + " 2>&1";
    const int raw = std::system(full.c_str());
    CommandResult result;
    result.output = read_file(log);
    if (raw == -1) result.exit_code = -1;
    else result.exit_code = WEXITSTATUS(raw);
    return result;
}

} // namespace testutil
