#include <doctest.h>

#include <string>

#include "helpers.hpp"
#include "linlaw/classify.hpp"
#include "linlaw/dataset.hpp"
#include "linlaw/transform.hpp"

#ifndef LINLAW_CLI_PATH
#error "LINLAW_CLI_PATH must point at the linlaw binary"
#endif

using testutil::CommandResult;
using testutil::TempDir;
using testutil::read_file;
using testutil::run_command;
using testutil::write_file;

namespace {

const std::string kCli = LINLAW_CLI_PATH;

std::string q(const std::filesystem::path& p) { return "'" + p.string() + "'"; }

void write_ucr_pair(const TempDir& dir) {
    std::mt19937_64 rng(2718);
    std::string train, test;
    auto emit = [&](std::string& target, const std::string& label,
                    const std::vector<double>& z) {
        target += label;
        for (double v : z) {
            std::ostringstream cell;
            cell.precision(17);
            cell << v;
            target += '\t' + cell.str();
        }
        target += '\n';
    };
    for (int i = 0; i < 6; ++i)
        emit(i < 4 ? train : test, "1",
             testutil::arithmetic_progression(testutil::uniform(rng, 1, 4),
                                              testutil::uniform(rng, 0.3, 1.5), 24));
    for (int i = 0; i < 6; ++i)
        emit(i < 4 ? train : test, "2", testutil::noisy_oscillation(8.0, 24, rng));
    write_file(dir / "train.tsv", train);
    write_file(dir / "test.tsv", test);
}

} // namespace

TEST_CASE("cli pipeline equals the in-process pipeline byte for byte") {
    TempDir dir("cli_pipe");
    write_ucr_pair(dir);

    auto convert = run_command(kCli + " convert --train " + q(dir / "train.tsv") + " --test " +
                                   q(dir / "test.tsv") + " --out " + q(dir / "data"),
                               dir.path());
    REQUIRE(convert.exit_code == 0);
    CHECK(convert.output.find("12 instances, 2 classes") != std::string::npos);

    auto split_cmd = run_command(kCli + " split --data " + q(dir / "data") +
                                     " --test-ratio 0.25 --seed 4242 --out " + q(dir / "plan.txt"),
                                 dir.path());
    REQUIRE(split_cmd.exit_code == 0);
    auto laws_cmd = run_command(kCli + " laws --data " + q(dir / "data") + " --plan " +
                                    q(dir / "plan.txt") + " --dim 4 --lag 2 --out " +
                                    q(dir / "laws.csv"),
                                dir.path());
    REQUIRE(laws_cmd.exit_code == 0);
    auto transform_cmd = run_command(
        kCli + " transform --data " + q(dir / "data") + " --plan " + q(dir / "plan.txt") +
            " --laws " + q(dir / "laws.csv") + " --lag 2 --select var --out " + q(dir / "table.csv"),
        dir.path());
    REQUIRE(transform_cmd.exit_code == 0);

    // same parameters, in process
    const auto index = linlaw::scan_dataset(dir / "data");
    const auto plan = linlaw::split(index, 0.25, 4242);
    linlaw::write_split_plan(plan, dir / "plan_ref.txt");
    const linlaw::EmbeddingConfig cfg{4, 2};
    const auto bank = linlaw::train_laws(index, plan, cfg);
    linlaw::write_law_bank_csv(bank, dir / "laws_ref.csv");
    const auto table = linlaw::transform_test(index, plan, bank, linlaw::SelectCriterion::Var);
    linlaw::write_table_csv(table, dir / "table_ref.csv");

    CHECK(read_file(dir / "plan.txt") == read_file(dir / "plan_ref.txt"));
    CHECK(read_file(dir / "laws.csv") == read_file(dir / "laws_ref.csv"));
    CHECK(read_file(dir / "table.csv") == read_file(dir / "table_ref.csv"));

    SUBCASE("classify consumes the table and reports accuracy") {
        auto classify_cmd = run_command(kCli + " classify --table " + q(dir / "table.csv") +
                                            " --out " + q(dir / "preds.csv"),
                                        dir.path());
        REQUIRE(classify_cmd.exit_code == 0);
        CHECK(classify_cmd.output.find("accuracy=") != std::string::npos);
        const auto preds = read_file(dir / "preds.csv");
        CHECK(preds.starts_with("instance_id,label,predicted\n"));
    }

    SUBCASE("sidecar configs echo the effective flags") {
        const auto cfg_txt = read_file(dir / "plan.txt.config");
        CHECK(cfg_txt.find("command=split") != std::string::npos);
        CHECK(cfg_txt.find("seed=4242") != std::string::npos);
        CHECK(cfg_txt.find("test_ratio=0.25") != std::string::npos);
        const auto laws_cfg = read_file(dir / "laws.csv.config");
        CHECK(laws_cfg.find("dim=4") != std::string::npos);
        CHECK(laws_cfg.find("lag=2") != std::string::npos);
    }
}

TEST_CASE("identical seeded invocations write identical bytes") {
    TempDir dir("cli_det");
    write_ucr_pair(dir);
    REQUIRE(run_command(kCli + " convert --train " + q(dir / "train.tsv") + " --test " +
                            q(dir / "test.tsv") + " --out " + q(dir / "data"),
                        dir.path())
                .exit_code == 0);
    for (const char* name : {"p1.txt", "p2.txt"}) {
        REQUIRE(run_command(kCli + " split --data " + q(dir / "data") +
                                " --test-ratio 0.3 --seed 7 --out " + q(dir / name),
                            dir.path())
                    .exit_code == 0);
    }
    CHECK(read_file(dir / "p1.txt") == read_file(dir / "p2.txt"));
}

TEST_CASE("cli rejects bad inputs with exit code 1") {
    TempDir dir("cli_err");
    write_ucr_pair(dir);

    SUBCASE("missing input file") {
        auto r = run_command(kCli + " convert --train " + q(dir / "absent.tsv") + " --test " +
                                 q(dir / "test.tsv") + " --out " + q(dir / "data"),
                             dir.path());
        CHECK(r.exit_code == 1);
    }
    SUBCASE("malformed line is named in the diagnostic") {
        std::string train;
        for (int i = 0; i < 16; ++i) train += "1\t1.0\t2.0\t3.0\n";
        train += "1\t1.0\tbroken\t3.0\n"; // line 17
        write_file(dir / "bad.tsv", train);
        auto r = run_command(kCli + " convert --train " + q(dir / "bad.tsv") + " --test " +
                                 q(dir / "test.tsv") + " --out " + q(dir / "data2"),
                             dir.path());
        CHECK(r.exit_code == 1);
        CHECK(r.output.find("line 17") != std::string::npos);
    }
    SUBCASE("degenerate ratio") {
        REQUIRE(run_command(kCli + " convert --train " + q(dir / "train.tsv") + " --test " +
                                q(dir / "test.tsv") + " --out " + q(dir / "data"),
                            dir.path())
                    .exit_code == 0);
        auto r = run_command(kCli + " split --data " + q(dir / "data") +
                                 " --test-ratio 1.0 --seed 1 --out " + q(dir / "plan.txt"),
                             dir.path());
        CHECK(r.exit_code == 1);
        CHECK(r.output.find("InvalidRatio") != std::string::npos);
    }
    SUBCASE("unknown flag") {
        auto r = run_command(kCli + " split --data x --test-ratio 0.5 --out y --frobnicate",
                             dir.path());
        CHECK(r.exit_code == 1);
    }
    SUBCASE("no subcommand") {
        auto r = run_command(kCli, dir.path());
        CHECK(r.exit_code == 1);
    }
}

TEST_CASE("experiment subcommand writes the run artifacts") {
    TempDir dir("cli_exp");
    write_ucr_pair(dir);
    REQUIRE(run_command(kCli + " convert --train " + q(dir / "train.tsv") + " --test " +
                            q(dir / "test.tsv") + " --out " + q(dir / "data"),
                        dir.path())
                .exit_code == 0);
    auto r = run_command(kCli + " experiment --data " + q(dir / "data") +
                             " --dim 3 --test-ratio 0.25 --repeats 4 --seed 11 --workers 2" +
                             " --out " + q(dir / "exp"),
                         dir.path());
    REQUIRE(r.exit_code == 0);
    CHECK(r.output.find("mean=") != std::string::npos);
    CHECK(read_file(dir / "exp" / "runs.csv").starts_with("run_index,seed,accuracy\n"));
    CHECK(read_file(dir / "exp" / "summary.txt").find("repeats=4") != std::string::npos);
    CHECK(read_file(dir / "exp" / "histogram.csv").starts_with("bin_low,bin_high,count\n"));
    CHECK(read_file(dir / "exp" / "config.txt").find("base_seed=11") != std::string::npos);
}
