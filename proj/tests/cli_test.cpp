#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include "conglab/evaluation.hpp"
#include "conglab/series.hpp"
#include "support/tempdir.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <sys/wait.h>

using conglab::testing::TempDir;
using conglab::testing::read_text_file;
using conglab::testing::write_text_file;

namespace {

std::string g_cli;

struct CmdResult {
    int code = -1;
    std::string out;
    std::string err;
};

// Runs the real binary with a shell line, capturing exit code and streams.
CmdResult run_cli(const TempDir& tmp, const std::string& args) {
    static std::atomic<int> counter{0};
    const int k = counter++;
    const std::string out_path = tmp.file("cap_out_" + std::to_string(k));
    const std::string err_path = tmp.file("cap_err_" + std::to_string(k));
    const std::string cmd = g_cli + " " + args + " >" + out_path + " 2>" + err_path;
    const int raw = std::system(cmd.c_str());
    CmdResult r;
    r.code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    r.out = read_text_file(out_path);
    r.err = read_text_file(err_path);
    return r;
}

} // namespace

TEST_CASE("help and parse errors") {
    TempDir tmp;
    auto help = run_cli(tmp, "--help");
    CHECK(help.code == 0);
    CHECK(help.out.find("extract") != std::string::npos);
    CHECK(help.out.find("grid") != std::string::npos);

    CHECK(run_cli(tmp, "").code == 2);                       // a subcommand is required
    CHECK(run_cli(tmp, "grid --bogus-flag").code == 2);      // unknown option
    CHECK(run_cli(tmp, "extract --frames x").code == 2);     // missing required options
    CHECK(run_cli(tmp, "synth series --out x --nodes a --start 2019-11-01 --profile saw").code ==
          2);
}

TEST_CASE("frames to matrix pipeline reproduces the simulated truth") {
    TempDir tmp;
    const std::string scene = tmp.file("scene.conf");
    const std::string mask = tmp.file("mask.png");
    const std::string reg = tmp.file("registry.csv");
    const std::string frames = tmp.file("frames");
    const std::string truth = tmp.file("truth.csv");
    const std::string extraction = tmp.file("extraction.csv");
    const std::string matrix = tmp.file("matrix.csv");

    auto scene_run = run_cli(tmp, "synth scene --out " + scene + " --intersections 4 --seed 9" +
                                      " --mask " + mask + " --registry " + reg);
    REQUIRE(scene_run.code == 0);
    CHECK(scene_run.out.find("8 segments") != std::string::npos);

    auto frames_run = run_cli(tmp, "synth frames --scene " + scene +
                                       " --start 2019-11-04 --days 1 --interval 3600" +
                                       " --out-dir " + frames + " --truth " + truth);
    REQUIRE(frames_run.code == 0);
    CHECK(frames_run.out.find("18 frames") != std::string::npos);

    auto extract_run = run_cli(tmp, "extract --frames " + frames + " --mask " + mask +
                                        " --registry " + reg + " --out " + extraction +
                                        " --workers 2");
    REQUIRE(extract_run.code == 0);
    CHECK(extract_run.out.find("extracted 18 frames (0 skipped)") != std::string::npos);

    auto assemble_run = run_cli(tmp, "assemble --extraction " + extraction + " --registry " +
                                         reg + " --mask " + mask + " --out " + matrix +
                                         " --fill-interval 3600");
    REQUIRE(assemble_run.code == 0);
    CHECK(assemble_run.out.find("18 instants x 4 intersections") != std::string::npos);

    // Extraction of rendered frames loses nothing: byte-identical matrices.
    CHECK(read_text_file(matrix) == read_text_file(truth));

    SUBCASE("a broken frame aborts unless --skip-bad") {
        write_text_file(frames + "/zz_bad.png", "this is not a png");
        const std::string args = "extract --frames " + frames + " --mask " + mask +
                                 " --registry " + reg + " --out " + extraction;
        CHECK(run_cli(tmp, args).code != 0);

        auto skip_run = run_cli(tmp, args + " --skip-bad");
        CHECK(skip_run.code == 0);
        CHECK(skip_run.out.find("extracted 18 frames (1 skipped)") != std::string::npos);
        CHECK(skip_run.err.find("skipping zz_bad.png") != std::string::npos);
    }

    SUBCASE("train, predict, evaluate round trip on the truth matrix") {
        const std::string model = tmp.file("ha.model");
        const std::string preds = tmp.file("predictions.csv");
        const std::string report = tmp.file("report.csv");

        auto train_run = run_cli(tmp, "train --matrix " + truth + " --registry " + reg +
                                          " --mask " + mask +
                                          " --node n00 --model ha --out " + model +
                                          " --interval 60 --seq 120 --pred 60");
        REQUIRE(train_run.code == 0);

        auto predict_run = run_cli(tmp, "predict --model " + model + " --matrix " + truth +
                                            " --registry " + reg + " --mask " + mask +
                                            " --out " + preds);
        REQUIRE(predict_run.code == 0);
        // 18 hourly slots, 2 lags, 1 step ahead: 16 windows.
        CHECK(predict_run.out.find("16 predictions") != std::string::npos);

        auto eval_run = run_cli(tmp, "evaluate --predictions " + preds + " --out " + report);
        REQUIRE(eval_run.code == 0);
        CHECK(eval_run.out.find("aggregate rmse=") != std::string::npos);
        auto rep = conglab::read_report_csv(report);
        REQUIRE(rep.per_node.size() == 1);
        CHECK(rep.per_node[0].first == "n00");
        CHECK(rep.per_node[0].second.n == 16);
        // Training data is the evaluation data here, so HA cannot be wild.
        CHECK(rep.aggregate.rmse < 1000.0);
    }

    SUBCASE("unknown node and unknown model are usage and data errors") {
        const std::string model = tmp.file("x.model");
        CHECK(run_cli(tmp, "train --matrix " + truth + " --registry " + reg + " --mask " + mask +
                               " --node n00 --model prophet --out " + model)
                  .code == 2);
        CHECK(run_cli(tmp, "train --matrix " + truth + " --registry " + reg + " --mask " + mask +
                               " --node zz --model ha --out " + model)
                  .code == 3);
    }
}

TEST_CASE("grid and report run end to end deterministically") {
    TempDir tmp;
    const std::string scene = tmp.file("scene.conf");
    const std::string mask = tmp.file("mask.png");
    const std::string reg = tmp.file("registry.csv");
    const std::string matrix = tmp.file("matrix.csv");

    REQUIRE(run_cli(tmp, "synth scene --out " + scene + " --intersections 4 --seed 3 --mask " +
                             mask + " --registry " + reg)
                .code == 0);
    REQUIRE(run_cli(tmp, "synth series --out " + matrix +
                             " --nodes n00,n01,n02,n03 --start 2019-11-01 --days 10" +
                             " --interval 900 --profile sin --low 20 --high 120 --phi 0.5" +
                             " --weekday-noise 10 --weekend-noise 10 --seed 5")
                .code == 0);

    const std::string base_args = "grid --matrix " + matrix + " --registry " + reg + " --mask " +
                                  mask + " --split first-k-train:7 --intervals 15" +
                                  " --sequences 45 --predictions 15,45 --models ha,arima";
    const std::string dir_a = tmp.file("grid_a");
    const std::string dir_b = tmp.file("grid_b");
    auto a = run_cli(tmp, base_args + " --out-dir " + dir_a + " --workers 1");
    REQUIRE(a.code == 0);
    CHECK(a.out.find("4 cells (0 failed)") != std::string::npos);
    auto b = run_cli(tmp, base_args + " --out-dir " + dir_b + " --workers 3");
    REQUIRE(b.code == 0);

    const std::string results_a = dir_a + "/results.csv";
    CHECK(read_text_file(results_a) == read_text_file(dir_b + "/results.csv"));
    CHECK(read_text_file(dir_a + "/topk.txt") == read_text_file(dir_b + "/topk.txt"));
    // The manifest records the worker count, so mask that line before comparing.
    auto drop_workers_line = [](std::string text) {
        const auto pos = text.find("workers = ");
        REQUIRE(pos != std::string::npos);
        text.erase(pos, text.find('\n', pos) - pos);
        return text;
    };
    CHECK(drop_workers_line(read_text_file(dir_a + "/manifest.txt")) ==
          drop_workers_line(read_text_file(dir_b + "/manifest.txt")));
    CHECK(read_text_file(dir_a + "/manifest.txt").find("[inputs]") != std::string::npos);
    CHECK(read_text_file(dir_a + "/topk.txt").find("15/45/15") != std::string::npos);

    SUBCASE("report renders tables and the outlier view") {
        const std::string rep_dir = tmp.file("report_out");
        auto rep = run_cli(tmp, "report --results " + results_a + " --out-dir " + rep_dir +
                                    " --top-k 2 --exclude n00 --model ha --combo 15/45/15");
        REQUIRE(rep.code == 0);
        CHECK(rep.out.find("15/45/15") != std::string::npos);
        CHECK(rep.out.find("n00") != std::string::npos);
        CHECK(std::filesystem::exists(rep_dir + "/tables.txt"));
        CHECK(std::filesystem::exists(rep_dir + "/topk.txt"));
        CHECK(std::filesystem::exists(rep_dir + "/outliers.txt"));
    }

    SUBCASE("report plots predictions per node") {
        const std::string model = tmp.file("ha.model");
        const std::string preds = tmp.file("predictions.csv");
        REQUIRE(run_cli(tmp, "train --matrix " + matrix + " --registry " + reg + " --mask " +
                                 mask + " --node n01 --model ha --out " + model +
                                 " --interval 15 --seq 45 --pred 15 --split first-k-train:7")
                    .code == 0);
        REQUIRE(run_cli(tmp, "predict --model " + model + " --matrix " + matrix +
                                 " --registry " + reg + " --mask " + mask + " --out " + preds)
                    .code == 0);
        const std::string plot_dir = tmp.file("plots");
        auto rep = run_cli(tmp, "report --results " + results_a + " --predictions " + preds +
                                    " --plot-dir " + plot_dir);
        REQUIRE(rep.code == 0);
        CHECK(std::filesystem::exists(plot_dir + "/n01.svg"));
        CHECK(read_text_file(plot_dir + "/n01.svg").find("<svg") != std::string::npos);
    }

    SUBCASE("the calendar suite runs four splits at one combination") {
        const std::string matrix30 = tmp.file("matrix30.csv");
        REQUIRE(run_cli(tmp, "synth series --out " + matrix30 +
                                 " --nodes n00,n01 --start 2019-11-01 --days 30" +
                                 " --interval 900 --profile sin --low 20 --high 120" +
                                 " --phi 0.4 --seed 6")
                    .code == 0);
        const std::string suite_dir = tmp.file("suite_out");
        auto suite = run_cli(tmp, "grid --matrix " + matrix30 + " --registry " + reg +
                                      " --mask " + mask + " --suite --intervals 15" +
                                      " --sequences 45 --predictions 15 --models ha" +
                                      " --out-dir " + suite_dir);
        REQUIRE(suite.code == 0);
        CHECK(suite.out.find("4 cells (0 failed)") != std::string::npos);
        const std::string results = read_text_file(suite_dir + "/results.csv");
        CHECK(results.find("wd14-wd6") != std::string::npos);
        CHECK(results.find("wd20-we10") != std::string::npos);
        CHECK(results.find("we7-wd3") != std::string::npos);
        CHECK(results.find("we7-we3") != std::string::npos);

        CHECK(run_cli(tmp, "grid --matrix " + matrix30 + " --registry " + reg + " --mask " +
                               mask + " --suite --intervals 15,30 --sequences 45" +
                               " --predictions 15 --models ha --out-dir " + suite_dir)
                  .code == 2); // suite takes exactly one combination
    }
}

TEST_CASE("resample command changes the cadence") {
    TempDir tmp;
    const std::string matrix = tmp.file("matrix.csv");
    const std::string out = tmp.file("resampled.csv");
    REQUIRE(run_cli(tmp, "synth series --out " + matrix +
                             " --nodes a,b --start 2019-11-04 --days 2 --interval 900 --seed 2")
                .code == 0);

    auto r = run_cli(tmp, "resample --matrix " + matrix + " --out " + out +
                              " --interval 30 --agg decimate");
    REQUIRE(r.code == 0);
    auto m = conglab::read_matrix_csv(out);
    CHECK(m.rows() == 2u * 36u);

    CHECK(run_cli(tmp, "resample --matrix " + matrix + " --out " + out +
                           " --interval 30 --agg median")
              .code == 2);
    CHECK(run_cli(tmp, "resample --matrix " + matrix + " --out " + out + " --interval 0.7")
              .code == 2); // 42 s is not on the 30 s base grid
}

TEST_CASE("data and schema failures use distinct exit codes") {
    TempDir tmp;
    const std::string garbage = tmp.file("garbage.png");
    write_text_file(garbage, "not a png at all");
    const std::string reg = tmp.file("registry.csv");
    write_text_file(reg, "segment_id,color,from,to\n");

    // corrupt PNG -> data error
    CHECK(run_cli(tmp, "extract --frames . --mask " + garbage + " --registry " + reg +
                           " --out x.csv")
              .code == 3);
    // missing file -> usage error
    CHECK(run_cli(tmp, "extract --frames . --mask " + tmp.file("absent.png") + " --registry " +
                           reg + " --out x.csv")
              .code == 2);

    // header-only predictions -> data error from evaluate
    const std::string preds = tmp.file("empty_preds.csv");
    write_text_file(preds, "timestamp,node,truth,prediction\n");
    auto eval = run_cli(tmp, "evaluate --predictions " + preds + " --out " + tmp.file("r.csv"));
    CHECK(eval.code == 3);
    CHECK(eval.err.find("data error") != std::string::npos);

    // header-only results -> report says so and exits cleanly
    const std::string results = tmp.file("empty_results.csv");
    write_text_file(results,
                    "interval_min,seq_min,pred_min,model,split,node,rmse,mae,corr,n,"
                    "duration_ms,fingerprint\n");
    auto rep = run_cli(tmp, "report --results " + results);
    CHECK(rep.code == 0);
    CHECK(rep.out.find("no results") != std::string::npos);

    // wrong registry header -> schema error
    const std::string bad_reg = tmp.file("bad_registry.csv");
    write_text_file(bad_reg, "id,colour\n");
    const std::string mask = tmp.file("mask.png");
    REQUIRE(run_cli(tmp, "synth scene --out " + tmp.file("s.conf") + " --mask " + mask).code ==
            0);
    CHECK(run_cli(tmp, "extract --frames . --mask " + mask + " --registry " + bad_reg +
                           " --out x.csv")
              .code == 4);
}

int main(int argc, char** argv) {
    doctest::Context context;
    context.applyCommandLine(argc, argv);
    for (int i = argc - 1; i >= 1; --i) {
        if (argv[i][0] != '-') {
            g_cli = argv[i];
            break;
        }
    }
    if (g_cli.empty()) {
        std::fprintf(stderr, "usage: cli_test <conglab binary> [doctest options]\n");
        return 1;
    }
    return context.run();
}
