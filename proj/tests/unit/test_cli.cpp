#include <cstdlib>
#include <sstream>

#include "doctest.h"

#include "acx/cli/commands.hpp"
#include "acx/core/error.hpp"
#include "acx/core/text.hpp"
#include "acx/explainer/networks.hpp"
#include "fixtures.hpp"

using namespace acx;
using namespace acx::cli;
namespace fs = std::filesystem;

namespace {

std::string message_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const std::exception& e) {
        return e.what();
    }
    return {};
}

constexpr const char* kTinyConfig = R"(# small tree-cycles run
dataset = tree_cycles
tc.depth = 5
tc.motifs = 8
gnn.epochs = 60
explainer.epochs = 3
explainer.batch_size = 8
)";

Options tiny_run(const fs::path& root) {
    text::write_file_atomic(root / "tiny.cfg", kTinyConfig);
    Options o;
    o.config = root / "tiny.cfg";
    o.out = root / "run";
    return o;
}

std::string masks_of(const fs::path& dir) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.path().extension() == ".mask") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    std::string all;
    for (const auto& f : files) all += f.filename().string() + "\n" + text::read_file(f);
    return all;
}

} // namespace

TEST_SUITE("cli_workbench") {

TEST_CASE("empty config resolves to defaults") {
    auto c = resolve(parse_config(""));
    CHECK(c.dataset == "ba_shapes");
    CHECK(c.seed == 1);
    CHECK(c.hops == 3);
    CHECK(*c.lambda == 2.0);
    CHECK(*c.gnn_edge_dropout == 0.9);
    CHECK(c.gnn_epochs == 1000);
    REQUIRE(c.specs.size() == 5);
    CHECK(c.specs.front() == SubgraphSpec::top_k(5));
    auto t = resolve(parse_config("dataset = tree_cycles\n"));
    CHECK(*t.gnn_edge_dropout == 0.0);
    CHECK(t.specs.back() == SubgraphSpec::top_k(10));
}

TEST_CASE("config errors carry line numbers") {
    const auto msg = message_of([] { parse_config("seed = 3\n\nfoo = 1\n", "run.cfg"); });
    CHECK(msg.find("run.cfg:3") != std::string::npos);
    CHECK(msg.find("unknown key 'foo'") != std::string::npos);
    CHECK_THROWS_AS(parse_config("seed = 3\nfoo = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("seed = 1\nseed = 2\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("seed = abc\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("just words\n"), ConfigError);
    CHECK_THROWS_AS(resolve(parse_config("dataset = tu\n")), ConfigError);
    CHECK_THROWS_AS(resolve(parse_config("dataset = tree_cycles\nba.motifs = 4\n")), ConfigError);
    CHECK_THROWS_AS(resolve(parse_config("gnn.edge_dropout = 1\n")), ConfigError);
}

TEST_CASE("lambda is validated and honoured") {
    const auto msg = message_of([] { resolve(parse_config("lambda = -1\n")); });
    CHECK(msg.find("lambda") != std::string::npos);
    CHECK_THROWS_AS(resolve(parse_config("lambda = -1\n")), ConfigError);
    CHECK(*resolve(parse_config("lambda = 4.5\n")).lambda == 4.5);
    CHECK(*resolve(parse_config("lambda = 0\n")).lambda == 0.0);
}

TEST_CASE("snapshot text round-trips to the same hash") {
    auto c = resolve(parse_config("dataset = tree_cycles\nseed = 7\nlambda = 3\nspecs = K=3, K=4\n"));
    const auto h = snapshot_hash(c);
    CHECK(h.size() == 16);
    CHECK(snapshot_hash(resolve(parse_config(snapshot_text(c)))) == h);
    auto d = c;
    d.jobs = 8;
    d.out = "/elsewhere";
    CHECK(snapshot_hash(d) == h);
    d.seed = 8;
    CHECK(snapshot_hash(d) != h);
    // every key in the snapshot is a known key
    const auto snap = snapshot_text(c);
    for (auto line : text::split(snap, '\n')) {
        line = text::trim(line);
        if (line.empty() || line[0] == '#') continue;
        const auto key = std::string(text::trim(line.substr(0, line.find('='))));
        const auto& keys = config_keys();
        CHECK(std::any_of(keys.begin(), keys.end(), [&](const KeyInfo& k) { return k.key == key; }));
    }
}

TEST_CASE("run directory binding and lock") {
    const auto root = acx::testing::scratch_dir("cli_bind");
    RunDirectory dir(root / "run");
    CHECK_THROWS_AS(dir.stored_hash(), PrerequisiteError);
    auto a = resolve(parse_config("seed = 1\n"));
    auto b = resolve(parse_config("seed = 2\n"));
    dir.bind_snapshot(a);
    CHECK(dir.stored_hash() == snapshot_hash(a));
    CHECK(snapshot_hash(dir.stored_config()) == snapshot_hash(a));
    dir.bind_snapshot(a);
    CHECK_THROWS_AS(dir.bind_snapshot(b), ConfigError);
    {
        RunLock lock(dir);
        CHECK(fs::exists(dir.lock_file()));
        const auto msg = message_of([&] { RunLock again(dir); });
        CHECK(msg.find("locked") != std::string::npos);
    }
    CHECK_FALSE(fs::exists(dir.lock_file()));

    write_meta(root / "x.csv", {{"snapshot", "abc"}, {"seed", "1"}});
    const auto meta = read_meta(root / "x.csv");
    CHECK(meta.at("seed") == "1");
    require_snapshot(meta, "abc", "x.csv");
    CHECK_THROWS_AS(require_snapshot(meta, "def", "x.csv"), ConfigError);
    CHECK_THROWS_AS(read_meta(root / "y.csv"), FormatError);
    fs::remove_all(root);
}

TEST_CASE("exit codes") {
    CHECK(exit_code(ConfigError("x")) == 2);
    CHECK(exit_code(PrerequisiteError("x")) == 3);
    CHECK(exit_code(DataError("x")) == 3);
    CHECK(exit_code(NumericalError("x")) == 4);
    CHECK(exit_code(FormatError("x")) == 1);
    CHECK(exit_code(std::runtime_error("x")) == 1);
}

TEST_CASE("commands need their prerequisites") {
    const auto root = acx::testing::scratch_dir("cli_prereq");
    Options o;
    o.out = root / "empty";
    std::ostringstream log;
    CHECK_THROWS_AS(run_command("report", o, log), PrerequisiteError);
    CHECK_THROWS_AS(run_command("train-gnn", o, log), PrerequisiteError);
    CHECK_THROWS_AS(run_command("bogus", o, log), std::exception);
    Options none;
    ::unsetenv("ACX_OUT");
    CHECK_THROWS_AS(make_context(none), ConfigError);
    ::setenv("ACX_OUT", (root / "env").c_str(), 1);
    CHECK(make_context(none).dir.root() == root / "env");
    ::unsetenv("ACX_OUT");
    fs::remove_all(root);
}

TEST_CASE("small end-to-end run") {
    const auto root = acx::testing::scratch_dir("cli_e2e");
    auto o = tiny_run(root);
    RunDirectory dir(*o.out);
    std::ostringstream log;
    for (const auto& cmd : {"gen-data", "train-gnn", "extract-gt", "train-explainer", "evaluate", "export-viz"})
        REQUIRE_NOTHROW(run_command(cmd, o, log));
    for (const auto& p : {dir.workload(), dir.target_model(), dir.generator(), dir.discriminator(), dir.metrics_csv(),
                          dir.table_txt(), dir.loss_report(), dir.train_log()})
        CHECK(fs::exists(p));
    CHECK(text::read_file(dir.target_model()).rfind("acx-gnn v1 node ", 0) == 0);
    CHECK(text::read_file(dir.loss_report()).rfind("epoch,L_S,L_L,L_D,L_G,L_Fid\n", 0) == 0);
    const auto metrics = text::read_file(dir.metrics_csv());
    CHECK(metrics.rfind("dataset,explainer,selector,fid_plus,fid_minus,acc_exp\n", 0) == 0);
    CHECK(read_meta(dir.metrics_csv()).at("snapshot") == dir.stored_hash());

    std::size_t dots = 0;
    for (const auto& e : fs::directory_iterator(dir.viz_dir("acgan"))) {
        if (e.path().extension() != ".dot") continue;
        ++dots;
        CHECK(text::read_file(e.path()).find("important=true") != std::string::npos);
    }
    CHECK(dots > 0);

    // rerunning evaluate reuses everything and rewrites no model
    const auto gen_time = fs::last_write_time(dir.generator());
    const auto target_time = fs::last_write_time(dir.target_model());
    const auto gen_sum = explainer::load_generator(dir.generator()).checksum();
    std::ostringstream again;
    run_command("evaluate", Options{std::nullopt, std::nullopt, std::nullopt, std::nullopt, o.out}, again);
    CHECK(again.str().find("reusing") != std::string::npos);
    CHECK(fs::last_write_time(dir.generator()) == gen_time);
    CHECK(fs::last_write_time(dir.target_model()) == target_time);
    CHECK(explainer::load_generator(dir.generator()).checksum() == gen_sum);
    CHECK(text::read_file(dir.metrics_csv()) == metrics);

    // parallel ground truth writes the same masks
    const auto serial = masks_of(dir.gt_dir());
    auto par = o;
    par.jobs = 4;
    run_command("extract-gt", par, log);
    CHECK(masks_of(dir.gt_dir()) == serial);

    // another seed does not fit this directory
    auto other = o;
    other.seed = 99;
    CHECK_THROWS_AS(run_command("evaluate", other, log), ConfigError);

    std::ostringstream report;
    run_command("report", Options{std::nullopt, std::nullopt, std::nullopt, std::nullopt, o.out}, report);
    CHECK(report.str() == text::read_file(dir.table_txt()));
    fs::remove_all(root);
}

}
