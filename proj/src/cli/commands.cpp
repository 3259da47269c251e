#include "acx/cli/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <map>
#include <ostream>

#include <omp.h>

#include "acx/core/checksum.hpp"
#include "acx/core/random.hpp"
#include "acx/core/text.hpp"
#include "acx/data/tu.hpp"
#include "acx/data/workload.hpp"
#include "acx/eval/report.hpp"
#include "acx/explainer/acgan.hpp"
#include "acx/gnn/train.hpp"
#include "acx/granger/granger.hpp"
#include "acx/graph/export.hpp"

namespace acx::cli {
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSubsampleStream = 21;

double majority_baseline(const data::Workload& w) {
    std::map<int, std::size_t> hist;
    std::size_t total = 0;
    if (w.task == TaskKind::node) {
        for (int l : *w.graphs.front().node_labels()) ++hist[l], ++total;
    } else {
        for (const auto& g : w.graphs) ++hist[*g.graph_label()], ++total;
    }
    std::size_t best = 0;
    for (const auto& [l, n] : hist) best = std::max(best, n);
    return total ? static_cast<double>(best) / static_cast<double>(total) : 0.0;
}

double test_accuracy(const gnn::GnnModel& f, const data::Workload& w) {
    if (w.task == TaskKind::node) return gnn::node_accuracy(f, w.graphs.front(), w.model_split.test);
    return gnn::graph_accuracy(f, w.graphs, w.model_split.test);
}

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    std::string seconds() const {
        return text::fixed(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(), 1) + "s";
    }
};

data::Workload load_workload(const Context& ctx) {
    if (!fs::exists(ctx.dir.workload())) {
        throw PrerequisiteError(ctx.dir.workload().string() + " is missing; run 'acx gen-data' first");
    }
    std::string snap;
    auto w = data::load_workload(ctx.dir.workload(), &snap);
    require_snapshot({{"snapshot", snap}}, ctx.hash, ctx.dir.workload().string());
    return w;
}

gnn::GnnModel load_target(const Context& ctx) {
    if (!fs::exists(ctx.dir.target_model())) {
        throw PrerequisiteError(ctx.dir.target_model().string() + " is missing; run 'acx train-gnn' first");
    }
    std::map<std::string, std::string> meta;
    auto f = gnn::load_model(ctx.dir.target_model(), &meta);
    require_snapshot(meta, ctx.hash, ctx.dir.target_model().string());
    return f;
}

std::vector<WeightedMask> load_gt(const Context& ctx, const data::Workload& w) {
    if (!fs::exists(ctx.dir.gt_dir() / "manifest.csv")) {
        throw PrerequisiteError(ctx.dir.gt_dir().string() + " has no ground truth; run 'acx extract-gt' first");
    }
    try {
        return granger::read_store(ctx.dir.gt_dir(), w.instances, ctx.hash);
    } catch (const FormatError& e) {
        throw ConfigError(e.what());
    }
}

explainer::Generator load_generator(const Context& ctx, const gnn::GnnModel& f) {
    if (!fs::exists(ctx.dir.generator())) {
        throw PrerequisiteError(ctx.dir.generator().string() + " is missing; run 'acx train-explainer' first");
    }
    std::map<std::string, std::string> meta;
    auto g = explainer::load_generator(ctx.dir.generator(), &meta);
    require_snapshot(meta, ctx.hash, ctx.dir.generator().string());
    if (meta["target_checksum"] != hex64(f.checksum())) {
        throw PrerequisiteError(ctx.dir.generator().string() +
                                " was trained against another target model; rerun 'acx train-explainer'");
    }
    return g;
}

void gen_data(const Context& ctx, std::ostream& log) {
    Timer t;
    const auto& c = ctx.config;
    data::Workload w;
    if (c.dataset == "ba_shapes") {
        w = data::make_node_workload("ba_shapes", data::generate_ba_shapes(ba_params(c), c.seed), c.hops, c.seed);
    } else if (c.dataset == "tree_cycles") {
        w = data::make_node_workload("tree_cycles", data::generate_tree_cycles(tc_params(c), c.seed), c.hops, c.seed);
    } else {
        if (!fs::is_directory(c.tu_path)) throw ConfigError("tu.path " + c.tu_path + " is not a directory");
        auto tu = c.tu_name.empty() ? data::load_tu_dataset(c.tu_path) : data::load_tu_dataset(c.tu_path, c.tu_name);
        for (const auto& warning : tu.warnings) log << "warning: " << warning << '\n';
        std::vector<Graph> graphs = std::move(tu.graphs);
        if (c.tu_subsample && c.tu_subsample < graphs.size()) {
            std::vector<std::size_t> idx(graphs.size());
            for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
            Rng rng(derive_seed(c.seed, kSubsampleStream));
            rng.shuffle(idx);
            idx.resize(c.tu_subsample);
            std::sort(idx.begin(), idx.end());
            std::vector<Graph> kept;
            kept.reserve(idx.size());
            for (auto i : idx) kept.push_back(std::move(graphs[i]));
            graphs = std::move(kept);
        }
        w = data::make_graph_workload(tu.name, std::move(graphs), c.seed);
    }
    fs::create_directories(ctx.dir.workload().parent_path());
    data::save_workload(ctx.dir.workload(), w, ctx.hash);
    std::size_t nodes = 0;
    for (const auto& g : w.graphs) nodes += g.node_count();
    log << "gen-data: " << w.name << ", " << w.graphs.size() << " graph(s), " << nodes << " nodes, " << w.classes
        << " classes, " << w.instances.size() << " instances (" << w.instance_split.train.size() << "/"
        << w.instance_split.validation.size() << "/" << w.instance_split.test.size() << "), majority baseline "
        << text::fixed(majority_baseline(w), 4) << " [" << t.seconds() << "]\n";
}

void train_gnn(const Context& ctx, std::ostream& log) {
    Timer t;
    const auto w = load_workload(ctx);
    const auto& c = ctx.config;
    gnn::TrainConfig tc;
    tc.epochs = c.gnn_epochs;
    tc.lr = c.gnn_lr;
    tc.weight_decay = c.gnn_weight_decay;
    tc.batch_size = c.gnn_batch_size;
    tc.edge_dropout = *c.gnn_edge_dropout;
    tc.seed = c.seed;
    const auto r = gnn::train(w, tc);
    const double acc = test_accuracy(r.model, w);
    const double base = majority_baseline(w);
    fs::create_directories(ctx.dir.target_model().parent_path());
    fs::create_directories(ctx.dir.train_log().parent_path());
    gnn::save_model(ctx.dir.target_model(), r.model,
                    {{"snapshot", ctx.hash},
                     {"best_epoch", std::to_string(r.best_epoch)},
                     {"test_accuracy", text::fixed(acc, 4)},
                     {"majority_baseline", text::fixed(base, 4)}});
    text::write_file_atomic(ctx.dir.train_log(), gnn::format_train_log(r.log));
    write_meta(ctx.dir.train_log(), {{"snapshot", ctx.hash}});
    log << "train-gnn: best epoch " << r.best_epoch << ", validation " << text::fixed(r.best_validation_accuracy, 4)
        << ", test " << text::fixed(acc, 4) << " vs majority " << text::fixed(base, 4) << " [" << t.seconds()
        << "]\n";
}

void extract_gt(const Context& ctx, std::ostream& log) {
    Timer t;
    const auto w = load_workload(ctx);
    const auto f = load_target(ctx);
    const auto gts = granger::extract_all(f, w.instances, ctx.config.jobs);
    granger::write_store(ctx.dir.gt_dir(), gts, ctx.hash);
    log << "extract-gt: " << gts.size() << " instances, jobs " << ctx.config.jobs << " [" << t.seconds() << "]\n";
}

void train_explainer(const Context& ctx, std::ostream& log) {
    Timer t;
    const auto w = load_workload(ctx);
    const auto f = load_target(ctx);
    const auto gt = load_gt(ctx, w);
    const auto& c = ctx.config;

    std::vector<explainer::Sample> train;
    for (auto i : w.instance_split.train) train.push_back(explainer::make_sample(f, w.instances[i].graph, gt[i]));
    std::vector<std::shared_ptr<const Graph>> validation;
    for (auto i : w.instance_split.validation) validation.push_back(w.instances[i].graph);

    explainer::ExplainerTrainConfig ec;
    ec.lambda = *c.lambda;
    ec.epochs = c.explainer_epochs;
    ec.batch_size = c.explainer_batch_size;
    ec.generator_lr = c.explainer_generator_lr;
    ec.discriminator_lr = c.explainer_discriminator_lr;
    ec.seed = c.seed;
    ec.validation_grid = c.specs;
    const std::size_t every = std::max<std::size_t>(1, c.explainer_epochs / 20);
    ec.on_epoch = [&](const explainer::LossEntry& e, double acc, const explainer::Generator&) {
        if (e.epoch % every != 0 && e.epoch != 1) return;
        log << "  epoch " << e.epoch << "  L_D " << text::fixed(e.l_d, 4) << "  L_G " << text::fixed(e.l_g, 4)
            << "  L_Fid " << text::fixed(e.l_fid, 4) << "  val ACC " << text::fixed(acc, 4) << '\n';
        log.flush();
    };
    const auto r = explainer::train_acgan(f, train, validation, ec);

    fs::create_directories(ctx.dir.generator().parent_path());
    fs::create_directories(ctx.dir.loss_report().parent_path());
    const std::map<std::string, std::string> meta = {{"snapshot", ctx.hash},
                                                     {"target_checksum", hex64(f.checksum())},
                                                     {"best_epoch", std::to_string(r.best_epoch)}};
    explainer::save_generator(ctx.dir.generator(), r.generator, meta);
    explainer::save_discriminator(ctx.dir.discriminator(), r.discriminator, meta);
    text::write_file_atomic(ctx.dir.loss_report(), explainer::format_loss_report(r.report));
    write_meta(ctx.dir.loss_report(), {{"snapshot", ctx.hash}});
    log << "train-explainer: best epoch " << r.best_epoch << ", validation ACC "
        << text::fixed(r.best_validation_acc, 4) << ", L_G first " << text::fixed(r.report.front().l_g, 4)
        << " last " << text::fixed(r.report.back().l_g, 4) << " [" << t.seconds() << "]\n";
}

constexpr const char* kAcgan = "acgan";
constexpr const char* kGranger = "granger";

// Generator masks for `instances`, reused from explanations/acgan when they
// were written under the same snapshot and generator.
std::vector<WeightedMask> generator_masks(const Context& ctx, const explainer::Generator& g,
                                          const gnn::GnnModel& f, const std::vector<const data::Instance*>& instances,
                                          std::ostream& log) {
    const auto dir = ctx.dir.explanations(kAcgan);
    const auto manifest = dir / "manifest.csv";
    const std::map<std::string, std::string> want = {{"snapshot", ctx.hash},
                                                     {"generator_checksum", hex64(g.checksum())},
                                                     {"target_checksum", hex64(f.checksum())}};
    std::vector<WeightedMask> masks(instances.size());
    bool reuse = fs::exists(manifest) && fs::exists(manifest.string() + ".meta") && read_meta(manifest) == want;
    if (reuse) {
        for (std::size_t i = 0; i < instances.size() && reuse; ++i) {
            const auto path = dir / (instances[i]->id + ".mask");
            if (!fs::exists(path)) {
                reuse = false;
                break;
            }
            std::string snap;
            masks[i] = granger::parse_mask(text::read_file(path), instances[i]->graph->node_count(), &snap);
            reuse = snap == ctx.hash;
        }
    }
    if (reuse) {
        log << "evaluate: reusing " << masks.size() << " persisted explanations\n";
        return masks;
    }
    std::vector<int> labels(instances.size());
    std::string error;
    const int n = static_cast<int>(instances.size());
#pragma omp parallel for schedule(dynamic) num_threads(static_cast<int>(ctx.config.jobs))
    for (int i = 0; i < n; ++i) {
        try {
            labels[i] = gnn::predict_label(f, *instances[i]->graph).label;
            masks[i] = g.mask(*instances[i]->graph, labels[i]);
        } catch (const std::exception& e) {
#pragma omp critical
            if (error.empty()) error = instances[i]->id + ": " + e.what();
        }
    }
    if (!error.empty()) throw NumericalError("explaining " + error);
    fs::create_directories(dir);
    std::string csv = "instance,label\n";
    for (std::size_t i = 0; i < instances.size(); ++i) {
        text::write_file_atomic(dir / (instances[i]->id + ".mask"), granger::format_mask(masks[i], ctx.hash));
        csv += instances[i]->id + "," + std::to_string(labels[i]) + "\n";
    }
    text::write_file_atomic(manifest, csv);
    write_meta(manifest, want);
    log << "evaluate: generated " << masks.size() << " explanations\n";
    return masks;
}

void evaluate(const Context& ctx, std::ostream& log) {
    Timer t;
    const auto w = load_workload(ctx);
    const auto f = load_target(ctx);
    const auto g = load_generator(ctx, f);
    const auto gt = load_gt(ctx, w);
    const auto before = g.checksum();

    const auto test = w.instances_in(w.instance_split.test);
    std::vector<eval::ExplainerMasks> explainers(2);
    explainers[0] = {kAcgan, generator_masks(ctx, g, f, test, log)};
    explainers[1].name = kGranger;
    for (auto i : w.instance_split.test) explainers[1].masks.push_back(gt[i]);

    // every emitted explanation is audited against its source graph
    std::size_t audited = 0;
    for (const auto& ex : explainers) {
        for (std::size_t i = 0; i < test.size(); ++i) {
            const int label = gnn::predict_label(f, *test[i]->graph).label;
            for (const auto& spec : ctx.config.specs) {
                const auto e = make_explanation(test[i]->graph, ex.masks[i], spec, label, ex.name);
                if (!is_valid(e)) throw ValidityError(ex.name + " explanation of " + test[i]->id + " leaves its graph");
                ++audited;
            }
        }
    }

    auto report = eval::sweep(f, w.name, test, explainers, ctx.config.specs, ctx.config.jobs);
    if (g.checksum() != before || load_generator(ctx, f).checksum() != before) {
        throw NumericalError("generator parameters changed during evaluate");
    }
    report.meta = {{"snapshot", ctx.hash},
                   {"seed", std::to_string(ctx.config.seed)},
                   {"target_checksum", hex64(f.checksum())},
                   {"generator_checksum", hex64(before)},
                   {"test_instances", std::to_string(test.size())},
                   {"explanations_audited", std::to_string(audited)}};
    fs::create_directories(ctx.dir.metrics_csv().parent_path());
    text::write_file_atomic(ctx.dir.metrics_csv(), eval::format_report_csv(report));
    write_meta(ctx.dir.metrics_csv(), report.meta);
    const auto table = eval::render_table(report);
    text::write_file_atomic(ctx.dir.table_txt(), table);
    log << table << "evaluate: " << test.size() << " test instances, " << audited << " explanations valid, generator "
        << hex64(before) << " unchanged [" << t.seconds() << "]\n";
}

void export_viz(const Context& ctx, std::ostream& log) {
    Timer t;
    const auto w = load_workload(ctx);
    const auto f = load_target(ctx);
    const auto gt = load_gt(ctx, w);
    const auto manifest = ctx.dir.explanations(kAcgan) / "manifest.csv";
    if (!fs::exists(manifest)) throw PrerequisiteError("no persisted explanations; run 'acx evaluate' first");
    require_snapshot(read_meta(manifest), ctx.hash, manifest.string());

    const auto spec = *ctx.config.viz_selector;
    const auto test = w.instances_in(w.instance_split.test);
    std::size_t written = 0;
    for (const char* name : {kAcgan, kGranger}) {
        const auto out = ctx.dir.viz_dir(name);
        fs::create_directories(out);
        for (std::size_t i = 0; i < test.size(); ++i) {
            const auto& inst = *test[i];
            WeightedMask mask;
            if (name == std::string(kAcgan)) {
                const auto path = ctx.dir.explanations(kAcgan) / (inst.id + ".mask");
                if (!fs::exists(path)) throw PrerequisiteError(path.string() + " is missing; run 'acx evaluate' first");
                std::string snap;
                mask = granger::parse_mask(text::read_file(path), inst.graph->node_count(), &snap);
                require_snapshot({{"snapshot", snap}}, ctx.hash, path.string());
            } else {
                mask = gt[w.instance_split.test[i]];
            }
            const int label = gnn::predict_label(f, *inst.graph).label;
            const auto e = make_explanation(inst.graph, std::move(mask), spec, label, name);
            text::write_file_atomic(out / (inst.id + ".dot"), viz::to_dot(e, inst.id));
            text::write_file_atomic(out / (inst.id + ".graphml"), viz::to_graphml(e, inst.id));
            written += 2;
        }
    }
    log << "export-viz: " << written << " files at " << spec.label() << " under " << (ctx.dir.root() / "viz").string()
        << " [" << t.seconds() << "]\n";
}

void report(const Context& ctx, std::ostream& log) {
    if (!fs::exists(ctx.dir.metrics_csv())) {
        throw PrerequisiteError("no reports in " + ctx.dir.root().string() + "; run 'acx evaluate' first");
    }
    require_snapshot(read_meta(ctx.dir.metrics_csv()), ctx.hash, ctx.dir.metrics_csv().string());
    log << eval::render_table(eval::parse_report_csv(text::read_file(ctx.dir.metrics_csv())));
}

using Step = void (*)(const Context&, std::ostream&);

const std::vector<std::pair<std::string, Step>>& steps() {
    static const std::vector<std::pair<std::string, Step>> s = {
        {"gen-data", gen_data},     {"train-gnn", train_gnn}, {"extract-gt", extract_gt},
        {"train-explainer", train_explainer}, {"evaluate", evaluate}, {"export-viz", export_viz},
    };
    return s;
}

} // namespace

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& [n, s] : steps()) v.push_back(n);
        v.push_back("report");
        v.push_back("pipeline");
        return v;
    }();
    return names;
}

Context make_context(const Options& options) {
    fs::path out;
    RunConfig c;
    if (options.config) c = load_config(*options.config);
    if (options.out) out = *options.out;
    else if (!c.out.empty()) out = c.out;
    else if (const char* env = std::getenv("ACX_OUT"); env && *env) out = env;
    else throw ConfigError("no run directory: pass --out, set 'out' in the config, or set ACX_OUT");

    RunDirectory dir(out);
    if (!options.config && dir.has_snapshot()) c = dir.stored_config();
    if (options.seed) c.seed = *options.seed;
    if (options.scale) {
        try {
            c.scale = data::parse_scale(*options.scale);
        } catch (const UsageError& e) {
            throw ConfigError(std::string("--scale: ") + e.what());
        }
    }
    if (options.jobs) {
        if (*options.jobs == 0) throw ConfigError("--jobs must be at least 1");
        c.jobs = *options.jobs;
    }
    c.out = out.string();
    c = resolve(std::move(c));
    return {c, dir, snapshot_hash(c)};
}

void run_command(const std::string& name, const Options& options, std::ostream& log) {
    const bool known = std::find(command_names().begin(), command_names().end(), name) != command_names().end();
    if (!known) throw ConfigError("unknown command '" + name + "'");
    const auto ctx = make_context(options);
    const bool creates = name == "gen-data" || name == "pipeline";
    if (!creates && !ctx.dir.has_snapshot()) {
        if (name == "report") throw PrerequisiteError("no reports in " + ctx.dir.root().string() + "; run 'acx evaluate' first");
        throw PrerequisiteError(ctx.dir.root().string() + " is not a run directory; run 'acx gen-data' first");
    }
    RunLock lock(ctx.dir);
    ctx.dir.bind_snapshot(ctx.config);
    if (name == "report") return report(ctx, log);
    for (const auto& [step, fn] : steps()) {
        if (name == "pipeline" || name == step) fn(ctx, log);
    }
}

int exit_code(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e)) return 2;
    if (dynamic_cast<const PrerequisiteError*>(&e) || dynamic_cast<const DataError*>(&e)) return 3;
    if (dynamic_cast<const NumericalError*>(&e)) return 4;
    return 1;
}

} // namespace acx::cli
