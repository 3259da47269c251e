#include "acx/cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>

#include "acx/core/checksum.hpp"
#include "acx/core/text.hpp"
#include "acx/eval/report.hpp"
#include "acx/explainer/acgan.hpp"

namespace acx::cli {
namespace {

struct BadValue {
    std::string what;
};

std::size_t as_count(std::string_view v, long long min = 0) {
    auto n = text::parse_int(v);
    if (!n || *n < min) throw BadValue{"expected an integer >= " + std::to_string(min)};
    return static_cast<std::size_t>(*n);
}

double as_real(std::string_view v) {
    auto d = text::parse_double(v);
    if (!d || !std::isfinite(*d)) throw BadValue{"expected a number"};
    return *d;
}

std::string as_text(std::string_view v) {
    if (v.empty()) throw BadValue{"empty value"};
    return std::string(v);
}

std::vector<SubgraphSpec> as_specs(std::string_view v) {
    std::vector<SubgraphSpec> out;
    for (auto part : text::split(v, ',')) {
        try {
            out.push_back(SubgraphSpec::parse(std::string(text::trim(part))));
        } catch (const UsageError& e) {
            throw BadValue{e.what()};
        }
    }
    if (out.empty()) throw BadValue{"empty spec list"};
    return out;
}

SubgraphSpec as_spec(std::string_view v) {
    auto s = as_specs(v);
    if (s.size() != 1) throw BadValue{"expected a single spec"};
    return s.front();
}

std::string spec_list(const std::vector<SubgraphSpec>& specs) {
    std::string s;
    for (const auto& spec : specs) s += (s.empty() ? "" : ",") + spec.label();
    return s;
}

template <class T>
std::optional<std::string> opt(const std::optional<T>& v) {
    if (!v) return std::nullopt;
    if constexpr (std::is_same_v<T, double>) return text::exact(*v);
    else return std::to_string(*v);
}

struct Key {
    KeyInfo info;
    std::function<void(RunConfig&, std::string_view)> set;
    // nullopt: unset optional, left out of the snapshot
    std::function<std::optional<std::string>(const RunConfig&)> get;
    bool in_snapshot = true;
};

const std::vector<Key>& keys() {
    static const std::vector<Key> k = {
        {{"dataset", "ba_shapes, tree_cycles or tu"},
         [](RunConfig& c, std::string_view v) {
             if (v != "ba_shapes" && v != "tree_cycles" && v != "tu")
                 throw BadValue{"expected ba_shapes, tree_cycles or tu"};
             c.dataset = v;
         },
         [](const RunConfig& c) { return std::optional(c.dataset); }},
        {{"tu.path", "directory holding the TU files (dataset = tu)"},
         [](RunConfig& c, std::string_view v) { c.tu_path = as_text(v); },
         [](const RunConfig& c) { return c.tu_path.empty() ? std::nullopt : std::optional(c.tu_path); }},
        {{"tu.name", "TU dataset name; inferred from <name>_A.txt when unset"},
         [](RunConfig& c, std::string_view v) { c.tu_name = as_text(v); },
         [](const RunConfig& c) { return c.tu_name.empty() ? std::nullopt : std::optional(c.tu_name); }},
        {{"tu.subsample", "keep this many graphs, chosen by seed; 0 keeps all"},
         [](RunConfig& c, std::string_view v) { c.tu_subsample = as_count(v); },
         [](const RunConfig& c) {
             return c.dataset == "tu" ? std::optional(std::to_string(c.tu_subsample)) : std::nullopt;
         }},
        {{"scale", "desk or paper preset for the synthetic generators"},
         [](RunConfig& c, std::string_view v) {
             try {
                 c.scale = data::parse_scale(std::string(v));
             } catch (const UsageError&) {
                 throw BadValue{"expected desk or paper"};
             }
         },
         [](const RunConfig& c) { return std::optional(data::to_string(c.scale)); }},
        {{"seed", "master seed"},
         [](RunConfig& c, std::string_view v) { c.seed = as_count(v); },
         [](const RunConfig& c) { return std::optional(std::to_string(c.seed)); }},
        {{"hops", "neighbourhood radius of node-task instances"},
         [](RunConfig& c, std::string_view v) { c.hops = as_count(v, 1); },
         [](const RunConfig& c) { return std::optional(std::to_string(c.hops)); }},
        {{"ba.base_nodes", "BA-Shapes base graph size (default from scale)"},
         [](RunConfig& c, std::string_view v) { c.ba_base_nodes = as_count(v, 2); },
         [](const RunConfig& c) { return opt(c.ba_base_nodes); }},
        {{"ba.motifs", "number of houses (default from scale)"},
         [](RunConfig& c, std::string_view v) { c.ba_motifs = as_count(v, 1); },
         [](const RunConfig& c) { return opt(c.ba_motifs); }},
        {{"ba.random_edge_ratio", "extra random edges per base edge (default from scale)"},
         [](RunConfig& c, std::string_view v) { c.ba_random_edge_ratio = as_real(v); },
         [](const RunConfig& c) { return opt(c.ba_random_edge_ratio); }},
        {{"ba.attachment", "edges per new BA node (default from scale)"},
         [](RunConfig& c, std::string_view v) { c.ba_attachment = as_count(v, 1); },
         [](const RunConfig& c) { return opt(c.ba_attachment); }},
        {{"tc.depth", "Tree-Cycles tree depth (default from scale)"},
         [](RunConfig& c, std::string_view v) { c.tc_depth = as_count(v, 2); },
         [](const RunConfig& c) { return opt(c.tc_depth); }},
        {{"tc.motifs", "number of cycles (default from scale)"},
         [](RunConfig& c, std::string_view v) { c.tc_motifs = as_count(v, 1); },
         [](const RunConfig& c) { return opt(c.tc_motifs); }},
        {{"gnn.epochs", "target model epochs"},
         [](RunConfig& c, std::string_view v) { c.gnn_epochs = as_count(v, 1); },
         [](const RunConfig& c) { return std::optional(std::to_string(c.gnn_epochs)); }},
        {{"gnn.lr", "target model Adam step size"},
         [](RunConfig& c, std::string_view v) { c.gnn_lr = as_real(v); },
         [](const RunConfig& c) { return std::optional(text::exact(c.gnn_lr)); }},
        {{"gnn.weight_decay", "target model L2 weight"},
         [](RunConfig& c, std::string_view v) { c.gnn_weight_decay = as_real(v); },
         [](const RunConfig& c) { return std::optional(text::exact(c.gnn_weight_decay)); }},
        {{"gnn.batch_size", "graphs per minibatch (graph tasks)"},
         [](RunConfig& c, std::string_view v) { c.gnn_batch_size = as_count(v, 1); },
         [](const RunConfig& c) { return std::optional(std::to_string(c.gnn_batch_size)); }},
        {{"gnn.edge_dropout", "upper bound of the per-epoch edge drop rate (0.9 for ba_shapes, else 0)"},
         [](RunConfig& c, std::string_view v) { c.gnn_edge_dropout = as_real(v); },
         [](const RunConfig& c) { return opt(c.gnn_edge_dropout); }},
        {{"lambda", "fidelity weight (2.0 synthetic, 4.5 NCI1, 4.0 other TU)"},
         [](RunConfig& c, std::string_view v) { c.lambda = as_real(v); },
         [](const RunConfig& c) { return opt(c.lambda); }},
        {{"explainer.epochs", "ACGAN epochs"},
         [](RunConfig& c, std::string_view v) { c.explainer_epochs = as_count(v, 1); },
         [](const RunConfig& c) { return std::optional(std::to_string(c.explainer_epochs)); }},
        {{"explainer.batch_size", "ACGAN minibatch size"},
         [](RunConfig& c, std::string_view v) { c.explainer_batch_size = as_count(v, 1); },
         [](const RunConfig& c) { return std::optional(std::to_string(c.explainer_batch_size)); }},
        {{"explainer.generator_lr", "generator Adam step size"},
         [](RunConfig& c, std::string_view v) { c.explainer_generator_lr = as_real(v); },
         [](const RunConfig& c) { return std::optional(text::exact(c.explainer_generator_lr)); }},
        {{"explainer.discriminator_lr", "discriminator Adam step size"},
         [](RunConfig& c, std::string_view v) { c.explainer_discriminator_lr = as_real(v); },
         [](const RunConfig& c) { return std::optional(text::exact(c.explainer_discriminator_lr)); }},
        {{"specs", "comma list of selectors, e.g. K=5,K=6 or R=0.5 (default per dataset)"},
         [](RunConfig& c, std::string_view v) { c.specs = as_specs(v); },
         [](const RunConfig& c) { return std::optional(spec_list(c.specs)); }},
        {{"viz.selector", "selector used by export-viz (default: last of specs)"},
         [](RunConfig& c, std::string_view v) { c.viz_selector = as_spec(v); },
         [](const RunConfig& c) {
             return c.viz_selector ? std::optional(c.viz_selector->label()) : std::nullopt;
         }},
        {{"jobs", "threads for extract-gt and evaluate"},
         [](RunConfig& c, std::string_view v) { c.jobs = as_count(v, 1); },
         [](const RunConfig& c) { return std::optional(std::to_string(c.jobs)); }, false},
        {{"out", "run directory; --out wins, ACX_OUT is the fallback"},
         [](RunConfig& c, std::string_view v) { c.out = as_text(v); },
         [](const RunConfig& c) { return c.out.empty() ? std::nullopt : std::optional(c.out); }, false},
    };
    return k;
}

const Key* find_key(std::string_view name) {
    for (const auto& k : keys())
        if (k.info.key == name) return &k;
    return nullptr;
}

} // namespace

const std::vector<KeyInfo>& config_keys() {
    static const std::vector<KeyInfo> info = [] {
        std::vector<KeyInfo> v;
        for (const auto& k : keys()) v.push_back(k.info);
        return v;
    }();
    return info;
}

RunConfig parse_config(std::string_view text, const std::string& origin) {
    RunConfig c;
    std::set<std::string, std::less<>> seen;
    std::size_t line_no = 0;
    for (auto line : text::split(text, '\n')) {
        ++line_no;
        const auto where = origin + ":" + std::to_string(line_no) + ": ";
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = text::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError(where + "expected 'key = value'");
        const auto key = text::trim(line.substr(0, eq));
        const auto value = text::trim(line.substr(eq + 1));
        const Key* k = find_key(key);
        if (!k) throw ConfigError(where + "unknown key '" + std::string(key) + "'");
        if (!seen.insert(std::string(key)).second) throw ConfigError(where + "duplicate key '" + std::string(key) + "'");
        try {
            k->set(c, value);
        } catch (const BadValue& e) {
            throw ConfigError(where + std::string(key) + " = '" + std::string(value) + "': " + e.what);
        }
    }
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw ConfigError("config file " + path.string() + " does not exist");
    return parse_config(text::read_file(path), path.string());
}

RunConfig resolve(RunConfig c) {
    auto fail = [](const std::string& m) { throw ConfigError("config: " + m); };
    if (c.dataset == "tu" && c.tu_path.empty()) fail("dataset = tu needs tu.path");
    if (c.dataset != "tu" && (!c.tu_path.empty() || !c.tu_name.empty() || c.tu_subsample))
        fail("tu.* keys only apply to dataset = tu");
    if (c.lambda && *c.lambda < 0.0) fail("lambda must be >= 0, got " + text::exact(*c.lambda));
    if (c.gnn_lr <= 0.0) fail("gnn.lr must be positive");
    if (c.gnn_weight_decay < 0.0) fail("gnn.weight_decay must be >= 0");
    if (c.explainer_generator_lr <= 0.0 || c.explainer_discriminator_lr <= 0.0)
        fail("explainer learning rates must be positive");
    if (c.gnn_edge_dropout && (*c.gnn_edge_dropout < 0.0 || *c.gnn_edge_dropout >= 1.0))
        fail("gnn.edge_dropout must lie in [0, 1)");
    if (c.ba_random_edge_ratio && *c.ba_random_edge_ratio < 0.0) fail("ba.random_edge_ratio must be >= 0");
    for (const auto& s : c.specs)
        if (s.mode == SubgraphSpec::Mode::top_r && (s.r <= 0.0 || s.r > 1.0)) fail("R selectors need 0 < R <= 1");

    const std::string name = c.dataset == "tu" ? (c.tu_name.empty() ? "tu" : c.tu_name) : c.dataset;
    if (!c.gnn_edge_dropout) c.gnn_edge_dropout = c.dataset == "ba_shapes" ? 0.9 : 0.0;
    if (!c.lambda) c.lambda = explainer::default_lambda(name);
    if (c.specs.empty()) c.specs = eval::default_grid(name);
    if (!c.viz_selector) c.viz_selector = c.specs.back();
    if (c.dataset == "ba_shapes") {
        const auto p = data::ba_shapes_preset(c.scale);
        if (!c.ba_base_nodes) c.ba_base_nodes = p.base_nodes;
        if (!c.ba_motifs) c.ba_motifs = p.motif_count;
        if (!c.ba_random_edge_ratio) c.ba_random_edge_ratio = p.random_edge_ratio;
        if (!c.ba_attachment) c.ba_attachment = p.attachment;
        if (*c.ba_attachment >= *c.ba_base_nodes) fail("ba.attachment must be below ba.base_nodes");
    } else if (c.ba_base_nodes || c.ba_motifs || c.ba_random_edge_ratio || c.ba_attachment) {
        fail("ba.* keys only apply to dataset = ba_shapes");
    }
    if (c.dataset == "tree_cycles") {
        const auto p = data::tree_cycles_preset(c.scale);
        if (!c.tc_depth) c.tc_depth = p.tree_depth;
        if (!c.tc_motifs) c.tc_motifs = p.motif_count;
    } else if (c.tc_depth || c.tc_motifs) {
        fail("tc.* keys only apply to dataset = tree_cycles");
    }
    return c;
}

std::string snapshot_text(const RunConfig& c) {
    std::map<std::string, std::string> lines;
    for (const auto& k : keys()) {
        if (!k.in_snapshot) continue;
        if (auto v = k.get(c)) lines.emplace(std::string(k.info.key), *v);
    }
    std::string s;
    for (const auto& [key, value] : lines) s += key + " = " + value + "\n";
    return s;
}

std::string snapshot_hash(const RunConfig& c) { return hex64(fnv1a(snapshot_text(c))); }

data::BaShapesParams ba_params(const RunConfig& c) {
    auto p = data::ba_shapes_preset(c.scale);
    if (c.ba_base_nodes) p.base_nodes = *c.ba_base_nodes;
    if (c.ba_motifs) p.motif_count = *c.ba_motifs;
    if (c.ba_random_edge_ratio) p.random_edge_ratio = *c.ba_random_edge_ratio;
    if (c.ba_attachment) p.attachment = *c.ba_attachment;
    return p;
}

data::TreeCyclesParams tc_params(const RunConfig& c) {
    auto p = data::tree_cycles_preset(c.scale);
    if (c.tc_depth) p.tree_depth = *c.tc_depth;
    if (c.tc_motifs) p.motif_count = *c.tc_motifs;
    return p;
}

} // namespace acx::cli
