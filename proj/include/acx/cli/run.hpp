#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "acx/cli/config.hpp"

namespace acx::cli {

/// Layout of one run:
///   config.snapshot                 resolved config, first line "# snapshot <hash>"
///   run.lock                        held while a command runs
///   data/workload.json
///   models/target.gnn, generator.gnn, discriminator.gnn
///   gt/<instance>.mask, gt/manifest.csv
///   explanations/<explainer>/<instance>.mask
///   reports/metrics.csv, reports/table.txt
///   logs/train_gnn.csv, logs/loss_report.csv
///   viz/<explainer>/<instance>.dot, .graphml
/// Every artifact carries the snapshot hash, in-file or in a ".meta" sidecar.
class RunDirectory {
public:
    explicit RunDirectory(std::filesystem::path root) : root_(std::move(root)) {}

    const std::filesystem::path& root() const noexcept { return root_; }
    std::filesystem::path snapshot_file() const { return root_ / "config.snapshot"; }
    std::filesystem::path lock_file() const { return root_ / "run.lock"; }
    std::filesystem::path workload() const { return root_ / "data" / "workload.json"; }
    std::filesystem::path target_model() const { return root_ / "models" / "target.gnn"; }
    std::filesystem::path generator() const { return root_ / "models" / "generator.gnn"; }
    std::filesystem::path discriminator() const { return root_ / "models" / "discriminator.gnn"; }
    std::filesystem::path gt_dir() const { return root_ / "gt"; }
    std::filesystem::path explanations(const std::string& explainer) const {
        return root_ / "explanations" / explainer;
    }
    std::filesystem::path metrics_csv() const { return root_ / "reports" / "metrics.csv"; }
    std::filesystem::path table_txt() const { return root_ / "reports" / "table.txt"; }
    std::filesystem::path train_log() const { return root_ / "logs" / "train_gnn.csv"; }
    std::filesystem::path loss_report() const { return root_ / "logs" / "loss_report.csv"; }
    std::filesystem::path viz_dir(const std::string& explainer) const { return root_ / "viz" / explainer; }

    bool has_snapshot() const { return std::filesystem::exists(snapshot_file()); }
    // Hash stored in config.snapshot. Throws PrerequisiteError when absent.
    std::string stored_hash() const;
    // The stored snapshot parsed back into a config.
    RunConfig stored_config() const;

    /// Writes config.snapshot when absent. When present it must carry the
    /// same hash, otherwise ConfigError: artifacts of two configs never share
    /// a directory.
    void bind_snapshot(const RunConfig& resolved) const;

private:
    std::filesystem::path root_;
};

/// Exclusive lock on a run directory for the lifetime of the object.
/// Throws Error naming the holder when the lock file exists.
class RunLock {
public:
    explicit RunLock(const RunDirectory& dir);
    ~RunLock();
    RunLock(const RunLock&) = delete;
    RunLock& operator=(const RunLock&) = delete;

private:
    std::filesystem::path path_;
};

/// Sidecar "<file>.meta": one "key value" pair per line.
void write_meta(const std::filesystem::path& file, const std::map<std::string, std::string>& meta);
std::map<std::string, std::string> read_meta(const std::filesystem::path& file);

/// Throws ConfigError unless meta["snapshot"] equals `hash`. `what` names the
/// artifact in the message.
void require_snapshot(const std::map<std::string, std::string>& meta, const std::string& hash, const std::string& what);

} // namespace acx::cli
