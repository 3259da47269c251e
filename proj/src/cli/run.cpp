#include "acx/cli/run.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "acx/core/text.hpp"

namespace acx::cli {
namespace fs = std::filesystem;

namespace {
constexpr std::string_view kSnapshotPrefix = "# snapshot ";
}

std::string RunDirectory::stored_hash() const {
    if (!has_snapshot()) {
        throw PrerequisiteError(root_.string() + " has no config snapshot; run 'acx gen-data' first");
    }
    const auto text = text::read_file(snapshot_file());
    const auto first = text.substr(0, text.find('\n'));
    if (first.rfind(kSnapshotPrefix, 0) != 0) throw ConfigError(snapshot_file().string() + ": missing hash line");
    return first.substr(kSnapshotPrefix.size());
}

RunConfig RunDirectory::stored_config() const {
    const auto hash = stored_hash();
    auto c = resolve(parse_config(text::read_file(snapshot_file()), snapshot_file().string()));
    if (snapshot_hash(c) != hash) throw ConfigError(snapshot_file().string() + ": contents do not match its hash");
    return c;
}

void RunDirectory::bind_snapshot(const RunConfig& resolved) const {
    const auto hash = snapshot_hash(resolved);
    if (has_snapshot()) {
        const auto stored = stored_hash();
        if (stored != hash) {
            throw ConfigError(root_.string() + " belongs to config snapshot " + stored + " but this config resolves to " +
                              hash + "; use another --out or the same config");
        }
        return;
    }
    fs::create_directories(root_);
    text::write_file_atomic(snapshot_file(), std::string(kSnapshotPrefix) + hash + "\n" + snapshot_text(resolved));
}

RunLock::RunLock(const RunDirectory& dir) : path_(dir.lock_file()) {
    fs::create_directories(dir.root());
    const int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd < 0) {
        if (errno == EEXIST) {
            std::string holder;
            try {
                holder = std::string(text::trim(text::read_file(path_)));
            } catch (const Error&) {
            }
            throw Error(dir.root().string() + " is locked by another command (" +
                        (holder.empty() ? "unknown holder" : holder) + "); remove " + path_.string() +
                        " if that process is gone");
        }
        throw Error("cannot create " + path_.string() + ": " + std::strerror(errno));
    }
    const auto pid = "pid " + std::to_string(::getpid()) + "\n";
    [[maybe_unused]] auto n = ::write(fd, pid.data(), pid.size());
    ::close(fd);
}

RunLock::~RunLock() {
    std::error_code ec;
    fs::remove(path_, ec);
}

void write_meta(const fs::path& file, const std::map<std::string, std::string>& meta) {
    std::string s;
    for (const auto& [k, v] : meta) s += k + " " + v + "\n";
    text::write_file_atomic(fs::path(file.string() + ".meta"), s);
}

std::map<std::string, std::string> read_meta(const fs::path& file) {
    const fs::path p(file.string() + ".meta");
    if (!fs::exists(p)) throw FormatError(p.string() + " is missing");
    std::map<std::string, std::string> meta;
    const auto contents = text::read_file(p);
    for (auto line : text::split(contents, '\n')) {
        line = text::trim(line);
        if (line.empty()) continue;
        const auto sp = line.find(' ');
        if (sp == std::string_view::npos) throw FormatError(p.string() + ": malformed line '" + std::string(line) + "'");
        meta.emplace(std::string(line.substr(0, sp)), std::string(text::trim(line.substr(sp + 1))));
    }
    return meta;
}

void require_snapshot(const std::map<std::string, std::string>& meta, const std::string& hash, const std::string& what) {
    auto it = meta.find("snapshot");
    if (it == meta.end()) throw ConfigError(what + " carries no snapshot hash");
    if (it->second != hash) {
        throw ConfigError(what + " was produced under snapshot " + it->second + ", this run is " + hash);
    }
}

} // namespace acx::cli
