#include "redraft/trajectory.hpp"

#include <sstream>

#include "redraft/error.hpp"
#include "redraft/state.hpp"

namespace redraft {

using nlohmann::json;

SteadyClock::SteadyClock() : start_(std::chrono::steady_clock::now()) {}

std::int64_t SteadyClock::now_ms() const {
    auto elapsed = std::chrono::steady_clock::now() - start_;
    return offset_.load() + std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count();
}

void SteadyClock::resume_at(std::int64_t ms) {
    start_ = std::chrono::steady_clock::now();
    offset_.store(ms);
}

std::unique_ptr<Trajectory> Trajectory::open_file(const std::filesystem::path& path) {
    auto t = std::make_unique<Trajectory>();
    if (std::filesystem::exists(path)) {
        t->records_ = read_trajectory(path);
        t->next_seq_ = static_cast<std::int64_t>(t->records_.size());
    }
    t->file_.open(path, std::ios::app | std::ios::binary);
    if (!t->file_) throw ConfigError("cannot open trajectory file " + path.string());
    return t;
}

void Trajectory::append(json record) {
    std::lock_guard lock(mutex_);
    record["schema_version"] = kSchemaVersion;
    record["seq"] = next_seq_++;
    if (file_.is_open()) {
        file_ << record.dump() << '\n';
        file_.flush();
    }
    records_.push_back(std::move(record));
}

std::vector<json> Trajectory::records() const {
    std::lock_guard lock(mutex_);
    return records_;
}

std::size_t Trajectory::size() const {
    std::lock_guard lock(mutex_);
    return records_.size();
}

std::vector<json> Trajectory::records_of_kind(std::string_view kind) const {
    std::lock_guard lock(mutex_);
    std::vector<json> out;
    for (const auto& r : records_) {
        if (r.value("kind", "") == kind) out.push_back(r);
    }
    return out;
}

std::size_t Trajectory::count_kind(std::string_view kind) const {
    std::lock_guard lock(mutex_);
    std::size_t n = 0;
    for (const auto& r : records_) {
        if (r.value("kind", "") == kind) ++n;
    }
    return n;
}

namespace {

std::vector<std::string> read_lines(const std::filesystem::path& path, bool& ends_with_newline) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    auto content = buffer.str();
    ends_with_newline = content.empty() || content.back() == '\n';
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start < content.size()) {
        auto end = content.find('\n', start);
        if (end == std::string::npos) {
            lines.push_back(content.substr(start));
            break;
        }
        lines.push_back(content.substr(start, end - start));
        start = end + 1;
    }
    return lines;
}

} // namespace

std::vector<json> read_trajectory(const std::filesystem::path& path) {
    bool newline = true;
    auto lines = read_lines(path, newline);
    std::vector<json> out;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        json j;
        try {
            j = json::parse(lines[i]);
        } catch (const json::exception& e) {
            throw ParseError("line " + std::to_string(i + 1),
                             path.string() + ": corrupt record at line " + std::to_string(i + 1) +
                                 ": " + e.what());
        }
        if (!j.is_object()) {
            throw ParseError("line " + std::to_string(i + 1),
                             path.string() + ": record at line " + std::to_string(i + 1) +
                                 " is not an object");
        }
        out.push_back(std::move(j));
    }
    return out;
}

ResumePoint find_resume_point(const std::filesystem::path& path) {
    ResumePoint point;
    if (!std::filesystem::exists(path)) return point;
    bool newline = true;
    auto lines = read_lines(path, newline);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        json j;
        try {
            j = json::parse(lines[i]);
        } catch (const json::exception& e) {
            bool torn_tail = i + 1 == lines.size() && !newline;
            if (torn_tail) break;
            throw ParseError("line " + std::to_string(i + 1),
                             path.string() + ": corrupt record at line " + std::to_string(i + 1));
        }
        auto kind = j.value("kind", "");
        if (kind == "commit") {
            point.commit = j;
            point.keep_lines = i + 1;
        } else if (kind == "run_end") {
            point.completed = true;
        }
    }
    return point;
}

void truncate_lines(const std::filesystem::path& path, std::size_t keep_lines) {
    bool newline = true;
    auto lines = read_lines(path, newline);
    std::ofstream out(path, std::ios::trunc | std::ios::binary);
    for (std::size_t i = 0; i < keep_lines && i < lines.size(); ++i) out << lines[i] << '\n';
}

} // namespace redraft
