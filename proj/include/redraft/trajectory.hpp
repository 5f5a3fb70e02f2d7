#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace redraft {

/// Monotonic run clock in milliseconds since run start.
class Clock {
public:
    virtual ~Clock() = default;
    virtual std::int64_t now_ms() const = 0;
    /// Continue a resumed run from a previously recorded time.
    virtual void resume_at(std::int64_t ms) = 0;
};

class SteadyClock final : public Clock {
public:
    SteadyClock();
    std::int64_t now_ms() const override;
    void resume_at(std::int64_t ms) override;

private:
    std::chrono::steady_clock::time_point start_;
    std::atomic<std::int64_t> offset_{0};
};

/// Clock advanced explicitly by the simulation backend; makes timings reproducible.
class SimulatedClock final : public Clock {
public:
    std::int64_t now_ms() const override { return now_.load(); }
    void resume_at(std::int64_t ms) override { now_.store(ms); }
    void advance(std::int64_t ms) { now_.fetch_add(ms); }

private:
    std::atomic<std::int64_t> now_{0};
};

/// Append-only run log. Every record gets `schema_version` and a sequence number.
/// When backed by a file each record is written as one JSON line and flushed.
class Trajectory {
public:
    Trajectory() = default;

    /// Opens `path` for appending; existing lines are kept and counted.
    static std::unique_ptr<Trajectory> open_file(const std::filesystem::path& path);

    void append(nlohmann::json record);
    std::vector<nlohmann::json> records() const;
    std::size_t size() const;

    std::vector<nlohmann::json> records_of_kind(std::string_view kind) const;
    std::size_t count_kind(std::string_view kind) const;

private:
    mutable std::mutex mutex_;
    std::vector<nlohmann::json> records_;
    std::int64_t next_seq_ = 0;
    std::ofstream file_;
};

/// Reads a line-delimited trajectory. Throws ParseError("line N") on a corrupt line.
std::vector<nlohmann::json> read_trajectory(const std::filesystem::path& path);

/// Result of scanning a possibly interrupted trajectory for the last committed loop step.
struct ResumePoint {
    std::size_t keep_lines = 0;        // lines up to and including the commit record
    std::optional<nlohmann::json> commit;
    bool completed = false;            // run_end already present
};

/// Tolerates a torn final line. Corrupt lines before the end are errors.
ResumePoint find_resume_point(const std::filesystem::path& path);

/// Rewrites `path` keeping only its first `keep_lines` lines.
void truncate_lines(const std::filesystem::path& path, std::size_t keep_lines);

} // namespace redraft
