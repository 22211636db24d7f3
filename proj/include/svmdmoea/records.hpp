#pragma once

// Persistence of finished runs. Each run is one CSV file; a JSON manifest
// lists every run with its status and the per-environment seeding counts.

#include <charconv>
#include <cmath>
#include <compare>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <nlohmann/json.hpp>

#include "svmdmoea/dmoea.hpp"
#include "svmdmoea/metrics.hpp"

namespace svmdmoea {

inline constexpr std::string_view kRecordHeader = "problem,config,variant,seed,env_index,time,igd,evals";
inline constexpr std::string_view kManifestName = "manifest.json";
inline constexpr std::string_view kManifestFormat = "svmdmoea-results 1";

struct RunKey {
    std::string problem;
    std::string config;
    std::string variant;
    std::uint64_t seed = 0;

    /// File name stem, safe on common file systems.
    [[nodiscard]] std::string stem() const {
        std::string s = problem + "_" + config + "_" + variant + "_s" + std::to_string(seed);
        for (auto& c : s) {
            if (c == ':' || c == '/' || c == '\\') {
                c = '-';
            }
        }
        return s;
    }

    [[nodiscard]] std::string label() const {
        return problem + " " + config + " " + variant + " seed " + std::to_string(seed);
    }

    friend auto operator<=>(RunKey const&, RunKey const&) = default;
    friend bool operator==(RunKey const&, RunKey const&) = default;
};

struct EnvironmentRecord {
    std::size_t env_index = 0;
    double time = 0.0;
    double igd = 0.0;
    std::size_t optimizer_evals = 0;
    std::size_t seeding_evals = 0;
    std::size_t filter_accepted = 0;
    bool degenerate_fallback = false;

    friend bool operator==(EnvironmentRecord const&, EnvironmentRecord const&) = default;
};

struct MetricRecord {
    RunKey key;
    std::vector<EnvironmentRecord> environments;
    double migd = 0.0;
    std::size_t evaluations_used = 0; // optimizer plus seeding
    bool failed = false;
    std::string error;

    [[nodiscard]] std::vector<TimedIgd> igd_series() const {
        std::vector<TimedIgd> out;
        out.reserve(environments.size());
        for (auto const& e : environments) {
            out.push_back({e.time, e.igd});
        }
        return out;
    }

    [[nodiscard]] std::size_t seeding_evals() const {
        std::size_t n = 0;
        for (auto const& e : environments) {
            n += e.seeding_evals;
        }
        return n;
    }

    friend bool operator==(MetricRecord const&, MetricRecord const&) = default;
};

class RecordError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline MetricRecord make_record(RunKey key, std::vector<EnvironmentResult> const& results) {
    MetricRecord rec;
    rec.key = std::move(key);
    for (auto const& r : results) {
        rec.environments.push_back(
            {r.env_index, r.time, r.igd, r.optimizer_evals, r.seeding_evals, r.filter_accepted, r.degenerate_fallback});
        rec.evaluations_used += r.optimizer_evals + r.seeding_evals;
    }
    auto const series = rec.igd_series();
    rec.migd = migd(series);
    return rec;
}

inline MetricRecord make_failure(RunKey key, std::string error) {
    MetricRecord rec;
    rec.key = std::move(key);
    rec.failed = true;
    rec.error = std::move(error);
    return rec;
}

// ---------------------------------------------------------------------------
// Per-run CSV

namespace detail {

inline std::string shortest(double v) {
    char buf[64];
    auto const r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

template <typename T>
T parse_field(std::string_view token, std::string_view what) {
    T v{};
    auto const r = std::from_chars(token.data(), token.data() + token.size(), v);
    if (token.empty() || r.ec != std::errc{} || r.ptr != token.data() + token.size()) {
        throw RecordError("bad " + std::string(what) + " field '" + std::string(token) + "'");
    }
    return v;
}

} // namespace detail

inline void write_record_csv(std::ostream& os, MetricRecord const& rec) {
    os << kRecordHeader << '\n';
    for (auto const& e : rec.environments) {
        os << rec.key.problem << ',' << rec.key.config << ',' << rec.key.variant << ',' << rec.key.seed << ','
           << e.env_index << ',' << detail::shortest(e.time) << ',' << detail::shortest(e.igd) << ','
           << e.optimizer_evals << '\n';
    }
}

/// Reads the CSV columns only: key, env_index, time, igd and optimizer evals.
inline MetricRecord read_record_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != kRecordHeader) {
        throw RecordError("record file does not start with the expected header");
    }
    MetricRecord rec;
    std::size_t row = 0;
    while (std::getline(is, line)) {
        if (line.empty()) {
            continue;
        }
        std::vector<std::string_view> cols;
        std::string_view rest = line;
        for (std::size_t pos = 0;;) {
            auto const comma = rest.find(',', pos);
            cols.push_back(rest.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
            if (comma == std::string_view::npos) {
                break;
            }
            pos = comma + 1;
        }
        if (cols.size() != 8) {
            throw RecordError("record row " + std::to_string(row + 1) + " has " + std::to_string(cols.size())
                              + " columns");
        }
        RunKey key{std::string(cols[0]), std::string(cols[1]), std::string(cols[2]),
                   detail::parse_field<std::uint64_t>(cols[3], "seed")};
        if (row == 0) {
            rec.key = key;
        } else if (!(key == rec.key)) {
            throw RecordError("record rows belong to different runs");
        }
        EnvironmentRecord e;
        e.env_index = detail::parse_field<std::size_t>(cols[4], "env_index");
        e.time = detail::parse_field<double>(cols[5], "time");
        e.igd = detail::parse_field<double>(cols[6], "igd");
        e.optimizer_evals = detail::parse_field<std::size_t>(cols[7], "evals");
        rec.environments.push_back(e);
        ++row;
    }
    if (rec.environments.empty()) {
        throw RecordError("record file has no rows");
    }
    auto const series = rec.igd_series();
    rec.migd = migd(series);
    return rec;
}

// ---------------------------------------------------------------------------
// Manifest

inline nlohmann::json manifest_entry(MetricRecord const& rec) {
    nlohmann::json j;
    j["problem"] = rec.key.problem;
    j["config"] = rec.key.config;
    j["variant"] = rec.key.variant;
    j["seed"] = rec.key.seed;
    j["file"] = rec.key.stem() + ".csv";
    if (rec.failed) {
        j["status"] = "failed";
        j["error"] = rec.error;
        return j;
    }
    j["status"] = "ok";
    j["migd"] = rec.migd;
    j["evaluations_used"] = rec.evaluations_used;
    auto& seeding = j["seeding_evals"] = nlohmann::json::array();
    auto& accepted = j["filter_accepted"] = nlohmann::json::array();
    auto& fallback = j["degenerate_fallback"] = nlohmann::json::array();
    for (auto const& e : rec.environments) {
        seeding.push_back(e.seeding_evals);
        accepted.push_back(e.filter_accepted);
        fallback.push_back(e.degenerate_fallback);
    }
    return j;
}

struct Manifest {
    std::string plan_text;
    std::map<RunKey, MetricRecord> runs;
};

/// Writes to a sibling temporary file and renames it over the target.
inline void write_atomically(std::filesystem::path const& path, std::string const& content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        os << content;
        os.flush();
        if (!os) {
            throw RecordError("cannot write " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

inline std::string manifest_text(Manifest const& m) {
    nlohmann::json j;
    j["format"] = kManifestFormat;
    j["record_header"] = kRecordHeader;
    j["plan"] = m.plan_text;
    auto& runs = j["runs"] = nlohmann::json::array();
    for (auto const& [key, rec] : m.runs) {
        runs.push_back(manifest_entry(rec));
    }
    return j.dump(1) + "\n";
}

inline void write_record_file(std::filesystem::path const& dir, MetricRecord const& rec) {
    std::ostringstream os;
    write_record_csv(os, rec);
    write_atomically(dir / (rec.key.stem() + ".csv"), os.str());
}

/// Loads one manifest entry, joining it with its CSV file for successful runs.
inline MetricRecord load_entry(std::filesystem::path const& dir, nlohmann::json const& j) {
    RunKey key{j.at("problem").get<std::string>(), j.at("config").get<std::string>(),
               j.at("variant").get<std::string>(), j.at("seed").get<std::uint64_t>()};
    if (j.at("status").get<std::string>() != "ok") {
        return make_failure(std::move(key), j.value("error", std::string("unknown failure")));
    }
    auto const path = dir / j.at("file").get<std::string>();
    std::ifstream is(path);
    if (!is) {
        throw RecordError("missing record file " + path.string());
    }
    auto rec = read_record_csv(is);
    if (!(rec.key == key)) {
        throw RecordError(path.string() + " does not match its manifest entry");
    }
    auto const& seeding = j.at("seeding_evals");
    auto const& accepted = j.at("filter_accepted");
    auto const& fallback = j.at("degenerate_fallback");
    auto const n = rec.environments.size();
    if (seeding.size() != n || accepted.size() != n || fallback.size() != n) {
        throw RecordError(path.string() + ": manifest lists a different number of environments");
    }
    std::size_t total = 0;
    for (std::size_t i = 0; i < n; ++i) {
        auto& e = rec.environments[i];
        e.seeding_evals = seeding[i].get<std::size_t>();
        e.filter_accepted = accepted[i].get<std::size_t>();
        e.degenerate_fallback = fallback[i].get<bool>();
        total += e.optimizer_evals + e.seeding_evals;
    }
    auto const stored_migd = j.at("migd").get<double>();
    if (std::fabs(stored_migd - rec.migd) > 1e-12) {
        throw RecordError(path.string() + ": stored migd " + detail::shortest(stored_migd)
                          + " differs from the mean of its igd series " + detail::shortest(rec.migd));
    }
    rec.migd = stored_migd;
    rec.evaluations_used = j.at("evaluations_used").get<std::size_t>();
    if (rec.evaluations_used != total) {
        throw RecordError(path.string() + ": evaluations_used disagrees with the per-environment counts");
    }
    return rec;
}

inline Manifest load_manifest(std::filesystem::path const& dir) {
    auto const path = dir / kManifestName;
    std::ifstream is(path);
    if (!is) {
        throw RecordError("no " + std::string(kManifestName) + " in " + dir.string());
    }
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(is);
        if (j.at("format").get<std::string>() != kManifestFormat) {
            throw RecordError(path.string() + ": unsupported manifest format");
        }
        Manifest m;
        m.plan_text = j.at("plan").get<std::string>();
        for (auto const& entry : j.at("runs")) {
            auto rec = load_entry(dir, entry);
            auto key = rec.key;
            m.runs.insert_or_assign(std::move(key), std::move(rec));
        }
        return m;
    } catch (nlohmann::json::exception const& err) {
        throw RecordError(path.string() + ": " + err.what());
    }
}

/// All records of a result directory, sorted by run key.
inline std::vector<MetricRecord> load_records(std::filesystem::path const& dir) {
    auto m = load_manifest(dir);
    std::vector<MetricRecord> out;
    out.reserve(m.runs.size());
    for (auto& [key, rec] : m.runs) {
        out.push_back(std::move(rec));
    }
    return out;
}

} // namespace svmdmoea
