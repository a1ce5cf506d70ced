// Persistence: the KHFIELD1 binary field format, trajectory files (one JSON
// header line + concatenated field records), kernel descriptors, and the CSV
// report tables with provenance headers.
#pragma once

#include "kernel.hpp"
#include "trajectory.hpp"

#include <json.hpp>

#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

namespace ikklab {

inline constexpr char field_magic[8] = {'K', 'H', 'F', 'I', 'E', 'L', 'D', '1'};

inline void write_field(std::ostream& os, const Field& f) {
    os.write(field_magic, 8);
    const uint32_t n = uint32_t(f.n_points());
    os.write(reinterpret_cast<const char*>(&n), 4);
    os.write(reinterpret_cast<const char*>(f.values.data()), std::streamsize(8 * f.values.size()));
}

inline Field read_field(std::istream& is) {
    char magic[8];
    is.read(magic, 8);
    if (!is || std::memcmp(magic, field_magic, 8) != 0)
        throw std::runtime_error("read_field: bad magic");
    uint32_t n = 0;
    is.read(reinterpret_cast<char*>(&n), 4);
    if (!is || n == 0 || n > (1u << 24)) throw std::runtime_error("read_field: bad size");
    Field f(static_cast<int>(n));
    is.read(reinterpret_cast<char*>(f.values.data()), std::streamsize(8 * n));
    if (!is) throw std::runtime_error("read_field: truncated record");
    return f;
}

inline void save_field(const std::string& path, const Field& f) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("save_field: cannot open " + path);
    write_field(os, f);
}

inline Field load_field(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("load_field: cannot open " + path);
    return read_field(is);
}

// ---------------------------------------------------------------------------

inline nlohmann::json meta_to_json(const TrajMeta& m) {
    return nlohmann::json{{"model", m.model},     {"gamma", m.gamma},
                          {"delta", m.delta},     {"a", m.a},
                          {"epsilon", m.epsilon}, {"dt", m.dt},
                          {"horizon", m.horizon}, {"n_points", m.n_points},
                          {"truncation", m.truncation}, {"stride", m.stride},
                          {"seed", m.seed},       {"replicate", m.replicate}};
}

inline TrajMeta meta_from_json(const nlohmann::json& j) {
    TrajMeta m;
    m.model = j.at("model").get<std::string>();
    m.gamma = j.at("gamma").get<double>();
    m.delta = j.at("delta").get<double>();
    m.a = j.at("a").get<double>();
    m.epsilon = j.at("epsilon").get<double>();
    m.dt = j.at("dt").get<double>();
    m.horizon = j.at("horizon").get<double>();
    m.n_points = j.at("n_points").get<int>();
    m.truncation = j.at("truncation").get<int>();
    m.stride = j.at("stride").get<int>();
    m.seed = j.at("seed").get<uint64_t>();
    m.replicate = j.at("replicate").get<uint32_t>();
    return m;
}

inline void save_trajectory(const std::string& path, const Trajectory& traj) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("save_trajectory: cannot open " + path);
    nlohmann::json header = meta_to_json(traj.meta);
    header["snapshots"] = traj.n_snapshots();
    header["times"] = traj.times;
    nlohmann::json events = nlohmann::json::array();
    for (const auto& ev : traj.events)
        events.push_back({{"time", ev.time}, {"index", ev.index}, {"magnitude", ev.magnitude}});
    header["events"] = events;
    os << header.dump() << "\n";
    for (const Field& f : traj.snapshots) write_field(os, f);
}

inline Trajectory load_trajectory(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("load_trajectory: cannot open " + path);
    std::string line;
    std::getline(is, line);
    nlohmann::json header = nlohmann::json::parse(line);
    Trajectory traj;
    traj.meta = meta_from_json(header);
    traj.times = header.at("times").get<std::vector<double>>();
    for (const auto& ev : header.at("events")) {
        traj.events.push_back(ClampEvent{ev.at("time").get<double>(), ev.at("index").get<int>(),
                                         ev.at("magnitude").get<double>()});
    }
    const int m = header.at("snapshots").get<int>();
    for (int i = 0; i < m; ++i) traj.snapshots.push_back(read_field(is));
    return traj;
}

inline void save_kernel(const std::string& path, const Kernel& k) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("save_kernel: cannot open " + path);
    const double gamma = k.analytic.scale * k.analytic.scale * k.analytic.scale;
    nlohmann::json header{{"base_radius", k.analytic.base_radius},
                          {"scale", k.analytic.scale},
                          {"gamma", gamma},
                          {"support_radius", k.support_radius}};
    os << header.dump() << "\n";
    write_field(os, k.samples);
}

inline Kernel load_kernel(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("load_kernel: cannot open " + path);
    std::string line;
    std::getline(is, line);
    nlohmann::json header = nlohmann::json::parse(line);
    Kernel k;
    k.analytic.base_radius = header.at("base_radius").get<double>();
    k.analytic.scale = header.at("scale").get<double>();
    k.support_radius = header.at("support_radius").get<double>();
    k.samples = read_field(is);
    return k;
}

// ---------------------------------------------------------------------------
// Report tables: RFC-4180 CSV with '.' decimals, preceded by '#' provenance
// lines carrying the config hash, code version, and master seed.

inline constexpr const char* code_version = "ikklab 1.0.0";

using Cell = std::variant<double, std::string>;

struct ReportTable {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    std::string config_hash;
    uint64_t seed = 0;

    void add_row(std::vector<Cell> cells) {
        if (cells.size() != columns.size())
            throw std::invalid_argument("ReportTable: row width mismatch");
        for (const Cell& c : cells)
            if (std::holds_alternative<double>(c) && !std::isfinite(std::get<double>(c)))
                throw std::invalid_argument("ReportTable: non-finite cell rejected");
        rows.push_back(std::move(cells));
    }

    void write_csv(std::ostream& os) const {
        os << "# config_hash," << config_hash << "\n";
        os << "# version," << code_version << "\n";
        os << "# seed," << seed << "\n";
        for (size_t c = 0; c < columns.size(); ++c)
            os << columns[c] << (c + 1 < columns.size() ? "," : "");
        os << "\r\n";
        char buf[40];
        for (const auto& row : rows) {
            for (size_t c = 0; c < row.size(); ++c) {
                if (std::holds_alternative<double>(row[c])) {
                    std::snprintf(buf, sizeof buf, "%.17g", std::get<double>(row[c]));
                    os << buf;
                } else {
                    os << std::get<std::string>(row[c]);
                }
                os << (c + 1 < row.size() ? "," : "");
            }
            os << "\r\n";
        }
    }

    std::string to_csv() const {
        std::ostringstream os;
        write_csv(os);
        return os.str();
    }

    double numeric(int row, const std::string& col) const {
        for (size_t c = 0; c < columns.size(); ++c)
            if (columns[c] == col) return std::get<double>(rows[size_t(row)][c]);
        throw std::invalid_argument("ReportTable: no column " + col);
    }
};

inline uint64_t fnv1a64(const std::string& s) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace ikklab
