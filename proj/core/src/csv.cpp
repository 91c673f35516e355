#include "edcuav/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "edcuav/error.hpp"

namespace edc::io {
namespace {

constexpr std::string_view kTrajectoryHeader = "run_id,uav_id,slot,x,y,vx,vy";
constexpr std::string_view kMetricsHeader =
    "run_id,swept_param,value,pair_slot_collisions,distinct_pair_collisions,mean_extra_distance,total_planning_time_s,completed";
constexpr std::size_t kWallTimeColumn = 6;

std::string fixed6(double v) {
    char buf[64];
    const double q = quantize(v);
    // Avoid "-0.000000".
    std::snprintf(buf, sizeof buf, "%.6f", q == 0.0 ? 0.0 : q);
    return buf;
}

std::vector<std::string_view> split(std::string_view line, char sep = ',') {
    std::vector<std::string_view> out;
    std::size_t begin = 0;
    while (true) {
        const std::size_t end = line.find(sep, begin);
        out.push_back(line.substr(begin, end == std::string_view::npos ? std::string_view::npos : end - begin));
        if (end == std::string_view::npos) break;
        begin = end + 1;
    }
    return out;
}

std::vector<std::string_view> lines_of(std::string_view text) {
    std::vector<std::string_view> out;
    for (auto line : split(text, '\n')) {
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (!line.empty()) out.push_back(line);
    }
    return out;
}

double to_double(std::string_view s) {
    // std::from_chars for double is not available on every toolchain we target.
    std::string tmp(s);
    char* end = nullptr;
    const double v = std::strtod(tmp.c_str(), &end);
    if (tmp.empty() || end != tmp.c_str() + tmp.size()) {
        throw Error(ErrorCode::MalformedInput, "not a number: '" + tmp + "'");
    }
    return v;
}

int to_int(std::string_view s) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw Error(ErrorCode::MalformedInput, "not an integer: '" + std::string(s) + "'");
    }
    return v;
}

void expect_header(const std::vector<std::string_view>& lines, std::string_view header) {
    if (lines.empty() || lines.front() != header) {
        throw Error(ErrorCode::MalformedInput, "unexpected CSV header, want: " + std::string(header));
    }
}

}  // namespace

double quantize(double value) { return std::round(value * 1e6) / 1e6; }

std::vector<TrajectoryRow> trajectory_rows(std::string_view run_id, const SwarmPlan& plan) {
    std::vector<TrajectoryRow> rows;
    for (const auto& traj : plan.trajectories) {
        for (std::size_t i = 0; i < traj.positions.size(); ++i) {
            const Vec2 v = i == 0 ? Vec2{} : traj.velocities[i - 1];
            rows.push_back(TrajectoryRow{std::string(run_id), traj.uav_id, plan.first_slot + static_cast<int>(i),
                                         quantize(traj.positions[i].x), quantize(traj.positions[i].y), quantize(v.x),
                                         quantize(v.y)});
        }
    }
    return rows;
}

std::string write_trajectory_csv(std::span<const TrajectoryRow> rows) {
    std::ostringstream out;
    out << kTrajectoryHeader << '\n';
    for (const auto& r : rows) {
        out << r.run_id << ',' << r.uav_id << ',' << r.slot << ',' << fixed6(r.x) << ',' << fixed6(r.y) << ','
            << fixed6(r.vx) << ',' << fixed6(r.vy) << '\n';
    }
    return out.str();
}

std::vector<TrajectoryRow> parse_trajectory_csv(std::string_view text) {
    const auto lines = lines_of(text);
    expect_header(lines, kTrajectoryHeader);
    std::vector<TrajectoryRow> rows;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto f = split(lines[i]);
        if (f.size() != 7) throw Error(ErrorCode::MalformedInput, "trajectory row needs 7 columns");
        rows.push_back(TrajectoryRow{std::string(f[0]), to_int(f[1]), to_int(f[2]), to_double(f[3]), to_double(f[4]),
                                     to_double(f[5]), to_double(f[6])});
    }
    return rows;
}

MetricsRow quantized(MetricsRow row) {
    row.value = quantize(row.value);
    row.pair_slot_collisions = quantize(row.pair_slot_collisions);
    row.distinct_pair_collisions = quantize(row.distinct_pair_collisions);
    row.mean_extra_distance = quantize(row.mean_extra_distance);
    row.total_planning_time_s = quantize(row.total_planning_time_s);
    return row;
}

std::string write_metrics_csv(std::span<const MetricsRow> rows) {
    std::ostringstream out;
    out << kMetricsHeader << '\n';
    for (const auto& r : rows) {
        out << r.run_id << ',' << r.swept_param << ',' << fixed6(r.value) << ',' << fixed6(r.pair_slot_collisions) << ','
            << fixed6(r.distinct_pair_collisions) << ',' << fixed6(r.mean_extra_distance) << ','
            << fixed6(r.total_planning_time_s) << ',' << r.completed << '\n';
    }
    return out.str();
}

std::vector<MetricsRow> parse_metrics_csv(std::string_view text) {
    const auto lines = lines_of(text);
    expect_header(lines, kMetricsHeader);
    std::vector<MetricsRow> rows;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto f = split(lines[i]);
        if (f.size() != 8) throw Error(ErrorCode::MalformedInput, "metrics row needs 8 columns");
        rows.push_back(MetricsRow{std::string(f[0]), std::string(f[1]), to_double(f[2]), to_double(f[3]), to_double(f[4]),
                                  to_double(f[5]), to_double(f[6]), to_int(f[7])});
    }
    return rows;
}

std::string strip_wall_time(std::string_view metrics_csv) {
    std::string out;
    for (auto line : lines_of(metrics_csv)) {
        auto f = split(line);
        for (std::size_t i = 0; i < f.size(); ++i) {
            if (i) out += ',';
            if (i != kWallTimeColumn) out += f[i];
        }
        out += '\n';
    }
    return out;
}

}  // namespace edc::io
