#pragma once

#include <Eigen/Dense>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "settrack/common.hpp"

namespace settrack {

struct TimeStep {
    std::string time_label;
    Eigen::MatrixXd points; // N x d, one point per row
};

// An ordered collection of time-stamped point sets sharing one dimensionality.
struct VectorSetSeries {
    std::string instance_label;
    std::vector<TimeStep> steps;

    int dim() const {
        if (steps.empty())
            throw data_error("series '" + instance_label + "' has no steps");
        return static_cast<int>(steps.front().points.cols());
    }

    long total_points() const {
        long n = 0;
        for (const auto& s : steps) n += s.points.rows();
        return n;
    }

    // All steps share d, labels unique, at least one step.
    void validate() const {
        const int d = dim();
        std::set<std::string> labels;
        for (const auto& s : steps) {
            if (s.points.cols() != d)
                throw data_error("series '" + instance_label +
                                 "': mixed dimensionality across steps");
            if (!labels.insert(s.time_label).second)
                throw data_error("series '" + instance_label +
                                 "': duplicate time label '" + s.time_label + "'");
        }
    }

    // All points of all steps stacked, row order = step order.
    Eigen::MatrixXd pooled_points() const {
        const int d = dim();
        Eigen::MatrixXd out(total_points(), d);
        long r = 0;
        for (const auto& s : steps) {
            out.middleRows(r, s.points.rows()) = s.points;
            r += s.points.rows();
        }
        return out;
    }
};

namespace detail {

// RFC-4180-ish field splitter: handles quoted fields and embedded commas.
inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

} // namespace detail

// Common pipeline format: CSV with header `instance,time,x,y`, one row per
// point. A file may hold several instances; first-appearance order wins.
inline void save_series_csv(const std::vector<VectorSetSeries>& all,
                            const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("cannot open for writing: " + path);
    out << "instance,time,x,y\n";
    for (const auto& series : all) {
        if (series.dim() != 2)
            throw std::invalid_argument("series CSV format is 2-D only, got d=" +
                                        std::to_string(series.dim()));
        for (const auto& step : series.steps)
            for (Eigen::Index i = 0; i < step.points.rows(); ++i)
                out << series.instance_label << ',' << step.time_label << ','
                    << format_g17(step.points(i, 0)) << ','
                    << format_g17(step.points(i, 1)) << '\n';
    }
    if (!out) throw data_error("write failed: " + path);
}

inline void save_series_csv(const VectorSetSeries& s, const std::string& path) {
    save_series_csv(std::vector<VectorSetSeries>{s}, path);
}

inline std::vector<VectorSetSeries> load_series_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("cannot open: " + path);
    std::string line;
    if (!std::getline(in, line)) throw data_error("empty series file: " + path);
    auto header = detail::split_csv_line(line);
    if (header.size() != 4 || header[0] != "instance" || header[1] != "time" ||
        header[2] != "x" || header[3] != "y")
        throw data_error("bad series header in " + path +
                         " (expected instance,time,x,y)");

    std::vector<std::string> inst_order;
    std::map<std::string, std::vector<std::string>> step_order;
    std::map<std::pair<std::string, std::string>, std::vector<std::pair<double, double>>> rows;

    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        auto f = detail::split_csv_line(line);
        if (f.size() != 4)
            throw data_error(path + ":" + std::to_string(lineno) +
                             ": expected 4 fields, got " + std::to_string(f.size()));
        double x = 0, y = 0;
        try {
            x = std::stod(f[2]);
            y = std::stod(f[3]);
        } catch (const std::exception&) {
            throw data_error(path + ":" + std::to_string(lineno) +
                             ": unparseable coordinates");
        }
        auto key = std::make_pair(f[0], f[1]);
        auto [it, fresh] = rows.try_emplace(key);
        if (fresh) {
            if (step_order.find(f[0]) == step_order.end()) inst_order.push_back(f[0]);
            step_order[f[0]].push_back(f[1]);
        }
        it->second.emplace_back(x, y);
    }
    if (inst_order.empty()) throw data_error("no data rows in " + path);

    std::vector<VectorSetSeries> all;
    for (const auto& inst : inst_order) {
        VectorSetSeries s{inst, {}};
        for (const auto& t : step_order[inst]) {
            const auto& buf = rows[{inst, t}];
            Eigen::MatrixXd pts(buf.size(), 2);
            for (std::size_t r = 0; r < buf.size(); ++r) {
                pts(static_cast<Eigen::Index>(r), 0) = buf[r].first;
                pts(static_cast<Eigen::Index>(r), 1) = buf[r].second;
            }
            s.steps.push_back(TimeStep{t, std::move(pts)});
        }
        s.validate();
        all.push_back(std::move(s));
    }
    return all;
}

} // namespace settrack
