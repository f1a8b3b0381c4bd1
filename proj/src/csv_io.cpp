#include "sklpca/csv_io.hpp"

#include "sklpca/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numeric>
#include <set>
#include <sstream>

namespace sklpca {

std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

bool parse_double(const std::string& text, double& value) {
    if (text.empty()) {
        return false;
    }
    const char* begin = text.data();
    const char* end = begin + text.size();
    if (*begin == '+') {
        ++begin;
    }
    const auto res = std::from_chars(begin, end, value);
    return res.ec == std::errc() && res.ptr == end && std::isfinite(value);
}

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::string where(std::size_t line, std::size_t data_row) {
    return "line " + std::to_string(line) + " (data row " + std::to_string(data_row) + ")";
}

struct RawRow {
    std::string subject;
    double time = 0.0;
    double y = 0.0;
    std::vector<double> features;
    std::size_t line = 0;
};

} // namespace

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) {
        cells.push_back(trim(cell));
    }
    if (!line.empty() && line.back() == ',') {
        cells.emplace_back();
    }
    return cells;
}

LongitudinalDataset load_csv(std::istream& in, LoadReport* report) {
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++line_no;
        if (!trim(line).empty()) {
            header = split_csv_line(line);
            break;
        }
    }
    if (header.empty()) {
        throw ParseError("csv: empty input, expected header subject_id,time,y,f0,...", line_no);
    }
    if (header.size() < 4 || header[0] != "subject_id" || header[1] != "time" || header[2] != "y") {
        throw ParseError("csv: header must be subject_id,time,y,f0,...,f{p-1}", line_no);
    }
    for (std::size_t j = 3; j < header.size(); ++j) {
        if (header[j] != "f" + std::to_string(j - 3)) {
            throw ParseError("csv: column " + std::to_string(j + 1) + " must be named f" + std::to_string(j - 3) +
                                 ", found '" + header[j] + "'",
                             line_no);
        }
    }
    const std::size_t p = header.size() - 3;

    std::vector<RawRow> raw;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        const std::size_t data_row = raw.size() + 1;
        const std::vector<std::string> cells = split_csv_line(line);
        if (cells.size() != header.size()) {
            throw ParseError("csv: " + where(line_no, data_row) + " has " + std::to_string(cells.size()) +
                                 " cells, expected " + std::to_string(header.size()),
                             line_no);
        }
        RawRow row;
        row.line = line_no;
        row.subject = cells[0];
        if (row.subject.empty()) {
            throw ParseError("csv: " + where(line_no, data_row) + " is missing subject_id", line_no);
        }
        auto number = [&](std::size_t j, double& out) {
            if (cells[j].empty()) {
                throw ParseError("csv: " + where(line_no, data_row) + " is missing column " + header[j], line_no);
            }
            if (!parse_double(cells[j], out)) {
                throw ParseError("csv: " + where(line_no, data_row) + " column " + header[j] +
                                     " is not a finite number: '" + cells[j] + "'",
                                 line_no);
            }
        };
        number(1, row.time);
        number(2, row.y);
        row.features.resize(p);
        for (std::size_t j = 0; j < p; ++j) {
            number(j + 3, row.features[j]);
        }
        raw.push_back(std::move(row));
    }
    if (raw.empty()) {
        throw ParseError("csv: no data rows", line_no);
    }

    std::vector<std::size_t> order(raw.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto less = [&](std::size_t a, std::size_t b) {
        if (raw[a].subject != raw[b].subject) return raw[a].subject < raw[b].subject;
        return raw[a].time < raw[b].time;
    };
    const bool sorted = std::is_sorted(order.begin(), order.end(), less);
    if (!sorted) {
        std::stable_sort(order.begin(), order.end(), less);
    }
    if (report != nullptr) {
        report->reordered = !sorted;
    }
    for (std::size_t k = 1; k < order.size(); ++k) {
        const RawRow& prev = raw[order[k - 1]];
        const RawRow& cur = raw[order[k]];
        if (prev.subject == cur.subject && prev.time == cur.time) {
            throw ParseError("csv: duplicate (subject_id, time) = (" + cur.subject + ", " + format_double(cur.time) +
                                 ") at lines " + std::to_string(prev.line) + " and " + std::to_string(cur.line),
                             cur.line);
        }
    }

    const auto n = static_cast<Eigen::Index>(raw.size());
    LongitudinalDataset data;
    data.features.resize(n, static_cast<Eigen::Index>(p));
    data.outcomes.resize(n);
    data.time.resize(n);
    std::vector<std::string> labels;
    labels.reserve(raw.size());
    for (Eigen::Index r = 0; r < n; ++r) {
        const RawRow& row = raw[order[static_cast<std::size_t>(r)]];
        labels.push_back(row.subject);
        data.time(r) = row.time;
        data.outcomes(r) = row.y;
        for (std::size_t j = 0; j < p; ++j) {
            data.features(r, static_cast<Eigen::Index>(j)) = row.features[j];
        }
    }
    data.groups = GroupIndex::from_labels(labels);
    data.validate();
    return data;
}

LongitudinalDataset load_csv_file(const std::string& path, LoadReport* report) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open '" + path + "' for reading");
    }
    return load_csv(in, report);
}

void write_csv(std::ostream& out, const LongitudinalDataset& data) {
    out << "subject_id,time,y";
    for (Eigen::Index j = 0; j < data.dims(); ++j) {
        out << ",f" << j;
    }
    out << '\n';
    for (const auto& seg : data.groups.segments()) {
        for (Eigen::Index r = seg.start; r < seg.start + seg.count; ++r) {
            out << seg.subject_id << ',' << format_double(data.time(r)) << ',' << format_double(data.outcomes(r));
            for (Eigen::Index j = 0; j < data.dims(); ++j) {
                out << ',' << format_double(data.features(r, j));
            }
            out << '\n';
        }
    }
}

void write_csv_file(const std::string& path, const LongitudinalDataset& data) {
    std::ofstream out(path);
    if (!out) {
        throw InputError("cannot open '" + path + "' for writing");
    }
    write_csv(out, data);
    if (!out) {
        throw InputError("write to '" + path + "' failed");
    }
}

std::size_t CsvTable::column(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
        throw InputError("csv: missing column '" + name + "'");
    }
    return static_cast<std::size_t>(it - header.begin());
}

CsvTable read_table(std::istream& in) {
    CsvTable table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        std::vector<std::string> cells = split_csv_line(line);
        if (table.header.empty()) {
            table.header = std::move(cells);
            continue;
        }
        if (cells.size() != table.header.size()) {
            throw ParseError("csv: line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                                 " cells, expected " + std::to_string(table.header.size()),
                             line_no);
        }
        table.rows.push_back(std::move(cells));
    }
    if (table.header.empty()) {
        throw ParseError("csv: empty input", line_no);
    }
    return table;
}

CsvTable read_table_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open '" + path + "' for reading");
    }
    return read_table(in);
}

} // namespace sklpca
