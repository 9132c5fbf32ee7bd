#include "jumpsas/io.hpp"

#include <nlohmann/json.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace jumpsas::io {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        // trim whitespace
        const auto b = cell.find_first_not_of(" \t\r");
        const auto e = cell.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? ""
                                             : cell.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

double parse_double(const std::string& cell, int line_no) {
    double value;
    const auto [ptr, ec] =
        std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc() || ptr != cell.data() + cell.size())
        throw ParseError("CSV parse error at line " + std::to_string(line_no) +
                         ": bad number '" + cell + "'");
    return value;
}

} // namespace

Dataset read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open CSV file '" + path + "'");

    std::string line;
    int line_no = 0;
    // header (skip leading comment lines)
    do {
        if (!std::getline(in, line))
            throw ParseError("CSV file '" + path + "' is empty");
        ++line_no;
    } while (!line.empty() && line[0] == '#');

    const auto header = split_csv_line(line);
    const int p = static_cast<int>(header.size()) - 1;
    if (p < 1 || header.back() != "y")
        throw ParseError("CSV header must be x1,...,xP,y (line " +
                         std::to_string(line_no) + ")");
    for (int j = 0; j < p; ++j)
        if (header[j] != "x" + std::to_string(j + 1))
            throw ParseError("CSV header column " + std::to_string(j + 1) +
                             " must be x" + std::to_string(j + 1));

    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        const auto cells = split_csv_line(line);
        if (static_cast<int>(cells.size()) != p + 1)
            throw ParseError("CSV parse error at line " +
                             std::to_string(line_no) + ": expected " +
                             std::to_string(p + 1) + " columns, got " +
                             std::to_string(cells.size()));
        std::vector<double> row(p + 1);
        for (int j = 0; j <= p; ++j) row[j] = parse_double(cells[j], line_no);
        rows.push_back(std::move(row));
    }
    if (rows.empty())
        throw ParseError("CSV file '" + path + "' has no data rows");

    Dataset data;
    data.inputs.resize(static_cast<int>(rows.size()), p);
    data.responses.resize(static_cast<int>(rows.size()));
    for (size_t i = 0; i < rows.size(); ++i) {
        for (int j = 0; j < p; ++j) data.inputs(i, j) = rows[i][j];
        data.responses[i] = rows[i][p];
    }
    return data;
}

void write_csv(const std::string& path, const Dataset& data,
               const std::vector<std::string>& comments) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write CSV file '" + path + "'");
    for (const auto& c : comments) out << "# " << c << "\n";
    for (int j = 0; j < data.dim(); ++j) out << "x" << (j + 1) << ",";
    out << "y\n";
    for (int i = 0; i < data.n(); ++i) {
        for (int j = 0; j < data.dim(); ++j)
            out << format_double(data.inputs(i, j)) << ",";
        out << format_double(data.responses[i]) << "\n";
    }
}

std::vector<ParameterRange> read_ranges(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open ranges file '" + path + "'");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("ranges file '" + path + "': " + e.what());
    }
    if (!doc.is_array())
        throw ParseError("ranges file '" + path + "' must be a JSON array");
    std::vector<ParameterRange> out;
    for (const auto& entry : doc) {
        ParameterRange range;
        range.name = entry.value("name", "");
        if (!entry.contains("min") || !entry.contains("max"))
            throw ParseError("ranges entry needs 'min' and 'max'");
        range.min = entry["min"].get<double>();
        range.max = entry["max"].get<double>();
        out.push_back(range);
    }
    return out;
}

std::string format_double(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    // shortest representation that round-trips
    for (int prec = 1; prec < 17; ++prec) {
        char trial[64];
        std::snprintf(trial, sizeof(trial), "%.*g", prec, value);
        double back;
        std::sscanf(trial, "%lf", &back);
        if (back == value) return trial;
    }
    return buf;
}

} // namespace jumpsas::io
