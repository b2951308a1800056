#pragma once
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace echospec {

// Rectangular CSV payload. Comment lines are emitted first, prefixed "# ".
// Cells are stored as already-formatted strings so integer and text columns
// survive round trips; csv_num() is the canonical double formatter.
struct CsvTable {
    std::vector<std::string> comments;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};

// %.15g, C locale independent of the global locale.
std::string csv_num(double v);

// Writes header + rows with LF endings. Throws ConfigError when the file
// cannot be opened or a row width disagrees with the header.
void write_csv(const std::string& path, const CsvTable& table);

// Reads a file produced by write_csv. Quoting is not supported; a cell
// containing a comma never occurs in this tool's outputs. Malformed input
// throws ConfigError naming the line.
CsvTable read_csv(const std::string& path);

// Parse one cell as a double; throws ConfigError naming column/row on failure.
double csv_cell_num(const CsvTable& t, std::size_t row, std::size_t col);

void write_json_file(const std::string& path, const nlohmann::ordered_json& j);

// ---- plotting ----

struct PlotSeries {
    std::string label;
    std::vector<double> x, y;
};

struct PlotSpec {
    std::string title, xlabel, ylabel;
    bool logx = false;
    std::optional<double> marker_x; // dashed vertical guide
    std::vector<PlotSeries> series;
};

// Deterministic standalone 800x500 SVG line plot. No external assets.
std::string render_svg_plot(const PlotSpec& spec);

void write_svg_plot(const std::string& path, const PlotSpec& spec);

} // namespace echospec
