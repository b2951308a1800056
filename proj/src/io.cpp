#include "echospec/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "echospec/errors.hpp"

namespace echospec {

std::string csv_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

void write_csv(const std::string& path, const CsvTable& table) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open " + path + " for writing");
    for (const auto& c : table.comments) f << "# " << c << "\n";
    for (std::size_t i = 0; i < table.columns.size(); ++i)
        f << (i ? "," : "") << table.columns[i];
    f << "\n";
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        if (row.size() != table.columns.size())
            throw ConfigError(path + ": row " + std::to_string(r + 1) + " has " +
                              std::to_string(row.size()) + " cells, header has " +
                              std::to_string(table.columns.size()));
        for (std::size_t i = 0; i < row.size(); ++i) f << (i ? "," : "") << row[i];
        f << "\n";
    }
    if (!f) throw ConfigError("write failed for " + path);
}

static std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        std::size_t pos = line.find(',', start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

CsvTable read_csv(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open " + path);
    CsvTable t;
    std::string line;
    int lineno = 0;
    bool have_header = false;
    while (std::getline(f, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::string c = line.substr(1);
            if (!c.empty() && c[0] == ' ') c.erase(0, 1);
            t.comments.push_back(c);
            continue;
        }
        if (!have_header) {
            t.columns = split_line(line);
            have_header = true;
            continue;
        }
        auto cells = split_line(line);
        if (cells.size() != t.columns.size())
            throw ConfigError(path + ": line " + std::to_string(lineno) + " has " +
                              std::to_string(cells.size()) + " cells, header has " +
                              std::to_string(t.columns.size()));
        t.rows.push_back(std::move(cells));
    }
    if (!have_header) throw ConfigError(path + ": no header row");
    return t;
}

double csv_cell_num(const CsvTable& t, std::size_t row, std::size_t col) {
    const std::string& s = t.rows.at(row).at(col);
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0')
        throw ConfigError("column '" + t.columns.at(col) + "' row " + std::to_string(row + 1) +
                          ": '" + s + "' is not a number");
    return v;
}

void write_json_file(const std::string& path, const nlohmann::ordered_json& j) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open " + path + " for writing");
    f << j.dump(2) << "\n";
    if (!f) throw ConfigError("write failed for " + path);
}

// ---- SVG plotting ----

namespace {

std::string xml_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string fmt_tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

std::string fmt_px(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

// round tick step 1/2/5 * 10^k covering [lo, hi] with ~target intervals
std::vector<double> nice_ticks(double lo, double hi, int target) {
    std::vector<double> t;
    double range = hi - lo;
    if (!(range > 0) || !std::isfinite(range)) return {lo};
    double raw = range / target;
    double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        if (m * mag >= raw) {
            step = m * mag;
            break;
        }
    }
    double first = std::ceil(lo / step) * step;
    for (double v = first; v <= hi + 0.5 * step; v += step) {
        double vv = (std::fabs(v) < 1e-12 * step) ? 0.0 : v;
        t.push_back(vv);
    }
    return t;
}

const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

} // namespace

std::string render_svg_plot(const PlotSpec& spec) {
    const double W = 800, H = 500;
    const double ml = 72, mr = 24, mt = 42, mb = 58;
    const double pw = W - ml - mr, ph = H - mt - mb;

    double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    bool any = false;
    for (const auto& s : spec.series) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            double xv = s.x[i], yv = s.y[i];
            if (!std::isfinite(xv) || !std::isfinite(yv)) continue;
            if (spec.logx && !(xv > 0)) continue;
            double xt = spec.logx ? std::log10(xv) : xv;
            if (!any) {
                xmin = xmax = xt;
                ymin = ymax = yv;
                any = true;
            } else {
                xmin = std::min(xmin, xt);
                xmax = std::max(xmax, xt);
                ymin = std::min(ymin, yv);
                ymax = std::max(ymax, yv);
            }
        }
    }
    if (!any) {
        xmin = ymin = 0;
        xmax = ymax = 1;
    }
    if (xmax - xmin < 1e-300) {
        xmin -= 0.5;
        xmax += 0.5;
    }
    if (ymax - ymin < 1e-300) {
        ymin -= 0.5;
        ymax += 0.5;
    }
    double ypad = 0.05 * (ymax - ymin);
    ymin -= ypad;
    ymax += ypad;

    auto px = [&](double xt) { return ml + (xt - xmin) / (xmax - xmin) * pw; };
    auto py = [&](double yv) { return mt + (ymax - yv) / (ymax - ymin) * ph; };
    auto xt_of = [&](double xv) { return spec.logx ? std::log10(xv) : xv; };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"500\" "
           "viewBox=\"0 0 800 500\">\n";
    svg << "<rect width=\"800\" height=\"500\" fill=\"#ffffff\"/>\n";
    svg << "<text x=\"400\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\" "
           "text-anchor=\"middle\">"
        << xml_escape(spec.title) << "</text>\n";

    // axes frame
    svg << "<rect x=\"" << fmt_px(ml) << "\" y=\"" << fmt_px(mt) << "\" width=\"" << fmt_px(pw)
        << "\" height=\"" << fmt_px(ph) << "\" fill=\"none\" stroke=\"#333333\"/>\n";

    // x ticks
    std::vector<double> xticks;
    if (spec.logx) {
        int klo = static_cast<int>(std::ceil(xmin - 1e-9));
        int khi = static_cast<int>(std::floor(xmax + 1e-9));
        if (khi - klo >= 1)
            for (int k = klo; k <= khi; ++k) xticks.push_back(static_cast<double>(k));
        else
            xticks = nice_ticks(xmin, xmax, 6);
    } else {
        xticks = nice_ticks(xmin, xmax, 6);
    }
    for (double tx : xticks) {
        double X = px(tx);
        svg << "<line x1=\"" << fmt_px(X) << "\" y1=\"" << fmt_px(mt + ph) << "\" x2=\""
            << fmt_px(X) << "\" y2=\"" << fmt_px(mt + ph + 5) << "\" stroke=\"#333333\"/>\n";
        svg << "<line x1=\"" << fmt_px(X) << "\" y1=\"" << fmt_px(mt) << "\" x2=\"" << fmt_px(X)
            << "\" y2=\"" << fmt_px(mt + ph) << "\" stroke=\"#dddddd\"/>\n";
        std::string lbl = spec.logx ? ("1e" + fmt_tick(tx)) : fmt_tick(tx);
        svg << "<text x=\"" << fmt_px(X) << "\" y=\"" << fmt_px(mt + ph + 20)
            << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">" << lbl
            << "</text>\n";
    }
    // y ticks
    for (double ty : nice_ticks(ymin, ymax, 6)) {
        double Y = py(ty);
        svg << "<line x1=\"" << fmt_px(ml - 5) << "\" y1=\"" << fmt_px(Y) << "\" x2=\""
            << fmt_px(ml) << "\" y2=\"" << fmt_px(Y) << "\" stroke=\"#333333\"/>\n";
        svg << "<line x1=\"" << fmt_px(ml) << "\" y1=\"" << fmt_px(Y) << "\" x2=\""
            << fmt_px(ml + pw) << "\" y2=\"" << fmt_px(Y) << "\" stroke=\"#dddddd\"/>\n";
        svg << "<text x=\"" << fmt_px(ml - 9) << "\" y=\"" << fmt_px(Y + 4)
            << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"end\">"
            << fmt_tick(ty) << "</text>\n";
    }
    svg << "<text x=\"" << fmt_px(ml + pw / 2) << "\" y=\"" << fmt_px(H - 14)
        << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">"
        << xml_escape(spec.xlabel) << "</text>\n";
    svg << "<text x=\"18\" y=\"" << fmt_px(mt + ph / 2)
        << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" "
           "transform=\"rotate(-90 18 "
        << fmt_px(mt + ph / 2) << ")\">" << xml_escape(spec.ylabel) << "</text>\n";

    if (spec.marker_x) {
        double xv = *spec.marker_x;
        if (!spec.logx || xv > 0) {
            double X = px(xt_of(xv));
            if (X >= ml - 0.5 && X <= ml + pw + 0.5)
                svg << "<line x1=\"" << fmt_px(X) << "\" y1=\"" << fmt_px(mt) << "\" x2=\""
                    << fmt_px(X) << "\" y2=\"" << fmt_px(mt + ph)
                    << "\" stroke=\"#888888\" stroke-dasharray=\"5,4\"/>\n";
        }
    }

    for (std::size_t si = 0; si < spec.series.size(); ++si) {
        const auto& s = spec.series[si];
        const char* color = palette[si % (sizeof palette / sizeof *palette)];
        std::ostringstream pts;
        bool pen_down = false;
        std::string d;
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            double xv = s.x[i], yv = s.y[i];
            bool ok = std::isfinite(xv) && std::isfinite(yv) && (!spec.logx || xv > 0);
            if (!ok) {
                pen_down = false;
                continue;
            }
            d += pen_down ? " L " : " M ";
            d += fmt_px(px(xt_of(xv))) + " " + fmt_px(py(yv));
            pen_down = true;
        }
        if (!d.empty())
            svg << "<path d=\"" << d << "\" fill=\"none\" stroke=\"" << color
                << "\" stroke-width=\"1.6\"/>\n";
        if (spec.series.size() > 1 && !s.label.empty()) {
            double ly = mt + 16 + 18 * static_cast<double>(si);
            svg << "<line x1=\"" << fmt_px(ml + pw - 150) << "\" y1=\"" << fmt_px(ly - 4)
                << "\" x2=\"" << fmt_px(ml + pw - 126) << "\" y2=\"" << fmt_px(ly - 4)
                << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
            svg << "<text x=\"" << fmt_px(ml + pw - 120) << "\" y=\"" << fmt_px(ly)
                << "\" font-family=\"sans-serif\" font-size=\"12\">" << xml_escape(s.label)
                << "</text>\n";
        }
    }
    svg << "</svg>\n";
    return svg.str();
}

void write_svg_plot(const std::string& path, const PlotSpec& spec) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open " + path + " for writing");
    f << render_svg_plot(spec);
    if (!f) throw ConfigError("write failed for " + path);
}

} // namespace echospec
