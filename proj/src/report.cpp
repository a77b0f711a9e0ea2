#include "cutfem/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

namespace cutfem {

namespace {

const char* const norm_labels[num_norms] = {"l2", "h1", "h2", "energy"};
const char* const norm_colors[num_norms] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};

std::string cell(const std::optional<double>& v) { return v ? format_number(*v) : ""; }

std::string fixed2(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", x);
    return buf;
}

} // namespace

void write_csv(std::ostream& os, const Study& study)
{
    os << "level,h,nno,dofs_full,dofs_reduced,err_l2,err_h1,err_h2,err_energy,eoc_l2,eoc_h1,eoc_h2,eoc_energy,"
          "cond_est\n";
    for (size_t i = 0; i < study.rows.size(); ++i)
    {
        const auto& r = study.rows[i];
        os << i << ',' << format_number(r.h) << ',' << r.nno << ',' << r.dofs_full << ',' << r.dofs_reduced;
        for (const auto& e : r.errors)
            os << ',' << cell(e);
        for (int c = 0; c < num_norms; ++c)
            os << ',' << (i > 0 && i - 1 < study.eoc.size() ? cell(study.eoc[i - 1][c]) : "");
        os << ',' << cell(r.cond_est) << '\n';
    }
}

void write_svg(std::ostream& os, const Study& study)
{
    const double W = 640, H = 480, left = 70, right = 130, top = 30, bottom = 50;
    struct Point
    {
        double x, y;
    };
    std::vector<std::vector<Point>> series(num_norms);
    double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
    for (const auto& r : study.rows)
        for (int c = 0; c < num_norms; ++c)
            if (r.errors[c] && *r.errors[c] > 0.0 && r.h > 0.0)
            {
                const Point p{std::log10(r.h), std::log10(*r.errors[c])};
                series[c].push_back(p);
                xmin = std::min(xmin, p.x);
                xmax = std::max(xmax, p.x);
                ymin = std::min(ymin, p.y);
                ymax = std::max(ymax, p.y);
            }

    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << left << "\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\">" << study.name
       << ": error versus h</text>\n";
    if (!std::isfinite(xmin))
    {
        os << "<text x=\"" << left << "\" y=\"" << H / 2 << "\" font-family=\"sans-serif\">no error data</text>\n";
        os << "</svg>\n";
        return;
    }
    // whole decades around the data
    xmin = std::floor(xmin * 10.0) / 10.0 - 0.05;
    xmax = std::ceil(xmax * 10.0) / 10.0 + 0.05;
    ymin = std::floor(ymin) - 0.0;
    ymax = std::ceil(ymax) + 0.0;
    if (ymax - ymin < 1.0)
        ymax = ymin + 1.0;
    auto X = [&](double x) { return left + (x - xmin) / (xmax - xmin) * (W - left - right); };
    auto Y = [&](double y) { return top + (ymax - y) / (ymax - ymin) * (H - top - bottom); };

    os << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
    os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << W - left - right << "\" height=\""
       << H - top - bottom << "\" fill=\"none\" stroke=\"black\"/>\n";
    const int ystep = std::max(1, static_cast<int>(std::ceil((ymax - ymin) / 10.0)));
    for (int d = static_cast<int>(ymin); d <= static_cast<int>(ymax); d += ystep)
    {
        os << "<line x1=\"" << left << "\" x2=\"" << W - right << "\" y1=\"" << fixed2(Y(d)) << "\" y2=\""
           << fixed2(Y(d)) << "\" stroke=\"#dddddd\"/>\n";
        os << "<text x=\"" << left - 6 << "\" y=\"" << fixed2(Y(d) + 4) << "\" text-anchor=\"end\">1e" << d
           << "</text>\n";
    }
    for (const auto& r : study.rows)
    {
        const double x = std::log10(r.h);
        os << "<text x=\"" << fixed2(X(x)) << "\" y=\"" << H - bottom + 16 << "\" text-anchor=\"middle\">"
           << fixed2(r.h * 1000.0) << "e-3</text>\n";
    }
    os << "<text x=\"" << (left + W - right) / 2 << "\" y=\"" << H - 10 << "\" text-anchor=\"middle\">h</text>\n";

    int legend = 0;
    for (int c = 0; c < num_norms; ++c)
    {
        if (series[c].size() < 2)
            continue;
        os << "<polyline fill=\"none\" stroke=\"" << norm_colors[c] << "\" stroke-width=\"2\" points=\"";
        for (const auto& p : series[c])
            os << fixed2(X(p.x)) << ',' << fixed2(Y(p.y)) << ' ';
        os << "\"/>\n";
        for (const auto& p : series[c])
            os << "<circle cx=\"" << fixed2(X(p.x)) << "\" cy=\"" << fixed2(Y(p.y)) << "\" r=\"3\" fill=\""
               << norm_colors[c] << "\"/>\n";
        std::string label = norm_labels[c];
        if (study.expected_rates[c])
        {
            // reference slope through the coarsest point
            const double rate = *study.expected_rates[c];
            const Point a = series[c].front(), b = series[c].back();
            const double yb = a.y + rate * (b.x - a.x);
            os << "<line x1=\"" << fixed2(X(a.x)) << "\" y1=\"" << fixed2(Y(a.y)) << "\" x2=\"" << fixed2(X(b.x))
               << "\" y2=\"" << fixed2(Y(yb)) << "\" stroke=\"" << norm_colors[c]
               << "\" stroke-dasharray=\"6,4\"/>\n";
            label += " (ref " + fixed2(rate) + ")";
        }
        const double ly = top + 16 + 18 * legend++;
        os << "<line x1=\"" << W - right + 8 << "\" x2=\"" << W - right + 28 << "\" y1=\"" << ly - 4 << "\" y2=\""
           << ly - 4 << "\" stroke=\"" << norm_colors[c] << "\" stroke-width=\"2\"/>\n";
        os << "<text x=\"" << W - right + 32 << "\" y=\"" << ly << "\">" << label << "</text>\n";
    }
    os << "</g>\n</svg>\n";
}

void write_metadata(std::ostream& os, const Study& study)
{
    for (const auto& [k, v] : study.metadata)
        os << k << " = " << v << '\n';
}

void write_artifacts(const std::filesystem::path& dir, const Study& study)
{
    std::filesystem::create_directories(dir);
    auto open = [&](const char* name) {
        std::ofstream f(dir / name);
        if (!f)
            throw std::runtime_error("cannot write " + (dir / name).string());
        return f;
    };
    {
        auto f = open("results.csv");
        write_csv(f, study);
    }
    {
        auto f = open("convergence.svg");
        write_svg(f, study);
    }
    {
        auto f = open("metadata.txt");
        write_metadata(f, study);
    }
}

} // namespace cutfem
