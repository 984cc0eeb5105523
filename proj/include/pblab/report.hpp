// report.hpp — CSV tables, native SVG plots, and the JSON invariant report.
//
// Output is deterministic: numbers are formatted with a fixed %.12g, rows in
// computation order, no timestamps.  CSV files start with a versioned schema
// comment line.  The SVG plots are generated directly (polyline + axes +
// band polygon); good enough for log-log rate plots and cloud snapshots.

#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pblab/displacement.hpp"
#include "pblab/ratemeter.hpp"

namespace pblab {

inline std::string fmt_g(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

// ── CSV ───────────────────────────────────────────────────────────────────────

inline void write_rate_csv(const RateTable& table, std::ostream& os) {
    os << "# pblab csv v1; rate-table; columns: eps,gap,ratio,band_lo,band_hi,"
          "used_in_fit,grid_res,refined_spacing; slope=" << fmt_g(table.slope)
       << "; eps0=" << fmt_g(table.eps0) << "\n";
    for (const auto& r : table.rows) {
        os << fmt_g(r.eps) << "," << fmt_g(r.gap) << "," << fmt_g(r.ratio) << ","
           << fmt_g(table.band_lo) << "," << fmt_g(table.band_hi) << ","
           << (r.used_in_fit ? 1 : 0) << "," << r.grid_resolution << ","
           << fmt_g(r.refined_spacing) << "\n";
    }
}

inline void write_unicontinuity_csv(const UnicontinuityReport& rep, std::ostream& os) {
    os << "# pblab csv v1; unicontinuity; columns: n,f_dist,g_dist,g_c1,product; "
          "trend=" << rep.trend << "\n";
    for (const auto& r : rep.rows)
        os << r.n << "," << fmt_g(r.f_dist) << "," << fmt_g(r.g_dist) << ","
           << fmt_g(r.g_c1) << "," << fmt_g(r.product) << "\n";
}

inline void write_displacement_csv(const std::vector<DisplacementRun>& runs,
                                   std::ostream& os) {
    os << "# pblab csv v1; displacement; columns: t,r,alpha,delta,certified,"
          "separated,margin,hofer,energy_slab,samples,h_c2,flow_speed\n";
    for (const auto& run : runs) {
        os << fmt_g(run.cert.t) << "," << fmt_g(run.cert.r) << ","
           << fmt_g(run.cert.alpha) << "," << fmt_g(run.cert.delta) << ","
           << (run.cert.certified ? 1 : 0) << "," << (run.check.separated ? 1 : 0)
           << "," << fmt_g(run.check.margin) << "," << fmt_g(run.hofer) << ","
           << fmt_g(run.energy_slab) << "," << run.samples << ","
           << fmt_g(run.cert.h_c2) << "," << fmt_g(run.cert.flow_speed) << "\n";
    }
}

// ── SVG ───────────────────────────────────────────────────────────────────────

namespace detail {

struct SvgFrame {
    double x0, x1, y0, y1;       // data range
    double width = 640, height = 480, margin = 56;

    double px(double x) const {
        return margin + (x - x0) / (x1 - x0) * (width - 2 * margin);
    }
    double py(double y) const {
        return height - margin - (y - y0) / (y1 - y0) * (height - 2 * margin);
    }
};

}  // namespace detail

// Log-log rate plot: data points, fitted line, and the theoretical band
// drawn as the slanted strip between band_lo eps^{2/3} and band_hi eps^{2/3}.
inline void write_rate_svg(const RateTable& table, std::ostream& os) {
    const double l10 = std::log(10.0);
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& r : table.rows) {
        const double lx = std::log(r.eps) / l10, ly = std::log(r.gap) / l10;
        xmin = std::min(xmin, lx); xmax = std::max(xmax, lx);
        ymin = std::min(ymin, ly); ymax = std::max(ymax, ly);
    }
    if (table.band_lo > 0.0) {
        ymin = std::min(ymin, std::log(table.band_lo) / l10 + (2.0 / 3.0) * xmin);
        ymax = std::max(ymax, std::log(table.band_hi) / l10 + (2.0 / 3.0) * xmax);
    }
    const double padx = 0.05 * (xmax - xmin + 1e-9), pady = 0.05 * (ymax - ymin + 1e-9);
    detail::SvgFrame fr{xmin - padx, xmax + padx, ymin - pady, ymax + pady};

    os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << fr.width
       << "' height='" << fr.height << "'>\n";
    os << "<rect width='100%' height='100%' fill='white'/>\n";
    if (table.band_lo > 0.0) {
        auto band_y = [&](double lx, double c) {
            return std::log(c) / l10 + (2.0 / 3.0) * lx;
        };
        os << "<polygon fill='#cfe8ff' stroke='none' points='"
           << fr.px(fr.x0) << "," << fr.py(band_y(fr.x0, table.band_lo)) << " "
           << fr.px(fr.x1) << "," << fr.py(band_y(fr.x1, table.band_lo)) << " "
           << fr.px(fr.x1) << "," << fr.py(band_y(fr.x1, table.band_hi)) << " "
           << fr.px(fr.x0) << "," << fr.py(band_y(fr.x0, table.band_hi)) << "'/>\n";
    }
    // Axes.
    os << "<line x1='" << fr.px(fr.x0) << "' y1='" << fr.py(fr.y0) << "' x2='"
       << fr.px(fr.x1) << "' y2='" << fr.py(fr.y0) << "' stroke='black'/>\n";
    os << "<line x1='" << fr.px(fr.x0) << "' y1='" << fr.py(fr.y0) << "' x2='"
       << fr.px(fr.x0) << "' y2='" << fr.py(fr.y1) << "' stroke='black'/>\n";
    os << "<text x='" << fr.width / 2 << "' y='" << fr.height - 12
       << "' font-size='13' text-anchor='middle'>log10 eps</text>\n";
    os << "<text x='14' y='" << fr.height / 2
       << "' font-size='13' text-anchor='middle' transform='rotate(-90 14 "
       << fr.height / 2 << ")'>log10 gap</text>\n";
    // Fitted line.
    auto fit_y = [&](double lx) {
        return (table.intercept + table.slope * (lx * l10)) / l10;
    };
    os << "<line x1='" << fr.px(fr.x0) << "' y1='" << fr.py(fit_y(fr.x0)) << "' x2='"
       << fr.px(fr.x1) << "' y2='" << fr.py(fit_y(fr.x1))
       << "' stroke='#d06000' stroke-dasharray='6,3'/>\n";
    // Data points.
    for (const auto& r : table.rows) {
        const double lx = std::log(r.eps) / l10, ly = std::log(r.gap) / l10;
        os << "<circle cx='" << fr.px(lx) << "' cy='" << fr.py(ly)
           << "' r='4' fill='" << (r.used_in_fit ? "#1050c0" : "#a0a0a0") << "'/>\n";
    }
    os << "<text x='" << fr.width - 8 << "' y='20' font-size='12' text-anchor='end'>"
       << "slope " << fmt_g(table.slope) << ", band [" << fmt_g(table.band_lo)
       << ", " << fmt_g(table.band_hi) << "]</text>\n";
    os << "</svg>\n";
}

// Scatter snapshot of point clouds projected on two coordinates.
inline void write_cloud_svg(const std::vector<std::vector<Point>>& clouds,
                            const std::vector<std::string>& colors,
                            std::ostream& os, int cx = 0, int cy = 1) {
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& cloud : clouds)
        for (const auto& pt : cloud) {
            xmin = std::min(xmin, pt[static_cast<std::size_t>(cx)]);
            xmax = std::max(xmax, pt[static_cast<std::size_t>(cx)]);
            ymin = std::min(ymin, pt[static_cast<std::size_t>(cy)]);
            ymax = std::max(ymax, pt[static_cast<std::size_t>(cy)]);
        }
    const double padx = 0.08 * (xmax - xmin + 1e-12), pady = 0.08 * (ymax - ymin + 1e-12);
    detail::SvgFrame fr{xmin - padx, xmax + padx, ymin - pady, ymax + pady};
    os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << fr.width
       << "' height='" << fr.height << "'>\n";
    os << "<rect width='100%' height='100%' fill='white'/>\n";
    for (std::size_t c = 0; c < clouds.size(); ++c) {
        const std::string& color = colors[c % colors.size()];
        for (const auto& pt : clouds[c])
            os << "<circle cx='" << fr.px(pt[static_cast<std::size_t>(cx)]) << "' cy='"
               << fr.py(pt[static_cast<std::size_t>(cy)]) << "' r='1.5' fill='"
               << color << "'/>\n";
    }
    os << "</svg>\n";
}

// ── JSON invariant report ─────────────────────────────────────────────────────

class InvariantReport {
public:
    explicit InvariantReport(std::string title) { doc_["title"] = std::move(title); }

    void add(const std::string& name, bool pass, double value, double tolerance,
             const std::string& resolution) {
        nlohmann::json entry;
        entry["check"] = name;
        entry["pass"] = pass;
        entry["value"] = value;
        entry["tolerance"] = tolerance;
        entry["resolution"] = resolution;
        doc_["checks"].push_back(entry);
        all_passed_ = all_passed_ && pass;
        ++total_;
        failed_ += pass ? 0 : 1;
    }

    void note(const std::string& key, const nlohmann::json& value) { doc_[key] = value; }

    bool all_passed() const { return all_passed_; }
    int failed() const { return failed_; }
    int total() const { return total_; }

    std::string first_failure() const {
        if (doc_.contains("checks"))
            for (const auto& c : doc_["checks"])
                if (!c["pass"].get<bool>()) return c["check"].get<std::string>();
        return "";
    }

    void write(std::ostream& os) const {
        nlohmann::json out = doc_;
        out["passed"] = all_passed_;
        os << out.dump(2) << "\n";
    }

private:
    nlohmann::json doc_;
    bool all_passed_ = true;
    int total_ = 0;
    int failed_ = 0;
};

inline void write_file(const std::filesystem::path& path, const std::string& contents) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write '" + path.string() + "'");
    os << contents;
}

}  // namespace pblab
