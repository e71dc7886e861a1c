#include "driftsim/plot.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

namespace driftsim {

namespace {

constexpr double kWidth = 640.0, kHeight = 440.0;
constexpr double kLeft = 70.0, kRight = 20.0, kTop = 40.0, kBottom = 60.0;

struct Frame {
    double x0, x1, y0, y1;

    double px(double x) const { return kLeft + (x - x0) / (x1 - x0) * (kWidth - kLeft - kRight); }
    double py(double y) const { return kHeight - kBottom - (y - y0) / (y1 - y0) * (kHeight - kTop - kBottom); }
};

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '<') out += "&lt;";
        else if (c == '>') out += "&gt;";
        else if (c == '&') out += "&amp;";
        else out += c;
    }
    return out;
}

void pad(double& lo, double& hi) {
    if (hi <= lo) {
        const double d = lo == 0.0 ? 1.0 : std::abs(lo) * 0.1;
        lo -= d;
        hi += d;
    }
}

class Svg {
public:
    Svg(const Frame& f, const std::string& title, const std::string& xl, const std::string& yl) : f_(f) {
        os_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight << "\">\n"
            << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
            << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << escape(title)
            << "</text>\n"
            << "<text class=\"xlabel\" x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 15
            << "\" text-anchor=\"middle\" font-size=\"13\">" << escape(xl) << "</text>\n"
            << "<text class=\"ylabel\" x=\"18\" y=\"" << kHeight / 2 << "\" text-anchor=\"middle\" font-size=\"13\""
            << " transform=\"rotate(-90 18 " << kHeight / 2 << ")\">" << escape(yl) << "</text>\n"
            << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << kWidth - kLeft - kRight << "\" height=\""
            << kHeight - kTop - kBottom << "\" fill=\"none\" stroke=\"black\"/>\n";
        ticks();
    }

    void polyline(const std::vector<double>& x, const std::vector<double>& y, const std::string& cls,
                  const std::string& color) {
        os_ << "<polyline class=\"" << cls << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < x.size(); ++i) os_ << f_.px(x[i]) << ',' << f_.py(y[i]) << ' ';
        os_ << "\"/>\n";
    }

    void points(const std::vector<double>& x, const std::vector<double>& y) {
        for (std::size_t i = 0; i < x.size(); ++i)
            os_ << "<circle cx=\"" << f_.px(x[i]) << "\" cy=\"" << f_.py(y[i]) << "\" r=\"3\" fill=\"steelblue\"/>\n";
    }

    void legend(const std::string& text, double row) {
        os_ << "<text class=\"legend\" x=\"" << kLeft + 10 << "\" y=\"" << kTop + 18 + 16 * row << "\" font-size=\"12\">"
            << escape(text) << "</text>\n";
    }

    std::string finish() {
        os_ << "</svg>\n";
        return os_.str();
    }

private:
    void ticks() {
        for (int k = 0; k <= 4; ++k) {
            const double x = f_.x0 + (f_.x1 - f_.x0) * k / 4.0;
            const double y = f_.y0 + (f_.y1 - f_.y0) * k / 4.0;
            os_ << "<text x=\"" << f_.px(x) << "\" y=\"" << kHeight - kBottom + 16
                << "\" text-anchor=\"middle\" font-size=\"10\">" << format_number(x) << "</text>\n"
                << "<text x=\"" << kLeft - 4 << "\" y=\"" << f_.py(y) + 3 << "\" text-anchor=\"end\" font-size=\"10\">"
                << format_number(y) << "</text>\n";
        }
    }

    Frame f_;
    std::ostringstream os_;
};

std::string kr(double kappa, double r) { return "kappa=" + format_number(kappa) + ", r=" + format_number(r); }

}  // namespace

std::string ecdf_svg(const std::vector<double>& sample, double kappa, double r) {
    if (sample.empty()) throw std::invalid_argument("ecdf_svg: empty sample");
    std::vector<double> s = sample;
    std::sort(s.begin(), s.end());
    // Log axis since H spans decades for small kappa.
    const bool logx = s.front() > 0.0;
    auto tx = [&](double v) { return logx ? std::log10(v) : v; };
    Frame f{tx(s.front()), tx(s.back()), 0.0, 1.0};
    pad(f.x0, f.x1);
    Svg svg(f, "ECDF of H(r), " + kr(kappa, r), std::string(logx ? "log10 " : "") + "H(r) [" + kr(kappa, r) + "]",
            "P(H(r) <= h)");
    std::vector<double> x, y;
    const std::size_t n = s.size();
    const std::size_t stride = std::max<std::size_t>(1, n / 2000);
    for (std::size_t i = 0; i < n; i += stride) {
        x.push_back(tx(s[i]));
        y.push_back(static_cast<double>(i + 1) / static_cast<double>(n));
    }
    x.push_back(tx(s.back()));
    y.push_back(1.0);
    svg.polyline(x, y, "ecdf", "steelblue");
    svg.legend("n=" + std::to_string(n), 0);
    return svg.finish();
}

std::string tail_svg(const std::vector<double>& sample, const HillResult& hill, double kappa, double r) {
    if (sample.empty()) throw std::invalid_argument("tail_svg: empty sample");
    std::vector<double> s;
    for (double v : sample)
        if (v > 0.0 && std::isfinite(v)) s.push_back(v);
    if (s.size() < 2) throw std::invalid_argument("tail_svg: need at least two positive values");
    std::sort(s.begin(), s.end());
    const auto n = static_cast<double>(s.size());
    std::vector<double> x, y;
    const std::size_t stride = std::max<std::size_t>(1, s.size() / 2000);
    for (std::size_t i = 0; i + 1 < s.size(); i += stride) {
        x.push_back(std::log10(s[i]));
        y.push_back(std::log10((n - static_cast<double>(i)) / n));
    }
    Frame f{x.front(), std::log10(s.back()), std::log10(1.0 / n), 0.0};
    pad(f.x0, f.x1);
    Svg svg(f, "Tail of H(r), " + kr(kappa, r), "log10 h [" + kr(kappa, r) + "]", "log10 P(H(r) > h)");
    svg.polyline(x, y, "survival", "steelblue");

    if (hill.threshold > 0.0 && std::isfinite(hill.estimate)) {
        const double lx0 = std::log10(hill.threshold);
        const double ly0 = std::log10(static_cast<double>(hill.k) / n);
        const double lx1 = f.x1;
        double ly1 = ly0 - hill.estimate * (lx1 - lx0);
        double end = lx1;
        if (ly1 < f.y0) {
            end = lx0 + (ly0 - f.y0) / hill.estimate;
            ly1 = f.y0;
        }
        svg.polyline({lx0, end}, {ly0, ly1}, "hill-fit", "crimson");
    }
    svg.legend("Hill estimate " + format_number(hill.estimate) + " (k=" + std::to_string(hill.k) + ")", 0);
    svg.legend("fitted slope -" + format_number(hill.estimate), 1);
    return svg.finish();
}

std::string ratio_svg(const std::vector<double>& r, const std::vector<double>& ratio, double target,
                      const std::string& y_label) {
    if (r.empty() || r.size() != ratio.size()) throw std::invalid_argument("ratio_svg: need matching nonempty inputs");
    std::vector<double> x;
    for (double v : r) {
        if (!(v > 0.0)) throw std::invalid_argument("ratio_svg: r must be positive");
        x.push_back(std::log10(v));
    }
    double lo = *std::min_element(ratio.begin(), ratio.end());
    double hi = *std::max_element(ratio.begin(), ratio.end());
    if (std::isfinite(target)) {
        lo = std::min(lo, target);
        hi = std::max(hi, target);
    }
    const double m = 0.1 * (hi - lo);
    Frame f{x.front(), x.back(), lo - m, hi + m};
    pad(f.x0, f.x1);
    pad(f.y0, f.y1);
    Svg svg(f, y_label + " against r", "log10 r", y_label);
    if (std::isfinite(target)) {
        svg.polyline({f.x0, f.x1}, {target, target}, "target", "crimson");
        svg.legend("target " + format_number(target), 0);
    }
    svg.polyline(x, ratio, "ratio", "steelblue");
    svg.points(x, ratio);
    return svg.finish();
}

std::vector<std::string> emit_plots(const std::vector<HittingSample>& samples, const std::string& out_dir) {
    if (samples.empty()) throw std::invalid_argument("emit_plots: no samples");
    std::map<double, std::map<double, std::vector<double>>> groups;
    for (const auto& s : samples) groups[s.kappa][s.r].push_back(s.h_value);
    std::filesystem::create_directories(out_dir);
    std::vector<std::string> files;
    auto put = [&](const std::string& name, const std::string& svg) {
        const std::string path = (std::filesystem::path(out_dir) / name).string();
        write_text_file(path, svg);
        files.push_back(path);
    };
    for (const auto& [kappa, by_r] : groups) {
        const std::string kt = "kappa" + format_number(kappa);
        std::vector<double> rs, ratios;
        for (const auto& [r, h] : by_r) {
            const std::string tag = kt + "_r" + format_number(r);
            put("ecdf_" + tag + ".svg", ecdf_svg(h, kappa, r));
            if (h.size() >= 3) put("tail_" + tag + ".svg", tail_svg(h, hill_estimator(h, {0.02, 0, 0}), kappa, r));
            const double m = median(h);
            rs.push_back(r);
            ratios.push_back(kappa > 1.0    ? m / r
                             : kappa == 1.0 ? m / (r * std::log(r))
                                            : m / std::pow(r, 1.0 / kappa));
        }
        if (rs.size() >= 2) {
            const double target = kappa > 1.0    ? 4.0 / (kappa - 1.0)
                                  : kappa == 1.0 ? 4.0
                                                 : std::numeric_limits<double>::quiet_NaN();
            const std::string label = kappa > 1.0    ? "median H(r)/r"
                                      : kappa == 1.0 ? "median H(r)/(r log r)"
                                                     : "median H(r)/r^(1/kappa)";
            put("ratio_" + kt + ".svg", ratio_svg(rs, ratios, target, label + ", kappa=" + format_number(kappa)));
        }
    }
    return files;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << content;
    if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace driftsim
