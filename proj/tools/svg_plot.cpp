#include "svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace ffm::plot {

namespace {

constexpr double kPanel = 260.0;
constexpr double kMargin = 30.0;
constexpr int kColumns = 4;

struct P2 {
    double x, y;
};

P2 project(const Vec& t) {
    if (t.size() == 1) return {t[0], 0.0};
    if (t.size() == 2) return {t[0], t[1]};
    // oblique view of the first three tangent coordinates
    return {t[0] + 0.45 * t[2] * std::cos(M_PI / 6), t[1] + 0.45 * t[2] * std::sin(M_PI / 6)};
}

// Tangent coordinates at the tree point; flat spaces use ambient coordinates.
std::vector<P2> layout(const Panel& p, P2& root) {
    const CurvedSpace& sp = p.realization.space;
    std::vector<P2> out;
    if (sp.flat()) {
        root = project(p.tree.point);
        for (const Vec& v : p.realization.vertices) out.push_back(project(v));
        return out;
    }
    const Mat basis = tangent_basis(p.tree.point, sp);
    root = {0.0, 0.0};
    for (const Vec& v : p.realization.vertices) {
        const Vec lv = log_map(p.tree.point, v, sp);
        Vec c(sp.N);
        for (int k = 0; k < sp.N; ++k) c[k] = model_inner(basis.col(k), lv, sp);
        out.push_back(project(c));
    }
    return out;
}

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", x);
    return buf;
}

std::string fmt4(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", x);
    return buf;
}

} // namespace

std::string render(const std::vector<Panel>& panels) {
    const int n = static_cast<int>(panels.size());
    const int cols = std::max(1, std::min(n, kColumns));
    const int rows = std::max(1, (n + kColumns - 1) / kColumns);
    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << cols * kPanel << "\" height=\"" << rows * kPanel
      << "\" font-family=\"sans-serif\" font-size=\"10\">\n";
    s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    for (int idx = 0; idx < n; ++idx) {
        const Panel& p = panels[idx];
        P2 root{};
        const std::vector<P2> pts = layout(p, root);
        double xmin = root.x, xmax = root.x, ymin = root.y, ymax = root.y;
        for (const P2& q : pts) {
            xmin = std::min(xmin, q.x), xmax = std::max(xmax, q.x);
            ymin = std::min(ymin, q.y), ymax = std::max(ymax, q.y);
        }
        const double span = std::max({xmax - xmin, ymax - ymin, 1e-12});
        const double scale = (kPanel - 2 * kMargin) / span;
        const double ox = (idx % kColumns) * kPanel + kMargin, oy = (idx / kColumns) * kPanel + kMargin;
        auto X = [&](const P2& q) { return ox + (q.x - xmin) * scale; };
        auto Y = [&](const P2& q) { return oy + (kPanel - 2 * kMargin) - (q.y - ymin) * scale; };

        s << "<g>\n<text x=\"" << fmt(ox - kMargin + 6) << "\" y=\"" << fmt(oy - kMargin + 14) << "\">"
          << p.title << "</text>\n";
        for (std::size_t i = 0; i < pts.size(); ++i)
            for (std::size_t j = i + 1; j < pts.size(); ++j)
                s << "<line x1=\"" << fmt(X(pts[i])) << "\" y1=\"" << fmt(Y(pts[i])) << "\" x2=\"" << fmt(X(pts[j]))
                  << "\" y2=\"" << fmt(Y(pts[j])) << "\" stroke=\"#999\" stroke-width=\"1\"/>\n";
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (p.tree.branches[i] > 0.0) {
                s << "<line x1=\"" << fmt(X(root)) << "\" y1=\"" << fmt(Y(root)) << "\" x2=\"" << fmt(X(pts[i]))
                  << "\" y2=\"" << fmt(Y(pts[i])) << "\" stroke=\"#c0392b\" stroke-width=\"2\"/>\n";
                const P2 mid{(root.x + pts[i].x) / 2, (root.y + pts[i].y) / 2};
                s << "<text x=\"" << fmt(X(mid) + 3) << "\" y=\"" << fmt(Y(mid) - 3) << "\" fill=\"#c0392b\">"
                  << fmt4(p.tree.branches[i]) << "</text>\n";
            }
            s << "<circle cx=\"" << fmt(X(pts[i])) << "\" cy=\"" << fmt(Y(pts[i])) << "\" r=\"3\"/>\n";
            s << "<text x=\"" << fmt(X(pts[i]) + 5) << "\" y=\"" << fmt(Y(pts[i]) + 12) << "\">A" << i + 1
              << "</text>\n";
        }
        s << "<circle cx=\"" << fmt(X(root)) << "\" cy=\"" << fmt(Y(root)) << "\" r=\"4\" fill=\"#c0392b\"/>\n";
        s << "<text x=\"" << fmt(X(root) + 5) << "\" y=\"" << fmt(Y(root) - 6) << "\">A0</text>\n</g>\n";
    }
    s << "</svg>\n";
    return s.str();
}

} // namespace ffm::plot
