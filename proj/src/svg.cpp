#include "bkm/svg.hpp"

#include <algorithm>
#include <cstdio>

namespace bkm {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};
constexpr int kPaletteSize = 8;
constexpr const char* kGrey = "#b0b0b0";

std::string cluster_color(int label) {
  return kPalette[label % kPaletteSize];
}

}  // namespace

SvgCanvas::SvgCanvas(double width, double height)
    : width_(width), height_(height) {}

void SvgCanvas::line(double x1, double y1, double x2, double y2,
                     const std::string& style, const std::string& css_class) {
  body_ += "  <line";
  if (!css_class.empty()) body_ += " class=\"" + css_class + "\"";
  body_ += " x1=\"" + fmt(x1) + "\" y1=\"" + fmt(y1) + "\" x2=\"" + fmt(x2) +
           "\" y2=\"" + fmt(y2) + "\" style=\"" + style + "\"/>\n";
}

void SvgCanvas::polyline(const std::vector<std::pair<double, double>>& pts,
                         const std::string& style,
                         const std::string& css_class) {
  body_ += "  <polyline";
  if (!css_class.empty()) body_ += " class=\"" + css_class + "\"";
  body_ += " points=\"";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i > 0) body_ += " ";
    body_ += fmt(pts[i].first) + "," + fmt(pts[i].second);
  }
  body_ += "\" style=\"fill:none;" + style + "\"/>\n";
}

void SvgCanvas::circle(double cx, double cy, double r, const std::string& style,
                       const std::string& css_class) {
  body_ += "  <circle";
  if (!css_class.empty()) body_ += " class=\"" + css_class + "\"";
  body_ += " cx=\"" + fmt(cx) + "\" cy=\"" + fmt(cy) + "\" r=\"" + fmt(r) +
           "\" style=\"" + style + "\"/>\n";
}

void SvgCanvas::rect(double x, double y, double w, double h,
                     const std::string& style) {
  body_ += "  <rect x=\"" + fmt(x) + "\" y=\"" + fmt(y) + "\" width=\"" +
           fmt(w) + "\" height=\"" + fmt(h) + "\" style=\"" + style + "\"/>\n";
}

void SvgCanvas::text(double x, double y, const std::string& content,
                     const std::string& style) {
  body_ += "  <text x=\"" + fmt(x) + "\" y=\"" + fmt(y) + "\" style=\"" +
           style + "\">" + content + "</text>\n";
}

std::string SvgCanvas::str() const {
  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
                    fmt(width_) + "\" height=\"" + fmt(height_) +
                    "\" viewBox=\"0 0 " + fmt(width_) + " " + fmt(height_) +
                    "\">\n";
  out += body_;
  out += "</svg>\n";
  return out;
}

namespace {

// Shared axis frame mapping [0,1]^2 into the canvas.
struct UnitAxes {
  double x0 = 50, y0 = 20, w = 300, h = 300;

  double x(double u) const { return x0 + u * w; }
  double y(double v) const { return y0 + (1.0 - v) * h; }

  void draw(SvgCanvas& canvas, const std::string& x_label,
            const std::string& y_label) const {
    canvas.rect(x0, y0, w, h, "fill:none;stroke:#333;stroke-width:1");
    for (int i = 0; i <= 4; ++i) {
      const double u = i / 4.0;
      canvas.text(x(u) - 8, y0 + h + 16, fmt(u));
      canvas.text(x0 - 34, y(u) + 4, fmt(u));
    }
    canvas.text(x0 + w / 2 - 40, y0 + h + 34, x_label);
    canvas.text(8, y0 - 6, y_label);
  }
};

}  // namespace

std::string plot_reliability(const CalibrationReport& report,
                             const std::string& title) {
  SvgCanvas canvas(400, 380);
  UnitAxes axes;
  canvas.text(axes.x0, 14, title, "font-size:13px;fill:#000");
  axes.draw(canvas, "mean predicted probability", "empirical correct fraction");
  canvas.line(axes.x(0), axes.y(0), axes.x(1), axes.y(1),
              "stroke:#888;stroke-width:1;stroke-dasharray:4 3", "diagonal");
  for (const auto& bin : report.bins) {
    if (bin.n_solutions == 0) continue;
    canvas.circle(axes.x(bin.mean_predicted_p),
                  axes.y(bin.empirical_correct_fraction), 4,
                  "fill:#1f77b4;stroke:#123;stroke-width:0.5", "bin");
  }
  return canvas.str();
}

std::string plot_sparsification(
    const std::vector<std::pair<std::string, SparsificationCurve>>& curves,
    const std::string& title) {
  SvgCanvas canvas(400, 380 + 14.0 * curves.size());
  UnitAxes axes;
  canvas.text(axes.x0, 14, title, "font-size:13px;fill:#000");
  axes.draw(canvas, "fraction of tasks removed", "metric over remaining tasks");
  int idx = 0;
  for (const auto& [name, curve] : curves) {
    const std::string color = kPalette[idx % kPaletteSize];
    std::vector<std::pair<double, double>> pred, oracle;
    for (std::size_t i = 0; i < curve.fractions_removed.size(); ++i) {
      pred.emplace_back(axes.x(curve.fractions_removed[i]),
                        axes.y(std::clamp(curve.metric_predicted[i], 0.0, 1.0)));
      oracle.emplace_back(axes.x(curve.fractions_removed[i]),
                          axes.y(std::clamp(curve.metric_oracle[i], 0.0, 1.0)));
    }
    canvas.polyline(pred, "stroke:" + color + ";stroke-width:1.5", "predicted");
    canvas.polyline(oracle,
                    "stroke:" + color + ";stroke-width:1.5;stroke-dasharray:5 3",
                    "oracle");
    const double ly = 370 + 14.0 * idx;
    canvas.line(axes.x0, ly, axes.x0 + 24, ly, "stroke:" + color + ";stroke-width:1.5");
    canvas.text(axes.x0 + 30, ly + 4, name + " (dashed = oracle)");
    ++idx;
  }
  return canvas.str();
}

namespace {

std::string plot_points(const ClusteringTask& task,
                        const std::vector<int>* labels,
                        const std::vector<std::uint8_t>* retained,
                        const std::string& title) {
  SvgCanvas canvas(400, 400);
  canvas.text(20, 16, title, "font-size:13px;fill:#000");
  if (task.dim() < 1 || task.num_points() == 0) return canvas.str();
  const int dx = 0;
  const int dy = task.dim() > 1 ? 1 : 0;
  double min_x = task.points(0, dx), max_x = min_x;
  double min_y = task.points(0, dy), max_y = min_y;
  for (int i = 0; i < task.num_points(); ++i) {
    min_x = std::min(min_x, task.points(i, dx));
    max_x = std::max(max_x, task.points(i, dx));
    min_y = std::min(min_y, task.points(i, dy));
    max_y = std::max(max_y, task.points(i, dy));
  }
  const double span_x = std::max(1e-9, max_x - min_x);
  const double span_y = std::max(1e-9, max_y - min_y);
  auto px = [&](double x) { return 30 + 340 * (x - min_x) / span_x; };
  auto py = [&](double y) { return 370 - 340 * (y - min_y) / span_y; };
  for (int i = 0; i < task.num_points(); ++i) {
    const bool grey = retained != nullptr && !(*retained)[i];
    std::string fill = kGrey;
    if (!grey && labels != nullptr) fill = cluster_color((*labels)[i]);
    canvas.circle(px(task.points(i, dx)), py(task.points(i, dy)), 5,
                  "fill:" + fill + ";stroke:#222;stroke-width:0.6",
                  grey ? "removed" : "point");
  }
  return canvas.str();
}

}  // namespace

std::string plot_scatter(const ClusteringTask& task,
                         const std::vector<int>* labels,
                         const std::string& title) {
  return plot_points(task, labels, nullptr, title);
}

std::string plot_maxset(const ClusteringTask& task, const MaxsetResult& maxset,
                        const std::string& title) {
  return plot_points(task, &maxset.consensus, &maxset.retained, title);
}

}  // namespace bkm
