#pragma once
// Minimal static SVG emission for the report plots: reliability diagrams,
// sparsification curves, and 2-D scatter/maxset views. Output is plain
// markup with fixed numeric formatting, so identical inputs produce
// identical bytes.
#include <string>
#include <vector>

#include "json.hpp"

#include "bkm/maxset.hpp"
#include "bkm/metrics.hpp"
#include "bkm/task.hpp"

namespace bkm {

class SvgCanvas {
 public:
  SvgCanvas(double width, double height);

  void line(double x1, double y1, double x2, double y2,
            const std::string& style, const std::string& css_class = "");
  void polyline(const std::vector<std::pair<double, double>>& pts,
                const std::string& style, const std::string& css_class = "");
  void circle(double cx, double cy, double r, const std::string& style,
              const std::string& css_class = "");
  void rect(double x, double y, double w, double h, const std::string& style);
  void text(double x, double y, const std::string& content,
            const std::string& style = "font-size:11px;fill:#333");

  std::string str() const;

 private:
  double width_, height_;
  std::string body_;
};

/// Reliability diagram: one diagonal reference line plus one marker per
/// non-empty bin at (mean predicted p, empirical correct fraction).
std::string plot_reliability(const CalibrationReport& report,
                             const std::string& title);

/// One solid (predicted) and one dashed (oracle) polyline per metric.
std::string plot_sparsification(
    const std::vector<std::pair<std::string, SparsificationCurve>>& curves,
    const std::string& title);

/// 2-D scatter of the first two feature dimensions, colored by label;
/// pass labels = nullptr to draw all points grey.
std::string plot_scatter(const ClusteringTask& task,
                         const std::vector<int>* labels,
                         const std::string& title);

/// Scatter with the maxset consensus coloring; removed points grey.
std::string plot_maxset(const ClusteringTask& task, const MaxsetResult& maxset,
                        const std::string& title);

}  // namespace bkm
