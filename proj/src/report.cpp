#include "pvikit/report.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <stdexcept>

#include "pvikit/io.hpp"
#include "pvikit/text.hpp"

namespace pvikit {

std::string_view to_string(LengthUnit u) { return u == LengthUnit::scalars ? "scalars" : "tokens"; }

LengthUnit length_unit_from_string(std::string_view s) {
  if (s == "scalars") return LengthUnit::scalars;
  if (s == "tokens") return LengthUnit::tokens;
  throw std::invalid_argument("unknown length unit '" + std::string(s) + "'");
}

std::size_t text_length(std::string_view s, LengthUnit unit) {
  return unit == LengthUnit::scalars ? text::scalar_count(s) : text::split_whitespace(s).size();
}

namespace {

std::vector<std::vector<std::size_t>> lengths_by_label(const Dataset& dataset, LengthUnit unit,
                                                       const LabelSet& labels) {
  if (dataset.empty()) throw std::invalid_argument("length statistics need a non-empty dataset");
  if (labels.size() < dataset.num_classes) throw std::invalid_argument("label set smaller than num_classes");
  std::vector<std::vector<std::size_t>> out(dataset.num_classes);
  for (const auto& inst : dataset.instances) {
    if (inst.label >= dataset.num_classes) throw std::invalid_argument("label out of range");
    out[inst.label].push_back(text_length(inst.hypothesis, unit));
  }
  return out;
}

}  // namespace

LengthStats length_stats(const Dataset& dataset, LengthUnit unit, const LabelSet& labels) {
  auto groups = lengths_by_label(dataset, unit, labels);
  LengthStats stats;
  for (std::size_t c = 0; c < groups.size(); ++c) {
    auto& g = groups[c];
    if (g.empty()) {
      stats.warnings.push_back("label '" + labels.name_of(static_cast<Label>(c)) + "' has no instances");
      continue;
    }
    std::sort(g.begin(), g.end());
    double sum = 0.0;
    for (auto v : g) sum += static_cast<double>(v);
    stats.rows.push_back({labels.name_of(static_cast<Label>(c)), g.front(), g.back(), g[(g.size() - 1) / 2],
                          sum / static_cast<double>(g.size())});
  }
  return stats;
}

std::vector<std::string> bucket_labels(std::span<const std::size_t> upper_edges) {
  if (upper_edges.empty()) throw std::invalid_argument("bucket edges must not be empty");
  for (std::size_t i = 1; i < upper_edges.size(); ++i) {
    if (upper_edges[i] <= upper_edges[i - 1]) throw std::invalid_argument("bucket edges must be strictly increasing");
  }
  std::vector<std::string> out;
  out.push_back("<=" + std::to_string(upper_edges[0]));
  for (std::size_t i = 1; i < upper_edges.size(); ++i) {
    const auto lo = upper_edges[i - 1] + 1, hi = upper_edges[i];
    out.push_back(lo == hi ? std::to_string(hi) : std::to_string(lo) + "-" + std::to_string(hi));
  }
  out.push_back(">=" + std::to_string(upper_edges.back() + 1));
  return out;
}

BucketProportions bucket_proportions(const Dataset& dataset, std::span<const std::size_t> upper_edges,
                                     LengthUnit unit, const LabelSet& labels) {
  BucketProportions out;
  out.edge_labels = bucket_labels(upper_edges);
  out.upper_edges.assign(upper_edges.begin(), upper_edges.end());
  const auto groups = lengths_by_label(dataset, unit, labels);
  for (std::size_t c = 0; c < groups.size(); ++c) {
    const auto& g = groups[c];
    if (g.empty()) continue;
    std::vector<std::size_t> counts(out.edge_labels.size(), 0);
    for (auto len : g) {
      const auto it = std::lower_bound(upper_edges.begin(), upper_edges.end(), len);
      ++counts[static_cast<std::size_t>(it - upper_edges.begin())];
    }
    std::vector<double> props;
    for (auto n : counts) props.push_back(static_cast<double>(n) / static_cast<double>(g.size()));
    out.labels.push_back(labels.name_of(static_cast<Label>(c)));
    out.proportions.push_back(std::move(props));
  }
  return out;
}

std::string length_stats_csv(const LengthStats& stats) {
  std::string out = "label,min,max,median,mean\n";
  for (const auto& r : stats.rows) {
    out += io::csv_row({r.label, std::to_string(r.min), std::to_string(r.max), std::to_string(r.median),
                        io::format_double(r.mean)});
  }
  return out;
}

std::vector<LengthRow> parse_length_stats_csv(std::string_view content) {
  const auto t = io::parse_csv(content);
  const auto c_label = t.column("label"), c_min = t.column("min"), c_max = t.column("max");
  const auto c_med = t.column("median"), c_mean = t.column("mean");
  std::vector<LengthRow> out;
  for (const auto& row : t.rows) {
    out.push_back({row[c_label], std::stoull(row[c_min]), std::stoull(row[c_max]), std::stoull(row[c_med]),
                   io::parse_double(row[c_mean])});
  }
  return out;
}

std::string bucket_csv(const BucketProportions& buckets) {
  std::string out = "label,edge_label,proportion\n";
  for (std::size_t l = 0; l < buckets.labels.size(); ++l) {
    for (std::size_t b = 0; b < buckets.edge_labels.size(); ++b) {
      out += io::csv_row({buckets.labels[l], buckets.edge_labels[b], io::format_double(buckets.proportions[l][b])});
    }
  }
  return out;
}

std::vector<BucketRow> parse_bucket_csv(std::string_view content) {
  const auto t = io::parse_csv(content);
  const auto c_label = t.column("label"), c_edge = t.column("edge_label"), c_prop = t.column("proportion");
  std::vector<BucketRow> out;
  for (const auto& row : t.rows) out.push_back({row[c_label], row[c_edge], io::parse_double(row[c_prop])});
  return out;
}

namespace {

constexpr double kWidth = 640, kHeight = 420;
constexpr double kLeft = 70, kRight = 160, kTop = 40, kBottom = 60;
constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  std::string s = buf;
  if (s == "-0.00") s = "0.00";
  return s;
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

struct Frame {
  double x_lo, x_hi, y_lo, y_hi;

  double px(double x) const { return kLeft + (x - x_lo) / (x_hi - x_lo) * (kWidth - kLeft - kRight); }
  double py(double y) const { return kHeight - kBottom - (y - y_lo) / (y_hi - y_lo) * (kHeight - kTop - kBottom); }
};

std::string open_svg(const std::string& title) {
  return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
         "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + num(kWidth) + "\" height=\"" +
         num(kHeight) + "\" viewBox=\"0 0 " + num(kWidth) + " " + num(kHeight) + "\">\n" +
         "<rect x=\"0\" y=\"0\" width=\"" + num(kWidth) + "\" height=\"" + num(kHeight) + "\" fill=\"white\"/>\n" +
         "<text x=\"" + num(kWidth / 2) + "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" " +
         "font-size=\"15\">" + xml_escape(title) + "</text>\n";
}

std::string axes(const Frame& f, const std::string& x_label, const std::string& y_label, int ticks = 5) {
  const double x0 = f.px(f.x_lo), x1 = f.px(f.x_hi), y0 = f.py(f.y_lo), y1 = f.py(f.y_hi);
  std::string out = "<g class=\"axes\" stroke=\"black\" stroke-width=\"1\">\n";
  out += "<line x1=\"" + num(x0) + "\" y1=\"" + num(y0) + "\" x2=\"" + num(x1) + "\" y2=\"" + num(y0) + "\"/>\n";
  out += "<line x1=\"" + num(x0) + "\" y1=\"" + num(y0) + "\" x2=\"" + num(x0) + "\" y2=\"" + num(y1) + "\"/>\n";
  out += "</g>\n<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (int i = 0; i <= ticks; ++i) {
    const double t = static_cast<double>(i) / ticks;
    const double xv = f.x_lo + t * (f.x_hi - f.x_lo), yv = f.y_lo + t * (f.y_hi - f.y_lo);
    out += "<text x=\"" + num(f.px(xv)) + "\" y=\"" + num(y0 + 16) + "\" text-anchor=\"middle\">" + num(xv) +
           "</text>\n";
    out += "<text x=\"" + num(x0 - 6) + "\" y=\"" + num(f.py(yv) + 4) + "\" text-anchor=\"end\">" + num(yv) +
           "</text>\n";
  }
  out += "<text x=\"" + num((x0 + x1) / 2) + "\" y=\"" + num(kHeight - 18) + "\" text-anchor=\"middle\">" +
         xml_escape(x_label) + "</text>\n";
  out += "<text x=\"18\" y=\"" + num((y0 + y1) / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " +
         num((y0 + y1) / 2) + ")\">" + xml_escape(y_label) + "</text>\n";
  out += "</g>\n";
  return out;
}

std::string legend_entry(std::size_t i, const std::string& name, const char* colour) {
  const double y = kTop + 10 + 18 * static_cast<double>(i);
  const double x = kWidth - kRight + 16;
  return "<g class=\"legend\"><rect x=\"" + num(x) + "\" y=\"" + num(y - 8) + "\" width=\"10\" height=\"10\" fill=\"" +
         colour + "\"/><text x=\"" + num(x + 16) + "\" y=\"" + num(y + 1) +
         "\" font-family=\"sans-serif\" font-size=\"11\">" + xml_escape(name) + "</text></g>\n";
}

std::string marker(double x, double y, const char* colour) {
  return "<circle cx=\"" + num(x) + "\" cy=\"" + num(y) + "\" r=\"3\" fill=\"" + colour + "\"/>\n";
}

}  // namespace

std::string emit_runtime_plot(std::span<const RuntimeRecord> records) {
  double y_hi = 0.0, x_hi = 0.9;
  std::vector<std::string> phases;
  for (const auto& r : records) {
    y_hi = std::max(y_hi, r.seconds);
    x_hi = std::max(x_hi, r.r);
    if (std::find(phases.begin(), phases.end(), r.phase) == phases.end()) phases.push_back(r.phase);
  }
  if (y_hi <= 0.0) y_hi = 1.0;
  const Frame f{0.0, x_hi, 0.0, y_hi * 1.05};
  std::string out = open_svg("Runtime by reduction ratio");
  out += axes(f, "reduction ratio r", "seconds");
  for (std::size_t p = 0; p < phases.size(); ++p) {
    const char* colour = kPalette[p % std::size(kPalette)];
    out += legend_entry(p, phases[p], colour);
    out += "<g class=\"series\">\n";
    for (const auto& r : records) {
      if (r.phase == phases[p]) out += marker(f.px(r.r), f.py(r.seconds), colour);
    }
    out += "</g>\n";
  }
  out += "</svg>\n";
  return out;
}

std::string emit_accuracy_plot(std::span<const SweepPoint> points) {
  if (points.empty()) throw std::invalid_argument("accuracy plot needs at least one point");
  std::set<Strategy> strategies;
  double x_hi = 0.9;
  for (const auto& p : points) {
    strategies.insert(p.strategy);
    x_hi = std::max(x_hi, p.r);
  }
  std::vector<std::string> names;
  std::map<std::string, std::vector<const SweepPoint*>> series;
  for (const auto& p : points) {
    std::string name(to_string(p.variant));
    if (strategies.size() > 1) name += " / " + std::string(to_string(p.strategy));
    if (!series.contains(name)) names.push_back(name);
    series[name].push_back(&p);
  }
  const Frame f{0.0, x_hi, 0.0, 1.0};
  std::string out = open_svg("Accuracy by reduction ratio");
  out += axes(f, "reduction ratio r", "accuracy");
  for (std::size_t s = 0; s < names.size(); ++s) {
    const char* colour = kPalette[s % std::size(kPalette)];
    auto pts = series[names[s]];
    std::stable_sort(pts.begin(), pts.end(), [](const SweepPoint* a, const SweepPoint* b) { return a->r < b->r; });
    out += legend_entry(s, names[s], colour);
    out += "<g class=\"series\">\n";
    if (pts.size() > 1) {
      out += "<polyline fill=\"none\" stroke=\"" + std::string(colour) + "\" stroke-width=\"2\" points=\"";
      for (std::size_t i = 0; i < pts.size(); ++i) {
        if (i) out += ' ';
        out += num(f.px(pts[i]->r)) + "," + num(f.py(std::clamp(pts[i]->cm_accuracy, 0.0, 1.0)));
      }
      out += "\"/>\n";
    }
    for (const auto* p : pts) out += marker(f.px(p->r), f.py(std::clamp(p->cm_accuracy, 0.0, 1.0)), colour);
    out += "</g>\n";
  }
  out += "</svg>\n";
  return out;
}

std::string emit_histogram_plot(const Histogram& histogram) {
  if (histogram.counts.empty() || histogram.edges.size() != histogram.counts.size() + 1) {
    throw std::invalid_argument("malformed histogram");
  }
  std::size_t top = 1;
  for (auto c : histogram.counts) top = std::max(top, c);
  const Frame f{histogram.edges.front(), histogram.edges.back(), 0.0, static_cast<double>(top) * 1.05};
  std::string out = open_svg("PVI distribution");
  out += axes(f, "PVI (bits)", "instances");
  out += "<g class=\"bars\" fill=\"#1f77b4\" stroke=\"white\">\n";
  for (std::size_t b = 0; b < histogram.counts.size(); ++b) {
    const double x0 = f.px(histogram.edges[b]), x1 = f.px(histogram.edges[b + 1]);
    const double y = f.py(static_cast<double>(histogram.counts[b])), base = f.py(0.0);
    out += "<rect x=\"" + num(x0) + "\" y=\"" + num(y) + "\" width=\"" + num(x1 - x0) + "\" height=\"" +
           num(base - y) + "\"/>\n";
  }
  out += "</g>\n</svg>\n";
  return out;
}

}  // namespace pvikit
