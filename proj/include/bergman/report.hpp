#pragma once

// JSON, CSV and SVG renderings of norm results and verification reports.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "bergman/errors.hpp"
#include "bergman/spaces.hpp"
#include "bergman/verify.hpp"

namespace bergman::report {

using json = nlohmann::ordered_json;

inline json point_json(std::span<const complex> z) {
  json a = json::array();
  for (const auto& c : z) a.push_back({c.real(), c.imag()});
  return a;
}

inline json to_json(const QuadratureSpec& q) {
  return {{"radial_nodes", q.radial_nodes},
          {"angular_nodes", q.angular_nodes},
          {"sphere_samples", q.sphere_samples},
          {"seed", q.seed}};
}

inline json to_json(const NormResult& r) {
  json pieces = json::object();
  for (const auto& [label, v] : r.pieces) pieces[label] = v;
  return {{"value", r.value},
          {"value_pow_p", r.value_pow_p},
          {"error_estimate", r.error_estimate},
          {"pieces", std::move(pieces)}};
}

inline json to_json(const ConditionReport& r) {
  return {{"weight", r.weight_id},
          {"k_tested", r.k},
          {"r0", r.r0},
          {"grid",
           {{"radii", r.grid.radii},
            {"shells", r.grid.shells},
            {"directions", r.grid.directions},
            {"seed", r.grid.seed},
            {"domain", std::string(to_string(r.grid.domain))},
            {"epsilon", r.grid.epsilon}}},
          {"bound", r.bound},
          {"sup_ratio", r.sup_ratio},
          {"C_estimate", r.C_estimate},
          {"tail_C", r.tail_C},
          {"passed", r.passed},
          {"status", r.passed ? "certified on grid" : "not certified on grid"},
          {"argmax", {{"r", r.argmax_r}, {"z", point_json(r.argmax_z)}}}};
}

inline json to_json(const MinKResult& r) {
  json reports = json::array();
  for (const auto& rep : r.reports) reports.push_back(to_json(rep));
  return {{"k_min", r.k_min ? json(*r.k_min) : json(nullptr)}, {"reports", std::move(reports)}};
}

inline json to_json(const MonotoneReport& r) {
  json samples = json::array();
  for (const auto& s : r.samples)
    samples.push_back({{"z", point_json(s.z)},
                       {"abs_z", s.abs_z},
                       {"monotone", s.monotone},
                       {"worst_slope", s.worst_slope},
                       {"worst_r", s.worst_r}});
  return {{"weight", r.weight_id},
          {"k", r.k},
          {"grid",
           {{"shells", r.grid.shells},
            {"directions", r.grid.directions},
            {"radii", r.grid.radii},
            {"seed", r.grid.seed},
            {"r_min", r.grid.r_min},
            {"step", r.grid.step},
            {"tolerance", r.grid.tolerance}}},
          {"monotone_fraction", r.monotone_fraction},
          {"all_monotone", r.all_monotone},
          {"worst_slope", r.worst_slope},
          {"worst_sample", r.worst_sample},
          {"samples", std::move(samples)}};
}

inline json to_json(const ConvergenceReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows) rows.push_back({{"r", row.r}, {"norm_fr", row.norm_fr}, {"norm_diff", row.norm_diff}});
  return {{"norm", r.norm_id},
          {"norm_f", r.norm_f},
          {"rows", std::move(rows)},
          {"limsup_check", r.limsup_check},
          {"vanishing_check", r.vanishing_check}};
}

inline json to_json(const DensityReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows) rows.push_back({{"degree", row.degree}, {"error", row.error}});
  return {{"norm", r.norm_id}, {"r", r.r}, {"dilation_error", r.dilation_error}, {"rows", std::move(rows)}};
}

// Shortest round-trip decimal with '.' separator, independent of locale.
inline std::string number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

// RFC 4180: CRLF line endings, fields quoted when they contain separators or quotes.
class Csv {
 public:
  explicit Csv(std::vector<std::string> header) { row(std::move(header)); }

  void row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out_ << ',';
      out_ << quote(fields[i]);
    }
    out_ << "\r\n";
  }

  std::string str() const { return out_.str(); }

 private:
  static std::string quote(const std::string& f) {
    if (f.find_first_of(",\"\r\n") == std::string::npos) return f;
    std::string q = "\"";
    for (char c : f) {
      if (c == '"') q += '"';
      q += c;
    }
    return q + '"';
  }

  std::ostringstream out_;
};

inline std::string convergence_csv(const ConvergenceReport& r) {
  Csv csv({"r", "norm_fr", "norm_diff"});
  for (const auto& row : r.rows) csv.row({number(row.r), number(row.norm_fr), number(row.norm_diff)});
  return csv.str();
}

inline std::string density_csv(const DensityReport& r) {
  Csv csv({"degree", "error"});
  for (const auto& row : r.rows) csv.row({std::to_string(row.degree), number(row.error)});
  return csv.str();
}

// Static scatter plot with a log10 y axis. Non-positive values are drawn on the
// bottom edge so that every row still yields exactly one marker.
inline std::string svg_plot(const std::vector<std::pair<double, double>>& points, const std::string& title,
                            const std::string& x_label, const std::string& y_label) {
  constexpr double W = 640, H = 420, L = 70, R = 20, T = 40, B = 50;
  double xmin = 0, xmax = 1, ymin = -1, ymax = 0;
  std::vector<double> logs;
  for (const auto& [x, y] : points)
    if (y > 0 && std::isfinite(y)) logs.push_back(std::log10(y));
  if (!points.empty()) {
    xmin = xmax = points.front().first;
    for (const auto& [x, y] : points) xmin = std::min(xmin, x), xmax = std::max(xmax, x);
    if (xmax == xmin) xmin -= 0.5, xmax += 0.5;
  }
  if (!logs.empty()) {
    ymin = std::floor(*std::min_element(logs.begin(), logs.end()));
    ymax = std::ceil(*std::max_element(logs.begin(), logs.end()));
    if (ymax == ymin) ymax = ymin + 1;
  }
  auto sx = [&](double x) { return L + (x - xmin) / (xmax - xmin) * (W - L - R); };
  auto sy = [&](double ly) { return H - B - (ly - ymin) / (ymax - ymin) * (H - T - B); };

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" << title << "</text>\n";
  s << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  s << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  for (double e = ymin; e <= ymax; e += 1) {
    s << "<text x=\"" << L - 6 << "\" y=\"" << sy(e) + 4 << "\" text-anchor=\"end\" font-size=\"10\">1e"
      << static_cast<int>(e) << "</text>\n";
  }
  s << "<text x=\"" << L << "\" y=\"" << H - B + 16 << "\" font-size=\"10\">" << number(xmin) << "</text>\n";
  s << "<text x=\"" << W - R << "\" y=\"" << H - B + 16 << "\" text-anchor=\"end\" font-size=\"10\">" << number(xmax)
    << "</text>\n";
  s << "<text x=\"" << W / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\" font-size=\"12\">" << x_label
    << "</text>\n";
  s << "<text x=\"16\" y=\"" << H / 2 << "\" transform=\"rotate(-90 16 " << H / 2
    << ")\" text-anchor=\"middle\" font-size=\"12\">" << y_label << "</text>\n";
  std::string path;
  for (const auto& [x, y] : points) {
    const double ly = (y > 0 && std::isfinite(y)) ? std::log10(y) : ymin;
    const double px = sx(x), py = sy(ly);
    path += (path.empty() ? "M" : " L") + number(px) + " " + number(py);
    s << "<circle cx=\"" << number(px) << "\" cy=\"" << number(py) << "\" r=\"3\" fill=\"steelblue\"/>\n";
  }
  if (!path.empty()) s << "<path d=\"" << path << "\" fill=\"none\" stroke=\"steelblue\"/>\n";
  s << "</svg>\n";
  return s.str();
}

inline std::string plot(const ConvergenceReport& r) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& row : r.rows) pts.emplace_back(row.r, row.norm_diff);
  return svg_plot(pts, "dilation error", "r", "||f_r - f||");
}

inline std::string plot(const DensityReport& r) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& row : r.rows) pts.emplace_back(static_cast<double>(row.degree), row.error);
  return svg_plot(pts, "Taylor approximation of f_r", "degree", "||p_d - f||");
}

// Writes to a sibling temporary file and renames it into place.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write to " + tmp.string() + " failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw std::runtime_error("cannot move " + tmp.string() + " into place: " + ec.message());
  }
}

}  // namespace bergman::report
