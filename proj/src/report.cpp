/* Copyright 2026 The dcrab Authors. All Rights Reserved.
Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at
    http://www.apache.org/licenses/LICENSE-2.0
Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "dcrab/harness.hpp"

namespace dcrab {

namespace {

constexpr const char* kColumns[] = {"swept_value",     "p",
                                    "p_std",           "effort",
                                    "effort_logstd",   "n_trials",
                                    "mean_infidelity", "infidelity_logstd",
                                    "mean_max_abs",    "max_abs_std"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream in(line);
  std::string cell;
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double to_double(const std::string& text, std::size_t line) {
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size())
    throw std::runtime_error("csv line " + std::to_string(line) + ": bad number '" + text + "'");
  return v;
}

std::string escape_xml(const std::string& text) {
  std::string out;
  for (const char c : text) {
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

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

struct Point {
  double x, y, lo, hi;
};

}  // namespace

void write_csv(std::ostream& out, const SweepTable& table) {
  for (std::size_t c = 0; c < std::size(kColumns); ++c) out << (c ? "," : "") << kColumns[c];
  out << '\n';
  for (const auto& r : table.rows)
    out << num(r.swept_value) << ',' << num(r.p) << ',' << num(r.p_std) << ',' << num(r.effort)
        << ',' << num(r.effort_logstd) << ',' << r.n_trials << ',' << num(r.mean_infidelity) << ','
        << num(r.infidelity_logstd) << ',' << num(r.mean_max_abs) << ',' << num(r.max_abs_std)
        << '\n';
}

void emit_csv(const SweepTable& table, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_csv(out, table);
  out.flush();
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

SweepTable parse_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("csv: missing header");
  const auto header = split(line);
  std::map<std::string, std::size_t> index;
  for (std::size_t c = 0; c < header.size(); ++c) index[header[c]] = c;
  for (std::size_t c = 0; c < 6; ++c)
    if (!index.count(kColumns[c]))
      throw std::runtime_error(std::string("csv: missing column ") + kColumns[c]);

  SweepTable table;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != header.size())
      throw std::runtime_error("csv line " + std::to_string(line_no) + ": wrong field count");
    auto get = [&](const char* name, double fallback) {
      const auto it = index.find(name);
      return it == index.end() ? fallback : to_double(cells[it->second], line_no);
    };
    SweepRow r;
    r.swept_value = get("swept_value", 0.0);
    r.p = get("p", 0.0);
    r.p_std = get("p_std", 0.0);
    r.effort = get("effort", 0.0);
    r.effort_logstd = get("effort_logstd", 0.0);
    const double n = get("n_trials", 0.0);
    if (n < 0.0 || n != std::floor(n))
      throw std::runtime_error("csv line " + std::to_string(line_no) + ": bad n_trials");
    r.n_trials = static_cast<std::size_t>(n);
    r.mean_infidelity = get("mean_infidelity", 0.0);
    r.infidelity_logstd = get("infidelity_logstd", 0.0);
    r.mean_max_abs = get("mean_max_abs", 0.0);
    r.max_abs_std = get("max_abs_std", 0.0);
    table.rows.push_back(r);
  }
  return table;
}

SweepTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return parse_csv(in);
}

std::string render_plot(const SweepTable& table, const PlotOptions& options) {
  if (table.rows.empty()) throw std::invalid_argument("cannot plot an empty table");
  const bool log_y = options.log_y.value_or(options.column == PlotColumn::effort ||
                                            options.column == PlotColumn::mean_infidelity);

  std::vector<Point> points;
  for (const auto& r : table.rows) {
    double y = 0.0, lo = 0.0, hi = 0.0;
    switch (options.column) {
      case PlotColumn::p:
        y = r.p, lo = r.p - r.p_std, hi = r.p + r.p_std;
        break;
      case PlotColumn::effort:
        y = r.effort, lo = y / std::pow(10.0, r.effort_logstd), hi = y * std::pow(10.0, r.effort_logstd);
        break;
      case PlotColumn::mean_infidelity:
        y = r.mean_infidelity, lo = y / std::pow(10.0, r.infidelity_logstd),
        hi = y * std::pow(10.0, r.infidelity_logstd);
        break;
      case PlotColumn::mean_max_abs:
        y = r.mean_max_abs, lo = y - r.max_abs_std, hi = y + r.max_abs_std;
        break;
    }
    if (!std::isfinite(y) || (log_y && !(y > 0.0))) continue;
    if (!log_y) lo = std::max(lo, options.column == PlotColumn::p ? 0.0 : lo);
    if (options.column == PlotColumn::p) hi = std::min(hi, 1.0);
    points.push_back({r.swept_value, y, lo, hi});
  }

  double x0 = table.rows.front().swept_value, x1 = table.rows.back().swept_value;
  for (const auto& r : table.rows) x0 = std::min(x0, r.swept_value), x1 = std::max(x1, r.swept_value);
  if (x1 == x0) x0 -= 1.0, x1 += 1.0;
  const double pad = 0.05 * (x1 - x0);
  x0 -= pad, x1 += pad;

  double y0 = 0.0, y1 = 1.0;
  if (log_y) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& p : points) lo = std::min(lo, std::max(p.lo, p.y * 1e-3)), hi = std::max(hi, p.hi);
    if (options.reference && *options.reference > 0.0)
      lo = std::min(lo, *options.reference), hi = std::max(hi, *options.reference);
    if (!std::isfinite(lo)) lo = 1.0, hi = 10.0;
    y0 = std::floor(std::log10(lo));
    y1 = std::ceil(std::log10(hi));
    if (y1 <= y0) y1 = y0 + 1.0;
  } else if (options.column != PlotColumn::p) {
    y1 = 0.0;
    for (const auto& p : points) y1 = std::max(y1, p.hi);
    if (options.reference) y1 = std::max(y1, *options.reference);
    y1 = y1 > 0.0 ? 1.1 * y1 : 1.0;
  }

  constexpr double W = 640, H = 420, L = 80, R = 20, Tm = 40, B = 60;
  auto sx = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  auto sy = [&](double y) {
    const double v = log_y ? std::log10(std::max(y, std::pow(10.0, y0))) : y;
    const double c = std::clamp(v, y0, y1);
    return H - B - (c - y0) / (y1 - y0) * (H - Tm - B);
  };

  std::ostringstream s;
  s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
    << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!options.title.empty())
    s << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
      << escape_xml(options.title) << "</text>\n";
  s << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
    << "\" stroke=\"black\"/>\n"
    << "<line x1=\"" << L << "\" y1=\"" << Tm << "\" x2=\"" << L << "\" y2=\"" << H - B
    << "\" stroke=\"black\"/>\n";

  for (int i = 0; i <= 5; ++i) {
    const double xv = x0 + pad + (x1 - x0 - 2 * pad) * i / 5.0;
    s << "<line x1=\"" << sx(xv) << "\" y1=\"" << H - B << "\" x2=\"" << sx(xv) << "\" y2=\""
      << H - B + 5 << "\" stroke=\"black\"/>"
      << "<text x=\"" << sx(xv) << "\" y=\"" << H - B + 20
      << "\" text-anchor=\"middle\" font-size=\"12\">" << fmt(xv) << "</text>\n";
  }
  if (log_y) {
    for (double d = y0; d <= y1; d += 1.0)
      s << "<line x1=\"" << L - 5 << "\" y1=\"" << sy(std::pow(10.0, d)) << "\" x2=\"" << L
        << "\" y2=\"" << sy(std::pow(10.0, d)) << "\" stroke=\"black\"/>"
        << "<text x=\"" << L - 8 << "\" y=\"" << sy(std::pow(10.0, d)) + 4
        << "\" text-anchor=\"end\" font-size=\"12\">1e" << static_cast<int>(d) << "</text>\n";
  } else {
    for (int i = 0; i <= 5; ++i) {
      const double yv = y0 + (y1 - y0) * i / 5.0;
      s << "<line x1=\"" << L - 5 << "\" y1=\"" << sy(yv) << "\" x2=\"" << L << "\" y2=\""
        << sy(yv) << "\" stroke=\"black\"/>"
        << "<text x=\"" << L - 8 << "\" y=\"" << sy(yv) + 4
        << "\" text-anchor=\"end\" font-size=\"12\">" << fmt(yv) << "</text>\n";
    }
  }
  s << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 15
    << "\" text-anchor=\"middle\" font-size=\"14\">" << escape_xml(options.x_label) << "</text>\n";
  const char* y_label = "p";
  switch (options.column) {
    case PlotColumn::p: y_label = "success probability"; break;
    case PlotColumn::effort: y_label = "effort"; break;
    case PlotColumn::mean_infidelity: y_label = "infidelity"; break;
    case PlotColumn::mean_max_abs: y_label = "max |f|"; break;
  }
  s << "<text x=\"18\" y=\"" << (Tm + H - B) / 2 << "\" text-anchor=\"middle\" font-size=\"14\" "
    << "transform=\"rotate(-90 18 " << (Tm + H - B) / 2 << ")\">" << y_label << "</text>\n";

  if (options.reference)
    s << "<line x1=\"" << L << "\" y1=\"" << sy(*options.reference) << "\" x2=\"" << W - R
      << "\" y2=\"" << sy(*options.reference)
      << "\" stroke=\"black\" stroke-dasharray=\"6,4\"/>\n";

  if (points.size() > 1) {
    s << "<polyline fill=\"none\" stroke=\"#1f77b4\" points=\"";
    for (const auto& p : points) s << sx(p.x) << ',' << sy(p.y) << ' ';
    s << "\"/>\n";
  }
  for (const auto& p : points) {
    s << "<line x1=\"" << sx(p.x) << "\" y1=\"" << sy(p.lo) << "\" x2=\"" << sx(p.x) << "\" y2=\""
      << sy(p.hi) << "\" stroke=\"#1f77b4\"/>"
      << "<circle cx=\"" << sx(p.x) << "\" cy=\"" << sy(p.y)
      << "\" r=\"4\" fill=\"#1f77b4\"/>\n";
  }
  s << "</svg>\n";
  return s.str();
}

void emit_plot(const SweepTable& table, const std::filesystem::path& path,
               const PlotOptions& options) {
  const std::string svg = render_plot(table, options);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << svg;
  out.flush();
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace dcrab
