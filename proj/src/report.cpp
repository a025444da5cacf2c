#include "scc/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "scc/kvfile.hpp"

namespace scc {

namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string printf_str(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
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

double nice_step(double span, int target_ticks) {
  const double raw = span / target_ticks;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0}) {
    if (raw <= m * mag) return m * mag;
  }
  return 10.0 * mag;
}

}  // namespace

void write_atomic(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::pair<double, int> max_ratio(const std::vector<int>& years, const std::vector<double>& ratio) {
  double best = NAN;
  int year = 0;
  for (std::size_t i = 0; i < ratio.size(); ++i) {
    if (std::isnan(ratio[i])) continue;
    if (std::isnan(best) || ratio[i] > best) {
      best = ratio[i];
      year = years[i];
    }
  }
  return {best, year};
}

std::string format_summary(const RunSummary& s) {
  std::ostringstream out;
  out << "name = \"" << s.name << "\"\n"
      << "w_star = " << format_double(s.w_star) << '\n'
      << "max_scc_over_smac = " << format_double(s.max_ratio) << '\n'
      << "year_of_max = " << s.year_of_max << '\n'
      << "converged = " << (s.converged ? 1 : 0) << '\n'
      << "kkt_residual = " << format_double(s.kkt_residual) << '\n'
      << "max_violation = " << format_double(s.max_violation) << '\n'
      << "outer_iterations = " << s.outer_iterations << '\n';
  return out.str();
}

RunSummary parse_summary(std::string_view text, std::string_view source) {
  RunSummary s;
  auto num = [&](const KvEntry& e) {
    if (const auto* v = std::get_if<double>(&e.value)) return *v;
    throw KvParseError(std::string(source), e.line, "'" + e.key + "' expects a number");
  };
  for (const KvEntry& e : parse_kv(text, source)) {
    if (e.key == "name") {
      if (const auto* v = std::get_if<std::string>(&e.value)) s.name = *v;
    } else if (e.key == "w_star") {
      s.w_star = num(e);
    } else if (e.key == "max_scc_over_smac") {
      s.max_ratio = num(e);
    } else if (e.key == "year_of_max") {
      s.year_of_max = static_cast<int>(num(e));
    } else if (e.key == "converged") {
      s.converged = num(e) != 0.0;
    } else if (e.key == "kkt_residual") {
      s.kkt_residual = num(e);
    } else if (e.key == "max_violation") {
      s.max_violation = num(e);
    } else if (e.key == "outer_iterations") {
      s.outer_iterations = static_cast<int>(num(e));
    }
  }
  return s;
}

RunArtifacts run_scenario(const ScenarioConfig& cfg, const fs::path& output_root, const OptimizerOptions& opts) {
  const Params p = scenario_params(cfg);
  const ScenarioConstraints sc = scenario_constraints(cfg);
  const fs::path dir = output_root / cfg.output_dir;
  fs::create_directories(dir);

  std::ostringstream log;
  log << "# scenario " << cfg.name << ", t_max " << p.t_max << '\n';
  log << "# outer W kkt_residual max_violation penalty\n";
  OptimizerOptions o = opts;
  o.log = &log;

  RunArtifacts art;
  art.result = optimize(p, sc, o);
  const OptResult& r = art.result;
  log << "# converged " << (r.converged ? 1 : 0) << ", inner iterations " << r.iterations
      << ", kkt_residual " << format_double(r.kkt_residual) << '\n';

  const auto n = static_cast<std::size_t>(p.t_max);
  if (r.converged) {
    art.marginals = compute_marginals(p, sc, r);
  } else {
    art.marginals.eeq_m.assign(n, NAN);
    art.marginals.cc_m.assign(n, NAN);
    art.marginals.scc.assign(n, NAN);
    art.marginals.smac = smac(r.controls, p);
  }

  std::vector<int> years(n);
  for (std::size_t i = 0; i < n; ++i) years[i] = period_year(static_cast<int>(i) + 1);

  std::ostringstream traj;
  write_trajectory_csv(traj, r.trajectory, r.controls);
  std::ostringstream marg;
  write_marginals_csv(marg, art.marginals);
  const std::string svg = emit_plot({{"SCC", years, art.marginals.scc}, {"SMAC", years, art.marginals.smac}},
                                    cfg.name, cfg.plot_window);

  RunSummary& s = art.summary;
  s.name = cfg.name;
  s.w_star = r.w_star;
  std::tie(s.max_ratio, s.year_of_max) = max_ratio(years, art.marginals.ratio());
  s.converged = r.converged;
  s.kkt_residual = r.kkt_residual;
  s.max_violation = r.max_violation;
  s.outer_iterations = r.outer_iterations;

  art.trajectory_csv = dir / "trajectory.csv";
  art.marginals_csv = dir / "marginals.csv";
  art.plot_svg = dir / "plot.svg";
  art.convergence_log = dir / "convergence.log";
  art.summary_file = dir / "summary.txt";
  write_atomic(art.trajectory_csv, traj.str());
  write_atomic(art.marginals_csv, marg.str());
  write_atomic(art.plot_svg, svg);
  write_atomic(art.convergence_log, log.str());
  write_atomic(art.summary_file, format_summary(s));
  return art;
}

RunData load_run(const fs::path& dir) {
  RunData run;
  run.name = dir.filename().string();
  if (run.name.empty()) run.name = dir.parent_path().filename().string();
  const fs::path summary = dir / "summary.txt";
  if (fs::exists(summary)) {
    const RunSummary s = parse_summary(read_file(summary), summary.string());
    if (!s.name.empty()) run.name = s.name;
  }
  std::istringstream in(read_file(dir / "marginals.csv"));
  std::string line;
  std::getline(in, line);
  if (line.rfind("year,eeq_m,cc_m,scc,smac", 0) != 0) {
    throw std::runtime_error((dir / "marginals.csv").string() + ": unexpected header");
  }
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> cols;
    std::istringstream row(line);
    std::string cell;
    while (std::getline(row, cell, ',')) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str()) {
        throw std::runtime_error((dir / "marginals.csv").string() + ":" + std::to_string(lineno) + ": bad number");
      }
      cols.push_back(v);
    }
    if (cols.size() != 6) {
      throw std::runtime_error((dir / "marginals.csv").string() + ":" + std::to_string(lineno) +
                               ": expected 6 columns");
    }
    run.years.push_back(static_cast<int>(cols[0]));
    run.scc.push_back(cols[3]);
    run.smac.push_back(cols[4]);
    run.ratio.push_back(cols[5]);
  }
  return run;
}

CompareReport compare(const std::vector<RunData>& runs) {
  if (runs.empty()) throw std::invalid_argument("compare needs at least one run");
  CompareReport rep;

  std::map<int, std::vector<std::size_t>> rows;  // year -> row index per run (npos if absent)
  constexpr auto absent = static_cast<std::size_t>(-1);
  for (std::size_t k = 0; k < runs.size(); ++k) {
    for (std::size_t i = 0; i < runs[k].years.size(); ++i) {
      auto& slot = rows[runs[k].years[i]];
      slot.resize(runs.size(), absent);
      slot[k] = i;
    }
  }
  for (auto& [year, slot] : rows) slot.resize(runs.size(), absent);

  for (std::size_t k = 1; k < runs.size(); ++k) {
    if (runs[k].years != runs[0].years) {
      auto span = [](const RunData& r) {
        return r.years.empty() ? std::string("no years")
                               : std::to_string(r.years.front()) + "-" + std::to_string(r.years.back());
      };
      rep.warnings.push_back("horizon mismatch: " + runs[0].name + " covers " + span(runs[0]) + ", " +
                             runs[k].name + " covers " + span(runs[k]));
    }
  }

  std::ostringstream out;
  char buf[128];
  out << "  year";
  for (const auto& r : runs) {
    std::snprintf(buf, sizeof buf, " | %-36.36s", r.name.c_str());
    out << buf;
  }
  out << '\n' << "      ";
  for (std::size_t k = 0; k < runs.size(); ++k) {
    std::snprintf(buf, sizeof buf, " | %11s %11s %9s  ", "scc", "smac", "ratio");
    out << buf;
  }
  out << '\n';
  for (const auto& [year, slot] : rows) {
    std::snprintf(buf, sizeof buf, "%6d", year);
    out << buf;
    for (std::size_t k = 0; k < runs.size(); ++k) {
      if (slot[k] == absent) {
        std::snprintf(buf, sizeof buf, " | %11s %11s %9s  ", "-", "-", "-");
      } else {
        const std::size_t i = slot[k];
        const double ratio = runs[k].ratio[i];
        const bool flag = !std::isnan(ratio) && (ratio < 0.9 || ratio > 1.1);
        if (flag) ++rep.flagged;
        std::snprintf(buf, sizeof buf, " | %11.4g %11.4g %9.4f %c", runs[k].scc[i], runs[k].smac[i], ratio,
                      flag ? '*' : ' ');
      }
      out << buf;
    }
    out << '\n';
  }
  out << "max scc/smac:";
  for (const auto& r : runs) {
    const auto [best, year] = max_ratio(r.years, r.ratio);
    rep.max_ratio.push_back(best);
    std::snprintf(buf, sizeof buf, " %s %.4f (%d);", r.name.c_str(), best, year);
    out << buf;
  }
  out << "\n* ratio outside [0.9, 1.1]: " << rep.flagged << " cells\n";
  rep.table = out.str();
  return rep;
}

std::string emit_plot(const std::vector<PlotSeries>& series, const std::string& title,
                      std::optional<std::pair<int, int>> window) {
  if (series.empty()) throw std::invalid_argument("emit_plot needs at least one series");
  constexpr double width = 720, height = 440;
  constexpr double left = 80, right = 20, top = 40, bottom = 50;
  constexpr const char* colors[] = {"#c0392b", "#1f5fa8", "#2e8b57", "#8e44ad"};

  auto visible = [&](int year, double v) {
    if (!std::isfinite(v)) return false;
    return !window || (year >= window->first && year <= window->second);
  };

  double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
  double y_lo = 0.0, y_hi = 0.0;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.years.size() && i < s.values.size(); ++i) {
      x_lo = std::min(x_lo, static_cast<double>(s.years[i]));
      x_hi = std::max(x_hi, static_cast<double>(s.years[i]));
      if (!visible(s.years[i], s.values[i])) continue;
      y_lo = std::min(y_lo, s.values[i]);
      y_hi = std::max(y_hi, s.values[i]);
    }
  }
  if (window) {
    x_lo = window->first;
    x_hi = window->second;
  }
  if (!std::isfinite(x_lo)) x_lo = 2015, x_hi = 2065;
  if (x_hi <= x_lo) x_hi = x_lo + 5;
  if (y_hi <= y_lo) y_hi = y_lo + 1.0;

  const double y_step = nice_step(y_hi - y_lo, 5);
  y_lo = std::floor(y_lo / y_step) * y_step;
  y_hi = std::ceil(y_hi / y_step) * y_step;
  const double x_step = std::max(5.0, nice_step(x_hi - x_lo, 6));

  const double plot_w = width - left - right, plot_h = height - top - bottom;
  auto px = [&](double x) { return left + (x - x_lo) / (x_hi - x_lo) * plot_w; };
  auto py = [&](double y) { return top + (y_hi - y) / (y_hi - y_lo) * plot_h; };
  auto f2 = [](double v) { return printf_str("%.2f", v); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << f2(width / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">"
      << xml_escape(title) << "</text>\n";

  svg << "<g stroke=\"#dddddd\" stroke-width=\"1\">\n";
  for (double y = y_lo; y <= y_hi + 0.5 * y_step; y += y_step) {
    svg << "<line x1=\"" << f2(left) << "\" y1=\"" << f2(py(y)) << "\" x2=\"" << f2(left + plot_w) << "\" y2=\""
        << f2(py(y)) << "\"/>\n";
  }
  svg << "</g>\n";
  svg << "<rect x=\"" << f2(left) << "\" y=\"" << f2(top) << "\" width=\"" << f2(plot_w) << "\" height=\""
      << f2(plot_h) << "\" fill=\"none\" stroke=\"black\"/>\n";

  svg << "<g text-anchor=\"end\">\n";
  for (double y = y_lo; y <= y_hi + 0.5 * y_step; y += y_step) {
    svg << "<text x=\"" << f2(left - 6) << "\" y=\"" << f2(py(y) + 4) << "\">" << printf_str("%g", y)
        << "</text>\n";
  }
  svg << "</g>\n<g text-anchor=\"middle\">\n";
  for (double x = std::ceil(x_lo / x_step) * x_step; x <= x_hi; x += x_step) {
    svg << "<line x1=\"" << f2(px(x)) << "\" y1=\"" << f2(top + plot_h) << "\" x2=\"" << f2(px(x))
        << "\" y2=\"" << f2(top + plot_h + 5) << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << f2(px(x)) << "\" y=\"" << f2(top + plot_h + 18) << "\">" << printf_str("%g", x)
        << "</text>\n";
  }
  svg << "</g>\n";
  svg << "<text x=\"" << f2(left + plot_w / 2) << "\" y=\"" << f2(height - 10)
      << "\" text-anchor=\"middle\">year</text>\n";
  svg << "<text x=\"18\" y=\"" << f2(top + plot_h / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << f2(top + plot_h / 2) << ")\">USD/tCO2</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = colors[k % std::size(colors)];
    std::vector<std::string> segments;
    std::string cur;
    for (std::size_t i = 0; i < s.years.size() && i < s.values.size(); ++i) {
      if (!visible(s.years[i], s.values[i])) {
        if (!cur.empty()) segments.push_back(std::move(cur));
        cur.clear();
        continue;
      }
      if (!cur.empty()) cur += ' ';
      cur += f2(px(s.years[i])) + "," + f2(py(s.values[i]));
    }
    if (!cur.empty()) segments.push_back(std::move(cur));
    for (const auto& seg : segments) {
      svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"" << seg << "\"/>\n";
    }
    const double ly = top + 16 + 18 * static_cast<double>(k);
    svg << "<line x1=\"" << f2(left + 12) << "\" y1=\"" << f2(ly - 4) << "\" x2=\"" << f2(left + 36)
        << "\" y2=\"" << f2(ly - 4) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << f2(left + 42) << "\" y=\"" << f2(ly) << "\">" << xml_escape(s.label) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace scc
