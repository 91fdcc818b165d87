#include "jumplab/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace jumplab {

std::string format_g17(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

void append_escaped(std::string& out, const std::string& s) {
  out.push_back('"');
  for (char ch : s) {
    switch (ch) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(ch) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", ch);
          out += buf;
        } else {
          out.push_back(ch);
        }
    }
  }
  out.push_back('"');
}

void dump_node(const nlohmann::ordered_json& j, std::string& out, int indent, int depth) {
  const std::string pad(static_cast<std::size_t>(indent) * (depth + 1), ' ');
  const std::string close_pad(static_cast<std::size_t>(indent) * depth, ' ');
  switch (j.type()) {
    case nlohmann::ordered_json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& [key, value] : j.items()) {
        if (!first) out += ",\n";
        first = false;
        out += pad;
        append_escaped(out, key);
        out += ": ";
        dump_node(value, out, indent, depth + 1);
      }
      out += "\n" + close_pad + "}";
      return;
    }
    case nlohmann::ordered_json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      bool first = true;
      for (const auto& value : j) {
        if (!first) out += ",\n";
        first = false;
        out += pad;
        dump_node(value, out, indent, depth + 1);
      }
      out += "\n" + close_pad + "]";
      return;
    }
    case nlohmann::ordered_json::value_t::string:
      append_escaped(out, j.get_ref<const std::string&>());
      return;
    case nlohmann::ordered_json::value_t::boolean:
      out += j.get<bool>() ? "true" : "false";
      return;
    case nlohmann::ordered_json::value_t::number_integer:
      out += std::to_string(j.get<std::int64_t>());
      return;
    case nlohmann::ordered_json::value_t::number_unsigned:
      out += std::to_string(j.get<std::uint64_t>());
      return;
    case nlohmann::ordered_json::value_t::number_float: {
      const double v = j.get<double>();
      if (!std::isfinite(v)) {
        out += "null";
        return;
      }
      out += format_g17(v);
      return;
    }
    default:
      out += "null";
      return;
  }
}

}  // namespace

std::string dump_json_17(const nlohmann::ordered_json& j, int indent) {
  std::string out;
  dump_node(j, out, indent, 0);
  out.push_back('\n');
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw ConfigError("failed writing '" + path + "'");
}

void write_tv_csv(const std::string& path, const TvCurve& curve) {
  std::string text = "t,tv,stderr\n";
  for (const TvPoint& p : curve.points)
    text += format_g17(p.t) + "," + format_g17(p.tv) + "," + format_g17(p.noise_floor) + "\n";
  write_text_file(path, text);
}

void write_tail_csv(const std::string& path, const std::vector<TailPoint>& tail) {
  std::string text = "t,tail,n\n";
  for (const TailPoint& p : tail)
    text += format_g17(p.t) + "," + format_g17(p.tail) + "," + std::to_string(p.n) + "\n";
  write_text_file(path, text);
}

void write_law_csv(const std::string& path, const EmpiricalLaw& law) {
  const std::size_t dim = law.binning.cells.size();
  std::string text;
  for (std::size_t a = 0; a < dim; ++a) text += "x" + std::to_string(a) + ",";
  text += "mass\n";
  for (std::size_t c = 0; c < law.binning.cell_count(); ++c) {
    const Vec center = law.binning.cell_center(c);
    for (int a = 0; a < center.size(); ++a) text += format_g17(center[a]) + ",";
    text += format_g17(law.masses[c]) + "\n";
  }
  write_text_file(path, text);
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
  const int dim = static_cast<int>(traj.x0.size());
  std::string text = "t";
  for (int a = 0; a < dim; ++a) text += ",x" + std::to_string(a);
  text += "\n";
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    text += format_g17(traj.times[i]);
    for (int a = 0; a < dim; ++a) text += "," + format_g17(traj.states[i][a]);
    text += "\n";
  }
  write_text_file(path, text);
}

void write_terminals_csv(const std::string& path, const std::vector<Vec>& terminals) {
  const int dim = terminals.empty() ? 0 : static_cast<int>(terminals.front().size());
  std::string text = "path";
  for (int a = 0; a < dim; ++a) text += ",x" + std::to_string(a);
  text += "\n";
  for (std::size_t i = 0; i < terminals.size(); ++i) {
    text += std::to_string(i);
    for (int a = 0; a < dim; ++a) text += "," + format_g17(terminals[i][a]);
    text += "\n";
  }
  write_text_file(path, text);
}

nlohmann::ordered_json law_summary_json(const EmpiricalLaw& law) {
  nlohmann::ordered_json j;
  j["cells"] = law.binning.cell_count();
  j["sample_count"] = law.sample_count;
  j["out_of_range_mass"] = law.out_of_range_mass();
  nlohmann::ordered_json mean = nlohmann::ordered_json::array();
  nlohmann::ordered_json variance = nlohmann::ordered_json::array();
  for (std::size_t a = 0; a < law.binning.cells.size(); ++a) {
    mean.push_back(law_mean(law, static_cast<int>(a)));
    variance.push_back(law_variance(law, static_cast<int>(a)));
  }
  j["mean"] = mean;
  j["variance"] = variance;
  return j;
}

nlohmann::ordered_json tv_curve_json(const TvCurve& curve) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json points = nlohmann::ordered_json::array();
  for (const TvPoint& p : curve.points) {
    nlohmann::ordered_json row;
    row["t"] = p.t;
    row["tv"] = p.tv;
    row["noise_floor"] = p.noise_floor;
    points.push_back(row);
  }
  j["points"] = points;
  j["resolvable"] = curve.resolvable;
  j["C1_emp"] = curve.C1_emp;
  j["C2_emp"] = curve.C2_emp;
  j["fit_times"] = curve.fit_times;
  nlohmann::ordered_json fit;
  fit["intercept"] = curve.fit.intercept;
  fit["slope"] = curve.fit.slope;
  fit["se_slope"] = curve.fit.se_slope;
  fit["p_slope"] = curve.fit.p_slope;
  fit["n_points"] = curve.fit.n_points;
  j["fit"] = fit;
  return j;
}

}  // namespace jumplab
