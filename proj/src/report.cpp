#include "netctrl/report.hpp"

#include <sstream>

namespace netctrl {

using nlohmann::json;

json json_of_complex(const Complex& z) { return json::array({z.real(), z.imag()}); }

json json_of_matrix(const CMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(json_of_complex(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

json report_to_json(const AnalysisReport& report,
                    const std::optional<MultiRatePattern>& multirate) {
  json out;
  out["verdict"] = verdict_name(report.verdict);
  out["criterion"] = report.criterion;
  out["evidence"] = report.evidence;
  json margins = json::array();
  for (const Margin& m : report.margins)
    margins.push_back({{"check", m.check}, {"margin", m.margin}});
  out["margins"] = std::move(margins);
  out["flags"] = report.flags;
  if (multirate)
    out["multirate"] = {{"kind", multirate_kind_name(multirate->kind)}, {"l", multirate->l}};
  return out;
}

std::string report_to_text(const AnalysisReport& report,
                           const std::optional<MultiRatePattern>& multirate) {
  std::ostringstream os;
  os << "verdict:   " << verdict_name(report.verdict) << "\n";
  os << "criterion: " << report.criterion << "\n";
  if (multirate)
    os << "multirate: " << multirate_kind_name(multirate->kind) << " l=" << multirate->l << "\n";
  if (!report.flags.empty()) {
    os << "flags:\n";
    for (const std::string& f : report.flags) os << "  - " << f << "\n";
  }
  if (!report.margins.empty()) {
    os << "margins:\n";
    for (const Margin& m : report.margins) os << "  " << m.check << ": " << m.margin << "\n";
  }
  os << "evidence:  " << report.evidence.dump() << "\n";
  return os.str();
}

json sampled_to_json(const SampledSystem& ss) {
  json out;
  out["h"] = ss.h;
  out["node_transition"] = json_of_matrix(ss.node_transition);
  out["coupling_hold"] = json_of_matrix(ss.coupling_hold);
  out["input_hold"] = json_of_matrix(ss.input_hold);
  out["state_transition"] = json_of_matrix(ss.state_transition);
  out["input_map"] = json_of_matrix(ss.input_map);
  return out;
}

namespace {

void print_matrix(std::ostringstream& os, const char* name, const CMatrix& m) {
  os << name << " (" << m.rows() << "x" << m.cols() << "):\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    os << "  ";
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const Complex& z = m(i, j);
      os << z.real();
      if (std::abs(z.imag()) > 1e-14) os << (z.imag() >= 0 ? "+" : "-") << std::abs(z.imag()) << "j";
      if (j + 1 < m.cols()) os << " ";
    }
    os << "\n";
  }
}

}  // namespace

std::string sampled_to_text(const SampledSystem& ss) {
  std::ostringstream os;
  os << "h: " << ss.h << "\n";
  print_matrix(os, "node_transition", ss.node_transition);
  print_matrix(os, "coupling_hold", ss.coupling_hold);
  print_matrix(os, "input_hold", ss.input_hold);
  print_matrix(os, "state_transition", ss.state_transition);
  print_matrix(os, "input_map", ss.input_map);
  return os.str();
}

}  // namespace netctrl
