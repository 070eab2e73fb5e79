#include "netctrl/multirate.hpp"

#include <algorithm>
#include <cmath>

#include "netctrl/oracle.hpp"
#include "netctrl/report.hpp"

namespace netctrl {

using nlohmann::json;

namespace {

std::string fmt_complex(const Complex& z) {
  std::string out = std::to_string(z.real());
  if (std::abs(z.imag()) > 1e-12) out += (z.imag() >= 0 ? "+" : "-") + std::to_string(std::abs(z.imag())) + "j";
  return out;
}

bool phi_nonsingular(const CMatrix& phi, const Tolerance& tol) {
  const double radius = cluster_radius(phi, tol);
  for (const Complex& z : eigenvalues(phi))
    if (std::abs(z) <= radius) return false;
  return true;
}

}  // namespace

LiftedSystem lift_tms(const MultiRateSpec& spec) {
  if (spec.kind != MultiRateKind::TMS) throw NotApplicable("lift_tms: spec kind is not TMS");
  if (spec.l < 1) throw ValidationError("lift_tms: l must be >= 1");
  LiftedSystem out;
  out.kind = MultiRateKind::TMS;
  out.l = spec.l;
  out.period = spec.l * spec.base.h;
  out.base_sampled = discretize(spec.base);
  const CMatrix& phi_s = out.base_sampled.state_transition;

  if (spec.l == 1) {
    out.phi = phi_s;
    out.psi = out.base_sampled.input_map;
    return out;
  }

  CMatrix power = phi_s;
  for (int c = 2; c <= spec.l; ++c) power = power * phi_s;
  out.phi = power;

  // Geometric sum I + Phi + ... + Phi^{l-1} by Horner accumulation.
  const Eigen::Index d = phi_s.rows();
  CMatrix sum = CMatrix::Identity(d, d);
  for (int c = 2; c <= spec.l; ++c) sum = sum * phi_s + CMatrix::Identity(d, d);
  out.psi = sum * out.base_sampled.input_map;
  return out;
}

LiftedSystem lift_cms(const MultiRateSpec& spec) {
  if (spec.kind != MultiRateKind::CMS) throw NotApplicable("lift_cms: spec kind is not CMS");
  if (spec.l < 1) throw ValidationError("lift_cms: l must be >= 1");
  LiftedSystem out;
  out.kind = MultiRateKind::CMS;
  out.l = spec.l;
  out.period = spec.l * spec.base.h;
  out.base_sampled = discretize(spec.base);

  if (spec.l == 1) {
    out.phi = out.base_sampled.state_transition;
    out.psi = out.base_sampled.input_map;
    return out;
  }

  NetworkedSystem slow = spec.base;
  slow.h = spec.l * spec.base.h;
  const SampledSystem at_lh = discretize(slow);
  out.phi = at_lh.state_transition;

  // psi = [Delta (x) e^{A(l-1)h} B(h), ..., Delta (x) e^{Ah} B(h), Delta (x) B(h)]
  const CMatrix delta = spec.base.topo.delta_matrix();
  const Eigen::Index block_cols = delta.cols() * spec.base.node.p();
  out.psi = CMatrix(out.phi.rows(), static_cast<Eigen::Index>(spec.l) * block_cols);
  CMatrix held = out.base_sampled.input_hold;  // e^{A r h} B(h), r counted from 0
  for (int r = 0; r < spec.l; ++r) {
    const Eigen::Index col = static_cast<Eigen::Index>(spec.l - 1 - r) * block_cols;
    out.psi.middleCols(col, block_cols) = kron(delta, held);
    if (r + 1 < spec.l) held = out.base_sampled.node_transition * held;
  }
  return out;
}

TmsSpectrum tms_spectrum(const SubsystemFamily& fam, int l) {
  if (l < 1) throw ValidationError("tms_spectrum: l must be >= 1");
  TmsSpectrum out;
  double max_lifted = 0;
  for (const FamilyEntry& e : fam.entries)
    for (const ClusteredEig& c : e.spectrum) {
      const Complex lifted = std::pow(c.value, l);
      out.mapping.emplace_back(c.value, lifted);
      max_lifted = std::max(max_lifted, std::abs(lifted));
    }

  // Collisions: distinct base eigenvalues landing on one lifted value.
  Tolerance tol;  // clustering radius only; callers re-derive margins themselves
  const double radius = tol.eig_cluster * (1.0 + max_lifted);
  std::vector<bool> used(out.mapping.size(), false);
  for (size_t i = 0; i < out.mapping.size(); ++i) {
    if (used[i]) continue;
    std::vector<int> group{static_cast<int>(i)};
    used[i] = true;
    for (size_t j = i + 1; j < out.mapping.size(); ++j)
      if (!used[j] && std::abs(out.mapping[i].second - out.mapping[j].second) <= radius) {
        group.push_back(static_cast<int>(j));
        used[j] = true;
      }
    out.collision_groups.push_back(std::move(group));
  }
  return out;
}

AnalysisReport check_tms(const MultiRateSpec& spec, const Tolerance& tol) {
  if (spec.kind != MultiRateKind::TMS) throw NotApplicable("check_tms: spec kind is not TMS");
  const SampledSystem ss = discretize(spec.base);
  const SubsystemFamily fam = decompose(ss, spec.base.topo, tol);

  AnalysisReport report;
  report.criterion = "tms_sufficient";

  // Distinct base eigenvalues of the state transition matrix.
  std::vector<Complex> values;
  for (const FamilyEntry& e : fam.entries)
    for (const ClusteredEig& c : e.spectrum) values.push_back(c.value);
  const std::vector<ClusteredEig> base_thetas =
      cluster_eigenvalues(values, cluster_radius(ss.state_transition, tol));

  // Condition (1): the geometric sum of no eigenvalue may vanish.
  const double sum_threshold = tol.eig_cluster * spec.l;
  for (const ClusteredEig& theta : base_thetas) {
    Complex sum(0, 0);
    Complex power(1, 0);
    for (int c = 0; c < spec.l; ++c) {
      sum += power;
      power *= theta.value;
    }
    const double magnitude = std::abs(sum);
    report.with_margin("geometric_sum@" + fmt_complex(theta.value),
                       sum_threshold > 0 ? magnitude / sum_threshold
                                         : std::numeric_limits<double>::infinity());
    if (magnitude <= sum_threshold) {
      report.verdict = Verdict::Inconclusive;
      report.evidence["failed_condition"] = "geometric sum of theta powers vanishes";
      report.evidence["theta"] = json_of_complex(theta.value);
      report.evidence["geometric_sum_magnitude"] = magnitude;
      report.flag("sufficient_condition_unmet");
      return report;
    }
    if (magnitude <= 10 * sum_threshold) report.flag("fragile_geometric_sum@" + fmt_complex(theta.value));
  }

  // Condition (2): lifted eigenspaces (direct sums where powers collide)
  // against the base input map.
  const double lifted_radius =
      tol.eig_cluster * (1.0 + std::pow(spectral_radius(ss.state_transition), spec.l));
  std::vector<bool> used(base_thetas.size(), false);
  for (size_t i = 0; i < base_thetas.size(); ++i) {
    if (used[i]) continue;
    const Complex lifted_i = std::pow(base_thetas[i].value, spec.l);
    std::vector<size_t> group{i};
    used[i] = true;
    for (size_t j = i + 1; j < base_thetas.size(); ++j)
      if (!used[j] && std::abs(std::pow(base_thetas[j].value, spec.l) - lifted_i) <= lifted_radius) {
        group.push_back(j);
        used[j] = true;
      }

    std::vector<CMatrix> basis;
    double row_scale = 0;
    for (size_t idx : group) {
      const EigenspaceBasis b = eigenspace_phis(fam, base_thetas[idx].value, tol);
      basis.insert(basis.end(), b.basis.begin(), b.basis.end());
    }
    const Eigen::Index k = static_cast<Eigen::Index>(basis.size());
    CMatrix g(k, ss.input_map.cols());
    for (Eigen::Index r = 0; r < k; ++r) {
      g.row(r) = basis[static_cast<size_t>(r)] * ss.input_map;
      row_scale = std::max(row_scale, basis[static_cast<size_t>(r)].norm());
    }
    const RankInfo info = rank_info(g, tol, row_scale * ss.input_map.norm());
    report.with_margin("lifted_annihilation@" + fmt_complex(lifted_i), info.margin());
    if (info.rank != static_cast<int>(k)) {
      report.verdict = Verdict::Inconclusive;
      report.evidence["failed_condition"] = "lifted eigenspace annihilates the input map";
      report.evidence["theta"] = json_of_complex(base_thetas[i].value);
      report.evidence["theta_lifted"] = json_of_complex(lifted_i);
      report.flag("sufficient_condition_unmet");
      return report;
    }
  }

  report.verdict = Verdict::Controllable;
  report.evidence["conditions"] = {"no geometric sum of eigenvalue powers vanishes",
                                   "lifted eigenspaces clear the input map"};
  return report;
}

AnalysisReport check_cms(const MultiRateSpec& spec, const Tolerance& tol) {
  if (spec.kind != MultiRateKind::CMS) throw NotApplicable("check_cms: spec kind is not CMS");
  const LiftedSystem lifted = lift_cms(spec);

  NetworkedSystem slow = spec.base;
  slow.h = spec.l * spec.base.h;
  const SampledSystem ss_l = discretize(slow);
  const SubsystemFamily fam = decompose(ss_l, spec.base.topo, tol);

  AnalysisReport report = eigenspace_annihilation_sweep(fam, lifted.psi, tol);
  report.criterion = "cms_sufficient";
  report.evidence["input_block_order"] =
      "left to right: Delta (x) e^{A(l-1)h} B(h) down to Delta (x) B(h)";
  if (report.verdict == Verdict::Controllable && !phi_nonsingular(lifted.phi, tol))
    report.flag("reachability_based");

  const auto base_path = is_pathological(spec.base.node.A, spec.base.h, tol);
  const auto lifted_path = is_pathological(spec.base.node.A, lifted.period, tol);
  if (base_path.first) report.flag("pathological_node_sampling_base_period");
  if (lifted_path.first) report.flag("pathological_node_sampling_lifted_period");
  return report;
}

AnalysisReport analyze_multirate(const MultiRateSpec& spec, const Tolerance& tol) {
  spec.base.validate();
  tol.validate();
  if (spec.l < 1) throw ValidationError("multirate: l must be >= 1");

  AnalysisReport report =
      spec.kind == MultiRateKind::TMS ? check_tms(spec, tol) : check_cms(spec, tol);
  const LiftedSystem lifted =
      spec.kind == MultiRateKind::TMS ? lift_tms(spec) : lift_cms(spec);

  if (report.verdict != Verdict::Inconclusive) {
    const oracle::OracleVerdict ov = oracle::kalman_rank(lifted.phi, lifted.psi, tol);
    if ((report.verdict == Verdict::Controllable) != ov.reachable)
      throw InternalInconsistency("multirate criterion \"" + report.criterion + "\" says " +
                                  verdict_name(report.verdict) +
                                  " but the oracle disagrees on the lifted pair");
  } else {
    const oracle::OracleVerdict ov = oracle::kalman_rank(lifted.phi, lifted.psi, tol);
    std::vector<std::string> carried = report.flags;
    nlohmann::json prior_evidence = report.evidence;
    report = AnalysisReport{};
    report.criterion = spec.kind == MultiRateKind::TMS ? "tms_oracle" : "cms_oracle";
    report.verdict = ov.reachable ? Verdict::Controllable : Verdict::Uncontrollable;
    report.evidence["rank"] = ov.rank;
    report.evidence["dim"] = ov.dim;
    report.evidence["controllable_to_origin"] = ov.controllable_to_origin;
    report.evidence["sufficient_check"] = std::move(prior_evidence);
    for (const std::string& f : carried) report.flag(f);
    if (!phi_nonsingular(lifted.phi, tol)) report.flag("reachability_based");
  }

  report.evidence["kind"] = multirate_kind_name(spec.kind);
  report.evidence["l"] = spec.l;
  report.evidence["period"] = lifted.period;
  return report;
}

}  // namespace netctrl
