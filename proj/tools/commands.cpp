#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <ostream>

#include "quermass/contours.hpp"
#include "quermass/expansion.hpp"
#include "quermass/io.hpp"
#include "quermass/sampler.hpp"

namespace quermass::cli {

namespace {

using ojson = nlohmann::ordered_json;

std::string out_path(const RunConfig& c, const std::string& name) {
  return (std::filesystem::path(c.out) / name).string();
}

ojson estimate_json(const Estimate& e) { return ojson{{"mean", e.mean}, {"se", e.se}, {"batches", e.batches}}; }

// JSON has no infinity; large or missing values are reported as null.
ojson number(double v) { return std::isfinite(v) ? ojson(v) : ojson(nullptr); }

void note(const CommandContext& ctx, const std::string& line) {
  if (ctx.log) *ctx.log << line << "\n";
}

PeierlsConstants constants_for(const RunConfig& c) {
  return peierls_constants(c.params, c.tiling(), c.theta1_delta);
}

ojson constants_json(const PeierlsConstants& k) {
  return ojson{{"L", k.L},
               {"delta", k.delta},
               {"ball_5L", k.ball_5L},
               {"ball_2L", k.ball_2L},
               {"r0", k.r0},
               {"r1", k.r1},
               {"theta1_star", k.theta1_star},
               {"theta1_delta", k.theta1_delta},
               {"theta2_star", k.theta2_star},
               {"theta2_delta", k.theta2_delta},
               {"t", k.t},
               {"rho0", k.rho0},
               {"tau", k.tau},
               {"l0", k.l0},
               {"eta", number(k.eta)},
               {"g0", k.g0},
               {"g1", k.g1},
               {"a", k.a},
               {"s_beta", number(k.s_beta)},
               {"U_lo", number(k.U_lo)},
               {"U_hi", number(k.U_hi)}};
}

}  // namespace

void cmd_sample(const CommandContext& ctx) {
  const RunConfig& c = ctx.cfg;
  const ChainSettings cs = c.chain();
  const Trace tr = run_chain(c.params, c.tiling(), c.window(), c.boundary(), c.sweeps, c.seed, cs.options);

  ojson j = report_json(c);
  j["records"] = tr.records.size();
  j["area"] = tr.area;
  const Estimate rho = estimate_density(tr);
  j["rho"] = estimate_json(rho);
  if (tr.bulk_area > 0.0) j["rho_bulk"] = estimate_json(estimate_bulk_density(tr));
  j["mean_n"] = estimate_json(estimate_mean_n(tr));
  if (cs.options.record_energy) j["mean_energy"] = estimate_json(estimate_mean_energy(tr));
  double ab = 0.0, ad = 0.0, am = 0.0;
  for (const auto& r : tr.records) {
    ab += r.acc_birth;
    ad += r.acc_death;
    am += r.acc_move;
  }
  const double n = static_cast<double>(std::max<std::size_t>(1, tr.records.size()));
  j["acceptance"] = ojson{{"birth", ab / n}, {"death", ad / n}, {"move", am / n}};
  j["max_validation_error"] = tr.max_validation_error;
  j["constraint_violations"] = tr.constraint_violations;

  write_text_file(out_path(c, "trace.csv"), trace_csv(c, tr));
  write_text_file(out_path(c, "summary.json"), dump_json(j));
  if (!tr.snapshots.empty()) write_text_file(out_path(c, "snapshots.json"), dump_json(snapshots_json(c, tr.snapshots)));
  note(ctx, "rho = " + format_double(rho.mean) + " +- " + format_double(rho.se) + " (" +
                std::to_string(tr.records.size()) + " records) -> " + c.out);
}

void cmd_scan(const CommandContext& ctx) {
  const RunConfig& c = ctx.cfg;
  if (c.s_grid.empty()) throw ConfigError("field 's_grid': scan needs at least one s value");
  if (!(c.params.beta > 0.0)) throw ConfigError("field 'beta': scan needs beta > 0");
  const ScanResult res = density_gap_scan(c.params, c.tiling(), c.window(), c.s_grid, c.chain(), c.seed, c.threads);
  write_text_file(out_path(c, "scan.csv"), scan_csv(c, res));

  ojson j = report_json(c);
  j["s_max_gap"] = number(res.s_max_gap);
  j["max_gap"] = res.max_gap;
  j["max_gap_se"] = res.max_gap_se;
  j["gap_significance"] = res.max_gap_se > 0.0 ? number(res.max_gap / res.max_gap_se) : ojson(nullptr);
  j["s_crossing"] = number(res.s_crossing);
  j["z_crossing"] = number(res.z_crossing);
  write_text_file(out_path(c, "scan.json"), dump_json(j));

  if (!c.z_grid.empty()) {
    std::vector<std::pair<std::string, PressureCurve>> curves;
    const std::pair<const char*, BoundaryCondition> bcs[] = {{"free", BoundaryCondition::free_bc()},
                                                             {"wired0", BoundaryCondition::wired(0)},
                                                             {"wired1", BoundaryCondition::wired(1)}};
    std::uint64_t key = 1000;
    for (const auto& [name, bc] : bcs)
      curves.emplace_back(name, estimate_pressure_curve(c.params, c.tiling(), c.window(), c.z_grid, bc, c.chain(),
                                                        derive_seed(c.seed, key++), c.threads));
    write_text_file(out_path(c, "pressure.csv"), pressure_csv(c, curves));
  }
  note(ctx, "max gap " + format_double(res.max_gap) + " +- " + format_double(res.max_gap_se) + " at s = " +
                format_double(res.s_max_gap) + " -> " + c.out);
}

void cmd_contours(const CommandContext& ctx) {
  const RunConfig& c = ctx.cfg;
  const Tiling tiling = c.tiling();
  std::vector<Configuration> snaps;
  const std::string path = !ctx.snapshots_override.empty() ? ctx.snapshots_override : c.snapshots;
  if (!path.empty()) {
    snaps = snapshots_from_json(read_text_file(path));
  } else {
    SamplerOptions opt = c.chain().options;
    if (opt.snapshot_every == 0) opt.snapshot_every = std::max<long>(1, c.sweeps / 20);
    snaps = run_chain(c.params, tiling, c.window(), c.boundary(), c.sweeps, c.seed, opt).snapshots;
  }

  // Outside the window the spin is the boundary spin.
  const int exterior = c.bc == "wired1" ? 1 : 0;
  ContourOptions copt;
  copt.norm = c.norm();
  copt.check_labels = c.check_labels;

  std::optional<PeierlsConstants> k;
  std::string domain_note;
  try {
    k = constants_for(c);
  } catch (const DomainError& e) {
    domain_note = e.what();
  }

  long total = 0, peierls_ok = 0, domino_ok = 0, ratio_ok = 0, chi_ok = 0;
  std::map<long, long> histogram;
  ojson per_snapshot = ojson::array();
  ojson igamma = ojson::array();
  for (std::size_t s = 0; s < snaps.size(); ++s) {
    const SpinField field = spin_field(snaps[s], tiling, c.window());
    const auto cl = extract_contours(field, tiling, exterior, copt);
    long largest = 0;
    for (const auto& g : cl) {
      ++total;
      ++histogram[g.size()];
      largest = std::max(largest, g.size());
      if (verify_chi_bound(snaps[s], g, c.params, tiling).holds) ++chi_ok;
      if (!k) continue;
      if (verify_peierls_bound(snaps[s], g, c.params, *k).holds) ++peierls_ok;
      if (verify_ratio_bound(g, *k)) ++ratio_ok;
      try {
        if (static_cast<double>(domino_set(g, tiling).size()) >= k->r0 * static_cast<double>(g.size())) ++domino_ok;
      } catch (const ContourError&) {
      }
      if (c.igamma_samples > 0 && igamma.size() < 5 && g.size() <= 400) {
        const IGammaEstimate ig = estimate_I_gamma(g, c.params, tiling, c.igamma_samples,
                                                   derive_seed(c.seed, 7000 + igamma.size()), c.threads);
        igamma.push_back(ojson{{"snapshot", s},
                               {"size", g.size()},
                               {"mean", ig.mean},
                               {"se", ig.se},
                               {"peierls_cap", number(ig.peierls_cap)}});
      }
    }
    per_snapshot.push_back(ojson{{"snapshot", s}, {"contours", cl.size()}, {"largest", largest}});
  }

  ojson j = report_json(c);
  j["snapshots"] = snaps.size();
  j["contours"] = total;
  j["per_snapshot"] = per_snapshot;
  ojson hist = ojson::array();
  for (const auto& [size, count] : histogram) hist.push_back({size, count});
  j["size_histogram"] = hist;
  auto rate = [&](long ok) { return total > 0 ? ojson(static_cast<double>(ok) / static_cast<double>(total)) : ojson(nullptr); };
  j["chi_bound_pass_rate"] = rate(chi_ok);
  if (k) {
    j["constants"] = constants_json(*k);
    j["peierls_pass_rate"] = rate(peierls_ok);
    j["domino_pass_rate"] = rate(domino_ok);
    j["ratio_pass_rate"] = rate(ratio_ok);
  } else {
    j["outside_admissible_domain"] = domain_note;
  }
  if (!igamma.empty()) j["I_gamma"] = igamma;
  write_text_file(out_path(c, "contours.json"), dump_json(j));
  note(ctx, std::to_string(total) + " contours in " + std::to_string(snaps.size()) + " snapshots -> " + c.out);
}

void cmd_expand(const CommandContext& ctx) {
  const RunConfig& c = ctx.cfg;
  ojson j = report_json(c);

  const ConvergenceReport conv = convergence_check(c.tau, c.l0);
  const double t0 = tau0(c.l0);
  j["convergence"] = ojson{{"tau", c.tau},
                           {"l0", c.l0},
                           {"tau0", t0},
                           {"satisfied", conv.satisfied},
                           {"sum", number(conv.sum)},
                           {"tail", number(conv.tail)},
                           {"strong_sum", number(conv.strong_sum)},
                           {"strong_tail", number(conv.strong_tail)},
                           {"eta", conv.eta},
                           {"log_strong_total", number(conv.log_strong_total)},
                           {"log_eta", conv.log_eta}};

  // Dimer self-test: the chain's own stability exponent sets the tail.
  if (c.dimer_w > 0.0) {
    ExpansionOptions o;
    o.tau = -std::log(c.dimer_w) / 2.0;
    o.l0 = 2;
    o.Lmax = std::min<long>(c.Lmax, 2L * kUrsellCap);
    const ExpansionResult r = cluster_pressure(dimer_chain_system(c.dimer_w), o);
    const double exact = dimer_chain_pressure(c.dimer_w);
    j["dimer_self_test"] = ojson{{"w", c.dimer_w},
                                 {"g", r.g},
                                 {"exact", exact},
                                 {"error", r.g - exact},
                                 {"tail_bound", r.tail_bound},
                                 {"pass", std::abs(r.g - exact) <= r.tail_bound},
                                 {"report", nlohmann::ordered_json::parse(expansion_to_json(r))}};
  }

  try {
    const Tiling t = c.tiling();
    const double beta = c.params.beta > 0.0 ? c.params.beta : 1.0;
    const PszInputs in = psz_inputs(c.params, t, beta, c.K);
    const PszReport rep = psz_conditions_check(in);
    const MinimalBeta m = minimal_rigorous_beta(c.params, t, c.K);
    j["psz"] = nlohmann::ordered_json::parse(psz_to_json(in, rep, m));
  } catch (const DomainError& e) {
    j["psz"] = ojson{{"error", e.what()}};
  }
  write_text_file(out_path(c, "expansion.json"), dump_json(j));
  note(ctx, std::string("convergence ") + (conv.satisfied ? "satisfied" : "violated") + " at tau = " +
                format_double(c.tau) + " (tau0 = " + format_double(t0) + ") -> " + c.out);
}

void cmd_check_constants(const CommandContext& ctx) {
  const RunConfig& c = ctx.cfg;
  const PeierlsConstants k = constants_for(c);  // DomainError -> exit 3
  const MinimalBeta m = minimal_rigorous_beta(c.params, c.tiling(), c.K);
  ojson j = report_json(c);
  j["constants"] = constants_json(k);
  j["theta2_star_over_pi"] = k.theta2_star / std::acos(-1.0);
  j["minimal_beta_found"] = m.found;
  j["minimal_beta"] = number(m.beta);
  j["not_desk_simulable"] = m.not_desk_simulable;
  if (m.found) {
    const PszInputs in = psz_inputs(c.params, c.tiling(), m.beta, c.K);
    j["at_minimal_beta"] = nlohmann::ordered_json::parse(psz_to_json(in, m.report, std::nullopt));
  }
  write_text_file(out_path(c, "constants.json"), dump_json(j));
  note(ctx, "theta1* = " + format_double(k.theta1_star) + ", theta2* = " + format_double(k.theta2_star) +
                ", rho0 = " + format_double(k.rho0) + ", minimal rigorous beta = " + format_double(m.beta) +
                (m.not_desk_simulable ? " (not desk-simulable)" : ""));
}

}  // namespace quermass::cli
