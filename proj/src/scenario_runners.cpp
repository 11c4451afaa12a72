#include <cmath>
#include <limits>

#include "cohsim/scenario.hpp"

namespace cohsim {
namespace {

constexpr std::uint64_t kMuStream = 7;

double sinc_abs(double x) { return x == 0.0 ? 1.0 : std::abs(std::sin(x) / x); }

/// |a - b| in units of the combined error; 0 for exact agreement with no error.
double z_score(double a, double b, double err_a, double err_b) {
  const double diff = std::abs(a - b);
  const double err = std::hypot(err_a, err_b);
  if (err > 0.0) return diff / err;
  return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
}

Json finite_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(); }

OutputFile csv_file(std::string name, const CsvTable& t) { return {std::move(name), t.str()}; }
OutputFile json_file(std::string name, const Json& j) { return {std::move(name), j.dump(2) + "\n"}; }

Json summary_header(const ScenarioConfig& cfg) {
  return {{"scenario", std::string(to_string(cfg.scenario))}, {"master_seed", cfg.master_seed}};
}

RandomPhaseCW with_detuning(const SourceModel& m, double detuning) {
  RandomPhaseCW cw = std::get<RandomPhaseCW>(m.params());
  cw.detuning = detuning;
  return cw;
}

double sample_sd(const std::vector<double>& x) {
  const auto est = summarize(x);
  return est.std_error * std::sqrt(static_cast<double>(x.size()));
}

}  // namespace

ScenarioOutput run_magyar_mandel(const ScenarioConfig& cfg, unsigned workers) {
  const Interferometer setup{*cfg.arm1, *cfg.arm2, cfg.grid, cfg.carrier_omega0, cfg.correlation, {}, {}};
  const RealVector taus = default_taus(setup.fringe_omega(), cfg.scan.periods, cfg.scan.points_per_period);
  const SeedSpec shot_seed{cfg.master_seed, 0};
  const VisibilityMethod method = cfg.scan.method;

  const FringeScan single = fringe_scan_single_shot(setup, taus, cfg.detector, shot_seed);
  const VisibilityResult v_single = extract_visibility(single, method);
  const FringeScan ens = fringe_scan_ensemble(setup, taus, cfg.detector, cfg.ensemble, workers);
  const VisibilityResult v_ens =
      cfg.ensemble.n_realizations >= 2 ? jackknife_visibility(ens, method) : extract_visibility(ens, method);

  ScenarioOutput out;
  out.files.push_back(csv_file("fringe_single_shot.csv", fringe_csv(single)));
  out.files.push_back(json_file("fringe_single_shot.json", fringe_sidecar(single, v_single)));
  out.files.push_back(csv_file("fringe_ensemble.csv", fringe_csv(ens)));
  out.files.push_back(json_file("fringe_ensemble.json", fringe_sidecar(ens, v_ens)));

  const double d1 = std::get<RandomPhaseCW>(cfg.arm1->params()).detuning;
  const double d2 = std::get<RandomPhaseCW>(cfg.arm2->params()).detuning;
  Json& s = out.summary = summary_header(cfg);
  s["delta_omega"] = d1 - d2;
  s["delta_omega_T"] = (d1 - d2) * cfg.detector.T;
  s["fringe_omega"] = setup.fringe_omega();
  s["visibility_method"] = std::string(to_string(method));
  s["n_realizations"] = cfg.ensemble.n_realizations;
  s["single_shot_visibility"] = v_single.value;
  s["single_shot_visibility_raw"] = v_single.raw_value;
  s["ensemble_visibility"] = v_ens.value;
  s["ensemble_visibility_raw"] = v_ens.raw_value;
  s["ensemble_visibility_std_error"] = v_ens.std_error ? Json(*v_ens.std_error) : Json();

  if (cfg.sweep) {
    // Detunings +-delta/2 keep the fringe frequency at the carrier.
    const RealVector deltas = cfg.sweep->values();
    const RealVector sweep_taus = default_taus(cfg.carrier_omega0, cfg.scan.periods, cfg.scan.points_per_period);
    std::vector<double> vis(static_cast<std::size_t>(deltas.size()));
    parallel_for(vis.size(), workers, [&](std::size_t i) {
      const double d = deltas[static_cast<Eigen::Index>(i)];
      Interferometer shifted = setup;
      shifted.arm1 = with_detuning(*cfg.arm1, 0.5 * d);
      shifted.arm2 = with_detuning(*cfg.arm2, -0.5 * d);
      vis[i] = extract_visibility(fringe_scan_single_shot(shifted, sweep_taus, cfg.detector, shot_seed), method).value;
    });
    CsvTable t{{"delta_omega", "delta_omega_T", "single_shot_visibility", "sinc_abs", "abs_error"}, {}};
    double worst = 0.0;
    for (std::size_t i = 0; i < vis.size(); ++i) {
      const double d = deltas[static_cast<Eigen::Index>(i)];
      const double expected = sinc_abs(0.5 * d * cfg.detector.T);
      worst = std::max(worst, std::abs(vis[i] - expected));
      t.add({d, d * cfg.detector.T, vis[i], expected, std::abs(vis[i] - expected)});
    }
    out.files.push_back(csv_file("sinc_sweep.csv", t));
    s["sinc_sweep"] = {{"points", vis.size()}, {"max_abs_error", worst}};
  }
  return out;
}

ScenarioOutput run_wolf_filtered(const ScenarioConfig& cfg, unsigned workers) {
  const FilterSpec& base = *cfg.filter;
  const RealVector deltas = cfg.sweep->values();
  const RealVector taus = default_taus(base.center_omega_f, cfg.scan.periods, cfg.scan.points_per_period);
  const double T = cfg.detector.T;

  CsvTable t{{"delta_omega", "delta_omega_T", "measured_visibility", "measured_std_error", "mu_abs", "mu_std_error",
              "chi_abs", "predicted_visibility", "discrepancy", "combined_std_error", "snapped_delta"},
             {}};
  // mu gets its own realizations so that its error is independent of the
  // measured visibility's, as the combined error assumes.
  EnsembleSpec mu_ensemble = cfg.ensemble;
  mu_ensemble.master_seed = SeedSpec{cfg.master_seed, 0}.branch(kMuStream).master_seed;

  Json points = Json::array();
  bool all_ok = true;
  double worst_z = 0.0;
  for (Eigen::Index i = 0; i < deltas.size(); ++i) {
    const double d = deltas[i];
    Interferometer setup{*cfg.arm1, *cfg.arm2, cfg.grid, cfg.carrier_omega0, cfg.correlation, base, base};
    setup.filter1->center_omega_f = base.center_omega_f + 0.5 * d;
    setup.filter2->center_omega_f = base.center_omega_f - 0.5 * d;

    const FringeScan scan = fringe_scan_ensemble(setup, taus, cfg.detector, cfg.ensemble, workers);
    const VisibilityResult measured = jackknife_visibility(scan, cfg.scan.method);
    const SpectralCoherenceResult mu =
        spectral_coherence(*cfg.arm1, *cfg.arm2, setup.filter2->center_omega_f - cfg.carrier_omega0, d, mu_ensemble,
                           {cfg.grid, cfg.carrier_omega0, cfg.correlation, workers});
    const Complex chi = chi_factor(*setup.filter1, cfg.detector.t_start, T, d);
    const PredictedVisibility predicted = predicted_visibility(mu, chi);

    const double se_v = measured.std_error.value_or(0.0);
    const double se_p = std::abs(chi) * mu.std_error;
    const double combined = std::hypot(se_v, se_p);
    const double disc = measured.raw_value - predicted.raw;
    // Both sides deterministic (e.g. identical fields at delta = 0): fixed tolerance.
    const bool deterministic = combined < 1e-6;
    const double tol = deterministic ? 1e-3 : 3.0 * combined;
    const bool ok = std::abs(disc) <= tol;
    all_ok = all_ok && ok;
    if (!deterministic) worst_z = std::max(worst_z, std::abs(disc) / combined);

    t.add({d, d * T, measured.raw_value, se_v, std::abs(mu.mu), mu.std_error, std::abs(chi), predicted.raw, disc,
           combined, mu.snapped_delta});
    points.push_back({{"delta_omega", d},
                      {"measured_visibility", measured.raw_value},
                      {"measured_std_error", se_v},
                      {"mu", to_json(mu)},
                      {"chi_re", chi.real()},
                      {"chi_im", chi.imag()},
                      {"chi_abs", std::abs(chi)},
                      {"predicted_visibility", predicted.value},
                      {"predicted_visibility_raw", predicted.raw},
                      {"discrepancy", disc},
                      {"combined_std_error", combined},
                      {"deterministic", deterministic},
                      {"within_tolerance", ok}});
  }

  ScenarioOutput out;
  out.files.push_back(csv_file("wolf_sweep.csv", t));
  Json& s = out.summary = summary_header(cfg);
  s["n_realizations"] = cfg.ensemble.n_realizations;
  s["correlation"] = std::string(to_string(cfg.correlation));
  s["visibility_method"] = std::string(to_string(cfg.scan.method));
  s["filter"] = to_json(base);
  s["detector"] = to_json(cfg.detector);
  s["points"] = points;
  s["all_within_tolerance"] = all_ok;
  s["max_abs_z"] = worst_z;
  return out;
}

ScenarioOutput run_chi_sweep(const ScenarioConfig& cfg, unsigned workers) {
  const FilterSpec& f = *cfg.filter;
  struct Window {
    double t_start;
    double T;
    bool full;
  };
  std::vector<Window> windows;
  for (double T : cfg.chi_T_values) windows.push_back({cfg.chi_t_start.value_or(-0.5 * T), T, false});
  if (cfg.chi_full_support) {
    // exp(-delta^2 t^2 / 2) has fallen to e^-40 here.
    const double h = std::sqrt(80.0) / f.bandwidth_delta;
    windows.push_back({-h, 2.0 * h, true});
  }
  const RealVector deltas = cfg.sweep->values();
  const std::size_t nd = static_cast<std::size_t>(deltas.size());
  std::vector<Complex> chi(windows.size() * nd);
  parallel_for(chi.size(), workers, [&](std::size_t k) {
    const Window& w = windows[k / nd];
    chi[k] = chi_factor(f, w.t_start, w.T, deltas[static_cast<Eigen::Index>(k % nd)]);
  });

  CsvTable t{{"T", "t_start", "delta_omega", "chi_re", "chi_im", "chi_abs"}, {}};
  double full_err = 0.0;
  for (std::size_t k = 0; k < chi.size(); ++k) {
    const Window& w = windows[k / nd];
    const double d = deltas[static_cast<Eigen::Index>(k % nd)];
    t.add({w.T, w.t_start, d, chi[k].real(), chi[k].imag(), std::abs(chi[k])});
    if (w.full) {
      const double expected = std::exp(-d * d / (2.0 * f.bandwidth_delta * f.bandwidth_delta));
      full_err = std::max(full_err, std::abs(std::abs(chi[k]) - expected));
    }
  }
  ScenarioOutput out;
  out.files.push_back(csv_file("chi_sweep.csv", t));
  Json& s = out.summary = summary_header(cfg);
  s["filter"] = to_json(f);
  s["windows"] = windows.size();
  s["delta_points"] = nd;
  if (cfg.chi_full_support) s["full_support_max_abs_error"] = full_err;
  return out;
}

ScenarioOutput run_ergodicity_demo(const ScenarioConfig& cfg, unsigned workers) {
  const RealVector starts = cfg.sweep->values();
  const auto nw = static_cast<std::size_t>(starts.size());
  const std::size_t n = cfg.ensemble.n_realizations;
  const double T = cfg.detector.T;
  const auto k_instant = static_cast<Eigen::Index>(std::lround((cfg.instant - cfg.grid.t_start) / cfg.grid.dt));

  struct Table {
    std::vector<std::vector<double>> ta_intensity;  // [window][realization]
    std::vector<std::vector<double>> ta_re;
    std::vector<double> inst_intensity;
    std::vector<double> inst_re;
  };
  auto collect = [&](const SourceModel& model, std::uint64_t stream) {
    Table tab{std::vector<std::vector<double>>(nw, std::vector<double>(n)),
              std::vector<std::vector<double>>(nw, std::vector<double>(n)), std::vector<double>(n),
              std::vector<double>(n)};
    parallel_for(n, workers, [&](std::size_t i) {
      const SeedSpec seed = cfg.ensemble.seed(i).branch(stream);
      const FieldRealization r = sample_realization(model, cfg.grid, cfg.carrier_omega0, "P", seed);
      const RealVector intensity = r.envelope().cwiseAbs2();
      const RealVector re = r.envelope().real();
      for (std::size_t w = 0; w < nw; ++w) {
        const double s0 = starts[static_cast<Eigen::Index>(w)];
        tab.ta_intensity[w][i] = time_average(intensity, cfg.grid, s0, T);
        tab.ta_re[w][i] = time_average(re, cfg.grid, s0, T);
      }
      tab.inst_intensity[i] = intensity[k_instant];
      tab.inst_re[i] = re[k_instant];
    });
    return tab;
  };

  ScenarioOutput out;
  Json& s = out.summary = summary_header(cfg);
  s["n_realizations"] = n;
  s["window_T"] = T;
  s["instant"] = cfg.grid.time(static_cast<std::size_t>(k_instant));

  // Stationary: one realization's time average against the ensemble at one
  // instant. The time average's error bar is its spread across realizations.
  {
    const Table tab = collect(*cfg.stationary, 1);
    const auto inst_i = summarize(tab.inst_intensity);
    const auto inst_r = summarize(tab.inst_re);
    CsvTable t{{"window_start", "time_avg_intensity", "time_avg_intensity_sd", "ensemble_intensity",
                "ensemble_intensity_se", "z_intensity", "time_avg_re", "time_avg_re_sd", "ensemble_re",
                "ensemble_re_se", "z_re"},
               {}};
    double max_z = 0.0;
    for (std::size_t w = 0; w < nw; ++w) {
      const double ta_i = tab.ta_intensity[w][0];
      const double ta_r = tab.ta_re[w][0];
      const double sd_i = sample_sd(tab.ta_intensity[w]);
      const double sd_r = sample_sd(tab.ta_re[w]);
      const double z_i = z_score(ta_i, inst_i.mean, sd_i, inst_i.std_error);
      const double z_r = z_score(ta_r, inst_r.mean, sd_r, inst_r.std_error);
      max_z = std::max({max_z, z_i, z_r});
      t.add({starts[static_cast<Eigen::Index>(w)], ta_i, sd_i, inst_i.mean, inst_i.std_error, z_i, ta_r, sd_r,
             inst_r.mean, inst_r.std_error, z_r});
    }
    out.files.push_back(csv_file("ergodicity_stationary.csv", t));
    s["stationary"] = {{"model", to_json(*cfg.stationary)},
                       {"max_z", finite_or_null(max_z)},
                       {"agree_within_3_sigma", max_z <= 3.0}};
  }

  // Non-stationary: the ensemble mean of the windowed time average drifts
  // with the window position.
  {
    const Table tab = collect(*cfg.nonstationary, 2);
    const auto inst_i = summarize(tab.inst_intensity);
    CsvTable t{{"window_start", "ensemble_time_avg_intensity", "ensemble_time_avg_intensity_se",
                "time_avg_intensity", "time_avg_intensity_sd", "ensemble_intensity", "ensemble_intensity_se",
                "z_vs_instant"},
               {}};
    std::vector<EnsembleEstimate<double>> per_window;
    for (std::size_t w = 0; w < nw; ++w) {
      const auto m = summarize(tab.ta_intensity[w]);
      per_window.push_back(m);
      const double ta = tab.ta_intensity[w][0];
      const double sd = sample_sd(tab.ta_intensity[w]);
      t.add({starts[static_cast<Eigen::Index>(w)], m.mean, m.std_error, ta, sd, inst_i.mean, inst_i.std_error,
             z_score(ta, inst_i.mean, sd, inst_i.std_error)});
    }
    out.files.push_back(csv_file("ergodicity_nonstationary.csv", t));
    Json ns = {{"model", to_json(*cfg.nonstationary)}};
    if (nw >= 2) {
      const auto& a = per_window.front();
      const auto& b = per_window.back();
      const double z = z_score(a.mean, b.mean, a.std_error, b.std_error);
      ns["early_window_mean"] = a.mean;
      ns["late_window_mean"] = b.mean;
      ns["early_late_z"] = finite_or_null(z);
      ns["separated_5_sigma"] = z >= 5.0;
    }
    s["nonstationary"] = ns;
  }
  return out;
}

ScenarioOutput run_scenario(const ScenarioConfig& cfg, unsigned workers) {
  switch (cfg.scenario) {
    case ScenarioKind::MagyarMandel: return run_magyar_mandel(cfg, workers);
    case ScenarioKind::WolfFiltered: return run_wolf_filtered(cfg, workers);
    case ScenarioKind::ChiSweep: return run_chi_sweep(cfg, workers);
    case ScenarioKind::ErgodicityDemo: return run_ergodicity_demo(cfg, workers);
  }
  throw ConfigError("scenario", "unknown scenario");
}

}  // namespace cohsim
