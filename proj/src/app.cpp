#include <apsf/app.hpp>
#include <apsf/io.hpp>
#include <apsf/loocv.hpp>
#include <apsf/plots.hpp>
#include <apsf/preprocess.hpp>
#include <apsf/study.hpp>

#include <CLI11.hpp>

#include <algorithm>
#include <iostream>
#include <optional>
#include <sstream>

namespace apsf {

namespace fs = std::filesystem;

namespace {

const char* kMetricNames[] = {"E1", "E2", "E3", "E4", "E5"};

bool is_cluster_design(const std::string& d) { return d == "agree" || d == "disagree"; }

Site parse_site(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw UsageError("target must be 'x,y', got '" + text + "'");
  try {
    std::size_t used = 0;
    const double x = std::stod(text.substr(0, comma), &used);
    const double y = std::stod(text.substr(comma + 1), &used);
    return Site(x, y);
  } catch (const std::exception&) {
    throw UsageError("target must be 'x,y', got '" + text + "'");
  }
}

struct Input {
  SpatialDataset raw;
  SpatialDataset data;  ///< after smoothing and detrending
  std::optional<SimDataset> sim;
};

SimDataset simulate(const RunConfig& c) {
  if (is_cluster_design(c.design)) {
    ClusterSimSpec s;
    s.design = parse_cluster_design(c.design);
    s.delta_a = c.delta_a;
    s.delta_b = c.delta_b;
    s.bound = c.bound;
    s.sigma_a2 = c.sigma_a2;
    s.noise_sd = c.noise_sd;
    s.grid_size = c.grid_size;
    s.seed = c.seed;
    return gen_cluster_dataset(s);
  }
  KrigingSimSpec s;
  s.design = parse_kriging_design(c.design);
  s.bound = c.bound;
  s.sigma_a2 = c.sigma_a2;
  s.noise_sd = c.noise_sd;
  s.layout = c.layout == "random" ? Layout::uniform_random : Layout::grid5x5;
  s.random_sites = c.sites;
  s.grid_size = c.grid_size;
  s.seed = c.seed;
  return gen_kriging_dataset(s);
}

Input load_input(const RunConfig& c) {
  Input in;
  if (!c.data.empty()) {
    if (!fs::exists(c.data)) throw UsageError("data file not found: " + c.data.string());
    LoadOptions opt;
    opt.grid_size = c.grid_size;
    in.raw = load_dataset(c.data, opt);
  } else {
    in.sim = simulate(c);
    in.raw = in.sim->dataset;
  }
  in.data = smooth_dataset(in.raw, c.iota);
  if (!c.detrend.empty()) in.data = detrend_spatial(in.data, c.detrend);
  return in;
}

void write_functions(const fs::path& path, const std::vector<std::string>& ids, const std::vector<Vector>& values) {
  std::vector<std::string> header{"site_id"};
  for (Eigen::Index m = 0; m < values.front().size(); ++m) header.push_back("t_" + std::to_string(m));
  CsvWriter out(path, header);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    out.cell(ids[i]);
    for (Eigen::Index m = 0; m < values[i].size(); ++m) out.cell(values[i](m));
    out.end_row();
  }
}

std::vector<std::string> metric_header(const std::string& first) {
  std::vector<std::string> h{first};
  for (const char* method : {"apk", "ok"})
    for (const char* m : kMetricNames) h.push_back(std::string(m) + "_" + method);
  return h;
}

int cmd_simulate(const RunConfig& c) {
  const SimDataset sim = simulate(c);
  save_dataset(sim.dataset, c.out / "observations.csv");
  std::vector<Vector> phases, amps;
  for (const auto& g : sim.true_phases) phases.push_back(g.values());
  for (const auto& a : sim.true_amplitudes) amps.push_back(a.values());
  write_functions(c.out / "truth_phases.csv", sim.dataset.ids, phases);
  write_functions(c.out / "truth_amplitudes.csv", sim.dataset.ids, amps);
  if (!sim.amplitude_partition.sites.empty()) {
    CsvWriter out(c.out / "truth_partitions.csv", {"site_id", "amplitude_cluster", "phase_cluster"});
    for (std::size_t i = 0; i < sim.dataset.size(); ++i) {
      out.cell(sim.dataset.ids[i])
          .cell(static_cast<long long>(sim.amplitude_partition.labels[i]))
          .cell(static_cast<long long>(sim.phase_partition.labels[i]))
          .end_row();
    }
  }
  std::cout << "wrote " << sim.dataset.size() << " simulated sites to " << (c.out / "observations.csv").string()
            << "\n";
  return 0;
}

int cmd_krige(const RunConfig& c) {
  const Input in = load_input(c);
  const SpatialDataset& d = in.data;
  if (c.targets.empty() && c.holdouts.empty()) throw UsageError("krige needs --target x,y or --holdout <site_id>");

  std::vector<std::string> header{"target", "x", "y", "method"};
  for (Eigen::Index m = 0; m < d.grid.size(); ++m) header.push_back("t_" + std::to_string(m));
  CsvWriter out(c.out / "predictions.csv", header);
  std::vector<PredictionCurves> curves;
  std::optional<KrigingResult> first;
  VariogramModel ok_model;
  EmpiricalVariogram ok_emp;

  auto emit = [&](const std::string& name, const Site& s, const char* method, const Vector& v) {
    out.cell(name).cell(s.x()).cell(s.y()).cell(std::string(method));
    for (Eigen::Index m = 0; m < v.size(); ++m) out.cell(v(m));
    out.end_row();
  };
  auto predict = [&](const SpatialDataset& training, const std::string& name, const Site& s,
                     const SampledFunction* truth) {
    KrigingConfig kc = c.kriging;
    kc.seed = c.seed;
    KrigingResult apk = amplitude_phase_krige(training, s, kc);
    VariogramModel model;
    EmpiricalVariogram emp;
    const SampledFunction ok = ordinary_krige_functional(training, s, kc.binning, nullptr, &model, &emp);
    emit(name, s, "apk", apk.combined.values());
    emit(name, s, "ok", ok.values());
    if (truth) curves.push_back({name, d.grid.points(), truth->values(), apk.combined.values(), ok.values()});
    if (!first) {
      first = std::move(apk);
      ok_model = model;
      ok_emp = std::move(emp);
    }
  };

  for (const auto& id : c.holdouts) {
    const auto it = std::find(d.ids.begin(), d.ids.end(), id);
    if (it == d.ids.end()) throw UsageError("unknown holdout site " + id);
    const std::size_t i = static_cast<std::size_t>(it - d.ids.begin());
    predict(d.without(i), id, d.functions[i].site(), &d.functions[i]);
  }
  for (std::size_t t = 0; t < c.targets.size(); ++t) {
    predict(d, "target" + std::to_string(t + 1), parse_site(c.targets[t]), nullptr);
  }
  out.close();
  if (!curves.empty()) write_prediction_plot(c.out / "predictions.svg", c.out / "predictions_plot.csv", curves);
  write_variogram_plot(c.out / "variograms.svg", c.out / "variograms.csv",
                       {{"trace (raw functions)", ok_emp, ok_model},
                        {"amplitude", first->amplitude_empirical, first->amplitude_model},
                        {"phase", first->phase_empirical, first->phase_model}});
  std::cout << "wrote predictions for " << c.holdouts.size() + c.targets.size() << " target(s) to "
            << (c.out / "predictions.csv").string() << "\n";
  return 0;
}

int cmd_loocv(const RunConfig& c) {
  const Input in = load_input(c);
  KrigingConfig kc = c.kriging;
  kc.seed = c.seed;
  LoocvOptions opt;
  opt.keep_predictions = true;
  ShapeDistanceCache cache;
  const LoocvReport apk = loocv_metrics(in.data, kc, Method::apk, opt, &cache);
  const LoocvReport ok = loocv_metrics(in.data, kc, Method::ok, opt);

  CsvWriter sites(c.out / "loocv_sites.csv", metric_header("site_id"));
  for (std::size_t i = 0; i < in.data.size(); ++i) {
    sites.cell(in.data.ids[i]);
    for (const LoocvReport* r : {&apk, &ok}) {
      for (double v : r->folds[i].metrics) r->folds[i].ok ? sites.cell(v) : sites.cell(std::string("nan"));
    }
    sites.end_row();
  }
  sites.close();
  CsvWriter mean(c.out / "loocv_mean.csv", metric_header("summary"));
  mean.cell(std::string("mean"));
  for (const LoocvReport* r : {&apk, &ok})
    for (double v : r->mean) mean.cell(v);
  mean.end_row();
  mean.close();
  if (apk.failed + ok.failed > 0) {
    CsvWriter fail(c.out / "loocv_failures.csv", {"site_id", "method", "error"});
    for (const LoocvReport* r : {&apk, &ok}) {
      for (const auto& f : r->folds) {
        if (f.ok) continue;
        std::string msg = f.error;
        std::replace(msg.begin(), msg.end(), ',', ';');
        fail.cell(f.site_id).cell(std::string(method_name(r->method))).cell(msg).end_row();
      }
    }
  }

  std::vector<PredictionCurves> curves;
  for (std::size_t i = 0; i < std::min<std::size_t>(4, in.data.size()); ++i) {
    if (!apk.folds[i].prediction || !ok.folds[i].prediction) continue;
    curves.push_back({in.data.ids[i], in.data.grid.points(), in.data.functions[i].values(),
                      apk.folds[i].prediction->values(), ok.folds[i].prediction->values()});
  }
  if (!curves.empty()) write_prediction_plot(c.out / "loocv_predictions.svg", c.out / "loocv_predictions.csv", curves);

  std::cout << "metric   apk          ok\n";
  for (std::size_t k = 0; k < 5; ++k) {
    std::printf("%-6s %12.5g %12.5g\n", kMetricNames[k], apk.mean[k], ok.mean[k]);
  }
  if (apk.failed + ok.failed > 0) std::cout << (apk.failed + ok.failed) << " fold(s) failed\n";
  return 0;
}

int cmd_cluster(const RunConfig& c) {
  const Input in = load_input(c);
  const SpatialDataset& d = in.data;
  if (c.k < 1 || static_cast<std::size_t>(c.k) > d.size()) {
    throw UsageError("--k must lie between 1 and the number of sites (" + std::to_string(d.size()) + ")");
  }
  const ClusterOutcome res = cluster_dataset(d, c.k, parse_linkage(c.linkage), c.kriging.omega_candidates, c.spatial);
  CsvWriter out(c.out / "clusters.csv", {"site_id", "x", "y", "amplitude_cluster", "phase_cluster", "l2_cluster"});
  for (std::size_t i = 0; i < d.size(); ++i) {
    out.cell(d.ids[i]).cell(d.functions[i].site().x()).cell(d.functions[i].site().y());
    out.cell(static_cast<long long>(res.amplitude.labels[i]))
        .cell(static_cast<long long>(res.phase.labels[i]))
        .cell(static_cast<long long>(res.l2.labels[i]))
        .end_row();
  }
  out.close();
  const auto sites = d.sites();
  write_site_map(c.out / "clusters_amplitude.svg", c.out / "clusters_amplitude_map.csv", "amplitude clusters", d.ids,
                 sites, res.amplitude.labels);
  write_site_map(c.out / "clusters_phase.svg", c.out / "clusters_phase_map.csv", "phase clusters", d.ids, sites,
                 res.phase.labels);
  write_site_map(c.out / "clusters_l2.svg", c.out / "clusters_l2_map.csv", "L2 clusters", d.ids, sites,
                 res.l2.labels);
  if (in.sim && !in.sim->amplitude_partition.sites.empty()) {
    CsvWriter ri(c.out / "rand_index.csv", {"method", "amplitude_rand_index", "phase_rand_index"});
    ri.cell(std::string("amplitude_phase"))
        .cell(rand_index(res.amplitude, in.sim->amplitude_partition))
        .cell(rand_index(res.phase, in.sim->phase_partition))
        .end_row();
    ri.cell(std::string("l2"))
        .cell(rand_index(res.l2, in.sim->amplitude_partition))
        .cell(rand_index(res.l2, in.sim->phase_partition))
        .end_row();
  }
  std::cout << "wrote " << d.size() << " cluster assignments to " << (c.out / "clusters.csv").string() << "\n";
  return 0;
}

int cmd_study(const RunConfig& c) {
  if (c.study == "kriging") {
    KrigingStudyOptions o;
    o.sim.design = parse_kriging_design(c.design);
    o.sim.bound = c.bound;
    o.sim.sigma_a2 = c.sigma_a2;
    o.sim.noise_sd = c.noise_sd;
    o.sim.grid_size = c.grid_size;
    o.config = c.kriging;
    o.iota = c.iota;
    o.replicates = c.replicates;
    o.seed = c.seed;
    std::vector<std::string> header = metric_header("replicate");
    header.insert(header.begin() + 1, "seed");
    CsvWriter out(c.out / "study_kriging.csv", header);
    ErrorMetrics apk{}, ok{};
    for (int r = 0; r < c.replicates; ++r) {
      const KrigingReplicate rep = kriging_replicate(o, r);
      out.cell(static_cast<long long>(r)).cell(std::to_string(rep.seed));
      for (double v : rep.apk) out.cell(v);
      for (double v : rep.ok) out.cell(v);
      out.end_row();
      for (std::size_t k = 0; k < 5; ++k) {
        apk[k] += rep.apk[k] / c.replicates;
        ok[k] += rep.ok[k] / c.replicates;
      }
    }
    out.cell(std::string("mean")).cell(std::string(""));
    for (double v : apk) out.cell(v);
    for (double v : ok) out.cell(v);
    out.end_row();
    std::cout << "mean E3 apk " << apk[2] << " ok " << ok[2] << "; mean E4 apk " << apk[3] << " ok " << ok[3] << "\n";
  } else if (c.study == "cluster") {
    ClusterStudyOptions o;
    o.sim.design = parse_cluster_design(is_cluster_design(c.design) ? c.design : "disagree");
    o.sim.delta_a = c.delta_a;
    o.sim.delta_b = c.delta_b;
    o.sim.bound = c.bound;
    o.sim.sigma_a2 = c.sigma_a2;
    o.sim.noise_sd = c.noise_sd;
    o.sim.grid_size = c.grid_size;
    o.k = c.k;
    o.linkage = parse_linkage(c.linkage);
    o.omega_candidates = c.kriging.omega_candidates;
    o.iota = c.iota;
    o.replicates = c.replicates;
    o.seed = c.seed;
    CsvWriter out(c.out / "study_cluster.csv", {"replicate", "seed", "amplitude_rand_apc", "phase_rand_apc",
                                                 "amplitude_rand_l2", "phase_rand_l2"});
    double sums[4] = {0, 0, 0, 0};
    for (int r = 0; r < c.replicates; ++r) {
      const ClusterReplicate rep = cluster_replicate(o, r);
      const double v[4] = {rep.amplitude_apc, rep.phase_apc, rep.amplitude_l2, rep.phase_l2};
      out.cell(static_cast<long long>(r)).cell(std::to_string(rep.seed));
      for (int k = 0; k < 4; ++k) {
        out.cell(v[k]);
        sums[k] += v[k] / c.replicates;
      }
      out.end_row();
    }
    out.cell(std::string("mean")).cell(std::string(""));
    for (double s : sums) out.cell(s);
    out.end_row();
    std::cout << "mean rand index: amplitude apc " << sums[0] << " l2 " << sums[2] << "; phase apc " << sums[1]
              << " l2 " << sums[3] << "\n";
  } else if (c.study == "scale") {
    ScaleStudyOptions o;
    o.config = c.kriging;
    o.replicates = c.replicates;
    o.seed = c.seed;
    o.sim.grid_size = c.grid_size;
    const std::vector<double> means = scale_study(o);
    CsvWriter out(c.out / "study_scale.csv", {"grid_side", "sites", "mean_amplitude_distance"});
    for (std::size_t i = 0; i < means.size(); ++i) {
      out.cell(static_cast<long long>(o.grid_sides[i]))
          .cell(static_cast<long long>(o.grid_sides[i] * o.grid_sides[i]))
          .cell(means[i])
          .end_row();
      std::cout << o.grid_sides[i] * o.grid_sides[i] << " sites: mean amplitude distance " << means[i] << "\n";
    }
  } else if (c.study == "confounding") {
    ConfoundingSpec s;
    s.seed = c.seed;
    s.grid_size = c.grid_size;
    const ConfoundingResult r = confounding_demo(s);
    CsvWriter out(c.out / "study_confounding.csv",
                  {"variogram", "nugget_fitted", "scale", "range", "nugget", "r2", "signal_fraction"});
    const std::pair<const char*, const VariogramModel*> rows[] = {{"trace", &r.raw},
                                                                   {"amplitude", &r.amplitude},
                                                                   {"trace", &r.raw_nugget},
                                                                   {"amplitude", &r.amplitude_nugget}};
    for (int i = 0; i < 4; ++i) {
      const VariogramModel& m = *rows[i].second;
      out.cell(std::string(rows[i].first)).cell(static_cast<long long>(i >= 2)).cell(m.scale).cell(m.range);
      out.cell(m.nugget).cell(m.r2).cell(m.signal_fraction()).end_row();
    }
    out.close();
    write_variogram_plot(c.out / "confounding_variograms.svg", c.out / "confounding_variograms.csv",
                         {{"trace (raw functions)", r.raw_empirical, r.raw},
                          {"amplitude", r.amplitude_empirical, r.amplitude}});
    std::cout << "r2 trace " << r.raw.r2 << " amplitude " << r.amplitude.r2 << "\n";
  } else {
    throw UsageError("unknown study '" + c.study + "' (kriging | cluster | scale | confounding)");
  }
  return 0;
}

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw UsageError(std::string(what) + ": bad number '" + item + "'");
    }
  }
  return out;
}

}  // namespace

void RunConfig::validate() const {
  static const char* commands[] = {"simulate", "krige", "loocv", "cluster", "study"};
  if (std::find(std::begin(commands), std::end(commands), command) == std::end(commands)) {
    throw UsageError("unknown command '" + command + "'");
  }
  if (grid_size < 3) throw UsageError("--grid-size must be at least 3");
  if (!(iota >= 0.0)) throw UsageError("--iota must be >= 0");
  if (replicates < 1) throw UsageError("--replicates must be positive");
  if (k < 1) throw UsageError("--k must be positive");
  if (!(bound > 0.0)) throw UsageError("--bound must be positive");
  if (sigma_a2 < 0.0 || noise_sd < 0.0) throw UsageError("variances must be >= 0");
  if (layout != "grid5x5" && layout != "random") throw UsageError("--layout must be grid5x5 or random");
  if (design != "bimodal" && design != "bspline" && !is_cluster_design(design)) {
    throw UsageError("unknown design '" + design + "'");
  }
  if (linkage != "average" && linkage != "complete" && linkage != "single") {
    throw UsageError("unknown linkage '" + linkage + "'");
  }
  try {
    kriging.validate();
  } catch (const InvalidInput& e) {
    throw UsageError(e.what());
  }
}

int run_command(const RunConfig& config) {
  try {
    config.validate();
    if (config.command == "simulate") return cmd_simulate(config);
    if (config.command == "krige") return cmd_krige(config);
    if (config.command == "loocv") return cmd_loocv(config);
    if (config.command == "cluster") return cmd_cluster(config);
    return cmd_study(config);
  } catch (const UsageError& e) {
    std::cerr << "apsf: usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "apsf: error: " << e.what() << "\n";
    return 1;
  }
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Amplitude-phase kriging and clustering of spatial functional data"};
  app.require_subcommand(1);
  RunConfig c;
  std::string lambda_grid, omega_grid;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--seed", c.seed, "random seed");
    sub->add_option("--out", c.out, "output directory");
    sub->add_option("--data", c.data, "observation CSV (site_id,x,y,t_0,...)");
    sub->add_option("--design", c.design, "simulation design: bimodal | bspline | agree | disagree");
    sub->add_option("--grid-size", c.grid_size, "number of grid points on [0,1]");
    sub->add_option("--iota", c.iota, "second-difference smoothing weight (0 = none)");
    sub->add_option("--detrend", c.detrend, "covariates to regress out per grid node")->delimiter(',');
    sub->add_option("--bound", c.bound, "phase parameter half-width B");
    sub->add_option("--sigma-a2", c.sigma_a2, "amplitude field variance");
    sub->add_option("--noise-sd", c.noise_sd, "white noise standard deviation");
    sub->add_option("--delta-a", c.delta_a, "amplitude shift between clusters");
    sub->add_option("--delta-b", c.delta_b, "phase shift between clusters");
    sub->add_option("--layout", c.layout, "site layout: grid5x5 | random");
    sub->add_option("--sites", c.sites, "site count for the random layout");
    sub->add_option("--max-iter", c.kriging.max_iterations, "amplitude kriging iteration cap");
    sub->add_option("--tolerance", c.kriging.tolerance, "amplitude kriging stopping tolerance");
    sub->add_option("--lambda-grid", lambda_grid, "comma-separated penalty candidates");
    sub->add_option("--omega-grid", omega_grid, "comma-separated enlarged-domain weights (must include 0)");
  };

  CLI::App* simulate_cmd = app.add_subcommand("simulate", "generate a simulated dataset");
  CLI::App* krige_cmd = app.add_subcommand("krige", "predict at target sites");
  CLI::App* loocv_cmd = app.add_subcommand("loocv", "leave-one-site-out cross-validation");
  CLI::App* cluster_cmd = app.add_subcommand("cluster", "amplitude, phase and L2 clustering");
  CLI::App* study_cmd = app.add_subcommand("study", "multi-replicate simulation study");
  for (CLI::App* sub : {simulate_cmd, krige_cmd, loocv_cmd, cluster_cmd, study_cmd}) common(sub);
  krige_cmd->add_option("--target", c.targets, "target site 'x,y' (repeatable)");
  krige_cmd->add_option("--holdout", c.holdouts, "observed site id to predict from the others (repeatable)");
  cluster_cmd->add_option("--k", c.k, "number of clusters");
  cluster_cmd->add_option("--linkage", c.linkage, "average | complete | single");
  cluster_cmd->add_flag("!--spatial,--no-spatial", c.spatial, "drop the variogram weighting");
  study_cmd->add_option("--kind", c.study, "kriging | cluster | scale | confounding");
  study_cmd->add_option("--replicates", c.replicates, "number of seeded replicates");
  study_cmd->add_option("--k", c.k, "number of clusters (cluster study)");
  study_cmd->add_option("--linkage", c.linkage, "average | complete | single");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  for (CLI::App* sub : app.get_subcommands()) c.command = sub->get_name();
  try {
    if (!lambda_grid.empty()) c.kriging.lambda_grid = parse_list(lambda_grid, "--lambda-grid");
    if (!omega_grid.empty()) c.kriging.omega_candidates = parse_list(omega_grid, "--omega-grid");
  } catch (const UsageError& e) {
    std::cerr << "apsf: usage error: " << e.what() << "\n";
    return 2;
  }
  return run_command(c);
}

}  // namespace apsf
