#include "commands.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <set>

#include "critlab/charfunc.hpp"
#include "critlab/correlators.hpp"
#include "critlab/dyson.hpp"
#include "critlab/exact.hpp"
#include "critlab/fluctuations.hpp"
#include "critlab/newman.hpp"
#include "critlab/quantum_gap.hpp"

#ifndef CRITLAB_VERSION
#define CRITLAB_VERSION "0.0.0"
#endif

namespace critlab::cli {

namespace {

Json est(double value, double error) { return Json{{"value", value}, {"error", error}}; }
Json est(const Estimate& e) { return est(e.value, e.error); }

Json curve(const std::string& x_label, const std::string& y_label, const std::vector<double>& x,
           const std::vector<double>& y, const std::vector<double>& y_error, const std::vector<double>& fit_x,
           const std::vector<double>& fit_y) {
  Json data = Json::array(), fit = Json::array();
  for (std::size_t i = 0; i < x.size(); ++i)
    data.push_back(y_error.empty() ? Json::array({x[i], y[i]}) : Json::array({x[i], y[i], y_error[i]}));
  for (std::size_t i = 0; i < fit_x.size(); ++i) fit.push_back(Json::array({fit_x[i], fit_y[i]}));
  return Json{{"x", x_label}, {"y", y_label}, {"data", data}, {"fit", fit}};
}

std::vector<double> dense(double a, double b, int n, bool logarithmic) {
  std::vector<double> v;
  for (int i = 0; i < n; ++i) {
    const double u = n > 1 ? static_cast<double>(i) / (n - 1) : 0.0;
    v.push_back(logarithmic ? a * std::pow(b / a, u) : a + (b - a) * u);
  }
  return v;
}

int min_extent(const LatticeSpec& spec) {
  int m = spec.extent(0);
  for (int a = 1; a < spec.dimension; ++a) m = std::min(m, spec.extent(a));
  return m;
}

FitWindow eta_window(const ExperimentConfig& c) {
  FitWindow w;
  w.r_min = c.real("correlators.eta_r_min");
  w.r_max = c.real("correlators.eta_r_max");
  w.finite_size_terms = c.boolean("correlators.finite_size_terms");
  return w;
}

Json eta_json(const EtaFit& e, int L) {
  return Json{{"eta", est(e.eta, e.error)},
              {"fit_window", {{"r_min", e.r_min}, {"r_max", e.r_max}, {"used_r_max", e.used_r_max}}},
              {"points", e.points},
              {"finite_size_terms", e.finite_size_terms},
              {"box_length", L},
              {"coefficients", e.coefficients},
              {"power_law_reduced_chi2", e.goodness},
              {"model_reduced_chi2", e.model_goodness},
              {"exponential_reduced_chi2", e.exponential_goodness},
              {"preferred", e.preferred},
              {"poor_fit", e.poor_fit},
              {"exceeds_one", e.exceeds_one},
              {"ergodicity_ok", e.ergodicity_ok},
              {"rho_hat", e.rho_available ? est(e.rho_hat, e.rho_error) : Json()}};
}

double eta_model(const EtaFit& e, double r, int L) {
  double y = e.coefficients[0] + e.coefficients[1] * std::log(r);
  if (e.coefficients.size() == 4) {
    const double u = r / L;
    y += e.coefficients[2] * u + e.coefficients[3] * u * u;
  }
  return std::exp(y);
}

}  // namespace

void RunContext::write(const std::string& name, const std::string& text) {
  write_text(out / name, text);
  if (std::find(outputs.begin(), outputs.end(), name) == outputs.end()) outputs.push_back(name);
}

void RunContext::write(const std::string& name, const Json& j) { write(name, j.dump(2) + "\n"); }

void RunContext::report(const std::string& analysis, const Json& body, const Json& curves) {
  write(analysis + ".report.json", body);
  if (!curves.is_null()) write(analysis + ".curves.json", curves);
}

// ---------------------------------------------------------------------------
// simulate / analyze

void simulate(RunContext& ctx) {
  const auto& c = ctx.config;
  const LatticeSpec spec = c.lattice();
  const Coupling coupling = c.coupling();
  const SamplerConfig sc = c.sampler();
  const Hamiltonian h(spec, coupling);
  if (sc.algorithm != Algorithm::metropolis && !h.nearest_neighbor())
    throw ConfigError("key 'sampler.algorithm': cluster updates need coupling.kind = nearest_neighbor");

  BulkObservable bulk(h);
  TwoPointObservable two_point(spec);
  std::vector<const Observable*> obs{&bulk, &two_point};

  std::unique_ptr<BlockMomentObservable> blocks;
  const auto radii = c.real_list("fluctuations.radii");
  if (!radii.empty()) {
    for (double R : radii) {
      try {
        window_centers(spec, R);
      } catch (const std::invalid_argument& e) {
        throw ConfigError("key 'fluctuations.radii': radius " + format_real(R) + ": " + e.what());
      }
    }
    blocks = std::make_unique<BlockMomentObservable>(spec, radii);
    obs.push_back(blocks.get());
  }
  std::unique_ptr<BoxSumObservable> boxes;
  const auto box_sizes = c.int_list("newman.box_sizes");
  if (!box_sizes.empty()) {
    for (int n : box_sizes)
      if (n < 1 || n > min_extent(spec))
        throw ConfigError("key 'newman.box_sizes': box " + std::to_string(n) + " does not fit the lattice");
    boxes = std::make_unique<BoxSumObservable>(spec, box_sizes);
    obs.push_back(boxes.get());
  }

  SampleSet s = run_chain(spec, coupling, sc, obs, ctx.threads);
  s.provenance.config_hash = ctx.config.hash();  // same key as manifest.json
  save_samples(s, ctx.out);
  for (const auto& d : s.observables) ctx.outputs.push_back("blocks_" + d.name + ".csv");
  ctx.outputs.push_back("series.csv");
  ctx.outputs.push_back("provenance.json");

  Json tau = Json::object();
  double tau_even = 0.5;
  for (const auto& [k, v] : s.tau_int) {
    tau[k] = v;
    if (k == "bulk.m2" || k == "bulk.abs_m" || k == "bulk.e") tau_even = std::max(tau_even, v);
  }
  Json body{{"lattice", {{"dimension", spec.dimension}, {"size", spec.extent(0)}, {"boundary", to_string(spec.boundary)}}},
            {"beta", sc.beta},
            {"algorithm", to_string(sc.algorithm)},
            {"measurements", s.provenance.measurements},
            {"tau_int", tau},
            {"decorrelated_measurements", static_cast<double>(s.provenance.measurements) / (2.0 * tau_even)},
            {"acceptance_rate", s.provenance.acceptance},
            {"mean_cluster_size", s.provenance.mean_cluster_size},
            {"drift_warnings", s.drift_warnings}};
  for (const char* col : {"m", "abs_m", "m2", "m4", "e"}) body["bulk"][col] = est(s.estimate("bulk", col));
  ctx.report("simulation", body);
}

void analyze(RunContext& ctx) {
  const SampleSet s = load_samples(ctx.out);
  const int L = min_extent(s.spec);
  const TwoPointFunction w2 = two_point_from_samples(s);

  Json corr = Json::object();
  Json curves = Json::object();
  const RadialProfile prof = radial_profile(w2, s.spec.periodic() ? L / 2.0 : L - 1.0);
  {
    CsvTable t({"r", "W", "W_err", "multiplicity"});
    for (std::size_t i = 0; i < prof.r.size(); ++i)
      t.add({prof.r[i], prof.mean[i], prof.error[i], static_cast<double>(prof.multiplicity[i])});
    ctx.write("two_point_radial.csv", t.str());
  }
  try {
    const EtaFit e = eta_fit(w2, eta_window(ctx.config));
    corr["eta_fit"] = eta_json(e, L);
    std::vector<double> x, y, err;
    for (std::size_t i = 0; i < prof.r.size(); ++i)
      if (prof.r[i] >= e.r_min - 1e-9 && prof.r[i] <= e.used_r_max + 1e-9) {
        x.push_back(prof.r[i]);
        y.push_back(prof.mean[i]);
        err.push_back(prof.error[i]);
      }
    const auto fx = dense(e.r_min, e.used_r_max, 64, true);
    std::vector<double> fy;
    for (double r : fx) fy.push_back(eta_model(e, r, L));
    curves["eta_fit"] = curve("r", "W(r)", x, y, err, fx, fy);
  } catch (const std::invalid_argument& ex) {
    corr["eta_fit"] = Json{{"error", ex.what()}};
  }
  const SummabilityReport sum = summability_diagnostic(w2, default_radii(w2));
  corr["summability"] = Json{{"verdict", sum.verdict},
                             {"radii", sum.radii},
                             {"partial_sums", sum.partial_sums},
                             {"partial_sum_errors", sum.partial_sum_errors},
                             {"divergence_exponent", est(sum.divergence_exponent, sum.divergence_exponent_error)},
                             {"log_slope", est(sum.log_slope, sum.log_slope_error)},
                             {"tail_decay_rate", est(sum.tail_decay_rate, sum.tail_decay_rate_error)},
                             {"increments_below_noise", sum.increments_below_noise}};
  {
    CsvTable t({"R", "S", "S_err"});
    for (std::size_t i = 0; i < sum.radii.size(); ++i) t.add({sum.radii[i], sum.partial_sums[i], sum.partial_sum_errors[i]});
    ctx.write("summability.csv", t.str());
  }
  if (s.spec.periodic()) {
    const SpectralTable sp = spectral_measure(w2);
    corr["spectral"] = Json{{"min_value", sp.min_value},
                            {"tolerance", sp.epsilon},
                            {"positive", sp.positive()},
                            {"violations", sp.violations.size()},
                            {"max_asymmetry", sp.max_asymmetry}};
  }
  corr["anisotropy"] = prof.anisotropy;
  ctx.report("correlators", corr, curves);

  bool has_blocks = false;
  for (const auto& d : s.observables) has_blocks |= d.name == "block_moments";
  if (!has_blocks) return;

  Json fl = Json::object();
  Json fc = Json::object();
  const FluctuationMoments fm = fluctuation_moments(s);
  try {
    const VarianceFit vf = variance_scaling_fit(fm);
    fl["variance_scaling"] = Json{{"slope_2alpha", est(vf.slope_2alpha, vf.error)},
                                  {"alpha_hat", est(vf.alpha_hat, vf.alpha_error)},
                                  {"rho_hat", vf.rho_hat},
                                  {"eta_hat", vf.eta_hat},
                                  {"verdict", vf.verdict},
                                  {"upper_octave_slope", est(vf.upper_slope, vf.upper_slope_error)},
                                  {"fit_window", {{"R_min", vf.radii.front()}, {"R_max", vf.radii.back()}}}};
    CsvTable t({"R", "variance", "variance_err"});
    for (std::size_t i = 0; i < vf.radii.size(); ++i) t.add({vf.radii[i], vf.variance[i], vf.variance_error[i]});
    ctx.write("block_variance.csv", t.str());
    const auto fx = dense(vf.radii.front(), vf.radii.back(), 32, true);
    std::vector<double> fy;
    for (double R : fx) fy.push_back(std::exp(vf.intercept) * std::pow(R, vf.slope_2alpha));
    fc["variance_scaling"] = curve("R", "V_R", vf.radii, vf.variance, vf.variance_error, fx, fy);

    const CumulantTable ct = cumulants(fm, vf.alpha_hat);
    const GaussianityReport g = gaussianity_test(ct, vf);
    fl["gaussianity"] = Json{{"radii", g.radii},
                             {"g4", g.g4},
                             {"g4_error", g.g4_error},
                             {"g6", g.g6},
                             {"g6_error", g.g6_error},
                             {"kendall_tau", g.trend.tau},
                             {"p_decreasing", g.trend.p_decreasing},
                             {"intercept", est(g.intercept, g.intercept_error)},
                             {"decreasing", g.decreasing},
                             {"intercept_consistent", g.intercept_consistent},
                             {"nonzero_at_all_radii", g.nonzero_at_all_radii},
                             {"verdict", g.verdict},
                             {"alpha", vf.alpha_hat}};
    CsvTable gt({"R", "g4", "g4_err", "g6", "g6_err"});
    std::vector<double> inv;
    for (std::size_t i = 0; i < g.radii.size(); ++i) {
      gt.add({g.radii[i], g.g4[i], g.g4_error[i], g.g6[i], g.g6_error[i]});
      inv.push_back(1.0 / g.radii[i]);
    }
    ctx.write("gaussianity.csv", gt.str());
    const auto gx = dense(0.0, *std::max_element(inv.begin(), inv.end()), 16, false);
    std::vector<double> gy;
    for (double u : gx) gy.push_back(g.intercept + g.slope * u);
    fc["g4_trend"] = curve("1/R", "g4", inv, g.g4, g.g4_error, gx, gy);
  } catch (const std::invalid_argument& ex) {
    fl["error"] = ex.what();
  }
  try {
    const ScalingProbe p = scaling_assumption_probe(cumulants(fm, 0.0), s.spec.dimension);
    fl["scaling_probe"] = Json{{"status", p.status},
                               {"rho_prime", est(p.rho_prime, p.rho_prime_error)},
                               {"slope", est(p.slope, p.slope_error)},
                               {"admissible", p.admissible}};
  } catch (const std::invalid_argument& ex) {
    fl["scaling_probe"] = Json{{"error", ex.what()}};
  }
  ctx.report("fluctuations", fl, fc);
}

// ---------------------------------------------------------------------------
// charfunc

namespace {

LatticeSpec parse_system(const std::string& text, Boundary b) {
  const auto x = text.find('x');
  if (x == std::string::npos) throw ConfigError("key 'charfunc.systems': '" + text + "' is not of the form AxB");
  try {
    const std::vector<int> ext{std::stoi(text.substr(0, x)), std::stoi(text.substr(x + 1))};
    auto spec = LatticeSpec::box(ext, b);
    spec.validate();
    return spec;
  } catch (const std::exception&) {
    throw ConfigError("key 'charfunc.systems': '" + text + "' is not a valid box");
  }
}

}  // namespace

void charfunc(RunContext& ctx) {
  const auto& c = ctx.config;
  const Boundary boundary = boundary_from_string(c.text("charfunc.boundary"));
  const auto betas = c.real_list("charfunc.betas");
  const int periods = static_cast<int>(c.integer("charfunc.periods"));
  const auto z_grid = dense(0.0, 1.0, static_cast<int>(c.integer("charfunc.z_points")), false);
  const Coupling coupling = Coupling::nearest_neighbor(c.real("coupling.J"));

  Json systems = Json::array();
  CsvTable zeros_csv({"system", "beta", "index", "t"});
  CsvTable g_csv({"system", "beta", "z", "G_exact", "G_product", "rel_err"});
  std::vector<std::vector<double>> family_cumulants;
  for (const auto& name : c.text_list("charfunc.systems")) {
    const LatticeSpec spec = parse_system(name, boundary);
    for (double beta : betas) {
      const ExactMoments ex = enumerate(spec, coupling, beta);
      const ZeroSet zs = lee_yang_zeros(ex, periods);
      const DcgReport dcg = dcg_identities(zs, ex);
      double worst = 0.0;
      for (const auto& gp : generating_profile(ex, z_grid)) {
        const double prod = zs.product(gp.z);
        const double rel = std::abs(prod - gp.value) / gp.value;
        worst = std::max(worst, rel);
        g_csv.add_text({name, format_real(beta), format_real(gp.z), format_real(gp.value), format_real(prod), format_real(rel)});
      }
      bool ordered = !zs.t.empty() && zs.t.front() > 0.0;
      for (std::size_t i = 1; i < zs.t.size(); ++i) ordered = ordered && zs.t[i - 1] <= zs.t[i];
      for (std::size_t i = 0; i < zs.base.size(); ++i)
        zeros_csv.add_text({name, format_real(beta), std::to_string(i), format_real(zs.base[i])});
      double max_residual = 0.0;
      for (double r : zs.root_residuals) max_residual = std::max(max_residual, r);
      systems.push_back(Json{{"system", name},
                             {"boundary", to_string(boundary)},
                             {"beta", beta},
                             {"volume", zs.volume},
                             {"first_zero", zs.t.front()},
                             {"circle_deviation", zs.circle_deviation},
                             {"max_root_residual", max_residual},
                             {"zeros_ordered", ordered},
                             {"k_total", dcg.k_total},
                             {"cumulants", dcg.moment_cumulants},
                             {"zero_cumulants", dcg.zero_cumulants},
                             {"dcg_mismatch", dcg.max_relative_mismatch},
                             {"dcg_pass", dcg.pass},
                             {"reconstruction_max_rel_error", worst},
                             {"tail_bound", zs.tail_bound}});
      if (beta == betas.front()) family_cumulants.push_back(dcg.moment_cumulants);
    }
  }
  Json body{{"systems", systems}};
  const ZeroSet one = single_site_zeros(periods);
  body["single_site"] = Json{{"t1", one.t.front()}, {"k_total", one.k_total()}};
  if (family_cumulants.size() >= 3) {
    const SchwarzReport sr = schwarz_chain_check(family_cumulants);
    Json cases = Json::array();
    for (const auto& v : sr.volumes)
      cases.push_back(Json{{"measure_moments", v.measure_moments},
                           {"log_convex", v.log_convex},
                           {"worst_log_convex", v.worst_log_convex},
                           {"literal_form", v.literal_form}});
    body["schwarz"] = Json{{"pass", sr.pass}, {"volumes", cases}};
  }
  ctx.write("lee_yang_zeros.csv", zeros_csv.str());
  ctx.write("generating.csv", g_csv.str());
  ctx.report("charfunc", body);
}

// ---------------------------------------------------------------------------
// dyson

void dyson(RunContext& ctx) {
  const auto& c = ctx.config;
  const double t_min = c.real("dyson.t_min"), t_max = c.real("dyson.t_max");
  const int points = static_cast<int>(c.integer("dyson.points"));
  const double p = c.real("dyson.p"), J = c.real("dyson.J");
  Json alphas = Json::array();
  Json curves = Json::object();
  CsvTable cl_csv({"alpha", "t", "log_abs_cl", "t_pow"});
  CsvTable m_csv({"alpha", "t", "m1"});
  CsvTable d_csv({"alpha", "N", "energy"});
  for (double alpha : c.real_list("dyson.alphas")) {
    const AsymptoticFit af = cloitre_asymptotics(alpha, t_min, t_max, points);
    const DecayConstants dc = decay_constant(alpha);
    const auto grid = log_grid(t_min, t_max, points);
    std::vector<double> x, y;
    for (double t : grid) {
      const CloitreEval ev = cloitre(t, alpha);
      const double u = std::pow(t, 1.0 / alpha);
      cl_csv.add({alpha, t, ev.log_abs, u});
      if (std::isfinite(ev.log_abs)) {
        x.push_back(u);
        y.push_back(-ev.log_abs);
      }
    }
    std::vector<double> fy;
    for (double u : x) fy.push_back(af.intercept + af.slope * u);
    const std::string tag = "alpha_" + format_real(alpha);
    curves["cloitre_" + tag] = curve("t^(1/alpha)", "-log|Cl(t)|", x, y, {}, x, fy);

    const DecaySeries ds = magnetization_decay(p, alpha, J, grid, t_min, t_max);
    std::vector<double> lx, ly, lf;
    for (std::size_t i = 0; i < ds.t.size(); ++i) {
      m_csv.add({alpha, ds.t[i], ds.m1[i]});
      const double r = std::abs(ds.m1[i] / p);
      if (r > 0.0 && r < 1.0) {
        lx.push_back(std::log(ds.t[i]));
        ly.push_back(std::log(-std::log(r)));
        lf.push_back(ds.intercept + ds.exponent * lx.back());
      }
    }
    curves["decay_" + tag] = curve("log t", "log(-log|m1/p|)", lx, ly, {}, lx, lf);

    const DropletFit df = droplet_scaling(alpha, c.int_list("dyson.droplet_sizes"), J);
    std::vector<double> nx, fe;
    for (std::size_t i = 0; i < df.sizes.size(); ++i) {
      d_csv.add({alpha, static_cast<double>(df.sizes[i]), df.energy[i]});
      nx.push_back(df.sizes[i]);
      fe.push_back(std::exp(df.raw_intercept) * std::pow(df.sizes[i], df.raw_slope));
    }
    curves["droplet_" + tag] = curve("N", "E(N)", nx, df.energy, {}, nx, fe);

    alphas.push_back(Json{{"alpha", alpha},
                          {"C_quadrature", est(dc.C, dc.C_error)},
                          {"cloitre_slope", est(af.slope, af.slope_error)},
                          {"relative_deviation", af.relative_deviation},
                          {"K", af.K},
                          {"K_halves", {af.K_first_half, af.K_second_half}},
                          {"fit_window", {{"t_min", af.t_min}, {"t_max", af.t_max}, {"points", af.points}}},
                          {"decay_exponent", est(ds.exponent, ds.exponent_error)},
                          {"decay_expected", 1.0 / alpha},
                          {"droplet_slope", est(df.slope, df.slope_error)},
                          {"droplet_raw_slope", df.raw_slope},
                          {"droplet_expected", df.expected},
                          {"droplet_relative_deviation", df.relative_deviation}});
  }

  const double t_end = c.real("dyson.meanfield_t"), dt = c.real("dyson.dt");
  MeanFieldState frozen;
  frozen.a = frozen.b = 1.0;
  frozen.c = 0.3;
  frozen.M = {0.6, 0.8, 0.0};
  MeanFieldState generic;
  generic.a = 1.0;
  generic.b = 0.5;
  generic.c = -0.3;
  generic.M = {0.3, 0.5, std::sqrt(1.0 - 0.34)};
  CsvTable mf_csv({"case", "t", "M1", "M2", "M3", "casimir_drift"});
  Json mf = Json::object();
  for (const auto& [name, st] : {std::pair{"frozen", frozen}, std::pair{"generic", generic}}) {
    const Trajectory tr = meanfield_integrate(st, t_end, dt);
    for (std::size_t i = 0; i < tr.t.size(); ++i)
      mf_csv.add_text({name, format_real(tr.t[i]), format_real(tr.M[i][0]), format_real(tr.M[i][1]),
                       format_real(tr.M[i][2]), format_real(tr.casimir_drift[i])});
    mf[name] = Json{{"a", st.a}, {"b", st.b}, {"c", st.c}, {"M0", st.M},
                    {"max_deviation", tr.max_deviation},
                    {"max_casimir_drift", tr.max_casimir_drift},
                    {"reversal_error", meanfield_reversal_error(st, t_end, dt)},
                    {"t_end", t_end}, {"dt", dt}};
  }
  ctx.write("cloitre.csv", cl_csv.str());
  ctx.write("magnetization_decay.csv", m_csv.str());
  ctx.write("droplet.csv", d_csv.str());
  ctx.write("meanfield.csv", mf_csv.str());
  ctx.report("dyson", Json{{"alphas", alphas}, {"meanfield", mf}}, curves);
}

// ---------------------------------------------------------------------------
// gap

void gap(RunContext& ctx) {
  const auto& c = ctx.config;
  const std::string bname = c.text("gap.boundary");
  GapBoundary boundary;
  if (bname == "plus") boundary = GapBoundary::plus;
  else if (bname == "minus") boundary = GapBoundary::minus;
  else if (bname == "none") boundary = GapBoundary::none;
  else throw ConfigError("key 'gap.boundary': expected plus, minus or none");
  const double J3 = c.real("gap.J3");
  const int max_sites = static_cast<int>(c.integer("gap.max_sites"));

  Json dom = Json::array();
  for (int two_s : {1, 2, 3})
    for (int sign : {1, -1}) {
      const DominationResult d = domination_check(two_s, sign);
      dom.push_back(Json{{"two_s", two_s}, {"sign", sign}, {"min_eigenvalue", d.min_eigenvalue}, {"pass", d.pass}});
    }
  Json chains = Json::array();
  CsvTable t({"two_s", "sites", "J3", "J", "gap", "bound", "margin", "sublattice_diff", "pass"});
  bool all = true;
  double worst_sublattice = 0.0;
  for (int two_s : c.int_list("gap.two_s"))
    for (double J : c.real_list("gap.J"))
      for (int n = 2; n <= max_sites; ++n) {
        const auto chain = QuantumChainSpec::nearest_neighbor(n, two_s, J3, J);
        if (chain.dimension() > kMaxQuantumDimension) continue;
        const GapResult g = gap_check(chain, boundary);
        const double sub = sublattice_equivalence(chain);
        worst_sublattice = std::max(worst_sublattice, sub);
        all = all && g.pass;
        t.add({static_cast<double>(two_s), static_cast<double>(n), J3, J, g.gap, g.bound, g.margin, sub, g.pass ? 1.0 : 0.0});
        chains.push_back(Json{{"two_s", two_s}, {"sites", n}, {"J", J}, {"gap", g.gap}, {"bound", g.bound},
                              {"margin", g.margin}, {"ground_degeneracy", g.ground_degeneracy},
                              {"polarized_overlap", g.polarized_overlap}, {"pass", g.pass}});
      }
  ctx.write("gap.csv", t.str());
  ctx.report("gap", Json{{"boundary", bname},
                         {"J3", J3},
                         {"domination", dom},
                         {"chains", chains},
                         {"all_pass", all},
                         {"max_sublattice_difference", worst_sublattice}});
}

// ---------------------------------------------------------------------------
// newman

void newman(RunContext& ctx) {
  const auto& c = ctx.config;
  const int dim = static_cast<int>(c.integer("lattice.dimension"));
  const auto z = log_grid(c.real("newman.z_min"), c.real("newman.z_max"), static_cast<int>(c.integer("newman.z_points")));
  Json body = Json::object();
  Json curves = Json::object();
  CsvTable prof_csv({"source", "n", "z", "f", "f_err"});
  CsvTable tau_csv({"source", "n", "tau2", "tau2_err"});

  {
    const auto sizes = c.int_list("newman.exact_sizes");
    const Boundary b = boundary_from_string(c.text("newman.exact_boundary"));
    const double beta = c.real("newman.exact_beta");
    std::vector<ExactMoments> ex;
    for (int n : sizes) ex.push_back(enumerate(LatticeSpec::cubic(dim, n, b), Coupling::nearest_neighbor(c.real("coupling.J")), beta));
    const auto ez = dense(0.0, c.real("newman.exact_z_max"), static_cast<int>(c.integer("newman.exact_z_points")), false);
    const ProfileSeries ps = profile_estimate(ex, sizes, ez);
    const ProfileChecks pc = profile_checks(ps);
    const VarianceSeries vs = exact_variance_series(ex, sizes);
    for (std::size_t v = 0; v < ps.sizes.size(); ++v)
      for (std::size_t i = 0; i < ps.z.size(); ++i) prof_csv.add_text({"exact", std::to_string(ps.sizes[v]), format_real(ps.z[i]), format_real(ps.f[v][i]), "0"});
    for (std::size_t v = 0; v < vs.sizes.size(); ++v)
      tau_csv.add_text({"exact", std::to_string(vs.sizes[v]), format_real(vs.tau2[v]), "0"});
    body["exact"] = Json{{"beta", beta},
                         {"boundary", to_string(b)},
                         {"sizes", sizes},
                         {"zero_at_origin", pc.zero_at_origin},
                         {"convex", pc.convex},
                         {"worst_convexity", pc.worst_convexity},
                         {"symmetric", pc.symmetric},
                         {"monotone_in_volume", pc.monotone_in_volume},
                         {"worst_monotonicity", pc.worst_monotonicity},
                         {"tau2", vs.tau2}};
  }

  if (fs::exists(ctx.out / "provenance.json") && fs::exists(ctx.out / "blocks_box_sums.csv")) {
    const SampleSet s = load_samples(ctx.out);
    std::vector<int> sizes;
    std::vector<long> volumes;
    const auto samples = box_sum_samples(s, sizes, volumes);
    const int blocks = s.sampler.blocks;
    const VarianceSeries vs = variance_series(samples, sizes, volumes, blocks);
    const ProfileSeries ps = profile_estimate(samples, sizes, volumes, z, blocks);
    for (std::size_t v = 0; v < ps.sizes.size(); ++v)
      for (std::size_t i = 0; i < ps.z.size(); ++i)
        prof_csv.add_text({"mc", std::to_string(ps.sizes[v]), format_real(ps.z[i]), format_real(ps.f[v][i]), format_real(ps.f_error[v][i])});
    for (std::size_t v = 0; v < vs.sizes.size(); ++v)
      tau_csv.add_text({"mc", std::to_string(vs.sizes[v]), format_real(vs.tau2[v]), format_real(vs.tau2_error[v])});
    Json mc{{"sizes", sizes}, {"tau2", vs.tau2}, {"tau2_error", vs.tau2_error}};

    const TwoPointFunction w2 = two_point_from_samples(s);
    std::optional<Estimate> eta_ref;
    try {
      const EtaFit e = eta_fit(w2, eta_window(c));
      eta_ref = Estimate{e.eta, e.error};
    } catch (const std::invalid_argument&) {
    }
    try {
      const ExponentEstimates ee = exponent_estimates(ps, vs, s.spec.dimension, eta_ref);
      mc["p_hat"] = est(ee.p_hat, ee.p_error);
      mc["eta_hat"] = est(ee.eta_hat, ee.eta_error);
      mc["tau_slope"] = est(ee.tau_slope, ee.tau_slope_error);
      if (ee.eta_discrepancy_sigma) mc["eta_discrepancy_sigma"] = *ee.eta_discrepancy_sigma;
      const BgReport bg = bg_check(ee.p_hat, ee.eta_hat, s.spec.dimension, ee.p_error, ee.eta_error);
      mc["bg"] = Json{{"lhs", bg.lhs}, {"rhs", bg.rhs}, {"sigma", bg.sigma}, {"margin", bg.margin}, {"pass", bg.pass},
                      {"gaussian_endpoint", bg.gaussian_endpoint}, {"p_below_one", bg.p_below_one}};
      std::vector<double> nx, ty, te, fy;
      for (std::size_t v = 0; v < vs.sizes.size(); ++v) {
        nx.push_back(vs.sizes[v]);
        ty.push_back(vs.tau2[v]);
        te.push_back(vs.tau2_error[v]);
        fy.push_back(std::exp(ee.tau2_intercept) * std::pow(vs.sizes[v], 2.0 * ee.tau_slope));
      }
      curves["tau2_scaling"] = curve("n", "tau_n^2", nx, ty, te, nx, fy);
      if (ee.p_hat > 1.0) {
        const TailReport tr = tail_bound_check(standardize(samples.back()), ee.p_hat);
        mc["tail"] = Json{{"p", tr.p}, {"q", tr.q}, {"c", tr.c}, {"c_mgf", tr.c_mgf}, {"c_tail", tr.c_tail}, {"finite", tr.finite}};
      }
    } catch (const std::invalid_argument& ex) {
      mc["exponents_error"] = ex.what();
    }
    const int L = min_extent(s.spec);
    const RadialProfile rp = radial_profile(w2, s.spec.periodic() ? L / 2.0 : L - 1.0);
    const RadialTable table = RadialTable::from_profile(rp);
    const SandwichReport sw = sandwich_check(vs, table, s.spec.dimension, c.real("newman.max_spread"), rp.error);
    mc["sandwich"] = Json{{"c", sw.c1}, {"K1", sw.K1}, {"K2", sw.K2}, {"spread", sw.spread}, {"feasible", sw.feasible},
                          {"negative_F", sw.negative_F}, {"note", sw.note}};
    CsvTable g_csv({"R", "G"});
    for (double R : table.r) g_csv.add({R, table.G(R)});
    ctx.write("radial_G.csv", g_csv.str());
    body["mc"] = mc;
  }
  ctx.write("profiles.csv", prof_csv.str());
  ctx.write("tau2.csv", tau_csv.str());
  ctx.report("newman", body, curves.empty() ? Json() : curves);
}

// ---------------------------------------------------------------------------

void run_stages(RunContext& ctx) {
  const auto stages = ctx.config.text_list("run.stages");
  if (stages.empty()) throw ConfigError("key 'run.stages': no stages listed");
  for (const auto& s : stages)
    if (s != "simulate" && s != "analyze" && s != "charfunc" && s != "dyson" && s != "gap" && s != "newman")
      throw ConfigError("key 'run.stages': unknown stage '" + s + "'");
  for (const auto& s : stages) {
    if (s == "simulate") simulate(ctx);
    else if (s == "analyze") analyze(ctx);
    else if (s == "charfunc") charfunc(ctx);
    else if (s == "dyson") dyson(ctx);
    else if (s == "gap") gap(ctx);
    else newman(ctx);
  }
}

void write_manifest(const RunContext& ctx, double wall_seconds) {
  const fs::path path = ctx.out / "manifest.json";
  Json runs = Json::array();
  if (fs::exists(path)) {
    try {
      const Json old = read_json(path);
      if (old.contains("runs") && old["runs"].is_array()) runs = old["runs"];
    } catch (const DataError&) {
    }
  }
  char stamp[32];
  const std::time_t now = std::time(nullptr);
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  runs.push_back(Json{{"command", ctx.command},
                      {"seed", ctx.config.unsigned_integer("run.seed")},
                      {"config_hash", ctx.config.hash()},
                      {"threads", ctx.threads},
                      {"wall_time_seconds", wall_seconds},
                      {"finished_utc", stamp},
                      {"outputs", ctx.outputs}});
  Json m{{"tool", "critlab"},
         {"version", CRITLAB_VERSION},
         {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                       std::to_string(EIGEN_MINOR_VERSION)},
         {"compiler", __VERSION__},
         {"config", "config.resolved.cfg"},
         {"runs", runs}};
  write_json(path, m);
}

Json report(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw UsageError("'" + dir.string() + "' is not a directory");
  if (!fs::exists(dir / "manifest.json")) throw UsageError(dir.string() + ": no manifest.json; not an artifact directory");
  std::set<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file()) files.insert(e.path());
  for (const auto& f : files)
    if (f.extension() == ".csv") read_csv(f);

  const std::string suffix = ".report.json";
  Json merged = Json::object();
  for (const auto& f : files) {
    const std::string name = f.filename().string();
    if (name.size() <= suffix.size() || name.compare(name.size() - suffix.size(), suffix.size(), suffix) != 0) continue;
    merged[name.substr(0, name.size() - suffix.size())] = read_json(f);
  }
  write_json(dir / "report.json", merged);

  const std::string csuffix = ".curves.json";
  for (const auto& f : files) {
    const std::string name = f.filename().string();
    if (name.size() <= csuffix.size() || name.compare(name.size() - csuffix.size(), csuffix.size(), csuffix) != 0) continue;
    const std::string analysis = name.substr(0, name.size() - csuffix.size());
    const Json curves = read_json(f);
    for (const auto& [relation, cv] : curves.items()) {
      std::string text = "# " + analysis + " " + relation + ": " + cv.at("x").get<std::string>() + " vs " +
                         cv.at("y").get<std::string>() + "\n# index 0: data (x y [err]); index 1: fitted curve\n";
      for (const auto& row : cv.at("data")) {
        for (std::size_t i = 0; i < row.size(); ++i) text += (i ? " " : "") + format_real(row[i].get<double>());
        text += "\n";
      }
      text += "\n\n";
      for (const auto& row : cv.at("fit")) text += format_real(row[0].get<double>()) + " " + format_real(row[1].get<double>()) + "\n";
      write_text(dir / (analysis + "_" + relation + ".dat"), text);
    }
  }
  return merged;
}

}  // namespace critlab::cli
