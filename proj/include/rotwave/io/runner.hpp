#pragma once

// Dispatch from a validated RunConfig to the compute modules, emitting CSV
// matrices plus a JSON metadata sidecar.  All numeric output is
// deterministic; the only run-dependent metadata field is the timestamp.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <string>
#include <vector>

#include "rotwave/expansion.hpp"
#include "rotwave/io/config.hpp"
#include "rotwave/io/output.hpp"
#include "rotwave/observables.hpp"
#include "rotwave/revivals.hpp"
#include "rotwave/states.hpp"
#include "rotwave/toprotor.hpp"

namespace rotwave::io {

inline constexpr const char* library_version = "1.0.0";

struct RunOutcome {
  std::vector<std::string> files;
  json meta;
};

namespace detail {

inline bool axial_family(const std::string& f) {
  return f == "linear-exponential" || f == "uniform-linear";
}

inline SphericalExpansion build_spherical_state(const RunConfig& c) {
  if (c.family == "exponential")
    return states::exponential_wp({c.N, c.eta}, c.tail_tol);
  if (c.family == "gaussian-seed")
    return states::gaussian_seed_wp({c.N, c.eta, c.epsilon}, c.tail_tol);
  if (c.family == "linear-exponential")
    return states::linear_exponential_axial(c.N, c.tail_tol);
  if (c.family == "uniform-linear")
    return states::uniform_linear_wp(c.etaN);
  if (c.family == "boson")
    return states::boson_circular_state(
        {std::sqrt(c.k2), c.two_s, c.integer_truncated}, c.tail_tol);
  throw std::domain_error("no spherical state for family '" + c.family + "'");
}

inline json config_json(const RunConfig& c) {
  json j;
  j["task"] = c.task;
  j["family"] = c.family;
  j["N"] = c.N;
  j["eta"] = c.eta;
  j["epsilon"] = c.epsilon;
  j["etaN"] = c.etaN;
  j["k2"] = c.k2;
  j["two_s"] = c.two_s;
  j["integer_truncated"] = c.integer_truncated;
  j["r"] = c.r;
  j["lambda"] = c.lambda;
  j["omega0"] = c.omega0;
  j["delta"] = c.delta;
  if (c.delta_rational)
    j["delta_rational"] = std::to_string(c.delta_rational->second) + "/" +
                          std::to_string(c.delta_rational->first);
  json times = json::array();
  for (const auto& t : c.times)
    times.push_back(t.is_rational ? json(t.rat.str()) : json(t.value));
  j["times"] = times;
  j["theta_fixed"] = c.theta_fixed;
  j["beta0"] = c.beta0;
  j["n_theta"] = c.n_theta;
  j["n_phi"] = c.n_phi;
  j["n_alpha"] = c.n_alpha;
  j["n_gamma"] = c.n_gamma;
  j["n_times"] = c.n_times;
  j["t_max"] = c.t_max;
  j["classical_phases"] = c.classical_phases;
  j["sin_weighted"] = c.sin_weighted;
  j["tail_tol"] = c.tail_tol;
  j["outdir"] = c.outdir;
  j["prefix"] = c.prefix;
  return j;
}

inline std::string time_tag(const TimeEntry& t) {
  if (t.is_rational)
    return std::to_string(t.rat.num) + "_" + std::to_string(t.rat.den);
  std::string s = format_g17(t.value);
  for (char& ch : s)
    if (ch == '.' || ch == '-' || ch == '+') ch = 'p';
  return s;
}

}  // namespace detail

inline RunOutcome run(const RunConfig& c) {
  RunOutcome out;
  const std::filesystem::path dir = c.outdir;
  const std::string prefix = c.prefix.empty() ? c.task + "_" : c.prefix;
  auto path = [&](const std::string& name) {
    const auto p = dir / (prefix + name);
    out.files.push_back(p.string());
    return p;
  };

  json meta;
  meta["library_version"] = library_version;
  meta["config"] = detail::config_json(c);

  if (c.task == "density") {
    const auto s = detail::build_spherical_state(c);
    const auto g = observables::density_grid(s, c.n_theta, c.n_phi,
                                             c.sin_weighted);
    write_csv_matrix(path("grid.csv"), "theta_rad", "phi_rad", g.theta_nodes,
                     g.phi_nodes, g.values);
    meta["frame"] = frame_name(s.frame());
    meta["l_max"] = s.l_max();
  } else if (c.task == "evolve") {
    const auto s = detail::build_spherical_state(c);
    meta["frame"] = frame_name(s.frame());
    meta["l_max"] = s.l_max();
    json tlist = json::array();
    for (const auto& t : c.times) {
      const auto st = c.classical_phases
                          ? revivals::classical_wave(s, t.value)
                          : revivals::evolve(s, t.value, 1.0);
      const auto g = observables::density_grid(st, c.n_theta, c.n_phi,
                                               c.sin_weighted);
      write_csv_matrix(path("t" + detail::time_tag(t) + ".csv"), "theta_rad",
                       "phi_rad", g.theta_nodes, g.phi_nodes, g.values);
      tlist.push_back(t.value);
    }
    meta["times_over_Trev"] = tlist;
  } else if (c.task == "carpet") {
    const auto s = detail::build_spherical_state(c);
    const auto times = observables::uniform_times(c.t_max, c.n_times);
    meta["frame"] = frame_name(s.frame());
    meta["l_max"] = s.l_max();
    if (detail::axial_family(c.family)) {
      const auto cp = revivals::carpet_axial(s, times, c.n_theta,
                                             c.classical_phases);
      write_csv_matrix(path("grid.csv"), "t_over_Trev", "theta_rad", cp.times,
                       cp.axis, cp.values);
    } else {
      const auto cp = revivals::carpet(s, c.theta_fixed, times, c.n_phi);
      write_csv_matrix(path("grid.csv"), "t_over_Trev", "phi_rad", cp.times,
                       cp.axis, cp.values);
      meta["theta_fixed"] = c.theta_fixed;
    }
  } else if (c.task == "autocorr") {
    const auto s = detail::build_spherical_state(c);
    const auto tc = revivals::time_constants(s, c.omega0);
    const auto times = observables::uniform_times(c.t_max, c.n_times);
    const auto a = observables::autocorrelation(s, times, 1.0);
    std::vector<std::vector<std::string>> rows(times.size());
    for (std::size_t i = 0; i < times.size(); ++i)
      rows[i] = {format_g17(times[i]), format_g17(a[i])};
    write_csv_table(path("grid.csv"), {"t_over_Trev", "autocorrelation"}, rows);
    meta["T_rev"] = tc.T_rev;
    meta["T_cl"] = tc.T_cl;
    meta["I_bar"] = tc.I_bar;
    meta["l_max"] = s.l_max();
  } else if (c.task == "decompose") {
    for (const auto& t : c.times) {
      Rational rt = t.rat;
      if (!t.is_rational && !io::detail::float_to_rational(t.value, 64, rt))
        throw std::domain_error("decompose: non-rational time");
      const auto [m, n] = revivals::reduce_fraction_mod_half(int(rt.num),
                                                             int(rt.den));
      json dj;
      dj["input"] = rt.str();
      dj["reduced"] = std::to_string(m) + "/" + std::to_string(n);
      std::vector<std::vector<std::string>> rows;
      if (m == 0) {
        dj["identity"] = true;
        rows.push_back({"0", "0", "1", "0", "1", "1"});
        dj["q"] = 1;
      } else {
        const auto d = revivals::gauss_decompose(m, n);
        dj["identity"] = false;
        dj["q"] = d.q;
        dj["l"] = d.l;
        dj["s0"] = d.s0;
        for (int s = 0; s < d.l; ++s)
          rows.push_back({std::to_string(s), format_g17(d.t_s[s]),
                          format_g17(d.a[s].real()), format_g17(d.a[s].imag()),
                          format_g17(std::abs(d.a[s])),
                          s == d.s0 ? "1" : "0"});
      }
      write_csv_table(path(detail::time_tag(t) + ".csv"),
                      {"s", "t_s_over_Trev", "re_a", "im_a", "abs_a", "is_s0"},
                      rows);
      meta["decompositions"].push_back(dj);
    }
  } else if (c.task == "clones") {
    auto s = detail::build_spherical_state(c);
    if (s.frame() != Frame::Lab) s = to_lab_frame(s);
    meta["l_max"] = s.l_max();
    for (const auto& t : c.times) {
      Rational rt = t.rat;
      if (!t.is_rational && !io::detail::float_to_rational(t.value, 64, rt))
        throw std::domain_error("clones: non-rational time");
      const auto [m, n] = revivals::reduce_fraction_mod_half(int(rt.num),
                                                             int(rt.den));
      std::vector<std::vector<std::string>> rows;
      if (m == 0) {
        rows.push_back({"0", "0", "clone", "1", "1", "0"});
      } else {
        const auto rep = revivals::clone_report(s, m, n);
        for (const auto& e : rep)
          rows.push_back({std::to_string(e.s), format_g17(e.t_s),
                          revivals::wave_class_name(e.classification),
                          format_g17(e.fidelity_at_zero),
                          format_g17(e.best_fidelity),
                          format_g17(e.best_rotation)});
      }
      write_csv_table(path(detail::time_tag(t) + ".csv"),
                      {"s", "t_s_over_Trev", "class", "fidelity_at_zero",
                       "best_fidelity", "best_rotation_rad"},
                      rows);
    }
  } else if (c.task == "top-evolve") {
    const auto st = states::top_coherent_state({c.r, c.lambda}, c.tail_tol);
    toprotor::RotorSpec spec{c.omega0, c.delta, c.delta_rational};
    const auto tc = toprotor::top_time_constants(st, spec);
    meta["l_max"] = st.l_max();
    meta["I_bar"] = tc.I_bar;
    meta["K_bar"] = tc.K_bar;
    meta["T_rev_I"] = tc.T_rev_I;
    meta["T_cl_I"] = tc.T_cl_I;
    meta["T_rev_K"] = tc.T_rev_K;
    meta["T_cl_K"] = tc.T_cl_K_infinite ? json("inf") : json(tc.T_cl_K);
    if (tc.T_rev_IK) meta["T_rev_IK"] = *tc.T_rev_IK;
    json tlist = json::array();
    // Times are in units of T_rev_K; for rational delta = 1/2 this equals
    // T_rev_IK, matching the published captions.
    for (const auto& t : c.times) {
      const double t_abs = t.value * tc.T_rev_K;
      const auto g = toprotor::top_evolve(st, t_abs, tc, c.beta0, c.n_alpha,
                                          c.n_gamma);
      write_csv_matrix(path("t" + detail::time_tag(t) + ".csv"), "alpha_rad",
                       "gamma_rad", g.alpha_nodes, g.gamma_nodes, g.values);
      tlist.push_back(t.value);
    }
    meta["times_over_TrevK"] = tlist;
  } else if (c.task == "compare-boson") {
    const auto ex = states::exponential_wp({c.N, 1.0}, c.tail_tol);
    const auto bs = states::boson_circular_state(
        {std::sqrt(c.k2), c.two_s, c.integer_truncated}, c.tail_tol);
    const int L = std::max(ex.l_max(), bs.l_max());
    std::vector<std::vector<std::string>> rows;
    double max_diff = 0.0;
    for (int I = 0; I <= L; ++I) {
      double we = 0.0;
      if (I <= ex.l_max())
        for (int M = -I; M <= I; ++M) we += std::norm(ex.at(I, M));
      double wb = 0.0;
      if (I <= bs.l_max())
        for (int M = -I; M <= I; ++M) wb += std::norm(bs.at(I, M));
      max_diff = std::max(max_diff, std::abs(we - wb));
      rows.push_back({std::to_string(I), format_g17(we), format_g17(wb)});
    }
    write_csv_table(path("weights.csv"),
                    {"I", "exponential_CI2", "boson_CI2"}, rows);
    meta["max_abs_difference"] = max_diff;
  } else if (c.task == "report") {
    const auto s = detail::build_spherical_state(c);
    const auto r = observables::angular_momentum_report(s);
    const auto u = observables::uncertainty_check(s);
    const auto tc = revivals::time_constants(s, c.omega0);
    std::vector<std::vector<std::string>> rows = {
        {"mean_Lx", format_g17(r.mean_Lx)},
        {"mean_Ly", format_g17(r.mean_Ly)},
        {"mean_Lz", format_g17(r.mean_Lz)},
        {"mean_Lx2", format_g17(r.mean_Lx2)},
        {"mean_Ly2", format_g17(r.mean_Ly2)},
        {"mean_Lz2", format_g17(r.mean_Lz2)},
        {"mean_L2", format_g17(r.mean_L2)},
        {"var_Lx", format_g17(r.var_Lx)},
        {"var_Ly", format_g17(r.var_Ly)},
        {"uncertainty_product", format_g17(r.uncertainty_product)},
        {"lz_bound", format_g17(r.lz_bound)},
        {"uncertainty_saturated", u.satisfied ? "1" : "0"},
        {"I_bar", format_g17(tc.I_bar)},
        {"T_rev", format_g17(tc.T_rev)},
        {"T_cl", format_g17(tc.T_cl)},
        {"l_max", std::to_string(s.l_max())},
    };
    if (r.mean_L2 - r.mean_Lz2 > 0.0) {
      const auto sp = revivals::spread_estimates(c.N, r, c.omega0);
      rows.push_back({"delta_L_eta", format_g17(sp.delta_L_eta)});
      rows.push_back({"tau_eta", format_g17(sp.tau_eta)});
      rows.push_back({"q_max", format_g17(sp.q_max)});
    }
    write_csv_table(path("values.csv"), {"quantity", "value"}, rows);
  } else {
    throw std::domain_error("run: unknown task '" + c.task + "'");
  }

  const auto now = std::chrono::system_clock::now().time_since_epoch();
  meta["timestamp_unix"] =
      std::chrono::duration_cast<std::chrono::seconds>(now).count();
  meta["files"] = out.files;
  const auto meta_path = dir / (prefix + "meta.json");
  write_json(meta_path, meta);
  out.meta = meta;
  out.files.push_back(meta_path.string());
  return out;
}

// ---------------------------------------------------------------------------
// Canned configurations, one per published figure.

struct FigureRecipe {
  std::string name;
  std::string description;
  std::vector<RunConfig> runs;
};

namespace detail {

inline TimeEntry rat(int m, int n) {
  TimeEntry t;
  t.is_rational = true;
  t.rat = {m, n};
  t.value = double(m) / n;
  return t;
}

}  // namespace detail

inline std::vector<FigureRecipe> figure_recipes() {
  using detail::rat;
  std::vector<FigureRecipe> v;
  auto base = [](const std::string& task, const std::string& family,
                 const std::string& prefix) {
    RunConfig c;
    c.task = task;
    c.family = family;
    c.prefix = prefix;
    return c;
  };

  {
    FigureRecipe f{"fig1", "partial-wave weights, exponential vs boson, N=20 k2=39", {}};
    auto c = base("compare-boson", "", "fig1_");
    c.N = 20;
    c.k2 = 39;
    f.runs.push_back(c);
    v.push_back(f);
  }
  {
    FigureRecipe f{"fig2", "autocorrelation, N=20, eta in {1, 0.5, 0}", {}};
    for (double eta : {1.0, 0.5, 0.0}) {
      auto c = base("autocorr", "exponential", "fig2_eta" + format_g17(eta) + "_");
      c.N = 20;
      c.eta = eta;
      c.t_max = 0.5;
      c.n_times = 4096;
      f.runs.push_back(c);
    }
    v.push_back(f);
  }
  {
    FigureRecipe f{"fig3", "circular wave packet densities, spreading and fractional times", {}};
    auto c = base("evolve", "exponential", "fig3_");
    c.N = 20;
    c.eta = 1.0;
    c.times = {rat(0, 1), rat(1, 50), rat(1, 20), rat(1, 10),
               rat(1, 6), rat(1, 4),  rat(1, 2)};
    f.runs.push_back(c);
    v.push_back(f);
  }
  {
    FigureRecipe f{"fig4", "carpet at theta = pi/2, circular N=20", {}};
    auto c = base("carpet", "exponential", "fig4_");
    c.N = 20;
    c.eta = 1.0;
    c.t_max = 0.5;
    c.n_times = 2048;
    c.n_phi = 720;
    f.runs.push_back(c);
    v.push_back(f);
  }
  {
    FigureRecipe f{"fig5", "classical-phase axial carpet, linear N=50", {}};
    auto c = base("carpet", "linear-exponential", "fig5_");
    c.N = 50;
    c.classical_phases = true;
    c.sin_weighted = true;
    c.t_max = 1.0;
    c.n_times = 1024;
    c.n_theta = 512;
    f.runs.push_back(c);
    v.push_back(f);
  }
  {
    FigureRecipe f{"fig6", "quadratic-phase axial carpet, linear N=50", {}};
    auto c = base("carpet", "linear-exponential", "fig6_");
    c.N = 50;
    c.sin_weighted = true;
    c.t_max = 0.5;
    c.n_times = 2048;
    c.n_theta = 512;
    f.runs.push_back(c);
    v.push_back(f);
  }
  {
    FigureRecipe f{"fig7", "uniform linear packet, etaN=20, fractional times", {}};
    auto c = base("evolve", "uniform-linear", "fig7_");
    c.etaN = 20;
    c.times = {rat(0, 1), rat(1, 10), rat(1, 6), rat(1, 4), rat(1, 3), rat(1, 2)};
    f.runs.push_back(c);
    v.push_back(f);
  }
  {
    FigureRecipe f{"fig8", "clone-to-mutant transition, eta in {1,1/2,1/4,0} at 1/3 and 1/4", {}};
    for (double eta : {1.0, 0.5, 0.25, 0.0}) {
      auto c = base("evolve", "exponential", "fig8_eta" + format_g17(eta) + "_");
      c.N = 20;
      c.eta = eta;
      c.times = {rat(1, 3), rat(1, 4)};
      f.runs.push_back(c);
    }
    v.push_back(f);
  }
  {
    FigureRecipe f{"fig9", "elliptic packet eta=0.5, same time sequence as fig3", {}};
    auto c = base("evolve", "exponential", "fig9_");
    c.N = 20;
    c.eta = 0.5;
    c.times = {rat(0, 1), rat(1, 50), rat(1, 20), rat(1, 10),
               rat(1, 6), rat(1, 4),  rat(1, 2)};
    f.runs.push_back(c);
    v.push_back(f);
  }
  {
    FigureRecipe f{"fig10", "symmetric top, irrational delta = 1/sqrt(3)", {}};
    auto c = base("top-evolve", "top", "fig10_");
    c.r = 4;
    c.lambda = 0.5 * specfun::pi;
    c.beta0 = 0.5 * specfun::pi;
    c.delta = 1.0 / std::sqrt(3.0);
    c.times = {rat(0, 1), rat(1, 6), rat(1, 3), rat(1, 2), rat(1, 1)};
    f.runs.push_back(c);
    v.push_back(f);
  }
  {
    FigureRecipe f{"fig11", "symmetric top, rational delta = 1/2, clones at 1/6 1/3 1/2", {}};
    auto c = base("top-evolve", "top", "fig11_");
    c.r = 4;
    c.lambda = 0.5 * specfun::pi;
    c.beta0 = 0.5 * specfun::pi;
    c.delta = 0.5;
    c.delta_rational = {2, 1};
    c.times = {rat(0, 1), rat(1, 6), rat(1, 3), rat(1, 2), rat(1, 1)};
    f.runs.push_back(c);
    v.push_back(f);
  }
  return v;
}

}  // namespace rotwave::io
