#include "scenario.hpp"

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "fbh/bubbletree.hpp"
#include "fbh/identities.hpp"
#include "fbh/reflection.hpp"
#include "fbh/wente.hpp"
#include "svg.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace fbh;

namespace fbhcli {

// ---------------------------------------------------------------- config

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

std::string Config::get(const std::string& key, const std::string& def) const {
  used.insert(key);
  auto it = kv.find(key);
  return it == kv.end() ? def : it->second;
}

std::string Config::require(const std::string& key) const {
  used.insert(key);
  auto it = kv.find(key);
  if (it == kv.end()) throw ConfigError("missing required key '" + key + "' in " + path);
  return it->second;
}

double Config::get_num(const std::string& key, double def) const {
  std::string v = get(key);
  if (v.empty()) return def;
  try {
    return std::stod(v);
  } catch (...) {
    throw ConfigError("key '" + key + "' is not a number: '" + v + "'");
  }
}

int Config::get_int(const std::string& key, int def) const {
  return (int)std::lround(get_num(key, def));
}

std::vector<double> Config::get_list(const std::string& key,
                                     const std::vector<double>& def) const {
  std::string v = get(key);
  if (v.empty()) return def;
  std::vector<double> out;
  std::stringstream ss(v);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      out.push_back(std::stod(trim(cell)));
    } catch (...) {
      throw ConfigError("key '" + key + "' has a non-numeric entry: '" + cell + "'");
    }
  }
  return out;
}

std::vector<std::string> Config::unknown_keys() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : kv)
    if (!used.count(k)) out.push_back(k);
  return out;
}

Config parse_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file " + path);
  Config cfg;
  cfg.path = path;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(path + ":" + std::to_string(lineno) + ": empty key");
    if (cfg.kv.count(key))
      throw ConfigError(path + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
    cfg.kv[key] = val;
  }
  return cfg;
}

// ---------------------------------------------------------------- helpers

namespace {

std::string hash_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot open " + path);
  std::uint64_t h = 1469598103934665603ull;
  char c;
  while (is.get(c)) {
    h ^= (unsigned char)c;
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

DomainSpec parse_domain(const Config& cfg) {
  DomainSpec ds;
  std::string kind = cfg.get("domain.kind", "half_disc");
  if (kind == "half_disc") ds.kind = DomainKind::half_disc;
  else if (kind == "full_disc") ds.kind = DomainKind::full_disc;
  else if (kind == "annulus") ds.kind = DomainKind::annulus;
  else if (kind == "half_annulus") ds.kind = DomainKind::half_annulus;
  else if (kind == "window") ds.kind = DomainKind::rectangle_halfplane_window;
  else throw ConfigError("unknown domain.kind '" + kind + "'");
  ds.inner = cfg.get_num("domain.inner", 0.0);
  ds.outer = cfg.get_num("domain.outer", 1.0);
  ds.nodes_per_diameter = cfg.get_int("domain.nodes", 129);
  ds.validate();
  return ds;
}

SolverConfig parse_solver(const Config& cfg) {
  SolverConfig sc;
  sc.step = cfg.get_num("solver.step", sc.step);
  sc.armijo = cfg.get_num("solver.armijo", sc.armijo);
  sc.tol_tangent = cfg.get_num("solver.tol", sc.tol_tangent);
  sc.max_iters = cfg.get_int("solver.max_iters", sc.max_iters);
  sc.validate();
  return sc;
}

GluingFamily parse_family(const Config& cfg) {
  GluingFamily f;
  f.dim = cfg.get_int("family.dim", 3);
  std::string base = cfg.get("family.base", "");
  if (base.rfind("bubble:", 0) == 0) {
    int deg = std::stoi(base.substr(7));
    f.base_profile = HalfPlaneBubble(AnalyticBubble::canonical(deg, f.dim - 1));
  } else if (!base.empty()) {
    std::stringstream ss(base);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.base_constant.push_back(std::stod(trim(cell)));
    if ((int)f.base_constant.size() != f.dim)
      throw ConfigError("family.base must have family.dim components");
  }
  for (int i = 0;; ++i) {
    std::string pre = "family.bubble." + std::to_string(i) + ".";
    if (!cfg.has(pre + "degree")) break;
    int deg = cfg.get_int(pre + "degree", 1);
    BubbleSpec b{HalfPlaneBubble(AnalyticBubble::canonical(deg, f.dim - 1)),
                 cfg.get_num(pre + "center", 0.0), cfg.get_num(pre + "lambda0", 0.25)};
    f.bubbles.push_back(std::move(b));
  }
  if (f.base_constant.empty() && !f.base_profile) {
    if (f.bubbles.empty()) {
      f.base_constant.assign(f.dim, 0.0);
      f.base_constant[0] = 1.0;
    } else {
      f.base_constant = f.bubbles[0].profile.value_at_infinity();
    }
  }
  return f;
}

void write_table(const std::string& path, const std::string& header,
                 const std::vector<std::vector<double>>& rows) {
  std::ofstream os(path);
  os << header << "\n";
  os.precision(12);
  for (const auto& r : rows) {
    for (std::size_t c = 0; c < r.size(); ++c) os << (c ? "," : "") << r[c];
    os << "\n";
  }
}

void write_field_csv(const std::string& path, const MapField& u) {
  std::ofstream os(path);
  write_csv(os, u);
}

void write_energy_density_csv(const std::string& path, const MapField& u) {
  const Grid& g = u.grid();
  Gradient gr = gradient(u);
  std::ofstream os(path);
  os << "x,y,e\n";
  os.precision(12);
  for (std::size_t idx = 0; idx < g.num_nodes(); ++idx) {
    if (g.node_class(idx) == NodeClass::outside) continue;
    double x, y;
    g.node_coords(idx, x, y);
    os << x << "," << y << "," << gr.sq_norm_at(idx) << "\n";
  }
}

void write_boundary_csv(const std::string& path, const MapField& u) {
  const Grid& g = u.grid();
  std::ofstream os(path);
  os << "x,density\n";
  os.precision(12);
  std::vector<double> nd(u.dim());
  for (std::size_t idx : g.flat_boundary()) {
    double x, y;
    g.node_coords(idx, x, y);
    flat_normal_derivative(u, idx, nd);
    auto v = u.at(idx);
    double dot = 0.0;
    for (int c = 0; c < u.dim(); ++c) dot += v[c] * nd[c];
    os << x << "," << dot << "\n";
  }
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
  }
};

/// Harmonizes the schedule, optionally across a small thread pool.
std::vector<SolveResult> harmonize_schedule(const GluingFamily& f, const std::vector<int>& ms,
                                            const LaplaceSolver& solver, const SolverConfig& sc,
                                            int threads) {
  std::vector<std::optional<SolveResult>> slots(ms.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex err_mu;
  auto work = [&]() {
    for (;;) {
      std::size_t k = next.fetch_add(1);
      if (k >= ms.size()) return;
      try {
        slots[k] = harmonize_family(f, ms[k], solver, sc);
      } catch (...) {
        std::lock_guard<std::mutex> lk(err_mu);
        if (!err) err = std::current_exception();
        return;
      }
    }
  };
  int nt = std::max(1, std::min<int>(threads, (int)ms.size()));
  std::vector<std::thread> pool;
  for (int t = 1; t < nt; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
  std::vector<SolveResult> out;
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace

// ---------------------------------------------------------------- scenarios

int run_scenario(const Config& cfg, int threads) {
  Timer total;
  std::string name = cfg.require("name");
  if (name.empty()) throw ConfigError("name must be nonempty");
  std::string kind = cfg.require("kind");
  std::string outdir = cfg.get("out", "runs/" + name);
  unsigned seed = (unsigned)cfg.get_int("seed", 1);
  bool plots = cfg.get("plot", "false") == "true";
  fs::create_directories(outdir);

  json manifest;
  manifest["name"] = name;
  manifest["kind"] = kind;
  manifest["seed"] = seed;
  manifest["version"] = "1.0";
  manifest["config"] = cfg.path;
  json outputs = json::array();
  json timings;
  int exit_code = kOk;

  auto emit = [&](const std::string& file) { outputs.push_back(file); };

  if (kind == "constants") {
    int nodes = cfg.get_int("domain.nodes", 129);
    int bank = cfg.get_int("constants.bank", 100);
    Timer t;
    WenteConstants c = measure_constants(nodes, bank, seed);
    timings["measure_ms"] = t.ms();
    std::string cpath = outdir + "/constants.json";
    {
      std::ofstream os(cpath);
      write_constants_json(os, c);
    }
    emit("constants.json");
    manifest["results"] = {{"K0", c.K0}, {"K1", c.K1}, {"K2", c.K2},
                           {"eps2", c.eps2}, {"eps1", c.eps1}};
    manifest["constants_hash"] = hash_file(cpath);
  } else if (kind == "solve" || kind == "identities" || kind == "reflect" ||
             kind == "bubbletree" || kind == "neckscan") {
    DomainSpec ds = parse_domain(cfg);
    Grid grid(ds);
    LaplaceSolver solver(grid);
    SolverConfig sc = parse_solver(cfg);
    GluingFamily fam = parse_family(cfg);
    std::vector<double> msd = cfg.get_list("family.ms", {1.0});
    std::vector<int> ms(msd.begin(), msd.end());

    Timer t_solve;
    std::vector<SolveResult> solves = harmonize_schedule(fam, ms, solver, sc, threads);
    timings["solve_ms"] = t_solve.ms();
    json jsolves = json::array();
    bool all_converged = true;
    for (std::size_t k = 0; k < solves.size(); ++k) {
      const SolveReport& r = solves[k].report;
      all_converged = all_converged && r.converged;
      jsolves.push_back({{"m", ms[k]}, {"iterations", r.iterations},
                         {"tangential_residual", r.tangential_residual},
                         {"energy", r.energy}, {"converged", r.converged}});
    }
    manifest["solves"] = jsolves;
    if (!all_converged) exit_code = kNotConverged;

    const MapField& ulast = solves.back().field;
    write_field_csv(outdir + "/u_m" + std::to_string(ms.back()) + ".csv", ulast);
    emit("u_m" + std::to_string(ms.back()) + ".csv");
    write_energy_density_csv(outdir + "/energy_density.csv", ulast);
    emit("energy_density.csv");
    write_boundary_csv(outdir + "/boundary.csv", ulast);
    emit("boundary.csv");

    if (kind == "identities") {
      auto radii = cfg.get_list("identities.radii", {0.25, 0.5, 0.75});
      FreeBoundaryResidual fb = free_boundary_residual(ulast);
      IdentityReport rep = pohozaev_check(ulast, radii);
      std::vector<std::vector<double>> rows;
      for (std::size_t i = 0; i < rep.at.size(); ++i)
        rows.push_back({rep.at[i], rep.mismatch[i]});
      write_table(outdir + "/identities.csv", "radius,pohozaev_mismatch", rows);
      emit("identities.csv");
      manifest["results"] = {{"sup_modulus_defect", fb.sup_modulus_defect},
                             {"tangential_norm", fb.tangential_norm},
                             {"pohozaev_max_mismatch", rep.max_mismatch}};
    } else if (kind == "reflect") {
      SymmetrizedSystem sys = symmetrize(ulast);
      TestFunctionBank bank = TestFunctionBank::cover_disc(ds.outer * 0.9);
      ResidualStats weak = weak_residual_div_form(sys, bank);
      DivFreeStats df = divfree_check(sys, bank, cfg.get_list("reflect.radii", {0.4, 0.6, 0.8}));
      ReflectionEnergy re = reflection_energy_identity(sys);
      manifest["results"] = {{"weak_residual_max", weak.max_abs}, {"weak_residual_rms", weak.rms},
                             {"divfree_weak_max", df.weak_divergence.max_abs},
                             {"divfree_flux_max", df.circle_flux.max_abs},
                             {"lower_energy", re.lower}, {"upper_weighted", re.upper_weighted},
                             {"min_A", sys.min_A}, {"max_A", sys.max_A}};
    } else if (kind == "bubbletree") {
      std::string cfile = cfg.get("constants.file", "");
      if (cfile.empty())
        throw ConfigError(
            "bubbletree needs constants.file (run a `constants` scenario first and point "
            "constants.file at its constants.json)");
      std::ifstream cis(cfile);
      if (!cis) throw ConfigError("cannot open constants.file " + cfile);
      WenteConstants consts = read_constants_json(cis);
      manifest["constants_hash"] = hash_file(cfile);
      double eps1 = consts.eps1;

      std::vector<const MapField*> fields;
      for (auto& s : solves) fields.push_back(&s.field);
      auto det = detect_concentration(fields, eps1, cfg.get_list("detect.radii", {0.05, 0.1}));
      json jdet = json::array();

      double R = cfg.get_num("extract.R", 8.0);
      std::vector<double> energies, centers;
      json jbubbles = json::array();
      std::vector<std::vector<double>> neck_rows;
      auto Rs = cfg.get_list("neck.R", {2.0, 4.0, 8.0});
      for (std::size_t p = 0; p < det.points.size(); ++p) {
        double a = det.points[p];
        double r_i = cfg.get_num("detect.r_i", 0.5);
        for (std::size_t q = 0; q < det.points.size(); ++q)
          if (q != p) r_i = std::min(r_i, std::abs(det.points[q] - a) / 2.0);
        double lam_sel = select_scale(ulast, a, r_i, eps1);
        double lam_ext = std::min(lam_sel, r_i / R);
        auto ext = rescale_extract(ulast, a, lam_ext, R,
                                   cfg.get_int("extract.nodes", 129));
        jdet.push_back({{"x", a}, {"ball_energy", det.ball_energies[p]},
                        {"selected_lambda", lam_sel}});
        if (ext.has_bubble) {
          energies.push_back(ext.energy);
          centers.push_back(a);
          auto q = quantization_report({ext.energy});
          jbubbles.push_back({{"center", a}, {"degree", ext.degree}, {"energy", ext.energy},
                              {"nearest_k", q[0].k}, {"quantization_gap", q[0].gap},
                              {"plane_residual", ext.plane_residual}});
        }
        for (std::size_t k = 0; k < solves.size(); ++k) {
          double lam_m = select_scale(solves[k].field, a, r_i, eps1);
          for (const NeckRow& row : neck_scan(solves[k].field, a, lam_m, Rs))
            neck_rows.push_back({(double)ms[k], row.R, row.delta, row.energy, row.l2weak,
                                 row.l21theta, row.flux});
        }
      }
      write_table(outdir + "/neck.csv", "m,R,delta,energy,l2weak,l21theta,flux", neck_rows);
      emit("neck.csv");

      GluingFamily base_only = fam;
      base_only.bubbles.clear();
      SolveResult base = harmonize_family(base_only, ms.back(), solver, sc);
      std::vector<std::function<double(double)>> psis{[](double) { return 1.0; }};
      auto mc = residual_and_measure_check(fam, ms, fields, base.field, energies, centers, psis);
      json jres = json::array();
      for (std::size_t k = 0; k < ms.size(); ++k)
        jres.push_back({{"m", ms[k]}, {"residual_flux", mc.residual_flux[k]},
                        {"measure_defect_psi1", mc.psi_defects[0][k]}});
      manifest["results"] = {{"detected", jdet}, {"bubbles", jbubbles},
                             {"residuals", jres}, {"eps1", eps1},
                             {"interior_hotspots", det.interior_x.size()}};
    } else if (kind == "neckscan") {
      double a = cfg.get_num("neck.center", 0.0);
      double lam = cfg.get_num("neck.lambda", 0.0625);
      auto Rs = cfg.get_list("neck.R", {2.0, 4.0, 8.0});
      std::vector<std::vector<double>> rows;
      for (std::size_t k = 0; k < solves.size(); ++k)
        for (const NeckRow& row : neck_scan(solves[k].field, a, lam, Rs))
          rows.push_back({(double)ms[k], row.R, row.delta, row.energy, row.l2weak,
                          row.l21theta, row.flux});
      write_table(outdir + "/neck.csv", "m,R,delta,energy,l2weak,l21theta,flux", rows);
      emit("neck.csv");
    }
  } else if (kind == "wente") {
    DomainSpec ds = parse_domain(cfg);
    Grid grid(ds);
    LaplaceSolver solver(grid);
    int bank_size = cfg.get_int("wente.bank", 50);
    auto bank = random_trig_bank(grid, bank_size, seed);
    auto ratios = wente_ratio_probe(bank, solver);
    std::vector<std::vector<double>> rows;
    double k0 = 0.0, k1 = 0.0;
    for (std::size_t i = 0; i < ratios.size(); ++i) {
      rows.push_back({(double)i, ratios[i].ratio_grad, ratios[i].ratio_sup, ratios[i].ratio_l21});
      k0 = std::max(k0, ratios[i].ratio_grad);
      k1 = std::max(k1, ratios[i].ratio_l21);
    }
    write_table(outdir + "/wente.csv", "sample,ratio_grad,ratio_sup,ratio_l21", rows);
    emit("wente.csv");
    manifest["results"] = {{"K0_bank_sup", k0}, {"L21_bank_sup", k1}};
  } else {
    throw ConfigError("unknown scenario kind '" + kind + "'");
  }

  auto unknown = cfg.unknown_keys();
  if (!unknown.empty()) {
    std::string msg = "unknown config keys:";
    for (const auto& k : unknown) msg += " " + k;
    throw ConfigError(msg);
  }

  timings["total_ms"] = total.ms();
  manifest["timings"] = timings;
  manifest["outputs"] = outputs;
  manifest["exit_code"] = exit_code;
  {
    std::ofstream os(outdir + "/manifest.json");
    os << manifest.dump(2) << "\n";
  }
  if (plots) {
    int pc = emit_plots(outdir);
    if (pc != kOk) return pc;
  }
  return exit_code;
}

int emit_plots(const std::string& run_dir) {
  std::string mpath = run_dir + "/manifest.json";
  std::ifstream is(mpath);
  if (!is) {
    std::cerr << "fbh plot: no manifest.json in " << run_dir << "\n";
    return kValidationError;
  }
  json manifest;
  try {
    is >> manifest;
  } catch (const std::exception& e) {
    std::cerr << "fbh plot: malformed manifest: " << e.what() << "\n";
    return kValidationError;
  }
  try {
    if (fs::exists(run_dir + "/energy_density.csv"))
      svg_heatmap(run_dir + "/energy_density.csv", run_dir + "/energy_density.svg");
    if (fs::exists(run_dir + "/neck.csv"))
      svg_neck_lines(run_dir + "/neck.csv", run_dir + "/neck.svg");
    if (fs::exists(run_dir + "/boundary.csv")) {
      std::vector<double> ax, aw;
      if (manifest.contains("results") && manifest["results"].contains("bubbles")) {
        for (const auto& b : manifest["results"]["bubbles"]) {
          ax.push_back(b["center"].get<double>());
          aw.push_back(b["energy"].get<double>());
        }
      }
      svg_boundary_measure(run_dir + "/boundary.csv", ax, aw, run_dir + "/boundary.svg");
    }
  } catch (const std::exception& e) {
    std::cerr << "fbh plot: " << e.what() << "\n";
    return kValidationError;
  }
  return kOk;
}

}  // namespace fbhcli
