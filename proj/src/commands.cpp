#include "levyfilter/commands.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "levyfilter/errors.hpp"
#include "levyfilter/particle_filter.hpp"
#include "levyfilter/symbols.hpp"

namespace levyfilter {

namespace {

/// Opens `out` for writing, or returns std::cout for "-".
class OutFile {
 public:
  explicit OutFile(const std::string& name) {
    if (name == "-") return;
    file_.open(name, std::ios::binary | std::ios::trunc);
    if (!file_) throw Error("cannot open '" + name + "' for writing");
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }
  void close() {
    if (!file_.is_open()) return;
    file_.close();
    if (!file_) throw Error("write failed");
  }

 private:
  std::ofstream file_;
};

PathRecord load_path(const std::string& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error("cannot open path file '" + file + "'");
  return read_path_csv(in);
}

std::string indexed_name(const std::string& out, std::size_t i) {
  const auto dot = out.rfind('.');
  const auto slash = out.find_last_of('/');
  const bool has_ext = dot != std::string::npos && (slash == std::string::npos || dot > slash);
  const std::string stem = has_ext ? out.substr(0, dot) : out;
  const std::string ext = has_ext ? out.substr(dot) : std::string(".csv");
  return stem + "_" + std::to_string(i) + ext;
}

/// Runs task(i) for i < count on up to `threads` workers; rethrows the first error.
template <class F>
void parallel_for(std::size_t count, unsigned threads, F task) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  std::mutex mu;
  std::exception_ptr error;
  std::size_t next = 0;
  auto worker = [&] {
    for (;;) {
      std::size_t i;
      {
        std::lock_guard lock(mu);
        if (next >= count || error) return;
        i = next++;
      }
      try {
        task(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!error) error = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < threads; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace

std::uint64_t replicate_seed(std::uint64_t seed, std::size_t r) {
  return derive_seed(seed, 0x5245504cULL, r);
}

CompareResult compare_engines(const ModelSpec& model, const PathRecord& path, const Grid& grid,
                              const std::vector<double>& thresholds, const CompareSettings& s) {
  if (s.replicates < 2) throw DomainError("at least two particle-filter replicates are required");
  CompareResult res;
  res.thresholds = thresholds;
  ZakaiSolver solver(model, grid, path.dt);
  res.zakai = solver.run(path, thresholds);

  std::vector<FilterOutput> reps(s.replicates);
  parallel_for(s.replicates, s.threads, [&](std::size_t r) {
    PfOptions opts;
    opts.resample_threshold = s.resample_threshold;
    ParticleFilter pf(model, s.particles, path.dt, replicate_seed(s.seed, r), opts);
    reps[r] = pf.run(path, thresholds);
  });

  const double R = static_cast<double>(s.replicates);
  auto mean_se = [&](auto get) {
    double m = 0.0;
    for (const auto& o : reps) m += get(o);
    m /= R;
    double v = 0.0;
    for (const auto& o : reps) v += (get(o) - m) * (get(o) - m);
    return std::pair{m, std::sqrt(v / (R - 1.0) / R)};
  };
  for (std::size_t k = 0; k < res.zakai.rows.size(); ++k) {
    CompareRow row;
    row.t = res.zakai.rows[k].t;
    row.mean_zakai = res.zakai.rows[k].mean;
    std::tie(row.mean_pf, row.mean_pf_stderr) =
        mean_se([k](const FilterOutput& o) { return o.rows[k].mean; });
    for (std::size_t i = 0; i < thresholds.size(); ++i) {
      row.p_zakai.push_back(res.zakai.rows[k].p_exceed[i]);
      const auto [m, se] = mean_se([k, i](const FilterOutput& o) { return o.rows[k].p_exceed[i]; });
      row.p_pf.push_back(m);
      row.p_pf_stderr.push_back(se);
    }
    res.rows.push_back(std::move(row));
  }
  return res;
}

void write_compare_csv(std::ostream& os, const CompareResult& r) {
  os << "t,mean_zakai,mean_pf,mean_pf_stderr,abs_dmean";
  for (double a : r.thresholds) {
    const std::string c = threshold_column(a);
    os << ",zakai_" << c << ",pf_" << c << ",pf_stderr_" << c << ",abs_d" << c;
  }
  os << "\n";
  os.precision(17);
  for (const auto& row : r.rows) {
    os << row.t << "," << row.mean_zakai << "," << row.mean_pf << "," << row.mean_pf_stderr << ","
       << row.abs_dmean();
    for (std::size_t i = 0; i < r.thresholds.size(); ++i)
      os << "," << row.p_zakai[i] << "," << row.p_pf[i] << "," << row.p_pf_stderr[i] << ","
         << row.abs_dp(i);
    os << "\n";
  }
}

void cmd_simulate(const RunConfig& cfg, const std::string& out) {
  const ModelSpec model = build_model(cfg);
  if (cfg.paths == 1) {
    const PathRecord p = simulate_path(model, cfg.t, cfg.dt, cfg.seed);
    OutFile f(out);
    write_path_csv(f.stream(), p);
    f.close();
    return;
  }
  if (out == "-") throw DomainError("several paths need a file name, not standard output");
  parallel_for(cfg.paths, 0, [&](std::size_t i) {
    const PathRecord p = simulate_path(model, cfg.t, cfg.dt, path_seed(cfg.seed, i));
    OutFile f(indexed_name(out, i));
    write_path_csv(f.stream(), p);
    f.close();
  });
}

void cmd_filter(const RunConfig& cfg, const std::string& path_csv, const std::string& out) {
  const ModelSpec model = build_model(cfg);
  const PathRecord path = load_path(path_csv);
  FilterOutput res;
  if (cfg.engine == "pf") {
    PfOptions opts;
    opts.resample_threshold = cfg.pf_resample_threshold;
    res = ParticleFilter(model, cfg.pf_particles, path.dt, cfg.seed, opts).run(path, cfg.thresholds);
  } else {
    ZakaiSolver solver(model, build_grid(cfg), path.dt);
    res = solver.run(path, cfg.thresholds);
  }
  if (res.clip_warnings > 0)
    std::cerr << "warning: " << res.clip_warnings
              << " steps produced negative values beyond the clipping tolerance; refine the grid\n";
  if (res.mass_warnings > 0)
    std::cerr << "warning: " << res.mass_warnings
              << " observed jumps had a conditional law with mass away from one; used the normalised law\n";
  OutFile f(out);
  write_filter_csv(f.stream(), res);
  f.close();
}

void cmd_compare(const RunConfig& cfg, const std::string& path_csv, const std::string& out) {
  const ModelSpec model = build_model(cfg);
  const PathRecord path = load_path(path_csv);
  CompareSettings s;
  s.particles = cfg.pf_particles;
  s.replicates = cfg.pf_replicates;
  s.resample_threshold = cfg.pf_resample_threshold;
  s.seed = cfg.seed;
  const CompareResult r = compare_engines(model, path, build_grid(cfg), cfg.thresholds, s);
  OutFile f(out);
  write_compare_csv(f.stream(), r);
  f.close();
}

void cmd_symbol(const RunConfig& cfg, const std::string& out) {
  const ModelSpec model = build_model(cfg);
  if (!model.l0) throw DomainError("symbol needs an L0 component (model.l0.kind)");
  const SymbolFn psi = make_L0_symbol(*model.l0);
  std::vector<SymbolFn> phis;
  for (double z : cfg.symbol_z) phis.push_back(make_Bz_symbol(model.copula, model.nu1, model.nu2, z));

  OutFile f(out);
  std::ostream& os = f.stream();
  os << "xi,re_psi,im_psi";
  for (double z : cfg.symbol_z) {
    std::ostringstream n;
    n << z;
    os << ",re_phi_" << n.str() << ",im_phi_" << n.str();
  }
  os << "\n";
  os.precision(17);
  const double llo = std::log(cfg.symbol_xi_min);
  const double lhi = std::log(cfg.symbol_xi_max);
  for (std::size_t i = 0; i < cfg.symbol_points; ++i) {
    const double xi = std::exp(llo + (lhi - llo) * static_cast<double>(i) /
                                         static_cast<double>(cfg.symbol_points - 1));
    const Complex v = psi(xi);
    os << xi << "," << v.real() << "," << v.imag();
    for (const auto& phi : phis) {
      const Complex w = phi(xi);
      os << "," << w.real() << "," << w.imag();
    }
    os << "\n";
  }
  f.close();
}

bool cmd_check(const RunConfig& cfg, std::ostream& os) {
  const ModelSpec model = build_model(cfg);
  const WellposednessReport rep = check_wellposedness(model);
  os << "alpha0- = " << rep.alpha0_minus << "\n";
  os << "beta+ = " << rep.beta_plus << "\n";
  os << "k(z) ~ " << rep.k_fit.prefactor << " z^" << rep.k_fit.exponent << "\n";
  for (const auto& s : rep.k_samples) os << "  k(" << s.z << ") = " << s.k << "\n";
  if (std::isnan(rep.p_chosen))
    os << "p: no admissible p in (1, 2]\n";
  else
    os << "p = " << rep.p_chosen << "\n";
  os << "delta_g = " << rep.delta_g << ", rho = " << rep.rho << ", rho0 = " << rep.rho0 << "\n";
  for (const auto& c : rep.conditions)
    os << "  " << c.name << ": " << (c.pass ? "ok" : "violated") << " (" << c.detail << ")\n";
  os << "verdict: " << (rep.verdict ? "well-posed" : "not shown to be well-posed") << "\n";
  for (const auto& c : rep.conditions) os << "condition=" << c.name << " pass=" << (c.pass ? 1 : 0) << "\n";
  return rep.verdict;
}

}  // namespace levyfilter
