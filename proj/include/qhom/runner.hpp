#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include "qhom/bloch.hpp"
#include "qhom/cache.hpp"
#include "qhom/cell.hpp"
#include "qhom/direct1d.hpp"
#include "qhom/io.hpp"
#include "qhom/spectral.hpp"
#include "qhom/tensor.hpp"

namespace qhom::runner {

struct Tolerances {
  double solver = 1e-9;
  double grad = 1e-8;
  double asym = 1e-8;
};

struct ExperimentConfig {
  io::CoefficientSpec coefficient = io::preset("constant-identity");
  std::vector<double> delta_schedule{1e-1, 1e-2, 1e-3, 1e-4};
  int truncation = 16;
  double fd_step = 1e-3;
  std::vector<Vec> eta_grid;  // defaulted from d when empty
  tensor::Route route = tensor::Route::cell;

  double transform_delta = 1e-2;
  std::vector<double> transform_eps{1. / 8, 1. / 16, 1. / 32, 1. / 64, 1. / 128, 1. / 256};
  std::vector<Vec> xi_grid;  // defaulted from d when empty
  std::string g_preset = "gaussian";

  std::vector<double> direct_eps{1. / 16, 1. / 32, 1. / 64, 1. / 128, 1. / 256, 1. / 512};
  int mesh_factor = 64;

  std::vector<std::string> stages{"lift", "eig", "cell", "tensor", "transform", "direct"};
  std::filesystem::path out_dir = "out";
  Tolerances tol;
  int threads = 1;
  std::uint64_t seed = 0;

  void apply_defaults() {
    int d = coefficient.A.dim();
    if (eta_grid.empty()) {
      eta_grid.push_back(Vec::Zero(d));
      for (int c = 0; c < d; ++c)
        for (double v : {0.05, -0.05, 0.25, -0.25}) eta_grid.push_back(v * Vec::Unit(d, c));
    }
    if (xi_grid.empty()) {
      for (int i = 0; i < 9; ++i) {
        double v = -2.0 + 0.5 * i;
        for (int c = 0; c < d; ++c) {
          Vec xi = v * Vec::Unit(d, c);
          bool seen = false;
          for (const auto& u : xi_grid) seen |= ((u - xi).norm() == 0);
          if (!seen) xi_grid.push_back(xi);
        }
      }
    }
  }

  void validate() const {
    if (delta_schedule.empty() || transform_eps.empty() || direct_eps.empty() ||
        eta_grid.empty() || xi_grid.empty())
      throw Error(Errc::config, "schedules and grids must be nonempty");
    for (auto* sched : {&delta_schedule, &transform_eps, &direct_eps})
      for (std::size_t i = 0; i + 1 < sched->size(); ++i)
        if ((*sched)[i + 1] >= (*sched)[i])
          throw Error(Errc::config, "schedules must be strictly decreasing");
    if (!(tol.solver > 0 && tol.grad > 0 && tol.asym > 0))
      throw Error(Errc::config, "tolerances must be positive");
    if (truncation < 1) throw Error(Errc::config, "truncation must be >= 1");
    if (!(fd_step > 0 && 2 * fd_step < 0.5)) throw Error(Errc::config, "bad fd step");
    if (mesh_factor < 16) throw Error(Errc::config, "mesh factor must be >= 16");
    if (g_preset != "gaussian" && g_preset != "bump")
      throw Error(Errc::config, "unknown g preset");
    for (const auto& s : stages)
      if (s != "lift" && s != "eig" && s != "cell" && s != "tensor" && s != "transform" &&
          s != "direct")
        throw Error(Errc::config, "unknown stage '" + s + "'");
  }

  static ExperimentConfig from_json(const io::json& j);
  io::json to_json() const;
};

inline ExperimentConfig ExperimentConfig::from_json(const io::json& j) {
  ExperimentConfig c;
  if (j.contains("coefficient")) {
    const auto& jc = j["coefficient"];
    c.coefficient = jc.contains("preset") ? io::preset(jc["preset"].get<std::string>())
                                          : io::coefficient_from_json(jc);
  }
  if (j.contains("delta_schedule"))
    c.delta_schedule = j["delta_schedule"].get<std::vector<double>>();
  c.truncation = j.value("truncation", c.truncation);
  c.fd_step = j.value("fd_step", c.fd_step);
  if (j.contains("route")) {
    std::string r = j["route"].get<std::string>();
    if (r == "cell") c.route = tensor::Route::cell;
    else if (r == "hessian") c.route = tensor::Route::hessian;
    else throw Error(Errc::config, "route must be cell or hessian");
  }
  int d = c.coefficient.A.dim();
  if (j.contains("eta_grid"))
    for (const auto& row : j["eta_grid"]) {
      Vec v(d);
      for (int i = 0; i < d; ++i) v[i] = row[i].get<double>();
      c.eta_grid.push_back(v);
    }
  if (j.contains("transform")) {
    const auto& jt = j["transform"];
    c.transform_delta = jt.value("delta", c.transform_delta);
    if (jt.contains("eps_schedule")) c.transform_eps = jt["eps_schedule"].get<std::vector<double>>();
    if (jt.contains("xi_grid"))
      for (const auto& row : jt["xi_grid"]) {
        Vec v(d);
        for (int i = 0; i < d; ++i) v[i] = row[i].get<double>();
        c.xi_grid.push_back(v);
      }
    c.g_preset = jt.value("g", c.g_preset);
  }
  if (j.contains("direct")) {
    const auto& jd = j["direct"];
    if (jd.contains("eps_schedule")) c.direct_eps = jd["eps_schedule"].get<std::vector<double>>();
    c.mesh_factor = jd.value("mesh_factor", c.mesh_factor);
  }
  if (j.contains("stages")) c.stages = j["stages"].get<std::vector<std::string>>();
  if (j.contains("out_dir")) c.out_dir = j["out_dir"].get<std::string>();
  if (j.contains("tolerances")) {
    const auto& jt = j["tolerances"];
    c.tol.solver = jt.value("solver", c.tol.solver);
    c.tol.grad = jt.value("grad", c.tol.grad);
    c.tol.asym = jt.value("asym", c.tol.asym);
  }
  c.threads = j.value("threads", c.threads);
  c.seed = j.value("seed", std::uint64_t(0));
  c.apply_defaults();
  c.validate();
  return c;
}

namespace detail {

inline io::json vecs_to_json(const std::vector<Vec>& vs) {
  io::json out = io::json::array();
  for (const auto& v : vs) {
    io::json row = io::json::array();
    for (int i = 0; i < v.size(); ++i) row.push_back(v[i]);
    out.push_back(row);
  }
  return out;
}

inline std::uint64_t coefficient_hash(const io::CoefficientSpec& spec) {
  Fnv64 h;
  h.add(spec.A.dim()).add(spec.A.size());
  for (int k = 0; k < spec.A.size(); ++k)
    for (int l = 0; l < spec.A.size(); ++l)
      for (const auto& t : spec.A.at(k, l).terms()) {
        h.add(k).add(l);
        for (int c = 0; c < t.freq.size(); ++c) h.add(t.freq[c]);
        h.add(t.amp.real()).add(t.amp.imag());
      }
  if (spec.lambda_override)
    for (int i = 0; i < spec.lambda_override->rows(); ++i)
      for (int c = 0; c < spec.lambda_override->cols(); ++c) h.add((*spec.lambda_override)(i, c));
  return h.value();
}

}  // namespace detail

inline io::json ExperimentConfig::to_json() const {
  io::json j;
  j["coefficient_name"] = coefficient.name;
  j["coefficient_hash"] = detail::coefficient_hash(coefficient);
  j["delta_schedule"] = delta_schedule;
  j["truncation"] = truncation;
  j["fd_step"] = fd_step;
  j["route"] = tensor::to_string(route);
  j["eta_grid"] = detail::vecs_to_json(eta_grid);
  j["transform"] = {{"delta", transform_delta},
                    {"eps_schedule", transform_eps},
                    {"xi_grid", detail::vecs_to_json(xi_grid)},
                    {"g", g_preset}};
  j["direct"] = {{"eps_schedule", direct_eps}, {"mesh_factor", mesh_factor}};
  j["stages"] = stages;
  j["tolerances"] = {{"solver", tol.solver}, {"grad", tol.grad}, {"asym", tol.asym}};
  j["seed"] = seed;
  // out_dir and threads do not affect numeric payloads and stay out of the hash
  return j;
}

struct StageRecord {
  std::string name;
  std::vector<std::string> files;
  double seconds = 0;
  bool cached = false;
  std::string error;  // empty on success
};

struct RunRecord {
  std::string config_hash;
  std::vector<StageRecord> stages;
  std::vector<std::string> warnings;

  io::json to_json() const {
    io::json j;
    j["config_hash"] = config_hash;
    j["warnings"] = warnings;
    io::json st = io::json::array();
    for (const auto& s : stages)
      st.push_back({{"name", s.name},
                    {"files", s.files},
                    {"seconds", s.seconds},
                    {"cached", s.cached},
                    {"error", s.error}});
    j["stages"] = st;
    j["files"] = io::json::array({"run_record.json"});
    for (auto& s : stages)
      for (auto& f : s.files) j["files"].push_back(f);
    return j;
  }
};

namespace detail {

class StageIO {
 public:
  StageIO(const std::filesystem::path& out_dir) : out_(out_dir) {
    std::filesystem::create_directories(out_);
  }
  void emit(const std::string& filename, const std::string& content) {
    std::ofstream f(out_ / filename, std::ios::binary | std::ios::trunc);
    f << content;
    payload_[filename] = content;
  }
  std::vector<std::string> files() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : payload_) out.push_back(k);
    return out;
  }
  std::string payload_json() const {
    io::json j;
    j["files"] = payload_;
    return j.dump();
  }
  // restore from a cache payload; returns the file list
  std::vector<std::string> restore(const std::string& payload) {
    io::json j = io::json::parse(payload);
    for (auto& [name, content] : j["files"].items())
      emit(name, content.get<std::string>());
    return files();
  }

 private:
  std::filesystem::path out_;
  std::map<std::string, std::string> payload_;
};

}  // namespace detail

// Executes the requested stages (plus dependencies) in order
// lift -> eig/cell -> tensor -> transform -> direct, emitting deterministic
// CSV/JSON payloads; a warm cache reproduces the payload bytes without
// recomputation. A failed stage aborts its dependents only.
inline RunRecord run(const ExperimentConfig& cfg_in, DiskCache* cache = nullptr) {
  ExperimentConfig cfg = cfg_in;
  cfg.apply_defaults();
  cfg.validate();

  const std::string confhash = Fnv64().add(cfg.to_json().dump()).hex();
  RunRecord record;
  record.config_hash = confhash;

  // dependency closure, fixed execution order
  static const std::vector<std::pair<std::string, std::string>> deps = {
      {"eig", "lift"},   {"cell", "lift"},   {"tensor", "cell"},
      {"transform", "lift"}, {"direct", "tensor"}};
  std::set<std::string> want(cfg.stages.begin(), cfg.stages.end());
  bool grew = true;
  while (grew) {
    grew = false;
    for (const auto& [s, pre] : deps)
      if (want.count(s) && !want.count(pre)) {
        want.insert(pre);
        grew = true;
      }
  }
  std::vector<std::string> order;
  for (const char* s : {"lift", "eig", "cell", "tensor", "transform", "direct"})
    if (want.count(s)) order.push_back(s);

  const std::uint64_t coefhash = detail::coefficient_hash(cfg.coefficient);
  std::set<std::string> failed;

  // shared state across stages
  std::optional<WindingMap> w;
  std::optional<MatrixField> Bhat;
  double alpha_grid = 0;
  std::optional<tensor::EffectiveTensor> qstar;
  std::string tensor_key;

  auto stage_key = [&](const std::string& name) {
    io::json k;
    k["stage"] = name;
    k["coef"] = coefhash;
    k["N"] = cfg.truncation;
    if (name == "lift") k["seed"] = cfg.seed;
    if (name == "eig") {
      k["deltas"] = cfg.delta_schedule;
      k["etas"] = detail::vecs_to_json(cfg.eta_grid);
      k["tol"] = cfg.tol.solver;
    }
    if (name == "cell") {
      k["deltas"] = cfg.delta_schedule;
      k["asym"] = cfg.tol.asym;
    }
    if (name == "tensor") {
      k["deltas"] = cfg.delta_schedule;
      k["h"] = cfg.fd_step;
      k["route"] = tensor::to_string(cfg.route);
      k["tol"] = cfg.tol.solver;
      k["grad"] = cfg.tol.grad;
      k["asym"] = cfg.tol.asym;
    }
    if (name == "transform") {
      k["delta"] = cfg.transform_delta;
      k["eps"] = cfg.transform_eps;
      k["xis"] = detail::vecs_to_json(cfg.xi_grid);
      k["g"] = cfg.g_preset;
      k["tol"] = cfg.tol.solver;
    }
    if (name == "direct") {
      k["eps"] = cfg.direct_eps;
      k["factor"] = cfg.mesh_factor;
      k["tensor_key"] = tensor_key;  // q* provenance
    }
    return k.dump();
  };

  // Stages needing in-memory upstream state recompute it even on a cache hit;
  // only the heavy payload-producing work is skipped.
  auto ensure_lifted = [&]() {
    if (Bhat) return;
    const auto& spec = cfg.coefficient;
    if (spec.lambda_override) {
      w.emplace(*spec.lambda_override);
    } else {
      auto freqs = spec.A.frequencies();
      if (freqs.empty())
        w.emplace(Mat::Identity(spec.A.dim(), spec.A.dim()));
      else
        w.emplace(detect_module(freqs));
    }
    Bhat.emplace(lift(spec.A, *w));
    alpha_grid = coercivity_on_grid(*Bhat, 64);
  };

  for (const auto& name : order) {
    StageRecord sr;
    sr.name = name;
    auto t0 = std::chrono::steady_clock::now();
    bool aborted = false;
    for (const auto& [s, pre] : deps)
      if (s == name && failed.count(pre)) aborted = true;
    if (aborted) {
      sr.error = "aborted: dependency failed";
      failed.insert(name);
      record.stages.push_back(sr);
      continue;
    }

    try {
      detail::StageIO sio(cfg.out_dir);
      std::string key = stage_key(name);  // tensor_key is set before 'direct' runs
      if (cache) {
        if (auto hit = cache->lookup(key)) {
          if (name != "direct") ensure_lifted();  // cheap upstream state
          if (name == "tensor") {
            // later stages need q*; recover it from the cached payload
            io::json files = io::json::parse(*hit)["files"];
            io::json jt = io::json::parse(files.at("tensor.json").get<std::string>());
            tensor::EffectiveTensor q;
            const auto& jq = jt["q"];
            q.q = Mat(int(jq.size()), int(jq[0].size()));
            for (int r = 0; r < q.q.rows(); ++r)
              for (int c = 0; c < q.q.cols(); ++c) q.q(r, c) = jq[r][c].get<double>();
            q.route = tensor::Route::extrapolated;
            q.N = jt["N"].get<int>();
            qstar = std::move(q);
            tensor_key = key;
          }
          sr.files = sio.restore(*hit);
          sr.cached = true;
          sr.seconds =
              std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
          record.stages.push_back(sr);
          continue;
        }
      }

      if (name == "lift") {
        ensure_lifted();
        io::json mod;
        mod["lambda"] = io::matrix_to_json(w->lambda());
        mod["M"] = w->M();
        mod["d"] = w->d();
        mod["periodic"] = w->periodic();
        mod["injectivity_checked_bound"] = w->checked_bound();
        mod["injectivity_margin"] = w->injectivity_margin();
        mod["kozlov_tau2_n50"] = kozlov_diagnostic(*w, 2.0, 50);
        mod["alpha_torus_grid"] = alpha_grid;
        if (cfg.coefficient.A.size() == cfg.coefficient.A.dim())
          mod["alpha_sampled"] = coercivity_estimate(cfg.coefficient.A, 4096, cfg.seed);
        if (w->checked_bound() < 1000)
          record.warnings.push_back("injectivity checked only up to ||p||_inf <= " +
                                    std::to_string(w->checked_bound()));
        sio.emit("module.json", mod.dump(2) + "\n");
        sio.emit("bhat.json", io::field_to_json(*Bhat).dump(2) + "\n");
      } else if (name == "eig") {
        ensure_lifted();
        std::ostringstream csv;
        csv << "eta,delta,N,lambda,gap,residual,warning\n";
        for (double delta : cfg.delta_schedule) {
          auto rows = spectral::eigen_sweep(*Bhat, *w, delta, cfg.truncation, cfg.eta_grid,
                                            cfg.tol.solver, cfg.threads);
          for (const auto& r : rows) {
            if (!r.error.empty()) record.warnings.push_back("eig row failed: " + r.error);
            if (r.simplicity_warning)
              record.warnings.push_back("simplicity warning at an eig sweep point");
            io::CsvWriter row(csv);
            std::string etas;
            for (int c = 0; c < r.eta.size(); ++c)
              etas += (c ? " " : "") + io::fmt(r.eta[c]);
            row.raw(etas);
            row.col(delta).col(cfg.truncation).col(r.lambda).col(r.gap).col(r.residual);
            row.raw(!r.error.empty() ? "err" : (r.simplicity_warning ? "1" : "0"));
            row.endrow();
          }
        }
        sio.emit("eig.csv", csv.str());
      } else if (name == "cell") {
        ensure_lifted();
        const int d = w->d();
        io::json allc = io::json::array();
        std::ostringstream csv;
        csv << "delta,N,k,l,q\n";
        for (double delta : cfg.delta_schedule) {
          std::vector<cell::Corrector> cs;
          for (int l = 0; l < d; ++l)
            cs.push_back(cell::solve_cell(*Bhat, *w, delta, cfg.truncation, l));
          auto q = cell::tensor_from_cell(cs, *Bhat, *w, cfg.tol.asym);
          for (int k = 0; k < d; ++k)
            for (int l = 0; l < d; ++l) {
              io::CsvWriter row(csv);
              row.col(delta).col(cfg.truncation).col(k + 1).col(l + 1).col(q.q(k, l));
              row.endrow();
            }
          ModeLattice lat(w->M(), cfg.truncation);
          for (const auto& c : cs) {
            io::json jc;
            jc["delta"] = delta;
            jc["l"] = c.direction + 1;
            jc["energy_dpsi_sq"] = c.energy.dpsi_sq;
            jc["energy_delta_grad_sq"] = c.energy.dgrad_sq;
            io::json coeffs = io::json::array();
            for (int i = 0; i < lat.size(); ++i) {
              if (std::abs(c.psi[i]) < 1e-14) continue;
              coeffs.push_back({{"n", lat.mode(i)},
                                {"re", c.psi[i].real()},
                                {"im", c.psi[i].imag()}});
            }
            jc["psi"] = coeffs;
            allc.push_back(jc);
          }
        }
        sio.emit("cell_correctors.json", allc.dump(2) + "\n");
        sio.emit("cell_tensors.csv", csv.str());
      } else if (name == "tensor") {
        ensure_lifted();
        qstar = tensor::delta_continuation(*Bhat, *w, cfg.delta_schedule, cfg.truncation,
                                           cfg.route, cfg.fd_step, cfg.tol.solver, cfg.threads);
        tensor_key = key;
        double dmin = cfg.delta_schedule.back();
        spectral::BlochSolver solver(*Bhat, *w, dmin, cfg.truncation, std::nullopt,
                                     cfg.tol.solver);
        Vec grad = tensor::gradient_at_zero(solver, cfg.fd_step, cfg.tol.grad);
        auto qh = tensor::hessian_tensor(solver, cfg.fd_step);
        std::vector<cell::Corrector> cs;
        for (int l = 0; l < w->d(); ++l)
          cs.push_back(cell::solve_cell(*Bhat, *w, dmin, cfg.truncation, l));
        auto qc = cell::tensor_from_cell(cs, *Bhat, *w, cfg.tol.asym);
        double cross = (qh.q - qc.q).lpNorm<Eigen::Infinity>();
        qstar->diag.grad_norm = grad.norm();
        qstar->diag.cross_gap = cross;
        if (qstar->diag.no_extrapolation)
          record.warnings.push_back("delta continuation was non-monotone; reporting smallest-delta tensor");

        io::json jt;
        jt["q"] = io::matrix_to_json(qstar->q);
        jt["route"] = tensor::to_string(qstar->route);
        jt["continuation_route"] = tensor::to_string(cfg.route);
        jt["delta"] = qstar->delta;
        jt["N"] = qstar->N;
        jt["h"] = cfg.fd_step;
        jt["diagnostics"] = {{"asymmetry", qstar->diag.asymmetry},
                             {"grad_norm", qstar->diag.grad_norm},
                             {"cross_route_gap", qstar->diag.cross_gap},
                             {"extrapolation_residual", qstar->diag.extrap_residual},
                             {"richardson", qh.diag.richardson},
                             {"fitted_rate", qstar->diag.fitted_rate},
                             {"no_extrapolation", qstar->diag.no_extrapolation}};
        jt["hessian_at_delta_min"] = io::matrix_to_json(qh.q);
        jt["cell_at_delta_min"] = io::matrix_to_json(qc.q);
        io::json sched = io::json::array();
        for (const auto& [dlt, qm] : qstar->schedule)
          sched.push_back({{"delta", dlt}, {"q", io::matrix_to_json(qm)}});
        jt["schedule"] = sched;
        sio.emit("tensor.json", jt.dump(2) + "\n");

        std::ostringstream csv;
        csv << "delta,k,l,q\n";
        for (const auto& [dlt, qm] : qstar->schedule)
          for (int k = 0; k < qm.rows(); ++k)
            for (int l = 0; l < qm.cols(); ++l) {
              io::CsvWriter row(csv);
              row.col(dlt).col(k + 1).col(l + 1).col(qm(k, l));
              row.endrow();
            }
        sio.emit("tensor_schedule.csv", csv.str());
      } else if (name == "transform") {
        ensure_lifted();
        if (w->d() != 1)
          throw Error(Errc::config, "transform presets are 1-d");
        bloch::CompactFunction g = (cfg.g_preset == "gaussian")
                                       ? bloch::CompactFunction::gaussian1d()
                                       : bloch::CompactFunction::bump1d();
        spectral::BlochSolver solver(*Bhat, *w, cfg.transform_delta, cfg.truncation,
                                     std::nullopt, cfg.tol.solver);
        std::ostringstream csv;
        csv << "xi,eps,re,im,abs_err\n";
        for (double eps : cfg.transform_eps) {
          bloch::BlochWave bw(solver, eps);
          bloch::Transform t(g, bw);
          t.prepare(cfg.xi_grid);
          for (const auto& xi : cfg.xi_grid) {
            auto tv = t.at(xi);
            Complex ref = t.reference(xi);
            io::CsvWriter row(csv);
            row.col(xi[0]).col(eps).col(tv.value.real()).col(tv.value.imag());
            row.col(std::abs(tv.value - ref));
            row.endrow();
          }
        }
        auto rep = bloch::transform_convergence(g, solver, cfg.transform_eps, cfg.xi_grid);
        io::json js;
        js["slope"] = rep.slope;
        io::json rows = io::json::array();
        for (const auto& r : rep.rows) rows.push_back({{"eps", r.eps}, {"sup_err", r.sup_err}});
        js["rows"] = rows;
        sio.emit("transform.csv", csv.str());
        sio.emit("transform_summary.json", js.dump(2) + "\n");
      } else if (name == "direct") {
        if (cfg.coefficient.A.dim() != 1 || cfg.coefficient.A.size() != 1)
          throw Error(Errc::config, "direct verification harness is 1-d");
        if (!qstar) throw Error(Errc::internal_consistency, "direct stage needs the tensor stage");
        auto rows = fd1d::convergence_report(cfg.coefficient.A.at(0, 0), qstar->q(0, 0),
                                             [](double) { return 1.0; }, cfg.direct_eps,
                                             cfg.mesh_factor, cfg.threads);
        std::ostringstream csv;
        csv << "eps,rel_l2,flux_err\n";
        for (const auto& r : rows) {
          io::CsvWriter row(csv);
          row.col(r.eps).col(r.rel_l2).col(r.flux_err);
          row.endrow();
        }
        sio.emit("direct.csv", csv.str());
      }

      if (cache) cache->store(key, sio.payload_json());
      sr.files = sio.files();
    } catch (const std::exception& e) {
      sr.error = e.what();
      failed.insert(name);
    }
    sr.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    record.stages.push_back(sr);
  }

  if (cache)
    for (auto& wmsg : cache->take_warnings()) record.warnings.push_back(wmsg);

  std::ofstream rec(cfg.out_dir / "run_record.json", std::ios::binary | std::ios::trunc);
  rec << record.to_json().dump(2) << "\n";
  return record;
}

}  // namespace qhom::runner
