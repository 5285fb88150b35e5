#include "hehom/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace hehom {

namespace {

VecR parse_vec(const json& j) {
  if (!j.is_array()) throw InvalidInput("expected an array of numbers");
  VecR v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  return v;
}

json vec_json(const VecR& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json index_json(const MultiIndex& m, int d) {
  json a = json::array();
  for (int i = 0; i < d; ++i) a.push_back(m[i]);
  return a;
}

MultiIndex parse_index(const json& j, int d) {
  if (!j.is_array() || static_cast<int>(j.size()) != d) throw InvalidInput("multi-index has wrong length");
  MultiIndex m{0, 0, 0};
  for (int i = 0; i < d; ++i) m[i] = j[static_cast<std::size_t>(i)].get<int>();
  return m;
}

json cluster_json(const MatC& c) {
  json cols = json::array();
  for (Eigen::Index p = 0; p < c.cols(); ++p) {
    json col = json::array();
    for (Eigen::Index i = 0; i < c.rows(); ++i) col.push_back(complex_json(c(i, p)));
    cols.push_back(col);
  }
  return cols;
}

json complex_list(const std::vector<cplx>& v) {
  json a = json::array();
  for (cplx z : v) a.push_back(complex_json(z));
  return a;
}

std::vector<cplx> parse_complex_list(const json& j) {
  std::vector<cplx> v;
  for (const auto& e : j) v.push_back(parse_complex(e));
  return v;
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

}  // namespace

cplx parse_complex(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2) return {j[0].get<double>(), j[1].get<double>()};
  throw InvalidInput("complex value must be a number or [re, im]");
}

json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

FourierSeries parse_series(const json& j, int d) {
  if (!j.is_array()) throw InvalidInput("Fourier series must be a list of [multi-index, amplitude] pairs");
  FourierSeries s;
  for (const auto& term : j) {
    if (!term.is_array() || term.size() != 2) throw InvalidInput("Fourier term must be [multi-index, amplitude]");
    s.push_back({parse_index(term[0], d), parse_complex(term[1])});
  }
  return s;
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw InvalidInput("malformed JSON in " + path + ": " + e.what());
  }
}

RunConfig parse_config(const json& j) {
  try {
    RunConfig c;
    const json& lat = j.at("lattice");
    const auto d = static_cast<Eigen::Index>(lat.size());
    if (d < 1 || d > 3) throw InvalidInput("lattice must be 1x1, 2x2 or 3x3");
    c.lattice.resize(d, d);
    for (Eigen::Index r = 0; r < d; ++r) {
      if (lat[static_cast<std::size_t>(r)].size() != static_cast<std::size_t>(d)) throw InvalidInput("lattice must be square");
      for (Eigen::Index s = 0; s < d; ++s) c.lattice(r, s) = lat[static_cast<std::size_t>(r)][static_cast<std::size_t>(s)].get<double>();
    }
    const int di = static_cast<int>(d);
    if (j.contains("cutoff")) c.cutoff = j["cutoff"].get<double>();
    if (j.contains("cutoff_modes")) c.cutoff_modes = j["cutoff_modes"].get<double>();
    c.grid_factor = get_or(j, "grid_factor", 4);
    c.refine = get_or(j, "refine", true);

    const json coeffs = j.value("coefficients", json::object());
    if (!coeffs.contains("metric") || coeffs["metric"] == "identity") {
      c.coefficients = free_spec(di);
    } else {
      const json& m = coeffs["metric"];
      if (m.size() != static_cast<std::size_t>(di * di)) throw InvalidInput("metric must list d*d entries");
      for (const auto& e : m) c.coefficients.metric.push_back(parse_series(e, di));
    }
    if (coeffs.contains("potential")) c.coefficients.potential = parse_series(coeffs["potential"], di);
    if (coeffs.contains("weight")) c.coefficients.weight = parse_series(coeffs["weight"], di);
    validate_spec(c.coefficients, di);

    c.k0 = VecR::Zero(d);
    if (j.contains("threshold")) {
      const json& t = j["threshold"];
      if (t.contains("k")) c.k0 = parse_vec(t["k"]);
      c.band = get_or(t, "band", 1);
      if (t.contains("cluster_tol")) {
        c.threshold.cluster_tol = t["cluster_tol"].get<double>();
        if (!(*c.threshold.cluster_tol > 0.0)) throw InvalidInput("cluster_tol must be positive");
      }
      c.threshold.radii = get_or(t, "radii", 8);
      c.threshold.bisection_steps = get_or(t, "bisection_steps", 30);
    }
    if (c.k0.size() != d) throw InvalidInput("threshold quasimomentum has wrong dimension");

    if (j.contains("packet")) {
      const json& p = j["packet"];
      c.packet.kind = get_or<std::string>(p, "kind", "gaussian");
      c.packet.nodes = get_or(p, "nodes", 64);
      c.packet.radius = get_or(p, "radius", 1.0);
      c.packet.width = get_or(p, "width", 1.0);
      c.packet.weight = get_or(p, "weight", 1.0);
      if (p.contains("center")) c.packet.center = parse_vec(p["center"]);
      if (p.contains("amplitude")) c.packet.amplitude = parse_complex(p["amplitude"]);
      if (p.contains("xi")) {
        if (c.packet.kind == "single") c.packet.xi.push_back(parse_vec(p["xi"]));
        else
          for (const auto& x : p["xi"]) c.packet.xi.push_back(parse_vec(x));
      }
      if (p.contains("values")) c.packet.values = parse_complex_list(p["values"]);
      if (p.contains("weights")) c.packet.weights = p["weights"].get<std::vector<double>>();
      c.profile = get_or(p, "profile", 1);
    }
    c.epsilons = j.value("epsilons", std::vector<double>{});
    c.taus = j.value("taus", std::vector<double>{1.0});
    for (std::size_t i = 0; i < c.epsilons.size(); ++i) {
      if (!(c.epsilons[i] > 0.0)) throw InvalidInput("epsilons must be positive");
      if (i > 0 && !(c.epsilons[i] < c.epsilons[i - 1])) throw InvalidInput("epsilons must be strictly decreasing");
    }

    if (j.contains("bands")) {
      const json& b = j["bands"];
      c.bands.count = get_or(b, "count", 8);
      if (b.contains("ks")) {
        for (const auto& k : b["ks"]) c.bands.ks.push_back(parse_vec(k));
      } else if (b.contains("path")) {
        const json& path = b["path"];
        int pts = get_or(b, "points", 201);
        if (path.size() < 2 || pts < 2) throw InvalidInput("band path needs two endpoints and two points");
        for (std::size_t seg = 0; seg + 1 < path.size(); ++seg) {
          VecR a = parse_vec(path[seg]), e = parse_vec(path[seg + 1]);
          for (int i = (seg == 0 ? 0 : 1); i < pts; ++i) c.bands.ks.push_back(a + (e - a) * (static_cast<double>(i) / (pts - 1)));
        }
      }
      for (const auto& k : c.bands.ks)
        if (k.size() != d) throw InvalidInput("band quasimomentum has wrong dimension");
    }
    if (j.contains("slope")) {
      c.slope_min = get_or(j["slope"], "min", 0.8);
      c.slope_max = get_or(j["slope"], "max", 1.3);
    }
    return c;
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("configuration error: ") + e.what());
  }
}

RunConfig load_config(const std::string& path) { return parse_config(read_json(path)); }

double resolve_cutoff(const RunConfig& cfg, const Lattice& lattice) {
  if (cfg.cutoff) return *cfg.cutoff;
  if (cfg.cutoff_modes) {
    double m = std::numeric_limits<double>::infinity();
    for (int l = 0; l < lattice.dim(); ++l) m = std::min(m, lattice.dual().col(l).norm());
    return *cfg.cutoff_modes * m;
  }
  return default_cutoff(lattice);
}

Pipeline::Pipeline(const RunConfig& cfg, bool with_tensors) : cfg_(cfg) {
  Lattice lat(cfg.lattice);
  basis_ = PlaneWaveBasis(lat, resolve_cutoff(cfg, lat));
  coeffs_ = PeriodicCoefficients(cfg.coefficients, basis_, cfg.grid_factor);
  tp_ = detect_threshold(coeffs_, basis_, cfg.k0, cfg.band, cfg.threshold);
  model_ = std::make_unique<ThresholdModel>(coeffs_, basis_, tp_);
  ledger_ = constants_ledger(coeffs_, tp_);
  check_ledger(ledger_);
  if (with_tensors) tensors_ = effective_tensors(*model_, cfg.refine);
}

Pipeline::Pipeline(const RunConfig& cfg, const EffectiveTensors& tensors) : cfg_(cfg), tensors_(tensors) {
  Lattice lat(cfg.lattice);
  basis_ = PlaneWaveBasis(lat, resolve_cutoff(cfg, lat));
  coeffs_ = PeriodicCoefficients(cfg.coefficients, basis_, cfg.grid_factor);
  if (tensors.modes != basis_.indices()) throw InvalidInput("tensor record was computed for a different basis");
  tp_.k0 = tensors.k0;
  tp_.band = tensors.band;
  tp_.lambda0 = tensors.lambda0;
  tp_.n = tensors.n;
  tp_.d0 = tensors.d0;
  tp_.kappa = tensors.kappa;
  tp_.kappa_cap = 0.5 * lat.inradius();
  tp_.cluster = tensors.cluster;
  tp_.cluster_tol = tensors.provenance.cluster_tol;
  tp_.reference = tensors.provenance.reference;
  tp_.sup_norms = sup_norms(coeffs_, basis_, tp_.cluster);
  model_ = std::make_unique<ThresholdModel>(coeffs_, basis_, tp_);
  ledger_ = constants_ledger(coeffs_, tp_);
  check_ledger(ledger_);
}

SlopeFit fit_slope(const std::vector<double>& eps, const std::vector<double>& errors) {
  if (eps.size() != errors.size()) throw InvalidInput("slope fit needs matching arrays");
  std::vector<double> x, y;
  for (std::size_t i = 0; i < eps.size(); ++i)
    if (eps[i] > 0.0 && errors[i] > 0.0 && std::isfinite(errors[i])) {
      x.push_back(std::log(eps[i]));
      y.push_back(std::log(errors[i]));
    }
  if (x.size() < 3) throw InvalidInput("slope fit needs at least three positive pairs");
  const auto n = static_cast<Eigen::Index>(x.size());
  MatR a(n, 2);
  VecR b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    a(i, 0) = x[static_cast<std::size_t>(i)];
    a(i, 1) = 1.0;
    b(i) = y[static_cast<std::size_t>(i)];
  }
  VecR sol = a.colPivHouseholderQr().solve(b);
  SlopeFit f;
  f.slope = sol(0);
  f.intercept = sol(1);
  f.residual = std::sqrt((a * sol - b).squaredNorm() / static_cast<double>(n));
  f.points = x.size();
  return f;
}

bool ConvergenceReport::all_bounds_hold() const {
  for (const auto& e : entries)
    if (e.certified && !e.holds()) return false;
  return true;
}

ConvergenceReport run_convergence(const Pipeline& p) {
  const RunConfig& cfg = p.config();
  ConvergenceReport rep;
  WavePacket packet = make_packet(cfg.packet, p.basis().dim(), cfg.profile);
  for (const auto& w : p.coeffs().warnings()) rep.warnings.push_back(w);
  for (const auto& w : p.tensors().warnings) rep.warnings.push_back(w);
  for (double tau : cfg.taus) {
    std::vector<double> es, errs;
    for (double eps : cfg.epsilons) {
      FiberField u = propagate_exact(p.model(), packet, eps, tau);
      EffectiveField v = propagate_effective(p.tensors(), packet, eps, tau);
      for (const auto& w : u.warnings) rep.warnings.push_back(w);
      ConvergenceEntry e;
      e.eps = eps;
      e.tau = tau;
      e.error = assemble_error(packet, u, v, p.point().cluster, p.cell_volume());
      ErrorBound b = error_bound(p.ledger(), p.point(), packet, eps, tau, p.cell_volume());
      e.kappa_term = b.kappa_term;
      e.estimate_term = b.estimate_term;
      e.bound = b.total();
      e.certified = b.certified;
      e.l2_exact = u.norm(packet);
      e.l2_effective = v.norm(packet);
      rep.entries.push_back(e);
      es.push_back(eps);
      errs.push_back(e.error);
    }
    SlopeRecord s;
    s.tau = tau;
    double peak = errs.empty() ? 0.0 : *std::max_element(errs.begin(), errs.end());
    if (es.size() < 3) {
      s.status = "too-few-points";
    } else if (peak < 1e-10) {
      s.status = "noise-floor";
    } else {
      s.fit = fit_slope(es, errs);
      s.status = "fitted";
    }
    rep.slopes.push_back(s);
  }
  std::sort(rep.warnings.begin(), rep.warnings.end());
  rep.warnings.erase(std::unique(rep.warnings.begin(), rep.warnings.end()), rep.warnings.end());
  return rep;
}

json to_json(const ThresholdPoint& tp, const PlaneWaveBasis& basis) {
  json j;
  j["k0"] = vec_json(tp.k0);
  j["band"] = tp.band;
  j["lambda0"] = tp.lambda0;
  j["n"] = tp.n;
  j["d0"] = tp.d0;
  j["kappa"] = tp.kappa;
  j["kappa_cap"] = tp.kappa_cap;
  j["cluster_tol"] = tp.cluster_tol;
  j["sup_norms"] = tp.sup_norms;
  json ref = json::array();
  for (auto r : tp.reference) ref.push_back(index_json(basis.index(r), basis.dim()));
  j["gauge_reference"] = ref;
  j["certification"] = {{"directions", tp.directions}, {"radii", tp.radii}};
  json modes = json::array();
  for (const auto& m : basis.indices()) modes.push_back(index_json(m, basis.dim()));
  j["basis"] = {{"modes", modes}, {"vectors", cluster_json(tp.cluster)}};
  return j;
}

json to_json(const EffectiveTensors& t) {
  json j;
  j["d"] = t.d;
  j["n"] = t.n;
  j["k0"] = vec_json(t.k0);
  j["band"] = t.band;
  j["lambda0"] = t.lambda0;
  j["d0"] = t.d0;
  j["kappa"] = t.kappa;
  j["g1"] = complex_list(t.g1);
  j["g1_tilde"] = complex_list(t.g1_tilde);
  j["g2"] = complex_list(t.g2);
  json modes = json::array();
  for (const auto& m : t.modes) modes.push_back(index_json(m, t.d));
  j["basis"] = {{"modes", modes}, {"vectors", cluster_json(t.cluster)}};
  const auto& p = t.provenance;
  json lat = json::array();
  for (Eigen::Index r = 0; r < p.lattice.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index s = 0; s < p.lattice.cols(); ++s) row.push_back(p.lattice(r, s));
    lat.push_back(row);
  }
  json ref = json::array();
  for (auto r : p.reference) ref.push_back(r);
  j["provenance"] = {{"cutoff", p.cutoff},
                     {"basis_size", p.basis_size},
                     {"grid_shape", index_json(p.grid_shape, t.d)},
                     {"grid_factor", p.grid_factor},
                     {"cluster_tol", p.cluster_tol},
                     {"gauge_reference", ref},
                     {"cell_residual", p.cell_residual},
                     {"refinement_delta", p.refinement_delta},
                     {"lattice", lat},
                     {"shift", p.shift},
                     {"layout", {{"g1", "[n][n][d]"}, {"g2", "[n][n][d][d]"}, {"complex", "[re, im]"}}}};
  j["warnings"] = t.warnings;
  return j;
}

EffectiveTensors tensors_from_json(const json& j) {
  try {
    EffectiveTensors t;
    t.d = j.at("d").get<int>();
    t.n = j.at("n").get<int>();
    t.k0 = parse_vec(j.at("k0"));
    t.band = j.at("band").get<int>();
    t.lambda0 = j.at("lambda0").get<double>();
    t.d0 = j.at("d0").get<double>();
    t.kappa = j.at("kappa").get<double>();
    t.g1 = parse_complex_list(j.at("g1"));
    t.g1_tilde = parse_complex_list(j.at("g1_tilde"));
    t.g2 = parse_complex_list(j.at("g2"));
    if (t.g1.size() != static_cast<std::size_t>(t.n * t.n * t.d) || t.g2.size() != static_cast<std::size_t>(t.n * t.n * t.d * t.d))
      throw InvalidInput("tensor record has inconsistent sizes");
    for (const auto& m : j.at("basis").at("modes")) t.modes.push_back(parse_index(m, t.d));
    const json& cols = j.at("basis").at("vectors");
    t.cluster.resize(static_cast<Eigen::Index>(t.modes.size()), t.n);
    for (int p = 0; p < t.n; ++p)
      for (std::size_t i = 0; i < t.modes.size(); ++i)
        t.cluster(static_cast<Eigen::Index>(i), p) = parse_complex(cols.at(static_cast<std::size_t>(p)).at(i));
    const json& pv = j.at("provenance");
    t.provenance.cutoff = pv.at("cutoff").get<double>();
    t.provenance.basis_size = pv.at("basis_size").get<std::size_t>();
    t.provenance.grid_factor = pv.at("grid_factor").get<int>();
    t.provenance.cluster_tol = pv.at("cluster_tol").get<double>();
    for (const auto& r : pv.at("gauge_reference")) t.provenance.reference.push_back(r.get<std::size_t>());
    t.provenance.cell_residual = pv.at("cell_residual").get<double>();
    t.provenance.refinement_delta = pv.at("refinement_delta").get<double>();
    t.provenance.shift = pv.at("shift").get<double>();
    const json& lat = pv.at("lattice");
    t.provenance.lattice.resize(t.d, t.d);
    for (int r = 0; r < t.d; ++r)
      for (int s = 0; s < t.d; ++s) t.provenance.lattice(r, s) = lat.at(static_cast<std::size_t>(r)).at(static_cast<std::size_t>(s)).get<double>();
    MultiIndex gs = parse_index(pv.at("grid_shape"), t.d);
    for (int a = t.d; a < 3; ++a) gs[a] = 1;
    t.provenance.grid_shape = gs;
    return t;
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("malformed tensor record: ") + e.what());
  }
}

json to_json(const ConstantsLedger& c) {
  return {{"lambda0", c.lambda0}, {"d0", c.d0},   {"kappa", c.kappa},       {"metric_sup", c.metric_sup},
          {"inv_omega_sup", c.inv_omega_sup}, {"contour_length", c.contour_length},
          {"C1", c.c1},           {"C2", c.c2},   {"C2_check", c.c2_check}, {"C3", c.c3},
          {"C4", c.c4},           {"C5", c.c5},   {"C6", c.c6},             {"C7", c.c7},
          {"C8", c.c8},           {"C9", c.c9},   {"C10", c.c10},           {"C11", c.c11},
          {"C7_closed", c.c7_closed}, {"C11_closed", c.c11_closed}};
}

json to_json(const ConvergenceReport& r, const Pipeline& p) {
  json j;
  const ThresholdPoint& tp = p.point();
  j["threshold"] = {{"k0", vec_json(tp.k0)}, {"band", tp.band}, {"lambda0", tp.lambda0},
                    {"n", tp.n},             {"d0", tp.d0},     {"kappa", tp.kappa}};
  j["ledger"] = to_json(p.ledger());
  json entries = json::array();
  for (const auto& e : r.entries)
    entries.push_back({{"eps", e.eps},
                       {"tau", e.tau},
                       {"error", e.error},
                       {"kappa_term", e.kappa_term},
                       {"estimate_term", e.estimate_term},
                       {"bound", e.bound},
                       {"certified", e.certified},
                       {"holds", e.holds()},
                       {"l2_exact", e.l2_exact},
                       {"l2_effective", e.l2_effective}});
  j["entries"] = entries;
  json slopes = json::array();
  for (const auto& s : r.slopes) {
    json o = {{"tau", s.tau}, {"status", s.status}};
    if (s.fit) {
      o["slope"] = s.fit->slope;
      o["intercept"] = s.fit->intercept;
      o["residual"] = s.fit->residual;
    }
    slopes.push_back(o);
  }
  j["slopes"] = slopes;
  j["warnings"] = r.warnings;
  j["all_bounds_hold"] = r.all_bounds_hold();
  const auto& coeffs = p.coeffs();
  j["provenance"] = {{"cutoff", p.basis().cutoff()},
                     {"basis_size", p.basis().size()},
                     {"grid_shape", index_json(coeffs.grid().shape(), p.basis().dim())},
                     {"grid_factor", coeffs.grid_factor()},
                     {"shift", coeffs.shift()},
                     {"ground_residual", coeffs.ground_residual()},
                     {"omega_norm_error", coeffs.omega_norm_error()},
                     {"refinement_delta", p.tensors().provenance.refinement_delta},
                     {"cell_residual", p.tensors().provenance.cell_residual}};
  return j;
}

void write_csv_row(std::ostream& os, const std::vector<double>& values) {
  std::ostringstream line;
  line << std::setprecision(17);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) line << ',';
    line << values[i];
  }
  os << line.str() << '\n';
}

}  // namespace hehom
