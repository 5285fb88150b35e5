#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "hehom/harness.hpp"

using namespace hehom;

namespace {

constexpr int kOk = 0;
constexpr int kViolation = 1;
constexpr int kFailure = 2;

struct Output {
  std::ofstream file;
  std::ostream* os = &std::cout;
  explicit Output(const std::string& path) {
    if (path.empty() || path == "-") return;
    file.open(path);
    if (!file) throw InvalidInput("cannot write " + path);
    os = &file;
  }
};

void warn_all(const std::vector<std::string>& w) {
  for (const auto& s : w) std::cerr << "warning: " << s << '\n';
}

int cmd_bands(const std::string& config, const std::string& out) {
  RunConfig cfg = load_config(config);
  if (cfg.bands.ks.empty()) throw InvalidInput("configuration has no band quasimomenta");
  Lattice lat(cfg.lattice);
  PlaneWaveBasis basis(lat, resolve_cutoff(cfg, lat));
  PeriodicCoefficients coeffs(cfg.coefficients, basis, cfg.grid_factor);
  warn_all(coeffs.warnings());
  BandStructure bs = band_structure(coeffs, basis, cfg.bands.ks, cfg.bands.count);
  Output o(out);
  std::ostream& os = *o.os;
  for (int a = 0; a < lat.dim(); ++a) os << (a ? "," : "") << "k" << a + 1;
  for (Eigen::Index m = 0; m < bs.energies.cols(); ++m) os << ",E" << m + 1;
  os << '\n';
  for (std::size_t i = 0; i < bs.ks.size(); ++i) {
    std::vector<double> row(bs.ks[i].data(), bs.ks[i].data() + bs.ks[i].size());
    for (Eigen::Index m = 0; m < bs.energies.cols(); ++m) row.push_back(bs.energies(static_cast<Eigen::Index>(i), m));
    write_csv_row(os, row);
  }
  return kOk;
}

int cmd_threshold(const std::string& config, const std::string& out, bool verify, const std::string& ledger_path) {
  RunConfig cfg = load_config(config);
  Pipeline p(cfg, verify);
  warn_all(p.coeffs().warnings());
  Output o(out);
  if (!verify) {
    json j = to_json(p.point(), p.basis());
    j["ledger"] = to_json(p.ledger());
    *o.os << j.dump(2) << '\n';
    return kOk;
  }
  std::ostream& os = *o.os;
  os << "dk,tau,lhs,rhs,margin\n";
  bool ok = true;
  const int d = p.basis().dim();
  for (double frac : {0.3, 0.1, 0.03})
    for (double tau : {1.0, 10.0, 100.0}) {
      VecR dk = VecR::Zero(d);
      dk(0) = frac * p.point().kappa;
      BoundSample s = verify_exponential_bound(p.model(), p.tensors(), dk, tau, p.ledger());
      ok = ok && s.lhs <= s.rhs;
      write_csv_row(os, {s.dk_norm, s.tau, s.lhs, s.rhs, s.margin()});
    }
  std::string lj = to_json(p.ledger()).dump(2);
  if (ledger_path.empty()) {
    std::cerr << lj << '\n';
  } else {
    std::ofstream lf(ledger_path);
    lf << lj << '\n';
  }
  return ok ? kOk : kViolation;
}

int cmd_effective(const std::string& config, const std::string& out) {
  RunConfig cfg = load_config(config);
  Pipeline p(cfg);
  warn_all(p.coeffs().warnings());
  warn_all(p.tensors().warnings);
  Output o(out);
  *o.os << to_json(p.tensors()).dump(2) << '\n';
  return kOk;
}

int cmd_evolve(const std::string& config, double eps, double tau, const std::string& packet_path,
               const std::string& tensors_path, const std::string& grid, const std::string& out) {
  RunConfig cfg = load_config(config);
  if (!packet_path.empty()) {
    json pj = read_json(packet_path);
    json wrapper = read_json(config);
    wrapper["packet"] = pj;
    cfg = parse_config(wrapper);
  }
  std::unique_ptr<Pipeline> p = tensors_path.empty() ? std::make_unique<Pipeline>(cfg)
                                                     : std::make_unique<Pipeline>(cfg, tensors_from_json(read_json(tensors_path)));
  WavePacket packet = make_packet(cfg.packet, p->basis().dim(), cfg.profile);
  FiberField u = propagate_exact(p->model(), packet, eps, tau);
  EffectiveField v = propagate_effective(p->tensors(), packet, eps, tau);
  warn_all(u.warnings);
  double err = assemble_error(packet, u, v, p->point().cluster, p->cell_volume());
  ErrorBound b = error_bound(p->ledger(), p->point(), packet, eps, tau, p->cell_volume());

  Output o(out);
  std::ostream& os = *o.os;
  const int d = p->basis().dim();
  for (int a = 0; a < d; ++a) os << "xi" << a + 1 << ',';
  os << "weight,amplitude_abs,fiber_error\n";
  for (std::size_t i = 0; i < packet.size(); ++i) {
    std::vector<double> row(packet.nodes[i].data(), packet.nodes[i].data() + d);
    VecC diff = packet.amplitudes[i] * u.vectors[i] - p->point().cluster * v.coefficients[i];
    row.push_back(packet.weights[i]);
    row.push_back(std::abs(packet.amplitudes[i]));
    row.push_back(diff.norm());
    write_csv_row(os, row);
  }
  if (!grid.empty()) {
    double lo = 0, hi = 0;
    int n = 0;
    char c1 = 0, c2 = 0;
    std::istringstream gs(grid);
    if (!(gs >> lo >> c1 >> hi >> c2 >> n) || c1 != ':' || c2 != ':' || n < 1)
      throw InvalidInput("grid must be lo:hi:n");
    std::vector<VecR> pts;
    VecR dir = p->basis().lattice().basis().col(0).normalized();
    for (int i = 0; i < n; ++i) pts.push_back(dir * (n == 1 ? lo : lo + (hi - lo) * i / (n - 1)));
    Snapshot snap = physical_snapshot(p->basis(), p->point(), packet, u, v, pts);
    std::ofstream sf("snapshot.csv");
    sf << "s,re_exact,im_exact,re_effective,im_effective\n";
    for (std::size_t i = 0; i < pts.size(); ++i)
      write_csv_row(sf, {pts[i].dot(dir), snap.exact[i].real(), snap.exact[i].imag(), snap.effective[i].real(),
                         snap.effective[i].imag()});
  }
  json summary = {{"eps", eps}, {"tau", tau}, {"error", err}, {"bound", b.total()}, {"certified", b.certified}};
  std::cerr << summary.dump() << '\n';
  return (b.certified && err > b.total()) ? kViolation : kOk;
}

int cmd_converge(const std::string& config, const std::string& out) {
  RunConfig cfg = load_config(config);
  if (cfg.epsilons.empty()) throw InvalidInput("configuration lists no epsilons");
  Pipeline p(cfg);
  ConvergenceReport r = run_convergence(p);
  warn_all(r.warnings);
  Output o(out);
  *o.os << to_json(r, p).dump(2) << '\n';
  return r.all_bounds_hold() ? kOk : kViolation;
}

// Free operator checks with known closed forms.
int cmd_selftest() {
  bool all = true;
  auto report = [&](const std::string& name, bool ok, double value) {
    std::cout << (ok ? "PASS " : "FAIL ") << name << " (" << value << ")\n";
    all = all && ok;
  };
  RunConfig cfg;
  cfg.lattice = MatR::Identity(1, 1);
  cfg.coefficients = free_spec(1);
  Lattice lat(cfg.lattice);
  PlaneWaveBasis basis(lat, default_cutoff(lat));
  PeriodicCoefficients coeffs(cfg.coefficients, basis);
  {
    double worst = 0.0;
    for (int i = 0; i <= 20; ++i) {
      VecR k = VecR::Constant(1, -kPi + 2 * kPi * i / 20.0);
      VecR e = eig_fiber(assemble_fiber(coeffs, basis, k)).values;
      std::vector<double> ref;
      for (std::size_t m = 0; m < basis.size(); ++m) ref.push_back(std::pow(k(0) + 2 * kPi * basis.index(m)[0], 2));
      std::sort(ref.begin(), ref.end());
      for (Eigen::Index m = 0; m < e.size(); ++m) worst = std::max(worst, std::abs(e(m) - ref[static_cast<std::size_t>(m)]));
    }
    report("free bands", worst <= 1e-10, worst);
  }
  cfg.k0 = VecR::Constant(1, kPi);
  cfg.band = 1;
  Pipeline p(cfg);
  report("dirac cluster size", p.point().n == 2, p.point().n);
  report("dirac gap", std::abs(p.point().d0 - 8 * kPi * kPi) <= 1e-8 * 8 * kPi * kPi, p.point().d0);
  double sym = 0.0;
  for (double dk : {-0.3, -0.1, 0.1, 0.3}) {
    VecR e = eig_hermitian(effective_symbol(p.tensors(), VecR::Constant(1, dk)), 0, false).values;
    sym = std::max(sym, std::abs(e(0) - (kPi * kPi - 2 * kPi * std::abs(dk) + dk * dk)));
    sym = std::max(sym, std::abs(e(1) - (kPi * kPi + 2 * kPi * std::abs(dk) + dk * dk)));
  }
  report("dirac symbol", sym <= 1e-10, sym);
  PacketSpec ps;
  ps.radius = 2.0;
  ps.nodes = 32;
  WavePacket packet = make_packet(ps, 1, 1);
  FiberField u = propagate_exact(p.model(), packet, 0.1, 1.0);
  EffectiveField v = propagate_effective(p.tensors(), packet, 0.1, 1.0);
  double err = assemble_error(packet, u, v, p.point().cluster, p.cell_volume());
  report("dirac error", err <= 1e-12, err);
  return all ? kOk : kViolation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"High-energy homogenization of periodic operators"};
  app.require_subcommand(1);
  std::string config, out, ledger, packet, tensors, grid;
  bool verify = false;
  double eps = 0.1, tau = 1.0;

  auto* bands = app.add_subcommand("bands", "band functions along the configured quasimomenta (CSV)");
  bands->add_option("-c,--config", config, "JSON configuration")->required();
  bands->add_option("-o,--out", out, "output file");

  auto* thr = app.add_subcommand("threshold", "threshold point and constants (JSON)");
  thr->add_option("-c,--config", config, "JSON configuration")->required();
  thr->add_option("-o,--out", out, "output file");
  thr->add_flag("--verify", verify, "check the exponential estimate on a (|δk|, τ) grid (CSV)");
  thr->add_option("--ledger", ledger, "write the constants ledger here when verifying");

  auto* eff = app.add_subcommand("effective", "effective tensors (JSON)");
  eff->add_option("-c,--config", config, "JSON configuration")->required();
  eff->add_option("-o,--out", out, "output file");

  auto* evo = app.add_subcommand("evolve", "exact and effective evolution of one packet");
  evo->add_option("-c,--config", config, "JSON configuration")->required();
  evo->add_option("--epsilon", eps, "scale parameter")->required();
  evo->add_option("--tau", tau, "time")->required();
  evo->add_option("--packet", packet, "JSON packet description (defaults to the configuration's)");
  evo->add_option("--tensors", tensors, "stored tensor record");
  evo->add_option("--grid", grid, "physical snapshot lo:hi:n along the first lattice axis (snapshot.csv)");
  evo->add_option("-o,--out", out, "per-fiber CSV output");

  auto* conv = app.add_subcommand("converge", "error table and slope fit (JSON)");
  conv->add_option("-c,--config", config, "JSON configuration")->required();
  conv->add_option("-o,--out", out, "output file");

  auto* self = app.add_subcommand("selftest", "free-operator exactness checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kFailure;
  }
  try {
    if (*bands) return cmd_bands(config, out);
    if (*thr) return cmd_threshold(config, out, verify, ledger);
    if (*eff) return cmd_effective(config, out);
    if (*evo) return cmd_evolve(config, eps, tau, packet, tensors, grid, out);
    if (*conv) return cmd_converge(config, out);
    if (*self) return cmd_selftest();
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kFailure;
}
