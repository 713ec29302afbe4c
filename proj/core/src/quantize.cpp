#include "ruelle/quantize.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <algorithm>
#include <cmath>

namespace ruelle {

Symbol constant_symbol(cplx c) {
  return Symbol{[c](const PhasePoint&) { return c; }, [](const PhasePoint&) { return 0.0; }, 0.0};
}

Symbol product(const Symbol& a, const Symbol& b) {
  return Symbol{[a, b](const PhasePoint& r) { return a.a(r) * b.a(r); }, {}, 0.0};
}

PhasePoint grid_phase_point(const TorusGrid& g, long j, const Eigen::VectorXd& eta) {
  const Eigen::VectorXd y = g.point(j);
  const int n = g.d - 1;
  return PhasePoint(y.head(n), y(n), eta.head(n), eta(n));
}

PhasePoint TranslationFlow::lift(const PhasePoint& rho, double t) const {
  if (velocity.size() != rho.n() + 1) throw ConfigError("TranslationFlow: velocity does not match phase point");
  PhasePoint out = rho;
  out.x += t * velocity.head(rho.n());
  out.z += t * velocity(rho.n());
  return out;
}

Eigen::VectorXcd TranslationFlow::transfer_modes(const TorusGrid& g, const Eigen::VectorXcd& uh, double t) const {
  if (velocity.size() != g.d) throw ConfigError("TranslationFlow: velocity does not match grid");
  Eigen::VectorXcd out(uh.size());
  for (long i = 0; i < uh.size(); ++i) out(i) = uh(i) * std::polar(1.0, -t * g.mode(i).cast<double>().dot(velocity));
  return out;
}

// ---------------------------------------------------------------------------

Quantizer::Quantizer(std::shared_ptr<const TorusBargmann> b, int band) : b_(std::move(b)) {
  const auto& g = b_->grid();
  if (band < 0 || band > g.N / 2 - 2) throw ConfigError("Quantizer: band must lie in [0, N/2 - 2]");
  for (long i = 0; i < g.size(); ++i)
    if (g.mode(i).cwiseAbs().maxCoeff() <= band) basis_.push_back(i);
  const auto& mn = b_->mode_norms();
  support_.resize(b_->eta_count());
  parallel_for(support_.size(), [&](std::size_t e) {
    const Eigen::VectorXd eta = b_->eta(static_cast<long>(e));
    for (long c = 0; c < dim(); ++c) {
      const long i = basis_[c];
      const double v = packet_hat0(eta, g.mode(i).cast<double>(), b_->normalizer().params());
      if (v > 1e-16) support_[e].emplace_back(c, v / std::sqrt(mn[i]));
    }
  });
}

Eigen::VectorXcd Quantizer::to_basis(const Eigen::VectorXcd& uh) const {
  Eigen::VectorXcd c(dim());
  for (long i = 0; i < dim(); ++i) c(i) = uh(basis_[i]);
  return c;
}

Eigen::VectorXcd Quantizer::from_basis(const Eigen::VectorXcd& c) const {
  Eigen::VectorXcd uh = Eigen::VectorXcd::Zero(b_->grid().size());
  for (long i = 0; i < dim(); ++i) uh(basis_[i]) = c(i);
  return uh;
}

Eigen::VectorXcd Quantizer::transfer_diagonal(const TranslationFlow& flow, double t) const {
  const auto& g = b_->grid();
  return to_basis(flow.transfer_modes(g, Eigen::VectorXcd::Ones(g.size()), t));
}

Eigen::VectorXcd Quantizer::apply(const Symbol& a, const Eigen::VectorXcd& u) const {
  const auto& g = b_->grid();
  Eigen::MatrixXcd field = b_->forward(u);
  parallel_for(field.cols(), [&](std::size_t e) {
    const Eigen::VectorXd eta = b_->eta(static_cast<long>(e));
    for (long j = 0; j < field.rows(); ++j) field(j, static_cast<long>(e)) *= a.a(grid_phase_point(g, j, eta));
  });
  return b_->adjoint(field);
}

Eigen::MatrixXcd Quantizer::matrix(const Symbol& a) const {
  const auto& g = b_->grid();
  const long npts = g.size();
  const long E = b_->eta_count();
  // ahat_e(q) = sum_j a(y_j, eta_e) e^{-i q.y_j}, needed only where node e
  // reaches the band.
  const double scale = static_cast<double>(npts) * std::pow(2.0 * kPi, -0.5 * g.d);
  Eigen::MatrixXcd ahat = Eigen::MatrixXcd::Zero(npts, E);
  parallel_for(E, [&](std::size_t e) {
    if (support_[e].empty()) return;
    const Eigen::VectorXd eta = b_->eta(static_cast<long>(e));
    Eigen::VectorXcd s(npts);
    for (long j = 0; j < npts; ++j) s(j) = a.a(grid_phase_point(g, j, eta));
    ahat.col(static_cast<long>(e)) = scale * to_modes(g, s);
  });
  // Bin coordinates of the basis modes; the index of k' - k mod N follows.
  std::vector<Eigen::VectorXi> bins(dim());
  for (long c = 0; c < dim(); ++c) {
    Eigen::VectorXi k = g.mode(basis_[c]);
    for (int ax = 0; ax < g.d; ++ax) k(ax) = (k(ax) % g.N + g.N) % g.N;
    bins[c] = k;
  }
  auto diff_index = [&](long cp, long c) {
    long idx = 0;
    for (int ax = 0; ax < g.d; ++ax) idx = idx * g.N + ((bins[cp](ax) - bins[c](ax)) % g.N + g.N) % g.N;
    return idx;
  };
  // Rows k' collect the nodes e whose packets carry k'.
  std::vector<std::vector<std::pair<long, double>>> rows(dim());
  for (long e = 0; e < E; ++e)
    for (const auto& [c, v] : support_[e]) rows[c].emplace_back(e, v);
  const double cell = b_->cell_weight();
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim(), dim());
  parallel_for(dim(), [&](std::size_t cp) {
    const long r = static_cast<long>(cp);
    for (const auto& [e, vp] : rows[cp]) {
      for (const auto& [c, v] : support_[e]) m(r, c) += cell * vp * v * ahat(diff_index(r, c), e);
    }
  });
  return m;
}

double Quantizer::sup(const PhaseFunction& f) const {
  const auto& g = b_->grid();
  std::vector<double> best(b_->eta_count(), 0.0);
  parallel_for(best.size(), [&](std::size_t e) {
    const Eigen::VectorXd eta = b_->eta(static_cast<long>(e));
    for (long j = 0; j < g.size(); ++j) best[e] = std::max(best[e], std::abs(f(grid_phase_point(g, j, eta))));
  });
  return *std::max_element(best.begin(), best.end());
}

cplx Quantizer::trace_formula(const Symbol& a) const {
  const auto& g = b_->grid();
  std::vector<cplx> part(b_->eta_count());
  parallel_for(part.size(), [&](std::size_t e) {
    const Eigen::VectorXd eta = b_->eta(static_cast<long>(e));
    cplx s = 0.0;
    for (long j = 0; j < g.size(); ++j) s += a.a(grid_phase_point(g, j, eta));
    part[e] = s == cplx(0.0) ? s : s * exact_packet_norm_sq(b_->normalizer(), eta);
  });
  cplx s = 0.0;
  for (const auto& v : part) s += v;
  return s * b_->cell_weight();
}

double sobolev_norm(const TorusBargmann& b, const Eigen::VectorXcd& u, const PhaseFunction& weight,
                    bool frequency_only) {
  const auto& g = b.grid();
  const Eigen::VectorXcd uh = b.checked_modes(u);
  // Streams the field column by column; columns missing the spectrum of u vanish.
  std::vector<double> part(b.eta_count(), 0.0);
  parallel_for(part.size(), [&](std::size_t e) {
    const Eigen::VectorXd eta = b.eta(static_cast<long>(e));
    if (frequency_only) {
      const double energy = b.column_energy(uh, static_cast<long>(e));
      if (energy == 0.0) return;
      const double w = weight(grid_phase_point(g, 0, eta));
      part[e] = w * w * energy;
      return;
    }
    Eigen::VectorXcd col;
    if (!b.forward_column(uh, static_cast<long>(e), col)) return;
    double s = 0.0;
    for (long j = 0; j < col.size(); ++j) {
      const double w = weight(grid_phase_point(g, j, eta));
      s += w * w * std::norm(col(j));
    }
    part[e] = s;
  });
  double s = 0.0;
  for (double v : part) s += v;
  return std::sqrt(s * b.cell_weight());
}

// ---------------------------------------------------------------------------

WeightedSpace WeightedSpace::build(const Quantizer& q, const PhaseFunction& weight) {
  WeightedSpace sp;
  sp.weight = weight;
  Symbol w2{[weight](const PhasePoint& r) {
              const double w = weight(r);
              return cplx(w * w);
            },
            {},
            0.0};
  Eigen::MatrixXcd g = q.matrix(w2);
  sp.gram = 0.5 * (g + g.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(sp.gram);
  const Eigen::VectorXd ev = es.eigenvalues();
  if (!(ev.minCoeff() > 1e-12 * ev.maxCoeff()))
    throw ResolutionError("WeightedSpace: Op(W^2) is singular on this phase grid");
  const Eigen::MatrixXcd& V = es.eigenvectors();
  sp.sqrt_gram = V * ev.cwiseSqrt().asDiagonal() * V.adjoint();
  sp.inv_sqrt_gram = V * ev.cwiseSqrt().cwiseInverse().asDiagonal() * V.adjoint();
  return sp;
}

double WeightedSpace::norm(const Eigen::VectorXcd& uh) const { return (sqrt_gram * uh).norm(); }

double power_norm(const Eigen::MatrixXcd& m, int steps, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::VectorXcd x(m.cols());
  for (long i = 0; i < x.size(); ++i) x(i) = cplx(rng.normal(), rng.normal());
  x.normalize();
  double est = 0.0;
  for (int s = 0; s < steps; ++s) {
    const Eigen::VectorXcd y = m * x;
    est = y.norm();
    if (est == 0.0) return 0.0;
    x = m.adjoint() * y;
    const double nx = x.norm();
    if (nx == 0.0) return est;
    x /= nx;
  }
  return std::max(est, (m * x).norm());
}

double weighted_norm(const WeightedSpace& sp, const Eigen::MatrixXcd& t, int steps, std::uint64_t seed) {
  return power_norm(sp.sqrt_gram * t * sp.inv_sqrt_gram, steps, seed);
}

Eigen::VectorXcd hw_adjoint_apply(const WeightedSpace& sp, const Eigen::MatrixXcd& t, const Eigen::VectorXcd& v) {
  Eigen::ConjugateGradient<Eigen::MatrixXcd, Eigen::Lower | Eigen::Upper> cg;
  cg.setTolerance(1e-14);
  cg.setMaxIterations(10 * static_cast<int>(sp.gram.rows()));
  cg.compute(sp.gram);
  const Eigen::VectorXcd w = cg.solve(t.adjoint() * (sp.gram * v));
  if (cg.info() != Eigen::Success) throw ResolutionError("hw_adjoint_apply: conjugate gradients did not converge");
  return w;
}

double hw_adjoint_defect(const WeightedSpace& sp, const Eigen::MatrixXcd& t, int pairs, std::uint64_t seed) {
  Rng rng(seed);
  auto random_vec = [&] {
    Eigen::VectorXcd x(t.cols());
    for (long i = 0; i < x.size(); ++i) x(i) = cplx(rng.normal(), rng.normal());
    return x;
  };
  auto inner = [&](const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) { return a.dot(sp.gram * b); };
  double worst = 0.0;
  for (int p = 0; p < pairs; ++p) {
    const Eigen::VectorXcd u = random_vec(), v = random_vec();
    const Eigen::VectorXcd tu = t * u;
    const Eigen::VectorXcd tdv = hw_adjoint_apply(sp, t, v);
    const double scale = sp.norm(tu) * sp.norm(v) + sp.norm(u) * sp.norm(tdv);
    worst = std::max(worst, std::abs(inner(tu, v) - inner(u, tdv)) / scale);
  }
  return worst;
}

ProbeRecord composition_residual(const Quantizer& q, const WeightedSpace& sp, const Symbol& a, const Symbol& b,
                                 double C) {
  if (!b.certified()) throw ConfigError("composition_residual: second symbol needs a slow-variation certificate");
  const Eigen::MatrixXcd r = q.matrix(a) * q.matrix(b) - q.matrix(product(a, b));
  ProbeRecord rec;
  rec.probe = "composition";
  // Op(1) = I only up to the band's resolution floor; Op(a)Op(c) - Op(ac)
  // = c Op(a)(Op(1) - I) for constant c, so the floor enters the bound.
  const long dim = q.dim();
  const Eigen::MatrixXcd one_defect = q.matrix(constant_symbol(1.0)) - Eigen::MatrixXcd::Identity(dim, dim);
  const double floor = weighted_norm(sp, one_defect);
  const double sup_a = q.sup([&](const PhasePoint& rho) { return std::abs(a.a(rho)); });
  const double sup_b = q.sup([&](const PhasePoint& rho) { return std::abs(b.a(rho)); });
  rec.params = {{"C", C}, {"N0", b.N0}, {"floor", floor}};
  rec.residual = weighted_norm(sp, r);
  rec.bound = C * q.sup([&](const PhasePoint& rho) { return std::abs(a.a(rho)) * b.h(rho); }) +
              floor * sup_a * sup_b;
  rec.pass = rec.residual <= rec.bound;
  return rec;
}

ProbeRecord egorov_residual(const Quantizer& q, const WeightedSpace& sp, const Symbol& a, double t,
                            const TranslationFlow& flow, double C_t) {
  if (!a.certified()) throw ConfigError("egorov_residual: symbol needs a slow-variation certificate");
  Symbol moved{[a, flow, t](const PhasePoint& r) { return a.a(flow.lift(r, t)); }, {}, 0.0};
  const Eigen::VectorXcd lt = q.transfer_diagonal(flow, t);
  const Eigen::MatrixXcd r = lt.asDiagonal() * q.matrix(moved) - q.matrix(a) * lt.asDiagonal();
  ProbeRecord rec;
  rec.probe = "egorov";
  rec.params = {{"t", t}, {"C_t", C_t}};
  rec.residual = weighted_norm(sp, r);
  rec.bound = C_t * q.sup([&](const PhasePoint& rho) {
    return sp.weight(flow.lift(rho, t)) / sp.weight(rho) * a.h(rho);
  });
  rec.pass = rec.residual <= rec.bound;
  return rec;
}

// ---------------------------------------------------------------------------

double MicrolocalityFit::ratio_beyond(double dmin) const {
  double off = 0.0;
  for (const auto& s : samples)
    if (s.distance >= dmin) off = std::max(off, s.value);
  return off > 0.0 ? on_graph / off : INFINITY;
}

std::vector<PhasePoint> microlocality_probe_grid(const PhasePoint& center, const MetricParams& p,
                                                 const std::vector<double>& distances) {
  const int n = center.n();
  const double en = center.eta_norm();
  const double dp = delta_perp(en, p), dq = delta_par(en, p);
  // Coordinate step giving unit g-length at the center, in coords() order.
  Eigen::VectorXd unit(2 * n + 2);
  for (int i = 0; i < n; ++i) {
    unit(i) = dp;
    unit(n + 1 + i) = 1.0 / dp;
  }
  unit(n) = dq;
  unit(2 * n + 1) = 1.0 / dq;
  const Eigen::VectorXd c = center.coords();
  std::vector<PhasePoint> out;
  for (double D : distances) {
    for (int ax = 0; ax < 2 * n + 2; ++ax) {
      for (double s : {-1.0, 1.0}) {
        Eigen::VectorXd v = c;
        v(ax) += s * D * unit(ax);
        out.push_back(PhasePoint::from_coords(n, v));
      }
    }
    for (int i = 0; i <= n; ++i) {
      const int ya = i, ea = n + 1 + i;
      for (double s1 : {-1.0, 1.0})
        for (double s2 : {-1.0, 1.0}) {
          Eigen::VectorXd v = c;
          v(ya) += s1 * D * unit(ya) / std::sqrt(2.0);
          v(ea) += s2 * D * unit(ea) / std::sqrt(2.0);
          out.push_back(PhasePoint::from_coords(n, v));
        }
    }
  }
  return out;
}

namespace {
// |<phi_a, e^{-i k.s} phi_b>| summed over the integer lattice, s = shift.
double overlap(const PacketNormalizer& norm, const Eigen::VectorXd& ea, const Eigen::VectorXd& eb,
               const Eigen::VectorXd& shift) {
  const int d = norm.dim();
  const MetricParams& p = norm.params();
  Eigen::VectorXi lo(d), hi(d);
  // Per-axis half width beyond which phi0 drops under e^{-40}.
  auto width = [&](const Eigen::VectorXd& e, int ax) {
    const double en = e.norm();
    const double r0 = 9.0 / std::min(delta_perp(en, p), delta_par(en, p));
    return 9.0 / (ax == d - 1 ? delta_par(en + r0, p) : delta_perp(en + r0, p));
  };
  for (int ax = 0; ax < d; ++ax) {
    const double wa = width(ea, ax), wb = width(eb, ax);
    lo(ax) = static_cast<int>(std::floor(std::max(ea(ax) - wa, eb(ax) - wb)));
    hi(ax) = static_cast<int>(std::ceil(std::min(ea(ax) + wa, eb(ax) + wb)));
    if (hi(ax) < lo(ax)) return 0.0;
  }
  cplx s = 0.0;
  Eigen::VectorXi k = lo;
  while (true) {
    const Eigen::VectorXd kd = k.cast<double>();
    const double va = packet_hat0(ea, kd, p), vb = packet_hat0(eb, kd, p);
    if (va * vb > 1e-300) s += va * vb / norm.m_lattice(k) * std::polar(1.0, kd.dot(shift));
    int ax = d - 1;
    while (ax >= 0 && k(ax) == hi(ax)) {
      k(ax) = lo(ax);
      --ax;
    }
    if (ax < 0) break;
    ++k(ax);
  }
  return std::abs(s);
}

Eigen::VectorXd y_of(const PhasePoint& r) {
  Eigen::VectorXd y(r.n() + 1);
  y << r.x, r.z;
  return y;
}

Eigen::VectorXd eta_of(const PhasePoint& r) {
  Eigen::VectorXd e(r.n() + 1);
  e << r.xi, r.omega;
  return e;
}
}  // namespace

MicrolocalityFit microlocality_probe(const PacketNormalizer& norm, const PhasePoint& rho, double t,
                                     const TranslationFlow& flow, const std::vector<PhasePoint>& probes,
                                     double fit_lo, double fit_hi) {
  const int n = rho.n();
  if (norm.dim() != n + 1) throw ConfigError("microlocality_probe: normalizer does not match phase point");
  const PhasePoint target = flow.lift(rho, t);
  // <phi_r', L^t phi_r> = sum_k phi_hat_eta'(k) phi_hat_eta(k) e^{i k.(y' - y - v t)}.
  auto value = [&](const PhasePoint& rp) {
    return overlap(norm, eta_of(rp), eta_of(rho), y_of(rp) - y_of(target));
  };
  MicrolocalityFit fit;
  fit.on_graph = value(target);
  fit.samples.resize(probes.size());
  parallel_for(probes.size(), [&](std::size_t i) {
    Eigen::VectorXd diff = target.coords() - probes[i].coords();
    for (int a = 0; a <= n; ++a) diff(a) = wrap_centered(diff(a));
    fit.samples[i] = {g_norm(probes[i], diff, norm.params()), value(probes[i])};
  });
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (const auto& s : fit.samples) {
    if (s.distance < fit_lo || s.distance > fit_hi || !(s.value > 0.0)) continue;
    const double x = std::log(jbracket(s.distance)), y = std::log(s.value);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++cnt;
  }
  if (cnt < 3) throw ConfigError("microlocality_probe: fewer than three probes inside the fit range");
  const double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  fit.decay_exponent = -slope;
  return fit;
}

}  // namespace ruelle
