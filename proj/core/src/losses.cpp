#include "advrisk/losses.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "advrisk/errors.hpp"

namespace advrisk::losses {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kScanRange = 50.0;

void check_eta(double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw DomainError("eta must lie in [0,1]");
}

double parse_double(std::string_view s, const char* what) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw DomainError(std::string("cannot parse ") + what + ": '" + std::string(s) + "'");
  return v;
}

std::string trim(std::string s) {
  auto issp = [](unsigned char c) { return std::isspace(c) != 0; };
  s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), issp));
  s.erase(std::find_if_not(s.rbegin(), s.rend(), issp).base(), s.end());
  return s;
}

// Composite mesh on [-A, A]: uniform points, a geometric cluster around 0,
// and the reflected table breakpoints (where a piecewise-linear C has kinks).
std::vector<double> scan_mesh(const Loss& loss) {
  std::vector<double> m;
  const int nu = 4000;
  for (int i = 0; i <= nu; ++i) m.push_back(-kScanRange + 2.0 * kScanRange * i / nu);
  for (int e = -9; e <= 1; ++e) {
    for (double c : {1.0, 2.0, 5.0}) {
      double v = c * std::pow(10.0, e);
      if (v <= kScanRange) {
        m.push_back(v);
        m.push_back(-v);
      }
    }
  }
  for (double a : loss.table_alpha()) {
    if (std::abs(a) <= kScanRange) {
      m.push_back(a);
      m.push_back(-a);
    }
  }
  m.push_back(0.0);
  std::sort(m.begin(), m.end());
  m.erase(std::unique(m.begin(), m.end()), m.end());
  return m;
}

ConditionalRiskProfile scanned_profile(const Loss& loss, double eta, double tol) {
  const auto mesh = scan_mesh(loss);
  std::vector<double> c(mesh.size());
  double best = kInf;
  for (std::size_t i = 0; i < mesh.size(); ++i) {
    c[i] = conditional_risk(loss, eta, mesh[i]);
    best = std::min(best, c[i]);
  }
  const double at_neg = conditional_risk(loss, eta, ExtendedReal::neg_inf());
  const double at_pos = conditional_risk(loss, eta, ExtendedReal::pos_inf());
  const double stol = std::max(tol, 1e-12);

  ConditionalRiskProfile p;
  p.eta = eta;
  p.c_star = std::min({best, at_neg, at_pos});

  if (at_neg <= p.c_star + stol) {
    p.alpha_min = ExtendedReal::neg_inf();
  } else if (best <= p.c_star + stol) {
    std::size_t i0 = 0;
    while (c[i0] > p.c_star + stol) ++i0;
    if (i0 == 0) throw NumericError("minimizer plateau reaches the scan edge", mesh[0], mesh[0]);
    // Left edge of the argmin plateau lies in (mesh[i0-1], mesh[i0]].
    double lo = mesh[i0 - 1], hi = mesh[i0];
    for (int it = 0; it < 200 && hi - lo > tol; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (conditional_risk(loss, eta, mid) <= p.c_star + stol) hi = mid;
      else lo = mid;
    }
    if (hi - lo > std::max(tol, 1e-12 * std::abs(hi))) throw NumericError("plateau edge refinement did not converge", lo, hi);
    p.alpha_min = ExtendedReal(hi);
  } else {
    p.alpha_min = ExtendedReal::pos_inf();
  }

  auto on_plateau = [&](double v) { return v <= p.c_star + stol; };
  p.minimizer_set_lo = p.alpha_min;
  if (on_plateau(at_pos)) {
    p.minimizer_set_hi = ExtendedReal::pos_inf();
  } else {
    double hi = -kInf;
    for (std::size_t i = 0; i < mesh.size(); ++i)
      if (on_plateau(c[i])) hi = mesh[i];
    p.minimizer_set_hi = hi == -kInf ? p.alpha_min : ExtendedReal(hi);
  }
  return p;
}

ConditionalRiskProfile make_profile(double eta, double c_star, ExtendedReal amin, ExtendedReal lo, ExtendedReal hi) {
  ConditionalRiskProfile p;
  p.eta = eta;
  p.c_star = c_star;
  p.alpha_min = amin;
  p.minimizer_set_lo = lo;
  p.minimizer_set_hi = hi;
  return p;
}

}  // namespace

Loss Loss::hinge() {
  Loss l(LossKind::hinge, "hinge");
  l.convex_ = true;
  return l;
}

Loss Loss::squared_hinge() {
  Loss l(LossKind::squared_hinge, "squared_hinge");
  l.convex_ = true;
  return l;
}

Loss Loss::exponential() {
  Loss l(LossKind::exponential, "exponential");
  l.convex_ = true;
  return l;
}

Loss Loss::sigmoid() { return Loss(LossKind::sigmoid, "sigmoid"); }

Loss Loss::rho_margin(double rho) {
  if (!(rho > 0.0) || !std::isfinite(rho)) throw DomainError("rho_margin needs a positive finite rho");
  std::ostringstream os;
  os << "rho_margin:" << rho;
  Loss l(LossKind::rho_margin, os.str());
  l.rho_ = rho;
  return l;
}

Loss Loss::zero_one_indicator() { return Loss(LossKind::zero_one_indicator, "zero_one"); }

Loss Loss::custom(std::vector<double> alpha, std::vector<double> value, std::string name) {
  if (alpha.size() != value.size() || alpha.size() < 2) throw DomainError("custom loss needs at least two (alpha, value) rows");
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    if (!std::isfinite(alpha[i]) || !std::isfinite(value[i])) throw DomainError("custom loss table must be finite");
    if (value[i] < 0.0) throw DomainError("custom loss values must be nonnegative");
    if (i > 0 && !(alpha[i] > alpha[i - 1])) throw DomainError("custom loss alphas must be strictly increasing");
    if (i > 0 && value[i] > value[i - 1]) throw DomainError("custom loss must be non-increasing");
  }
  if (value.back() > 1e-12) throw DomainError("custom loss must reach 0 at the right end of its table");
  Loss l(LossKind::custom, std::move(name));
  bool convex = true;
  for (std::size_t i = 1; i + 1 < alpha.size(); ++i) {
    const double s0 = (value[i] - value[i - 1]) / (alpha[i] - alpha[i - 1]);
    const double s1 = (value[i + 1] - value[i]) / (alpha[i + 1] - alpha[i]);
    if (s1 < s0 - 1e-12 * (1.0 + std::abs(s0))) convex = false;
  }
  l.convex_ = convex;
  l.alpha_ = std::move(alpha);
  l.value_ = std::move(value);
  return l;
}

Loss Loss::from_csv(const std::filesystem::path& path, std::string name) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open custom loss file " + path.string());
  std::vector<double> a, v;
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw DomainError("custom loss rows must be 'alpha,value'");
    const std::string lhs = trim(line.substr(0, comma));
    const std::string rhs = trim(line.substr(comma + 1));
    if (a.empty() && v.empty() && !lhs.empty() && (std::isalpha(static_cast<unsigned char>(lhs[0])) != 0)) continue;  // header
    a.push_back(parse_double(lhs, "alpha"));
    v.push_back(parse_double(rhs, "value"));
  }
  return custom(std::move(a), std::move(v), std::move(name));
}

Loss Loss::from_name(std::string_view spec) {
  const std::string s = trim(std::string(spec));
  if (s == "hinge") return hinge();
  if (s == "squared_hinge") return squared_hinge();
  if (s == "exponential") return exponential();
  if (s == "sigmoid") return sigmoid();
  if (s == "zero_one" || s == "zero_one_indicator") return zero_one_indicator();
  if (s.rfind("rho_margin:", 0) == 0) return rho_margin(parse_double(std::string_view(s).substr(11), "rho"));
  if (s == "rho_margin") return rho_margin(1.0);
  if (s.rfind("custom:", 0) == 0) return from_csv(s.substr(7), s);
  throw DomainError("unknown loss '" + s + "'");
}

double Loss::operator()(double a) const {
  switch (kind_) {
    case LossKind::hinge:
      return a == kInf ? 0.0 : std::max(0.0, 1.0 - a);
    case LossKind::squared_hinge: {
      if (a >= 1.0) return 0.0;
      const double d = 1.0 - a;
      return d * d;
    }
    case LossKind::exponential:
      return std::exp(-a);
    case LossKind::sigmoid:
      if (a == kInf) return 0.0;
      if (a == -kInf) return 1.0;
      return a >= 0.0 ? std::exp(-a) / (1.0 + std::exp(-a)) : 1.0 / (1.0 + std::exp(a));
    case LossKind::rho_margin:
      if (a <= 0.0) return 1.0;
      return a >= rho_ ? 0.0 : 1.0 - a / rho_;
    case LossKind::zero_one_indicator:
      return a <= 0.0 ? 1.0 : 0.0;
    case LossKind::custom: {
      if (a == kInf) return 0.0;
      if (a <= alpha_.front()) return value_.front();
      if (a >= alpha_.back()) return value_.back();
      const auto it = std::upper_bound(alpha_.begin(), alpha_.end(), a);
      const std::size_t j = static_cast<std::size_t>(it - alpha_.begin());
      const double t = (a - alpha_[j - 1]) / (alpha_[j] - alpha_[j - 1]);
      return value_[j - 1] + t * (value_[j] - value_[j - 1]);
    }
  }
  return 0.0;
}

double Loss::sup_value() const { return (*this)(-kInf); }

double conditional_risk(const Loss& loss, double eta, ExtendedReal alpha) {
  check_eta(eta);
  const double a = alpha.value();
  const double t1 = eta == 0.0 ? 0.0 : eta * loss(a);
  const double t0 = eta == 1.0 ? 0.0 : (1.0 - eta) * loss(-a);
  return t1 + t0;
}

double conditional_risk(const Loss& loss, double eta, double alpha) { return conditional_risk(loss, eta, ExtendedReal(alpha)); }

ConditionalRiskProfile optimal_conditional_risk(const Loss& loss, double eta, double tol) {
  check_eta(eta);
  if (!(tol > 0.0)) throw DomainError("tol must be positive");
  const ExtendedReal ninf = ExtendedReal::neg_inf(), pinf = ExtendedReal::pos_inf();
  const double m = std::min(eta, 1.0 - eta);
  switch (loss.kind()) {
    case LossKind::hinge:
      if (eta > 0.5) return make_profile(eta, 2.0 * m, ExtendedReal(1.0), ExtendedReal(1.0), eta == 1.0 ? pinf : ExtendedReal(1.0));
      if (eta < 0.5) {
        if (eta == 0.0) return make_profile(eta, 0.0, ninf, ninf, ExtendedReal(-1.0));
        return make_profile(eta, 2.0 * m, ExtendedReal(-1.0), ExtendedReal(-1.0), ExtendedReal(-1.0));
      }
      return make_profile(eta, 1.0, ExtendedReal(-1.0), ExtendedReal(-1.0), ExtendedReal(1.0));
    case LossKind::squared_hinge: {
      const double c = 4.0 * eta * (1.0 - eta);
      if (eta == 1.0) return make_profile(eta, 0.0, ExtendedReal(1.0), ExtendedReal(1.0), pinf);
      if (eta == 0.0) return make_profile(eta, 0.0, ninf, ninf, ExtendedReal(-1.0));
      const ExtendedReal a(2.0 * eta - 1.0);
      return make_profile(eta, c, a, a, a);
    }
    case LossKind::exponential: {
      if (eta == 1.0) return make_profile(eta, 0.0, pinf, pinf, pinf);
      if (eta == 0.0) return make_profile(eta, 0.0, ninf, ninf, ninf);
      const ExtendedReal a(0.5 * std::log(eta / (1.0 - eta)));
      return make_profile(eta, 2.0 * std::sqrt(eta * (1.0 - eta)), a, a, a);
    }
    case LossKind::sigmoid:
      if (eta > 0.5) return make_profile(eta, m, pinf, pinf, pinf);
      if (eta < 0.5) return make_profile(eta, m, ninf, ninf, ninf);
      return make_profile(eta, 0.5, ninf, ninf, pinf);
    case LossKind::rho_margin:
      if (eta > 0.5) return make_profile(eta, m, ExtendedReal(loss.rho()), ExtendedReal(loss.rho()), pinf);
      if (eta < 0.5) return make_profile(eta, m, ninf, ninf, ExtendedReal(-loss.rho()));
      return make_profile(eta, 0.5, ninf, ninf, pinf);
    case LossKind::zero_one_indicator:
      // The argmin is open at 0 when eta > 1/2; report its infimum.
      if (eta > 0.5) return make_profile(eta, m, ExtendedReal(0.0), ExtendedReal(0.0), pinf);
      return make_profile(eta, m, ninf, ninf, eta < 0.5 ? ExtendedReal(0.0) : pinf);
    case LossKind::custom:
      return scanned_profile(loss, eta, std::max(tol, 1e-9));
  }
  throw DomainError("unhandled loss kind");
}

double optimal_conditional_risk_value(const Loss& loss, double eta) {
  check_eta(eta);
  const double m = std::min(eta, 1.0 - eta);
  switch (loss.kind()) {
    case LossKind::hinge: return 2.0 * m;
    case LossKind::squared_hinge: return 4.0 * eta * (1.0 - eta);
    case LossKind::exponential: return 2.0 * std::sqrt(eta * (1.0 - eta));
    case LossKind::sigmoid:
    case LossKind::rho_margin:
    case LossKind::zero_one_indicator: return m;
    case LossKind::custom: return optimal_conditional_risk(loss, eta).c_star;
  }
  return 0.0;
}

ExtendedReal smallest_minimizer(const Loss& loss, double eta) { return optimal_conditional_risk(loss, eta).alpha_min; }

std::vector<ExtendedReal> smallest_minimizer_map(const Loss& loss, const std::vector<double>& etas) {
  if (!std::is_sorted(etas.begin(), etas.end())) throw DomainError("etas must be sorted ascending");
  std::vector<ExtendedReal> out;
  out.reserve(etas.size());
  for (double e : etas) out.push_back(smallest_minimizer(loss, e));
  for (std::size_t i = 1; i < out.size(); ++i)
    if (out[i] < out[i - 1]) throw NumericError("smallest minimizer map is not monotone", etas[i - 1], etas[i]);
  return out;
}

bool half_risk_equals_phi0(const Loss& loss, double tol) {
  return std::abs(optimal_conditional_risk_value(loss, 0.5) - loss(0.0)) <= tol;
}

ModifiedMinimizer modified_minimizer_map(const Loss& loss, double eta, double tol) {
  check_eta(eta);
  ModifiedMinimizer out;
  try {
    out.premise_holds = is_consistent(loss) && half_risk_equals_phi0(loss, tol);
  } catch (const UndecidableError&) {
    out.premise_holds = false;
  }
  out.value = eta == 0.5 ? ExtendedReal(0.0) : smallest_minimizer(loss, eta);
  return out;
}

bool is_consistent(const Loss& loss, double tol) {
  switch (loss.kind()) {
    case LossKind::sigmoid:
    case LossKind::rho_margin: return true;
    case LossKind::zero_one_indicator: return false;
    case LossKind::custom:
      if (!loss.convex()) throw UndecidableError("consistency of a non-convex custom loss is undecidable here");
      break;
    default: break;
  }
  const double d = 1e-7;
  const double right = (loss(d) - loss(0.0)) / d;
  const double left = (loss(0.0) - loss(-d)) / d;
  return std::abs(right - left) <= std::max(tol, 1e-5) && right < 0.0;
}

bool is_adversarially_consistent_universal(const Loss& loss, double tol) {
  return optimal_conditional_risk_value(loss, 0.5) < loss(0.0) - tol;
}

UniformGap uniform_gap(const Loss& loss, double r, double tol) {
  if (!(r > 0.0 && r <= 0.5)) throw DomainError("uniform_gap: r must lie in (0, 1/2]");
  if (!is_consistent(loss)) throw DomainError("uniform_gap: loss is not consistent");
  const ExtendedReal astar = smallest_minimizer(loss, 0.5 + r);
  const double phi0 = loss(0.0);
  const double phistar = loss(astar);
  if (!(astar > ExtendedReal(0.0)) || !(phistar < phi0)) throw DomainError("uniform_gap: no alpha_r exists; loss violates the consistency premise");

  // Bisect for phi(alpha_r) at the midpoint value between phi(alpha*) and phi(0).
  const double target = 0.5 * (phistar + phi0);
  double lo = 0.0;
  double hi = astar.is_finite() ? astar.value() : 1.0;
  if (!astar.is_finite())
    while (loss(hi) >= target) {
      hi *= 2.0;
      if (hi > 1e6) throw DomainError("uniform_gap: failed to bracket alpha_r");
    }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (loss(mid) >= target) lo = mid;
    else hi = mid;
  }
  const double alpha_r = lo;
  if (!(alpha_r > 0.0) || !(loss(alpha_r) < phi0) || !(loss(alpha_r) > phistar)) throw DomainError("uniform_gap: failed to find alpha_r");

  std::vector<double> amesh;
  const int na = 2000;
  for (int i = 0; i <= na; ++i) amesh.push_back(-kScanRange + (alpha_r + kScanRange) * i / na);
  amesh.push_back(-kInf);
  double k = kInf;
  const int ne = 200;
  for (int i = 0; i <= ne; ++i) {
    const double eta = 0.5 + r + (0.5 - r) * i / ne;
    const double cs = optimal_conditional_risk_value(loss, eta);
    for (double a : amesh) k = std::min(k, conditional_risk(loss, eta, ExtendedReal(a)) - cs);
  }
  if (!(k > tol)) throw NumericError("uniform_gap: k_r is not positive", k, k);
  return {alpha_r, k};
}

}  // namespace advrisk::losses
