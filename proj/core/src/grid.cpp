#include "advrisk/grid.hpp"

#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>
#include <numbers>
#include <sstream>

#include "advrisk/errors.hpp"
#include "json.hpp"

namespace advrisk::grid {

namespace {

double normal_pdf(double x, double mu, double sigma) {
  const double z = (x - mu) / sigma;
  return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * std::numbers::pi));
}

// Mass of N(mu, sigma) outside [lo, hi].
double normal_tail(double lo, double hi, double mu, double sigma) {
  const double s = sigma * std::numbers::sqrt2;
  return 0.5 * std::erfc((mu - lo) / s) + 0.5 * std::erfc((hi - mu) / s);
}

template <class Better>
std::vector<double> sliding(const std::vector<double>& v, std::size_t k, Better better) {
  const std::size_t n = v.size();
  std::vector<double> out(n);
  std::deque<std::size_t> dq;
  std::size_t next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t hi = std::min(n - 1, i + k);
    for (; next <= hi; ++next) {
      while (!dq.empty() && !better(v[dq.back()], v[next])) dq.pop_back();
      dq.push_back(next);
    }
    while (dq.front() + k < i) dq.pop_front();
    out[i] = v[dq.front()];
  }
  return out;
}

}  // namespace

Grid::Grid(double x0, double h, std::vector<double> m0, std::vector<double> m1, double truncated_mass)
    : x0_(x0), h_(h), m0_(std::move(m0)), m1_(std::move(m1)), truncated_(truncated_mass) {
  if (!(h_ > 0.0) || !std::isfinite(h_) || !std::isfinite(x0_)) throw DomainError("grid: h must be positive and x0 finite");
  if (m0_.size() != m1_.size() || m0_.empty()) throw DomainError("grid: mass vectors must be nonempty and of equal length");
  for (std::size_t i = 0; i < m0_.size(); ++i) {
    if (!(m0_[i] >= 0.0) || !(m1_[i] >= 0.0) || !std::isfinite(m0_[i]) || !std::isfinite(m1_[i]))
      throw DomainError("grid: masses must be finite and nonnegative");
    total0_ += m0_[i];
    total1_ += m1_[i];
  }
  if (!(total0_ + total1_ > 0.0)) throw DomainError("grid: total mass must be positive");
}

GridPtr from_gaussian_mixture(double mu0, double sigma0, double w0, double mu1, double sigma1, double w1, double span_sigmas, double h) {
  if (!(sigma0 > 0.0 && sigma1 > 0.0)) throw DomainError("gaussian grid: sigmas must be positive");
  if (!(w0 > 0.0 && w1 > 0.0)) throw DomainError("gaussian grid: weights must be positive");
  if (!(h > 0.0)) throw DomainError("gaussian grid: h must be positive");
  if (!(span_sigmas >= 4.0)) throw DomainError("gaussian grid: span_sigmas must be at least 4");
  const double smax = std::max(sigma0, sigma1);
  const double lo = std::min(mu0, mu1) - span_sigmas * smax;
  const double hi = std::max(mu0, mu1) + span_sigmas * smax;
  const auto n = static_cast<std::size_t>(std::llround((hi - lo) / h));
  if (n == 0) throw DomainError("gaussian grid: h exceeds the domain width");
  const double right = lo + static_cast<double>(n) * h;
  const double tail = w0 * normal_tail(lo, right, mu0, sigma0) + w1 * normal_tail(lo, right, mu1, sigma1);
  if (tail >= 1e-6 * (w0 + w1)) throw DomainError("gaussian grid: span too small, truncated tail mass exceeds 1e-6 of total");
  std::vector<double> m0(n), m1(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = lo + (static_cast<double>(i) + 0.5) * h;
    m0[i] = w0 * normal_pdf(x, mu0, sigma0) * h;
    m1[i] = w1 * normal_pdf(x, mu1, sigma1) * h;
  }
  return std::make_shared<const Grid>(lo, h, std::move(m0), std::move(m1), tail);
}

GridFunction::GridFunction(GridPtr grid, std::vector<double> values) : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_) throw DomainError("grid function needs a grid");
  if (values_.size() != grid_->n()) throw DomainError("grid function length does not match grid");
  for (double v : values_)
    if (std::isnan(v)) throw DomainError("grid function values must not be NaN");
}

GridFunction::GridFunction(GridPtr grid, double fill) : GridFunction(grid, std::vector<double>(grid ? grid->n() : 0, fill)) {}

EpsilonRadius::EpsilonRadius(double eps, const Grid& grid) : eps_(eps), k_(0), h_(grid.h()) {
  if (!(eps >= 0.0) || !std::isfinite(eps)) throw DomainError("epsilon must be finite and nonnegative");
  k_ = static_cast<std::size_t>(std::llround(eps / h_));
}

EpsilonRadius EpsilonRadius::cells(std::size_t k, const Grid& grid) {
  return EpsilonRadius(static_cast<double>(k) * grid.h(), k, grid.h());
}

std::vector<double> sliding_max(const std::vector<double>& v, std::size_t k) {
  return sliding(v, k, [](double a, double b) { return a > b; });
}

std::vector<double> sliding_min(const std::vector<double>& v, std::size_t k) {
  return sliding(v, k, [](double a, double b) { return a < b; });
}

GridFunction sup_window(const GridFunction& f, const EpsilonRadius& r) {
  if (!r.matches(f.grid())) throw DomainError("radius was derived from a different grid");
  return GridFunction(f.grid_ptr(), sliding_max(f.values(), r.k()));
}

GridFunction inf_window(const GridFunction& f, const EpsilonRadius& r) {
  if (!r.matches(f.grid())) throw DomainError("radius was derived from a different grid");
  return GridFunction(f.grid_ptr(), sliding_min(f.values(), r.k()));
}

Posterior posterior(const GridPtr& grid) {
  const std::size_t n = grid->n();
  std::vector<double> eta(n, 0.5);
  std::vector<bool> zero(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = grid->m0()[i] + grid->m1()[i];
    if (t > 0.0) eta[i] = grid->m1()[i] / t;
    else zero[i] = true;
  }
  return {GridFunction(grid, std::move(eta)), std::move(zero)};
}

void write_csv(const Grid& grid, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DomainError("cannot write " + path.string());
  char buf[128];
  std::snprintf(buf, sizeof buf, "# x0=%.17g,h=%.17g\n", grid.x0(), grid.h());
  out << buf << "x,m0,m1\n";
  for (std::size_t i = 0; i < grid.n(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", grid.x(i), grid.m0()[i], grid.m1()[i]);
    out << buf;
  }
}

GridPtr read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open " + path.string());
  std::string line;
  double x0 = 0.0, h = 0.0;
  bool have_meta = false;
  std::vector<double> xs, m0, m1;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (std::sscanf(line.c_str(), "# x0=%lf,h=%lf", &x0, &h) == 2) have_meta = true;
      continue;
    }
    if (line.rfind("x,", 0) == 0) continue;
    double x = 0, a = 0, b = 0;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &x, &a, &b) != 3) throw DomainError("grid csv: malformed row '" + line + "'");
    xs.push_back(x);
    m0.push_back(a);
    m1.push_back(b);
  }
  if (xs.empty()) throw DomainError("grid csv: no rows");
  if (!have_meta) {
    if (xs.size() < 2) throw DomainError("grid csv: need x0/h metadata or two rows");
    h = (xs.back() - xs.front()) / static_cast<double>(xs.size() - 1);
    x0 = xs.front() - 0.5 * h;
  }
  return std::make_shared<const Grid>(x0, h, std::move(m0), std::move(m1));
}

std::string to_json(const Grid& grid) {
  nlohmann::ordered_json j;
  j["x0"] = grid.x0();
  j["h"] = grid.h();
  j["n"] = grid.n();
  j["truncated_mass"] = grid.truncated_mass();
  j["m0"] = grid.m0();
  j["m1"] = grid.m1();
  return j.dump();
}

GridPtr grid_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    auto m0 = j.at("m0").get<std::vector<double>>();
    auto m1 = j.at("m1").get<std::vector<double>>();
    return std::make_shared<const Grid>(j.at("x0").get<double>(), j.at("h").get<double>(), std::move(m0), std::move(m1),
                                        j.value("truncated_mass", 0.0));
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("grid json: ") + e.what());
  }
}

}  // namespace advrisk::grid
