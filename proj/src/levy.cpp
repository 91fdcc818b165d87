#include "jumplab/levy.hpp"

#include <algorithm>
#include <cmath>

namespace jumplab {

double RadialPower::density(double rho) const {
  if (rho < lo || rho > hi || rho <= 0.0) return 0.0;
  return coef * std::pow(rho, exponent);
}

double RadialPower::mass(double a, double b) const {
  return moment(0.0, a, b);
}

double RadialPower::moment(double q, double a, double b) const {
  if (coef <= 0.0) return 0.0;
  a = std::max(a, lo);
  b = std::min(b, hi);
  if (!(a < b)) return 0.0;
  const double e = exponent + q;
  if (std::isinf(b) && e >= -1.0) return kInf;
  if (a <= 0.0 && e <= -1.0) return kInf;
  // Antiderivative of a pure power; exact at singular or infinite endpoints.
  if (std::abs(e + 1.0) < 1e-12) return coef * std::log(b / a);
  const double pa = a > 0.0 ? std::pow(a, e + 1.0) : 0.0;
  const double pb = std::isinf(b) ? 0.0 : std::pow(b, e + 1.0);
  return coef * (pb - pa) / (e + 1.0);
}

double RadialPower::sample(double a, double b, Rng& rng) const {
  a = std::max(a, lo);
  b = std::min(b, hi);
  if (!(a < b) || coef <= 0.0)
    throw ConfigError("RadialPower::sample: empty support");
  const double e1 = exponent + 1.0;
  const double u = rng.uniform01_open();
  if (std::abs(e1) < 1e-12) {
    if (std::isinf(b)) throw ConfigError("RadialPower::sample: infinite mass");
    return a * std::pow(b / a, u);
  }
  if (std::isinf(b)) {
    if (e1 >= 0.0) throw ConfigError("RadialPower::sample: infinite mass");
    // Survival inversion: P(rho > r) = (r/a)^{e1}.
    return a * std::pow(u, 1.0 / e1);
  }
  const double pa = std::pow(a, e1);
  const double pb = std::pow(b, e1);
  if (a <= 0.0 && e1 <= 0.0) throw ConfigError("RadialPower::sample: infinite mass");
  return std::pow(pa + u * (pb - pa), 1.0 / e1);
}

double Diffuse::direction_weight_sum() const {
  if (uniform_sphere) return 1.0;
  double s = 0.0;
  for (const auto& d : directions) s += d.weight;
  return s;
}

void LevyMeasure::validate() const {
  int d = 0;
  auto check_dim = [&](int n, const char* what) {
    if (n < 1) throw ConfigError(std::string("LevyMeasure: empty ") + what);
    if (d == 0)
      d = n;
    else if (d != n)
      throw ConfigError("LevyMeasure: inconsistent mark dimensions");
  };
  for (const auto& a : atoms) {
    if (!(a.weight > 0.0)) throw ConfigError("LevyMeasure: atom weight must be positive");
    check_dim(static_cast<int>(a.mark.size()), "atom mark");
    if (a.mark.norm() <= 0.0) throw ConfigError("LevyMeasure: zero atom mark");
    if (!a.mark.allFinite()) throw ConfigError("LevyMeasure: non-finite atom mark");
  }
  for (std::size_t i = 0; i < atoms.size(); ++i)
    for (std::size_t j = i + 1; j < atoms.size(); ++j)
      if ((atoms[i].mark - atoms[j].mark).norm() <= kNumericZero)
        throw ConfigError("LevyMeasure: duplicate atom marks");
  if (diffuse) {
    const auto& df = *diffuse;
    if (df.radial.coef < 0.0) throw ConfigError("LevyMeasure: negative radial coefficient");
    if (!(df.radial.lo >= 0.0) || !(df.radial.hi > df.radial.lo))
      throw ConfigError("LevyMeasure: bad radial support");
    if (df.uniform_sphere) {
      if (df.sphere_dim < 2)
        throw ConfigError("LevyMeasure: uniform-sphere law needs dimension >= 2");
      if (!df.directions.empty())
        throw ConfigError("LevyMeasure: uniform-sphere law excludes a direction list");
      check_dim(df.sphere_dim, "sphere dimension");
    } else {
      if (df.directions.empty())
        throw ConfigError("LevyMeasure: diffuse part needs a direction law");
      for (const auto& dw : df.directions) {
        if (!(dw.weight > 0.0))
          throw ConfigError("LevyMeasure: direction weight must be positive");
        check_dim(static_cast<int>(dw.dir.size()), "direction");
        if (std::abs(dw.dir.norm() - 1.0) > 1e-9)
          throw ConfigError("LevyMeasure: directions must be unit vectors");
      }
    }
  }
}

int LevyMeasure::dim() const {
  if (!atoms.empty()) return static_cast<int>(atoms.front().mark.size());
  if (diffuse) {
    if (diffuse->uniform_sphere) return diffuse->sphere_dim;
    if (!diffuse->directions.empty())
      return static_cast<int>(diffuse->directions.front().dir.size());
  }
  return 0;
}

bool LevyMeasure::empty() const {
  return atoms.empty() && (!diffuse || diffuse->radial.coef <= 0.0);
}

double total_rate(const LevyMeasure& measure, double truncation) {
  if (truncation < 0.0) throw ConfigError("total_rate: negative truncation");
  double rate = 0.0;
  for (const auto& a : measure.atoms)
    if (a.mark.norm() >= truncation) rate += a.weight;
  if (measure.diffuse) {
    const auto& df = *measure.diffuse;
    const double radial = df.radial.mass(truncation, kInf);
    if (std::isinf(radial))
      throw ConfigError("total_rate: diffuse mass diverges; use a positive truncation");
    rate += radial * df.direction_weight_sum();
  }
  return rate;
}

namespace {

Vec sample_sphere(int dim, Rng& rng) {
  Vec v(dim);
  double norm2;
  do {
    for (int i = 0; i < dim; ++i) v[i] = rng.normal();
    norm2 = v.squaredNorm();
  } while (norm2 <= 0.0);
  return v / std::sqrt(norm2);
}

Vec sample_mark(const LevyMeasure& measure, double truncation,
                const std::vector<double>& cdf, double diffuse_mass, Rng& rng) {
  const std::size_t idx = rng.categorical_from_cdf(cdf);
  std::size_t k = 0;
  for (const auto& a : measure.atoms) {
    if (a.mark.norm() < truncation) continue;
    if (k == idx) return a.mark;
    ++k;
  }
  // Diffuse branch: direction, then radius from the truncated radial law.
  const auto& df = *measure.diffuse;
  (void)diffuse_mass;
  Vec dir;
  if (df.uniform_sphere) {
    dir = sample_sphere(df.sphere_dim, rng);
  } else {
    std::vector<double> dir_cdf;
    dir_cdf.reserve(df.directions.size());
    double acc = 0.0;
    for (const auto& dw : df.directions) {
      acc += dw.weight;
      dir_cdf.push_back(acc);
    }
    dir = df.directions[rng.categorical_from_cdf(dir_cdf)].dir;
  }
  const double rho = df.radial.sample(truncation, kInf, rng);
  return rho * dir;
}

}  // namespace

PointMeasureRealization sample_point_measure(const LevyMeasure& measure, double horizon,
                                             double truncation, Rng& rng) {
  if (!(horizon > 0.0)) throw ConfigError("sample_point_measure: horizon must be positive");
  const double rate = total_rate(measure, truncation);

  PointMeasureRealization real;
  real.horizon = horizon;
  real.truncation = truncation;
  if (rate <= 0.0) return real;

  // Cumulative weights over [qualifying atoms..., diffuse part].
  std::vector<double> cdf;
  double acc = 0.0;
  for (const auto& a : measure.atoms) {
    if (a.mark.norm() < truncation) continue;
    acc += a.weight;
    cdf.push_back(acc);
  }
  double diffuse_mass = 0.0;
  if (measure.diffuse) {
    diffuse_mass = measure.diffuse->radial.mass(truncation, kInf) *
                   measure.diffuse->direction_weight_sum();
    if (diffuse_mass > 0.0) {
      acc += diffuse_mass;
      cdf.push_back(acc);
    }
  }

  const std::uint64_t n = rng.poisson(rate * horizon);
  std::vector<double> times(n);
  for (auto& t : times) t = horizon * (1.0 - rng.uniform01());  // (0, horizon]
  std::sort(times.begin(), times.end());
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1])) times[i] = std::nextafter(times[i - 1], kInf);

  real.events.reserve(n);
  for (double t : times)
    real.events.push_back({t, sample_mark(measure, truncation, cdf, diffuse_mass, rng)});

  for (std::size_t i = 1; i < real.events.size(); ++i)
    if (!(real.events[i].time > real.events[i - 1].time))
      throw NumericError("sample_point_measure: non-increasing event times");
  return real;
}

double tail_moment(const LevyMeasure& measure, double q) {
  if (!(q > 0.0)) throw ConfigError("tail_moment: q must be positive");
  double total = 0.0;
  for (const auto& a : measure.atoms) {
    const double norm = a.mark.norm();
    if (norm > 1.0) total += a.weight * std::pow(norm, q);
  }
  if (measure.diffuse) {
    const auto& df = *measure.diffuse;
    const double radial = df.radial.moment(q, 1.0, kInf);
    if (std::isinf(radial)) return kInf;
    total += radial * df.direction_weight_sum();
  }
  return total;
}

RegionMass region_mass(const LevyMeasure& measure,
                       const std::function<bool(const Vec&)>& predicate,
                       Rng* rng, std::uint64_t n_samples) {
  RegionMass out;
  for (const auto& a : measure.atoms)
    if (predicate(a.mark)) out.value += a.weight;
  if (!measure.diffuse || measure.diffuse->radial.coef <= 0.0) return out;

  const auto& df = *measure.diffuse;
  const double mass = df.radial.mass(0.0, kInf) * df.direction_weight_sum();
  if (std::isinf(mass))
    throw ConfigError("region_mass: diffuse part has infinite mass; truncate its support");
  if (mass <= 0.0) return out;
  if (rng == nullptr)
    throw ConfigError("region_mass: diffuse part requires an rng stream");
  if (n_samples == 0) throw ConfigError("region_mass: n_samples must be positive");

  std::vector<double> dir_cdf;
  if (!df.uniform_sphere) {
    double acc = 0.0;
    for (const auto& dw : df.directions) {
      acc += dw.weight;
      dir_cdf.push_back(acc);
    }
  }
  std::uint64_t hits = 0;
  for (std::uint64_t i = 0; i < n_samples; ++i) {
    Vec dir = df.uniform_sphere ? sample_sphere(df.sphere_dim, *rng)
                                : df.directions[rng->categorical_from_cdf(dir_cdf)].dir;
    const double rho = df.radial.sample(0.0, kInf, *rng);
    if (predicate(rho * dir)) ++hits;
  }
  const double p = static_cast<double>(hits) / static_cast<double>(n_samples);
  out.value += mass * p;
  out.error_bound = mass * (3.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(n_samples)) +
                            3.0 / static_cast<double>(n_samples));
  return out;
}

}  // namespace jumplab
