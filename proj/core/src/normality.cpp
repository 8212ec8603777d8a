#include "panelist/normality.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "panelist/distributions.hpp"
#include "panelist/error.hpp"

namespace panelist {

namespace {

template <std::size_t N>
double poly(const double (&c)[N], double x) {
  double r = c[N - 1];
  for (std::size_t i = N - 1; i-- > 0;) r = r * x + c[i];
  return r;
}

// Half of the antisymmetric coefficient vector: a[i] pairs x(n-1-i) - x(i).
std::vector<double> coefficients(std::size_t n) {
  const std::size_t half = n / 2;
  std::vector<double> a(half);
  if (n == 3) {
    a[0] = std::sqrt(0.5);
    return a;
  }
  static constexpr double c1[] = {0.0, 0.221157, -0.147981, -2.07119, 4.434685, -2.706056};
  static constexpr double c2[] = {0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633};

  const double an25 = static_cast<double>(n) + 0.25;
  std::vector<double> m(half);
  double summ2 = 0.0;
  for (std::size_t i = 0; i < half; ++i) {
    m[i] = normal_quantile((static_cast<double>(i + 1) - 0.375) / an25);
    summ2 += m[i] * m[i];
  }
  summ2 *= 2.0;
  const double ssumm2 = std::sqrt(summ2);
  const double rsn = 1.0 / std::sqrt(static_cast<double>(n));
  const double a1 = poly(c1, rsn) - m[0] / ssumm2;

  std::size_t first;
  double fac;
  if (n > 5) {
    const double a2 = -m[1] / ssumm2 + poly(c2, rsn);
    fac = std::sqrt((summ2 - 2.0 * m[0] * m[0] - 2.0 * m[1] * m[1]) /
                    (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2));
    a[1] = a2;
    first = 2;
  } else {
    fac = std::sqrt((summ2 - 2.0 * m[0] * m[0]) / (1.0 - 2.0 * a1 * a1));
    first = 1;
  }
  a[0] = a1;
  for (std::size_t i = first; i < half; ++i) a[i] = -m[i] / fac;
  return a;
}

}  // namespace

ShapiroWilk shapiro_wilk(std::span<const double> sample) {
  const std::size_t n = sample.size();
  if (n < 3) throw StatsError("Shapiro-Wilk needs at least 3 observations");
  if (n > 5000) throw StatsError("Shapiro-Wilk approximation is valid up to n = 5000");
  std::vector<double> x(sample.begin(), sample.end());
  std::sort(x.begin(), x.end());
  const double range = x.back() - x.front();
  if (range < 1e-19 * std::max(1.0, std::fabs(x.front()))) {
    throw StatsError("Shapiro-Wilk is undefined when all values are identical");
  }

  const auto a = coefficients(n);
  double mean = 0.0;
  for (double v : x) mean += v / range;
  mean /= static_cast<double>(n);
  double ssq = 0.0;
  for (double v : x) ssq += (v / range - mean) * (v / range - mean);
  double num = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) num += a[i] * (x[n - 1 - i] - x[i]) / range;
  double w = std::min(1.0, num * num / ssq);

  ShapiroWilk out;
  out.w = w;
  if (n == 3) {
    constexpr double pi6 = 1.90985931710274;  // 6 / pi
    constexpr double stqr = 1.04719755119660;  // pi / 3
    out.p = std::max(0.0, pi6 * (std::asin(std::sqrt(w)) - stqr));
    return out;
  }

  static constexpr double g[] = {-2.273, 0.459};
  static constexpr double c3[] = {0.544, -0.39978, 0.025054, -6.714e-4};
  static constexpr double c4[] = {1.3822, -0.77857, 0.062767, -0.0020322};
  static constexpr double c5[] = {-1.5861, -0.31082, -0.083751, 0.0038915};
  static constexpr double c6[] = {-0.4803, -0.082676, 0.0030302};

  double y = std::log1p(-w);
  const double nd = static_cast<double>(n);
  double mu;
  double sigma;
  if (n <= 11) {
    const double gamma = poly(g, nd);
    if (y >= gamma) {
      out.p = 1e-99;
      return out;
    }
    y = -std::log(gamma - y);
    mu = poly(c3, nd);
    sigma = std::exp(poly(c4, nd));
  } else {
    const double ln = std::log(nd);
    mu = poly(c5, ln);
    sigma = std::exp(poly(c6, ln));
  }
  out.p = normal_sf((y - mu) / sigma);
  return out;
}

NormalityReport normality_check(const CellScores& cells, double alpha) {
  NormalityReport report;
  for (std::size_t i = 0; i < kConditionCount; ++i) {
    auto& c = report.cells[i];
    c.n = cells[i].size();
    if (c.n < 3) {
      c.note = "too few for normality test";
    } else {
      try {
        c.test = shapiro_wilk(cells[i]);
        c.pass = c.test->p >= alpha;
      } catch (const StatsError& e) {
        c.note = e.what();
      }
    }
    if (!c.pass) report.flag = true;
  }
  return report;
}

}  // namespace panelist
