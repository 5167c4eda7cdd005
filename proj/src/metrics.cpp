#include "duoseg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

namespace duoseg {

double dice(const LabelMask& pred, const LabelMask& gt) {
  check_data(pred.voxels.same_shape(gt.voxels), "dice: shape mismatch");
  int64_t p = 0, g = 0, both = 0;
  for (int64_t i = 0; i < pred.voxels.numel(); ++i) {
    const bool a = pred.voxels[i] != 0, b = gt.voxels[i] != 0;
    p += a;
    g += b;
    both += a && b;
  }
  if (p + g == 0) return 1.0;
  return 2.0 * double(both) / double(p + g);
}

SurfaceSet extract_surface(const LabelMask& m) {
  SurfaceSet s;
  s.spacing = m.spacing;
  const int64_t d0 = m.dim(0), d1 = m.dim(1), d2 = m.dim(2);
  const auto fg = [&](int64_t a, int64_t b, int64_t c) -> bool {
    if (a < 0 || b < 0 || c < 0 || a >= d0 || b >= d1 || c >= d2) return false;
    return m.voxels.at3(a, b, c) != 0;
  };
  for (int64_t a = 0; a < d0; ++a)
    for (int64_t b = 0; b < d1; ++b)
      for (int64_t c = 0; c < d2; ++c) {
        if (!fg(a, b, c)) continue;
        if (!fg(a - 1, b, c) || !fg(a + 1, b, c) || !fg(a, b - 1, c) || !fg(a, b + 1, c) ||
            !fg(a, b, c - 1) || !fg(a, b, c + 1))
          s.voxels.push_back({a, b, c});
      }
  return s;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// 1-d weighted squared-distance transform (lower envelope of parabolas),
// dt(x) = min_y f(y) + w*(x-y)^2.
void dt1d(const double* f, double* out, int64_t n, double w, int* v, double* z) {
  int k = 0;
  v[0] = 0;
  z[0] = -kInf;
  z[1] = kInf;
  for (int64_t q = 1; q < n; ++q) {
    if (f[q] == kInf) continue;
    double s;
    while (true) {
      const int64_t p = v[k];
      if (f[p] == kInf) {
        // empty cell so far; replace
        --k;
        if (k < 0) break;
        continue;
      }
      s = ((f[q] + w * double(q) * double(q)) - (f[p] + w * double(p) * double(p))) /
          (2.0 * w * double(q - p));
      if (s <= z[k])
        --k;
      else
        break;
    }
    ++k;
    v[k] = int(q);
    z[k] = k > 0 ? s : -kInf;
    z[k + 1] = kInf;
  }
  if (f[v[0]] == kInf) {
    // no seeds along this line
    for (int64_t q = 0; q < n; ++q) out[q] = kInf;
    return;
  }
  k = 0;
  for (int64_t q = 0; q < n; ++q) {
    while (z[k + 1] < double(q)) ++k;
    const double d = double(q) - double(v[k]);
    out[q] = f[v[k]] + w * d * d;
  }
}

// Exact squared EDT of the seed set over the grid, weights = spacing^2.
std::vector<double> squared_edt(const SurfaceSet& seeds, const std::array<int64_t, 3>& shape) {
  const int64_t d0 = shape[0], d1 = shape[1], d2 = shape[2];
  const int64_t n = d0 * d1 * d2;
  std::vector<double> dist(size_t(n), kInf);
  for (const auto& v : seeds.voxels) dist[size_t((v[0] * d1 + v[1]) * d2 + v[2])] = 0.0;

  const double w[3] = {double(seeds.spacing[0]) * double(seeds.spacing[0]),
                       double(seeds.spacing[1]) * double(seeds.spacing[1]),
                       double(seeds.spacing[2]) * double(seeds.spacing[2])};
  const int64_t max_axis = std::max({d0, d1, d2});
  std::vector<double> f(size_t(max_axis)), out(size_t(max_axis)), z(size_t(max_axis) + 1);
  std::vector<int> v(size_t(max_axis));

  // axis 2 (x, contiguous)
  for (int64_t a = 0; a < d0; ++a)
    for (int64_t b = 0; b < d1; ++b) {
      double* row = dist.data() + (a * d1 + b) * d2;
      dt1d(row, out.data(), d2, w[2], v.data(), z.data());
      std::copy(out.begin(), out.begin() + d2, row);
    }
  // axis 1 (y)
  for (int64_t a = 0; a < d0; ++a)
    for (int64_t c = 0; c < d2; ++c) {
      for (int64_t b = 0; b < d1; ++b) f[size_t(b)] = dist[size_t((a * d1 + b) * d2 + c)];
      dt1d(f.data(), out.data(), d1, w[1], v.data(), z.data());
      for (int64_t b = 0; b < d1; ++b) dist[size_t((a * d1 + b) * d2 + c)] = out[size_t(b)];
    }
  // axis 0 (z)
  for (int64_t b = 0; b < d1; ++b)
    for (int64_t c = 0; c < d2; ++c) {
      for (int64_t a = 0; a < d0; ++a) f[size_t(a)] = dist[size_t((a * d1 + b) * d2 + c)];
      dt1d(f.data(), out.data(), d0, w[0], v.data(), z.data());
      for (int64_t a = 0; a < d0; ++a) dist[size_t((a * d1 + b) * d2 + c)] = out[size_t(a)];
    }
  return dist;
}

std::vector<double> pooled_distances(const LabelMask& pred, const LabelMask& gt) {
  check_data(pred.voxels.same_shape(gt.voxels), "surface distance: shape mismatch");
  check_data(pred.foreground_count() > 0 && gt.foreground_count() > 0,
             "undefined-metric: surface distance requires two non-empty masks");
  const std::array<int64_t, 3> shape{pred.dim(0), pred.dim(1), pred.dim(2)};
  const SurfaceSet sp = extract_surface(pred), sg = extract_surface(gt);
  std::vector<double> pooled = directed_surface_distances(sp, sg, shape);
  std::vector<double> back = directed_surface_distances(sg, sp, shape);
  pooled.insert(pooled.end(), back.begin(), back.end());
  return pooled;
}

}  // namespace

std::vector<double> directed_surface_distances(const SurfaceSet& from, const SurfaceSet& to,
                                               const std::array<int64_t, 3>& grid_shape) {
  const std::vector<double> d2 = squared_edt(to, grid_shape);
  std::vector<double> out;
  out.reserve(from.voxels.size());
  for (const auto& v : from.voxels)
    out.push_back(std::sqrt(d2[size_t((v[0] * grid_shape[1] + v[1]) * grid_shape[2] + v[2])]));
  return out;
}

double percentile(std::vector<double> values, double q) {
  check_data(!values.empty(), "percentile of empty sample");
  std::sort(values.begin(), values.end());
  const double h = q * double(values.size() - 1);
  const auto lo = size_t(h);
  if (lo + 1 >= values.size()) return values.back();
  return values[lo] + (h - double(lo)) * (values[lo + 1] - values[lo]);
}

double hd95(const LabelMask& pred, const LabelMask& gt, DistanceConvention conv) {
  if (conv == DistanceConvention::kPooledSymmetric)
    return percentile(pooled_distances(pred, gt), 0.95);
  check_data(pred.voxels.same_shape(gt.voxels), "surface distance: shape mismatch");
  check_data(pred.foreground_count() > 0 && gt.foreground_count() > 0,
             "undefined-metric: surface distance requires two non-empty masks");
  const std::array<int64_t, 3> shape{pred.dim(0), pred.dim(1), pred.dim(2)};
  const SurfaceSet sp = extract_surface(pred), sg = extract_surface(gt);
  return std::max(percentile(directed_surface_distances(sp, sg, shape), 0.95),
                  percentile(directed_surface_distances(sg, sp, shape), 0.95));
}

double assd(const LabelMask& pred, const LabelMask& gt, DistanceConvention conv) {
  if (conv == DistanceConvention::kPooledSymmetric) {
    const std::vector<double> d = pooled_distances(pred, gt);
    return std::accumulate(d.begin(), d.end(), 0.0) / double(d.size());
  }
  check_data(pred.voxels.same_shape(gt.voxels), "surface distance: shape mismatch");
  check_data(pred.foreground_count() > 0 && gt.foreground_count() > 0,
             "undefined-metric: surface distance requires two non-empty masks");
  const std::array<int64_t, 3> shape{pred.dim(0), pred.dim(1), pred.dim(2)};
  const SurfaceSet sp = extract_surface(pred), sg = extract_surface(gt);
  const auto mean = [](const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
  };
  return std::max(mean(directed_surface_distances(sp, sg, shape)),
                  mean(directed_surface_distances(sg, sp, shape)));
}

namespace {

// Regularized incomplete beta via Lentz continued fraction.
double betacf(double a, double b, double x) {
  const double eps = 3e-16, fpmin = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0, d = 1.0 - qab * x / qap;
  if (std::abs(d) < fpmin) d = fpmin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 300; ++m) {
    const int m2 = 2 * m;
    double aa = double(m) * (b - double(m)) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::abs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + double(m)) * (qab + double(m)) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::abs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < eps) break;
  }
  return h;
}

double reg_inc_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_beta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
  const double front = std::exp(a * std::log(x) + b * std::log(1.0 - x) - ln_beta);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
  return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

}  // namespace

std::pair<double, double> paired_t_test(const std::vector<double>& a,
                                        const std::vector<double>& b) {
  check_data(a.size() == b.size(), "paired_t_test: sample length mismatch");
  check_data(a.size() >= 2, "paired_t_test: need at least 2 pairs");
  const size_t n = a.size();
  double mean = 0.0;
  for (size_t i = 0; i < n; ++i) mean += a[i] - b[i];
  mean /= double(n);
  double ss = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i] - mean;
    ss += d * d;
  }
  const double sd = std::sqrt(ss / double(n - 1));
  if (sd == 0.0) {
    if (mean == 0.0) return {0.0, 1.0};  // identical samples
    return {mean > 0 ? kInf : -kInf, 0.0};
  }
  const double t = mean / (sd / std::sqrt(double(n)));
  const double nu = double(n - 1);
  const double p = reg_inc_beta(nu / 2.0, 0.5, nu / (nu + t * t));
  return {t, p};
}

double MethodReport::dice_mean() const {
  double s = 0;
  for (const auto& c : cases) s += c.dice;
  return cases.empty() ? 0.0 : s / double(cases.size());
}

double MethodReport::dice_std() const {
  if (cases.size() < 2) return 0.0;
  const double m = dice_mean();
  double ss = 0;
  for (const auto& c : cases) ss += (c.dice - m) * (c.dice - m);
  return std::sqrt(ss / double(cases.size() - 1));
}

namespace {

std::optional<double> opt_mean(const std::vector<CaseMetrics>& cases,
                               std::optional<double> CaseMetrics::*field) {
  double s = 0;
  for (const auto& c : cases) {
    if (!(c.*field)) return std::nullopt;  // any flagged case flags the aggregate
    s += *(c.*field);
  }
  return cases.empty() ? std::nullopt : std::optional<double>(s / double(cases.size()));
}

std::optional<double> opt_std(const std::vector<CaseMetrics>& cases,
                              std::optional<double> CaseMetrics::*field) {
  const auto m = opt_mean(cases, field);
  if (!m || cases.size() < 2) return m ? std::optional<double>(0.0) : std::nullopt;
  double ss = 0;
  for (const auto& c : cases) ss += (*(c.*field) - *m) * (*(c.*field) - *m);
  return std::sqrt(ss / double(cases.size() - 1));
}

std::string cell(const std::optional<double>& v) {
  if (!v) return "undefined";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", *v);
  return buf;
}

}  // namespace

std::optional<double> MethodReport::hd95_mean() const { return opt_mean(cases, &CaseMetrics::hd95_mm); }
std::optional<double> MethodReport::hd95_std() const { return opt_std(cases, &CaseMetrics::hd95_mm); }
std::optional<double> MethodReport::asd_mean() const { return opt_mean(cases, &CaseMetrics::asd_mm); }
std::optional<double> MethodReport::asd_std() const { return opt_std(cases, &CaseMetrics::asd_mm); }

void write_method_report(const MethodReport& r, const std::string& path) {
  std::ofstream f(path);
  check_data(bool(f), "cannot open for writing: " + path);
  f << "# duoseg evaluation\n# method=" << r.method << "\n";
  f << "# columns: case\tdice\thd95_mm\tasd_mm\n";
  f.precision(9);
  for (const auto& c : r.cases)
    f << c.case_id << "\t" << c.dice << "\t" << cell(c.hd95_mm) << "\t" << cell(c.asd_mm) << "\n";
  check_data(bool(f), "write failed: " + path);
}

MethodReport read_method_report(const std::string& path) {
  std::ifstream f(path);
  check_data(bool(f), "cannot open report: " + path);
  MethodReport r;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    if (line.front() == '#') {
      const auto pos = line.find("method=");
      if (pos != std::string::npos) r.method = line.substr(pos + 7);
      continue;
    }
    std::istringstream ss(line);
    CaseMetrics c;
    std::string hd, asd;
    check_data(bool(ss >> c.case_id >> c.dice >> hd >> asd), "malformed report line: " + line);
    if (hd != "undefined") c.hd95_mm = std::stod(hd);
    if (asd != "undefined") c.asd_mm = std::stod(asd);
    r.cases.push_back(std::move(c));
  }
  check_data(!r.cases.empty(), "empty report: " + path);
  return r;
}

std::string render_comparison(const std::vector<MethodReport>& methods,
                              const std::string& reference) {
  const MethodReport* ref = nullptr;
  for (const auto& m : methods)
    if (m.method == reference) ref = &m;
  check_data(ref != nullptr, "reference method not among inputs: " + reference);

  std::ostringstream os;
  os << "method\tdice\thd95_mm\tasd_mm\tp_vs_" << reference << "\n";
  for (const auto& m : methods) {
    check_data(m.cases.size() == ref->cases.size(),
               "method " + m.method + " has a different test-case count than the reference");
    std::vector<double> da, db;
    for (size_t i = 0; i < m.cases.size(); ++i) {
      da.push_back(m.cases[i].dice);
      db.push_back(ref->cases[i].dice);
    }
    const auto [t, p] = paired_t_test(da, db);
    (void)t;
    char buf[256];
    const auto pm = [](double mean, double sd) {
      char b[64];
      std::snprintf(b, sizeof(b), "%.3f+-%.3f", mean, sd);
      return std::string(b);
    };
    const auto opt_pm = [&](std::optional<double> mean, std::optional<double> sd) {
      return mean && sd ? pm(*mean, *sd) : std::string("undefined");
    };
    std::snprintf(buf, sizeof(buf), "%s\t%s\t%s\t%s\t%.6g\n", m.method.c_str(),
                  pm(m.dice_mean(), m.dice_std()).c_str(),
                  opt_pm(m.hd95_mean(), m.hd95_std()).c_str(),
                  opt_pm(m.asd_mean(), m.asd_std()).c_str(), p);
    os << buf;
  }
  return os.str();
}

}  // namespace duoseg
