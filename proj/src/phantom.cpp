#include "duoseg/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "duoseg/rng.hpp"

namespace duoseg {

void PhantomConfig::validate() const {
  check_config(shape[0] > 7 && shape[1] > 7 && shape[2] > 7, "phantom shape too small");
  for (float s : spacing_mm) check_config(s > 0.f, "phantom spacing must be positive");
  check_config(n_tubes[0] >= 1 && n_tubes[1] >= n_tubes[0], "bad n_tubes range");
  check_config(tube_radius_vox[0] > 1.0 && tube_radius_vox[1] >= tube_radius_vox[0],
               "bad tube radius range");
  check_config(n_distractors[0] >= 0 && n_distractors[1] >= n_distractors[0],
               "bad n_distractors range");
  check_config(noise_sigma >= 0.0, "noise_sigma must be >= 0");
  check_config(fold_period_vox > 0.0, "fold_period_vox must be > 0");
  // the disjoint lumen ranges ARE the domain gap
  const bool disjoint = lumen_intensity_source[0] > lumen_intensity_target[1] ||
                        lumen_intensity_target[0] > lumen_intensity_source[1];
  check_config(disjoint, "source and target lumen intensity ranges must be disjoint");
}

std::string PhantomConfig::serialize() const {
  std::ostringstream os;
  os.precision(12);
  os << "shape=" << shape[0] << "," << shape[1] << "," << shape[2] << "\n"
     << "spacing_mm=" << spacing_mm[0] << "," << spacing_mm[1] << "," << spacing_mm[2] << "\n"
     << "n_tubes=" << n_tubes[0] << "," << n_tubes[1] << "\n"
     << "tube_radius_vox=" << tube_radius_vox[0] << "," << tube_radius_vox[1] << "\n"
     << "wall_intensity=" << wall_intensity[0] << "," << wall_intensity[1] << "\n"
     << "lumen_intensity_source=" << lumen_intensity_source[0] << "," << lumen_intensity_source[1]
     << "\n"
     << "lumen_intensity_target=" << lumen_intensity_target[0] << "," << lumen_intensity_target[1]
     << "\n"
     << "n_distractors=" << n_distractors[0] << "," << n_distractors[1] << "\n"
     << "distractor_radius_vox=" << distractor_radius_vox[0] << "," << distractor_radius_vox[1]
     << "\n"
     << "distractor_intensity=" << distractor_intensity[0] << "," << distractor_intensity[1]
     << "\n"
     << "background_intensity=" << background_intensity << "\n"
     << "noise_sigma=" << noise_sigma << "\n"
     << "fold_period_vox=" << fold_period_vox << "\n"
     << "fold_amplitude=" << fold_amplitude << "\n"
     << "seed=" << seed << "\n";
  return os.str();
}

uint64_t PhantomConfig::config_hash() const {
  const std::string s = serialize();
  uint64_t h = 0xcbf29ce484222325ull;
  for (char c : s) {
    h ^= uint64_t(uint8_t(c));
    h *= 0x100000001b3ull;
  }
  return h;
}

namespace {

struct Tube {
  // centerline c(t) = base + sum_k amp[k] * sin(2*pi*freq[k]*t + phase[k]) per axis
  std::array<std::array<double, 3>, 3> amp{};
  std::array<std::array<double, 3>, 3> freq{};
  std::array<std::array<double, 3>, 3> phase{};
  std::array<double, 3> base{};
  double r_out = 0, r_in = 0;
  double wall_value = 0, lumen_unit = 0;  // lumen_unit in [0,1], mapped per domain
};

std::array<double, 3> tube_point(const Tube& t, double s) {
  std::array<double, 3> p{};
  for (int a = 0; a < 3; ++a) {
    double v = t.base[a];
    for (int k = 0; k < 3; ++k)
      v += t.amp[a][k] * std::sin(6.283185307179586 * t.freq[a][k] * s + t.phase[a][k]);
    p[a] = v;
  }
  return p;
}

// Voxel classification produced by rasterization.
enum class VoxClass : uint8_t { kBackground = 0, kWall = 1, kLumen = 2 };

}  // namespace

std::pair<Volume, LabelMask> generate_phantom(const PhantomConfig& cfg, Domain domain,
                                              uint64_t seed) {
  cfg.validate();
  const int64_t d0 = cfg.shape[0], d1 = cfg.shape[1], d2 = cfg.shape[2];
  const int64_t n_vox = d0 * d1 * d2;

  for (int attempt = 0; attempt < 20; ++attempt) {
    // Geometry stream: identical for both domains by construction. Lumen
    // intensities are drawn as unit values from this same stream and mapped
    // through the domain-specific range afterwards, so the draw sequence
    // stays aligned across domains.
    Rng geom(derive_seed(cfg.seed, "phantom-geom", seed, uint64_t(attempt)));

    const int n_tubes = int(geom.uniform_int(cfg.n_tubes[0], cfg.n_tubes[1]));
    std::vector<Tube> tubes(size_t(n_tubes));
    for (auto& t : tubes) {
      t.r_out = geom.uniform(cfg.tube_radius_vox[0], cfg.tube_radius_vox[1]);
      const double wall_th = std::clamp(0.35 * t.r_out, 1.2, 2.5);
      t.r_in = t.r_out - wall_th;
      t.wall_value = geom.uniform(cfg.wall_intensity[0], cfg.wall_intensity[1]);
      t.lumen_unit = geom.uniform();
      for (int a = 0; a < 3; ++a) {
        const double span = 0.5 * double(cfg.shape[size_t(a)]) - t.r_out - 2.0;
        t.base[a] = 0.5 * double(cfg.shape[size_t(a)]) + geom.uniform(-0.15, 0.15) * span;
        double remaining = std::max(span, 1.0);
        for (int k = 0; k < 3; ++k) {
          t.amp[a][k] = geom.uniform(0.25, 1.0) * remaining / double(k + 1);
          remaining -= std::abs(t.amp[a][k]);
          remaining = std::max(remaining, 0.5);
          t.freq[a][k] = geom.uniform(0.4, 1.2) * double(k + 1);
          t.phase[a][k] = geom.uniform(0.0, 6.283185307179586);
        }
      }
    }

    const int n_blobs = int(geom.uniform_int(cfg.n_distractors[0], cfg.n_distractors[1]));
    struct Blob {
      std::array<double, 3> c;
      std::array<double, 3> r;
      double value;
    };
    std::vector<Blob> blobs(size_t(n_blobs));
    for (auto& b : blobs) {
      for (int a = 0; a < 3; ++a)
        b.c[a] = geom.uniform(0.1, 0.9) * double(cfg.shape[size_t(a)]);
      for (int a = 0; a < 3; ++a)
        b.r[a] = geom.uniform(cfg.distractor_radius_vox[0], cfg.distractor_radius_vox[1]);
      b.value = geom.uniform(cfg.distractor_intensity[0], cfg.distractor_intensity[1]);
    }

    // Rasterize. Per voxel keep the best (smallest) signed distance to any
    // tube surface, plus the arclength of the closest centerline sample for
    // the fold rings.
    std::vector<float> best_sd(size_t(n_vox), 1e9f);
    std::vector<float> best_d(size_t(n_vox), 1e9f);
    std::vector<float> best_arc(size_t(n_vox), 0.f);
    std::vector<int16_t> best_tube(size_t(n_vox), -1);

    for (size_t ti = 0; ti < tubes.size(); ++ti) {
      const Tube& t = tubes[ti];
      // march the centerline in ~quarter-voxel steps
      const int n_coarse = 512;
      double arc = 0.0;
      std::array<double, 3> prev = tube_point(t, 0.0);
      for (int i = 0; i <= n_coarse * 4; ++i) {
        const double s = double(i) / double(n_coarse * 4);
        std::array<double, 3> p = tube_point(t, s);
        const double step = std::sqrt((p[0] - prev[0]) * (p[0] - prev[0]) +
                                      (p[1] - prev[1]) * (p[1] - prev[1]) +
                                      (p[2] - prev[2]) * (p[2] - prev[2]));
        arc += step;
        prev = p;
        // clip to a margin inside the bounds
        for (int a = 0; a < 3; ++a)
          p[a] = std::clamp(p[a], t.r_out * 0.2, double(cfg.shape[size_t(a)] - 1) - t.r_out * 0.2);
        if (step < 0.2 && i > 0) continue;  // skip near-duplicate samples
        const int64_t lo0 = std::max<int64_t>(0, int64_t(std::floor(p[0] - t.r_out - 1)));
        const int64_t hi0 = std::min<int64_t>(d0 - 1, int64_t(std::ceil(p[0] + t.r_out + 1)));
        const int64_t lo1 = std::max<int64_t>(0, int64_t(std::floor(p[1] - t.r_out - 1)));
        const int64_t hi1 = std::min<int64_t>(d1 - 1, int64_t(std::ceil(p[1] + t.r_out + 1)));
        const int64_t lo2 = std::max<int64_t>(0, int64_t(std::floor(p[2] - t.r_out - 1)));
        const int64_t hi2 = std::min<int64_t>(d2 - 1, int64_t(std::ceil(p[2] + t.r_out + 1)));
        for (int64_t a = lo0; a <= hi0; ++a)
          for (int64_t b = lo1; b <= hi1; ++b) {
            const int64_t row = (a * d1 + b) * d2;
            const double dz = double(a) - p[0], dy = double(b) - p[1];
            const double dzy = dz * dz + dy * dy;
            for (int64_t c = lo2; c <= hi2; ++c) {
              const double dx = double(c) - p[2];
              const float dist = float(std::sqrt(dzy + dx * dx));
              const int64_t idx = row + c;
              if (dist < best_d[size_t(idx)]) {
                best_d[size_t(idx)] = dist;
                best_arc[size_t(idx)] = float(arc);
              }
              const float sd = dist - float(t.r_out);
              if (sd < best_sd[size_t(idx)]) {
                best_sd[size_t(idx)] = sd;
                best_tube[size_t(idx)] = int16_t(ti);
              }
            }
          }
      }
    }

    // Compose the image: background, then distractors, then tubes on top.
    Volume vol;
    vol.voxels = Tensor<float>({d0, d1, d2}, float(cfg.background_intensity));
    vol.spacing = cfg.spacing_mm;
    LabelMask mask;
    mask.voxels = Tensor<uint8_t>({d0, d1, d2});
    mask.spacing = cfg.spacing_mm;

    for (const auto& b : blobs) {
      const int64_t lo0 = std::max<int64_t>(0, int64_t(b.c[0] - b.r[0] - 1));
      const int64_t hi0 = std::min<int64_t>(d0 - 1, int64_t(b.c[0] + b.r[0] + 1));
      for (int64_t a = lo0; a <= hi0; ++a)
        for (int64_t bb = std::max<int64_t>(0, int64_t(b.c[1] - b.r[1] - 1));
             bb <= std::min<int64_t>(d1 - 1, int64_t(b.c[1] + b.r[1] + 1)); ++bb)
          for (int64_t c = std::max<int64_t>(0, int64_t(b.c[2] - b.r[2] - 1));
               c <= std::min<int64_t>(d2 - 1, int64_t(b.c[2] + b.r[2] + 1)); ++c) {
            const double q = (double(a) - b.c[0]) * (double(a) - b.c[0]) / (b.r[0] * b.r[0]) +
                             (double(bb) - b.c[1]) * (double(bb) - b.c[1]) / (b.r[1] * b.r[1]) +
                             (double(c) - b.c[2]) * (double(c) - b.c[2]) / (b.r[2] * b.r[2]);
            if (q <= 1.0) vol.voxels.at3(a, bb, c) = float(b.value);
          }
    }

    const auto& lum_range = domain == Domain::kSource ? cfg.lumen_intensity_source
                                                      : cfg.lumen_intensity_target;
    int64_t fg = 0;
    for (int64_t i = 0; i < n_vox; ++i) {
      if (best_tube[size_t(i)] < 0) continue;
      const Tube& t = tubes[size_t(best_tube[size_t(i)])];
      const float d = best_d[size_t(i)];
      if (d > float(t.r_out)) continue;
      mask.voxels[i] = 1;
      ++fg;
      if (d <= float(t.r_in)) {
        vol.voxels[i] = float(lum_range[0] + t.lumen_unit * (lum_range[1] - lum_range[0]));
      } else {
        const double ring =
            cfg.fold_amplitude *
            std::sin(6.283185307179586 * double(best_arc[size_t(i)]) / cfg.fold_period_vox);
        vol.voxels[i] = float(t.wall_value + ring);
      }
    }

    const double frac = double(fg) / double(n_vox);
    if (frac < cfg.min_foreground_fraction || frac > cfg.max_foreground_fraction)
      continue;  // regenerate with the next attempt-derived stream

    if (cfg.noise_sigma > 0.0) {
      Rng noise(derive_seed(cfg.seed, "phantom-noise", seed, uint64_t(attempt)));
      for (int64_t i = 0; i < n_vox; ++i)
        vol.voxels[i] =
            std::clamp(vol.voxels[i] + float(cfg.noise_sigma * noise.gaussian()), 0.f, 1.f);
    }
    return {std::move(vol), std::move(mask)};
  }
  throw EngineError("generate_phantom: could not produce a mask with foreground fraction in [" +
                    std::to_string(cfg.min_foreground_fraction) + ", " +
                    std::to_string(cfg.max_foreground_fraction) + "] within the retry budget");
}

}  // namespace duoseg
