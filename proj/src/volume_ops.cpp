#include "duoseg/volume_ops.hpp"

#include <algorithm>
#include <cmath>

#include "duoseg/rng.hpp"

namespace duoseg {

Volume normalize_intensity(const Volume& v, float window_low, float window_high) {
  check_config(window_low < window_high, "normalize_intensity: window_low must be < window_high");
  const float inv = 1.f / (window_high - window_low);
  Volume out;
  out.voxels = Tensor<float>(v.voxels.shape());
  out.spacing = v.spacing;
  for (int64_t i = 0; i < v.voxels.numel(); ++i) {
    const float x = v.voxels[i];
    check_data(std::isfinite(x), "normalize_intensity: non-finite voxel value");
    out.voxels[i] = std::clamp((x - window_low) * inv, 0.f, 1.f);
  }
  return out;
}

namespace {

// One axis of central/one-sided differences over a 3-d grid.
void diff_axis(const Tensor<float>& v, int axis, float* out) {
  const int64_t d0 = v.dim(0), d1 = v.dim(1), d2 = v.dim(2);
  const int64_t stride = axis == 0 ? d1 * d2 : (axis == 1 ? d2 : 1);
  const int64_t n_axis = v.dim(axis);
  const float* src = v.data();
  int64_t idx = 0;
  for (int64_t a = 0; a < d0; ++a)
    for (int64_t b = 0; b < d1; ++b)
      for (int64_t c = 0; c < d2; ++c, ++idx) {
        const int64_t pos = axis == 0 ? a : (axis == 1 ? b : c);
        float g;
        if (pos == 0)
          g = src[idx + stride] - src[idx];
        else if (pos == n_axis - 1)
          g = src[idx] - src[idx - stride];
        else
          g = 0.5f * (src[idx + stride] - src[idx - stride]);
        out[idx] = g;
      }
}

}  // namespace

GradientVolume spatial_gradient(const Volume& v) {
  for (int i = 0; i < 3; ++i)
    check_data(v.dim(i) >= 2, "spatial_gradient: every axis must have length >= 2");
  GradientVolume g;
  g.channels = Tensor<float>({3, v.dim(0), v.dim(1), v.dim(2)});
  g.spacing = v.spacing;
  const int64_t n = v.voxels.numel();
  // channel 0 = d/dx (fastest axis 2), channel 1 = d/dy (axis 1), channel 2 = d/dz (axis 0)
  diff_axis(v.voxels, 2, g.channels.data());
  diff_axis(v.voxels, 1, g.channels.data() + n);
  diff_axis(v.voxels, 0, g.channels.data() + 2 * n);
  return g;
}

namespace {

// Nested-lerp trilinear sample with border-replicate; exact on constants.
float sample_trilinear(const Tensor<float>& v, double z, double y, double x) {
  const int64_t d0 = v.dim(0), d1 = v.dim(1), d2 = v.dim(2);
  const auto clampi = [](int64_t i, int64_t n) { return std::clamp<int64_t>(i, 0, n - 1); };
  const double zf = std::floor(z), yf = std::floor(y), xf = std::floor(x);
  const float fz = float(z - zf), fy = float(y - yf), fx = float(x - xf);
  const int64_t z0 = clampi(int64_t(zf), d0), z1 = clampi(int64_t(zf) + 1, d0);
  const int64_t y0 = clampi(int64_t(yf), d1), y1 = clampi(int64_t(yf) + 1, d1);
  const int64_t x0 = clampi(int64_t(xf), d2), x1 = clampi(int64_t(xf) + 1, d2);
  const auto lerp = [](float a, float b, float f) { return a + f * (b - a); };
  const float c00 = lerp(v.at3(z0, y0, x0), v.at3(z0, y0, x1), fx);
  const float c01 = lerp(v.at3(z0, y1, x0), v.at3(z0, y1, x1), fx);
  const float c10 = lerp(v.at3(z1, y0, x0), v.at3(z1, y0, x1), fx);
  const float c11 = lerp(v.at3(z1, y1, x0), v.at3(z1, y1, x1), fx);
  return lerp(lerp(c00, c01, fy), lerp(c10, c11, fy), fz);
}

uint8_t sample_nearest_u8(const Tensor<uint8_t>& v, double z, double y, double x) {
  const auto near = [](double c, int64_t n) {
    return std::clamp<int64_t>(int64_t(std::lround(c)), 0, n - 1);
  };
  return v.at3(near(z, v.dim(0)), near(y, v.dim(1)), near(x, v.dim(2)));
}

}  // namespace

Volume resample_isotropic(const Volume& v, float target_spacing_mm) {
  check_config(target_spacing_mm > 0.f, "resample_isotropic: target spacing must be > 0");
  std::vector<int64_t> out_shape(3);
  std::array<double, 3> ratio{};  // target / source spacing, in voxel units
  for (int i = 0; i < 3; ++i) {
    const double extent_mm = double(v.dim(i)) * double(v.spacing[size_t(i)]);
    out_shape[size_t(i)] = int64_t(std::llround(extent_mm / target_spacing_mm));
    check_data(out_shape[size_t(i)] > 0, "resample_isotropic: output shape rounds to zero");
    ratio[size_t(i)] = double(target_spacing_mm) / double(v.spacing[size_t(i)]);
  }
  Volume out;
  out.voxels = Tensor<float>(out_shape);
  out.spacing = {target_spacing_mm, target_spacing_mm, target_spacing_mm};
  int64_t idx = 0;
  for (int64_t a = 0; a < out_shape[0]; ++a) {
    const double z = (double(a) + 0.5) * ratio[0] - 0.5;
    for (int64_t b = 0; b < out_shape[1]; ++b) {
      const double y = (double(b) + 0.5) * ratio[1] - 0.5;
      for (int64_t c = 0; c < out_shape[2]; ++c, ++idx) {
        const double x = (double(c) + 0.5) * ratio[2] - 0.5;
        out.voxels[idx] = sample_trilinear(v.voxels, z, y, x);
      }
    }
  }
  return out;
}

LabelMask resample_isotropic_mask(const LabelMask& m, float target_spacing_mm) {
  check_config(target_spacing_mm > 0.f, "resample_isotropic: target spacing must be > 0");
  std::vector<int64_t> out_shape(3);
  std::array<double, 3> ratio{};
  for (int i = 0; i < 3; ++i) {
    const double extent_mm = double(m.dim(i)) * double(m.spacing[size_t(i)]);
    out_shape[size_t(i)] = int64_t(std::llround(extent_mm / target_spacing_mm));
    check_data(out_shape[size_t(i)] > 0, "resample_isotropic: output shape rounds to zero");
    ratio[size_t(i)] = double(target_spacing_mm) / double(m.spacing[size_t(i)]);
  }
  LabelMask out;
  out.voxels = Tensor<uint8_t>(out_shape);
  out.spacing = {target_spacing_mm, target_spacing_mm, target_spacing_mm};
  int64_t idx = 0;
  for (int64_t a = 0; a < out_shape[0]; ++a)
    for (int64_t b = 0; b < out_shape[1]; ++b)
      for (int64_t c = 0; c < out_shape[2]; ++c, ++idx)
        out.voxels[idx] = sample_nearest_u8(
            m.voxels, (double(a) + 0.5) * ratio[0] - 0.5, (double(b) + 0.5) * ratio[1] - 0.5,
            (double(c) + 0.5) * ratio[2] - 0.5);
  return out;
}

namespace {

template <typename T>
Tensor<T> crop3(const Tensor<T>& t, const std::array<int64_t, 3>& corner,
                const std::array<int64_t, 3>& size, int64_t channels = 0) {
  const bool has_ch = channels > 0;
  std::vector<int64_t> shape = has_ch
      ? std::vector<int64_t>{channels, size[0], size[1], size[2]}
      : std::vector<int64_t>{size[0], size[1], size[2]};
  Tensor<T> out(shape);
  const int64_t src_d1 = t.dim(has_ch ? 2 : 1), src_d2 = t.dim(has_ch ? 3 : 2);
  const int64_t src_vol = t.dim(has_ch ? 1 : 0) * src_d1 * src_d2;
  const int64_t n_ch = has_ch ? channels : 1;
  T* dst = out.data();
  for (int64_t ch = 0; ch < n_ch; ++ch) {
    const T* src = t.data() + ch * src_vol;
    for (int64_t a = 0; a < size[0]; ++a)
      for (int64_t b = 0; b < size[1]; ++b) {
        const T* row = src + ((a + corner[0]) * src_d1 + (b + corner[1])) * src_d2 + corner[2];
        std::copy(row, row + size[2], dst);
        dst += size[2];
      }
  }
  return out;
}

}  // namespace

DomainSample sample_subvolume(const DomainSample& s, const std::array<int64_t, 3>& size,
                              uint64_t rng_seed) {
  Rng rng(rng_seed);
  std::array<int64_t, 3> corner{};
  for (int i = 0; i < 3; ++i) {
    check_data(s.volume.dim(i) >= size[size_t(i)],
               "sample_subvolume: volume smaller than requested size");
    corner[size_t(i)] = rng.uniform_int(0, s.volume.dim(i) - size[size_t(i)]);
  }
  DomainSample out;
  out.domain = s.domain;
  out.volume.voxels = crop3(s.volume.voxels, corner, size);
  out.volume.spacing = s.volume.spacing;
  out.gradient.channels = crop3(s.gradient.channels, corner, size, 3);
  out.gradient.spacing = s.gradient.spacing;
  if (s.label) {
    LabelMask m;
    m.voxels = crop3(s.label->voxels, corner, size);
    m.spacing = s.label->spacing;
    out.label = std::move(m);
  }
  return out;
}

namespace {

// Separable gaussian smoothing along all three axes, reflect-free (clamped).
void gaussian_smooth_inplace(Tensor<float>& f, double sigma) {
  const int radius = std::max(1, int(std::ceil(3.0 * sigma)));
  std::vector<float> kernel(size_t(2 * radius + 1));
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    const double w = std::exp(-0.5 * double(i) * double(i) / (sigma * sigma));
    kernel[size_t(i + radius)] = float(w);
    sum += w;
  }
  for (auto& k : kernel) k = float(double(k) / sum);

  const int64_t d0 = f.dim(0), d1 = f.dim(1), d2 = f.dim(2);
  Tensor<float> tmp(f.shape());
  for (int axis = 0; axis < 3; ++axis) {
    const int64_t n_axis = f.dim(axis);
    const int64_t stride = axis == 0 ? d1 * d2 : (axis == 1 ? d2 : 1);
    int64_t idx = 0;
    for (int64_t a = 0; a < d0; ++a)
      for (int64_t b = 0; b < d1; ++b)
        for (int64_t c = 0; c < d2; ++c, ++idx) {
          const int64_t pos = axis == 0 ? a : (axis == 1 ? b : c);
          float acc = 0.f;
          for (int k = -radius; k <= radius; ++k) {
            const int64_t p = std::clamp<int64_t>(pos + k, 0, n_axis - 1);
            acc += kernel[size_t(k + radius)] * f[idx + (p - pos) * stride];
          }
          tmp[idx] = acc;
        }
    f = tmp;
  }
}

}  // namespace

DomainSample augment(const DomainSample& s, const AugmentParams& params, uint64_t rng_seed) {
  Rng rng(rng_seed);
  const bool do_rotate = rng.bernoulli(params.p_rotate);
  const double angle_deg = rng.uniform(-params.max_rotate_deg, params.max_rotate_deg);
  const bool do_elastic = rng.bernoulli(params.p_elastic);
  const bool do_intensity = rng.bernoulli(params.p_intensity);
  const double scale = rng.uniform(params.intensity_scale_lo, params.intensity_scale_hi);
  const double shift = rng.uniform(-params.intensity_shift, params.intensity_shift);

  if (!do_rotate && !do_elastic && !do_intensity) return s;

  const int64_t d0 = s.volume.dim(0), d1 = s.volume.dim(1), d2 = s.volume.dim(2);
  DomainSample out;
  out.domain = s.domain;
  out.volume.spacing = s.volume.spacing;
  out.gradient.spacing = s.gradient.spacing;

  Tensor<float> warped = s.volume.voxels;
  Tensor<uint8_t> warped_label;
  const bool has_label = s.label.has_value();
  if (has_label) warped_label = s.label->voxels;

  if (do_rotate || do_elastic) {
    // Displacement field per axis, built in output space.
    Tensor<float> disp[3] = {Tensor<float>({d0, d1, d2}), Tensor<float>({d0, d1, d2}),
                             Tensor<float>({d0, d1, d2})};
    if (do_elastic) {
      const double mag = rng.uniform(0.0, params.elastic_max_disp_vox);
      float peak = 0.f;
      for (auto& d : disp) {
        for (int64_t i = 0; i < d.numel(); ++i) d[i] = float(rng.uniform(-1.0, 1.0));
        gaussian_smooth_inplace(d, params.elastic_sigma_vox);
        for (int64_t i = 0; i < d.numel(); ++i) peak = std::max(peak, std::abs(d[i]));
      }
      const float norm = peak > 0.f ? float(mag) / peak : 0.f;
      for (auto& d : disp)
        for (int64_t i = 0; i < d.numel(); ++i) d[i] *= norm;
    }
    const double theta = do_rotate ? angle_deg * 3.14159265358979323846 / 180.0 : 0.0;
    const double ct = std::cos(theta), st = std::sin(theta);
    const double cy = 0.5 * double(d1 - 1), cx = 0.5 * double(d2 - 1);

    Tensor<float> dst({d0, d1, d2});
    Tensor<uint8_t> dst_label;
    if (has_label) dst_label = Tensor<uint8_t>({d0, d1, d2});
    int64_t idx = 0;
    for (int64_t a = 0; a < d0; ++a)
      for (int64_t b = 0; b < d1; ++b)
        for (int64_t c = 0; c < d2; ++c, ++idx) {
          // inverse rotation about the axial (z) axis, then elastic offset
          const double ry = double(b) - cy, rx = double(c) - cx;
          const double sy = ct * ry - st * rx + cy + double(disp[1][idx]);
          const double sx = st * ry + ct * rx + cx + double(disp[2][idx]);
          const double sz = double(a) + double(disp[0][idx]);
          dst[idx] = sample_trilinear(warped, sz, sy, sx);
          if (has_label) dst_label[idx] = sample_nearest_u8(warped_label, sz, sy, sx);
        }
    warped = std::move(dst);
    if (has_label) warped_label = std::move(dst_label);
  }

  if (do_intensity)
    for (int64_t i = 0; i < warped.numel(); ++i)
      warped[i] = float(scale) * warped[i] + float(shift);

  out.volume.voxels = std::move(warped);
  out.gradient = spatial_gradient(out.volume);
  if (has_label) {
    LabelMask m;
    m.voxels = std::move(warped_label);
    m.spacing = s.label->spacing;
    out.label = std::move(m);
  }
  return out;
}

}  // namespace duoseg
