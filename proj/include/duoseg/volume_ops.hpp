#pragma once

#include "duoseg/volume.hpp"

namespace duoseg {

// Affine window-clamp to [0,1]: (v - low) / (high - low), clamped.
// Rejects non-finite voxel values.
Volume normalize_intensity(const Volume& v, float window_low, float window_high);

// Central differences on interior voxels, one-sided at the boundary, in
// voxel units. Requires every axis >= 2. Channel order (d/dx, d/dy, d/dz)
// with x the fastest-varying axis.
GradientVolume spatial_gradient(const Volume& v);

// Trilinear resample onto an isotropic grid of the given spacing. Output
// shape per axis is round(extent_mm / target); errors if any axis rounds
// to zero.
Volume resample_isotropic(const Volume& v, float target_spacing_mm);
LabelMask resample_isotropic_mask(const LabelMask& m, float target_spacing_mm);

// Axis-aligned random crop at a uniformly chosen valid corner; volume,
// gradient and label are cropped congruently. Deterministic in rng_seed.
DomainSample sample_subvolume(const DomainSample& s, const std::array<int64_t, 3>& size,
                              uint64_t rng_seed);

struct AugmentParams {
  double p_rotate = 0.5;
  double max_rotate_deg = 10.0;  // about the axial (z) axis
  double p_elastic = 0.5;
  double elastic_sigma_vox = 4.0;      // smoothing of the displacement field
  double elastic_max_disp_vox = 3.0;   // peak displacement magnitude
  double p_intensity = 0.5;
  double intensity_scale_lo = 0.9;
  double intensity_scale_hi = 1.1;
  double intensity_shift = 0.05;  // shift drawn from [-x, +x]
};

// Rotation + elastic warp + global intensity scale/shift, each applied with
// its own probability. Labels are warped nearest-neighbor; the gradient is
// recomputed from the augmented volume rather than warped. When every
// transform is skipped the sample is returned unchanged.
DomainSample augment(const DomainSample& s, const AugmentParams& params, uint64_t rng_seed);

}  // namespace duoseg
