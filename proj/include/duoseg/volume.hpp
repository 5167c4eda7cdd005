#pragma once

#include <array>
#include <optional>
#include <string>

#include "duoseg/tensor.hpp"

namespace duoseg {

// 3D scalar grid with voxel spacing in mm. Shape is (h, w, l); memory is
// x-fastest, i.e. the l axis is contiguous. Axis mapping used throughout:
// axis 0 = z (axial direction), axis 1 = y, axis 2 = x.
struct Volume {
  Tensor<float> voxels;           // (h, w, l)
  std::array<float, 3> spacing{1.f, 1.f, 1.f};  // mm per voxel, per axis

  Volume() = default;
  Volume(Tensor<float> v, std::array<float, 3> sp);

  int64_t dim(int i) const { return voxels.dim(i); }
  void validate() const;  // spacing > 0, finite voxels
};

// Binary mask paired with a Volume. Values are 0/1 only.
struct LabelMask {
  Tensor<uint8_t> voxels;  // (h, w, l)
  std::array<float, 3> spacing{1.f, 1.f, 1.f};

  int64_t dim(int i) const { return voxels.dim(i); }
  int64_t foreground_count() const;
  void validate() const;
};

// Axis-wise finite differences of a Volume: channel 0 = d/dx (fastest axis),
// channel 1 = d/dy, channel 2 = d/dz.
struct GradientVolume {
  Tensor<float> channels;  // (3, h, w, l)
  std::array<float, 3> spacing{1.f, 1.f, 1.f};

  void validate() const;
};

enum class Domain { kSource, kTarget };

inline const char* domain_name(Domain d) {
  return d == Domain::kSource ? "source" : "target";
}

// A training/evaluation unit: volume, its gradient, optional label, domain.
struct DomainSample {
  Volume volume;
  GradientVolume gradient;
  std::optional<LabelMask> label;
  Domain domain = Domain::kSource;
};

// RVOL container: 64-byte header (magic "RVOL0001"; h,w,l as u32 LE;
// spacing as 3 x f32 LE; dtype code u8: 0 = f32, 1 = u8; 31 reserved zero
// bytes) followed by voxels in x-fastest order.
void write_rvol(const std::string& path, const Volume& v);
void write_rvol(const std::string& path, const LabelMask& m);
Volume read_rvol_volume(const std::string& path);
LabelMask read_rvol_mask(const std::string& path);
// Peeks the dtype code so callers can pick the right reader.
int rvol_dtype(const std::string& path);

}  // namespace duoseg
