#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "duoseg/volume.hpp"

namespace duoseg {

// Synthetic dual-domain tube phantom. Geometry (tube centerlines, wall
// texture, distractor blobs, noise) is drawn identically for both domains
// from the same seed; only the lumen intensity statistics differ, which is
// the entire domain gap.
struct PhantomConfig {
  std::array<int64_t, 3> shape{96, 96, 96};
  std::array<float, 3> spacing_mm{2.f, 2.f, 2.f};
  std::array<int, 2> n_tubes{2, 3};
  std::array<double, 2> tube_radius_vox{5.0, 7.5};
  std::array<double, 2> wall_intensity{0.50, 0.62};
  std::array<double, 2> lumen_intensity_source{0.78, 0.95};  // bright (oral contrast-like)
  std::array<double, 2> lumen_intensity_target{0.04, 0.18};  // dark (fluid/gas-like)
  std::array<int, 2> n_distractors{4, 8};
  std::array<double, 2> distractor_radius_vox{3.0, 7.0};
  std::array<double, 2> distractor_intensity{0.25, 0.45};
  double background_intensity = 0.32;
  double noise_sigma = 0.02;
  double fold_period_vox = 4.0;   // ring spacing along the tube
  double fold_amplitude = 0.1;    // additive, normalized units
  uint64_t seed = 1;

  // mask foreground fraction accepted without regeneration
  double min_foreground_fraction = 0.005;
  double max_foreground_fraction = 0.30;

  void validate() const;
  std::string serialize() const;            // key=value lines
  uint64_t config_hash() const;             // FNV-1a of serialize()
  static PhantomConfig parse(const std::string& text);
};

// Renders one phantom volume and its mask (tube interior plus wall).
// Deterministic in (cfg, domain, seed); the two domains share geometry.
std::pair<Volume, LabelMask> generate_phantom(const PhantomConfig& cfg, Domain domain,
                                              uint64_t seed);

struct ManifestEntry {
  std::string volume_path;
  std::string mask_path;  // empty = withheld ("-" on disk)
  Domain domain = Domain::kSource;
  std::string split;      // "train" or "test"
};

struct DatasetManifest {
  std::vector<ManifestEntry> entries;
  uint64_t config_hash = 0;
  std::string base_dir;  // directory of the manifest file; paths resolve against it

  std::vector<ManifestEntry> select(Domain d, const std::string& split) const;
  std::string resolve(const std::string& rel) const;
};

DatasetManifest generate_dataset(const PhantomConfig& cfg, int n_source_train,
                                 int n_target_train, int n_target_test,
                                 const std::string& out_dir);

DatasetManifest read_manifest(const std::string& path);
void write_manifest(const DatasetManifest& m, const std::string& path);

}  // namespace duoseg
