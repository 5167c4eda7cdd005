#pragma once

#include <optional>
#include <string>
#include <vector>

#include "duoseg/volume.hpp"

namespace duoseg {

// Overlap coefficient 2|P∩G| / (|P|+|G|); 1.0 when both masks are empty.
double dice(const LabelMask& pred, const LabelMask& gt);

// Foreground voxels with at least one face-adjacent (6-neighborhood)
// background neighbor; the volume border counts as background.
struct SurfaceSet {
  std::vector<std::array<int64_t, 3>> voxels;
  std::array<float, 3> spacing{1.f, 1.f, 1.f};
};
SurfaceSet extract_surface(const LabelMask& m);

enum class DistanceConvention {
  kPooledSymmetric,       // union of both directed distance multisets (default)
  kMaxDirectedPercentile  // max of the two directed percentiles / means
};

// 95th percentile (linear interpolation between order statistics) of
// surface-to-surface voxel-center distances, in mm. Errors when either
// mask is empty.
double hd95(const LabelMask& pred, const LabelMask& gt,
            DistanceConvention conv = DistanceConvention::kPooledSymmetric);

// Mean of the same pooled distances, in mm.
double assd(const LabelMask& pred, const LabelMask& gt,
            DistanceConvention conv = DistanceConvention::kPooledSymmetric);

// Directed nearest-surface distances (mm) from every voxel of `from` to the
// surface of `to`, computed with an exact Euclidean distance transform.
std::vector<double> directed_surface_distances(const SurfaceSet& from, const SurfaceSet& to,
                                               const std::array<int64_t, 3>& grid_shape);

// Linear-interpolation percentile of a sample, q in [0,1].
double percentile(std::vector<double> values, double q);

// Two-tailed paired Student t-test. Conventions: all-zero differences ->
// (0, 1); zero-variance nonzero-mean differences -> p = 0.
std::pair<double, double> paired_t_test(const std::vector<double>& a,
                                        const std::vector<double>& b);

// Per-case metric row; distance cells are empty when undefined (empty mask).
struct CaseMetrics {
  std::string case_id;
  double dice = 0.0;
  std::optional<double> hd95_mm;
  std::optional<double> asd_mm;
};

struct MethodReport {
  std::string method;
  std::vector<CaseMetrics> cases;

  double dice_mean() const;
  double dice_std() const;
  std::optional<double> hd95_mean() const;  // empty if any case is flagged
  std::optional<double> hd95_std() const;
  std::optional<double> asd_mean() const;
  std::optional<double> asd_std() const;
};

// Renders/reads the per-case evaluation table (method, then one row per case).
void write_method_report(const MethodReport& r, const std::string& path);
MethodReport read_method_report(const std::string& path);

// Table mirroring the comparison layout: method, Dice mean±std, HD95, ASD,
// p-value of a paired t-test on Dice against the reference method.
std::string render_comparison(const std::vector<MethodReport>& methods,
                              const std::string& reference);

}  // namespace duoseg
