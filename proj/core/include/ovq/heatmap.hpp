#pragma once

#include <string>
#include <vector>

#include "ovq/traces.hpp"

namespace ovq {

struct HeatMap {
  int width = 0;
  int height = 0;
  std::vector<double> density;  // nonnegative, total mass = sample count

  double at(int x, int y) const { return density[static_cast<std::size_t>(y) * width + x]; }
};

// Pearson correlation between the pooled longitudes and latitudes of a trace
// set. Throws when either axis has zero variance.
double lonlat_correlation(const TraceSet& traces);

// Unit impulses at each sample's pixel, convolved with a Gaussian of the
// given angular std (longitude wraps, latitude reflects; mass is conserved).
HeatMap heatmap_from_traces(const TraceSet& traces, int width, int height, double sigma_deg);

// Pearson correlation over pixels of two equally sized, non-constant maps.
double heatmap_cc(const HeatMap& a, const HeatMap& b);

// 16-bit PGM scaled to the map maximum, and the raw float64 grid format
// shared with the weight-map cache.
void write_heatmap_pgm(const HeatMap& map, const std::string& path);
void write_heatmap_f64(const HeatMap& map, const std::string& path);

}  // namespace ovq
