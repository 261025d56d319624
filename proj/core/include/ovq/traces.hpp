#pragma once

#include <string>
#include <vector>

#include "ovq/sphere.hpp"

namespace ovq {

struct TraceRecord {
  std::string subject_id;
  std::string sequence_id;
  long sample_index = 0;
  SphereDirection direction;
};

// Head-tracking samples for subjects watching sequences. sample_index counts
// at sample_rate samples per second; alignment to video frames is
// floor(sample_index * fps / sample_rate).
struct TraceSet {
  std::vector<TraceRecord> records;
  double sample_rate = 0.0;
};

// CSV with a "# sample_rate=<hz>" comment line and the header
// subject_id,sequence_id,sample_index,longitude_deg,latitude_deg.
TraceSet load_traces(const std::string& path);
void save_traces(const TraceSet& traces, const std::string& path);

}  // namespace ovq
