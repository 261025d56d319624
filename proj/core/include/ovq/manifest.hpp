#pragma once

#include <string>
#include <vector>

namespace ovq {

struct SequenceEntry {
  std::string sequence_id;
  std::string path;  // resolved against the manifest's directory
  int width = 0;
  int height = 0;
  long frame_count = 0;
  bool impaired = false;
  std::string reference_id;  // set when impaired
};

struct Manifest {
  std::vector<SequenceEntry> sequences;

  const SequenceEntry* find(const std::string& sequence_id) const;
};

// CSV header: sequence_id,path,width,height,frame_count,role,reference_id
// with role in {reference, impaired}. Relative paths resolve against the
// manifest file's directory. Each impaired entry must name a reference with
// matching dimensions.
Manifest load_manifest(const std::string& path);

}  // namespace ovq
