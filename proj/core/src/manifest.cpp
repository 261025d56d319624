#include "ovq/manifest.hpp"

#include <filesystem>
#include <fstream>

#include "ovq/csv.hpp"
#include "ovq/errors.hpp"

namespace ovq {

const SequenceEntry* Manifest::find(const std::string& sequence_id) const {
  for (const SequenceEntry& e : sequences) {
    if (e.sequence_id == sequence_id) return &e;
  }
  return nullptr;
}

Manifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open manifest: " + path);
  const std::filesystem::path base = std::filesystem::path(path).parent_path();

  Manifest manifest;
  std::string line;
  int line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const std::string ctx = path + ":" + std::to_string(line_no);
    if (!have_header) {
      if (line != "sequence_id,path,width,height,frame_count,role,reference_id") {
        throw DataError(ctx + ": unexpected manifest header");
      }
      have_header = true;
      continue;
    }
    const auto fields = csv::split(line);
    if (fields.size() != 7) throw DataError(ctx + ": expected 7 fields");
    SequenceEntry e;
    e.sequence_id = fields[0];
    std::filesystem::path p(fields[1]);
    e.path = p.is_absolute() ? p.string() : (base / p).string();
    e.width = static_cast<int>(csv::parse_long(fields[2], ctx));
    e.height = static_cast<int>(csv::parse_long(fields[3], ctx));
    e.frame_count = csv::parse_long(fields[4], ctx);
    if (fields[5] == "impaired") {
      e.impaired = true;
    } else if (fields[5] != "reference") {
      throw DataError(ctx + ": role must be reference or impaired");
    }
    e.reference_id = fields[6];
    if (e.impaired && e.reference_id.empty()) {
      throw DataError(ctx + ": impaired sequence needs a reference_id");
    }
    if (manifest.find(e.sequence_id) != nullptr) {
      throw DataError(ctx + ": duplicate sequence_id " + e.sequence_id);
    }
    manifest.sequences.push_back(std::move(e));
  }
  if (!have_header) throw DataError(path + ": missing manifest header");
  for (const SequenceEntry& e : manifest.sequences) {
    if (!e.impaired) continue;
    const SequenceEntry* ref = manifest.find(e.reference_id);
    if (ref == nullptr) {
      throw DataError(path + ": sequence " + e.sequence_id + " references unknown " +
                      e.reference_id);
    }
    if (ref->width != e.width || ref->height != e.height) {
      throw DataError(path + ": dimensions of " + e.sequence_id + " differ from reference " +
                      e.reference_id);
    }
  }
  return manifest;
}

}  // namespace ovq
