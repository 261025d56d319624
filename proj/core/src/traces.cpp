#include "ovq/traces.hpp"

#include <fstream>
#include <set>
#include <tuple>

#include "ovq/csv.hpp"
#include "ovq/errors.hpp"

namespace ovq {

namespace {

constexpr const char* kHeader = "subject_id,sequence_id,sample_index,longitude_deg,latitude_deg";

}  // namespace

TraceSet load_traces(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open trace file: " + path);

  TraceSet traces;
  std::string line;
  int line_no = 0;
  bool have_rate = false, have_header = false;
  std::set<std::tuple<std::string, std::string, long>> seen;

  while (std::getline(in, line)) {
    ++line_no;
    const std::string ctx = path + ":" + std::to_string(line_no);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::string key = "sample_rate=";
      const auto pos = line.find(key);
      if (pos != std::string::npos) {
        traces.sample_rate = csv::parse_double(line.substr(pos + key.size()), ctx);
        have_rate = true;
      }
      continue;
    }
    if (!have_header) {
      if (line != kHeader) {
        throw DataError(ctx + ": expected header '" + kHeader + "'");
      }
      have_header = true;
      continue;
    }
    const auto fields = csv::split(line);
    if (fields.size() != 5) {
      throw DataError(ctx + ": expected 5 fields, got " + std::to_string(fields.size()));
    }
    TraceRecord rec;
    rec.subject_id = fields[0];
    rec.sequence_id = fields[1];
    rec.sample_index = csv::parse_long(fields[2], ctx);
    if (rec.sample_index < 0) throw DataError(ctx + ": sample_index must be >= 0");
    rec.direction.longitude = csv::parse_double(fields[3], ctx);
    rec.direction.latitude = csv::parse_double(fields[4], ctx);
    if (rec.direction.longitude < -180.0 || rec.direction.longitude > 180.0 ||
        rec.direction.latitude < -90.0 || rec.direction.latitude > 90.0) {
      throw DataError(ctx + ": direction (" + fields[3] + ", " + fields[4] +
                      ") outside [-180,180]x[-90,90]");
    }
    if (!seen.emplace(rec.subject_id, rec.sequence_id, rec.sample_index).second) {
      throw DataError(ctx + ": duplicate (subject, sequence, sample_index)");
    }
    traces.records.push_back(std::move(rec));
  }
  if (!have_header) throw DataError(path + ": missing trace header");
  if (!have_rate) throw DataError(path + ": missing '# sample_rate=<hz>' line");
  if (traces.sample_rate <= 0.0) throw DataError(path + ": sample_rate must be positive");
  return traces;
}

void save_traces(const TraceSet& traces, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write trace file: " + path);
  out << "# sample_rate=" << csv::format_double(traces.sample_rate) << "\n";
  out << kHeader << "\n";
  for (const TraceRecord& r : traces.records) {
    out << r.subject_id << "," << r.sequence_id << "," << r.sample_index << ","
        << csv::format_double(r.direction.longitude) << ","
        << csv::format_double(r.direction.latitude) << "\n";
  }
}

}  // namespace ovq
