#include "ovq/scores.hpp"

#include <fstream>

#include "ovq/csv.hpp"
#include "ovq/errors.hpp"

namespace ovq {

ScoreTable load_scores(const std::string& scores_path, const std::string& refs_path) {
  ScoreTable table;
  {
    std::ifstream in(scores_path);
    if (!in) throw DataError("cannot open scores: " + scores_path);
    std::string line;
    int line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      const std::string ctx = scores_path + ":" + std::to_string(line_no);
      if (!have_header) {
        if (line != "subject_id,sequence_id,raw_score") {
          throw DataError(ctx + ": expected header subject_id,sequence_id,raw_score");
        }
        have_header = true;
        continue;
      }
      const auto fields = csv::split(line);
      if (fields.size() != 3) throw DataError(ctx + ": expected 3 fields");
      ScoreEntry e{fields[0], fields[1], csv::parse_double(fields[2], ctx)};
      if (e.raw_score < 0.0 || e.raw_score > 100.0) {
        throw DataError(ctx + ": score " + fields[2] + " outside [0, 100]");
      }
      table.entries.push_back(std::move(e));
    }
    if (!have_header) throw DataError(scores_path + ": missing header");
  }
  {
    std::ifstream in(refs_path);
    if (!in) throw DataError("cannot open reference map: " + refs_path);
    std::string line;
    int line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      const std::string ctx = refs_path + ":" + std::to_string(line_no);
      if (!have_header) {
        if (line != "sequence_id,reference_id") {
          throw DataError(ctx + ": expected header sequence_id,reference_id");
        }
        have_header = true;
        continue;
      }
      const auto fields = csv::split(line);
      if (fields.size() != 2) throw DataError(ctx + ": expected 2 fields");
      table.reference_of[fields[0]] = fields[1];
    }
    if (!have_header) throw DataError(refs_path + ": missing header");
  }
  return table;
}

}  // namespace ovq
