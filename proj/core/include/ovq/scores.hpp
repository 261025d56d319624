#pragma once

#include <map>
#include <string>
#include <vector>

namespace ovq {

struct ScoreEntry {
  std::string subject_id;
  std::string sequence_id;
  double raw_score = 0.0;  // in [0, 100]
};

struct ScoreTable {
  std::vector<ScoreEntry> entries;
  // impaired sequence -> its reference sequence
  std::map<std::string, std::string> reference_of;
};

// scores CSV header: subject_id,sequence_id,raw_score
// reference map CSV header: sequence_id,reference_id
ScoreTable load_scores(const std::string& scores_path, const std::string& refs_path);

}  // namespace ovq
