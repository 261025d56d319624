#include "ovq/dmos.hpp"

#include <cmath>
#include <fstream>

#include "ovq/csv.hpp"
#include "ovq/errors.hpp"

namespace ovq {

SubjectTable difference_scores(const ScoreTable& scores) {
  // (subject, sequence) -> raw score
  std::map<std::string, std::map<std::string, double>> raw;
  for (const ScoreEntry& e : scores.entries) {
    raw[e.subject_id][e.sequence_id] = e.raw_score;
  }
  SubjectTable diffs;
  for (const auto& [subject, ratings] : raw) {
    for (const auto& [sequence, score] : ratings) {
      const auto ref_it = scores.reference_of.find(sequence);
      if (ref_it == scores.reference_of.end()) continue;  // reference rows themselves
      const auto& ref_scores = raw.at(subject);
      const auto ref_score = ref_scores.find(ref_it->second);
      if (ref_score == ref_scores.end()) {
        throw DataError("subject " + subject + " rated " + sequence +
                        " but not its reference " + ref_it->second);
      }
      diffs[subject][sequence] = ref_score->second - score;
    }
  }
  return diffs;
}

ZScoreTable z_scores(const SubjectTable& diffs) {
  ZScoreTable table;
  for (const auto& [subject, per_seq] : diffs) {
    const std::size_t m = per_seq.size();
    if (m < 2) {
      throw DataError("subject " + subject + " rated fewer than 2 impaired sequences");
    }
    double mean = 0.0;
    for (const auto& [seq, d] : per_seq) mean += d;
    mean /= static_cast<double>(m);
    double ss = 0.0;
    for (const auto& [seq, d] : per_seq) ss += (d - mean) * (d - mean);
    const double stddev = std::sqrt(ss / static_cast<double>(m - 1));
    if (stddev == 0.0) {
      throw DataError("subject " + subject + " gave constant difference scores");
    }
    for (const auto& [seq, d] : per_seq) {
      table.z[subject][seq] = (d - mean) / stddev;
    }
  }
  return table;
}

ZScoreTable reject_subjects(const ZScoreTable& table, RejectionPopulation population) {
  if (table.z.size() < 2) throw DataError("rejection needs at least 2 subjects");

  // Population mean/std the 2-sigma band is measured against.
  std::map<std::string, std::pair<double, double>> per_sequence;
  double global_mean = 0.0, global_std = 0.0;
  if (population == RejectionPopulation::PerSequence) {
    std::map<std::string, std::vector<double>> values;
    for (const auto& [subject, per_seq] : table.z) {
      for (const auto& [seq, z] : per_seq) values[seq].push_back(z);
    }
    for (const auto& [seq, zs] : values) {
      double mean = 0.0;
      for (double z : zs) mean += z;
      mean /= static_cast<double>(zs.size());
      double ss = 0.0;
      for (double z : zs) ss += (z - mean) * (z - mean);
      const double stddev =
          zs.size() > 1 ? std::sqrt(ss / static_cast<double>(zs.size() - 1)) : 0.0;
      per_sequence[seq] = {mean, stddev};
    }
  } else {
    std::vector<double> all;
    for (const auto& [subject, per_seq] : table.z) {
      for (const auto& [seq, z] : per_seq) all.push_back(z);
    }
    for (double z : all) global_mean += z;
    global_mean /= static_cast<double>(all.size());
    double ss = 0.0;
    for (double z : all) ss += (z - global_mean) * (z - global_mean);
    global_std = all.size() > 1 ? std::sqrt(ss / static_cast<double>(all.size() - 1)) : 0.0;
  }

  ZScoreTable out;
  for (const auto& [subject, per_seq] : table.z) {
    std::size_t outliers = 0;
    for (const auto& [seq, z] : per_seq) {
      double mean, stddev;
      if (population == RejectionPopulation::PerSequence) {
        const auto& stats = per_sequence.at(seq);
        mean = stats.first;
        stddev = stats.second;
      } else {
        mean = global_mean;
        stddev = global_std;
      }
      if (std::abs(z - mean) > 2.0 * stddev) ++outliers;
    }
    const double fraction = static_cast<double>(outliers) / static_cast<double>(per_seq.size());
    if (fraction > 0.05) {
      out.rejected_subjects.insert(subject);
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.1f%% of z-scores outside 2 sigma", fraction * 100.0);
      out.rejection_report.push_back(subject + ": " + buf);
    } else {
      out.z[subject] = per_seq;
    }
  }
  if (out.z.empty()) throw DataError("subject rejection removed the whole panel");
  return out;
}

ZScoreTable rescale(const ZScoreTable& table) {
  ZScoreTable out = table;
  for (const auto& [subject, per_seq] : table.z) {
    for (const auto& [seq, z] : per_seq) {
      out.rescaled[subject][seq] = 100.0 * (z + 3.0) / 6.0;
    }
  }
  return out;
}

std::map<std::string, double> o_dmos(const ZScoreTable& rescaled) {
  if (rescaled.rescaled.empty()) throw ArgumentError("rescale() has not been applied");
  std::map<std::string, std::pair<double, std::size_t>> acc;
  for (const auto& [subject, per_seq] : rescaled.rescaled) {
    for (const auto& [seq, v] : per_seq) {
      acc[seq].first += v;
      acc[seq].second += 1;
    }
  }
  std::map<std::string, double> out;
  for (const auto& [seq, sum_count] : acc) {
    if (sum_count.second == 0) throw DataError("no valid subjects for sequence " + seq);
    out[seq] = sum_count.first / static_cast<double>(sum_count.second);
  }
  return out;
}

std::array<double, 6> region_frequencies(const TraceSet& traces, const std::string& subject_id,
                                         const std::string& sequence_id, double discard_seconds) {
  if (traces.sample_rate <= 0.0) throw DataError("trace set has no sample rate");
  const double first_kept = traces.sample_rate * discard_seconds;
  std::array<long, 6> counts{};
  long total = 0;
  for (const TraceRecord& r : traces.records) {
    if (r.subject_id != subject_id || r.sequence_id != sequence_id) continue;
    if (static_cast<double>(r.sample_index) < first_kept) continue;
    ++counts[static_cast<int>(region_of(r.direction))];
    ++total;
  }
  if (total == 0) {
    throw DataError("no trace samples for subject " + subject_id + " on " + sequence_id +
                    " after discarding the first " + csv::format_double(discard_seconds) + " s");
  }
  std::array<double, 6> freq{};
  int largest = 0;
  for (int r = 0; r < 6; ++r) {
    freq[r] = static_cast<double>(counts[r]) / static_cast<double>(total);
    if (counts[r] > counts[largest]) largest = r;
  }
  // Pin the exact sum-to-1 identity against rounding.
  double others = 0.0;
  for (int r = 0; r < 6; ++r) {
    if (r != largest) others += freq[r];
  }
  freq[largest] = 1.0 - others;
  return freq;
}

std::map<std::string, VDmosVector> v_dmos(const ZScoreTable& rescaled, const TraceSet& traces,
                                          double f0, double discard_seconds) {
  const std::map<std::string, double> overall = o_dmos(rescaled);

  // Subjects with trace data per sequence, among the retained panel.
  std::map<std::string, std::set<std::string>> traced;
  for (const TraceRecord& r : traces.records) {
    traced[r.sequence_id].insert(r.subject_id);
  }

  std::map<std::string, VDmosVector> out;
  for (const auto& [seq, o] : overall) {
    VDmosVector v;
    v.o_dmos = o;
    std::array<double, 6> sums{};
    std::array<std::size_t, 6> counts{};
    const auto traced_it = traced.find(seq);
    for (const auto& [subject, per_seq] : rescaled.rescaled) {
      const auto score_it = per_seq.find(seq);
      if (score_it == per_seq.end()) continue;
      if (traced_it == traced.end() || traced_it->second.count(subject) == 0) continue;
      const std::array<double, 6> freq =
          region_frequencies(traces, subject, seq, discard_seconds);
      for (int r = 0; r < 6; ++r) {
        if (freq[r] > f0) {
          sums[r] += score_it->second;
          counts[r] += 1;
        }
      }
    }
    for (int r = 0; r < 6; ++r) {
      if (counts[r] > 0) v.regional[r] = sums[r] / static_cast<double>(counts[r]);
    }
    out[seq] = v;
  }
  return out;
}

void write_vdmos_csv(const std::map<std::string, VDmosVector>& vdmos, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write V-DMOS: " + path);
  out << "sequence_id,o_dmos,front,left,back,right,top,bottom\n";
  for (const auto& [seq, v] : vdmos) {
    out << seq << "," << csv::format_double(v.o_dmos);
    for (int r = 0; r < 6; ++r) {
      out << ",";
      if (v.regional[r].has_value()) {
        out << csv::format_double(*v.regional[r]);
      } else {
        out << "---";
      }
    }
    out << "\n";
  }
}

}  // namespace ovq
