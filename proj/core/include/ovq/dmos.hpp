#pragma once

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ovq/scores.hpp"
#include "ovq/traces.hpp"

namespace ovq {

// subject -> impaired sequence -> value, ordered for deterministic output
using SubjectTable = std::map<std::string, std::map<std::string, double>>;

// Which population the 2-sigma rejection rule standardizes against.
enum class RejectionPopulation {
  PerSequence,  // mean/std across subjects, per sequence
  Global,       // mean/std over the whole panel
};

struct ZScoreTable {
  SubjectTable z;
  SubjectTable rescaled;  // filled by rescale()
  std::set<std::string> rejected_subjects;
  std::vector<std::string> rejection_report;  // one line per rejected subject
};

struct VDmosVector {
  double o_dmos = 0.0;
  // Regional DMOS in the order front, left, back, right, top, bottom;
  // nullopt marks a region no qualifying subject dwelt in ("---").
  std::array<std::optional<double>, 6> regional;
};

// d_ij = S_ij(ref) - S_ij, for every impaired sequence. Throws when a subject
// lacks the reference score for an impaired sequence they rated.
SubjectTable difference_scores(const ScoreTable& scores);

// Per-subject standardization with the (M_i - 1)-denominator std. Every
// subject needs at least two rated sequences and nonzero spread.
ZScoreTable z_scores(const SubjectTable& diffs);

// Drops subjects for whom more than 5% of z-scores fall outside two standard
// deviations of the population mean. Throws if nobody survives.
ZScoreTable reject_subjects(const ZScoreTable& table,
                            RejectionPopulation population = RejectionPopulation::PerSequence);

// Z' = 100 (Z + 3) / 6.
ZScoreTable rescale(const ZScoreTable& table);

// Mean rescaled score over retained subjects, per sequence.
std::map<std::string, double> o_dmos(const ZScoreTable& rescaled);

// Fraction of trace samples per region for one (subject, sequence), after
// discarding the first `discard_seconds` of samples. Fractions sum to 1.
std::array<double, 6> region_frequencies(const TraceSet& traces, const std::string& subject_id,
                                         const std::string& sequence_id,
                                         double discard_seconds = 1.0);

// Regional DMOS over subjects whose region frequency exceeds f0; element 0 of
// the serialized vector is the overall DMOS.
std::map<std::string, VDmosVector> v_dmos(const ZScoreTable& rescaled, const TraceSet& traces,
                                          double f0 = 1.0 / 6.0, double discard_seconds = 1.0);

// CSV: sequence_id,o_dmos,front,left,back,right,top,bottom with "---" for
// invalid regional entries.
void write_vdmos_csv(const std::map<std::string, VDmosVector>& vdmos, const std::string& path);

}  // namespace ovq
