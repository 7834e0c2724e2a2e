#pragma once

#include <iosfwd>
#include <string>

#include "tpmtl/model.hpp"

namespace tpmtl {

// ---- Activity files -------------------------------------------------------
//
// Line-oriented text, one activity per line:
//
//   activity_id<TAB>label<TAB>id:start:end;id:start:end;...
//
// '#' lines and blank lines are skipped. Labels are strings, mapped to class
// indices in first-seen order. Timestamps are integer milliseconds; a token
// containing '.' is read as decimal seconds and converted to milliseconds
// with round-half-even. Activities are normalized on load.

LabeledCorpus read_activity_file(std::istream& in);
LabeledCorpus read_activity_file(const std::string& path);

void write_activity_file(const LabeledCorpus& corpus, std::ostream& out);
void write_activity_file(const LabeledCorpus& corpus, const std::string& path);

// Decimal-seconds or integer-milliseconds token -> ticks (see above).
// Throws ParseError (with the given line number) on malformed input.
Timestamp parse_timestamp(const std::string& token, long line);

// ---- Pattern-set files ----------------------------------------------------
//
// Header line `window_ticks=<N>\tminsup=<value>`, then one pattern per line:
//
//   dim<TAB>id1,id2,...<TAB>rel(1,2),rel(1,3),rel(2,3),...
//
// Relation names use the fixed lowercase vocabulary; 1-patterns leave the
// relation field empty.

struct PatternSetFile {
  Duration window_ticks = 0;
  double minsup = 0.0;
  FeatureSpace feature_space;
};

void write_pattern_set(const FeatureSpace& fs, Duration window_ticks,
                       double minsup, std::ostream& out);
void write_pattern_set(const FeatureSpace& fs, Duration window_ticks,
                       double minsup, const std::string& path);

PatternSetFile read_pattern_set(std::istream& in, long first_line = 1);
PatternSetFile read_pattern_set(const std::string& path);

// ---- Model files ----------------------------------------------------------
//
// Self-describing text: header, mode, hyperparameters, label names, the
// pattern-set block, W in row-major decimal text, and the learned omega when
// present. Doubles are printed with 17 significant digits so a load
// reproduces predictions bit-exactly.

void save_model(const TrainedModel& model, std::ostream& out);
void save_model(const TrainedModel& model, const std::string& path);

TrainedModel load_model(std::istream& in);
TrainedModel load_model(const std::string& path);

// 17-significant-digit representation (exact double round-trip).
std::string format_double(double v);

}  // namespace tpmtl
