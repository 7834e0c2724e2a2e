#include "tpmtl/io.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

namespace tpmtl {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string::size_type pos = 0;
  for (;;) {
    const auto next = s.find(sep, pos);
    if (next == std::string::npos) {
      out.push_back(s.substr(pos));
      return out;
    }
    out.push_back(s.substr(pos, next - pos));
    pos = next + 1;
  }
}

bool blank_or_comment(const std::string& line) {
  for (char c : line) {
    if (c == '#') return true;
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  return out;
}

long long parse_ll(const std::string& token, long line, const char* what) {
  if (token.empty()) throw ParseError(std::string("empty ") + what, line);
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(token, &used);
  } catch (const std::exception&) {
    throw ParseError(std::string("bad ") + what + " '" + token + "'", line);
  }
  if (used != token.size()) {
    throw ParseError(std::string("bad ") + what + " '" + token + "'", line);
  }
  return v;
}

double parse_d(const std::string& token, long line, const char* what) {
  if (token.empty()) throw ParseError(std::string("empty ") + what, line);
  char* end = nullptr;
  const double v = std::strtod(token.c_str(), &end);
  if (end != token.c_str() + token.size()) {
    throw ParseError(std::string("bad ") + what + " '" + token + "'", line);
  }
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Timestamp parse_timestamp(const std::string& token, long line) {
  if (token.find('.') == std::string::npos) {
    return parse_ll(token, line, "timestamp");
  }
  // Decimal seconds -> milliseconds, round half to even on the exact value.
  const auto parts = split(token, '.');
  if (parts.size() != 2) throw ParseError("bad timestamp '" + token + "'", line);
  std::string frac = parts[1];
  if (frac.size() > 9) frac.resize(9);  // below microsecond scale is noise
  for (char c : frac) {
    if (!std::isdigit(static_cast<unsigned char>(c))) {
      throw ParseError("bad timestamp '" + token + "'", line);
    }
  }
  const long long whole = parse_ll(parts[0], line, "timestamp");
  if (whole < 0 || (!parts[0].empty() && parts[0][0] == '-')) {
    throw ParseError("negative decimal timestamps are not supported", line);
  }
  long long num = 0;     // fractional part as num / 10^len
  for (char c : frac) num = num * 10 + (c - '0');
  long long den = 1;
  for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
  // milliseconds = whole*1000 + num*1000/den, round half even.
  const long long scaled = num * 1000;
  long long q = scaled / den;
  const long long r = scaled % den;
  if (2 * r > den || (2 * r == den && q % 2 == 1)) ++q;
  return whole * 1000 + q;
}

LabeledCorpus read_activity_file(std::istream& in) {
  LabeledCorpus corpus;
  std::map<std::string, int> label_index;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (blank_or_comment(line)) continue;
    const auto fields = split(line, '\t');
    if (fields.size() != 3) {
      throw ParseError("expected 3 tab-separated fields, got " +
                           std::to_string(fields.size()),
                       line_no);
    }
    const std::string& activity_id = fields[0];
    const std::string& label_name = fields[1];
    if (activity_id.empty()) throw ParseError("empty activity id", line_no);
    if (label_name.empty()) throw ParseError("empty label", line_no);

    int label;
    if (auto it = label_index.find(label_name); it != label_index.end()) {
      label = it->second;
    } else {
      label = static_cast<int>(corpus.label_names.size());
      label_index.emplace(label_name, label);
      corpus.label_names.push_back(label_name);
    }

    std::vector<Action> actions;
    for (const std::string& triple : split(fields[2], ';')) {
      if (triple.empty()) continue;  // tolerate a trailing ';'
      const auto parts = split(triple, ':');
      if (parts.size() != 3) {
        throw ParseError("expected id:start:end, got '" + triple + "'",
                         line_no);
      }
      const long long id = parse_ll(parts[0], line_no, "action id");
      if (id < 0) throw ParseError("negative action id", line_no);
      Action a;
      a.id = static_cast<ActionId>(id);
      a.start = parse_timestamp(parts[1], line_no);
      a.end = parse_timestamp(parts[2], line_no);
      if (a.start >= a.end) {
        throw ParseError("action interval start >= end", line_no);
      }
      actions.push_back(a);
    }
    if (actions.empty()) throw ParseError("activity has no actions", line_no);
    corpus.activities.push_back(
        normalize_activity(std::move(actions), activity_id, label));
  }
  if (corpus.activities.empty()) {
    throw ParseError("no activities in file", line_no == 0 ? 1 : line_no);
  }
  return corpus;
}

LabeledCorpus read_activity_file(const std::string& path) {
  auto in = open_input(path);
  return read_activity_file(in);
}

void write_activity_file(const LabeledCorpus& corpus, std::ostream& out) {
  for (const auto& act : corpus.activities) {
    out << act.activity_id << '\t';
    if (act.label >= 0 &&
        static_cast<std::size_t>(act.label) < corpus.label_names.size()) {
      out << corpus.label_names[static_cast<std::size_t>(act.label)];
    } else {
      out << "unlabeled";
    }
    out << '\t';
    for (std::size_t i = 0; i < act.actions.size(); ++i) {
      const Action& a = act.actions[i];
      if (i > 0) out << ';';
      out << a.id << ':' << a.start << ':' << a.end;
    }
    out << '\n';
  }
}

void write_activity_file(const LabeledCorpus& corpus,
                         const std::string& path) {
  auto out = open_output(path);
  write_activity_file(corpus, out);
}

namespace {

void write_pattern_line(const TemporalPattern& p, std::ostream& out) {
  out << p.dim() << '\t';
  for (std::size_t i = 0; i < p.action_ids.size(); ++i) {
    if (i > 0) out << ',';
    out << p.action_ids[i];
  }
  out << '\t';
  for (std::size_t i = 0; i < p.relations.size(); ++i) {
    if (i > 0) out << ',';
    out << allen_name(p.relations[i]);
  }
  out << '\n';
}

TemporalPattern parse_pattern_line(const std::string& line, long line_no) {
  const auto fields = split(line, '\t');
  if (fields.size() != 3) {
    throw ParseError("expected dim<TAB>ids<TAB>relations", line_no);
  }
  const long long dim = parse_ll(fields[0], line_no, "pattern dim");
  if (dim < 1) throw ParseError("pattern dim must be >= 1", line_no);
  TemporalPattern p;
  for (const auto& tok : split(fields[1], ',')) {
    const long long id = parse_ll(tok, line_no, "action id");
    if (id < 0) throw ParseError("negative action id", line_no);
    p.action_ids.push_back(static_cast<ActionId>(id));
  }
  if (p.action_ids.size() != static_cast<std::size_t>(dim)) {
    throw ParseError("id count does not match dim", line_no);
  }
  if (!fields[2].empty()) {
    for (const auto& tok : split(fields[2], ',')) {
      const auto rel = allen_from_name(tok);
      if (!rel) throw ParseError("unknown relation '" + tok + "'", line_no);
      p.relations.push_back(*rel);
    }
  }
  const std::size_t expected = static_cast<std::size_t>(dim) *
                               static_cast<std::size_t>(dim - 1) / 2;
  if (p.relations.size() != expected) {
    throw ParseError("relation count does not match dim", line_no);
  }
  return p;
}

}  // namespace

void write_pattern_set(const FeatureSpace& fs, Duration window_ticks,
                       double minsup, std::ostream& out) {
  out << "window_ticks=" << window_ticks << "\tminsup=" << format_double(minsup)
      << '\n';
  for (const auto& p : fs.patterns()) write_pattern_line(p, out);
}

void write_pattern_set(const FeatureSpace& fs, Duration window_ticks,
                       double minsup, const std::string& path) {
  auto out = open_output(path);
  write_pattern_set(fs, window_ticks, minsup, out);
}

namespace {

// Reads the header plus pattern lines. count < 0 means read to EOF.
PatternSetFile read_pattern_block(std::istream& in, long& line_no,
                                  long long count) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("missing header", line_no + 1);
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split(line, '\t');
  if (header.size() != 2 || header[0].rfind("window_ticks=", 0) != 0 ||
      header[1].rfind("minsup=", 0) != 0) {
    throw ParseError("expected header 'window_ticks=...<TAB>minsup=...'",
                     line_no);
  }
  PatternSetFile file;
  file.window_ticks = parse_ll(header[0].substr(13), line_no, "window_ticks");
  file.minsup = parse_d(header[1].substr(7), line_no, "minsup");

  std::vector<TemporalPattern> patterns;
  while (count < 0 || patterns.size() < static_cast<std::size_t>(count)) {
    if (!std::getline(in, line)) {
      if (count < 0) break;
      throw ParseError("truncated pattern block", line_no);
    }
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (blank_or_comment(line)) continue;
    patterns.push_back(parse_pattern_line(line, line_no));
  }
  file.feature_space = FeatureSpace(std::move(patterns));
  return file;
}

}  // namespace

PatternSetFile read_pattern_set(std::istream& in, long first_line) {
  long line_no = first_line - 1;
  return read_pattern_block(in, line_no, -1);
}

PatternSetFile read_pattern_set(const std::string& path) {
  auto in = open_input(path);
  return read_pattern_set(in);
}

// ---- Model serialization --------------------------------------------------

namespace {

void write_matrix(const Matrix& m, std::ostream& out) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c > 0) out << ' ';
      out << format_double(m(r, c));
    }
    out << '\n';
  }
}

Matrix read_matrix(std::istream& in, Eigen::Index rows, Eigen::Index cols,
                   long& line_no) {
  Matrix m(rows, cols);
  std::string line;
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (!std::getline(in, line)) {
      throw ParseError("truncated matrix block", line_no);
    }
    ++line_no;
    std::istringstream row(line);
    for (Eigen::Index c = 0; c < cols; ++c) {
      std::string tok;
      if (!(row >> tok)) throw ParseError("short matrix row", line_no);
      m(r, c) = parse_d(tok, line_no, "matrix entry");
    }
  }
  return m;
}

std::string expect_line(std::istream& in, long& line_no) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("truncated model file", line_no);
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

std::string expect_field(const std::string& line, const std::string& key,
                         long line_no) {
  if (line.rfind(key + " ", 0) != 0) {
    throw ParseError("expected '" + key + " ...'", line_no);
  }
  return line.substr(key.size() + 1);
}

}  // namespace

void save_model(const TrainedModel& model, std::ostream& out) {
  out << "tpmtl-model 1\n";
  out << "mode " << mode_name(model.mode) << '\n';
  out << "lambda " << format_double(model.hp.lambda) << '\n';
  out << "gamma " << format_double(model.hp.gamma) << '\n';
  out << "theta " << format_double(model.hp.theta) << '\n';
  out << "labels " << model.label_names.size() << '\n';
  for (const auto& name : model.label_names) out << name << '\n';
  out << "patterns " << model.feature_space.size() << '\n';
  write_pattern_set(model.feature_space, model.window, 0.0, out);
  out << "W " << model.W.rows() << ' ' << model.W.cols() << '\n';
  write_matrix(model.W, out);
  if (model.omega.has_value()) {
    out << "omega " << model.omega->rows() << ' '
        << (model.omega_degenerate ? 1 : 0) << '\n';
    write_matrix(*model.omega, out);
  } else {
    out << "omega 0 0\n";
  }
  out << "standardize " << (model.standardized ? 1 : 0) << '\n';
  if (model.standardized) {
    write_matrix(model.feature_means.transpose(), out);
    write_matrix(model.feature_stds.transpose(), out);
  }
}

void save_model(const TrainedModel& model, const std::string& path) {
  auto out = open_output(path);
  save_model(model, out);
}

TrainedModel load_model(std::istream& in) {
  long line_no = 0;
  TrainedModel model;

  if (expect_line(in, line_no) != "tpmtl-model 1") {
    throw ParseError("not a tpmtl model file", line_no);
  }
  const std::string mode_str =
      expect_field(expect_line(in, line_no), "mode", line_no);
  const auto mode = mode_from_name(mode_str);
  if (!mode) throw ParseError("unknown mode '" + mode_str + "'", line_no);
  model.mode = *mode;
  model.hp.lambda = parse_d(
      expect_field(expect_line(in, line_no), "lambda", line_no), line_no,
      "lambda");
  model.hp.gamma = parse_d(
      expect_field(expect_line(in, line_no), "gamma", line_no), line_no,
      "gamma");
  model.hp.theta = parse_d(
      expect_field(expect_line(in, line_no), "theta", line_no), line_no,
      "theta");

  const long long n_labels = parse_ll(
      expect_field(expect_line(in, line_no), "labels", line_no), line_no,
      "label count");
  for (long long i = 0; i < n_labels; ++i) {
    model.label_names.push_back(expect_line(in, line_no));
  }

  const long long n_patterns = parse_ll(
      expect_field(expect_line(in, line_no), "patterns", line_no), line_no,
      "pattern count");
  PatternSetFile block = read_pattern_block(in, line_no, n_patterns);
  model.feature_space = std::move(block.feature_space);
  model.window = block.window_ticks;

  {
    const std::string w_line = expect_line(in, line_no);
    std::istringstream hdr(w_line);
    std::string tag;
    Eigen::Index rows = 0, cols = 0;
    if (!(hdr >> tag >> rows >> cols) || tag != "W") {
      throw ParseError("expected 'W <rows> <cols>'", line_no);
    }
    model.W = read_matrix(in, rows, cols, line_no);
  }
  {
    const std::string o_line = expect_line(in, line_no);
    std::istringstream hdr(o_line);
    std::string tag;
    Eigen::Index m = 0;
    int degenerate = 0;
    if (!(hdr >> tag >> m >> degenerate) || tag != "omega") {
      throw ParseError("expected 'omega <M> <degenerate>'", line_no);
    }
    if (m > 0) {
      model.omega = read_matrix(in, m, m, line_no);
      model.omega_degenerate = degenerate != 0;
    }
  }
  {
    const std::string s_line = expect_line(in, line_no);
    const std::string flag = expect_field(s_line, "standardize", line_no);
    model.standardized = flag == "1";
    if (model.standardized) {
      const Eigen::Index d = model.W.rows();
      model.feature_means = read_matrix(in, 1, d, line_no).row(0);
      model.feature_stds = read_matrix(in, 1, d, line_no).row(0);
    }
  }
  return model;
}

TrainedModel load_model(const std::string& path) {
  auto in = open_input(path);
  return load_model(in);
}

}  // namespace tpmtl
