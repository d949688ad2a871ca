#include "mdlsel/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "mdlsel/errors.hpp"
#include "mdlsel/rng.hpp"  // fnv1a64

namespace mdlsel::io {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

bool is_comment(const std::string& line) { return !line.empty() && line[0] == '#'; }

std::vector<std::string> split(const std::string& s, char delim) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    std::size_t pos = s.find(delim, start);
    if (pos == std::string::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

double parse_double(const std::string& tok, const std::string& where) {
  double v = 0.0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  auto [p, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || p != last || tok.empty()) {
    throw ParseError(where + ": not a number: '" + tok + "'");
  }
  if (!std::isfinite(v)) {
    throw ParseError(where + ": non-finite value: '" + tok + "'");
  }
  return v;
}

long parse_int(const std::string& tok, const std::string& where) {
  long v = 0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  auto [p, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || p != last || tok.empty()) {
    throw ParseError(where + ": not an integer: '" + tok + "'");
  }
  return v;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write " + path);
  return out;
}

void write_comments(std::ofstream& out, const std::vector<std::string>& comments) {
  for (const std::string& c : comments) {
    if (!c.empty() && c[0] == '#') {
      out << c << '\n';
    } else {
      out << "# " << c << '\n';
    }
  }
}

// Splits off the last `count` whitespace-separated fields; returns the
// remaining head (trailing space trimmed).  Used by records whose leading
// name field may itself contain spaces.
std::string rsplit_fields(const std::string& s, int count, std::vector<std::string>* fields,
                          const std::string& where) {
  std::string rest = s;
  std::vector<std::string> tail;
  for (int i = 0; i < count; ++i) {
    std::size_t pos = rest.find_last_of(' ');
    if (pos == std::string::npos) throw ParseError(where + ": too few fields");
    tail.push_back(rest.substr(pos + 1));
    rest.resize(pos);
    while (!rest.empty() && rest.back() == ' ') rest.pop_back();
  }
  fields->assign(tail.rbegin(), tail.rend());
  return rest;
}

}  // namespace

// ------------------------------------------------------------------ matrix --

MatrixData load_matrix(const std::string& path) {
  const std::vector<std::string> lines = read_lines(path);
  std::size_t i = 0;
  while (i < lines.size() && is_comment(lines[i])) ++i;
  if (i >= lines.size()) throw ParseError(path + ": missing header line");
  const std::string& header = lines[i];
  const char delim = header.find('\t') != std::string::npos ? '\t' : ',';
  MatrixData mat;
  mat.col_names = split(header, delim);
  std::unordered_set<std::string> seen;
  for (const std::string& name : mat.col_names) {
    if (name.empty()) {
      throw ParseError(path + ": line " + std::to_string(i + 1) + ": empty column name");
    }
    if (!seen.insert(name).second) {
      throw ParseError(path + ": line " + std::to_string(i + 1) + ": duplicate column name '" +
                       name + "'");
    }
  }
  const int cols = mat.cols();
  std::vector<std::vector<double>> by_col(static_cast<std::size_t>(cols));
  ++i;
  for (; i < lines.size(); ++i) {
    if (lines[i].empty()) {
      // Allow a trailing blank line only.
      for (std::size_t k = i; k < lines.size(); ++k) {
        if (!lines[k].empty()) {
          throw ParseError(path + ": line " + std::to_string(i + 1) + ": empty row");
        }
      }
      break;
    }
    const std::vector<std::string> toks = split(lines[i], delim);
    if (static_cast<int>(toks.size()) != cols) {
      throw ParseError(path + ": line " + std::to_string(i + 1) + ": expected " +
                       std::to_string(cols) + " fields, got " + std::to_string(toks.size()));
    }
    for (int c = 0; c < cols; ++c) {
      const std::string where =
          path + ": line " + std::to_string(i + 1) + ", column " + std::to_string(c + 1);
      by_col[static_cast<std::size_t>(c)].push_back(parse_double(toks[static_cast<std::size_t>(c)], where));
    }
    ++mat.rows;
  }
  if (mat.rows == 0) throw ParseError(path + ": no data rows");
  mat.values.reserve(static_cast<std::size_t>(mat.rows) * cols);
  for (int c = 0; c < cols; ++c) {
    mat.values.insert(mat.values.end(), by_col[static_cast<std::size_t>(c)].begin(),
                      by_col[static_cast<std::size_t>(c)].end());
  }
  return mat;
}

void save_matrix(const std::string& path, const MatrixData& mat, char delim,
                 const std::vector<std::string>& comments) {
  if (mat.cols() == 0) throw SpecError("matrix needs at least one column");
  if (static_cast<std::size_t>(mat.rows) * mat.cols() != mat.values.size()) {
    throw DimensionMismatch("matrix values do not match rows x cols");
  }
  std::ofstream out = open_out(path);
  write_comments(out, comments);
  for (int c = 0; c < mat.cols(); ++c) {
    if (c) out << delim;
    out << mat.col_names[static_cast<std::size_t>(c)];
  }
  out << '\n';
  for (int r = 0; r < mat.rows; ++r) {
    for (int c = 0; c < mat.cols(); ++c) {
      if (c) out << delim;
      out << fmt17(mat.at(r, c));
    }
    out << '\n';
  }
  if (!out) throw ParseError("write failed: " + path);
}

// ---------------------------------------------------------------- classmap --

ClassMap load_classmap(const std::string& path) {
  const std::vector<std::string> lines = read_lines(path);
  ClassMap map;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty() || is_comment(lines[i])) continue;
    const std::vector<std::string> toks = split(lines[i], '\t');
    if (toks.size() != 2 || toks[0].empty() || toks[1].empty()) {
      throw ParseError(path + ": line " + std::to_string(i + 1) +
                       ": expected 'feature<TAB>class'");
    }
    map.emplace_back(toks[0], toks[1]);
  }
  if (map.empty()) throw ParseError(path + ": no class map entries");
  return map;
}

void save_classmap(const std::string& path, const ClassMap& map,
                   const std::vector<std::string>& comments) {
  std::ofstream out = open_out(path);
  write_comments(out, comments);
  for (const auto& [feature, cls] : map) out << feature << '\t' << cls << '\n';
  if (!out) throw ParseError("write failed: " + path);
}

// ----------------------------------------------------------------- dataset --

Dataset assemble_dataset(const MatrixData& x, const MatrixData& y, const ClassMap* classmap) {
  if (x.rows != y.rows) {
    throw DimensionMismatch("design and response row counts differ: " +
                            std::to_string(x.rows) + " vs " + std::to_string(y.rows));
  }
  Dataset data;
  data.n = x.rows;
  data.m = x.cols();
  data.h = y.cols();
  data.x = x.values;
  data.y = y.values;
  data.feature_names = x.col_names;
  data.task_names = y.col_names;

  if (classmap != nullptr) {
    std::unordered_map<std::string, int> feature_index;
    for (int j = 0; j < data.m; ++j) feature_index.emplace(data.feature_names[static_cast<std::size_t>(j)], j);
    std::unordered_map<std::string, int> class_index;
    data.class_of.assign(static_cast<std::size_t>(data.m), -1);
    for (const auto& [feature, cls] : *classmap) {
      auto it = feature_index.find(feature);
      if (it == feature_index.end()) throw UnknownFeature(feature);
      if (data.class_of[static_cast<std::size_t>(it->second)] != -1) {
        throw DimensionMismatch("feature mapped twice in the class map: " + feature);
      }
      auto [cit, inserted] = class_index.emplace(cls, static_cast<int>(data.class_names.size()));
      if (inserted) {
        data.class_names.push_back(cls);
        data.class_sizes.push_back(0);
      }
      data.class_of[static_cast<std::size_t>(it->second)] = cit->second;
      ++data.class_sizes[static_cast<std::size_t>(cit->second)];
    }
    for (int j = 0; j < data.m; ++j) {
      if (data.class_of[static_cast<std::size_t>(j)] == -1) {
        throw DimensionMismatch("feature missing from the class map: " +
                                data.feature_names[static_cast<std::size_t>(j)]);
      }
    }
  }
  data.validate();
  return data;
}

Dataset load_dataset(const std::string& x_path, const std::string& y_path,
                     const std::string& classmap_path) {
  const MatrixData x = load_matrix(x_path);
  const MatrixData y = load_matrix(y_path);
  if (classmap_path.empty()) return assemble_dataset(x, y, nullptr);
  const ClassMap map = load_classmap(classmap_path);
  return assemble_dataset(x, y, &map);
}

// ------------------------------------------------------------------- model --

namespace {

constexpr const char* kModelVersion = "mdl-select model v1";
constexpr const char* kPriorVersion = "transfer-prior v1";

std::string tasks_field(const std::vector<int>& tasks) {
  std::string out = "tasks=";
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(tasks[i]);
  }
  return out;
}

std::string checksum_line(const std::vector<std::string>& payload) {
  std::string all;
  for (const std::string& line : payload) {
    all += line;
    all += '\n';
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "checksum %016llx",
                static_cast<unsigned long long>(detail::fnv1a64(all)));
  return buf;
}

}  // namespace

void save_model(const std::string& path, const SelectionModel& model,
                const std::vector<std::string>& comments) {
  if (model.scheme.empty()) throw SpecError("model has no scheme name");
  if (model.m < 1 || model.h < 1) throw SpecError("model has empty dimensions");
  std::vector<std::string> payload;
  payload.push_back(kModelVersion);
  payload.push_back("scheme " + model.scheme);
  payload.push_back("dims " + std::to_string(model.m) + " " + std::to_string(model.h));
  for (const LedgerEntry& e : model.ledger) {
    if (e.feature.empty()) throw SpecError("ledger entry has no feature name");
    if (e.tasks.empty()) throw SpecError("ledger entry has no tasks");
    if (!std::is_sorted(e.tasks.begin(), e.tasks.end())) {
      throw SpecError("ledger tasks must be ascending");
    }
    payload.push_back("add " + e.feature + " " + tasks_field(e.tasks) + " dSE=" +
                      fmt17(e.d_se) + " dSM=" + fmt17(e.d_sm));
  }
  for (const auto& [key, value] : model.coef) {
    payload.push_back("coef " + key.first + " " + std::to_string(key.second) + " " +
                      fmt17(value));
  }
  payload.push_back("total " + fmt17(model.total_tdl));

  std::ofstream out = open_out(path);
  out << payload[0] << '\n';
  write_comments(out, comments);
  for (std::size_t i = 1; i < payload.size(); ++i) out << payload[i] << '\n';
  out << checksum_line(payload) << '\n';
  if (!out) throw ParseError("write failed: " + path);
}

SelectionModel load_model(const std::string& path) {
  const std::vector<std::string> lines = read_lines(path);
  std::size_t i = 0;
  while (i < lines.size() && is_comment(lines[i])) ++i;
  if (i >= lines.size() || lines[i] != kModelVersion) {
    throw VersionMismatch(path + ": expected '" + std::string(kModelVersion) + "'");
  }
  std::vector<std::string> payload;
  payload.push_back(lines[i]);
  ++i;

  SelectionModel model;
  bool have_scheme = false, have_dims = false, have_total = false, have_checksum = false;
  std::string stored_checksum;
  for (; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    if (line.empty() || is_comment(line)) continue;
    const std::string where = path + ": line " + std::to_string(i + 1);
    if (line.rfind("checksum ", 0) == 0) {
      stored_checksum = line;
      have_checksum = true;
      for (std::size_t k = i + 1; k < lines.size(); ++k) {
        if (!lines[k].empty() && !is_comment(lines[k])) {
          throw ParseError(path + ": content after the checksum line");
        }
      }
      break;
    }
    payload.push_back(line);
    if (line.rfind("scheme ", 0) == 0) {
      if (have_scheme) throw ParseError(where + ": duplicate scheme line");
      model.scheme = line.substr(7);
      if (model.scheme.empty()) throw ParseError(where + ": empty scheme");
      have_scheme = true;
    } else if (line.rfind("dims ", 0) == 0) {
      if (have_dims) throw ParseError(where + ": duplicate dims line");
      const std::vector<std::string> toks = split(line.substr(5), ' ');
      if (toks.size() != 2) throw ParseError(where + ": dims needs m and h");
      model.m = static_cast<int>(parse_int(toks[0], where));
      model.h = static_cast<int>(parse_int(toks[1], where));
      if (model.m < 1 || model.h < 1) throw ParseError(where + ": dims must be positive");
      have_dims = true;
    } else if (line.rfind("add ", 0) == 0) {
      if (!have_dims) throw ParseError(where + ": add record before dims");
      std::vector<std::string> fields;
      const std::string name = rsplit_fields(line.substr(4), 3, &fields, where);
      if (name.empty()) throw ParseError(where + ": add record has no feature name");
      if (fields[0].rfind("tasks=", 0) != 0 || fields[1].rfind("dSE=", 0) != 0 ||
          fields[2].rfind("dSM=", 0) != 0) {
        throw ParseError(where + ": add record needs tasks=, dSE=, dSM=");
      }
      LedgerEntry e;
      e.feature = name;
      for (const std::string& tok : split(fields[0].substr(6), ',')) {
        const long t = parse_int(tok, where);
        if (t < 0 || t >= model.h) throw ParseError(where + ": task out of range");
        if (!e.tasks.empty() && t <= e.tasks.back()) {
          throw ParseError(where + ": tasks must be ascending");
        }
        e.tasks.push_back(static_cast<int>(t));
      }
      if (e.tasks.empty()) throw ParseError(where + ": empty task list");
      e.d_se = parse_double(fields[1].substr(4), where);
      e.d_sm = parse_double(fields[2].substr(4), where);
      model.ledger.push_back(std::move(e));
    } else if (line.rfind("coef ", 0) == 0) {
      if (!have_dims) throw ParseError(where + ": coef record before dims");
      std::vector<std::string> fields;
      const std::string name = rsplit_fields(line.substr(5), 2, &fields, where);
      if (name.empty()) throw ParseError(where + ": coef record has no feature name");
      const long t = parse_int(fields[0], where);
      if (t < 0 || t >= model.h) throw ParseError(where + ": task out of range");
      const double v = parse_double(fields[1], where);
      if (!model.coef.emplace(std::make_pair(name, static_cast<int>(t)), v).second) {
        throw ParseError(where + ": duplicate coefficient");
      }
    } else if (line.rfind("total ", 0) == 0) {
      if (have_total) throw ParseError(where + ": duplicate total line");
      model.total_tdl = parse_double(line.substr(6), where);
      have_total = true;
    } else {
      throw ParseError(where + ": unrecognized record '" + line + "'");
    }
  }
  if (!have_checksum) throw ChecksumMismatch(path + ": missing checksum line");
  if (!have_scheme || !have_dims || !have_total) {
    throw ParseError(path + ": incomplete model file");
  }
  if (stored_checksum != checksum_line(payload)) {
    throw ChecksumMismatch(path + ": content hash does not match");
  }
  return model;
}

// ------------------------------------------------------------------- prior --

void save_prior(const std::string& path, const TransferPrior& prior,
                const std::vector<std::string>& comments) {
  if (prior.t < 0) throw SpecError("prior has negative training count");
  std::ofstream out = open_out(path);
  out << kPriorVersion << '\n';
  write_comments(out, comments);
  out << "t " << prior.t << '\n';
  auto hyper = [&](double v) -> std::string { return v < 0.0 ? "auto" : fmt17(v); };
  out << "hyper " << hyper(prior.hyper_a) << ' ' << hyper(prior.hyper_b) << ' '
      << hyper(prior.hyper_c) << ' ' << hyper(prior.hyper_d) << '\n';
  for (const auto& [name, kl] : prior.class_counts) {
    if (name.find('/') != std::string::npos) {
      throw SpecError("class names must not contain '/': " + name);
    }
    out << "class " << name << ' ' << kl.first << ' ' << kl.second << '\n';
  }
  for (const auto& [name, su] : prior.feature_counts) {
    auto cls = prior.feature_class.find(name);
    if (cls == prior.feature_class.end()) {
      throw SpecError("prior feature has no class recorded: " + name);
    }
    if (cls->second.find('/') != std::string::npos) {
      throw SpecError("class names must not contain '/': " + cls->second);
    }
    out << "feature " << cls->second << '/' << name << ' ' << su.first << ' '
        << su.second << '\n';
  }
  if (!out) throw ParseError("write failed: " + path);
}

TransferPrior load_prior(const std::string& path) {
  const std::vector<std::string> lines = read_lines(path);
  std::size_t i = 0;
  while (i < lines.size() && is_comment(lines[i])) ++i;
  if (i >= lines.size() || lines[i] != kPriorVersion) {
    throw VersionMismatch(path + ": expected '" + std::string(kPriorVersion) + "'");
  }
  ++i;
  TransferPrior prior;
  bool have_t = false, have_hyper = false;
  for (; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    if (line.empty() || is_comment(line)) continue;
    const std::string where = path + ": line " + std::to_string(i + 1);
    if (line.rfind("t ", 0) == 0) {
      if (have_t) throw ParseError(where + ": duplicate t line");
      const long t = parse_int(line.substr(2), where);
      if (t < 0) throw ParseError(where + ": t must be >= 0");
      prior.t = static_cast<int>(t);
      have_t = true;
    } else if (line.rfind("hyper ", 0) == 0) {
      if (have_hyper) throw ParseError(where + ": duplicate hyper line");
      const std::vector<std::string> toks = split(line.substr(6), ' ');
      if (toks.size() != 4) throw ParseError(where + ": hyper needs a b c d");
      auto val = [&](const std::string& tok) -> double {
        return tok == "auto" ? -1.0 : parse_double(tok, where);
      };
      prior.hyper_a = val(toks[0]);
      prior.hyper_b = val(toks[1]);
      prior.hyper_c = val(toks[2]);
      prior.hyper_d = val(toks[3]);
      have_hyper = true;
    } else if (line.rfind("class ", 0) == 0) {
      std::vector<std::string> fields;
      const std::string name = rsplit_fields(line.substr(6), 2, &fields, where);
      if (name.empty()) throw ParseError(where + ": class record has no name");
      const long k = parse_int(fields[0], where);
      const long l = parse_int(fields[1], where);
      if (k < 0 || l < 0) throw ParseError(where + ": negative counts");
      if (!prior.class_counts.emplace(name, std::make_pair(static_cast<int>(k),
                                                           static_cast<int>(l))).second) {
        throw ParseError(where + ": duplicate class record '" + name + "'");
      }
    } else if (line.rfind("feature ", 0) == 0) {
      std::vector<std::string> fields;
      const std::string key = rsplit_fields(line.substr(8), 2, &fields, where);
      const std::size_t slash = key.find('/');
      if (slash == std::string::npos || slash == 0 || slash + 1 >= key.size()) {
        throw ParseError(where + ": feature record needs 'class/name'");
      }
      const std::string cls = key.substr(0, slash);
      const std::string name = key.substr(slash + 1);
      const long s = parse_int(fields[0], where);
      const long u = parse_int(fields[1], where);
      if (s < 0 || u < 0) throw ParseError(where + ": negative counts");
      if (!prior.feature_counts.emplace(name, std::make_pair(static_cast<int>(s),
                                                             static_cast<int>(u))).second) {
        throw ParseError(where + ": duplicate feature record '" + name + "'");
      }
      prior.feature_class[name] = cls;
    } else {
      throw ParseError(where + ": unrecognized record '" + line + "'");
    }
  }
  if (!have_t) throw ParseError(path + ": missing t line");
  for (const auto& [name, kl] : prior.class_counts) {
    if (kl.first + kl.second != prior.t) {
      throw ParseError(path + ": class counts for '" + name + "' do not sum to t");
    }
  }
  for (const auto& [name, su] : prior.feature_counts) {
    if (su.first + su.second != prior.t) {
      throw ParseError(path + ": feature counts for '" + name + "' do not sum to t");
    }
  }
  return prior;
}

}  // namespace mdlsel::io
