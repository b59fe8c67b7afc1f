//
// Project MolStory - Copyright 2026 MolStory Developers.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLSTORY_DATASET_HPP
#define MOLSTORY_DATASET_HPP

#include <array>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "molstory/canonical.hpp"
#include "molstory/rng.hpp"
#include "molstory/smiles.hpp"

namespace molstory {

struct DatasetRecord {
  std::string smiles;
  double log_solubility = 0.0;
  double redox_potential = 0.0;
  double sa_score = 0.0;

  std::array<double, 3> conditions() const {
    return {log_solubility, redox_potential, sa_score};
  }
};

struct IngestResult {
  std::vector<DatasetRecord> records;
  int skipped = 0;
};

/// Reads a CSV with header columns smiles,logS,redox,sascore (any order,
/// extra columns ignored). Rows whose SMILES do not parse are skipped with a
/// warning on standard error.
inline IngestResult ingest_csv_stream(std::istream& in,
                                      std::ostream& warnings = std::cerr) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("empty CSV file");
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true) {
      std::size_t next = s.find(',', pos);
      if (next == std::string::npos) {
        out.push_back(s.substr(pos));
        break;
      }
      out.push_back(s.substr(pos, next - pos));
      pos = next + 1;
    }
    return out;
  };
  if (!line.empty() && line.back() == '\r') line.pop_back();
  auto header = split(line);
  int col_smiles = -1, col_logs = -1, col_redox = -1, col_sa = -1;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == "smiles") col_smiles = static_cast<int>(i);
    if (header[i] == "logS") col_logs = static_cast<int>(i);
    if (header[i] == "redox") col_redox = static_cast<int>(i);
    if (header[i] == "sascore") col_sa = static_cast<int>(i);
  }
  if (col_smiles < 0 || col_logs < 0 || col_redox < 0 || col_sa < 0)
    throw FormatError("CSV must have columns smiles,logS,redox,sascore");

  IngestResult result;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split(line);
    if (static_cast<int>(cells.size()) <= std::max({col_smiles, col_logs,
                                                    col_redox, col_sa})) {
      warnings << "warning: line " << lineno << ": too few columns, skipped\n";
      ++result.skipped;
      continue;
    }
    DatasetRecord rec;
    rec.smiles = cells[col_smiles];
    try {
      rec.log_solubility = std::stod(cells[col_logs]);
      rec.redox_potential = std::stod(cells[col_redox]);
      rec.sa_score = std::stod(cells[col_sa]);
    } catch (const std::exception&) {
      warnings << "warning: line " << lineno << ": bad number, skipped\n";
      ++result.skipped;
      continue;
    }
    if (!std::isfinite(rec.log_solubility) ||
        !std::isfinite(rec.redox_potential) || !std::isfinite(rec.sa_score)) {
      warnings << "warning: line " << lineno << ": non-finite value, skipped\n";
      ++result.skipped;
      continue;
    }
    try {
      (void)parse_smiles(rec.smiles);
    } catch (const std::exception& e) {
      warnings << "warning: line " << lineno << ": " << e.what()
               << ", skipped\n";
      ++result.skipped;
      continue;
    }
    result.records.push_back(std::move(rec));
  }
  return result;
}

inline IngestResult ingest_csv(const std::string& path,
                               std::ostream& warnings = std::cerr) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open: " + path);
  return ingest_csv_stream(in, warnings);
}

/// Parsed corpus in content-sorted order: downstream results do not depend
/// on the row order of the input file.
struct Corpus {
  std::vector<DatasetRecord> records;
  std::vector<MolGraph> graphs;
  std::vector<std::string> canonical;

  static Corpus from_records(std::vector<DatasetRecord> recs) {
    struct Row {
      DatasetRecord rec;
      MolGraph graph;
      std::string canonical;
    };
    std::vector<Row> rows;
    for (auto& r : recs) {
      Row row;
      row.graph = parse_smiles(r.smiles);
      row.canonical = write_canonical_smiles(row.graph);
      row.rec = std::move(r);
      rows.push_back(std::move(row));
    }
    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
      if (a.canonical != b.canonical) return a.canonical < b.canonical;
      return a.rec.smiles < b.rec.smiles;
    });
    Corpus c;
    for (auto& row : rows) {
      c.records.push_back(std::move(row.rec));
      c.graphs.push_back(std::move(row.graph));
      c.canonical.push_back(std::move(row.canonical));
    }
    return c;
  }

  int size() const { return static_cast<int>(records.size()); }
};

/// Seeded index split: validation carved out first, then train/test by
/// fraction. Indices refer to the sorted corpus, so a reshuffled input file
/// yields the same split.
struct Split {
  std::vector<int> train, test, validation;
};

inline Split split_corpus(const Corpus& corpus, double train_fraction,
                          int validation_count, std::uint64_t seed) {
  std::vector<int> idx(corpus.size());
  for (int i = 0; i < corpus.size(); ++i) idx[i] = i;
  Rng rng(Rng::stream(seed, 0x5b17));
  rng.shuffle(idx);
  Split s;
  int nval = std::min<int>(validation_count, corpus.size() / 5);
  int remaining = corpus.size() - nval;
  int ntrain = static_cast<int>(std::floor(train_fraction * remaining));
  for (int i = 0; i < nval; ++i) s.validation.push_back(idx[i]);
  for (int i = nval; i < nval + ntrain; ++i) s.train.push_back(idx[i]);
  for (int i = nval + ntrain; i < corpus.size(); ++i) s.test.push_back(idx[i]);
  return s;
}

/// Per-axis mean and standard deviation over a subset of records.
struct ConditionStats {
  std::array<double, 3> mean{0.0, 0.0, 0.0};
  std::array<double, 3> stddev{1.0, 1.0, 1.0};

  std::array<double, 3> standardize(const std::array<double, 3>& x) const {
    std::array<double, 3> out;
    for (int d = 0; d < 3; ++d) out[d] = (x[d] - mean[d]) / stddev[d];
    return out;
  }
};

inline ConditionStats condition_stats(const Corpus& corpus,
                                      const std::vector<int>& subset) {
  ConditionStats st;
  if (subset.empty()) return st;
  for (int i : subset) {
    auto c = corpus.records[i].conditions();
    for (int d = 0; d < 3; ++d) st.mean[d] += c[d];
  }
  for (int d = 0; d < 3; ++d) st.mean[d] /= static_cast<double>(subset.size());
  std::array<double, 3> var{0.0, 0.0, 0.0};
  for (int i : subset) {
    auto c = corpus.records[i].conditions();
    for (int d = 0; d < 3; ++d) {
      double diff = c[d] - st.mean[d];
      var[d] += diff * diff;
    }
  }
  for (int d = 0; d < 3; ++d) {
    st.stddev[d] = std::sqrt(var[d] / static_cast<double>(subset.size()));
    if (st.stddev[d] < 1e-12) st.stddev[d] = 1.0;
  }
  return st;
}

}  // namespace molstory

#endif  // MOLSTORY_DATASET_HPP
