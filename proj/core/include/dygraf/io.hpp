#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "dygraf/evaluation.hpp"
#include "dygraf/graph_sequence.hpp"
#include "dygraf/objective.hpp"
#include "dygraf/optimizer.hpp"
#include "dygraf/synthetic.hpp"

namespace dygraf {

/// Doubles are written with 17 significant digits so every file read back
/// reproduces the exact value.
std::string format_double(double v);
double parse_double(const std::string& text);

/// Writes content to path atomically (temp file, then rename).
void atomic_write(const std::filesystem::path& path, const std::string& content);

struct DatasetMeta {
  Index n = 0;
  Index T = 0;
  Index q = 0;  // 0 when no feature files are present
  bool monotone = false;
  std::string rng_id;
  std::uint64_t seed = 0;
};

/// Dataset directory layout: a `meta` key-value file, sparse upper-triangle
/// triplet files A_<t>.tsv (0-based i <= j, missing entries zero), optional
/// dense X_<t>.tsv feature files and an optional Omega.tsv map.
void write_dataset(const std::filesystem::path& dir, const GraphSequence& graphs,
                   const DatasetMeta& meta, const LatentTrace* latents = nullptr);

struct Dataset {
  GraphSequence graphs;
  DatasetMeta meta;
  std::optional<FeatureSeries> features;
  std::optional<Matrix> omega;
};

Dataset read_dataset(const std::filesystem::path& dir);

void write_matrix_tsv(const std::filesystem::path& path, const Matrix& m);
Matrix read_matrix_tsv(const std::filesystem::path& path);

void write_triplets_tsv(const std::filesystem::path& path, const Matrix& m);
Matrix read_triplets_tsv(const std::filesystem::path& path, Index n);

/// First line carries n, d, q; the n*d following rows hold the stacked blocks.
void write_predictor_tsv(const std::filesystem::path& path, const PredictorTensor& w);
PredictorTensor read_predictor_tsv(const std::filesystem::path& path);

void write_trace_csv(const std::filesystem::path& path, const Trace& trace);
Trace read_trace_csv(const std::filesystem::path& path);

void write_table_csv(const std::filesystem::path& path, const BootstrapTable& table);
BootstrapTable read_table_csv(const std::filesystem::path& path);

void write_seed_records_csv(const std::filesystem::path& path,
                            const std::vector<SeedRecord>& records);

void write_cv_surface_csv(const std::filesystem::path& path, const std::string& name,
                          const std::vector<CvPoint>& surface);
void write_cv_stage2_csv(const std::filesystem::path& path,
                         const std::vector<CvStage2Point>& surface);

}  // namespace dygraf
