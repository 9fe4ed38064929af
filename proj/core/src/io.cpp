#include "dygraf/io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "dygraf/errors.hpp"

namespace dygraf {

namespace fs = std::filesystem;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_double(const std::string& text) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end == text.c_str() || errno == ERANGE) {
    throw IoError("parse_double: cannot parse '" + text + "'");
  }
  return v;
}

void atomic_write(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("atomic_write: cannot open " + tmp.string());
    out << content;
    if (!out) throw IoError("atomic_write: write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("atomic_write: rename to " + path.string() + " failed: " + ec.message());
}

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> fields;
  std::string::size_type start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    if (pos == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

std::vector<std::string> lines_of(const std::string& content) {
  std::vector<std::string> lines;
  std::string::size_type start = 0;
  while (start < content.size()) {
    auto pos = content.find('\n', start);
    if (pos == std::string::npos) pos = content.size();
    lines.push_back(content.substr(start, pos - start));
    start = pos + 1;
  }
  return lines;
}

std::string opt_field(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

std::optional<double> parse_opt(const std::string& field) {
  if (field.empty() || field == "-") return std::nullopt;
  return parse_double(field);
}

}  // namespace

void write_matrix_tsv(const fs::path& path, const Matrix& m) {
  std::string out;
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out += '\t';
      out += format_double(m(i, j));
    }
    out += '\n';
  }
  atomic_write(path, out);
}

Matrix read_matrix_tsv(const fs::path& path) {
  const auto lines = lines_of(read_file(path));
  std::vector<std::vector<double>> rows;
  for (const std::string& line : lines) {
    if (line.empty()) continue;
    std::vector<double> row;
    for (const std::string& f : split(line, '\t')) row.push_back(parse_double(f));
    if (!rows.empty() && rows.front().size() != row.size()) {
      throw DimensionError(path.string() + ": ragged rows");
    }
    rows.push_back(std::move(row));
  }
  Matrix m(static_cast<Index>(rows.size()),
           rows.empty() ? 0 : static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  }
  return m;
}

void write_triplets_tsv(const fs::path& path, const Matrix& m) {
  std::string out;
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = i; j < m.cols(); ++j) {
      if (m(i, j) != 0.0) {
        out += std::to_string(i);
        out += '\t';
        out += std::to_string(j);
        out += '\t';
        out += format_double(m(i, j));
        out += '\n';
      }
    }
  }
  atomic_write(path, out);
}

Matrix read_triplets_tsv(const fs::path& path, Index n) {
  Matrix m = Matrix::Zero(n, n);
  for (const std::string& line : lines_of(read_file(path))) {
    if (line.empty()) continue;
    const auto fields = split(line, '\t');
    if (fields.size() != 3) {
      throw DimensionError(path.string() + ": triplet line needs 3 fields, got '" + line + "'");
    }
    const long i = std::stol(fields[0]);
    const long j = std::stol(fields[1]);
    if (i < 0 || j < 0 || i >= n || j >= n || i > j) {
      throw DimensionError(path.string() + ": bad indices (" + fields[0] + "," + fields[1] +
                           ") for n=" + std::to_string(n));
    }
    const double v = parse_double(fields[2]);
    m(i, j) = v;
    m(j, i) = v;
  }
  return m;
}

void write_dataset(const fs::path& dir, const GraphSequence& graphs, const DatasetMeta& meta,
                   const LatentTrace* latents) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("write_dataset: cannot create " + dir.string() + ": " + ec.message());

  std::string meta_text;
  meta_text += "n\t" + std::to_string(meta.n) + "\n";
  meta_text += "T\t" + std::to_string(meta.T) + "\n";
  if (meta.q > 0) meta_text += "q\t" + std::to_string(meta.q) + "\n";
  meta_text += "monotone\t" + std::string(meta.monotone ? "1" : "0") + "\n";
  meta_text += "rng\t" + meta.rng_id + "\n";
  meta_text += "seed\t" + std::to_string(meta.seed) + "\n";
  atomic_write(dir / "meta", meta_text);

  for (Index t = 1; t <= graphs.horizon(); ++t) {
    write_triplets_tsv(dir / ("A_" + std::to_string(t) + ".tsv"), graphs.at(t));
  }
  if (latents != nullptr) {
    for (std::size_t t = 0; t < latents->u.size(); ++t) {
      write_matrix_tsv(dir / ("latent_U_" + std::to_string(t) + ".tsv"), latents->u[t]);
      write_matrix_tsv(dir / ("latent_V_" + std::to_string(t) + ".tsv"), latents->v[t]);
    }
  }
}

Dataset read_dataset(const fs::path& dir) {
  const fs::path meta_path = dir / "meta";
  DatasetMeta meta;
  std::map<std::string, std::string> kv;
  for (const std::string& line : lines_of(read_file(meta_path))) {
    if (line.empty()) continue;
    const auto fields = split(line, '\t');
    if (fields.size() != 2) throw IoError(meta_path.string() + ": bad line '" + line + "'");
    kv[fields[0]] = fields[1];
  }
  auto need = [&](const char* key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end()) throw IoError(meta_path.string() + ": missing key '" + key + "'");
    return it->second;
  };
  meta.n = std::stol(need("n"));
  meta.T = std::stol(need("T"));
  meta.monotone = need("monotone") == "1";
  meta.rng_id = kv.count("rng") ? kv["rng"] : "";
  meta.seed = kv.count("seed") ? std::stoull(kv["seed"]) : 0;
  meta.q = kv.count("q") ? std::stol(kv["q"]) : 0;
  if (meta.n < 1 || meta.T < 1) {
    throw DimensionError(meta_path.string() + ": n and T must be >= 1");
  }

  std::vector<SymNonNegMatrix> snapshots;
  snapshots.reserve(static_cast<std::size_t>(meta.T));
  for (Index t = 1; t <= meta.T; ++t) {
    const fs::path p = dir / ("A_" + std::to_string(t) + ".tsv");
    snapshots.push_back(SymNonNegMatrix(read_triplets_tsv(p, meta.n)));
  }
  Dataset dataset{GraphSequence(std::move(snapshots), meta.monotone), meta, std::nullopt,
                  std::nullopt};

  if (fs::exists(dir / "X_1.tsv")) {
    FeatureSeries x;
    for (Index t = 1; t <= meta.T; ++t) {
      const fs::path p = dir / ("X_" + std::to_string(t) + ".tsv");
      if (!fs::exists(p)) {
        throw IoError("read_dataset: " + p.string() + " missing while X_1.tsv exists");
      }
      Matrix frame = read_matrix_tsv(p);
      if (frame.rows() != meta.n || (meta.q > 0 && frame.cols() != meta.q)) {
        throw DimensionError(p.string() + ": feature frame is " + std::to_string(frame.rows()) +
                             "x" + std::to_string(frame.cols()) + ", meta wants n=" +
                             std::to_string(meta.n) + " q=" + std::to_string(meta.q));
      }
      x.frames.push_back(std::move(frame));
    }
    dataset.features = std::move(x);
  }
  if (fs::exists(dir / "Omega.tsv")) {
    Matrix omega = read_matrix_tsv(dir / "Omega.tsv");
    if (omega.rows() != meta.n) {
      throw DimensionError((dir / "Omega.tsv").string() + ": row count differs from n");
    }
    dataset.omega = std::move(omega);
  }
  return dataset;
}

void write_predictor_tsv(const fs::path& path, const PredictorTensor& w) {
  std::string out = std::to_string(w.node_count()) + "\t" + std::to_string(w.input_dim()) +
                    "\t" + std::to_string(w.output_dim()) + "\n";
  for (const Matrix& block : w.blocks) {
    for (Index r = 0; r < block.rows(); ++r) {
      for (Index c = 0; c < block.cols(); ++c) {
        if (c > 0) out += '\t';
        out += format_double(block(r, c));
      }
      out += '\n';
    }
  }
  atomic_write(path, out);
}

PredictorTensor read_predictor_tsv(const fs::path& path) {
  const auto lines = lines_of(read_file(path));
  if (lines.empty()) throw IoError(path.string() + ": empty predictor file");
  const auto header = split(lines[0], '\t');
  if (header.size() != 3) throw IoError(path.string() + ": header needs n, d, q");
  const Index n = std::stol(header[0]);
  const Index d = std::stol(header[1]);
  const Index q = std::stol(header[2]);
  PredictorTensor w = PredictorTensor::zero(n, d, q);
  std::size_t row = 1;
  for (Index i = 0; i < n; ++i) {
    for (Index r = 0; r < d; ++r, ++row) {
      if (row >= lines.size()) throw DimensionError(path.string() + ": truncated predictor file");
      const auto fields = split(lines[row], '\t');
      if (static_cast<Index>(fields.size()) != q) {
        throw DimensionError(path.string() + ": row " + std::to_string(row) + " has " +
                             std::to_string(fields.size()) + " fields, expected " +
                             std::to_string(q));
      }
      for (Index c = 0; c < q; ++c) {
        w.blocks[static_cast<std::size_t>(i)](r, c) = parse_double(fields[static_cast<std::size_t>(c)]);
      }
    }
  }
  return w;
}

namespace {

constexpr const char* kTraceHeader =
    "iteration,j1_fit,j1_ridge,j2_nuclear,j2_prox,j3_coupling,j4_laplacian,total,"
    "grad_norm,step_size,accepted,rejected_trials,phase,w_norm,s_min_entry,"
    "val_feature_error,val_graph_error";

}  // namespace

void write_trace_csv(const fs::path& path, const Trace& trace) {
  std::string out = kTraceHeader;
  out += '\n';
  for (const TraceRecord& r : trace.records) {
    out += std::to_string(r.iteration);
    out += ',';
    out += format_double(r.objective.j1_fit) + "," + format_double(r.objective.j1_ridge) + "," +
           format_double(r.objective.j2_nuclear) + "," + format_double(r.objective.j2_prox) +
           "," + format_double(r.objective.j3_coupling) + "," +
           format_double(r.objective.j4_laplacian) + "," + format_double(r.objective.total);
    out += ',';
    out += format_double(r.grad_norm) + "," + format_double(r.step_size);
    out += ',';
    out += r.accepted ? '1' : '0';
    out += ',';
    out += std::to_string(r.rejected_trials);
    out += ',';
    out += std::to_string(static_cast<int>(r.phase));
    out += ',';
    out += format_double(r.w_norm) + "," + format_double(r.s_min_entry);
    out += ',';
    out += opt_field(r.val_feature_error);
    out += ',';
    out += opt_field(r.val_graph_error);
    out += '\n';
  }
  atomic_write(path, out);
}

Trace read_trace_csv(const fs::path& path) {
  const auto lines = lines_of(read_file(path));
  if (lines.empty() || lines[0] != kTraceHeader) {
    throw IoError(path.string() + ": missing or unexpected trace header");
  }
  Trace trace;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    if (lines[li].empty()) continue;
    const auto f = split(lines[li], ',');
    if (f.size() != 17) throw IoError(path.string() + ": bad trace row '" + lines[li] + "'");
    TraceRecord r;
    r.iteration = std::stoi(f[0]);
    r.objective.j1_fit = parse_double(f[1]);
    r.objective.j1_ridge = parse_double(f[2]);
    r.objective.j2_nuclear = parse_double(f[3]);
    r.objective.j2_prox = parse_double(f[4]);
    r.objective.j3_coupling = parse_double(f[5]);
    r.objective.j4_laplacian = parse_double(f[6]);
    r.objective.total = parse_double(f[7]);
    r.grad_norm = parse_double(f[8]);
    r.step_size = parse_double(f[9]);
    r.accepted = f[10] == "1";
    r.rejected_trials = std::stoi(f[11]);
    r.phase = static_cast<FitPhase>(std::stoi(f[12]));
    r.w_norm = parse_double(f[13]);
    r.s_min_entry = parse_double(f[14]);
    r.val_feature_error = parse_opt(f[15]);
    r.val_graph_error = parse_opt(f[16]);
    trace.records.push_back(std::move(r));
  }
  return trace;
}

namespace {

constexpr const char* kTableHeader =
    "method,feature_mean,feature_std,feature_stderr,graph_mean,graph_std,graph_stderr";

Method method_from_name(const std::string& name) {
  for (Method m : all_methods()) {
    if (method_name(m) == name) return m;
  }
  throw IoError("unknown method name '" + name + "'");
}

}  // namespace

void write_table_csv(const fs::path& path, const BootstrapTable& table) {
  std::string out = kTableHeader;
  out += '\n';
  for (const TableRow& row : table.rows) {
    out += method_name(row.method);
    out += ',';
    out += opt_field(row.feature_mean) + "," + opt_field(row.feature_std) + "," +
           opt_field(row.feature_stderr) + "," + opt_field(row.graph_mean) + "," +
           opt_field(row.graph_std) + "," + opt_field(row.graph_stderr);
    out += '\n';
  }
  atomic_write(path, out);
}

BootstrapTable read_table_csv(const fs::path& path) {
  const auto lines = lines_of(read_file(path));
  if (lines.empty() || lines[0] != kTableHeader) {
    throw IoError(path.string() + ": missing or unexpected table header");
  }
  BootstrapTable table;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    if (lines[li].empty()) continue;
    const auto f = split(lines[li], ',');
    if (f.size() != 7) throw IoError(path.string() + ": bad table row '" + lines[li] + "'");
    TableRow row;
    row.method = method_from_name(f[0]);
    row.feature_mean = parse_opt(f[1]);
    row.feature_std = parse_opt(f[2]);
    row.feature_stderr = parse_opt(f[3]);
    row.graph_mean = parse_opt(f[4]);
    row.graph_std = parse_opt(f[5]);
    row.graph_stderr = parse_opt(f[6]);
    table.rows.push_back(row);
  }
  return table;
}

void write_seed_records_csv(const fs::path& path, const std::vector<SeedRecord>& records) {
  std::string out = "seed,method,feature_error,graph_error\n";
  for (const SeedRecord& r : records) {
    out += std::to_string(r.seed) + "," + method_name(r.method) + "," +
           opt_field(r.feature_error) + "," + opt_field(r.graph_error) + "\n";
  }
  atomic_write(path, out);
}

void write_cv_surface_csv(const fs::path& path, const std::string& name,
                          const std::vector<CvPoint>& surface) {
  std::string out = name + ",mean_error\n";
  for (const CvPoint& p : surface) {
    out += format_double(p.value) + "," + format_double(p.mean_error) + "\n";
  }
  atomic_write(path, out);
}

void write_cv_stage2_csv(const fs::path& path, const std::vector<CvStage2Point>& surface) {
  std::string out = "nu,lambda,feature_error,graph_error\n";
  for (const CvStage2Point& p : surface) {
    out += format_double(p.nu) + "," + format_double(p.lambda) + "," +
           format_double(p.feature_error) + "," + format_double(p.graph_error) + "\n";
  }
  atomic_write(path, out);
}

}  // namespace dygraf
