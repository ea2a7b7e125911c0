#include "fngw/json_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace fngw {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ValidationError(where + ": " + what);
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& j, Eigen::Index rows, Eigen::Index cols,
                        const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array of rows");
  if (static_cast<Eigen::Index>(j.size()) != rows)
    fail(where, "expected " + std::to_string(rows) + " rows, got " + std::to_string(j.size()));
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& row = j[i];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      fail(where + "/" + std::to_string(i), "expected a row of length " + std::to_string(cols));
    for (Eigen::Index c = 0; c < cols; ++c) {
      if (!row[c].is_number()) fail(where + "/" + std::to_string(i), "non-numeric entry");
      m(i, c) = row[c].get<double>();
    }
  }
  return m;
}

}  // namespace

json graph_to_json(const Graph& g) {
  const int n = g.node_count();
  json j;
  j["n"] = n;
  j["node_features"] = g.feature_dim() > 0 ? matrix_to_json(g.node_features) : json::array();
  j["structure"] = matrix_to_json(g.structure);
  json dense = json::array();
  if (g.channel_count() > 0) {
    for (int i = 0; i < n; ++i) {
      json row = json::array();
      for (int jj = 0; jj < n; ++jj) {
        json slice = json::array();
        for (int t = 0; t < g.channel_count(); ++t) slice.push_back(g.edge_channels[t](i, jj));
        row.push_back(std::move(slice));
      }
      dense.push_back(std::move(row));
    }
  }
  j["edge_features"] = json{{"dense", std::move(dense)}};
  j["weights"] = json::array();
  for (int i = 0; i < n; ++i) j["weights"].push_back(g.weights(i));
  return j;
}

Graph graph_from_json(const json& j, const std::string& where) {
  if (!j.is_object()) fail(where, "graph must be a JSON object");
  if (!j.contains("n") || !j["n"].is_number_integer()) fail(where + "/n", "missing node count");
  const int n = j["n"].get<int>();
  if (n < 1) fail(where + "/n", "node count must be >= 1");

  Graph g;
  if (!j.contains("structure")) fail(where + "/structure", "missing");
  g.structure = matrix_from_json(j["structure"], n, n, where + "/structure");

  if (j.contains("node_features") && !j["node_features"].empty()) {
    const json& nf = j["node_features"];
    if (!nf.is_array() || !nf[0].is_array()) fail(where + "/node_features", "expected [[f64]]");
    const auto cols = static_cast<Eigen::Index>(nf[0].size());
    g.node_features = matrix_from_json(nf, n, cols, where + "/node_features");
  } else {
    g.node_features.resize(n, 0);
  }

  if (j.contains("edge_features")) {
    const json& ef = j["edge_features"];
    if (!ef.is_object()) fail(where + "/edge_features", "expected an object");
    if (ef.contains("dense")) {
      const json& dense = ef["dense"];
      if (!dense.is_array()) fail(where + "/edge_features/dense", "expected an array");
      if (!dense.empty()) {
        if (static_cast<int>(dense.size()) != n)
          fail(where + "/edge_features/dense", "expected " + std::to_string(n) + " rows");
        const json& first = dense[0];
        if (!first.is_array() || first.empty() || !first[0].is_array())
          fail(where + "/edge_features/dense", "expected [i][j][t] nesting");
        const int channels = static_cast<int>(first[0].size());
        g.edge_channels.assign(channels, Matrix::Zero(n, n));
        for (int i = 0; i < n; ++i) {
          const json& row = dense[i];
          if (!row.is_array() || static_cast<int>(row.size()) != n)
            fail(where + "/edge_features/dense/" + std::to_string(i), "row length mismatch");
          for (int jj = 0; jj < n; ++jj) {
            const json& slice = row[jj];
            if (!slice.is_array() || static_cast<int>(slice.size()) != channels)
              fail(where + "/edge_features/dense/" + std::to_string(i) + "/" + std::to_string(jj),
                   "slice length mismatch");
            for (int t = 0; t < channels; ++t) g.edge_channels[t](i, jj) = slice[t].get<double>();
          }
        }
      }
    } else if (ef.contains("sparse")) {
      const json& sparse = ef["sparse"];
      if (!sparse.contains("shape_t") || !sparse["shape_t"].is_number_integer())
        fail(where + "/edge_features/sparse/shape_t", "missing");
      const int channels = sparse["shape_t"].get<int>();
      if (channels < 0) fail(where + "/edge_features/sparse/shape_t", "must be >= 0");
      Vector fill = Vector::Zero(channels);
      if (sparse.contains("default")) {
        const json& d = sparse["default"];
        if (!d.is_array() || static_cast<int>(d.size()) != channels)
          fail(where + "/edge_features/sparse/default", "length must equal shape_t");
        for (int t = 0; t < channels; ++t) fill(t) = d[t].get<double>();
      }
      g.edge_channels.assign(channels, Matrix());
      for (int t = 0; t < channels; ++t)
        g.edge_channels[t] = Matrix::Constant(n, n, fill(t));
      if (sparse.contains("triplets")) {
        const json& trips = sparse["triplets"];
        if (!trips.is_array()) fail(where + "/edge_features/sparse/triplets", "expected an array");
        std::vector<char> touched(static_cast<std::size_t>(n) * n, 0);
        for (std::size_t k = 0; k < trips.size(); ++k) {
          const json& t4 = trips[k];
          const std::string at =
              where + "/edge_features/sparse/triplets/" + std::to_string(k);
          if (!t4.is_array() || t4.size() != 4) fail(at, "expected [i, j, t, value]");
          const int i = t4[0].get<int>(), jj = t4[1].get<int>(), t = t4[2].get<int>();
          if (i < 0 || i >= n || jj < 0 || jj >= n) fail(at, "node index out of range");
          if (t < 0 || t >= channels) fail(at, "channel index out of range");
          char& seen = touched[static_cast<std::size_t>(i) * n + jj];
          if (!seen) {
            for (int c = 0; c < channels; ++c) g.edge_channels[c](i, jj) = 0.0;
            seen = 1;
          }
          g.edge_channels[t](i, jj) = t4[3].get<double>();
        }
      }
    } else {
      fail(where + "/edge_features", "expected a dense or sparse block");
    }
  }

  if (j.contains("weights") && !j["weights"].empty()) {
    const json& w = j["weights"];
    if (!w.is_array() || static_cast<int>(w.size()) != n)
      fail(where + "/weights", "expected " + std::to_string(n) + " entries");
    g.weights.resize(n);
    for (int i = 0; i < n; ++i) g.weights(i) = w[i].get<double>();
  } else {
    g.weights = uniform_weights(n);
  }

  if (auto err = validate_graph(g)) fail(where, *err);
  return g;
}

json dataset_to_json(const Dataset& ds) {
  json j;
  j["schema_version"] = kSchemaVersion;
  json graphs = json::array();
  for (const Graph& g : ds.graphs) graphs.push_back(graph_to_json(g));
  j["graphs"] = std::move(graphs);
  if (!ds.labels.empty()) j["labels"] = ds.labels;
  return j;
}

Dataset dataset_from_json(const json& j, const std::string& where) {
  Dataset ds;
  const json* graphs = nullptr;
  std::string base = where;
  if (j.is_array()) {
    graphs = &j;
  } else if (j.is_object() && j.contains("graphs")) {
    graphs = &j["graphs"];
    base += "/graphs";
    if (j.contains("labels")) {
      const json& labels = j["labels"];
      if (!labels.is_array()) fail(where + "/labels", "expected an array");
      for (const auto& l : labels) ds.labels.push_back(l.get<int>());
    }
  } else {
    fail(where, "expected a graph array or an object with a graphs field");
  }
  if (!graphs->is_array()) fail(base, "expected an array of graphs");
  for (std::size_t i = 0; i < graphs->size(); ++i)
    ds.graphs.push_back(graph_from_json((*graphs)[i], base + "/" + std::to_string(i)));
  if (!ds.labels.empty() && ds.labels.size() != ds.graphs.size())
    fail(where + "/labels", "labels must parallel the graphs array");
  return ds;
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open for writing: " + path);
  out << j.dump(1) << "\n";
  if (!out) throw ValidationError("write failed: " + path);
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ValidationError(path + ": " + e.what());
  }
  return j;
}

void write_graph_file(const std::string& path, const Graph& g) {
  json j = graph_to_json(g);
  j["schema_version"] = kSchemaVersion;
  write_json_file(path, j);
}

Graph read_graph_file(const std::string& path) {
  return graph_from_json(read_json_file(path), path);
}

void write_dataset_file(const std::string& path, const Dataset& ds) {
  write_json_file(path, dataset_to_json(ds));
}

Dataset read_dataset_file(const std::string& path) {
  return dataset_from_json(read_json_file(path), path);
}

void write_csv_matrix(const std::string& path, const Matrix& m,
                      const std::vector<std::string>& col_ids) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open for writing: " + path);
  out << "# fngw-csv v" << kSchemaVersion << "\n";
  if (!col_ids.empty()) {
    if (static_cast<Eigen::Index>(col_ids.size()) != m.cols())
      throw ValidationError("write_csv_matrix: column id count mismatch");
    for (std::size_t i = 0; i < col_ids.size(); ++i)
      out << (i ? "," : "") << col_ids[i];
  } else {
    for (Eigen::Index i = 0; i < m.cols(); ++i) out << (i ? "," : "") << "c" << i;
  }
  out << "\n";
  char buffer[64];
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      std::snprintf(buffer, sizeof(buffer), "%.17g", m(i, j));
      out << (j ? "," : "") << buffer;
    }
    out << "\n";
  }
  if (!out) throw ValidationError("write failed: " + path);
}

Matrix read_csv_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  bool header_skipped = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') continue;
    if (!header_skipped) {
      // header row of ids; skip unless it parses fully as numbers
      std::istringstream probe(line);
      std::string cell;
      bool numeric = true;
      while (std::getline(probe, cell, ',')) {
        try {
          std::size_t used = 0;
          std::stod(cell, &used);
          if (used != cell.size()) numeric = false;
        } catch (...) {
          numeric = false;
        }
        if (!numeric) break;
      }
      header_skipped = true;
      if (!numeric) continue;
    }
    std::istringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (...) {
        throw ValidationError(path + ": non-numeric CSV cell '" + cell + "'");
      }
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ValidationError(path + ": empty CSV");
  const std::size_t cols = rows[0].size();
  Matrix m(rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols) throw ValidationError(path + ": ragged CSV rows");
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

}  // namespace fngw
