#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "fngw/graph.hpp"

namespace fngw {

inline constexpr int kSchemaVersion = 1;

// Graph object schema:
//   {"n": int, "node_features": [[f64]], "structure": [[f64]],
//    "edge_features": {"dense": [[[f64]]]}
//                   | {"sparse": {"shape_t": int, "triplets": [[i,j,t,value]],
//                                 "default": [f64]}},
//    "weights": [f64]}            weights absent -> uniform 1/n
// Dense edge layout is [i][j][t]; an empty dense array means no channels.
nlohmann::json graph_to_json(const Graph& g);

// `where` prefixes error messages with a JSON-pointer-style location.
Graph graph_from_json(const nlohmann::json& j, const std::string& where);

struct Dataset {
  std::vector<Graph> graphs;
  std::vector<int> labels;  // empty when absent
};

// Dataset files are either a bare JSON array of graphs or an object
// {"schema_version", "graphs", "labels"?}; the writer emits the object form.
nlohmann::json dataset_to_json(const Dataset& ds);
Dataset dataset_from_json(const nlohmann::json& j, const std::string& where);

void write_json_file(const std::string& path, const nlohmann::json& j);
nlohmann::json read_json_file(const std::string& path);

void write_graph_file(const std::string& path, const Graph& g);
Graph read_graph_file(const std::string& path);
void write_dataset_file(const std::string& path, const Dataset& ds);
Dataset read_dataset_file(const std::string& path);

// CSV: first line is the comment "# fngw-csv v<schema>", then a header row of
// column ids and one row per line. Numbers use 17 significant digits.
void write_csv_matrix(const std::string& path, const Matrix& m,
                      const std::vector<std::string>& col_ids = {});
Matrix read_csv_matrix(const std::string& path);

}  // namespace fngw
