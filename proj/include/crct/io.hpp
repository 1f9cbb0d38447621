#pragma once

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "crct/graph.hpp"

namespace crct {

// Shortest decimal representation that round-trips a double.
inline std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    double back;
    std::sscanf(buf, "%lf", &back);
    if (back == x) {
        for (int prec = 1; prec < 17; ++prec) {
            char shorter[32];
            std::snprintf(shorter, sizeof(shorter), "%.*g", prec, x);
            std::sscanf(shorter, "%lf", &back);
            if (back == x) return shorter;
        }
    }
    return buf;
}

// Writes the generic rating CSV (`evaluator_id,object_id,rating`, stored
// [0,1] scale) plus a JSON sidecar at <path>.meta.json with the counts and
// scale needed to reload without guessing.
inline void export_graph(const BipartiteRatingGraph& g, const std::string& csv_path,
                         const std::vector<int>* evaluator_id_map = nullptr,
                         const std::vector<int>* object_id_map = nullptr) {
    std::ofstream out(csv_path);
    if (!out) throw std::runtime_error("export_graph: cannot write " + csv_path);
    out << "evaluator_id,object_id,rating\n";
    for (int i = 0; i < g.evaluator_count(); ++i)
        for (const auto& [a, r] : g.ratings_by(i))
            out << i << ',' << a << ',' << format_double(r) << '\n';

    nlohmann::json meta;
    meta["evaluator_count"] = g.evaluator_count();
    meta["object_count"] = g.object_count();
    meta["edge_count"] = g.edge_count();
    meta["scale"] = {{"min_value", 0.0}, {"max_value", 1.0}, {"discrete", false}};
    if (evaluator_id_map) meta["evaluator_original_ids"] = *evaluator_id_map;
    if (object_id_map) meta["object_original_ids"] = *object_id_map;
    std::ofstream mout(csv_path + ".meta.json");
    if (!mout) throw std::runtime_error("export_graph: cannot write " + csv_path + ".meta.json");
    mout << meta.dump(2) << '\n';
}

// Loads the generic rating CSV. Counts come from the sidecar when present,
// otherwise from max id + 1.
inline BipartiteRatingGraph load_graph_csv(const std::string& csv_path) {
    std::ifstream in(csv_path);
    if (!in) throw std::runtime_error("load_graph_csv: cannot open " + csv_path);
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("load_graph_csv: empty file " + csv_path);
    std::vector<Edge> edges;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ss(line);
        int i, a;
        double r;
        char c1, c2;
        if (!(ss >> i >> c1 >> a >> c2 >> r) || c1 != ',' || c2 != ',')
            throw std::runtime_error("load_graph_csv: malformed line " +
                                     std::to_string(lineno) + " in " + csv_path);
        edges.emplace_back(i, a, r);
    }
    int evaluator_count = 0, object_count = 0;
    std::ifstream meta_in(csv_path + ".meta.json");
    if (meta_in) {
        nlohmann::json meta = nlohmann::json::parse(meta_in);
        evaluator_count = meta.at("evaluator_count").get<int>();
        object_count = meta.at("object_count").get<int>();
    } else {
        for (const auto& [i, a, r] : edges) {
            evaluator_count = std::max(evaluator_count, i + 1);
            object_count = std::max(object_count, a + 1);
        }
    }
    return BipartiteRatingGraph::from_edges(evaluator_count, object_count, edges);
}

inline void write_id_value_csv(const std::string& path, const std::string& id_header,
                               const std::string& value_header,
                               const std::vector<double>& values) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << id_header << ',' << value_header << '\n';
    for (std::size_t i = 0; i < values.size(); ++i)
        out << i << ',' << format_double(values[i]) << '\n';
}

inline std::vector<double> read_id_value_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    std::getline(in, line);  // header
    std::vector<double> values;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::size_t id;
        char c;
        std::string rest;
        if (!(ss >> id >> c) || c != ',' || !std::getline(ss, rest))
            throw std::runtime_error("malformed line " + std::to_string(lineno) + " in " + path);
        // strtod, unlike stream extraction, accepts "nan" (undefined values).
        char* end = nullptr;
        const double v = std::strtod(rest.c_str(), &end);
        if (end == rest.c_str())
            throw std::runtime_error("malformed line " + std::to_string(lineno) + " in " + path);
        if (values.size() <= id) values.resize(id + 1, 0.0);
        values[id] = v;
    }
    return values;
}

inline void write_id_csv(const std::string& path, const std::string& header,
                         const std::vector<int>& ids) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << header << '\n';
    for (int id : ids) out << id << '\n';
}

inline std::vector<int> read_id_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    std::getline(in, line);  // header
    std::vector<int> ids;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        ids.push_back(std::stoi(line));
    }
    return ids;
}

}  // namespace crct
