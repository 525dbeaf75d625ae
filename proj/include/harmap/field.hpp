#pragma once

// Nodal map fields (û, v) over a grid and their CSV export/import.
// One row per node: index, coordinates, û, v-components; values printed with
// %.17g so a re-imported field is bit-identical.

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "harmap/grid.hpp"

namespace harmap {

struct MapField {
    int vdim = 0;
    std::vector<double> uhat;  // per node
    std::vector<double> v;     // node-major, vdim entries per node

    static MapField zeros(const Grid& g, int vdim) {
        MapField f;
        f.vdim = vdim;
        f.uhat.assign(g.node_count(), 0.0);
        f.v.assign(g.node_count() * static_cast<long>(vdim), 0.0);
        return f;
    }
    double* v_at(long id) { return v.data() + id * static_cast<long>(vdim); }
    const double* v_at(long id) const { return v.data() + id * static_cast<long>(vdim); }
};

inline std::string format_field_csv(const Grid& g, const MapField& f) {
    std::string out;
    out.reserve(static_cast<size_t>(g.node_count()) * (f.vdim + 4) * 20);
    out += "index";
    for (int k = 0; k < g.spec.n; ++k) out += ",x" + std::to_string(k);
    out += ",uhat";
    for (int c = 0; c < f.vdim; ++c) out += ",v" + std::to_string(c);
    out += "\n";
    char buf[32];
    for (long id = 0; id < g.node_count(); ++id) {
        out += std::to_string(id);
        const auto x = g.coords(id);
        for (int k = 0; k < g.spec.n; ++k) {
            std::snprintf(buf, sizeof buf, ",%.17g", x[k]);
            out += buf;
        }
        std::snprintf(buf, sizeof buf, ",%.17g", f.uhat[id]);
        out += buf;
        for (int c = 0; c < f.vdim; ++c) {
            std::snprintf(buf, sizeof buf, ",%.17g", f.v_at(id)[c]);
            out += buf;
        }
        out += "\n";
    }
    return out;
}

inline void write_field_csv(const std::string& path, const Grid& g, const MapField& f) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("write_field_csv: cannot open " + path);
    const std::string body = format_field_csv(g, f);
    os.write(body.data(), static_cast<std::streamsize>(body.size()));
    if (!os) throw std::runtime_error("write_field_csv: write failed for " + path);
}

inline MapField read_field_csv(const std::string& path, const Grid& g, int vdim) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("read_field_csv: cannot open " + path);
    MapField f = MapField::zeros(g, vdim);
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("read_field_csv: empty file");
    long rows = 0;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        if (!std::getline(ss, cell, ',')) throw std::runtime_error("read_field_csv: bad row");
        const long id = std::stol(cell);
        if (id < 0 || id >= g.node_count())
            throw std::runtime_error("read_field_csv: node index out of range");
        for (int k = 0; k < g.spec.n; ++k) std::getline(ss, cell, ',');  // coordinates
        if (!std::getline(ss, cell, ',')) throw std::runtime_error("read_field_csv: bad row");
        f.uhat[id] = std::strtod(cell.c_str(), nullptr);
        for (int c = 0; c < vdim; ++c) {
            if (!std::getline(ss, cell, ','))
                throw std::runtime_error("read_field_csv: missing v component");
            f.v_at(id)[c] = std::strtod(cell.c_str(), nullptr);
        }
        ++rows;
    }
    if (rows != g.node_count())
        throw std::runtime_error("read_field_csv: row count does not match the grid");
    return f;
}

}  // namespace harmap
