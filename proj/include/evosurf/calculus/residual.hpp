#pragma once

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace evosurf {

/// Grid and step sizes a residual was evaluated at. Zero means "not used".
struct Resolution {
    int nr = 64;
    int ns = 64;
    int m = 256;
    double dt = 0.0;
};

/// Outcome of one numerical check of an identity. `terms` lists the
/// individual contributions for diagnostics.
struct ResidualReport {
    std::string name;
    double value = 0.0;
    double tolerance = 0.0;
    Resolution resolution;
    bool pass = false;
    std::vector<std::pair<std::string, double>> terms;

    ResidualReport& finish() {
        pass = std::isfinite(value) && std::abs(value) <= tolerance;
        return *this;
    }

    double term(const std::string& key) const {
        for (const auto& [k, v] : terms)
            if (k == key) return v;
        return std::nan("");
    }
};

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

inline const char* residual_csv_header() { return "name,value,tolerance,pass,nr,ns,m,dt"; }

inline void write_csv_row(std::ostream& os, const ResidualReport& r) {
    os << r.name << ',' << format_double(r.value) << ',' << format_double(r.tolerance) << ','
       << (r.pass ? 1 : 0) << ',' << r.resolution.nr << ',' << r.resolution.ns << ','
       << r.resolution.m << ',' << format_double(r.resolution.dt) << '\n';
}

}  // namespace evosurf
