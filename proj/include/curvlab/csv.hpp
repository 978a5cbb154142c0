#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "curvlab/asymptotics.hpp"
#include "curvlab/elliptic.hpp"
#include "curvlab/parabolic.hpp"

namespace curvlab {

/// Shortest round-trip-exact decimal form (deterministic across runs).
inline std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

class CsvFile {
public:
    explicit CsvFile(const std::filesystem::path& p) : out_(p) {
        if (!out_) throw std::runtime_error("cannot open " + p.string());
    }
    void comment(const std::string& s) { out_ << "# " << s << "\n"; }
    void header(const std::string& s) { out_ << s << "\n"; }
    void row(const std::vector<double>& vals) {
        for (std::size_t i = 0; i < vals.size(); ++i)
            out_ << (i ? "," : "") << g17(vals[i]);
        out_ << "\n";
    }

private:
    std::ofstream out_;
};

inline void write_field_csv(const std::filesystem::path& p, const RadialField& f) {
    CsvFile csv(p);
    csv.comment("lambda=" + g17(f.lambda) + " sigma_plus=" + g17(f.cond.sigma_plus) +
                " sigma_minus=" + g17(f.cond.sigma_minus) + " shape=" + f.shape_desc);
    csv.header("r,value");
    for (std::size_t i = 0; i < f.values.size(); ++i)
        csv.row({f.grid.nodes[i], f.values[i]});
}

inline void write_field_csv(const std::filesystem::path& p, const CartesianField2D& f) {
    CsvFile csv(p);
    csv.comment("lambda=" + g17(f.lambda) + " sigma_plus=" + g17(f.cond.sigma_plus) +
                " sigma_minus=" + g17(f.cond.sigma_minus) + " shape=" + f.shape.describe());
    csv.header("x,y,value");
    const auto u = f.u_cells();
    for (int j = 0; j < f.grid.ny; ++j)
        for (int i = 0; i < f.grid.nx; ++i)
            csv.row({f.grid.cx(i), f.grid.cy(j), u[f.grid.idx(i, j)]});
}

inline void write_trace_csv(const std::filesystem::path& p, const TimeTrace& tr) {
    CsvFile csv(p);
    std::string pt = "(";
    for (std::size_t i = 0; i < tr.point.size(); ++i)
        pt += (i ? " " : "") + g17(tr.point[i]);
    pt += ")";
    csv.comment("point=" + pt + " sigma_plus=" + g17(tr.cond.sigma_plus) +
                " sigma_minus=" + g17(tr.cond.sigma_minus) + " shape=" + tr.shape_desc +
                " mesh=" + tr.mesh_desc);
    csv.header("t,u");
    for (std::size_t k = 0; k < tr.times.size(); ++k)
        csv.row({tr.times[k], tr.values[k]});
}

/// Extrapolation report: parameter, raw value, running extrapolant, error.
inline void write_report_csv(const std::filesystem::path& p,
                             const ExtrapolationResult& r, double expected) {
    CsvFile csv(p);
    csv.header("parameter,value,extrapolant,error");
    for (std::size_t i = 0; i < r.sequence.size(); ++i) {
        const double ex = r.extrapolants[i];
        csv.row({r.sequence[i].first, r.sequence[i].second, ex, std::abs(ex - expected)});
    }
    const double rel = expected != 0.0 ? std::abs(r.limit - expected) / std::abs(expected)
                                       : std::abs(r.limit);
    csv.comment("limit=" + g17(r.limit) + " expected=" + g17(expected) +
                " rel_err=" + g17(rel) + " error_estimate=" + g17(r.error_estimate) +
                " model_consistent=" + (r.model_consistent ? std::string("1") : std::string("0")));
}

}  // namespace curvlab
