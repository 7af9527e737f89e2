#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "../scaling.hpp"
#include "../stats.hpp"

namespace hslpp::experiments {

// Replica budget shared by every experiment.
struct RunOptions {
    std::int64_t replicas = 1000;
    std::uint64_t seed0 = 1;
    unsigned threads = 1;
};

struct ResultRow {
    std::string param;
    double value = 0.0;
    double stderr_ = 0.0;
    std::int64_t n = 0;
};

// One experiment's output: CSV rows plus the assertions it made.
struct Report {
    std::string experiment;
    FrameParams frame;
    RunOptions run;
    std::vector<ResultRow> rows;
    std::vector<std::string> failures;

    void add(std::string param, double value, double se = 0.0, std::int64_t n = -1)
    {
        rows.push_back({std::move(param), value, se, n < 0 ? run.replicas : n});
    }
    void add(std::string param, const Estimate& e) { add(std::move(param), e.mean, e.stderr_, e.n); }

    // Records a failed check; reports with failures map to exit status 2.
    void require(bool ok, const std::string& what)
    {
        if (!ok) failures.push_back(what);
    }
    bool ok() const { return failures.empty(); }

    const ResultRow* find(const std::string& param) const
    {
        for (const auto& r : rows) {
            if (r.param == param) return &r;
        }
        return nullptr;
    }
    double value(const std::string& param) const
    {
        const auto* r = find(param);
        return r ? r->value : std::nan("");
    }
};

inline const char* kCsvHeader = "experiment,N,tau,delta,kappa,param,value,stderr,n,seed0";

// Round-trip decimal: %.17g, with fixed spellings for non-finite values.
inline std::string format_real(double x)
{
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline void write_csv(std::ostream& os, const Report& r, bool header = true)
{
    if (header) os << kCsvHeader << '\n';
    for (const auto& row : r.rows) {
        os << r.experiment << ',' << r.frame.N << ',' << format_real(r.frame.tau) << ',' << format_real(r.frame.delta)
           << ',' << format_real(r.frame.kappa) << ',' << row.param << ',' << format_real(row.value) << ','
           << format_real(row.stderr_) << ',' << row.n << ',' << r.run.seed0 << '\n';
    }
}

inline nlohmann::json to_json(const FrameParams& f)
{
    return {{"N", f.N},       {"tau", f.tau},           {"delta", f.delta},
            {"kappa", f.kappa}, {"m1_tilde", f.m1_tilde}, {"mtau_tilde", f.mtau_tilde}};
}

inline nlohmann::json summary_json(const Report& r)
{
    return {{"experiment", r.experiment},
            {"frame", to_json(r.frame)},
            {"replicas", r.run.replicas},
            {"seed0", r.run.seed0},
            {"rows", r.rows.size()},
            {"failures", r.failures}};
}

// Appends a BoundCheck as rows <prefix>.{empirical,bound,censored}[x=...].
inline void add_bound_rows(Report& rep, const std::string& prefix, const BoundCheck& b)
{
    for (std::size_t k = 0; k < b.abscissae.size(); ++k) {
        const std::string at = "[x=" + format_real(b.abscissae[k]) + "]";
        rep.add(prefix + ".empirical" + at, b.empirical[k], b.stderr_[k], b.n);
        rep.add(prefix + ".bound" + at, b.bound[k], 0.0, b.n);
        rep.add(prefix + ".censored" + at, b.censored[k] ? 1.0 : 0.0, 0.0, b.n);
    }
    rep.add(prefix + ".satisfied", b.satisfied ? 1.0 : 0.0, 0.0, b.n);
}

inline double fraction(std::int64_t hits, std::int64_t n) { return static_cast<double>(hits) / static_cast<double>(n); }

} // namespace hslpp::experiments
