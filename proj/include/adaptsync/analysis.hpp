#pragma once

// Synchronization diagnostics: E(t), the ξ-weighted pairwise error, and run summaries.

#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include <json.hpp>

#include "adaptsync/coupling.hpp"
#include "adaptsync/trajectory.hpp"

namespace adaptsync {

/// E = sqrt( Σ_{j=2..N} ||x_j - x_1||^2 / (N-1) ).
inline double sync_error(const Vector& x, std::size_t n) {
    const auto xm = node_view(x, n);
    if (xm.cols() < 2) throw DimensionError("synchronization error needs at least 2 nodes");
    const double sum = (xm.rightCols(xm.cols() - 1).colwise() - xm.col(0)).squaredNorm();
    return std::sqrt(sum / static_cast<double>(xm.cols() - 1));
}

/// Xᵀ(U⊗I)X evaluated through the pairwise sum; zero exactly on the manifold.
inline double sync_error_pairwise(const Vector& x, const LeftEigenvector& xi, std::size_t n) {
    return bilinear_form_pairwise(xi, x, x, n);
}

struct SyncCriteria {
    double threshold = 1e-3;           // absolute bound on E(T)
    double relative_threshold = 1e-3;  // E(T) <= relative_threshold * E(0)
    double window = 10.0;              // c-plateau look-back
    double plateau_tolerance = 1e-2;
};

struct SyncReport {
    double e_initial = 0.0;
    double e_final = 0.0;
    double c_final = 0.0;
    double t_final = 0.0;
    bool synchronized = false;
    double time_to_sync = std::numeric_limits<double>::infinity();
    double c_plateau_delta = std::numeric_limits<double>::infinity();
    bool c_plateaued = false;
    bool diverged = false;
};

inline SyncReport summarize(const Trajectory& traj, const SyncCriteria& criteria = {}) {
    if (traj.empty()) throw InvalidArgument("cannot summarize an empty trajectory");
    SyncReport r;
    const std::size_t last = traj.size() - 1;
    r.e_initial = traj.e_series.front();
    r.e_final = traj.e_series[last];
    r.c_final = traj.c_series[last];
    r.t_final = traj.times[last];
    r.diverged = traj.diverged;

    std::size_t first_below = traj.size();
    for (std::size_t k = traj.size(); k-- > 0;) {
        if (!(traj.e_series[k] < criteria.threshold)) break;
        first_below = k;
    }
    if (first_below < traj.size()) r.time_to_sync = traj.times[first_below];

    r.synchronized = !r.diverged && r.e_final < criteria.threshold &&
                     r.e_final <= criteria.relative_threshold * r.e_initial;

    const double t_back = r.t_final - criteria.window;
    if (t_back >= traj.times.front()) {
        std::size_t k = last;
        while (k > 0 && traj.times[k] > t_back + 1e-9) --k;
        r.c_plateau_delta = std::abs(r.c_final - traj.c_series[k]);
        r.c_plateaued = r.c_plateau_delta < criteria.plateau_tolerance;
    }
    return r;
}

inline const char* sync_report_csv_header() {
    return "e_initial,e_final,c_final,t_final,synchronized,time_to_sync,c_plateau_delta,c_plateaued,diverged";
}

inline void write_sync_report_csv(std::ostream& os, const SyncReport& r, bool header = true) {
    if (header) os << sync_report_csv_header() << '\n';
    os << format_double(r.e_initial) << ',' << format_double(r.e_final) << ',' << format_double(r.c_final) << ','
       << format_double(r.t_final) << ',' << (r.synchronized ? 1 : 0) << ',' << format_double(r.time_to_sync)
       << ',' << format_double(r.c_plateau_delta) << ',' << (r.c_plateaued ? 1 : 0) << ','
       << (r.diverged ? 1 : 0) << '\n';
}

/// Non-finite values (never-synchronized time, missing plateau) map to null.
inline nlohmann::json to_json(const SyncReport& r) {
    const auto num = [](double v) -> nlohmann::json {
        return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
    };
    return {
        {"e_initial", num(r.e_initial)},
        {"e_final", num(r.e_final)},
        {"c_final", num(r.c_final)},
        {"t_final", num(r.t_final)},
        {"synchronized", r.synchronized},
        {"time_to_sync", num(r.time_to_sync)},
        {"c_plateau_delta", num(r.c_plateau_delta)},
        {"c_plateaued", r.c_plateaued},
        {"diverged", r.diverged},
    };
}

} // namespace adaptsync
