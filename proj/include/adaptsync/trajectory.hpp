#pragma once

#include <ostream>
#include <vector>

#include "adaptsync/dynamics.hpp"
#include "adaptsync/matrix_io.hpp"

namespace adaptsync {

/// Sampled run of an adaptive scheme. All series have one entry per recorded
/// time. `lyapunov_quadratic` holds (1/2)Xᵀ(U⊗I)X; `v_series` adds the
/// (1/α)(c_ref - c)^2 term once c_ref is known.
struct Trajectory {
    std::vector<double> times;
    std::vector<double> c_series;
    std::vector<double> e_series;
    std::vector<double> lyapunov_quadratic;
    std::vector<double> v_series;
    std::vector<Vector> snapshots;
    AugmentedState final_state;
    double c_ref = 0.0;
    bool diverged = false;

    std::size_t size() const noexcept { return times.size(); }
    bool empty() const noexcept { return times.empty(); }

    /// Fill v_series from the stored quadratic part.
    void apply_lyapunov_reference(double reference, double alpha) {
        c_ref = reference;
        v_series.resize(times.size());
        for (std::size_t k = 0; k < times.size(); ++k) {
            const double dc = reference - c_series[k];
            v_series[k] = alpha > 0.0 ? lyapunov_quadratic[k] + dc * dc / alpha
                                      : std::numeric_limits<double>::quiet_NaN();
        }
    }
};

/// CSV with header "t,c,E,V", '.' decimal separator and LF line endings.
inline void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
    os << "t,c,E,V\n";
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const double v = k < traj.v_series.size() ? traj.v_series[k] : std::numeric_limits<double>::quiet_NaN();
        os << format_double(traj.times[k]) << ',' << format_double(traj.c_series[k]) << ','
           << format_double(traj.e_series[k]) << ',' << format_double(v) << '\n';
    }
}

} // namespace adaptsync
