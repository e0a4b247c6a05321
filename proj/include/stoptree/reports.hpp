#pragma once

#include "stoptree/csv.hpp"
#include "stoptree/simlab.hpp"

#include <ostream>
#include <string>

namespace stoptree {

// CSV emitters for the simulation experiments. Formatting always goes
// through format_double, so identical results produce identical bytes.

inline void write_null_cdf_csv(const NullCdfResult& result, std::ostream& out) {
    out << "u,ecdf,approx_cdf\n";
    const std::size_t reps = result.sorted_umax.size();
    const bool have_approx = result.config.n >= kMinApproxSampleSize;
    const PValueParams params{result.config.n, result.config.d};
    for (std::size_t i = 0; i < reps; ++i) {
        const double u = result.sorted_umax[i];
        const double ecdf = static_cast<double>(i + 1) / static_cast<double>(reps);
        double approx = 0.0;
        if (have_approx) {
            approx = 1.0 - bonferroni_p(u, params);
            if (approx < 0.0) {
                approx = 0.0;
            }
        }
        out << format_double(u) << ',' << format_double(ecdf) << ',' << format_double(approx)
            << '\n';
    }
}

inline void write_detection_csv(const DetectionResult& result, std::ostream& out) {
    out << "n,signal,fraction_detected\n";
    for (std::size_t i = 0; i < result.n_grid.size(); ++i) {
        out << result.n_grid[i] << ',' << format_double(result.signal[i]) << ','
            << format_double(result.fraction[i]) << '\n';
    }
}

inline void write_neufeld_csv(const NeufeldReport& report, std::ostream& out) {
    const bool have_msep = !report.msep.empty();
    out << (have_msep ? "leaves,mse,msep,cum_p,selected\n" : "leaves,mse,cum_p,selected\n");
    for (std::size_t k = 0; k < report.leaves.size(); ++k) {
        out << report.leaves[k] << ',' << format_double(report.mse[k]) << ',';
        if (have_msep) {
            out << format_double(report.msep[k]) << ',';
        }
        out << format_double(report.cum_p[k]) << ','
            << (k == report.selection.selected_index ? 1 : 0) << '\n';
    }
}

inline void write_cv_contrast_csv(const CvContrastResult& result, std::ostream& out) {
    out << "rep,cv_theta,cv_leaves,cv_rmse";
    for (double delta : result.deltas) {
        out << ",pv_leaves_" << format_double(delta) << ",pv_rmse_" << format_double(delta);
    }
    out << '\n';
    for (std::size_t r = 0; r < result.reps.size(); ++r) {
        const CvContrastRep& rep = result.reps[r];
        out << r << ',' << format_double(rep.cv_theta) << ',' << rep.cv_leaves << ','
            << format_double(rep.cv_rmse);
        for (std::size_t di = 0; di < result.deltas.size(); ++di) {
            out << ',' << rep.pvalue_leaves[di] << ',' << format_double(rep.pvalue_rmse[di]);
        }
        out << '\n';
    }
}

} // namespace stoptree
