#pragma once

#include "stoptree/data.hpp"
#include "stoptree/normal.hpp"
#include "stoptree/pvalue.hpp"
#include "stoptree/rng.hpp"
#include "stoptree/split.hpp"
#include "stoptree/stopping.hpp"
#include "stoptree/tree.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <mutex>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <thread>
#include <utility>
#include <vector>

namespace stoptree {

// ---------------------------------------------------------------------------
// Generator configurations
// ---------------------------------------------------------------------------

/// No-signal model: Y ~ N(mu, sigma^2) independent of the covariates, which
/// are d-variate normal with unit variances and common pairwise correlation
/// rho (one-factor construction sqrt(rho) Z0 + sqrt(1-rho) Zj).
struct NullConfig {
    std::size_t n = 0;
    std::size_t d = 1;
    double rho = 0.0;
    double mu = 0.0;
    double sigma = 1.0;
    std::uint64_t seed = 0;

    void validate() const {
        if (n < 1 || d < 1) {
            throw std::invalid_argument("NullConfig: n and d must be >= 1");
        }
        if (!(rho >= 0.0 && rho < 1.0)) {
            throw std::invalid_argument("NullConfig: rho must lie in [0,1)");
        }
        if (!(sigma > 0.0)) {
            throw std::invalid_argument("NullConfig: sigma must be positive");
        }
    }
};

/// Single mean-shift model: covariates as under NullConfig, and
/// Y | X_j = N(mu_l if x_j <= xi else mu_r, sigma^2). Covariate marginals
/// are standard normal, so t0 = P(X_j <= xi) must equal Phi(xi); the two
/// fields are validated for consistency rather than trusting one silently.
struct AltConfig {
    std::size_t n = 0;
    std::size_t d = 1;
    std::size_t j = 0;
    double xi = 0.0;
    double t0 = 0.5;
    double mu_l = 0.0;
    double mu_r = 1.0;
    double sigma = 1.0;
    double rho = 0.0;
    std::uint64_t seed = 0;

    void validate() const {
        if (n < 1 || d < 1 || j >= d) {
            throw std::invalid_argument("AltConfig: need n >= 1 and j < d");
        }
        if (!(t0 > 0.0 && t0 < 1.0)) {
            throw std::invalid_argument("AltConfig: t0 must lie in (0,1)");
        }
        if (mu_l == mu_r) {
            throw std::invalid_argument("AltConfig: mu_l and mu_r must differ");
        }
        if (!(sigma > 0.0) || !(rho >= 0.0 && rho < 1.0)) {
            throw std::invalid_argument("AltConfig: invalid sigma or rho");
        }
        if (std::fabs(std_normal_cdf(xi) - t0) > 1e-9) {
            throw std::invalid_argument("AltConfig: t0 must equal Phi(xi) for N(0,1) covariates");
        }
    }
};

/// Step-function regression surface on independent standard normal
/// covariates, with noise level sigma.
struct NeufeldConfig {
    std::size_t n = 500;
    double a = 1.0;
    double b = 1.0;
    double sigma = 1.0;
    std::size_t d = 10;
    std::uint64_t seed = 0;

    void validate() const {
        if (n < 1) {
            throw std::invalid_argument("NeufeldConfig: n must be >= 1");
        }
        if (d < 3) {
            throw std::invalid_argument("NeufeldConfig: d must be >= 3");
        }
        if (!(sigma > 0.0)) {
            throw std::invalid_argument("NeufeldConfig: sigma must be positive");
        }
    }
};

/// b * 1{x1 <= 0} (1 + a 1{x2 > 0} + 1{x2 x3 > 0})
inline double neufeld_mu(std::span<const double> x, double a, double b) {
    if (x[0] > 0.0) {
        return 0.0;
    }
    double level = 1.0;
    if (x[1] > 0.0) {
        level += a;
    }
    if (x[1] * x[2] > 0.0) {
        level += 1.0;
    }
    return b * level;
}

// ---------------------------------------------------------------------------
// Generators. Each consumes the substream (seed, 0) of its config seed and
// draws covariates row by row (factor variate first when rho > 0), then the
// response row by row.
// ---------------------------------------------------------------------------

namespace detail {

inline void fill_covariates(CounterRng& rng, NodeData& node, double rho) {
    const std::size_t n = node.n();
    if (rho > 0.0) {
        const double shared = std::sqrt(rho);
        const double own = std::sqrt(1.0 - rho);
        for (std::size_t i = 0; i < n; ++i) {
            const double z0 = rng.next_normal();
            for (std::size_t j = 0; j < node.d; ++j) {
                node.x[j * n + i] = shared * z0 + own * rng.next_normal();
            }
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < node.d; ++j) {
                node.x[j * n + i] = rng.next_normal();
            }
        }
    }
}

inline NodeData blank_node(std::size_t n, std::size_t d) {
    NodeData node;
    node.d = d;
    node.y.resize(n);
    node.x.resize(n * d);
    node.row_ids.resize(n);
    std::iota(node.row_ids.begin(), node.row_ids.end(), std::size_t{0});
    return node;
}

template <class Fn>
inline void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
    unsigned workers = threads == 0 ? std::thread::hardware_concurrency() : threads;
    if (workers == 0) {
        workers = 1;
    }
    if (count < 2 || workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            fn(i);
        }
        return;
    }
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
    std::atomic<std::size_t> next{0};
    std::mutex err_mutex;
    std::exception_ptr err;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned t = 0; t < workers; ++t) {
        pool.emplace_back([&]() {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) {
                    return;
                }
                try {
                    fn(i);
                } catch (...) {
                    const std::lock_guard<std::mutex> lock(err_mutex);
                    if (!err) {
                        err = std::current_exception();
                    }
                    return;
                }
            }
        });
    }
    for (auto& th : pool) {
        th.join();
    }
    if (err) {
        std::rethrow_exception(err);
    }
}

} // namespace detail

inline NodeData gen_null(const NullConfig& cfg) {
    cfg.validate();
    CounterRng rng = CounterRng::substream(cfg.seed, 0);
    NodeData node = detail::blank_node(cfg.n, cfg.d);
    detail::fill_covariates(rng, node, cfg.rho);
    for (std::size_t i = 0; i < cfg.n; ++i) {
        node.y[i] = rng.next_normal(cfg.mu, cfg.sigma);
    }
    return node;
}

inline NodeData gen_alt(const AltConfig& cfg) {
    cfg.validate();
    CounterRng rng = CounterRng::substream(cfg.seed, 0);
    NodeData node = detail::blank_node(cfg.n, cfg.d);
    detail::fill_covariates(rng, node, cfg.rho);
    for (std::size_t i = 0; i < cfg.n; ++i) {
        const double base = node.covariate(i, cfg.j) <= cfg.xi ? cfg.mu_l : cfg.mu_r;
        node.y[i] = rng.next_normal(base, cfg.sigma);
    }
    return node;
}

inline NodeData gen_neufeld(const NeufeldConfig& cfg) {
    cfg.validate();
    CounterRng rng = CounterRng::substream(cfg.seed, 0);
    NodeData node = detail::blank_node(cfg.n, cfg.d);
    detail::fill_covariates(rng, node, 0.0);
    std::vector<double> row(cfg.d);
    for (std::size_t i = 0; i < cfg.n; ++i) {
        for (std::size_t j = 0; j < cfg.d; ++j) {
            row[j] = node.covariate(i, j);
        }
        node.y[i] = neufeld_mu(row, cfg.a, cfg.b) + cfg.sigma * rng.next_normal();
    }
    return node;
}

// ---------------------------------------------------------------------------
// Monte Carlo experiments. Replication r of an experiment with base seed S
// generates its data from a config reseeded with substream_key(S, r), so
// aggregation is independent of scheduling.
// ---------------------------------------------------------------------------

/// Empirical distribution of the scaled max statistic under the null.
struct NullCdfResult {
    NullConfig config;
    std::size_t reps = 0;
    std::size_t min_leaf = 1;
    std::vector<double> sorted_umax;
    std::vector<double> quantile_probs;
    std::vector<double> quantile_values;

    /// Linearly interpolated sample quantile (the usual "type 7" rule).
    double quantile(double p) const {
        if (sorted_umax.empty() || !(p >= 0.0 && p <= 1.0)) {
            throw std::invalid_argument("quantile: need a sample and p in [0,1]");
        }
        const double h = p * static_cast<double>(sorted_umax.size() - 1);
        const std::size_t lo = static_cast<std::size_t>(h);
        if (lo + 1 >= sorted_umax.size()) {
            return sorted_umax.back();
        }
        const double frac = h - static_cast<double>(lo);
        return sorted_umax[lo] + frac * (sorted_umax[lo + 1] - sorted_umax[lo]);
    }
};

/// Draw `reps` null datasets and record the scaled statistic of the best
/// split of each. min_leaf defaults to 1: the null statistic maximizes
/// over every interior rank.
inline NullCdfResult experiment_null_cdf(const NullConfig& cfg, std::size_t reps,
                                         std::size_t min_leaf = 1,
                                         std::vector<double> probs = {0.95},
                                         unsigned threads = 0) {
    cfg.validate();
    if (reps < 1) {
        throw std::invalid_argument("experiment_null_cdf: reps must be >= 1");
    }
    NullCdfResult result;
    result.config = cfg;
    result.reps = reps;
    result.min_leaf = min_leaf;
    result.sorted_umax.resize(reps);

    detail::parallel_for(reps, threads, [&](std::size_t rep) {
        NullConfig rep_cfg = cfg;
        rep_cfg.seed = CounterRng::substream_key(cfg.seed, rep);
        const NodeData data = gen_null(rep_cfg);
        const auto cand = best_split(data, min_leaf);
        result.sorted_umax[rep] = cand ? cand->u_scaled : 0.0;
    });
    std::sort(result.sorted_umax.begin(), result.sorted_umax.end());

    result.quantile_probs = std::move(probs);
    result.quantile_values.reserve(result.quantile_probs.size());
    for (double p : result.quantile_probs) {
        result.quantile_values.push_back(result.quantile(p));
    }
    return result;
}

/// Fraction of detections {U > u_eps} per sample size, with the mean shift
/// mu_r = n^{-1/5} shrinking along the grid.
struct DetectionResult {
    AltConfig base;
    std::size_t reps = 0;
    double eps = 0.05;
    std::vector<std::size_t> n_grid;
    std::vector<double> signal;   ///< per n: |mu_r - mu_l|
    std::vector<double> fraction; ///< per n: detection fraction
};

inline const std::vector<std::size_t>& default_detection_grid() {
    static const std::vector<std::size_t> grid{100, 250, 500, 1000, 2500, 5000, 10000};
    return grid;
}

inline DetectionResult experiment_detection(const AltConfig& base,
                                            const std::vector<std::size_t>& n_grid,
                                            std::size_t reps, double eps,
                                            unsigned threads = 0) {
    if (n_grid.empty() || reps < 1) {
        throw std::invalid_argument("experiment_detection: need a grid and reps >= 1");
    }
    DetectionResult result;
    result.base = base;
    result.reps = reps;
    result.eps = eps;
    result.n_grid = n_grid;
    result.signal.resize(n_grid.size());
    result.fraction.resize(n_grid.size());

    for (std::size_t gi = 0; gi < n_grid.size(); ++gi) {
        const std::size_t n = n_grid[gi];
        AltConfig cfg = base;
        cfg.n = n;
        cfg.mu_l = 0.0;
        cfg.mu_r = std::pow(static_cast<double>(n), -0.2);
        cfg.validate();
        const double u_eps = critical_value(eps, PValueParams{n, cfg.d});

        std::vector<char> detected(reps, 0);
        detail::parallel_for(reps, threads, [&](std::size_t rep) {
            AltConfig rep_cfg = cfg;
            rep_cfg.seed = CounterRng::substream_key(base.seed, gi * reps + rep);
            const NodeData data = gen_alt(rep_cfg);
            const auto cand = best_split(data, 1);
            detected[rep] = cand && cand->u_scaled > u_eps;
        });
        std::size_t hits = 0;
        for (char c : detected) {
            hits += c;
        }
        result.signal[gi] = cfg.mu_r;
        result.fraction[gi] = static_cast<double>(hits) / static_cast<double>(reps);
    }
    return result;
}

/// One full fit-prune-select run on the step-function generator, with
/// in-sample MSE and held-out MSEP for every tree of the nested sequence.
/// Test data comes from the substream (seed, 1) and is used for nothing
/// but prediction error.
struct NeufeldReport {
    NeufeldConfig config;
    double delta = 0.05;
    SelectionReport selection;
    std::vector<std::size_t> leaves;
    std::vector<double> mse;
    std::vector<double> msep;
    std::vector<double> cum_p;
    std::size_t first_split_j = static_cast<std::size_t>(-1);
    double first_split_threshold = std::numeric_limits<double>::quiet_NaN();
};

inline NeufeldReport experiment_neufeld(const NeufeldConfig& cfg, double delta,
                                        std::size_t test_n,
                                        const GrowConfig& grow_cfg = GrowConfig{4, 20}) {
    cfg.validate();
    NeufeldReport report;
    report.config = cfg;
    report.delta = delta;

    const NodeData train = gen_neufeld(cfg);
    NeufeldConfig test_cfg = cfg;
    test_cfg.n = test_n;
    test_cfg.seed = CounterRng::substream_key(cfg.seed, 1);
    const NodeData test = test_n > 0 ? gen_neufeld(test_cfg) : NodeData{};

    const RegressionTree full = grow(train, grow_cfg);
    if (!full.root->is_leaf()) {
        report.first_split_j = full.root->j;
        report.first_split_threshold = full.root->threshold;
    }
    const NestedSequence seq = cost_complexity_sequence(full);
    report.selection = select_tree(seq, StopConfig{delta});
    report.cum_p = seq.cum_p;

    std::vector<double> row(cfg.d);
    for (const auto& tree : seq.trees) {
        report.leaves.push_back(tree.leaf_count());
        report.mse.push_back(tree.root->leaf_sse() / static_cast<double>(train.n()));
        if (test_n > 0) {
            double sse = 0.0;
            for (std::size_t i = 0; i < test.n(); ++i) {
                for (std::size_t j = 0; j < cfg.d; ++j) {
                    row[j] = test.covariate(i, j);
                }
                const double e = test.y[i] - predict(*tree.root, row);
                sse += e * e;
            }
            report.msep.push_back(sse / static_cast<double>(test.n()));
        }
    }
    return report;
}

/// Repeated random-split comparison of cross-validated cost-complexity
/// selection against the cumulative p-value rule on one fixed dataset.
/// Replication r draws its shuffle from the substream (seed, 1 + r).
struct CvContrastRep {
    std::size_t cv_leaves = 0;
    double cv_theta = 0.0;
    double cv_rmse = 0.0;
    std::vector<std::size_t> pvalue_leaves; ///< per delta
    std::vector<double> pvalue_rmse;        ///< per delta
};

struct CvContrastResult {
    NeufeldConfig config;
    std::size_t folds = 5;
    std::vector<double> deltas;
    std::vector<CvContrastRep> reps;

    std::size_t distinct_cv_sizes() const {
        std::vector<std::size_t> sizes;
        for (const auto& r : reps) {
            sizes.push_back(r.cv_leaves);
        }
        std::sort(sizes.begin(), sizes.end());
        sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());
        return sizes.size();
    }
};

namespace detail {

inline NodeData gather_rows(const NodeData& data, const std::vector<std::size_t>& rows) {
    NodeData out;
    out.d = data.d;
    const std::size_t m = rows.size();
    out.y.resize(m);
    out.row_ids.resize(m);
    out.x.resize(m * data.d);
    for (std::size_t k = 0; k < m; ++k) {
        out.y[k] = data.y[rows[k]];
        out.row_ids[k] = data.row_ids[rows[k]];
    }
    for (std::size_t j = 0; j < data.d; ++j) {
        const double* src = data.x.data() + j * data.n();
        double* dst = out.x.data() + j * m;
        for (std::size_t k = 0; k < m; ++k) {
            dst[k] = src[rows[k]];
        }
    }
    return out;
}

inline double holdout_rmse(const TreeNode& tree, const NodeData& data,
                           const std::vector<std::size_t>& rows) {
    std::vector<double> x(data.d);
    double sse = 0.0;
    for (std::size_t r : rows) {
        for (std::size_t j = 0; j < data.d; ++j) {
            x[j] = data.covariate(r, j);
        }
        const double e = data.y[r] - predict(tree, x);
        sse += e * e;
    }
    return std::sqrt(sse / static_cast<double>(rows.size()));
}

/// Candidate penalty grid from the pruning alphas: zero, midpoints of
/// consecutive distinct alphas, and the largest alpha (which prunes to the
/// root). Alphas are clamped at zero first; tiny negatives can appear from
/// rounding.
inline std::vector<double> theta_grid(const NestedSequence& seq) {
    std::vector<double> alphas;
    for (double a : seq.alphas) {
        alphas.push_back(std::max(a, 0.0));
    }
    std::sort(alphas.begin(), alphas.end());
    alphas.erase(std::unique(alphas.begin(), alphas.end()), alphas.end());
    std::vector<double> grid{0.0};
    for (std::size_t i = 0; i + 1 < alphas.size(); ++i) {
        grid.push_back(0.5 * (alphas[i] + alphas[i + 1]));
    }
    if (!alphas.empty()) {
        grid.push_back(alphas.back());
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
}

} // namespace detail

inline CvContrastResult experiment_cv_contrast(const NeufeldConfig& cfg, std::size_t folds,
                                               std::size_t reps,
                                               const std::vector<double>& deltas,
                                               double train_fraction = 0.8,
                                               const GrowConfig& grow_cfg = GrowConfig{4, 20},
                                               unsigned threads = 0) {
    cfg.validate();
    if (folds < 2 || reps < 1 || deltas.empty()) {
        throw std::invalid_argument("experiment_cv_contrast: need folds >= 2, reps >= 1, deltas");
    }
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw std::invalid_argument("experiment_cv_contrast: train_fraction must lie in (0,1)");
    }

    CvContrastResult result;
    result.config = cfg;
    result.folds = folds;
    result.deltas = deltas;
    result.reps.resize(reps);

    const NodeData data = gen_neufeld(cfg);
    const std::size_t n = data.n();
    const std::size_t n_train = static_cast<std::size_t>(
        std::ceil(train_fraction * static_cast<double>(n)));
    if (n_train == 0 || n_train >= n || n_train < folds) {
        throw std::invalid_argument("experiment_cv_contrast: degenerate train/test split");
    }

    detail::parallel_for(reps, threads, [&](std::size_t rep) {
        CounterRng rng = CounterRng::substream(cfg.seed, 1 + rep);
        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        for (std::size_t i = n; i > 1; --i) { // Fisher-Yates
            std::swap(perm[i - 1], perm[rng.next_below(i)]);
        }
        const std::vector<std::size_t> train_rows(perm.begin(), perm.begin() + n_train);
        const std::vector<std::size_t> test_rows(perm.begin() + n_train, perm.end());

        const NodeData train = detail::gather_rows(data, train_rows);
        const RegressionTree full = grow(train, grow_cfg);
        const NestedSequence seq = cost_complexity_sequence(full);
        const std::vector<double> thetas = detail::theta_grid(seq);

        // k-fold CV over the penalty grid; fold of a shuffled train row is
        // its position modulo folds.
        std::vector<double> cv_sse(thetas.size(), 0.0);
        for (std::size_t f = 0; f < folds; ++f) {
            std::vector<std::size_t> fit_rows;
            std::vector<std::size_t> val_rows;
            for (std::size_t k = 0; k < n_train; ++k) {
                (k % folds == f ? val_rows : fit_rows).push_back(k);
            }
            const NodeData fold_fit = detail::gather_rows(train, fit_rows);
            const RegressionTree fold_tree = grow(fold_fit, grow_cfg);
            const NestedSequence fold_seq = cost_complexity_sequence(fold_tree);
            std::vector<double> x(train.d);
            for (std::size_t ti = 0; ti < thetas.size(); ++ti) {
                const TreeNode& pruned =
                    *fold_seq.trees[prune_index_at(fold_seq, thetas[ti])].root;
                for (std::size_t vr : val_rows) {
                    for (std::size_t j = 0; j < train.d; ++j) {
                        x[j] = train.covariate(vr, j);
                    }
                    const double e = train.y[vr] - predict(pruned, x);
                    cv_sse[ti] += e * e;
                }
            }
        }
        std::size_t best_ti = 0;
        for (std::size_t ti = 1; ti < thetas.size(); ++ti) {
            if (cv_sse[ti] < cv_sse[best_ti]) {
                best_ti = ti;
            }
        }

        CvContrastRep& out = result.reps[rep];
        out.cv_theta = thetas[best_ti];
        const RegressionTree& cv_tree = seq.trees[prune_index_at(seq, out.cv_theta)];
        out.cv_leaves = cv_tree.leaf_count();
        out.cv_rmse = detail::holdout_rmse(*cv_tree.root, data, test_rows);

        for (double delta : deltas) {
            const SelectionReport sel = select_tree(seq, StopConfig{delta});
            out.pvalue_leaves.push_back(sel.selected_leaves);
            out.pvalue_rmse.push_back(
                detail::holdout_rmse(*seq.trees[sel.selected_index].root, data, test_rows));
        }
    });
    return result;
}

/// Fraction of null datasets on which the stopping rule keeps more than
/// the root. Used to check the conservativeness bound.
struct NullSelectionResult {
    std::size_t reps = 0;
    std::size_t non_root = 0;
    double rate = 0.0;
};

inline NullSelectionResult experiment_null_selection(const NullConfig& cfg, std::size_t reps,
                                                     double delta,
                                                     const GrowConfig& grow_cfg = GrowConfig{4, 20},
                                                     unsigned threads = 0) {
    cfg.validate();
    NullSelectionResult result;
    result.reps = reps;
    std::vector<char> non_root(reps, 0);
    detail::parallel_for(reps, threads, [&](std::size_t rep) {
        NullConfig rep_cfg = cfg;
        rep_cfg.seed = CounterRng::substream_key(cfg.seed, rep);
        const NodeData data = gen_null(rep_cfg);
        const NestedSequence seq = cost_complexity_sequence(grow(data, grow_cfg));
        non_root[rep] = select_tree(seq, StopConfig{delta}).selected_leaves > 1;
    });
    for (char c : non_root) {
        result.non_root += c;
    }
    result.rate = static_cast<double>(result.non_root) / static_cast<double>(reps);
    return result;
}

} // namespace stoptree
