// stoptree command line front end: fit, predict, boost, quantile and the
// simulation experiment runner. Reports go to stdout as JSON, data files
// are CSV, and every command is deterministic given its flags.

#include "stoptree/boosting.hpp"
#include "stoptree/csv.hpp"
#include "stoptree/pvalue.hpp"
#include "stoptree/reports.hpp"
#include "stoptree/serialize.hpp"
#include "stoptree/simlab.hpp"
#include "stoptree/stopping.hpp"
#include "stoptree/tree.hpp"

#include <CLI11.hpp>

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using stoptree::json;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw UsageError("cannot open '" + path + "' for reading");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw UsageError("cannot open '" + path + "' for writing");
    }
    out << content;
    if (!out) {
        throw UsageError("failed writing '" + path + "'");
    }
}

double parse_delta(const std::string& text) {
    std::string lower;
    for (char c : text) {
        lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    if (lower == "inf" || lower == "infinity") {
        return std::numeric_limits<double>::infinity();
    }
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) {
            throw UsageError("invalid --delta value '" + text + "'");
        }
        return v;
    } catch (const std::logic_error&) {
        throw UsageError("invalid --delta value '" + text + "'");
    }
}

void print_report(const json& report) {
    std::cout << report.dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// fit
// ---------------------------------------------------------------------------

struct FitOptions {
    std::string data;
    std::string target;
    std::vector<std::string> features;
    std::string delimiter = ",";
    std::string delta = "0.05";
    std::size_t max_depth = 4;
    std::size_t min_leaf = 20;
    std::string out;
    std::string sequence_out;
};

char single_delimiter(const std::string& d) {
    if (d.size() != 1) {
        throw UsageError("--delimiter must be a single character");
    }
    return d[0];
}

void run_fit(const FitOptions& opt) {
    const stoptree::Dataset ds = stoptree::ingest_csv(
        {opt.data, opt.target, opt.features, single_delimiter(opt.delimiter)});

    const stoptree::GrowConfig grow_cfg{opt.max_depth, opt.min_leaf};
    const stoptree::RegressionTree full = stoptree::grow(ds.data, grow_cfg);
    const stoptree::NestedSequence seq = stoptree::cost_complexity_sequence(full);
    const stoptree::SelectionReport sel =
        stoptree::select_tree(seq, stoptree::StopConfig{parse_delta(opt.delta)});

    write_file(opt.out, stoptree::serialize(seq.trees[sel.selected_index]));
    if (!opt.sequence_out.empty()) {
        write_file(opt.sequence_out, stoptree::serialize(seq));
    }

    json report;
    report["command"] = "fit";
    report["n"] = ds.data.n();
    report["d"] = ds.data.d;
    report["delta"] = parse_delta(opt.delta);
    report["selected_leaves"] = sel.selected_leaves;
    report["selected_index"] = sel.selected_index;
    if (sel.stopped_at) {
        report["stopped_at"] = *sel.stopped_at;
    } else {
        report["stopped_at"] = nullptr;
    }
    report["cum_p"] = sel.cum_p_trace;
    report["model"] = opt.out;
    print_report(report);
}

// ---------------------------------------------------------------------------
// predict
// ---------------------------------------------------------------------------

struct PredictOptions {
    std::string model;
    std::string data;
    std::vector<std::string> features;
    std::string delimiter = ",";
    std::string out;
};

void run_predict(const PredictOptions& opt) {
    const std::string model_text = read_file(opt.model);
    const json probe = stoptree::detail::parse_checked(model_text, "model file");

    const stoptree::CsvTable table =
        stoptree::read_csv_file(opt.data, single_delimiter(opt.delimiter));
    const stoptree::NodeData features = stoptree::table_to_features(table, opt.features);

    std::vector<double> row(features.d);
    std::ostringstream csv;
    csv << "prediction\n";

    const auto check_d = [&](std::size_t expected) {
        if (expected != 0 && features.d != expected) {
            throw UsageError("dimension mismatch: model expects d=" + std::to_string(expected) +
                             " features, found " + std::to_string(features.d));
        }
    };

    if (probe.contains("root")) {
        const stoptree::RegressionTree tree = stoptree::deserialize_tree(model_text);
        check_d(tree.d);
        for (std::size_t i = 0; i < features.n(); ++i) {
            for (std::size_t j = 0; j < features.d; ++j) {
                row[j] = features.covariate(i, j);
            }
            csv << stoptree::format_double(stoptree::predict(tree, row)) << "\n";
        }
    } else if (probe.contains("trees")) {
        const stoptree::BoostModel model = stoptree::deserialize_boost(model_text);
        check_d(model.d);
        for (std::size_t i = 0; i < features.n(); ++i) {
            for (std::size_t j = 0; j < features.d; ++j) {
                row[j] = features.covariate(i, j);
            }
            csv << stoptree::format_double(stoptree::boost_predict(model, row)) << "\n";
        }
    } else {
        throw UsageError("'" + opt.model + "' is neither a tree nor a boost model file");
    }

    if (opt.out.empty()) {
        std::cout << csv.str();
    } else {
        write_file(opt.out, csv.str());
    }
}

// ---------------------------------------------------------------------------
// boost
// ---------------------------------------------------------------------------

struct BoostOptions {
    std::string data;
    std::string target;
    std::vector<std::string> features;
    std::string delimiter = ",";
    std::string delta = "0.05";
    double learning_rate = 0.1;
    std::size_t max_depth = 3;
    std::size_t min_leaf = 20;
    std::size_t max_iters = 10000;
    std::string out;
    std::string log;
    std::string test;
};

void run_boost(const BoostOptions& opt) {
    const char delim = single_delimiter(opt.delimiter);
    const stoptree::Dataset ds = stoptree::ingest_csv({opt.data, opt.target, opt.features, delim});

    stoptree::BoostConfig cfg;
    cfg.learning_rate = opt.learning_rate;
    cfg.max_depth = opt.max_depth;
    cfg.min_leaf = opt.min_leaf;
    cfg.delta = parse_delta(opt.delta);
    cfg.max_iters = opt.max_iters;

    const stoptree::BoostResult result = stoptree::boost_fit(ds.data, cfg);
    write_file(opt.out, stoptree::serialize(result.model));

    std::optional<stoptree::Dataset> test;
    if (!opt.test.empty()) {
        test = stoptree::ingest_csv({opt.test, opt.target, opt.features, delim});
        if (test->data.d != ds.data.d) {
            throw UsageError("test data has d=" + std::to_string(test->data.d) +
                             " features, train has " + std::to_string(ds.data.d));
        }
    }

    if (!opt.log.empty()) {
        std::ostringstream log;
        log << (test ? "iteration,train_rmse,test_rmse,leaves\n" : "iteration,train_rmse,leaves\n");
        std::vector<double> test_pred;
        std::vector<double> row(ds.data.d);
        if (test) {
            test_pred.assign(test->data.n(), result.model.base);
        }
        for (std::size_t k = 0; k < result.history.size(); ++k) {
            const auto& entry = result.history[k];
            log << entry.iteration << ',' << stoptree::format_double(entry.train_rmse);
            if (test) {
                double sse = 0.0;
                for (std::size_t i = 0; i < test->data.n(); ++i) {
                    for (std::size_t j = 0; j < test->data.d; ++j) {
                        row[j] = test->data.covariate(i, j);
                    }
                    test_pred[i] += result.model.learning_rate *
                                    stoptree::predict(*result.model.trees[k].root, row);
                    const double e = test->data.y[i] - test_pred[i];
                    sse += e * e;
                }
                log << ',' << stoptree::format_double(
                                  std::sqrt(sse / static_cast<double>(test->data.n())));
            }
            log << ',' << entry.leaves << '\n';
        }
        write_file(opt.log, log.str());
    }

    json report;
    report["command"] = "boost";
    report["n"] = ds.data.n();
    report["d"] = ds.data.d;
    report["iterations"] = result.model.trees.size();
    report["stop_reason"] = stoptree::to_string(result.model.stop_reason);
    report["base"] = result.model.base;
    report["learning_rate"] = result.model.learning_rate;
    report["final_candidate_cum_p"] = result.last_candidate_cum_p;
    if (!result.history.empty()) {
        report["final_train_rmse"] = result.history.back().train_rmse;
    }
    report["model"] = opt.out;
    print_report(report);
}

// ---------------------------------------------------------------------------
// quantile
// ---------------------------------------------------------------------------

struct QuantileOptions {
    std::size_t n = 0;
    std::size_t d = 1;
    double eps = 0.05;
};

void run_quantile(const QuantileOptions& opt) {
    const double u = stoptree::critical_value(opt.eps, stoptree::PValueParams{opt.n, opt.d});
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4f\n", u);
    std::cout << buf;
}

// ---------------------------------------------------------------------------
// experiment
// ---------------------------------------------------------------------------

void write_sidecar(const std::string& out_path, json meta) {
    meta["output"] = out_path;
    write_file(out_path + ".meta.json", meta.dump(2) + "\n");
}

struct NullCdfOptions {
    std::size_t n = 50;
    std::size_t d = 1;
    double rho = 0.0;
    double mu = 0.0;
    double sigma = 1.0;
    std::size_t reps = 10000;
    std::size_t min_leaf = 1;
    std::vector<double> quantiles{0.95};
    std::uint64_t seed = 0;
    std::string out;
    unsigned threads = 0;
};

void run_null_cdf(const NullCdfOptions& opt) {
    const stoptree::NullConfig cfg{opt.n, opt.d, opt.rho, opt.mu, opt.sigma, opt.seed};
    const stoptree::NullCdfResult result =
        stoptree::experiment_null_cdf(cfg, opt.reps, opt.min_leaf, opt.quantiles, opt.threads);

    std::ostringstream csv;
    stoptree::write_null_cdf_csv(result, csv);
    write_file(opt.out, csv.str());

    json quantiles;
    for (std::size_t i = 0; i < result.quantile_probs.size(); ++i) {
        quantiles[stoptree::format_double(result.quantile_probs[i])] = result.quantile_values[i];
    }
    json meta;
    meta["experiment"] = "null-cdf";
    meta["seed"] = opt.seed;
    meta["n"] = opt.n;
    meta["d"] = opt.d;
    meta["rho"] = opt.rho;
    meta["mu"] = opt.mu;
    meta["sigma"] = opt.sigma;
    meta["reps"] = opt.reps;
    meta["min_leaf"] = opt.min_leaf;
    meta["quantiles"] = quantiles;
    write_sidecar(opt.out, meta);

    json report;
    report["experiment"] = "null-cdf";
    report["reps"] = opt.reps;
    report["quantiles"] = quantiles;
    report["csv"] = opt.out;
    print_report(report);
}

struct DetectionOptions {
    std::size_t d = 1;
    double rho = 0.0;
    double eps = 0.05;
    std::size_t reps = 1000;
    std::vector<std::size_t> grid;
    std::uint64_t seed = 0;
    std::string out;
    unsigned threads = 0;
};

void run_detection(const DetectionOptions& opt) {
    stoptree::AltConfig base;
    base.d = opt.d;
    base.j = 0;
    base.xi = 0.0;
    base.t0 = 0.5;
    base.mu_l = 0.0;
    base.mu_r = 1.0; // overridden per grid point
    base.sigma = 1.0;
    base.rho = opt.rho;
    base.seed = opt.seed;

    const std::vector<std::size_t>& grid =
        opt.grid.empty() ? stoptree::default_detection_grid() : opt.grid;
    const stoptree::DetectionResult result =
        stoptree::experiment_detection(base, grid, opt.reps, opt.eps, opt.threads);

    std::ostringstream csv;
    stoptree::write_detection_csv(result, csv);
    write_file(opt.out, csv.str());

    json meta;
    meta["experiment"] = "detection";
    meta["seed"] = opt.seed;
    meta["d"] = opt.d;
    meta["rho"] = opt.rho;
    meta["eps"] = opt.eps;
    meta["reps"] = opt.reps;
    meta["grid"] = grid;
    write_sidecar(opt.out, meta);

    json report;
    report["experiment"] = "detection";
    report["n"] = grid;
    report["fraction_detected"] = result.fraction;
    report["csv"] = opt.out;
    print_report(report);
}

struct NeufeldOptions {
    std::size_t n = 500;
    double a = 1.0;
    double b = 1.0;
    double sigma = 1.0;
    std::size_t d = 10;
    std::string delta = "0.05";
    std::size_t test_n = 500;
    std::size_t max_depth = 4;
    std::size_t min_leaf = 20;
    std::uint64_t seed = 0;
    std::string out;
};

void run_neufeld(const NeufeldOptions& opt) {
    const stoptree::NeufeldConfig cfg{opt.n, opt.a, opt.b, opt.sigma, opt.d, opt.seed};
    const stoptree::NeufeldReport report = stoptree::experiment_neufeld(
        cfg, parse_delta(opt.delta), opt.test_n,
        stoptree::GrowConfig{opt.max_depth, opt.min_leaf});

    std::ostringstream csv;
    stoptree::write_neufeld_csv(report, csv);
    write_file(opt.out, csv.str());

    json meta;
    meta["experiment"] = "neufeld";
    meta["seed"] = opt.seed;
    meta["n"] = opt.n;
    meta["a"] = opt.a;
    meta["b"] = opt.b;
    meta["sigma"] = opt.sigma;
    meta["d"] = opt.d;
    meta["delta"] = parse_delta(opt.delta);
    meta["test_n"] = opt.test_n;
    meta["max_depth"] = opt.max_depth;
    meta["min_leaf"] = opt.min_leaf;
    write_sidecar(opt.out, meta);

    json out;
    out["experiment"] = "neufeld";
    out["selected_leaves"] = report.selection.selected_leaves;
    out["selected_index"] = report.selection.selected_index;
    out["first_split_j"] =
        report.first_split_j == static_cast<std::size_t>(-1) ? json(nullptr)
                                                             : json(report.first_split_j);
    if (std::isnan(report.first_split_threshold)) {
        out["first_split_threshold"] = nullptr;
    } else {
        out["first_split_threshold"] = report.first_split_threshold;
    }
    out["cum_p"] = report.cum_p;
    out["csv"] = opt.out;
    print_report(out);
}

struct CvContrastOptions {
    std::size_t n = 1000;
    double a = 1.0;
    double b = 1.0;
    double sigma = 1.0;
    std::size_t d = 10;
    std::size_t folds = 5;
    std::size_t reps = 500;
    std::vector<double> deltas{0.1, 0.05, 0.01};
    double train_fraction = 0.8;
    std::size_t max_depth = 4;
    std::size_t min_leaf = 20;
    std::uint64_t seed = 0;
    std::string out;
    unsigned threads = 0;
};

void run_cv_contrast(const CvContrastOptions& opt) {
    const stoptree::NeufeldConfig cfg{opt.n, opt.a, opt.b, opt.sigma, opt.d, opt.seed};
    const stoptree::CvContrastResult result = stoptree::experiment_cv_contrast(
        cfg, opt.folds, opt.reps, opt.deltas, opt.train_fraction,
        stoptree::GrowConfig{opt.max_depth, opt.min_leaf}, opt.threads);

    std::ostringstream csv;
    stoptree::write_cv_contrast_csv(result, csv);
    write_file(opt.out, csv.str());

    json meta;
    meta["experiment"] = "cv-contrast";
    meta["seed"] = opt.seed;
    meta["n"] = opt.n;
    meta["a"] = opt.a;
    meta["b"] = opt.b;
    meta["sigma"] = opt.sigma;
    meta["d"] = opt.d;
    meta["folds"] = opt.folds;
    meta["reps"] = opt.reps;
    meta["deltas"] = opt.deltas;
    meta["train_fraction"] = opt.train_fraction;
    meta["max_depth"] = opt.max_depth;
    meta["min_leaf"] = opt.min_leaf;
    write_sidecar(opt.out, meta);

    double mean_cv = 0.0;
    for (const auto& rep : result.reps) {
        mean_cv += rep.cv_rmse;
    }
    mean_cv /= static_cast<double>(result.reps.size());
    json mean_pv;
    for (std::size_t di = 0; di < opt.deltas.size(); ++di) {
        double m = 0.0;
        for (const auto& rep : result.reps) {
            m += rep.pvalue_rmse[di];
        }
        mean_pv[stoptree::format_double(opt.deltas[di])] =
            m / static_cast<double>(result.reps.size());
    }

    json report;
    report["experiment"] = "cv-contrast";
    report["reps"] = opt.reps;
    report["distinct_cv_sizes"] = result.distinct_cv_sizes();
    report["mean_cv_rmse"] = mean_cv;
    report["mean_pvalue_rmse"] = mean_pv;
    report["csv"] = opt.out;
    print_report(report);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"regression trees and L2 boosting with p-value based early stopping"};
    app.require_subcommand(1);

    FitOptions fit_opt;
    auto* fit = app.add_subcommand("fit", "fit a tree and select its size by the p-value rule");
    fit->add_option("--data", fit_opt.data, "training CSV")->required();
    fit->add_option("--target", fit_opt.target, "response column name")->required();
    fit->add_option("--features", fit_opt.features, "feature columns (default: all but target)")
        ->delimiter(',');
    fit->add_option("--delimiter", fit_opt.delimiter, "field delimiter (default ,)");
    fit->add_option("--delta", fit_opt.delta, "cumulative p-value tolerance (default 0.05)");
    fit->add_option("--max-depth", fit_opt.max_depth, "maximum tree depth (default 4)");
    fit->add_option("--min-leaf", fit_opt.min_leaf, "minimum rows per leaf (default 20)");
    fit->add_option("--out", fit_opt.out, "model output path")->required();
    fit->add_option("--sequence-out", fit_opt.sequence_out, "write the pruned sequence here");
    fit->callback([&] { run_fit(fit_opt); });

    PredictOptions pred_opt;
    auto* pred = app.add_subcommand("predict", "predict with a tree or boost model");
    pred->add_option("--model", pred_opt.model, "model JSON path")->required();
    pred->add_option("--data", pred_opt.data, "feature CSV")->required();
    pred->add_option("--features", pred_opt.features, "feature columns (default: all)")
        ->delimiter(',');
    pred->add_option("--delimiter", pred_opt.delimiter, "field delimiter (default ,)");
    pred->add_option("--out", pred_opt.out, "prediction CSV path (default stdout)");
    pred->callback([&] { run_predict(pred_opt); });

    BoostOptions boost_opt;
    auto* boost = app.add_subcommand("boost", "L2 boosting with p-value stopped weak learners");
    boost->add_option("--data", boost_opt.data, "training CSV")->required();
    boost->add_option("--target", boost_opt.target, "response column name")->required();
    boost->add_option("--features", boost_opt.features, "feature columns")->delimiter(',');
    boost->add_option("--delimiter", boost_opt.delimiter, "field delimiter (default ,)");
    boost->add_option("--delta", boost_opt.delta, "tolerance; accepts 'inf' (default 0.05)");
    boost->add_option("--learning-rate", boost_opt.learning_rate, "shrinkage (default 0.1)");
    boost->add_option("--max-depth", boost_opt.max_depth, "weak learner depth cap (default 3)");
    boost->add_option("--min-leaf", boost_opt.min_leaf, "minimum rows per leaf (default 20)");
    boost->add_option("--max-iters", boost_opt.max_iters, "iteration cap (default 10000)");
    boost->add_option("--out", boost_opt.out, "boost model output path")->required();
    boost->add_option("--log", boost_opt.log, "per-iteration CSV log path");
    boost->add_option("--test", boost_opt.test, "held-out CSV for per-iteration RMSE");
    boost->callback([&] { run_boost(boost_opt); });

    QuantileOptions q_opt;
    auto* quant = app.add_subcommand("quantile", "print the critical value u_eps");
    quant->add_option("--n", q_opt.n, "sample size (must be >= 20)")->required();
    quant->add_option("--d", q_opt.d, "covariate dimension (default 1)");
    quant->add_option("--eps", q_opt.eps, "significance level (default 0.05)");
    quant->callback([&] { run_quantile(q_opt); });

    auto* exp = app.add_subcommand("experiment", "seeded Monte Carlo experiments");
    exp->require_subcommand(1);

    NullCdfOptions nc_opt;
    auto* nc = exp->add_subcommand("null-cdf", "empirical null distribution of the statistic");
    nc->add_option("--n", nc_opt.n, "sample size")->required();
    nc->add_option("--d", nc_opt.d, "covariate dimension")->required();
    nc->add_option("--rho", nc_opt.rho, "pairwise covariate correlation (default 0)");
    nc->add_option("--mu", nc_opt.mu, "response mean (default 0)");
    nc->add_option("--sigma", nc_opt.sigma, "response sd (default 1)");
    nc->add_option("--reps", nc_opt.reps, "replications (default 10000)");
    nc->add_option("--min-leaf", nc_opt.min_leaf, "scan admissibility floor (default 1)");
    nc->add_option("--quantiles", nc_opt.quantiles, "quantile probabilities (default 0.95)")
        ->delimiter(',');
    nc->add_option("--seed", nc_opt.seed, "base seed")->required();
    nc->add_option("--out", nc_opt.out, "CSV output path")->required();
    nc->add_option("--threads", nc_opt.threads, "worker threads (default: hardware)");
    nc->callback([&] { run_null_cdf(nc_opt); });

    DetectionOptions det_opt;
    auto* det = exp->add_subcommand("detection", "signal detection fraction over sample sizes");
    det->add_option("--d", det_opt.d, "covariate dimension")->required();
    det->add_option("--rho", det_opt.rho, "pairwise covariate correlation (default 0)");
    det->add_option("--eps", det_opt.eps, "significance level (default 0.05)");
    det->add_option("--reps", det_opt.reps, "replications per grid point (default 1000)");
    det->add_option("--grid", det_opt.grid, "sample size grid (default 100..10000)")
        ->delimiter(',');
    det->add_option("--seed", det_opt.seed, "base seed")->required();
    det->add_option("--out", det_opt.out, "CSV output path")->required();
    det->add_option("--threads", det_opt.threads, "worker threads (default: hardware)");
    det->callback([&] { run_detection(det_opt); });

    NeufeldOptions nf_opt;
    auto* nf = exp->add_subcommand("neufeld", "tree recovery on the step-function generator");
    nf->add_option("--n", nf_opt.n, "training sample size (default 500)");
    nf->add_option("--a", nf_opt.a, "level-two step factor (default 1)");
    nf->add_option("--b", nf_opt.b, "signal scale (default 1)");
    nf->add_option("--sigma", nf_opt.sigma, "noise sd (default 1)");
    nf->add_option("--d", nf_opt.d, "covariate dimension (default 10)");
    nf->add_option("--delta", nf_opt.delta, "tolerance (default 0.05)");
    nf->add_option("--test-n", nf_opt.test_n, "held-out sample size (default 500)");
    nf->add_option("--max-depth", nf_opt.max_depth, "tree depth cap (default 4)");
    nf->add_option("--min-leaf", nf_opt.min_leaf, "minimum rows per leaf (default 20)");
    nf->add_option("--seed", nf_opt.seed, "base seed")->required();
    nf->add_option("--out", nf_opt.out, "CSV output path")->required();
    nf->callback([&] { run_neufeld(nf_opt); });

    CvContrastOptions cv_opt;
    auto* cv = exp->add_subcommand("cv-contrast",
                                   "cross-validation randomness vs deterministic selection");
    cv->add_option("--n", cv_opt.n, "sample size (default 1000)");
    cv->add_option("--a", cv_opt.a, "level-two step factor (default 1)");
    cv->add_option("--b", cv_opt.b, "signal scale (default 1)");
    cv->add_option("--sigma", cv_opt.sigma, "noise sd (default 1)");
    cv->add_option("--d", cv_opt.d, "covariate dimension (default 10)");
    cv->add_option("--folds", cv_opt.folds, "cross-validation folds (default 5)");
    cv->add_option("--reps", cv_opt.reps, "replications (default 500)");
    cv->add_option("--deltas", cv_opt.deltas, "tolerances (default 0.1,0.05,0.01)")
        ->delimiter(',');
    cv->add_option("--train-fraction", cv_opt.train_fraction, "train share (default 0.8)");
    cv->add_option("--max-depth", cv_opt.max_depth, "tree depth cap (default 4)");
    cv->add_option("--min-leaf", cv_opt.min_leaf, "minimum rows per leaf (default 20)");
    cv->add_option("--seed", cv_opt.seed, "base seed")->required();
    cv->add_option("--out", cv_opt.out, "CSV output path")->required();
    cv->add_option("--threads", cv_opt.threads, "worker threads (default: hardware)");
    cv->callback([&] { run_cv_contrast(cv_opt); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const stoptree::CsvError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const stoptree::SerializeError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
