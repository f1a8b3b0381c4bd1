// sklpca: command-line front end for supervised kernel PCA on longitudinal data.

#include "sklpca/csv_io.hpp"
#include "sklpca/errors.hpp"
#include "sklpca/eval.hpp"
#include "sklpca/experiment.hpp"
#include "sklpca/hsic.hpp"
#include "sklpca/kernels.hpp"
#include "sklpca/mixed_model.hpp"
#include "sklpca/model_io.hpp"
#include "sklpca/reduce.hpp"
#include "sklpca/screening.hpp"
#include "sklpca/sim.hpp"
#include "sklpca/svg_plot.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace sklpca;

constexpr int kSchemaVersion = 1;

struct Globals {
    std::uint64_t seed = 0;
    unsigned threads = 1;
    int schema_version = kSchemaVersion;
};

struct ModelOptions {
    std::string method = "sklpca";
    std::string kernel = "linear";
    std::optional<double> bandwidth;
    std::string outcome_kernel = "linear";
    std::optional<double> outcome_bandwidth;
    std::optional<Eigen::Index> q;
    std::optional<Eigen::Index> q_i;
    double ridge = 0.0;
    std::string normalization = "verbatim";
    bool no_screen = false;
    double fdr = 0.1;
    bool fixed_from_heldout = false;
};

KernelSpec kernel_spec(const std::string& family, const std::optional<double>& bandwidth) {
    KernelSpec spec;
    spec.family = kernel_family_from_string(family);
    if (spec.family == KernelFamily::Gaussian) {
        spec = bandwidth ? KernelSpec::gaussian(*bandwidth) : KernelSpec::gaussian_median();
    }
    spec.validate();
    return spec;
}

void add_kernel_options(CLI::App* cmd, ModelOptions& o) {
    cmd->add_option("--kernel", o.kernel, "Feature kernel: linear or gaussian")->capture_default_str();
    cmd->add_option("--bandwidth", o.bandwidth, "Feature kernel bandwidth (default: median heuristic)");
    cmd->add_option("--outcome-kernel", o.outcome_kernel, "Outcome kernel: linear or gaussian")
        ->capture_default_str();
    cmd->add_option("--outcome-bandwidth", o.outcome_bandwidth,
                    "Outcome kernel bandwidth (default: median heuristic)");
    cmd->add_option("--normalization", o.normalization, "Subject-mean kernel scaling: verbatim or mean")
        ->capture_default_str();
}

void add_model_options(CLI::App* cmd, ModelOptions& o) {
    cmd->add_option("--method", o.method, "sklpca or skpca")->capture_default_str();
    add_kernel_options(cmd, o);
    cmd->add_option("--q", o.q, "Fixed (or pooled) component count")->check(CLI::PositiveNumber);
    cmd->add_option("--q-i", o.q_i, "Per-subject component count")->check(CLI::PositiveNumber);
    cmd->add_option("--ridge", o.ridge, "Ridge penalty of the prediction regressions")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    cmd->add_flag("--no-screen", o.no_screen, "Skip univariate FDR feature screening");
    cmd->add_option("--fdr", o.fdr, "False discovery rate of the screening step")->capture_default_str();
    cmd->add_flag("--fixed-from-heldout", o.fixed_from_heldout,
                  "Compute the fixed part of known subjects from the rows being predicted");
}

CvParams cv_params(const ModelOptions& o, const Globals& g) {
    CvParams p;
    p.feature_kernel = kernel_spec(o.kernel, o.bandwidth);
    p.outcome_kernel = kernel_spec(o.outcome_kernel, o.outcome_bandwidth);
    p.q = o.q;
    p.q_i = o.q_i;
    p.ridge_lambda = o.ridge;
    p.normalization = subject_normalization_from_string(o.normalization);
    p.fixed_source = o.fixed_from_heldout ? FixedSource::HeldOutBlock : FixedSource::TrainingEmbedding;
    p.bandwidth_seed = g.seed;
    p.threads = g.threads;
    if (!o.no_screen) {
        if (!(o.fdr > 0.0 && o.fdr <= 1.0)) {
            throw ConfigError("--fdr must lie in (0, 1]");
        }
        p.screening_fdr = o.fdr;
    }
    return p;
}

LongitudinalDataset load_data(const std::string& path) {
    LoadReport report;
    LongitudinalDataset data = load_csv_file(path, &report);
    if (report.reordered) {
        std::cerr << "note: " << path << " was not sorted by (subject_id, time); rows were reordered\n";
    }
    return data;
}

// Writes to `path`, or stdout for "-".
template <typename Fn>
void with_output(const std::string& path, Fn&& fn) {
    if (path == "-") {
        fn(std::cout);
        std::cout.flush();
        return;
    }
    std::ofstream out(path);
    if (!out) {
        throw InputError("cannot open '" + path + "' for writing");
    }
    fn(out);
    if (!out) {
        throw InputError("write to '" + path + "' failed");
    }
}

std::string na_or(double v) {
    return std::isnan(v) ? std::string("NA") : format_double(v);
}

// ---- simulate ----

struct SimulateOptions {
    bool lattice = false;
    std::string family = "linear";
    std::optional<Eigen::Index> m;
    std::optional<Eigen::Index> n;
    Eigen::Index R = 1;
    Eigen::Index D = 10;
    double sigma_b = 1.0;
    double sigma_w = 1.0;
    std::optional<double> sigma_eps;
    std::string out = "-";
};

int run_simulate(const SimulateOptions& o, const Globals& g) {
    LongitudinalDataset data;
    if (o.lattice) {
        LatticeConfig c;
        c.m = o.m.value_or(15);
        c.n_per_subject = o.n.value_or(15);
        c.sigma_b = o.sigma_b;
        c.sigma_w = o.sigma_w;
        c.sigma_eps = o.sigma_eps.value_or(0.01);
        c.seed = g.seed;
        data = simulate_lattice(c).data;
    } else {
        SimConfig c;
        c.m = o.m.value_or(50);
        c.n_per_subject = o.n.value_or(50);
        c.R = o.R;
        c.D = o.D;
        c.sigma_b = o.sigma_b;
        c.sigma_w = o.sigma_w;
        c.sigma_eps = o.sigma_eps.value_or(std::sqrt(1e-5));
        c.family = sim_family_from_string(o.family);
        c.seed = g.seed;
        data = simulate(c).data;
    }
    with_output(o.out, [&](std::ostream& out) { write_csv(out, data); });
    std::cerr << "simulated " << data.rows() << " rows, " << data.subjects() << " subjects, " << data.dims()
              << " features\n";
    return 0;
}

// ---- fit ----

struct FitOptions {
    std::string data;
    std::string out;
};

int run_fit(const FitOptions& f, const ModelOptions& o, const Globals& g) {
    const CvParams p = cv_params(o, g);
    LongitudinalDataset data = load_data(f.data);
    FittedModel model;
    model.method = method_from_string(o.method);
    model.input_dims = data.dims();
    model.fixed_source = p.fixed_source;
    model.selected_features.resize(static_cast<std::size_t>(data.dims()));
    std::iota(model.selected_features.begin(), model.selected_features.end(), Eigen::Index{0});
    if (p.screening_fdr) {
        try {
            model.selected_features = screen_features(data, *p.screening_fdr).selected;
            data = data.select_features(model.selected_features);
            std::cerr << "screening kept " << model.selected_features.size() << " of " << model.input_dims
                      << " features\n";
        } catch (const ScreeningEmptyError&) {
            std::cerr << "warning: no feature passes FDR " << *p.screening_fdr << "; screening skipped\n";
        }
    }
    if (model.method == Method::Skpca) {
        SkpcaOptions opt;
        opt.q = p.q;
        opt.bandwidth_seed = p.bandwidth_seed;
        model.skpca = fit_skpca(data, p.feature_kernel, p.outcome_kernel, opt);
        model.baseline = fit_baseline(*model.skpca, data, p.ridge_lambda);
        std::cerr << "skPCA: q = " << model.skpca->q() << "\n";
    } else {
        SklpcaOptions opt;
        opt.q = p.q;
        opt.q_i = p.q_i;
        opt.normalization = p.normalization;
        opt.bandwidth_seed = p.bandwidth_seed;
        opt.threads = p.threads;
        model.sklpca = fit_sklpca(data, p.feature_kernel, p.outcome_kernel, opt);
        model.mixed = fit_mixed(*model.sklpca, data, p.ridge_lambda);
        std::cerr << "sklPCA: q = " << model.sklpca->q() << ", subjects = " << model.sklpca->subjects.size()
                  << "\n";
    }
    save_model(f.out, model);
    return 0;
}

// ---- predict ----

struct PredictOptions {
    std::string model;
    std::string data;
    std::string out = "-";
};

int run_predict(const PredictOptions& o) {
    const FittedModel model = load_model(o.model);
    const LongitudinalDataset full = load_data(o.data);
    if (full.dims() != model.input_dims) {
        throw InputError("predict: data has " + std::to_string(full.dims()) + " features, model expects " +
                         std::to_string(model.input_dims));
    }
    const LongitudinalDataset data = full.select_features(model.selected_features);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    Eigen::VectorXd yhat = Eigen::VectorXd::Constant(data.rows(), nan);
    Eigen::VectorXd fixed = Eigen::VectorXd::Constant(data.rows(), nan);
    std::vector<int> known(static_cast<std::size_t>(data.rows()), 0);

    if (model.method == Method::Skpca) {
        yhat = predict_baseline(*model.baseline, *model.skpca, data.features);
    } else {
        const Eigen::Index min_block = model.sklpca->normalization == SubjectNormalization::Verbatim ? 2 : 1;
        for (Eigen::Index i = 0; i < data.subjects(); ++i) {
            const auto& seg = data.groups[i];
            const bool is_known = model.sklpca->groups.find(seg.subject_id).has_value();
            if (!is_known && seg.count < min_block) {
                std::cerr << "warning: unknown subject " << seg.subject_id << " has too few rows for a fixed "
                          << "prediction; written as NA\n";
                continue;
            }
            FixedSource source = model.fixed_source;
            if (seg.count < min_block) {
                source = FixedSource::TrainingEmbedding;
            }
            const std::optional<std::string> id = is_known ? std::optional(seg.subject_id) : std::nullopt;
            const MixedPrediction p =
                predict_mixed(*model.mixed, *model.sklpca, data.subject_features(i), id, source);
            yhat.segment(seg.start, seg.count) = p.values;
            fixed.segment(seg.start, seg.count) = p.fixed_part;
            for (Eigen::Index r = seg.start; r < seg.start + seg.count; ++r) {
                known[static_cast<std::size_t>(r)] = is_known ? 1 : 0;
            }
        }
    }
    with_output(o.out, [&](std::ostream& out) {
        out << "subject_id,time,y,yhat,fixed_part,known_subject\n";
        for (const auto& seg : data.groups.segments()) {
            for (Eigen::Index r = seg.start; r < seg.start + seg.count; ++r) {
                out << seg.subject_id << ',' << format_double(data.time(r)) << ','
                    << format_double(data.outcomes(r)) << ',' << na_or(yhat(r)) << ',' << na_or(fixed(r)) << ','
                    << known[static_cast<std::size_t>(r)] << '\n';
            }
        }
    });
    return 0;
}

// ---- cv ----

struct CvOptions {
    std::string data;
    int folds = 5;
    std::string strategy = "contiguous";
    std::string predictions_out;
};

int run_cv(const CvOptions& c, const ModelOptions& o, const Globals& g) {
    const CvParams p = cv_params(o, g);
    const Method method = method_from_string(o.method);
    const LongitudinalDataset data = load_data(c.data);
    const FoldPlan plan = make_folds(data, c.folds, fold_strategy_from_string(c.strategy), g.seed);
    for (const auto& id : plan.training_only) {
        std::cerr << "warning: subject " << id << " has fewer than " << c.folds << " rows; used for training only\n";
    }
    const CvResult r = cv_correlation(data, method, p, plan);
    for (const auto& f : r.flagged) {
        std::cerr << "warning: fold:subject " << f << " had fewer than 2 training rows and was left out of that fold\n";
    }
    if (r.screening_skipped > 0) {
        std::cerr << "warning: screening selected nothing in " << r.screening_skipped
                  << " fold(s); all features kept there\n";
    }
    std::cout << "method," << to_string(method) << "\n"
              << "folds," << c.folds << "\n"
              << "strategy," << c.strategy << "\n"
              << "correlation," << format_double(r.correlation) << "\n"
              << "degenerate," << (r.degenerate ? 1 : 0) << "\n"
              << "predicted_rows," << r.predicted_rows << "\n"
              << "total_rows," << data.rows() << "\n";
    if (!c.predictions_out.empty()) {
        with_output(c.predictions_out, [&](std::ostream& out) {
            out << "subject_id,time,y,yhat,fold\n";
            for (const auto& seg : data.groups.segments()) {
                for (Eigen::Index r2 = seg.start; r2 < seg.start + seg.count; ++r2) {
                    out << seg.subject_id << ',' << format_double(data.time(r2)) << ','
                        << format_double(data.outcomes(r2)) << ',' << na_or(r.predictions(r2)) << ','
                        << plan.assignments[static_cast<std::size_t>(r2)] << '\n';
                }
            }
        });
    }
    return 0;
}

// ---- experiment ----

struct ExperimentOptions {
    bool paper_grid = false;
    int reps = 20;
    bool full = false;
    bool timing = false;
    std::vector<std::string> families;
    std::vector<double> ratios;
    std::vector<Eigen::Index> ranks;
    std::vector<Eigen::Index> dims;
    std::optional<Eigen::Index> m;
    std::optional<Eigen::Index> n;
    std::string out = "-";
};

int run_experiment_cmd(const ExperimentOptions& o, const Globals& g) {
    ExperimentGrid grid = ExperimentGrid::paper_grid();
    const bool custom = !o.families.empty() || !o.ratios.empty() || !o.ranks.empty() || !o.dims.empty() ||
                        o.m.has_value() || o.n.has_value();
    if (o.paper_grid && custom) {
        throw ConfigError("--paper-grid cannot be combined with grid overrides");
    }
    if (!o.families.empty()) {
        grid.families.clear();
        for (const auto& f : o.families) grid.families.push_back(sim_family_from_string(f));
    }
    if (!o.ratios.empty()) grid.ratios = o.ratios;
    if (!o.ranks.empty()) grid.ranks = o.ranks;
    if (!o.dims.empty()) grid.dims = o.dims;
    if (o.m) grid.m = *o.m;
    if (o.n) grid.n_per_subject = *o.n;
    const int reps = o.full ? 100 : o.reps;

    const auto start = std::chrono::steady_clock::now();
    const std::vector<ExperimentResult> results = run_experiment(grid, reps, g.seed, g.threads);
    const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    with_output(o.out, [&](std::ostream& out) { write_experiment_csv(out, results, o.timing); });

    for (const auto& r : results) {
        std::cerr << to_string(r.cell.family) << " ratio=" << r.cell.ratio << " R=" << r.cell.R << " D=" << r.cell.D
                  << ' ' << to_string(r.method) << ": mean " << r.mean_corr << " sd " << r.sd_corr << " ("
                  << r.runtime_s << " s";
        if (r.failures > 0) std::cerr << ", " << r.failures << " failed";
        if (r.reps == 1) std::cerr << ", single rep";
        std::cerr << ")\n";
    }
    if (grid.families.end() !=
        std::find(grid.families.begin(), grid.families.end(), SimFamily::Radial)) {
        std::cerr << "note: radial cells use median-heuristic Gaussian bandwidths\n";
    }
    std::cerr << "total wall time " << total << " s\n";
    return 0;
}

// ---- hsic ----

struct HsicOptions {
    std::string data;
};

int run_hsic(const HsicOptions& h, const ModelOptions& o, const Globals& g) {
    const LongitudinalDataset data = load_data(h.data);
    const KernelSpec kx = resolve_bandwidth(kernel_spec(o.kernel, o.bandwidth), data.features, g.seed);
    const Eigen::MatrixXd y = data.outcomes;
    KernelSpec ky = kernel_spec(o.outcome_kernel, o.outcome_bandwidth);
    try {
        ky = resolve_bandwidth(ky, y, g.seed);
    } catch (const DegenerateDataError&) {
        // Constant outcome: every bandwidth gives a constant Gram matrix.
        ky = KernelSpec::gaussian(1.0);
    }
    const Eigen::MatrixXd k = gram(kx, data.features).values;
    const Eigen::MatrixXd l = gram(ky, y).values;
    const HsicComponents c =
        hsic_mixed(k, l, data.groups, subject_normalization_from_string(o.normalization));
    std::cout << "hsic_fixed," << format_double(c.fixed) << "\n"
              << "hsic_random," << format_double(c.random) << "\n"
              << "hsic_mixed," << format_double(c.mixed) << "\n"
              << "hsic_empirical," << format_double(hsic_empirical(k, l)) << "\n";
    return 0;
}

// ---- plot ----

struct PlotOptions {
    std::string in;
    std::string out;
    std::string kind = "auto";
    std::string title;
};

int run_plot(const PlotOptions& o) {
    const CsvTable table = read_table_file(o.in);
    std::string kind = o.kind;
    auto has = [&](const std::string& c) {
        return std::find(table.header.begin(), table.header.end(), c) != table.header.end();
    };
    if (kind == "auto") {
        kind = has("yhat") ? "predictions" : has("mean_corr") ? "experiment" : "";
        if (kind.empty()) {
            throw InputError("plot: cannot tell the input kind; expected a predictions or experiment CSV");
        }
    }
    auto number = [](const std::string& s, double& v) { return parse_double(s, v); };

    std::vector<ScatterPoint> points;
    ScatterOptions opt;
    if (kind == "predictions") {
        const std::size_t cs = table.column("subject_id"), cy = table.column("y"), ch = table.column("yhat");
        for (const auto& row : table.rows) {
            ScatterPoint p;
            if (number(row[cy], p.x) && number(row[ch], p.y)) {
                p.group = row[cs];
                points.push_back(p);
            }
        }
        opt.title = o.title.empty() ? "Predicted vs observed" : o.title;
    } else if (kind == "experiment") {
        const std::size_t cc = table.column("config"), cr = table.column("ratio"), cR = table.column("R"),
                          cD = table.column("D"), cm = table.column("method"), cv = table.column("mean_corr");
        std::map<std::string, std::pair<double, double>> cells; // key -> (skPCA, sklPCA)
        std::map<std::string, std::string> group;
        std::vector<std::string> order;
        for (const auto& row : table.rows) {
            const std::string key = row[cc] + "|" + row[cr] + "|" + row[cR] + "|" + row[cD];
            double v = 0.0;
            if (!number(row[cv], v)) continue;
            if (!cells.count(key)) {
                cells[key] = {std::nan(""), std::nan("")};
                order.push_back(key);
                group[key] = row[cc];
            }
            const Method m = method_from_string(row[cm]);
            (m == Method::Skpca ? cells[key].first : cells[key].second) = v;
        }
        for (const auto& key : order) {
            const auto [sk, skl] = cells[key];
            if (!std::isnan(sk) && !std::isnan(skl)) points.push_back({sk, skl, group[key]});
        }
        opt.title = o.title.empty() ? "Mean CV correlation per cell" : o.title;
        opt.x_label = "skPCA";
        opt.y_label = "sklPCA";
        opt.legend = true;
    } else {
        throw ConfigError("plot: --kind must be auto, predictions or experiment");
    }
    const std::string svg = scatter_svg(points, opt);
    with_output(o.out, [&](std::ostream& out) { out << svg; });
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Supervised kernel PCA for longitudinal data"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "TOML config file; command-line flags take precedence");
    app.allow_config_extras(CLI::config_extras_mode::error);

    Globals g;
    app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
    app.add_option("--threads", g.threads, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
    app.add_option("--schema_version", g.schema_version, "Config schema version")->group("");

    ModelOptions model_opts;

    SimulateOptions sim_opts;
    auto* sim = app.add_subcommand("simulate", "Write a simulated dataset as CSV");
    sim->add_flag("--lattice", sim_opts.lattice, "Deterministic lattice instead of the factorial simulation");
    sim->add_option("--family", sim_opts.family, "linear or radial")->capture_default_str();
    sim->add_option("--m", sim_opts.m, "Subjects (default 50, lattice 15)");
    sim->add_option("--n", sim_opts.n, "Rows per subject (default 50, lattice 15)");
    sim->add_option("--R", sim_opts.R, "Latent rank")->capture_default_str();
    sim->add_option("--D", sim_opts.D, "Observed dimension")->capture_default_str();
    sim->add_option("--sigma-b", sim_opts.sigma_b, "Between-subject scale")->capture_default_str();
    sim->add_option("--sigma-w", sim_opts.sigma_w, "Within-subject scale")->capture_default_str();
    sim->add_option("--sigma-eps", sim_opts.sigma_eps, "Noise SD (default sqrt(1e-5), lattice 0.01)");
    sim->add_option("--out", sim_opts.out, "Output CSV ('-' for stdout)")->capture_default_str();

    FitOptions fit_opts;
    auto* fit = app.add_subcommand("fit", "Fit a reduction and predictor, write the model as JSON");
    fit->add_option("--data", fit_opts.data, "Input CSV")->required();
    fit->add_option("--out", fit_opts.out, "Model JSON path")->required();
    add_model_options(fit, model_opts);

    PredictOptions pred_opts;
    auto* pred = app.add_subcommand("predict", "Predict outcomes for a CSV with a fitted model");
    pred->add_option("--model", pred_opts.model, "Model JSON")->required();
    pred->add_option("--data", pred_opts.data, "Input CSV")->required();
    pred->add_option("--out", pred_opts.out, "Predictions CSV ('-' for stdout)")->capture_default_str();

    CvOptions cv_opts;
    auto* cv = app.add_subcommand("cv", "Cross-validated prediction correlation");
    cv->add_option("--data", cv_opts.data, "Input CSV")->required();
    cv->add_option("--folds", cv_opts.folds, "Fold count")->capture_default_str();
    cv->add_option("--strategy", cv_opts.strategy, "contiguous or random (within subject)")->capture_default_str();
    cv->add_option("--predictions-out", cv_opts.predictions_out, "Write out-of-fold predictions CSV");
    add_model_options(cv, model_opts);

    ExperimentOptions exp_opts;
    auto* exp = app.add_subcommand("experiment", "Simulation grid comparing skPCA and sklPCA");
    exp->add_flag("--paper-grid", exp_opts.paper_grid, "Use the full 16-cell grid (the default)");
    exp->add_option("--reps", exp_opts.reps, "Replications per cell")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    exp->add_flag("--full", exp_opts.full, "Run 100 replications per cell");
    exp->add_flag("--timing", exp_opts.timing, "Write measured runtimes instead of NA");
    exp->add_option("--families", exp_opts.families, "Subset of linear, radial");
    exp->add_option("--ratios", exp_opts.ratios, "sigma_b / sigma_w values");
    exp->add_option("--ranks", exp_opts.ranks, "Latent ranks R");
    exp->add_option("--dims", exp_opts.dims, "Observed dimensions D");
    exp->add_option("--m", exp_opts.m, "Subjects per dataset");
    exp->add_option("--n", exp_opts.n, "Rows per subject");
    exp->add_option("--out", exp_opts.out, "Results CSV ('-' for stdout)")->capture_default_str();

    HsicOptions hsic_opts;
    auto* hsic = app.add_subcommand("hsic", "Fixed, random and mixed HSIC estimates");
    hsic->add_option("--data", hsic_opts.data, "Input CSV")->required();
    add_kernel_options(hsic, model_opts);

    PlotOptions plot_opts;
    auto* plot = app.add_subcommand("plot", "SVG scatter of a predictions or experiment CSV");
    plot->add_option("--in", plot_opts.in, "Predictions or experiment CSV")->required();
    plot->add_option("--out", plot_opts.out, "SVG path")->required();
    plot->add_option("--kind", plot_opts.kind, "auto, predictions or experiment")->capture_default_str();
    plot->add_option("--title", plot_opts.title, "Plot title");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (g.schema_version != kSchemaVersion) {
            throw ConfigError("unsupported config schema_version " + std::to_string(g.schema_version) +
                              " (expected " + std::to_string(kSchemaVersion) + ")");
        }
        if (sim->parsed()) return run_simulate(sim_opts, g);
        if (fit->parsed()) return run_fit(fit_opts, model_opts, g);
        if (pred->parsed()) return run_predict(pred_opts);
        if (cv->parsed()) return run_cv(cv_opts, model_opts, g);
        if (exp->parsed()) return run_experiment_cmd(exp_opts, g);
        if (hsic->parsed()) return run_hsic(hsic_opts, model_opts, g);
        if (plot->parsed()) return run_plot(plot_opts);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.is_numerical() ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
