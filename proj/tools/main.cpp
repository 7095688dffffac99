#include <cstdint>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "causalkit/dataset.hpp"
#include "causalkit/discovery.hpp"
#include "causalkit/emit.hpp"
#include "causalkit/errors.hpp"
#include "causalkit/experiment.hpp"
#include "causalkit/explain.hpp"
#include "causalkit/forest.hpp"
#include "causalkit/independence.hpp"
#include "causalkit/linear_model.hpp"
#include "causalkit/mlp.hpp"
#include "causalkit/rng.hpp"
#include "causalkit/scm.hpp"

namespace {

using namespace causalkit;

struct SampleArgs {
    std::string scm = "complex";
    std::size_t n = 10000;
    std::uint64_t seed = 0;
    std::string out;
    bool do_standardize = false;
};

struct FitArgs {
    std::string model;
    std::string data;
    std::string outcome = "Y";
    std::vector<std::string> predictors;
    std::uint64_t seed = 0;
};

struct ExplainArgs {
    std::string method;
    std::string scm = "complex";
    std::size_t n = 10000;
    std::uint64_t seed = 0;
    std::string outcome = "Y";
    std::vector<std::string> predictors;
    bool no_standardize = false;
    std::size_t test_points = 1000;
    std::size_t background = 100;
    std::string out;
    std::string svg;
};

struct AuditArgs {
    std::string scm = "complex";
    std::size_t n = 10000;
    std::uint64_t seed = 0;
    double alpha = 0.01;
    int max_cond = 3;
    std::string out;
};

struct DiscoverArgs {
    std::string test = "fisher-z";
    double alpha = 0.01;
    int max_cond = -1;  // -1: number of variables minus two
    std::string scm = "complex";
    std::string data;
    std::size_t n = 10000;
    std::uint64_t seed = 0;
    int knn_k = 3;
    int n_perm = 99;
    std::string out;
    std::string svg;
};

struct ReproduceArgs {
    std::string target;
    std::string outdir;
};

std::vector<std::string> default_predictors(const Dataset& ds, const std::string& outcome) {
    std::vector<std::string> predictors;
    for (const auto& name : ds.columns())
        if (name != outcome) predictors.push_back(name);
    return predictors;
}

void run_sample(const SampleArgs& args) {
    const Scm scm = resolve_scm(args.scm);
    Dataset ds = sample(scm, args.n, args.seed);
    if (args.do_standardize) ds = standardize(ds).first;
    write_csv(ds, args.out);
    std::cout << "wrote " << args.out << " (" << ds.n_rows() << " rows, " << ds.n_cols()
              << " columns)\n";
}

void run_fit(const FitArgs& args) {
    const Dataset data = read_csv(args.data);
    const std::vector<std::string> predictors =
        args.predictors.empty() ? default_predictors(data, args.outcome) : args.predictors;
    const auto report_mse = [&](const Model& model) {
        std::cout << "train_mse " << format_double(mse(predict(model, data), data.col(args.outcome)))
                  << "\n";
    };
    if (args.model == "lr") {
        const LinearModel lr = fit_ols(data, args.outcome, predictors);
        std::cout << "intercept " << format_double(lr.intercept()) << "\n";
        for (const auto& p : predictors)
            std::cout << "coef " << p << " " << format_double(lr.coefficient(p)) << "\n";
        report_mse(lr);
    } else if (args.model == "rf") {
        FitConfig cfg;
        const RandomForest rf = fit_forest(data, args.outcome, predictors, cfg, args.seed);
        std::cout << "trees " << rf.trees().size() << "\n";
        const ImportanceReport imps = impurity_importances(rf, predictors);
        for (std::size_t i = 0; i < predictors.size(); ++i)
            std::cout << "importance " << predictors[i] << " " << format_double(imps.raw[i])
                      << "\n";
        report_mse(rf);
    } else {
        FitConfig cfg;
        const Mlp mlp = fit_mlp(data, args.outcome, predictors, cfg, args.seed);
        std::cout << "final_loss " << format_double(mlp.loss_history().back()) << "\n";
        report_mse(mlp);
    }
}

void run_explain(const ExplainArgs& args) {
    const auto method = parse_method(args.method);
    if (!method) throw ConfigError("unknown method '" + args.method + "'");
    ExperimentConfig cfg;
    cfg.scm_source = args.scm;
    cfg.n = args.n;
    cfg.seed = args.seed;
    cfg.outcome = args.outcome;
    cfg.predictors = args.predictors;
    cfg.standardize = !args.no_standardize;
    cfg.methods = {*method};
    cfg.explain.test = args.test_points;
    cfg.explain.background = args.background;
    const ExperimentResult res = run_experiment(cfg);
    const ImportanceReport& report = res.reports.front();
    std::cout << "method predictor raw normalized\n";
    for (std::size_t i = 0; i < report.predictors.size(); ++i)
        std::cout << report.method << " " << report.predictors[i] << " "
                  << format_double(report.raw[i]) << " " << format_double(report.normalized[i])
                  << "\n";
    for (const auto& [name, value] : res.test_mse)
        std::cout << "test_mse " << name << " " << format_double(value) << "\n";
    if (!args.out.empty()) {
        emit_report_csv(res.reports, args.out);
        std::cout << "wrote " << args.out << "\n";
    }
    if (!args.svg.empty()) {
        emit_report_svg(res.reports, args.svg);
        std::cout << "wrote " << args.svg << "\n";
    }
}

void run_audit(const AuditArgs& args) {
    ExperimentConfig cfg;
    cfg.scm_source = args.scm;
    cfg.n = args.n;
    cfg.seed = args.seed;
    const AuditResult res = audit_independencies(cfg, args.alpha, args.max_cond);
    std::size_t implied = 0;
    for (const auto& row : res.rows)
        if (row.graph_independent) ++implied;
    std::cout << "audited " << res.rows.size() << " triples (" << implied << " implied independent, "
              << res.rows.size() - implied << " d-connected)\n";
    std::cout << "agreement " << format_double(res.agreement) << "\n";
    if (!args.out.empty()) {
        std::string csv = "a,b,cond,graph_independent,p_value,test_independent\n";
        for (const auto& row : res.rows) {
            std::string cond;
            for (std::size_t i = 0; i < row.cond.size(); ++i) {
                if (i > 0) cond += ' ';
                cond += row.cond[i];
            }
            csv += row.a + "," + row.b + "," + cond + "," +
                   (row.graph_independent ? "1" : "0") + "," + format_double(row.p_value) +
                   "," + (row.test_independent ? "1" : "0") + "\n";
        }
        write_text_file(args.out, csv);
        std::cout << "wrote " << args.out << "\n";
    }
}

void run_discover(const DiscoverArgs& args) {
    std::optional<Dataset> data;
    std::optional<Scm> scm;
    if (!args.data.empty()) {
        data = read_csv(args.data);
    } else {
        scm = resolve_scm(args.scm);
        data = standardize(sample(*scm, args.n, derive_seed(args.seed, std::string_view("sample"))))
                   .first;
    }
    const int max_cond =
        args.max_cond >= 0 ? args.max_cond : std::max(0, static_cast<int>(data->n_cols()) - 2);

    std::unique_ptr<CiTester> tester;
    if (args.test == "fisher-z") {
        tester = std::make_unique<FisherZTester>(*data);
    } else if (args.test == "cmi-knn") {
        tester = std::make_unique<CmiKnnTester>(*data, args.knn_k, args.n_perm,
                                                derive_seed(args.seed, std::string_view("cmi")));
    } else if (args.test == "oracle") {
        if (!scm) scm = resolve_scm(args.scm);
        tester = std::make_unique<GraphOracleTester>(scm->dag());
    } else {
        throw ConfigError("unknown CI test '" + args.test + "'");
    }

    const Cpdag g = pc(*data, *tester, args.alpha, max_cond);
    std::cout << format_cpdag(g);
    if (!args.out.empty()) {
        write_text_file(args.out, format_cpdag(g));
        std::cout << "wrote " << args.out << "\n";
    }
    if (!args.svg.empty()) {
        write_text_file(args.svg, cpdag_svg(g));
        std::cout << "wrote " << args.svg << "\n";
    }
}

void run_reproduce(const ReproduceArgs& args) {
    const auto files = reproduce(args.target, args.outdir);
    for (const auto& f : files) std::cout << "wrote " << f << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"causal-structure-aware model explainability toolkit"};
    app.require_subcommand(1);

    SampleArgs sample_args;
    auto* cmd_sample = app.add_subcommand("sample", "Draw a dataset from a structural causal model");
    cmd_sample->add_option("--scm", sample_args.scm, "Builtin name (simple, complex) or SCM JSON path");
    cmd_sample->add_option("--n", sample_args.n, "Number of rows");
    cmd_sample->add_option("--seed", sample_args.seed, "Sampling seed");
    cmd_sample->add_option("--out", sample_args.out, "Output CSV path")->required();
    cmd_sample->add_flag("--standardize", sample_args.do_standardize,
                         "Standardize columns before writing");

    FitArgs fit_args;
    auto* cmd_fit = app.add_subcommand("fit", "Fit a model on a CSV dataset");
    cmd_fit->add_option("--model", fit_args.model, "Model family")
        ->required()
        ->check(CLI::IsMember({"lr", "rf", "mlp"}));
    cmd_fit->add_option("--data", fit_args.data, "Input CSV path")->required();
    cmd_fit->add_option("--outcome", fit_args.outcome, "Outcome column");
    cmd_fit->add_option("--predictors", fit_args.predictors, "Predictor columns")
        ->delimiter(',');
    cmd_fit->add_option("--seed", fit_args.seed, "Fitting seed (rf, mlp)");

    ExplainArgs explain_args;
    auto* cmd_explain = app.add_subcommand("explain", "Run one explainability method end to end");
    cmd_explain->add_option("--method", explain_args.method, "Explainability method")
        ->required()
        ->check(CLI::IsMember({"lr-coefs", "rf-imps", "rf-shap", "nn-shap", "bi-corrs"}));
    cmd_explain->add_option("--scm", explain_args.scm, "Builtin name or SCM JSON path");
    cmd_explain->add_option("--n", explain_args.n, "Number of rows to sample");
    cmd_explain->add_option("--seed", explain_args.seed, "Experiment seed");
    cmd_explain->add_option("--outcome", explain_args.outcome, "Outcome variable");
    cmd_explain->add_option("--predictors", explain_args.predictors, "Predictor subset")
        ->delimiter(',');
    cmd_explain->add_flag("--no-standardize", explain_args.no_standardize,
                          "Skip standardization");
    cmd_explain->add_option("--test-points", explain_args.test_points,
                            "Explained test points (Shapley methods)");
    cmd_explain->add_option("--background", explain_args.background,
                            "Background rows (Shapley methods)");
    cmd_explain->add_option("--out", explain_args.out, "Report CSV path");
    cmd_explain->add_option("--svg", explain_args.svg, "Report SVG path");

    AuditArgs audit_args;
    auto* cmd_audit = app.add_subcommand(
        "audit", "Check graph-implied conditional independencies against the data");
    cmd_audit->add_option("--scm", audit_args.scm, "Builtin name or SCM JSON path");
    cmd_audit->add_option("--n", audit_args.n, "Number of rows to sample");
    cmd_audit->add_option("--seed", audit_args.seed, "Sampling seed");
    cmd_audit->add_option("--alpha", audit_args.alpha, "Test level");
    cmd_audit->add_option("--max-cond", audit_args.max_cond, "Largest conditioning set");
    cmd_audit->add_option("--out", audit_args.out, "Per-triple CSV path");

    DiscoverArgs discover_args;
    auto* cmd_discover = app.add_subcommand("discover", "Run the PC algorithm");
    cmd_discover->add_option("--test", discover_args.test, "CI test")
        ->check(CLI::IsMember({"fisher-z", "cmi-knn", "oracle"}));
    cmd_discover->add_option("--alpha", discover_args.alpha, "Test level");
    cmd_discover->add_option("--max-cond", discover_args.max_cond,
                             "Largest conditioning set (-1: variables minus two)");
    cmd_discover->add_option("--scm", discover_args.scm, "Builtin name or SCM JSON path");
    cmd_discover->add_option("--data", discover_args.data,
                             "CSV path (overrides --scm sampling)");
    cmd_discover->add_option("--n", discover_args.n, "Rows to sample when using --scm");
    cmd_discover->add_option("--seed", discover_args.seed, "Seed");
    cmd_discover->add_option("--knn-k", discover_args.knn_k, "k for cmi-knn");
    cmd_discover->add_option("--n-perm", discover_args.n_perm, "Permutations for cmi-knn");
    cmd_discover->add_option("--out", discover_args.out, "Edge-list output path");
    cmd_discover->add_option("--svg", discover_args.svg, "Graph drawing output path");

    ReproduceArgs reproduce_args;
    auto* cmd_reproduce = app.add_subcommand("reproduce", "Regenerate a published artifact");
    cmd_reproduce->add_option("--target", reproduce_args.target, "Artifact name")
        ->required()
        ->check(CLI::IsMember({"table1", "fig3", "fig4", "fig5"}));
    cmd_reproduce->add_option("--outdir", reproduce_args.outdir, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (*cmd_sample) run_sample(sample_args);
        if (*cmd_fit) run_fit(fit_args);
        if (*cmd_explain) run_explain(explain_args);
        if (*cmd_audit) run_audit(audit_args);
        if (*cmd_discover) run_discover(discover_args);
        if (*cmd_reproduce) run_reproduce(reproduce_args);
        return 0;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
