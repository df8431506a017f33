#pragma once

// Command-line front end: fit, pseudo, asymptotics and simulate.
//
// Exit codes: 0 success, 1 data or estimation error, 2 usage or input-format
// error. Results go to `out`, diagnostics to `err`.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ipcw/io.hpp"
#include "ipcw/ipcw.hpp"

namespace ipcw::cli {

using nlohmann::json;

struct GlobalOptions {
    std::uint64_t seed = 1;
    unsigned threads = 1;
    std::string format = "json";
};

struct DataFlags {
    std::string csv;
    double time_point = 1.0;
    std::string outcome = "failure";
    int cause = 1;
    std::string strata_col;
    int strata_k = 0;
    std::string strata_by = "x1";
    bool no_intercept = false;

    void attach(CLI::App& cmd) {
        cmd.add_option("--csv", csv, "Dataset CSV (time,status,x1..xp[,z])")->required();
        cmd.add_option("--time-point", time_point, "Horizon t defining the outcome")->required();
        cmd.add_option("--outcome", outcome, "Outcome type")
            ->check(CLI::IsMember({"survival", "failure", "restricted", "lost"}))
            ->capture_default_str();
        cmd.add_option("--cause", cause, "Event type for failure/lost outcomes")->capture_default_str();
        auto* col = cmd.add_option("--strata-col", strata_col, "Column holding integer stratum labels");
        auto* k = cmd.add_option("--strata-k", strata_k, "Bin a covariate in (0,1] into k strata")
                      ->check(CLI::PositiveNumber);
        col->excludes(k);
        cmd.add_option("--strata-by", strata_by, "Covariate binned by --strata-k")->capture_default_str()->needs(k);
        cmd.add_flag("--no-intercept", no_intercept, "Do not prepend a constant column to the design");
    }

    io::DatasetOptions options() const {
        io::DatasetOptions opt;
        opt.outcome = OutcomeSpec{parse_outcome_kind(outcome), time_point, cause};
        opt.intercept = !no_intercept;
        if (!strata_col.empty()) opt.strata_column = strata_col;
        if (strata_k > 0) {
            opt.strata_bins = strata_k;
            opt.bin_covariate = strata_by;
        }
        return opt;
    }
};

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline io::CsvTable read_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open '" + path + "'");
    return io::read_csv(in);
}

inline json vector_json(const Eigen::VectorXd& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

inline json matrix_json(const Eigen::MatrixXd& m) {
    json out = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(vector_json(m.row(i).transpose()));
    return out;
}

// ---------------------------------------------------------------------------
// fit

struct FitFlags {
    DataFlags data;
    std::string approach;
    std::string link = "identity";
    std::string a = "covariate";
    std::string response;
    std::string dump_censoring;
    int max_iter = 50;
    double tol = 1e-8;
};

inline int run_fit(const FitFlags& f, const GlobalOptions& g, std::ostream& out, std::ostream& err) {
    const io::CsvTable table = read_table(f.data.csv);
    const Dataset data = io::load_dataset(table, f.data.options());
    const Approach approach = parse_approach(f.approach);
    const ModelSpec model{parse_link(f.link), parse_a_choice(f.a)};
    const SolverOptions options{f.max_iter, f.tol};

    const auto censoring = fit_censoring(data);
    if (!f.dump_censoring.empty()) {
        std::ofstream dump(f.dump_censoring);
        if (!dump) throw UsageError("cannot write '" + f.dump_censoring + "'");
        dump << io::to_json(censoring).dump(2) << '\n';
    }

    ScoreInputs inputs;
    if (!f.response.empty()) {
        if (approach != Approach::Uncensored) throw UsageError("--response is only valid with --approach uncensored");
        const std::size_t col = table.column(f.response);
        std::vector<double> y;
        for (const auto& row : table.rows) y.push_back(row[col]);
        inputs = uncensored_inputs(y);
    } else {
        inputs = make_inputs(approach, data, censoring, g.threads);
    }

    const FitResult fit = solve(data.design(), model, inputs, options);
    if (!fit.converged) err << "warning: solver did not converge in " << fit.iterations << " iterations\n";

    std::optional<SandwichEstimate> est;
    try {
        est = sandwich(fit);
    } catch (const SingularSystem& e) {
        err << "warning: " << e.what() << '\n';
    }

    if (g.format == "csv") {
        out << "coef,beta,se,ci_lower,ci_upper\n";
        for (Eigen::Index j = 0; j < fit.beta.size(); ++j) {
            out << j << ',' << io::format_number(fit.beta[j]);
            if (est) {
                const auto ci = wald_ci(fit, *est);
                out << ',' << io::format_number(est->se_beta[j]) << ',' << io::format_number(ci[static_cast<std::size_t>(j)].lower)
                    << ',' << io::format_number(ci[static_cast<std::size_t>(j)].upper);
            } else {
                out << ",NA,NA,NA";
            }
            out << '\n';
        }
        return 0;
    }

    json doc{{"approach", to_string(approach)},
             {"link", to_string(model.link)},
             {"a", to_string(model.a_choice)},
             {"n", data.size()},
             {"strata", data.stratum_count()},
             {"beta", vector_json(fit.beta)},
             {"converged", fit.converged},
             {"iterations", fit.iterations},
             {"score_norm", fit.score_norm}};
    if (est) {
        json ci = json::array();
        for (const auto& iv : wald_ci(fit, *est)) ci.push_back({iv.lower, iv.upper});
        doc["se"] = vector_json(est->se_beta);
        doc["ci95"] = ci;
        doc["cov"] = matrix_json(est->covariance);
    } else {
        doc["se"] = nullptr;
        doc["ci95"] = nullptr;
        doc["cov"] = nullptr;
    }
    out << doc.dump(2) << '\n';
    return 0;
}

// ---------------------------------------------------------------------------
// pseudo

struct PseudoFlags {
    DataFlags data;
    std::string out_path;
};

inline int run_pseudo(const PseudoFlags& f, const GlobalOptions& g, std::ostream& out) {
    io::CsvTable table = read_table(f.data.csv);
    const Dataset data = io::load_dataset(table, f.data.options());
    const auto pseudo = pseudo_observations(data, fit_censoring(data), g.threads);
    table.header.push_back("pseudo_y");
    for (std::size_t r = 0; r < table.rows.size(); ++r) table.rows[r].push_back(pseudo.values[r]);
    if (f.out_path.empty()) {
        io::write_csv(out, table);
    } else {
        std::ofstream file(f.out_path);
        if (!file) throw UsageError("cannot write '" + f.out_path + "'");
        io::write_csv(file, table);
    }
    return 0;
}

// ---------------------------------------------------------------------------
// asymptotics

struct AsymptoticsFlags {
    double p = 0.5;
    double q = 1.0 / 6.0;
    double s = 0.2;
    std::string contrast = "b1";
};

inline int run_asymptotics(const AsymptoticsFlags& f, const GlobalOptions& g, std::ostream& out) {
    oracle::ExampleParams params;
    params.p = f.p;
    params.q = f.q;
    params.s = f.s;
    params.a = f.contrast == "b1" ? Eigen::Vector2d(0.0, 1.0) : Eigen::Vector2d(1.0, 0.0);
    const auto report = oracle::sigma_report(params);
    const auto diff = oracle::phi_differences(params);
    if (g.format == "csv") {
        out << "type,phi,phi_prime,sigma,sigma_prime\n";
        const char* names[] = {"ind", "out", "pse"};
        for (int t = 0; t < 3; ++t) {
            out << names[t] << ',' << io::format_number(report.phi[t]) << ',' << io::format_number(report.phi_prime[t])
                << ',' << io::format_number(report.sigma[t]) << ',' << io::format_number(report.sigma_prime[t]) << '\n';
        }
        return 0;
    }
    json doc = io::to_json(report);
    doc["phi_differences"] = {{"pse_out", diff.pse_out}, {"ind_out", diff.ind_out}, {"pse_ind", diff.pse_ind}};
    out << doc.dump(2) << '\n';
    return 0;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateFlags {
    int scenario = 1;
    std::string config;
    std::size_t reps = 0;
    std::string out_path;
    std::string figure_data;
};

// Expands the scenario's configuration grid. Keys are documented in docs/config.md.
inline std::vector<sim::ScenarioConfig> expand_grid(int scenario, const json& cfg, std::uint64_t seed,
                                                    std::size_t reps, unsigned threads) {
    auto list = [&](const char* key, json fallback) {
        if (!cfg.contains(key)) return fallback;
        const json& v = cfg.at(key);
        return v.is_array() ? v : json::array({v});
    };
    sim::ScenarioConfig base;
    base.seed = cfg.value("seed", seed);
    base.replications = reps > 0 ? reps : cfg.value("replications", std::size_t{10000});
    base.threads = threads;

    std::vector<sim::ScenarioConfig> grid;
    if (scenario == 1) {
        base.scenario = sim::Scenario::I;
        for (const auto& c : list("censoring", json::array({0.2, 0.8, "exp"}))) {
            for (const auto& n : list("n", json::array({50, 100, 200, 400, 800}))) {
                auto cfg_i = base;
                if (c.is_string()) {
                    if (c.get<std::string>() != "exp") throw UsageError("censoring entries are numbers or \"exp\"");
                    cfg_i.censoring = sim::CensoringLaw::exponential(1.0);
                } else {
                    cfg_i.censoring = sim::CensoringLaw::point_mass(c.get<double>());
                }
                cfg_i.n = n.get<std::size_t>();
                grid.push_back(cfg_i);
            }
        }
    } else if (scenario == 2) {
        base.scenario = sim::Scenario::II;
        for (const auto& n : list("n", json::array({1000}))) {
            for (const auto& k : list("strata_k", json::array({1, 2, 4, 8}))) {
                auto cfg_i = base;
                cfg_i.n = n.get<std::size_t>();
                cfg_i.strata_k = k.get<int>();
                grid.push_back(cfg_i);
            }
        }
    } else if (scenario == 3) {
        base.scenario = sim::Scenario::III;
        for (const auto& k : list("strata_factors", json::array({0, 1, 3, 5}))) {
            for (const auto& m : list("per_stratum", json::array({2, 6, 12}))) {
                auto cfg_i = base;
                cfg_i.strata_factors = k.get<int>();
                cfg_i.per_stratum = m.get<std::size_t>();
                grid.push_back(cfg_i);
            }
        }
    } else {
        throw UsageError("scenario must be 1, 2 or 3");
    }
    for (const auto& c : grid) c.validate();
    return grid;
}

inline std::string config_label(const sim::ScenarioConfig& c) {
    switch (c.scenario) {
        case sim::Scenario::I: return "cens=" + c.censoring.label() + ";n=" + std::to_string(c.n);
        case sim::Scenario::II: return "k=" + std::to_string(c.strata_k) + ";n=" + std::to_string(c.n);
        case sim::Scenario::III:
            return "k=" + std::to_string(c.strata_factors) + ";per_stratum=" + std::to_string(c.per_stratum);
    }
    return "";
}

inline void write_table_header(std::ostream& out, sim::Scenario scenario) {
    switch (scenario) {
        case sim::Scenario::I:
            out << "cens,n,var_ind,var_out,var_pse,varhat_ind,varhat_out,varhat_pse,cov_ind,cov_out,cov_pse\n";
            break;
        case sim::Scenario::II:
            out << "k,coef,mean_ind,mean_out,mean_pse,mean_unc,var_ind,var_out,var_pse,varhat_ind,varhat_out,varhat_pse\n";
            break;
        case sim::Scenario::III:
            out << "k,n_per_stratum,pc_ind,pc_out,pc_pse,cov_ind,cov_out,cov_pse,varhat_ind,varhat_out,varhat_pse,"
                   "var_ind,var_out,var_pse\n";
            break;
    }
}

inline double coef_metric(const sim::ApproachSummary& a, std::size_t coef, double sim::CoefficientSummary::*field) {
    return coef < a.coefficients.size() ? a.coefficients[coef].*field : NAN;
}

inline void write_table_rows(std::ostream& out, const sim::CampaignSummary& s) {
    using C = sim::CoefficientSummary;
    auto triple = [&](std::size_t coef, double C::*field) {
        std::string row;
        for (std::size_t a = 0; a < 3; ++a) row += "," + io::format_number(coef_metric(s.approaches[a], coef, field));
        return row;
    };
    const auto& c = s.config;
    switch (c.scenario) {
        case sim::Scenario::I:
            out << c.censoring.label() << ',' << c.n << triple(1, &C::scaled_mc_variance)
                << triple(1, &C::mean_scaled_sandwich) << triple(1, &C::coverage_pct) << '\n';
            break;
        case sim::Scenario::II:
            for (std::size_t coef = 1; coef <= 3; ++coef) {
                out << c.strata_k << ',' << coef << triple(coef, &C::mean_beta) << ','
                    << io::format_number(coef_metric(s.approaches[3], coef, &C::mean_beta))
                    << triple(coef, &C::scaled_mc_variance) << triple(coef, &C::mean_scaled_sandwich) << '\n';
            }
            break;
        case sim::Scenario::III: {
            out << c.strata_factors << ',' << c.per_stratum;
            for (std::size_t a = 0; a < 3; ++a) out << ',' << io::format_number(s.approaches[a].convergence_pct);
            out << triple(1, &C::coverage_pct) << triple(1, &C::median_scaled_sandwich) << triple(1, &C::mad_variance)
                << '\n';
            break;
        }
    }
}

inline void write_figure_rows(std::ostream& out, const sim::CampaignSummary& s) {
    using C = sim::CoefficientSummary;
    const std::pair<const char*, double C::*> metrics[] = {
        {"mean_beta", &C::mean_beta},
        {"scaled_mc_variance", &C::scaled_mc_variance},
        {"scaled_mc_variance_se", &C::scaled_mc_variance_se},
        {"mean_scaled_sandwich", &C::mean_scaled_sandwich},
        {"median_scaled_sandwich", &C::median_scaled_sandwich},
        {"mad_variance", &C::mad_variance},
        {"coverage_pct", &C::coverage_pct},
    };
    const std::string label = config_label(s.config);
    const int scenario = static_cast<int>(s.config.scenario);
    for (std::size_t a = 0; a < 4; ++a) {
        const auto& ap = s.approaches[a];
        const std::string name = to_string(sim::all_approaches[a]);
        out << scenario << ',' << label << ',' << name << ",,convergence_pct," << io::format_number(ap.convergence_pct)
            << '\n';
        for (std::size_t j = 0; j < ap.coefficients.size(); ++j) {
            for (const auto& [metric, field] : metrics) {
                out << scenario << ',' << label << ',' << name << ',' << j << ',' << metric << ','
                    << io::format_number(ap.coefficients[j].*field) << '\n';
            }
        }
    }
}

inline int run_simulate(const SimulateFlags& f, const GlobalOptions& g, std::ostream& out, std::ostream& err) {
    json cfg = json::object();
    if (!f.config.empty()) {
        std::ifstream in(f.config);
        if (!in) throw UsageError("cannot open '" + f.config + "'");
        try {
            cfg = json::parse(in);
        } catch (const json::exception& e) {
            throw UsageError(std::string("invalid config JSON: ") + e.what());
        }
        if (!cfg.is_object()) throw UsageError("config must be a JSON object");
    }
    std::vector<sim::ScenarioConfig> grid;
    try {
        grid = expand_grid(f.scenario, cfg, g.seed, f.reps, g.threads);
    } catch (const json::exception& e) {
        throw UsageError(std::string("invalid config value: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }

    std::ofstream table_file, figure_file;
    std::ostream* table = &out;
    if (!f.out_path.empty()) {
        table_file.open(f.out_path);
        if (!table_file) throw UsageError("cannot write '" + f.out_path + "'");
        table = &table_file;
    }
    if (!f.figure_data.empty()) {
        figure_file.open(f.figure_data);
        if (!figure_file) throw UsageError("cannot write '" + f.figure_data + "'");
        figure_file << "scenario,config,approach,coef,metric,value\n";
    }

    write_table_header(*table, grid.front().scenario);
    for (const auto& config : grid) {
        err << "simulating " << config_label(config) << " (" << config.replications << " replications)\n";
        const auto summary = sim::run_campaign(config);
        write_table_rows(*table, summary);
        table->flush();
        if (figure_file.is_open()) write_figure_rows(figure_file, summary);
    }
    return 0;
}

// ---------------------------------------------------------------------------

inline int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Inverse-probability-of-censoring-weighted regression"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions global;
    app.add_option("--seed", global.seed, "Random seed")->capture_default_str();
    app.add_option("--threads", global.threads, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
    app.add_option("--format", global.format, "Output format")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();

    FitFlags fit;
    auto* fit_cmd = app.add_subcommand("fit", "Fit one approach to a dataset");
    fit.data.attach(*fit_cmd);
    fit_cmd->add_option("--approach", fit.approach)->required()->check(CLI::IsMember({"ind", "out", "pse", "uncensored"}));
    fit_cmd->add_option("--link", fit.link)->check(CLI::IsMember({"identity", "exp", "logit"}))->capture_default_str();
    fit_cmd->add_option("--a", fit.a)->check(CLI::IsMember({"covariate", "gaussian"}))->capture_default_str();
    fit_cmd->add_option("--response", fit.response, "Regress this column directly (uncensored approach)");
    fit_cmd->add_option("--dump-censoring", fit.dump_censoring, "Write the fitted censoring curves as JSON");
    fit_cmd->add_option("--max-iter", fit.max_iter)->check(CLI::PositiveNumber)->capture_default_str();
    fit_cmd->add_option("--tol", fit.tol)->check(CLI::PositiveNumber)->capture_default_str();

    PseudoFlags pseudo;
    auto* pseudo_cmd = app.add_subcommand("pseudo", "Append jack-knife pseudo-observations as column pseudo_y");
    pseudo.data.attach(*pseudo_cmd);
    pseudo_cmd->add_option("--out", pseudo.out_path, "Output CSV (default: standard output)");

    AsymptoticsFlags asym;
    auto* asym_cmd = app.add_subcommand("asymptotics", "Closed-form variances for the two-group example");
    asym_cmd->add_option("--p", asym.p)->required();
    asym_cmd->add_option("--q", asym.q)->required();
    asym_cmd->add_option("--s", asym.s)->required();
    asym_cmd->add_option("--contrast", asym.contrast)->check(CLI::IsMember({"b1", "b0"}))->capture_default_str();

    SimulateFlags simulate;
    auto* sim_cmd = app.add_subcommand("simulate", "Run a Monte Carlo campaign");
    sim_cmd->add_option("--scenario", simulate.scenario)->required()->check(CLI::IsMember({1, 2, 3}));
    sim_cmd->add_option("--config", simulate.config, "Campaign grid JSON (see docs/config.md)");
    sim_cmd->add_option("--reps", simulate.reps, "Replications per configuration")->check(CLI::PositiveNumber);
    sim_cmd->add_option("--out", simulate.out_path, "Summary CSV (default: standard output)");
    sim_cmd->add_option("--figure-data", simulate.figure_data, "Long-format per-metric CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return 2;
    }

    try {
        if (*fit_cmd) return run_fit(fit, global, out, err);
        if (*pseudo_cmd) return run_pseudo(pseudo, global, out);
        if (*asym_cmd) return run_asymptotics(asym, global, out);
        if (*sim_cmd) return run_simulate(simulate, global, out, err);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const DataFormatError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}

}  // namespace ipcw::cli
