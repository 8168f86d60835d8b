#include "squeezecav/errors.hpp"
#include "squeezecav/fock_oracle.hpp"
#include "squeezecav/scenario.hpp"
#include "squeezecav/steady_state.hpp"
#include "squeezecav/sts_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>

namespace squeezecav {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Horizons used when the configuration does not set tau_end.
constexpr double kEvolveHorizon = 20.0;
constexpr double kThresholdHorizon = 20.0;
constexpr double kOracleHorizon = 5.0;
constexpr double kWeakFigureHorizon = 20.0;
constexpr double kStrongFigureHorizon = 4.0;

const std::vector<double> kFig1Pumps = {0.8, 1.0, 1.2};
const std::vector<double> kFig3Pumps = {0.4, 0.6, 0.8};
const std::vector<double> kFig5Pumps = {5.0, 10.0, 50.0, 100.0};
const std::vector<double> kThresholdSweep = {1.0, 1.5, 2.0, 3.0, 5.0, 7.0, 10.0, 15.0, 20.0, 30.0, 50.0, 70.0, 100.0};
const std::vector<double> kThresholdDeltas = {0.1, 0.2};

double or_nan(const std::optional<double> &v) { return v ? *v : kNaN; }

std::vector<double> sorted_unique(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

class Runner {
  public:
    explicit Runner(const RunConfig &cfg) : cfg_(cfg) {}

    ScenarioResult run() {
        result_.summary = json::object();
        result_.summary["mode"] = std::string(to_string(cfg_.mode));
        switch (cfg_.mode) {
        case RunMode::Evolve: evolve(); break;
        case RunMode::Steady: steady(); break;
        case RunMode::Threshold: threshold(); break;
        case RunMode::OracleCompare: oracle_compare(); break;
        case RunMode::Figures: figures(); break;
        }
        return std::move(result_);
    }

  private:
    IntegrationControl control(double tau_end) const {
        IntegrationControl c;
        c.dtau = cfg_.dtau;
        c.tau_end = tau_end;
        c.sample_every = cfg_.sample_every;
        return c;
    }

    // Runs `job`, turning library errors into recorded failures.
    bool guarded(const std::string &context, const std::function<void()> &job) {
        try {
            job();
            return true;
        } catch (const Error &e) {
            result_.failures.push_back({context, to_string(e.kind()), e.what()});
            return false;
        }
    }

    std::optional<Trajectory> trajectory(double g, double tau_end, const std::string &context,
                                         const StsState &initial = StsState::vacuum()) {
        std::optional<Trajectory> traj;
        guarded(context, [&] { traj = integrate(initial, PumpConfig{g}, control(tau_end)); });
        return traj;
    }

    static json trajectory_checks(const Trajectory &t, double g) {
        double min_u = t.states.front().u;
        double min_nth = t.states.front().n_th;
        double identity = 0.0;
        bool nth_increasing = true;
        for (std::size_t i = 0; i < t.size(); ++i) {
            const auto &s = t.states[i];
            const auto &o = t.observables[i];
            min_u = std::min(min_u, s.u);
            min_nth = std::min(min_nth, s.n_th);
            identity = std::max(identity, std::abs(o.dx * o.dy - (2.0 * s.n_th + 1.0)));
            if (i >= 2 && !(s.n_th > t.states[i - 1].n_th))
                nth_increasing = false;
        }
        json checks = {
            {"g", g},
            {"min_u", min_u},
            {"min_n_th", min_nth},
            {"positivity", min_u >= 0.0 && min_nth >= 0.0},
            {"max_uncertainty_identity_residual", identity},
        };
        const double tau_end = t.tau.back();
        double du = 0.0;
        double dn = 0.0;
        for (std::size_t i = 0; i < t.size(); ++i) {
            if (t.tau[i] < 0.9 * tau_end)
                continue;
            du = std::max(du, std::abs(t.states[i].u - t.states.back().u));
            dn = std::max(dn, std::abs(t.states[i].n_th - t.states.back().n_th));
        }
        checks["last_tenth_change_u"] = du;
        checks["last_tenth_change_n_th"] = dn;
        if (g < 1.0)
            checks["saturated"] = du < 1e-6 && dn < 1e-6;
        else if (g > 1.0)
            checks["n_th_strictly_increasing"] = nth_increasing;
        return checks;
    }

    static FigureDataset trajectory_dataset(const std::string &id, const Trajectory &t) {
        FigureDataset d{id, {{"tau", t.tau}, {"u", {}}, {"n_th", {}}, {"dx", {}}, {"dy", {}}, {"dxdy", {}},
                             {"n_mean", {}}, {"n_svs", {}}, {"g2", {}}}};
        for (std::size_t i = 0; i < t.size(); ++i) {
            const auto &s = t.states[i];
            const auto &o = t.observables[i];
            d.columns[1].values.push_back(s.u);
            d.columns[2].values.push_back(s.n_th);
            d.columns[3].values.push_back(o.dx);
            d.columns[4].values.push_back(o.dy);
            d.columns[5].values.push_back(o.dx * o.dy);
            d.columns[6].values.push_back(o.n_mean);
            d.columns[7].values.push_back(svs_photon(s.u));
            d.columns[8].values.push_back(or_nan(o.g2));
        }
        return d;
    }

    void evolve() {
        const double tau_end = cfg_.tau_end.value_or(kEvolveHorizon);
        json checks = json::array();
        for (double g : sorted_unique(cfg_.g_values)) {
            const auto t = trajectory(g, tau_end, "evolve g=" + format_label(g), cfg_.initial_state);
            if (!t)
                continue;
            result_.datasets.push_back(trajectory_dataset("evolve_g" + format_label(g), *t));
            checks.push_back(trajectory_checks(*t, g));
        }
        result_.summary["tau_end"] = tau_end;
        result_.summary["trajectory_checks"] = checks;
    }

    void steady() {
        FigureDataset d{"steady",
                        {{"g", {}}, {"u_ss", {}}, {"n_th_ss", {}}, {"n_mean_ss", {}}, {"dx_ss", {}},
                         {"dy_ss", {}}, {"dxdy_ss", {}}, {"g2_ss", {}}}};
        json checks = json::array();
        for (double g : sorted_unique(cfg_.g_values)) {
            std::vector<double> row(8, kNaN);
            row[0] = g;
            row[4] = quad_limits(g).dx_ss;
            guarded("steady g=" + format_label(g), [&] {
                const auto ss = steady_state(g);
                row = {g, ss.u_ss, ss.n_th_ss, ss.n_mean_ss, ss.dx_ss, ss.dy_ss, ss.product_ss, or_nan(ss.g2_ss)};
                const auto var = quadrature_variances(ss.state());
                checks.push_back({
                    {"g", g},
                    {"sinh2_u_minus_n_th", std::abs(svs_photon(ss.u_ss) - ss.n_th_ss)},
                    {"tanh_2u_minus_g", std::abs(std::tanh(2.0 * ss.u_ss) - g)},
                    {"dx_closed_form_vs_sts", std::abs(std::sqrt(var.x) - ss.dx_ss)},
                    {"dy_closed_form_vs_sts", std::abs(std::sqrt(var.y) - ss.dy_ss)},
                });
            });
            for (std::size_t c = 0; c < row.size(); ++c)
                d.columns[c].values.push_back(row[c]);
        }
        result_.datasets.push_back(std::move(d));
        result_.summary["steady_checks"] = checks;
    }

    // Table of threshold crossings over (g, delta), sorted by g then delta.
    FigureDataset threshold_table(const std::vector<double> &gs, const std::vector<double> &deltas, double tau_end) {
        FigureDataset d{"threshold",
                        {{"g", {}}, {"delta", {}}, {"tau_star", {}}, {"dx", {}}, {"dxdy", {}}, {"n_mean", {}}, {"g2", {}}}};
        for (double g : gs) {
            for (double delta : deltas) {
                std::vector<double> row{g, delta, kNaN, kNaN, kNaN, kNaN, kNaN};
                guarded("threshold g=" + format_label(g) + " delta=" + format_label(delta), [&] {
                    const auto r = find_threshold(g, delta, control(tau_end));
                    const auto &o = r.observables_at_threshold;
                    row = {g, delta, r.tau_star, o.dx, 2.0 * r.state_at_threshold.n_th + 1.0, o.n_mean, or_nan(o.g2)};
                });
                for (std::size_t c = 0; c < row.size(); ++c)
                    d.columns[c].values.push_back(row[c]);
            }
        }
        return d;
    }

    void threshold() {
        const double tau_end = cfg_.tau_end.value_or(kThresholdHorizon);
        result_.datasets.push_back(
            threshold_table(sorted_unique(cfg_.g_values), sorted_unique(cfg_.delta_values), tau_end));
        result_.summary["tau_end"] = tau_end;
    }

    void oracle_compare() {
        const double tau_end = cfg_.tau_end.value_or(kOracleHorizon);
        FigureDataset d{"oracle_compare",
                        {{"g", {}}, {"max_dev_dx", {}}, {"max_dev_dy", {}}, {"max_dev_n_mean", {}}, {"max_dev_g2", {}},
                         {"max_trace_distance", {}}, {"max_purity_deviation", {}}, {"max_trace_drift", {}},
                         {"fock_dim", {}}, {"usable_tau_end", {}}}};
        json reports = json::array();
        OracleComparisonOptions opts;
        opts.initial_dim = cfg_.fock_dim;
        opts.evolver.max_dim = cfg_.fock_dim_max;
        for (double g : sorted_unique(cfg_.g_values)) {
            const std::string context = "oracle-compare g=" + format_label(g);
            const auto t = trajectory(g, tau_end, context, cfg_.initial_state);
            if (!t)
                continue;
            guarded(context, [&] {
                const auto r = compare_trajectories(*t, g, control(tau_end), opts);
                const std::vector<double> row{g, r.max_dev_dx, r.max_dev_dy, r.max_dev_n_mean, r.max_dev_g2,
                                              r.max_trace_distance, r.max_purity_deviation, r.max_trace_drift,
                                              static_cast<double>(r.final_dim), r.usable_tau_end};
                for (std::size_t c = 0; c < row.size(); ++c)
                    d.columns[c].values.push_back(row[c]);
                json rep = {{"g", g}, {"max_hermiticity_drift", r.max_hermiticity_drift},
                            {"samples_compared", r.samples_compared}};
                if (r.truncation_note) {
                    rep["truncation_note"] = *r.truncation_note;
                    result_.failures.push_back({context, "truncation", *r.truncation_note});
                }
                reports.push_back(rep);
            });
        }
        if (d.rows() > 0)
            result_.datasets.push_back(std::move(d));
        result_.summary["tau_end"] = tau_end;
        result_.summary["oracle_reports"] = reports;
    }

    // Series `prefix_g<label>` of one observable for several pumps on a shared grid,
    // optionally followed by constant reference columns.
    void multi_pump(const std::string &id, const std::vector<double> &pumps, double tau_end,
                    const std::string &prefix, const std::function<double(const StsState &, const ObservableSet &)> &pick,
                    const std::function<double(double)> &reference = {}) {
        FigureDataset d{id, {}};
        std::vector<Column> refs;
        for (double g : pumps) {
            const auto t = trajectory(g, tau_end, id + " g=" + format_label(g));
            if (!t)
                return;
            if (d.columns.empty())
                d.columns.push_back({"tau", t->tau});
            Column c{prefix + "_g" + format_label(g), {}};
            for (std::size_t i = 0; i < t->size(); ++i)
                c.values.push_back(pick(t->states[i], t->observables[i]));
            d.columns.push_back(std::move(c));
            if (reference)
                refs.push_back({prefix + "_ss_g" + format_label(g), std::vector<double>(t->size(), reference(g))});
        }
        for (auto &r : refs)
            d.columns.push_back(std::move(r));
        result_.datasets.push_back(std::move(d));
    }

    void figures() {
        const double weak_end = cfg_.tau_end.value_or(kWeakFigureHorizon);
        multi_pump("fig1a", kFig1Pumps, weak_end, "u", [](const StsState &s, const ObservableSet &) { return s.u; });
        multi_pump("fig1b", kFig1Pumps, weak_end, "n_th",
                   [](const StsState &s, const ObservableSet &) { return s.n_th; });

        const char *fig2_ids[] = {"fig2a", "fig2b", "fig2c"};
        for (std::size_t k = 0; k < kFig1Pumps.size(); ++k) {
            const auto t = trajectory(kFig1Pumps[k], weak_end, std::string(fig2_ids[k]));
            if (!t)
                continue;
            auto d = trajectory_dataset(fig2_ids[k], *t);
            // keep tau, dx, dy, dxdy, n_mean, n_svs
            d.columns = {d.columns[0], d.columns[3], d.columns[4], d.columns[5], d.columns[6], d.columns[7]};
            result_.datasets.push_back(std::move(d));
        }

        multi_pump(
            "fig3a", kFig3Pumps, weak_end, "dx", [](const StsState &, const ObservableSet &o) { return o.dx; },
            [](double g) { return quad_limits(g).dx_ss; });
        multi_pump(
            "fig3b", kFig3Pumps, weak_end, "dy", [](const StsState &, const ObservableSet &o) { return o.dy; },
            [](double g) { return *quad_limits(g).dy_ss; });
        multi_pump(
            "fig3c", kFig3Pumps, weak_end, "g2",
            [](const StsState &, const ObservableSet &o) { return or_nan(o.g2); }, [](double g) { return g2_ss(g); });

        FigureDataset fig4{"fig4", {{"g", {}}, {"g2_ss", {}}, {"n_mean_ss", {}}, {"n_th_ss", {}}}};
        FigureDataset inset{"fig4-inset", {{"n_mean", {}}, {"g2_sts", {}}, {"g2_svs", {}}}};
        for (int k = 1; k <= 99; ++k) {
            const double g = k / 100.0;
            const auto ss = steady_state(g);
            fig4.columns[0].values.push_back(g);
            fig4.columns[1].values.push_back(*ss.g2_ss);
            fig4.columns[2].values.push_back(ss.n_mean_ss);
            fig4.columns[3].values.push_back(ss.n_th_ss);
            inset.columns[0].values.push_back(ss.n_mean_ss);
            inset.columns[1].values.push_back(*ss.g2_ss);
            inset.columns[2].values.push_back(svs_g2(ss.n_mean_ss));
        }
        result_.datasets.push_back(std::move(fig4));
        result_.datasets.push_back(std::move(inset));

        multi_pump(
            "fig5a", kFig5Pumps, kStrongFigureHorizon, "dx",
            [](const StsState &, const ObservableSet &o) { return o.dx; },
            [](double g) { return quad_limits(g).dx_ss; });

        const auto table = threshold_table(kThresholdSweep, kThresholdDeltas, kThresholdHorizon);
        FigureDataset fig5b{"fig5b", {{"g", kThresholdSweep}}};
        FigureDataset fig6{"fig6", {{"g", kThresholdSweep}}};
        for (std::size_t j = 0; j < kThresholdDeltas.size(); ++j) {
            const std::string suffix = "_d" + format_label(kThresholdDeltas[j]);
            Column tau{"tau_star" + suffix, {}};
            Column prod{"dxdy" + suffix, {}};
            Column g2{"g2" + suffix, {}};
            for (std::size_t i = 0; i < kThresholdSweep.size(); ++i) {
                const std::size_t row = i * kThresholdDeltas.size() + j;
                tau.values.push_back(table.columns[2].values[row]);
                prod.values.push_back(table.columns[4].values[row]);
                g2.values.push_back(table.columns[6].values[row]);
            }
            fig5b.columns.push_back(std::move(tau));
            fig5b.columns.push_back(std::move(prod));
            fig6.columns.push_back(std::move(g2));
        }
        result_.datasets.push_back(std::move(fig5b));
        result_.datasets.push_back(std::move(fig6));

        json checks = json::array();
        for (double g : kFig1Pumps)
            if (const auto t = trajectory(g, weak_end, "figure checks g=" + format_label(g)))
                checks.push_back(trajectory_checks(*t, g));
        result_.summary["weak_horizon"] = weak_end;
        result_.summary["strong_horizon"] = kStrongFigureHorizon;
        result_.summary["trajectory_checks"] = checks;
    }

    const RunConfig &cfg_;
    ScenarioResult result_;
};

json config_json(const RunConfig &cfg) {
    json j = {
        {"mode", std::string(to_string(cfg.mode))},
        {"g_values", cfg.g_values},
        {"dtau", cfg.dtau},
        {"sample_every", cfg.sample_every},
        {"delta_values", cfg.delta_values},
        {"fock_dim", cfg.fock_dim},
        {"fock_dim_max", cfg.fock_dim_max},
        {"output_dir", cfg.output_dir},
        {"initial_state", {{"u", cfg.initial_state.u}, {"phi", cfg.initial_state.phi}, {"n_th", cfg.initial_state.n_th}}},
    };
    if (cfg.tau_end)
        j["tau_end"] = *cfg.tau_end;
    return j;
}

} // namespace

ScenarioResult run_scenario(const RunConfig &config) { return Runner(config).run(); }

json write_outputs(const ScenarioResult &result, const RunConfig &config) {
    const std::filesystem::path dir = config.output_dir;
    json files = json::array();
    for (const auto &d : result.datasets) {
        const auto path = emit_csv(d, dir);
        json cols = json::array();
        for (const auto &c : d.columns)
            cols.push_back(c.name);
        files.push_back({{"file", path.filename().string()}, {"figure_id", d.figure_id}, {"rows", d.rows()},
                         {"columns", cols}});
    }
    json failures = json::array();
    for (const auto &f : result.failures)
        failures.push_back({{"context", f.context}, {"kind", f.kind}, {"message", f.message}});

    json manifest = {
        {"status", result.failures.empty() ? "ok" : "failed"},
        {"parameters", config_json(config)},
        {"files", files},
        {"invariants", result.summary},
        {"failures", failures},
    };

    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    const auto path = dir / "manifest.json";
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw Error(ErrorKind::Io, "cannot open " + path.string() + " for writing");
    out << manifest.dump(2) << '\n';
    if (!out)
        throw Error(ErrorKind::Io, "write failed for " + path.string());
    return manifest;
}

} // namespace squeezecav
