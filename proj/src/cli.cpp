#include "pollinet/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "pollinet/errors.hpp"
#include "pollinet/fluctuations.hpp"
#include "pollinet/gillespie.hpp"
#include "pollinet/kinetic.hpp"
#include "pollinet/mean_field.hpp"
#include "pollinet/rng.hpp"
#include "pollinet/runner.hpp"
#include "pollinet/single_pair.hpp"
#include "pollinet/svg.hpp"
#include "pollinet/trajectory.hpp"

namespace pollinet {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << content;
}

fs::path prepare_out_dir(const Config& cfg) {
    const std::string out = cfg.text("out");
    fs::create_directories(out);
    write_text((fs::path(out) / "resolved_config.json").string(), cfg.resolved_text());
    return out;
}

std::string config_digest(const Config& cfg) { return digest64(cfg.resolved_text()); }

Matrix matrix_from_json(const json& node, std::size_t rows, std::size_t cols, const std::string& path) {
    if (!node.is_array() || node.size() != rows) throw ConfigError(path + ": expected " + std::to_string(rows) + " rows");
    Matrix mat(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        if (!node[i].is_array() || node[i].size() != cols)
            throw ConfigError(path + ": expected " + std::to_string(cols) + " columns per row");
        for (std::size_t j = 0; j < cols; ++j) mat(i, j) = node[i][j].get<double>();
    }
    return mat;
}

}  // namespace

Community community_from_config(const Config& cfg) {
    const std::string kind = cfg.text_or("community.kind", "sampled");
    if (kind == "explicit") {
        Community comm;
        const auto x = cfg.number_list("community.x");
        const auto y = cfg.number_list("community.y");
        if (x.empty() || y.empty()) throw ConfigError("community.x and community.y must be nonempty");
        for (double v : x)
            if (v < 0.0 || v > 1.0) throw ConfigError("community.x entries must lie in [0,1]");
        for (double v : y)
            if (v < 0.0 || v > 1.0) throw ConfigError("community.y entries must lie in [0,1]");
        comm.n = static_cast<int>(x.size());
        comm.m = static_cast<int>(y.size());
        comm.x = x;
        comm.y = y;
        const Matrix g = matrix_from_json(cfg.node("community.adjacency"), comm.n, comm.m, "community.adjacency");
        const Matrix c = matrix_from_json(cfg.node("community.weights"), comm.n, comm.m, "community.weights");
        comm.g.resize(static_cast<std::size_t>(comm.n) * comm.m);
        comm.c.resize(comm.g.size());
        for (int i = 0; i < comm.n; ++i)
            for (int j = 0; j < comm.m; ++j) {
                const double gij = g(i, j);
                if (gij != 0.0 && gij != 1.0) throw ConfigError("community.adjacency entries must be 0 or 1");
                if (c(i, j) < 0.0) throw ConfigError("community.weights entries must be >= 0");
                comm.g[static_cast<std::size_t>(i) * comm.m + j] = gij != 0.0;
                comm.c[static_cast<std::size_t>(i) * comm.m + j] = c(i, j);
            }
        comm.seed = cfg.has("seed") ? cfg.seed() : 0;
        comm.spec_description = "explicit";
        comm.rebuild_neighbor_lists();
        return comm;
    }
    if (kind != "sampled") throw ConfigError("unknown community.kind: " + kind);
    const int n = static_cast<int>(cfg.integer("community.n"));
    const int m = static_cast<int>(cfg.integer("community.m"));
    if (n < 1 || m < 1) throw ConfigError("community.n and community.m must be >= 1");
    return sample_community(n, m, cfg.graphon(), cfg.harvest(), cfg.plant_cdf_inverse(), cfg.poll_cdf_inverse(),
                            cfg.seed());
}

std::pair<std::vector<double>, std::vector<double>> init_from_config(const Config& cfg, const Community& community) {
    return {cfg.init_abundances("init.plants", community.n), cfg.init_abundances("init.pollinators", community.m)};
}

namespace {

void write_community_artifacts(const Community& comm, const fs::path& dir) {
    json doc;
    doc["n"] = comm.n;
    doc["m"] = comm.m;
    doc["x"] = comm.x;
    doc["y"] = comm.y;
    doc["seed"] = comm.seed;
    doc["spec"] = comm.spec_description;
    json edges = json::array();
    for (int i = 0; i < comm.n; ++i)
        for (int j = 0; j < comm.m; ++j)
            if (comm.edge(i, j)) edges.push_back({i, j, comm.weight(i, j)});
    doc["edges"] = edges;
    write_text((dir / "community.json").string(), doc.dump(2) + "\n");

    std::string csv = "i,j,weight\n";
    for (int i = 0; i < comm.n; ++i)
        for (int j = 0; j < comm.m; ++j)
            if (comm.edge(i, j))
                csv += std::to_string(i) + "," + std::to_string(j) + "," + fmt17(comm.weight(i, j)) + "\n";
    write_text((dir / "edges.csv").string(), csv);
}

svg::Series trajectory_series(const Trajectory& traj, int coordinate, const std::string& label) {
    svg::Series s;
    s.label = label;
    for (std::size_t k = 0; k < traj.times.size(); ++k) s.points.push_back({traj.times[k], traj.values[k][coordinate]});
    return s;
}

void write_trajectory_svg(const Trajectory& traj, const std::string& title, const std::string& path) {
    std::vector<svg::Series> series;
    for (int i = 0; i < traj.n; ++i) series.push_back(trajectory_series(traj, i, "P_" + std::to_string(i + 1)));
    for (int j = 0; j < traj.m; ++j)
        series.push_back(trajectory_series(traj, traj.n + j, "A_" + std::to_string(j + 1)));
    svg::PlotOptions opt;
    opt.title = title;
    opt.x_label = "t";
    opt.y_label = "abundance";
    svg::write_lines(series, opt, path);
}

int cmd_sample_graph(const Config& cfg) {
    const fs::path dir = prepare_out_dir(cfg);
    const Community comm = community_from_config(cfg);
    write_community_artifacts(comm, dir);

    const DegreeStats stats = degree_stats(comm);
    json deg;
    deg["edgeCount"] = stats.edge_count;
    deg["plantDegrees"] = stats.plant_degrees;
    deg["pollDegrees"] = stats.poll_degrees;
    deg["plantHistogram"] = stats.plant_histogram;
    deg["pollHistogram"] = stats.poll_histogram;
    write_text((dir / "degree_stats.json").string(), deg.dump(2) + "\n");
    std::cout << "sampled community n=" << comm.n << " m=" << comm.m << " edges=" << stats.edge_count << " -> "
              << dir.string() << "\n";
    return 0;
}

std::vector<long long> to_counts(const std::vector<double>& abund, int k) {
    std::vector<long long> counts(abund.size());
    for (std::size_t i = 0; i < abund.size(); ++i) counts[i] = llround(abund[i] * k);
    return counts;
}

int cmd_simulate_ibm(const Config& cfg, int jobs) {
    const fs::path dir = prepare_out_dir(cfg);
    const Community comm = community_from_config(cfg);
    const RateParams params = cfg.rates();
    const Kernels kernels = cfg.kernels();
    const int K = static_cast<int>(cfg.integer("scale.K"));
    const double t_end = cfg.number("schedule.tEnd");
    const int replicas = static_cast<int>(cfg.integer_or("schedule.replicas", 1));
    const auto record = cfg.record_times(t_end);
    const auto [p0, a0] = init_from_config(cfg, comm);

    SimOptions opts;
    opts.event_cap = cfg.integer_or("schedule.eventCap", opts.event_cap);
    const auto results = simulate_replicas(comm, params, kernels, K, to_counts(p0, K), to_counts(a0, K), t_end, record,
                                           cfg.seed(), replicas, jobs, opts);
    const std::string digest = config_digest(cfg);
    bool budget_hit = false;
    for (int r = 0; r < replicas; ++r) {
        Trajectory traj = results[r].trajectory;
        traj.params_digest = digest;
        char name[64];
        std::snprintf(name, sizeof(name), "ibm_%03d", r);
        write_trajectory_csv(traj, (dir / (std::string(name) + ".csv")).string());
        write_trajectory_meta(traj, (dir / (std::string(name) + ".meta.json")).string());
        budget_hit |= results[r].status == SimStatus::RuntimeBudgetExceeded;
    }
    write_trajectory_svg(results.front().trajectory, "IBM sample path (replica 0)", (dir / "trajectory.svg").string());
    if (budget_hit) {
        std::cerr << "warning: event budget exceeded; partial trajectories flagged in metadata\n";
        return 3;
    }
    std::cout << "simulated " << replicas << " replicas, K=" << K << " -> " << dir.string() << "\n";
    return 0;
}

int cmd_integrate_ode(const Config& cfg) {
    const fs::path dir = prepare_out_dir(cfg);
    const Community comm = community_from_config(cfg);
    const RateParams params = cfg.rates();
    const Kernels kernels = cfg.kernels();
    const double t_end = cfg.number("schedule.tEnd");
    const auto record = cfg.record_times(t_end);
    const auto [p0, a0] = init_from_config(cfg, comm);
    std::vector<double> state = p0;
    state.insert(state.end(), a0.begin(), a0.end());

    rk45::Options opt;
    opt.rel_tol = cfg.number_or("tolerances.relTol", 1e-8);
    opt.abs_tol = cfg.number_or("tolerances.absTol", 1e-8);
    Trajectory traj = integrate_ode(state, comm, params, kernels, t_end, record, opt);
    traj.params_digest = config_digest(cfg);
    write_trajectory_csv(traj, (dir / "ode.csv").string());
    write_trajectory_meta(traj, (dir / "ode.meta.json").string());
    write_trajectory_svg(traj, "mean-field ODE", (dir / "trajectory.svg").string());
    std::cout << "integrated ODE to t=" << t_end << " -> " << dir.string() << "\n";
    return 0;
}

int cmd_simulate_fluctuations(const Config& cfg, int jobs) {
    const fs::path dir = prepare_out_dir(cfg);
    const Community comm = community_from_config(cfg);
    const RateParams params = cfg.rates();
    const Kernels kernels = cfg.kernels();
    const int K = static_cast<int>(cfg.integer("scale.K"));
    const double t_end = cfg.number("schedule.tEnd");
    const int replicas = static_cast<int>(cfg.integer_or("schedule.replicas", 100));
    const int ou_paths = static_cast<int>(cfg.integer_or("fluctuations.ouPaths", 1000));
    const double dt = cfg.number_or("fluctuations.dt", 1e-3);
    const auto record = cfg.record_times(t_end);
    const auto [p0, a0] = init_from_config(cfg, comm);
    std::vector<double> state = p0;
    state.insert(state.end(), a0.begin(), a0.end());

    const Trajectory ode = integrate_ode(state, comm, params, kernels, t_end, record);
    const auto sims = simulate_replicas(comm, params, kernels, K, to_counts(p0, K), to_counts(a0, K), t_end, record,
                                        cfg.seed(), replicas, jobs);
    std::vector<Trajectory> ibm;
    ibm.reserve(sims.size());
    for (const auto& s : sims) ibm.push_back(s.trajectory);
    const FluctuationSamples emp = empirical_fluctuations(ibm, ode, K);

    const OuDriver driver(ode, comm, params, kernels, dt, record);
    std::vector<double> eta0(comm.n + comm.m, 0.0);
    if (cfg.has("fluctuations.eta0")) eta0 = cfg.init_abundances("fluctuations.eta0", comm.n + comm.m);
    std::vector<Trajectory> ou(ou_paths);
    parallel_for(ou_paths, jobs, [&](int r) { ou[r] = driver.run(eta0, cfg.seed(), static_cast<std::uint64_t>(r)); });

    // summary per record time
    json summary;
    summary["times"] = record;
    json emp_mean = json::array(), emp_var = json::array(), ou_var = json::array();
    for (std::size_t k = 0; k < record.size(); ++k) {
        const MomentSummary ms = moments(emp.eta[k]);
        emp_mean.push_back(ms.mean);
        emp_var.push_back(ms.variance);
        std::vector<std::vector<double>> ou_rows;
        ou_rows.reserve(ou.size());
        for (const auto& path : ou) ou_rows.push_back(path.values[k]);
        ou_var.push_back(moments(ou_rows).variance);
    }
    summary["empiricalMean"] = emp_mean;
    summary["empiricalVar"] = emp_var;
    summary["ouVar"] = ou_var;
    summary["replicas"] = replicas;
    summary["ouPaths"] = ou_paths;
    write_text((dir / "fluctuations_summary.json").string(), summary.dump(2) + "\n");

    // a handful of OU paths as CSV
    const int keep = std::min(ou_paths, 10);
    for (int r = 0; r < keep; ++r) {
        Trajectory traj = ou[r];
        traj.n = comm.n;
        traj.m = comm.m;
        traj.params_digest = config_digest(cfg);
        char name[64];
        std::snprintf(name, sizeof(name), "ou_%03d.csv", r);
        write_trajectory_csv(traj, (dir / name).string());
    }
    // empirical fluctuation samples at the final time
    std::string csv = "replica";
    for (int i = 1; i <= comm.n; ++i) csv += ",etaP_" + std::to_string(i);
    for (int j = 1; j <= comm.m; ++j) csv += ",etaA_" + std::to_string(j);
    csv += "\n";
    const auto& last = emp.eta.back();
    for (std::size_t r = 0; r < last.size(); ++r) {
        csv += std::to_string(r);
        for (double v : last[r]) csv += "," + fmt17(v);
        csv += "\n";
    }
    write_text((dir / "eta_empirical.csv").string(), csv);
    std::cout << "fluctuations: " << replicas << " IBM replicas, " << ou_paths << " OU paths -> " << dir.string()
              << "\n";
    return 0;
}

DensityField initial_field(const Config& cfg, int grid_n) {
    DensityField field;
    field.N = grid_n;
    field.p.resize(grid_n + 1);
    field.a.resize(grid_n + 1);
    const DensityProfile pp = DensityProfile::parse(cfg, "init.plantDensity");
    const DensityProfile ap = DensityProfile::parse(cfg, "init.pollDensity");
    Pcg64 rng = make_rng(cfg.seed(), Stream::Init);
    auto eval = [&rng](const DensityProfile& prof, double x) {
        switch (prof.kind) {
            case DensityProfile::Kind::Constant: return prof.value;
            case DensityProfile::Kind::Linear: return prof.a + prof.b * x;
            case DensityProfile::Kind::UniformRandom: return rng.uniform(prof.lo, prof.hi);
        }
        return 0.0;
    };
    for (int i = 0; i <= grid_n; ++i) field.p[i] = eval(pp, field.gridpoint(i));
    for (int i = 0; i <= grid_n; ++i) field.a[i] = eval(ap, field.gridpoint(i));
    return field;
}

int cmd_solve_kinetic(const Config& cfg) {
    const fs::path dir = prepare_out_dir(cfg);
    const RateParams params = cfg.rates();
    const Kernels kernels = cfg.kernels();
    if (!kernels.plant.is_constant() || !kernels.poll.is_constant())
        throw ConfigError("solve-kinetic requires constant competition kernels");
    const int grid_n = static_cast<int>(cfg.integer("scale.gridN"));
    const double t_end = cfg.number("schedule.tEnd");
    const auto record = cfg.record_times(t_end);
    const GraphonSpec graphon = cfg.graphon();
    const HarvestSpec harvest = cfg.harvest();
    const Matrix psi_mat = psi_grid(graphon, harvest, grid_n);
    const DensityField field0 = initial_field(cfg, grid_n);

    rk45::Options opt;
    opt.rel_tol = cfg.number_or("tolerances.relTol", 1e-8);
    opt.abs_tol = cfg.number_or("tolerances.absTol", 1e-8);
    const auto snapshots =
        integrate_kinetic(field0, psi_mat, params, kernels.plant, kernels.poll, t_end, record, opt);

    std::vector<svg::Series> plant_curves, poll_curves;
    for (std::size_t s = 0; s < snapshots.size(); ++s) {
        const auto& snap = snapshots[s];
        std::string csv = "x,p,a\n";
        for (int i = 0; i <= grid_n; ++i)
            csv += fmt17(snap.field.gridpoint(i)) + "," + fmt17(snap.field.p[i]) + "," + fmt17(snap.field.a[i]) + "\n";
        char name[64];
        std::snprintf(name, sizeof(name), "kinetic_%03zu.csv", s);
        write_text((dir / name).string(), csv);
        svg::Series sp, sa;
        sp.label = sa.label = "t=" + std::to_string(snap.t);
        for (int i = 0; i <= grid_n; ++i) {
            sp.points.push_back({snap.field.gridpoint(i), snap.field.p[i]});
            sa.points.push_back({snap.field.gridpoint(i), snap.field.a[i]});
        }
        plant_curves.push_back(std::move(sp));
        poll_curves.push_back(std::move(sa));
    }
    svg::PlotOptions popt;
    popt.title = "plant (left) and pollinator (right) densities";
    popt.x_label = "trait";
    popt.y_label = "density";
    std::vector<double> grid(grid_n + 1);
    for (int i = 0; i <= grid_n; ++i) grid[i] = static_cast<double>(i) / grid_n;
    svg::write_density_snapshots(grid, plant_curves, poll_curves, popt, (dir / "densities.svg").string());

    const ConcentrationMetrics metrics = concentration_metrics(snapshots.back().field);
    json report;
    report["t"] = snapshots.back().t;
    report["plantArgmax"] = metrics.plant_argmax;
    report["plantArgmaxTrait"] = snapshots.back().field.gridpoint(metrics.plant_argmax);
    report["pollArgmax"] = metrics.poll_argmax;
    report["pollArgmaxTrait"] = snapshots.back().field.gridpoint(metrics.poll_argmax);
    report["plantMaxFraction"] = metrics.plant_max_fraction;
    report["pollMaxFraction"] = metrics.poll_max_fraction;
    report["plantMass"] = metrics.plant_mass;
    report["pollMass"] = metrics.poll_mass;
    const double residual =
        stationarity_residual(snapshots.back().field, psi_mat, params, kernels.plant, kernels.poll);
    report["stationarityResidual"] = residual;
    // collapse declared once both sides are essentially one atom and the
    // support is stationary
    report["collapsed"] =
        metrics.plant_max_fraction > 0.99 && metrics.poll_max_fraction > 0.99 && residual < 1e-4;
    const StableStatePrediction pred = predicted_stable_state(
        params, kernels.plant.constant_value(), kernels.poll.constant_value(),
        [&](double x, double y) { return psi(x, y, graphon, harvest); });
    report["predicted"] = {{"exists", pred.exists},
                           {"x0", pred.x0},
                           {"plantMass", pred.plant_mass},
                           {"pollMass", pred.poll_mass}};
    write_text((dir / "collapse_report.json").string(), report.dump(2) + "\n");
    std::cout << "kinetic run to t=" << t_end << ", plant argmax at "
              << snapshots.back().field.gridpoint(metrics.plant_argmax) << " -> " << dir.string() << "\n";
    return 0;
}

int cmd_analyze_pair(const Config& cfg) {
    const fs::path dir = prepare_out_dir(cfg);
    PairParams pair;
    pair.rates = cfg.rates();
    pair.c = cfg.number_or("pair.c", 1.0);
    pair.k = cfg.number_or("pair.k", 1.0);
    pair.h = cfg.number_or("pair.h", 1.0);

    const EquilibriumReport report = count_and_solve(pair);
    json doc;
    doc["assumption"] = "interaction and competition constants not fixed by the model family; using c=" +
                        fmt17(pair.c) + ", k=" + fmt17(pair.k) + ", h=" + fmt17(pair.h);
    doc["positiveCount"] = report.positive_count();
    doc["window"] = {report.window_lo, report.window_hi};
    doc["fMax"] = report.f_max;
    json eqs = json::array();
    for (const auto& eq : report.equilibria) {
        const char* s = eq.stability == Stability::Stable
                            ? "stable"
                            : (eq.stability == Stability::Unstable ? "unstable" : "nonHyperbolic");
        eqs.push_back({{"plant", eq.plant}, {"pollinator", eq.poll}, {"stability", s}});
    }
    doc["equilibria"] = eqs;
    write_text((dir / "equilibrium_report.json").string(), doc.dump(2) + "\n");

    const Nullclines nc = nullclines(pair, static_cast<int>(cfg.integer_or("pair.nullclineResolution", 400)));
    std::string csv = "branch,P,A\n";
    for (const auto& [p, a] : nc.plant) csv += "plant," + fmt17(p) + "," + fmt17(a) + "\n";
    for (const auto& [p, a] : nc.poll) csv += "pollinator," + fmt17(p) + "," + fmt17(a) + "\n";
    write_text((dir / "nullclines.csv").string(), csv);

    svg::PhasePlaneData plane;
    svg::Series plant_curve{"plant nullcline", nc.plant};
    svg::Series poll_curve{"pollinator nullcline", nc.poll};
    plane.curves = {plant_curve, poll_curve};
    for (std::size_t e = 0; e < report.equilibria.size(); ++e) {
        const auto& eq = report.equilibria[e];
        plane.markers.push_back({eq.plant, eq.poll, e == 0 ? "null" : "E" + std::to_string(e)});
    }

    const int basin_grid = static_cast<int>(cfg.integer_or("pair.basinGrid", 0));
    if (basin_grid > 1) {
        double p_max = 0.0, a_max = 0.0;
        for (const auto& eq : report.equilibria) {
            p_max = std::max(p_max, 2.0 * eq.plant);
            a_max = std::max(a_max, 2.0 * eq.poll);
        }
        if (p_max == 0.0) p_max = 1.0;
        if (a_max == 0.0) a_max = 1.0;
        std::vector<std::pair<double, double>> points;
        for (int i = 0; i < basin_grid; ++i)
            for (int j = 0; j < basin_grid; ++j)
                points.push_back({p_max * i / (basin_grid - 1.0), a_max * j / (basin_grid - 1.0)});
        const auto labels = phase_portrait(pair, points, cfg.number_or("pair.basinTEnd", 500.0));
        std::string bcsv = "P0,A0,basin\n";
        for (std::size_t q = 0; q < points.size(); ++q)
            bcsv += fmt17(points[q].first) + "," + fmt17(points[q].second) + "," + std::to_string(labels[q]) + "\n";
        write_text((dir / "basins.csv").string(), bcsv);
        for (std::size_t q = 0; q < points.size(); ++q)
            plane.basin_points.push_back({points[q].first, points[q].second, labels[q]});
    }

    svg::PlotOptions opt;
    opt.title = "phase plane (c=" + fmt17(pair.c) + ", k=" + fmt17(pair.k) + ", h=" + fmt17(pair.h) + ")";
    opt.x_label = "P";
    opt.y_label = "A";
    svg::write_phase_plane(plane, opt, (dir / "phase_plane.svg").string());

    // growth-rate curves over twice the plant positivity window
    {
        double r_max = 2.0;
        try {
            r_max = 2.0 * gp_zeros(pair.rates).upper;
        } catch (const NoViableWindow&) {
        }
        svg::Series gp_curve{"g^P", {}}, ga_curve{"g^A", {}};
        for (int s = 0; s <= 400; ++s) {
            const double r = r_max * s / 400.0;
            gp_curve.points.push_back({r, g_p(pair.rates, r)});
            ga_curve.points.push_back({r, g_a(pair.rates, r)});
        }
        svg::PlotOptions gopt;
        gopt.title = "growth rates";
        gopt.x_label = "resources R";
        gopt.y_label = "per-capita growth";
        svg::write_lines({gp_curve, ga_curve}, gopt, (dir / "growth_rates.svg").string());
    }

    std::cout << "pair analysis: " << report.positive_count() << " positive equilibria (c=" << pair.c
              << ", k=" << pair.k << ", h=" << pair.h << ") -> " << dir.string() << "\n";
    return 0;
}

int cmd_convergence_study(const Config& cfg, int jobs) {
    const fs::path dir = prepare_out_dir(cfg);
    const RateParams params = cfg.rates();
    const Kernels kernels = cfg.kernels();
    const int grid_n = static_cast<int>(cfg.integer("scale.gridN"));
    const double t_end = cfg.number("schedule.tEnd");
    const auto record = cfg.record_times(t_end);
    std::vector<int> ns;
    for (long long v : cfg.integer_list("study.ns")) ns.push_back(static_cast<int>(v));
    const int seeds = static_cast<int>(cfg.integer_or("study.seedsPerCell", 20));

    const DensityProfile pp = DensityProfile::parse(cfg, "init.plantDensity");
    const DensityProfile ap = DensityProfile::parse(cfg, "init.pollDensity");
    if (pp.kind == DensityProfile::Kind::UniformRandom || ap.kind == DensityProfile::Kind::UniformRandom)
        throw ConfigError("convergence-study needs deterministic initial densities (constant or linear)");
    auto profile_fn = [](const DensityProfile& prof) {
        return [prof](double x) { return prof.kind == DensityProfile::Kind::Constant ? prof.value : prof.a + prof.b * x; };
    };

    const auto result = convergence_study(ns, cfg.graphon(), cfg.harvest(), params, kernels, grid_n, t_end, record,
                                          cfg.seed(), seeds, profile_fn(pp), profile_fn(ap), jobs);

    std::string csv = "n,t,meanW1Plants,meanW1Pollinators\n";
    for (std::size_t ni = 0; ni < ns.size(); ++ni)
        for (std::size_t k = 0; k < record.size(); ++k)
            csv += std::to_string(ns[ni]) + "," + fmt17(record[k]) + "," + fmt17(result.mean_w1_plants(ni, k)) + "," +
                   fmt17(result.mean_w1_polls(ni, k)) + "\n";
    write_text((dir / "convergence.csv").string(), csv);

    json doc;
    doc["ns"] = ns;
    doc["times"] = record;
    json mp = json::array(), ma = json::array();
    for (std::size_t ni = 0; ni < ns.size(); ++ni) {
        json rp = json::array(), ra = json::array();
        for (std::size_t k = 0; k < record.size(); ++k) {
            rp.push_back(result.mean_w1_plants(ni, k));
            ra.push_back(result.mean_w1_polls(ni, k));
        }
        mp.push_back(rp);
        ma.push_back(ra);
    }
    doc["meanW1Plants"] = mp;
    doc["meanW1Pollinators"] = ma;
    doc["seedsPerCell"] = seeds;
    write_text((dir / "convergence.json").string(), doc.dump(2) + "\n");

    svg::Series sp{"plants", {}}, sa{"pollinators", {}};
    for (std::size_t ni = 0; ni < ns.size(); ++ni) {
        sp.points.push_back({static_cast<double>(ns[ni]), result.mean_w1_plants(ni, record.size() - 1)});
        sa.points.push_back({static_cast<double>(ns[ni]), result.mean_w1_polls(ni, record.size() - 1)});
    }
    svg::PlotOptions opt;
    opt.title = "W1 to the kinetic limit at final time";
    opt.x_label = "n";
    opt.y_label = "mean W1";
    opt.log_x = opt.log_y = true;
    opt.markers = true;
    svg::write_lines({sp, sa}, opt, (dir / "convergence.svg").string());
    std::cout << "convergence study over n in {";
    for (std::size_t ni = 0; ni < ns.size(); ++ni) std::cout << (ni ? "," : "") << ns[ni];
    std::cout << "} -> " << dir.string() << "\n";
    return 0;
}

int cmd_lln_study(const Config& cfg, int jobs) {
    const fs::path dir = prepare_out_dir(cfg);
    const Community comm = community_from_config(cfg);
    const RateParams params = cfg.rates();
    const Kernels kernels = cfg.kernels();
    const double t_end = cfg.number("schedule.tEnd");
    const int replicas = static_cast<int>(cfg.integer_or("schedule.replicas", 200));
    const auto record = cfg.record_times(t_end);
    const auto [p0, a0] = init_from_config(cfg, comm);
    std::vector<int> ks;
    for (long long v : cfg.integer_list("study.Ks")) ks.push_back(static_cast<int>(v));
    if (ks.empty()) throw ConfigError("study.Ks must be a nonempty list");

    std::vector<double> rms(ks.size(), 0.0);
    for (std::size_t ki = 0; ki < ks.size(); ++ki) {
        const int K = ks[ki];
        // the ODE starts from the rounded counts the IBM actually uses
        const auto cp = to_counts(p0, K);
        const auto ca = to_counts(a0, K);
        std::vector<double> state;
        state.reserve(cp.size() + ca.size());
        for (long long c : cp) state.push_back(static_cast<double>(c) / K);
        for (long long c : ca) state.push_back(static_cast<double>(c) / K);
        const Trajectory ode = integrate_ode(state, comm, params, kernels, t_end, record);
        const auto sims =
            simulate_replicas(comm, params, kernels, K, cp, ca, t_end, record, cfg.seed() + ki, replicas, jobs);
        double sum_sq = 0.0;
        for (const auto& sim : sims) {
            double sup = 0.0;
            for (std::size_t t = 0; t < record.size(); ++t)
                for (std::size_t c = 0; c < ode.values[t].size(); ++c)
                    sup = std::max(sup, std::abs(sim.trajectory.values[t][c] - ode.values[t][c]));
            sum_sq += sup * sup;
        }
        rms[ki] = std::sqrt(sum_sq / replicas);
    }

    std::string csv = "K,rmsSupError\n";
    for (std::size_t ki = 0; ki < ks.size(); ++ki) csv += std::to_string(ks[ki]) + "," + fmt17(rms[ki]) + "\n";
    write_text((dir / "lln.csv").string(), csv);
    json doc;
    doc["Ks"] = ks;
    doc["rmsSupError"] = rms;
    doc["replicas"] = replicas;
    write_text((dir / "lln.json").string(), doc.dump(2) + "\n");

    svg::Series s{"rms sup error", {}};
    for (std::size_t ki = 0; ki < ks.size(); ++ki) s.points.push_back({static_cast<double>(ks[ki]), rms[ki]});
    svg::PlotOptions opt;
    opt.title = "IBM vs ODE error over the K ladder";
    opt.x_label = "K";
    opt.y_label = "rms sup error";
    opt.log_x = opt.log_y = true;
    opt.markers = true;
    svg::write_lines({s}, opt, (dir / "lln.svg").string());
    std::cout << "lln study over K in {";
    for (std::size_t ki = 0; ki < ks.size(); ++ki) std::cout << (ki ? "," : "") << ks[ki];
    std::cout << "} -> " << dir.string() << "\n";
    return 0;
}

}  // namespace

int run_cli(std::vector<std::string> args) {
    CLI::App app{"pollinet: multi-scale simulator for mutualistic plant-pollinator networks"};
    app.require_subcommand(1);

    std::string config_path, out_override;
    std::uint64_t seed_override = 0;
    bool seed_set = false;
    double t_end_override = 0;
    bool t_end_set = false;
    long long k_override = 0, replicas_override = 0, grid_override = 0;
    int jobs = default_jobs();

    auto add_common = [&](CLI::App* sub, bool needs_config = true) {
        auto* copt = sub->add_option("--config", config_path, "run configuration (JSON)");
        if (needs_config) copt->required();
        sub->add_option("--out", out_override, "output directory (overrides config)");
        sub->add_option_function<std::uint64_t>(
            "--seed", [&](std::uint64_t v) { seed_override = v; seed_set = true; }, "seed (overrides config)");
        sub->add_option_function<double>(
            "--t-end", [&](double v) { t_end_override = v; t_end_set = true; }, "horizon (overrides config)");
        sub->add_option("--jobs", jobs, "max concurrent workers (default POLLINET_JOBS or hardware)");
    };

    CLI::App* sample = app.add_subcommand("sample-graph", "sample a trait-structured community");
    add_common(sample);
    CLI::App* ibm = app.add_subcommand("simulate-ibm", "exact stochastic individual-based simulation");
    add_common(ibm);
    ibm->add_option("--K", k_override, "carrying capacity (overrides config)");
    ibm->add_option("--replicas", replicas_override, "replicas (overrides config)");
    CLI::App* ode = app.add_subcommand("integrate-ode", "large-K mean-field ODE");
    add_common(ode);
    CLI::App* fluct = app.add_subcommand("simulate-fluctuations", "OU fluctuation process vs empirical fluctuations");
    add_common(fluct);
    fluct->add_option("--K", k_override, "carrying capacity (overrides config)");
    fluct->add_option("--replicas", replicas_override, "IBM replicas (overrides config)");
    CLI::App* kin = app.add_subcommand("solve-kinetic", "trait-continuum grid dynamics");
    add_common(kin);
    kin->add_option("--grid-n", grid_override, "grid resolution N (overrides config)");
    CLI::App* pair = app.add_subcommand("analyze-pair", "1x1 equilibria, nullclines and basins");
    add_common(pair);
    CLI::App* conv = app.add_subcommand("convergence-study", "empirical measures vs kinetic limit over n");
    add_common(conv);
    CLI::App* lln = app.add_subcommand("lln-study", "IBM vs ODE over a ladder of K");
    add_common(lln);
    lln->add_option("--replicas", replicas_override, "replicas per K (overrides config)");

    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        Config cfg = Config::from_file(config_path);
        if (!out_override.empty()) cfg.set("out", out_override);
        if (seed_set) cfg.set("seed", seed_override);
        if (t_end_set) cfg.set("schedule.tEnd", t_end_override);
        if (k_override > 0) cfg.set("scale.K", k_override);
        if (replicas_override > 0) cfg.set("schedule.replicas", replicas_override);
        if (grid_override > 0) cfg.set("scale.gridN", grid_override);
        if (!cfg.has("out")) throw ConfigError("missing required field: out");
        if (!cfg.has("seed")) cfg.set("seed", 0);

        if (sample->parsed()) return cmd_sample_graph(cfg);
        if (ibm->parsed()) return cmd_simulate_ibm(cfg, jobs);
        if (ode->parsed()) return cmd_integrate_ode(cfg);
        if (fluct->parsed()) return cmd_simulate_fluctuations(cfg, jobs);
        if (kin->parsed()) return cmd_solve_kinetic(cfg);
        if (pair->parsed()) return cmd_analyze_pair(cfg);
        if (conv->parsed()) return cmd_convergence_study(cfg, jobs);
        if (lln->parsed()) return cmd_lln_study(cfg, jobs);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

}  // namespace pollinet
