// nlwave: command-line front end for the nonlocal wave-equation laboratory.
//
// Subcommands: solve, dispersion, convergence, error-bound. Options can come
// from flags or a flat `key = value` config file (flags win over the file,
// the file wins over defaults).
//
// Exit codes: 0 success, 2 configuration/parse error, 3 numerical
// precondition failure, 4 boundary wrap-around escalation (--strict-boundary).

#include <CLI11.hpp>

#include <nlwave/nlwave.hpp>

#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace nlwave;

// Flat `key = value` config support. Values from the file are appended as
// flags for any option not already given on the command line, which yields
// the precedence: explicit flags > config file > defaults.
std::vector<std::string> inject_config_args(const std::vector<std::string>& args) {
    std::string config_path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) config_path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0) config_path = args[i].substr(9);
    }
    if (config_path.empty()) return args;

    std::ifstream in(config_path);
    if (!in) throw std::invalid_argument("cannot open config file '" + config_path + "'");

    auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        const auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    auto present = [&args](const std::string& flag) {
        for (const auto& a : args)
            if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
        return false;
    };

    std::vector<std::string> out = args;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config file: expected key = value, got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (value.size() >= 2 && ((value.front() == '"' && value.back() == '"') ||
                                  (value.front() == '\'' && value.back() == '\'')))
            value = value.substr(1, value.size() - 2);
        if (key.empty()) throw std::invalid_argument("config file: empty key");
        const std::string flag = "--" + key;
        if (present(flag)) continue;
        if (value == "true" || value == "yes" || value == "on") {
            out.push_back(flag);
        } else if (value == "false" || value == "no" || value == "off") {
            // flag left unset
        } else {
            out.push_back(flag);
            out.push_back(value);
        }
    }
    return out;
}

std::vector<double> parse_time_range(const std::string& spec) {
    // "start:stop:step" or a single value
    const std::size_t c1 = spec.find(':');
    if (c1 == std::string::npos) {
        return {std::stod(spec)};
    }
    const std::size_t c2 = spec.find(':', c1 + 1);
    if (c2 == std::string::npos)
        throw std::invalid_argument("time range must be START:STOP:STEP or a single value");
    const double start = std::stod(spec.substr(0, c1));
    const double stop = std::stod(spec.substr(c1 + 1, c2 - c1 - 1));
    const double step = std::stod(spec.substr(c2 + 1));
    if (!(step > 0.0)) throw std::invalid_argument("time range step must be > 0");
    std::vector<double> out;
    // indexed form so rounding does not accumulate over long lists
    for (int i = 0;; ++i) {
        const double t = start + step * i;
        if (t > stop + 0.5 * step) break;
        out.push_back(t);
    }
    if (out.empty()) throw std::invalid_argument("time range is empty");
    return out;
}

std::vector<double> parse_double_list(const std::string& spec) {
    std::vector<double> out;
    std::size_t start = 0;
    while (start < spec.size()) {
        std::size_t comma = spec.find(',', start);
        if (comma == std::string::npos) comma = spec.size();
        const std::string item = spec.substr(start, comma - start);
        if (!item.empty()) out.push_back(std::stod(item));
        start = comma + 1;
    }
    return out;
}

// Data grammar: gaussian(sigma_d=...) | expjump(b=...,eps=...) | csv(path)
SeriesData parse_data_spec(const std::string& spec, const GridPtr& grid) {
    const std::string s = nlwave::detail::strip_spaces(spec);
    const std::size_t open = s.find('(');
    if (open == std::string::npos || s.empty() || s.back() != ')')
        throw std::invalid_argument("data spec: expected name(...), got '" + spec + "'");
    const std::string name = s.substr(0, open);
    const std::string body = s.substr(open + 1, s.size() - open - 2);

    if (name == "gaussian") {
        const auto kv = nlwave::detail::parse_kv(body);
        for (const auto& [k, v] : kv)
            if (k == "sigma_d") {
                const double sd = nlwave::detail::parse_number(v, "sigma_d");
                if (!(sd > 0.0)) throw std::invalid_argument("data spec: sigma_d must be > 0");
                return GaussianData{sd};
            }
        throw std::invalid_argument("data spec: gaussian needs sigma_d=");
    }
    if (name == "expjump") {
        const auto kv = nlwave::detail::parse_kv(body);
        double b = 0.0, eps = 0.0;
        bool have_b = false, have_eps = false;
        for (const auto& [k, v] : kv) {
            if (k == "b") {
                b = nlwave::detail::parse_number(v, "b");
                have_b = true;
            } else if (k == "eps") {
                eps = nlwave::detail::parse_number(v, "eps");
                have_eps = true;
            }
        }
        if (!have_b || !have_eps)
            throw std::invalid_argument("data spec: expjump needs b= and eps=");
        if (!(b > 0.0) || !(eps > 0.0))
            throw std::invalid_argument("data spec: expjump needs b > 0 and eps > 0");
        return ExpJumpData{b, eps};
    }
    if (name == "csv") {
        std::ifstream in(body);
        if (!in) throw std::invalid_argument("data spec: cannot open '" + body + "'");
        std::vector<double> xs, us;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            std::istringstream ls(line);
            std::string a, bcol;
            if (!std::getline(ls, a, ',') || !std::getline(ls, bcol)) continue;
            try {
                xs.push_back(std::stod(a));
                us.push_back(std::stod(bcol));
            } catch (const std::exception&) {
                continue; // header row
            }
        }
        if (xs.size() < 2) throw std::invalid_argument("data spec: csv needs >= 2 rows");
        Field f = sample_real(grid, [&](double x) -> double {
            if (x <= xs.front() || x >= xs.back()) return 0.0;
            auto it = std::upper_bound(xs.begin(), xs.end(), x);
            const std::size_t i = static_cast<std::size_t>(it - xs.begin()) - 1;
            const double w = (x - xs[i]) / (xs[i + 1] - xs[i]);
            return us[i] + w * (us[i + 1] - us[i]);
        });
        return f;
    }
    throw std::invalid_argument("data spec: unknown form '" + name + "'");
}

Field realize_data(const SeriesData& d, const GridPtr& grid) {
    if (std::holds_alternative<ZeroData>(d)) return Field(grid);
    return nlwave::detail::sample_data(grid, d);
}

std::string fmt(double v) { return nlwave::detail::fmt17(v); }

struct SolveOptions {
    std::string kernel_spec;
    std::string data_spec;
    double rho = 1.0;
    double E = 1.0;
    bool in_velocity = false;
    std::size_t grid_n = 4096;
    double grid_l = 80.0;
    std::string t_spec;
    std::string method = "spectral";
    double tol = 1e-10;
    std::string out_dir = ".";
    bool strict_boundary = false;
};

void write_solution_csv(const std::string& path, const std::vector<double>& times,
                        const std::vector<Field>& snapshots) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "t,x,u\n";
    for (std::size_t it = 0; it < times.size(); ++it) {
        const Field& u = snapshots[it];
        for (std::size_t i = 0; i < u.values.size(); ++i) {
            out << fmt(times[it]) << ',' << fmt(u.grid->point(i)) << ','
                << fmt(std::real(u.values[i])) << '\n';
        }
    }
}

void write_solve_plot_script(const std::string& path, const std::string& csv_name,
                             const std::vector<double>& times) {
    std::ofstream out(path);
    out << "# gnuplot script: waterfall of u(x, t), one trace per output time\n";
    out << "set datafile separator ','\n";
    out << "set xlabel 'x'\nset ylabel 'u + offset'\nunset key\n";
    out << "offset = 0.3\n";
    std::size_t stride = times.size() > 16 ? times.size() / 16 : 1;
    out << "plot \\\n";
    bool first = true;
    for (std::size_t i = 0; i < times.size(); i += stride) {
        if (!first) out << ", \\\n";
        first = false;
        out << "  '" << csv_name << "' using 2:($1==" << fmt(times[i]) << "?$3+" << i
            << "*offset/" << std::max<std::size_t>(times.size() - 1, 1)
            << ":1/0) with lines lw 1.2";
    }
    out << "\n";
}

// Warns when the solution has meaningful amplitude near the periodic seam,
// where wrap-around would contaminate the whole-line interpretation.
bool boundary_wraparound(const Field& u) {
    double peak = 0.0;
    for (const auto& v : u.values) peak = std::max(peak, std::abs(v));
    if (peak == 0.0) return false;
    const std::size_t n = u.values.size();
    double edge = 0.0;
    for (std::size_t i = 0; i < 8; ++i) {
        edge = std::max(edge, std::abs(u.values[i]));
        edge = std::max(edge, std::abs(u.values[n - 1 - i]));
    }
    return edge > 1e-8 * peak;
}

int run_solve(const SolveOptions& opt) {
    const GridPtr grid = make_grid(opt.grid_n, opt.grid_l);
    const std::vector<double> times = parse_time_range(opt.t_spec);

    if (opt.method != "spectral" && opt.method != "series" && opt.method != "both" &&
        opt.method != "classical")
        throw std::invalid_argument("method must be spectral|series|both|classical");

    std::optional<Micromodulus> kernel;
    if (!opt.kernel_spec.empty()) kernel = parse_micromodulus(opt.kernel_spec);
    if (opt.method != "classical" && !kernel)
        throw std::invalid_argument("solve: --kernel is required unless method=classical");

    const SeriesData data = parse_data_spec(opt.data_spec, grid);
    const SeriesData zero = ZeroData{};
    const SeriesData& xi_spec = opt.in_velocity ? zero : data;
    const SeriesData& eta_spec = opt.in_velocity ? data : zero;
    const Field xi = realize_data(xi_spec, grid);
    const Field eta = realize_data(eta_spec, grid);

    const DispersionSymbol sym = opt.method == "classical"
                                     ? classical_symbol(MaterialParams(opt.rho, opt.E), grid)
                                     : build_symbol(*kernel, opt.rho, grid);

    std::vector<Field> primary;
    std::vector<Field> series_snaps;
    for (double t : times) {
        if (opt.method == "series") {
            const SeriesPlan plan = make_series_plan(*kernel, opt.rho, t, opt.tol, grid.get());
            primary.push_back(series_propagate(plan, *kernel, grid, xi_spec, eta_spec).u);
        } else {
            primary.push_back(propagate(sym, xi, eta, t).first);
        }
        if (opt.method == "both") {
            const SeriesPlan plan = make_series_plan(*kernel, opt.rho, t, opt.tol, grid.get());
            series_snaps.push_back(series_propagate(plan, *kernel, grid, xi_spec, eta_spec).u);
        }
    }

    namespace fs = std::filesystem;
    fs::create_directories(opt.out_dir);
    const std::string sol_path = (fs::path(opt.out_dir) / "solution.csv").string();
    write_solution_csv(sol_path, times, primary);
    if (opt.method == "both")
        write_solution_csv((fs::path(opt.out_dir) / "solution_series.csv").string(), times,
                           series_snaps);

    RunReport rep = make_run_report(kernel ? &*kernel : nullptr, sym, xi, eta, times);
    rep.metadata = {{"kernel", opt.kernel_spec.empty() ? "(none)" : opt.kernel_spec},
                    {"data", opt.data_spec},
                    {"grid", "n=" + std::to_string(opt.grid_n) + " L=" + fmt(opt.grid_l)},
                    {"method", opt.method},
                    {"rho", fmt(opt.rho)},
                    {"E", fmt(opt.E)},
                    {"tol", fmt(opt.tol)}};
    write_report_csv((fs::path(opt.out_dir) / "report.csv").string(), rep);
    write_solve_plot_script((fs::path(opt.out_dir) / "plot.gp").string(), "solution.csv",
                            times);

    bool wrapped = false;
    for (std::size_t i = 0; i < primary.size(); ++i) {
        if (boundary_wraparound(primary[i])) {
            wrapped = true;
            std::cerr << "warning: boundary amplitude exceeds 1e-8 of peak at t=" << times[i]
                      << "; periodization may contaminate the solution\n";
        }
    }
    if (wrapped && opt.strict_boundary) {
        std::cerr << "error: wrap-around warning escalated by --strict-boundary\n";
        return 4;
    }
    return 0;
}

int run_dispersion(const std::string& kernel_spec, double rho, double E, std::size_t grid_n,
                   double grid_l, const std::string& out_dir) {
    if (kernel_spec.empty()) throw std::invalid_argument("dispersion: --kernel is required");
    const Micromodulus C = parse_micromodulus(kernel_spec);
    const GridPtr grid = make_grid(grid_n, grid_l);

    std::vector<double> ks(grid->frequencies());
    std::sort(ks.begin(), ks.end());

    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    std::ofstream out(fs::path(out_dir) / "dispersion.csv");
    if (!out) throw std::runtime_error("cannot open dispersion.csv");
    out << "k,lambda,lambda_classical\n";
    for (double k : ks)
        out << fmt(k) << ',' << fmt(dispersion(C, rho, k)) << ',' << fmt(E / rho * k * k)
            << '\n';

    std::ofstream plot(fs::path(out_dir) / "plot.gp");
    plot << "set datafile separator ','\n"
         << "set xlabel 'k'\nset ylabel 'lambda(k)'\nset key top left\n"
         << "plot 'dispersion.csv' every ::1 using 1:2 with lines title 'nonlocal', \\\n"
         << "     'dispersion.csv' every ::1 using 1:3 with lines title 'classical'\n";
    return 0;
}

int run_convergence(const std::string& kernel_spec, const std::string& nu_spec,
                    const std::string& data_spec, bool in_velocity, double rho, double E,
                    std::size_t grid_n, double grid_l, const std::string& t_spec,
                    const std::string& out_dir) {
    if (kernel_spec.empty()) throw std::invalid_argument("convergence: --kernel is required");
    const std::vector<double> nus = parse_double_list(nu_spec);
    if (nus.empty()) throw std::invalid_argument("convergence: --nu list is empty");

    const Micromodulus C = parse_micromodulus(kernel_spec);
    KernelFamily family;
    if (std::holds_alternative<BoxKernel>(C))
        family = KernelFamily::box;
    else if (std::holds_alternative<ScaledGaussianKernel>(C))
        family = KernelFamily::scaled_gaussian;
    else
        throw std::invalid_argument("convergence: kernel family must be box or scaled_gaussian");

    const GridPtr grid = make_grid(grid_n, grid_l);
    const double t = parse_time_range(t_spec).front();
    const SeriesData data = parse_data_spec(data_spec, grid);
    const Field sampled = realize_data(data, grid);
    const Field zero(grid);
    const Field& xi = in_velocity ? zero : sampled;
    const Field& eta = in_velocity ? sampled : zero;

    const ConvergenceRecord rec =
        convergence_study(family, nus, MaterialParams(rho, E), grid, xi, eta, t);

    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    write_convergence_csv((fs::path(out_dir) / "convergence.csv").string(), rec);
    std::ofstream plot(fs::path(out_dir) / "plot.gp");
    plot << "set datafile separator ','\n"
         << "set logscale xy\nset xlabel 'nu'\nset ylabel 'L2 error'\nunset key\n"
         << "plot 'convergence.csv' every ::1 using 1:2 with linespoints\n";
    return 0;
}

int run_errorbound(const std::string& kernel_spec, double rho, double t, double tol,
                   bool csv) {
    if (kernel_spec.empty()) throw std::invalid_argument("error-bound: --kernel is required");
    const Micromodulus C = parse_micromodulus(kernel_spec);
    const double norm = conv_operator_norm(C, rho);

    // Scan like choose_order does, printing each candidate row.
    int reached = -1;
    std::vector<TruncationBounds> rows;
    for (int N = 0; N <= series_order_cap; ++N) {
        const TruncationBounds b = truncation_bounds(N, t, norm);
        rows.push_back(b);
        if (std::max(b.bound_cos, b.bound_sin) <= tol) {
            reached = N;
            break;
        }
    }
    if (reached < 0) {
        std::cerr << "error: tolerance " << tol << " unreachable with N <= "
                  << series_order_cap << " (t = " << t << ", ||C||/rho = " << norm << ")\n";
        return 3;
    }
    if (csv) {
        std::printf("N,bound_cos,bound_sin\n");
        for (std::size_t i = 0; i < rows.size(); ++i)
            std::printf("%zu,%s,%s\n", i, fmt(rows[i].bound_cos).c_str(),
                        fmt(rows[i].bound_sin).c_str());
    } else {
        std::printf("%4s  %-24s %-24s\n", "N", "bound_cos", "bound_sin");
        for (std::size_t i = 0; i < rows.size(); ++i)
            std::printf("%4zu  %-24.16g %-24.16g\n", i, rows[i].bound_cos, rows[i].bound_sin);
        std::printf("tolerance %g met at N = %d\n", tol, reached);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"nlwave: one-dimensional nonlocal (peridynamic) wave equation laboratory"};
    app.require_subcommand(1);

    SolveOptions sopt;
    std::string nu_spec;
    bool csv_flag = false;

    std::string config_path;
    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "flat key = value configuration file");
        cmd->add_option("--kernel", sopt.kernel_spec,
                        "kernel spec, e.g. gaussian(a=1,sigma=1)");
        cmd->add_option("--rho", sopt.rho, "mass density (> 0)");
        cmd->add_option("--E", sopt.E, "Young's modulus for the classical operator");
        cmd->add_option("--grid-n", sopt.grid_n, "grid points (power of two)");
        cmd->add_option("--grid-l", sopt.grid_l, "domain length");
        cmd->add_option("--t", sopt.t_spec, "time list START:STOP:STEP or single value");
        cmd->add_option("--tol", sopt.tol, "series truncation tolerance");
        cmd->add_option("--out", sopt.out_dir, "output directory");
    };

    CLI::App* solve = app.add_subcommand("solve", "evolve initial data and write CSV outputs");
    add_common(solve);
    solve->add_option("--data", sopt.data_spec,
                      "data spec: gaussian(sigma_d=..) | expjump(b=..,eps=..) | csv(path)");
    bool in_displacement = false;
    auto* f_vel = solve->add_flag("--in-velocity", sopt.in_velocity,
                                  "data is the initial velocity (default: displacement)");
    auto* f_disp = solve->add_flag("--in-displacement", in_displacement,
                                   "data is the initial displacement (default)");
    f_vel->excludes(f_disp);
    f_disp->excludes(f_vel);
    solve->add_option("--method", sopt.method, "spectral | series | both | classical");
    solve->add_flag("--strict-boundary", sopt.strict_boundary,
                    "exit nonzero on wrap-around warnings");

    CLI::App* disp = app.add_subcommand("dispersion", "tabulate lambda(k) against (E/rho) k^2");
    add_common(disp);

    CLI::App* conv = app.add_subcommand("convergence",
                                        "L2 distance to the classical solution over a nu-family");
    add_common(conv);
    conv->add_option("--data", sopt.data_spec, "data spec");
    bool conv_in_disp = false;
    auto* cf_vel = conv->add_flag("--in-velocity", sopt.in_velocity,
                                  "data is the initial velocity");
    auto* cf_disp = conv->add_flag("--in-displacement", conv_in_disp,
                                   "data is the initial displacement (default)");
    cf_vel->excludes(cf_disp);
    cf_disp->excludes(cf_vel);
    conv->add_option("--nu", nu_spec, "comma-separated scale parameters, e.g. 1,2,4,8");

    CLI::App* eb = app.add_subcommand("error-bound", "series truncation bound table");
    add_common(eb);
    eb->add_flag("--csv", csv_flag, "machine-readable CSV to stdout");

    try {
        std::vector<std::string> args(argv + 1, argv + argc);
        args = inject_config_args(args);
        // CLI11 consumes the vector in reverse order
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        app.exit(e);
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (solve->parsed()) {
            if (sopt.t_spec.empty()) throw std::invalid_argument("solve: --t is required");
            if (sopt.data_spec.empty()) throw std::invalid_argument("solve: --data is required");
            return run_solve(sopt);
        }
        if (disp->parsed())
            return run_dispersion(sopt.kernel_spec, sopt.rho, sopt.E, sopt.grid_n, sopt.grid_l,
                                  sopt.out_dir);
        if (conv->parsed()) {
            if (sopt.t_spec.empty())
                throw std::invalid_argument("convergence: --t is required");
            if (sopt.data_spec.empty())
                throw std::invalid_argument("convergence: --data is required");
            return run_convergence(sopt.kernel_spec, nu_spec, sopt.data_spec, sopt.in_velocity,
                                   sopt.rho, sopt.E, sopt.grid_n, sopt.grid_l, sopt.t_spec,
                                   sopt.out_dir);
        }
        if (eb->parsed()) {
            if (sopt.t_spec.empty())
                throw std::invalid_argument("error-bound: --t is required");
            return run_errorbound(sopt.kernel_spec, sopt.rho,
                                  parse_time_range(sopt.t_spec).front(), sopt.tol, csv_flag);
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
