// Command-line front end: denoise, add-noise, psnr, sweep, verify.

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "graphtv/graphtv.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_bad_input = 1;
constexpr int exit_bad_flags = 2;
constexpr int exit_max_iterations = 3;

struct SolveFlags {
    double t = 0.0;
    bool continuous_t = false;
    double epsilon = 1e-5;
    std::size_t max_iter = 100000;
    graphtv::Schedule schedule = graphtv::Schedule::Sequential;
    graphtv::Stopping stopping = graphtv::Stopping::RelativeChange;
    unsigned threads = 1;
};

void add_solver_flags(CLI::App& cmd, SolveFlags& flags)
{
    const std::map<std::string, graphtv::Schedule> schedules = {
        {"sequential", graphtv::Schedule::Sequential}, {"colored", graphtv::Schedule::Colored}};
    const std::map<std::string, graphtv::Stopping> stoppings = {
        {"relative-change", graphtv::Stopping::RelativeChange},
        {"fixed-point-residual", graphtv::Stopping::FixedPointResidual}};

    cmd.add_option("--epsilon", flags.epsilon, "Stopping tolerance")->check(CLI::PositiveNumber);
    cmd.add_option("--max-iter", flags.max_iter, "Maximum number of sweeps");
    cmd.add_option("--schedule", flags.schedule, "Edge update order")
        ->transform(CLI::CheckedTransformer(schedules, CLI::ignore_case));
    cmd.add_option("--stopping", flags.stopping, "Stopping rule")
        ->transform(CLI::CheckedTransformer(stoppings, CLI::ignore_case));
    cmd.add_option("--threads", flags.threads, "Workers for the colored schedule")
        ->envname("GRAPHTV_THREADS")
        ->check(CLI::Range(1u, 1024u));
}

graphtv::SolverConfig make_config(const SolveFlags& flags)
{
    graphtv::SolverConfig cfg;
    cfg.epsilon = flags.epsilon;
    cfg.max_iterations = flags.max_iter;
    cfg.schedule = flags.schedule;
    cfg.stopping = flags.stopping;
    cfg.threads = flags.threads;
    return cfg;
}

double graph_t(const SolveFlags& flags, const graphtv::Image& img)
{
    return flags.continuous_t ? graphtv::scale_parameter(flags.t, std::max(img.width(), img.height()))
                              : flags.t;
}

struct Timed {
    graphtv::SolveResult result;
    double seconds;
};

Timed timed_solve(const graphtv::RofProblem& problem, const graphtv::SolverConfig& cfg)
{
    const auto start = std::chrono::steady_clock::now();
    auto result = graphtv::solve(problem, cfg);
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    return {std::move(result), elapsed.count()};
}

std::string format_fixed(double x, int decimals)
{
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, x);
    return buf;
}

/*
 * Expands "--config FILE" into "--key value" arguments placed right after
 * the subcommand name, so flags given on the command line (which come
 * later and win under TakeLast) override the file. The file holds
 * "key = value" lines; '#' starts a comment; "key = true" enables a flag.
 */
std::vector<std::string> expand_config(std::vector<std::string> args)
{
    auto it = std::find(args.begin(), args.end(), "--config");
    if (it == args.end()) return args;
    if (it + 1 == args.end()) throw CLI::ArgumentMismatch("--config requires a file name");
    const std::string path = *(it + 1);
    args.erase(it, it + 2);

    std::ifstream in(path);
    if (!in) throw CLI::FileError::Missing(path);
    std::vector<std::string> injected;
    std::string line;
    while (std::getline(in, line)) {
        line = line.substr(0, line.find('#'));
        const auto eq = line.find('=');
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        if (eq == std::string::npos) {
            if (!trim(line).empty()) throw CLI::ConversionError("config line without '=': " + line);
            continue;
        }
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        if (value == "true") {
            injected.push_back("--" + key);
        } else if (value != "false") {
            injected.push_back("--" + key);
            injected.push_back(value);
        }
    }
    // args[0] is the program name, args[1] the subcommand.
    const auto at = args.size() > 1 ? args.begin() + 2 : args.end();
    args.insert(at, injected.begin(), injected.end());
    return args;
}

std::vector<double> parse_t_grid(const std::string& spec)
{
    double lo = 0.0, hi = 0.0;
    long long n = 0;
    char c1 = 0, c2 = 0;
    std::istringstream is(spec);
    if (!(is >> lo >> c1 >> hi >> c2 >> n) || c1 != ':' || c2 != ':' || n < 1 || !(is >> std::ws).eof()) {
        throw CLI::ValidationError("--t-grid", "expected lo:hi:n with n >= 1");
    }
    if (!(lo > 0.0) || !(hi >= lo)) throw CLI::ValidationError("--t-grid", "need 0 < lo <= hi");
    std::vector<double> grid;
    for (long long i = 0; i < n; ++i) {
        grid.push_back(n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
    }
    return grid;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Exact total-variation denoising on graphs"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    // denoise
    SolveFlags denoise_flags;
    std::string denoise_in, denoise_out, trace_path;
    auto* denoise = app.add_subcommand("denoise", "Denoise a PGM image");
    denoise->add_option("input", denoise_in, "Input PGM")->required();
    denoise->add_option("--t", denoise_flags.t, "Regularization parameter")
        ->required()
        ->check(CLI::PositiveNumber);
    denoise->add_flag("--continuous-t", denoise_flags.continuous_t,
                      "Interpret --t on the unit square and scale by max(width, height)");
    denoise->add_option("--output", denoise_out, "Output PGM")->required();
    denoise->add_option("--trace", trace_path, "Write the per-sweep trace as CSV");
    add_solver_flags(*denoise, denoise_flags);

    // add-noise
    std::string noise_in, noise_out;
    double sigma = 0.0;
    std::uint64_t seed = 0;
    auto* add_noise = app.add_subcommand("add-noise", "Add seeded Gaussian noise to a PGM image");
    add_noise->add_option("input", noise_in, "Input PGM")->required();
    add_noise->add_option("--sigma", sigma, "Noise standard deviation")->required()->check(CLI::NonNegativeNumber);
    add_noise->add_option("--seed", seed, "Noise seed");
    add_noise->add_option("--output", noise_out, "Output PGM")->required();

    // psnr
    std::string psnr_ref, psnr_test;
    auto* psnr_cmd = app.add_subcommand("psnr", "PSNR in dB between two PGM images");
    psnr_cmd->add_option("reference", psnr_ref)->required();
    psnr_cmd->add_option("test", psnr_test)->required();

    // sweep
    SolveFlags sweep_flags;
    std::string sweep_in, sweep_out, t_grid, sweep_noisy_out;
    double sweep_sigma = 20.0;
    std::uint64_t sweep_seed = 0;
    auto* sweep = app.add_subcommand("sweep", "Grid search over t for the best PSNR");
    sweep->add_option("clean", sweep_in, "Clean reference PGM")->required();
    sweep->add_option("--sigma", sweep_sigma, "Noise standard deviation")->check(CLI::NonNegativeNumber);
    sweep->add_option("--seed", sweep_seed, "Noise seed");
    sweep->add_option("--t-grid", t_grid, "lo:hi:n, n values spaced uniformly in [lo, hi]")->required();
    sweep->add_flag("--continuous-t", sweep_flags.continuous_t, "Scale every t by max(width, height)");
    sweep->add_option("--output", sweep_out, "Write the CSV here instead of stdout");
    sweep->add_option("--noisy-output", sweep_noisy_out, "Also save the noisy input");
    add_solver_flags(*sweep, sweep_flags);

    // verify
    bool list_only = false;
    graphtv::VerifyOptions verify_options;
    auto* verify = app.add_subcommand("verify", "Run the oracle verification suite");
    verify->add_flag("--list", list_only, "Print check names without running them");
    verify->add_option("--seed", verify_options.seed, "Seed for the random instances");
    verify->add_option("--fault-clamp-scale", verify_options.clamp_bound_scale)
        ->group("")
        ->check(CLI::PositiveNumber);

    // CLI11 silently falls back to the default when an environment value
    // fails validation, so check it here.
    if (const char* env = std::getenv("GRAPHTV_THREADS"); env && *env) {
        unsigned value = 0;
        const char* end = env + std::strlen(env);
        const auto [ptr, ec] = std::from_chars(env, end, value);
        if (ec != std::errc() || ptr != end || value < 1 || value > 1024) {
            std::cerr << "error: GRAPHTV_THREADS must be an integer in [1, 1024], got '" << env << "'\n";
            return exit_bad_flags;
        }
    }

    try {
        std::vector<std::string> args(argv, argv + argc);
        args = expand_config(std::move(args));
        std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
        app.parse(std::move(reversed));
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_bad_flags;
    }

    try {
        if (*denoise) {
            graphtv::Image img(1, 1);
            try {
                img = graphtv::read_pgm(denoise_in);
            } catch (const std::exception& ex) {
                std::cerr << "error: " << ex.what() << '\n';
                return exit_bad_input;
            }
            const auto problem = graphtv::image_to_problem(img, graph_t(denoise_flags, img));
            const auto [result, seconds] = timed_solve(problem, make_config(denoise_flags));
            graphtv::write_pgm(denoise_out, graphtv::field_to_image(result.u_opt, img.width(), img.height()));
            if (!trace_path.empty()) {
                std::ofstream trace(trace_path);
                if (!trace) throw std::runtime_error("cannot open " + trace_path);
                graphtv::write_trace_csv(trace, result.report);
            }
            const bool converged = result.report.termination == graphtv::Termination::Converged;
            std::cout << "sweeps=" << result.report.iterations_run
                      << " termination=" << (converged ? "converged" : "max-iterations")
                      << " residual=" << result.report.final_residual
                      << " seconds=" << format_fixed(seconds, 3) << '\n';
            return converged ? exit_ok : exit_max_iterations;
        }

        if (*add_noise) {
            graphtv::Image img(1, 1);
            try {
                img = graphtv::read_pgm(noise_in);
            } catch (const std::exception& ex) {
                std::cerr << "error: " << ex.what() << '\n';
                return exit_bad_input;
            }
            graphtv::write_pgm(noise_out, graphtv::add_gaussian_noise(img, sigma, seed));
            return exit_ok;
        }

        if (*psnr_cmd) {
            graphtv::Image ref(1, 1), test(1, 1);
            try {
                ref = graphtv::read_pgm(psnr_ref);
                test = graphtv::read_pgm(psnr_test);
            } catch (const std::exception& ex) {
                std::cerr << "error: " << ex.what() << '\n';
                return exit_bad_input;
            }
            if (ref.width() != test.width() || ref.height() != test.height()) {
                std::cerr << "error: image sizes differ\n";
                return exit_bad_flags;
            }
            std::cout << format_fixed(graphtv::psnr(ref, test), 2) << '\n';
            return exit_ok;
        }

        if (*sweep) {
            std::vector<double> grid;
            try {
                grid = parse_t_grid(t_grid);
            } catch (const CLI::Error& e) {
                std::cerr << "error: " << e.what() << '\n';
                return exit_bad_flags;
            }
            graphtv::Image clean(1, 1);
            try {
                clean = graphtv::read_pgm(sweep_in);
            } catch (const std::exception& ex) {
                std::cerr << "error: " << ex.what() << '\n';
                return exit_bad_input;
            }
            const auto noisy = graphtv::add_gaussian_noise(clean, sweep_sigma, sweep_seed);
            if (!sweep_noisy_out.empty()) graphtv::write_pgm(sweep_noisy_out, noisy);

            std::ofstream file;
            if (!sweep_out.empty()) {
                file.open(sweep_out);
                if (!file) throw std::runtime_error("cannot open " + sweep_out);
            }
            std::ostream& csv = sweep_out.empty() ? std::cout : file;
            csv << "t,psnr,iterations,seconds\n";
            const auto base = graphtv::image_to_problem(noisy, 1.0);
            std::string best_row;
            double best_psnr = -INFINITY;
            for (double t : grid) {
                sweep_flags.t = t;
                const auto problem = base.with_t(graph_t(sweep_flags, noisy));
                const auto [result, seconds] = timed_solve(problem, make_config(sweep_flags));
                const double db = graphtv::psnr(clean, graphtv::field_to_image(result.u_opt, clean.width(), clean.height()));
                char row[160];
                std::snprintf(row, sizeof row, "%.17g,%s,%zu,%s", t, format_fixed(db, 4).c_str(),
                              result.report.iterations_run, format_fixed(seconds, 3).c_str());
                csv << row << '\n';
                if (db > best_psnr) {
                    best_psnr = db;
                    best_row = row;
                }
            }
            std::cout << "# best " << best_row << '\n';
            return exit_ok;
        }

        if (*verify) {
            if (list_only) {
                for (const auto& name : graphtv::verification_check_names()) std::cout << name << '\n';
                return exit_ok;
            }
            bool all = true;
            for (const auto& r : graphtv::run_verification(verify_options)) {
                all = all && r.passed;
                std::printf("%-4s  %-34s %s\n", r.passed ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str());
            }
            return all ? exit_ok : exit_bad_input;
        }
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return exit_bad_input;
    }
    return exit_ok;
}
