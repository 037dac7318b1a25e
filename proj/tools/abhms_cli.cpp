// abhms: theta values, mirror-symmetry verification sweeps and tables.

#include <abhms/abhms.hpp>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace abhms;

enum Exit : int { exit_pass = 0, exit_failed = 1, exit_usage = 2, exit_resource = 3 };

struct Options {
    std::optional<int> g;
    std::string tau_json;
    std::string tau_file;
    std::optional<std::uint64_t> seed;
    std::optional<double> tol;
    std::string out;
    int jobs = 1;
    std::string slopes;
    int k_max = 0;
    int d_max = 3;
    std::optional<double> a2_offset;
    double epsilon = 0.01;
    int draws = 0;
    bool timing = false;
    std::string z = "";
    std::string c = "";
    std::string d = "";
    std::string k_range = "-2,3";
    std::string scenario;
    std::string table;
};

void setup_logging() {
    auto logger = spdlog::stderr_color_mt("abhms");
    spdlog::set_default_logger(logger);
    spdlog::set_pattern("[%l] %v");
    spdlog::set_level(spdlog::level::warn);
    if (const char* env = std::getenv("ABHMS_LOG")) {
        const auto lvl = spdlog::level::from_str(env);
        // from_str maps unknown names to off; keep warn unless the user asked for off
        if (lvl != spdlog::level::off || std::string(env) == "off") spdlog::set_level(lvl);
    }
}

json parse_json_arg(const std::string& text, const char* what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        fail(ErrorKind::InvalidArgument, std::string(what) + " is not valid JSON: " + e.what());
    }
}

std::vector<int> parse_int_list(const std::string& text, const char* what) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stoi(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            fail(ErrorKind::InvalidArgument, std::string(what) + ": \"" + item + "\" is not an integer");
        }
    }
    return out;
}

/// τ from --tau, --tau-file or (absent both) nothing; at most one source may be given.
std::optional<SiegelPoint> explicit_tau(const Options& o) {
    if (!o.tau_json.empty() && !o.tau_file.empty()) fail(ErrorKind::InvalidArgument, "give only one of --tau and --tau-file");
    json j;
    if (!o.tau_json.empty()) {
        j = parse_json_arg(o.tau_json, "--tau");
    } else if (!o.tau_file.empty()) {
        std::ifstream in(o.tau_file);
        if (!in) fail(ErrorKind::InvalidArgument, "cannot read " + o.tau_file);
        try {
            j = json::parse(in);
        } catch (const json::parse_error& e) {
            fail(ErrorKind::InvalidArgument, o.tau_file + " is not valid JSON: " + e.what());
        }
    } else {
        return std::nullopt;
    }
    SiegelPoint tau = siegel_from_json(j);
    if (o.g && *o.g != tau.genus())
        fail(ErrorKind::DimensionMismatch, "--g " + std::to_string(*o.g) + " but tau has genus " + std::to_string(tau.genus()));
    return tau;
}

int resolved_genus(const Options& o, const std::optional<SiegelPoint>& tau) {
    const int g = tau ? tau->genus() : o.g.value_or(1);
    if (g < 1 || g > max_genus) fail(ErrorKind::InvalidArgument, "g must lie in 1.." + std::to_string(max_genus));
    return g;
}

SiegelPoint tau_or_random(const Options& o, int g) {
    if (auto tau = explicit_tau(o)) return *tau;
    Rng rng(o.seed.value_or(0));
    return random_siegel(rng, g);
}

RealVector real_vector_arg(const std::string& text, int g, const char* what) {
    if (text.empty()) return RealVector::Zero(g);
    const RealVector v = vector_from_json(parse_json_arg(text, what), what);
    if (v.size() != g) fail(ErrorKind::DimensionMismatch, std::string(what) + " must have g entries");
    return v;
}

int cmd_theta(const Options& o) {
    const auto fixed = explicit_tau(o);
    const int g = resolved_genus(o, fixed);
    const SiegelPoint tau = fixed ? *fixed : tau_or_random(o, g);
    const ComplexVector z = o.z.empty() ? ComplexVector::Zero(g) : complex_vector_from_json(parse_json_arg(o.z, "--z"), g, "--z");
    const ThetaChar ch{real_vector_arg(o.c, g, "--c"), real_vector_arg(o.d, g, "--d")};
    const double tol = o.tol.value_or(1e-12);
    if (!(tol > 0)) fail(ErrorKind::InvalidArgument, "--tol must be positive");
    spdlog::debug("theta: g={} tol={}", g, tol);
    const ThetaResult res = theta_eval_full(ThetaRequest{tau, z, ch, tol});
    json out{{"value", cplx_to_json(res.value)},
             {"box_radius", res.box.radius},
             {"terms", static_cast<long long>(res.box.cardinality())}};
    std::cout << out.dump() << "\n";
    return exit_pass;
}

int cmd_verify(const Options& o) {
    const auto fixed = explicit_tau(o);
    SweepConfig cfg;
    cfg.g = resolved_genus(o, fixed);
    cfg.seed = o.seed.value_or(0);
    cfg.tau = fixed;
    if (!o.slopes.empty()) cfg.slopes = parse_int_list(o.slopes, "--slopes");
    cfg.draws = o.draws;
    cfg.k_max = o.k_max;
    cfg.a2_offset = o.a2_offset;
    cfg.epsilon = o.epsilon;
    cfg.tol = o.tol;
    validate(PerturbationParams{cfg.epsilon});
    if (o.jobs < 1) fail(ErrorKind::InvalidArgument, "--jobs must be >= 1");

    const auto t0 = std::chrono::steady_clock::now();
    auto scenarios = build_scenarios(o.scenario, cfg);
    spdlog::info("verify {}: {} scenarios on {} thread(s)", o.scenario, scenarios.size(), o.jobs);
    auto reports = run_scenarios(std::move(scenarios), o.jobs);

    std::ofstream file;
    if (!o.out.empty()) {
        file.open(o.out, std::ios::out | std::ios::trunc | std::ios::binary);
        if (!file) fail(ErrorKind::InvalidArgument, "cannot write " + o.out);
    }
    std::ostream& sink = o.out.empty() ? std::cout : file;
    std::size_t failed = 0;
    for (auto& r : reports) {
        if (!o.timing) r.seconds.reset();
        if (!r.pass) {
            ++failed;
            spdlog::warn("{} failed: residual {} (tol {})", r.scenario, r.max_residual, r.tol);
        }
        sink << to_json(r).dump() << "\n";
    }
    sink.flush();
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cerr << fmt::format("{}: {}/{} passed", o.scenario, reports.size() - failed, reports.size());
    if (o.timing) std::cerr << fmt::format(" in {:.3f} s", secs);
    std::cerr << "\n";
    return failed == 0 ? exit_pass : exit_failed;
}

void table_ext(const Options& o, std::ostream& out) {
    const int g = resolved_genus(o, std::nullopt);
    const auto range = parse_int_list(o.k_range, "--k-range");
    if (range.size() != 2 || range[0] > range[1]) fail(ErrorKind::InvalidArgument, "--k-range needs lo,hi with lo <= hi");
    const SiegelPoint tau = validate_siegel(RealMatrix::Zero(g, g), RealMatrix::Identity(g, g));
    const TorusPoint origin = TorusPoint::origin(tau);
    out << "k,kp";
    for (int w = 0; w <= g; ++w) out << ",ext" << w;
    out << "\n";
    for (int k = range[0]; k <= range[1]; ++k)
        for (int kp = range[0]; kp <= range[1]; ++kp) {
            out << k << "," << kp;
            for (long long v : ext_dims(k, kp, origin, origin, g)) out << "," << v;
            out << "\n";
        }
}

void table_ring(const Options& o, std::ostream& out) {
    const auto fixed = explicit_tau(o);
    const int g = resolved_genus(o, fixed);
    const SiegelPoint tau = fixed ? *fixed : tau_or_random(o, g);
    const RingTable table = ring_table(tau, o.d_max);
    out << "dp,dpp,lambda_p,lambda_pp,lambda_out,re,im\n";
    auto idx_str = [](const MultiIndex& m) {
        std::string s;
        for (std::size_t i = 0; i < m.size(); ++i) s += (i ? " " : "") + std::to_string(m[i]);
        return s;
    };
    for (const auto& [key, blk] : table.blocks) {
        const auto ip = index_box(blk.dp, g), ipp = index_box(blk.dpp, g), io = index_box(blk.dp + blk.dpp, g);
        for (std::size_t i = 0; i < ip.size(); ++i)
            for (std::size_t j = 0; j < ipp.size(); ++j)
                for (std::size_t n = 0; n < io.size(); ++n) {
                    const cplx v = blk.at(i, j, n);
                    out << fmt::format("{},{},{},{},{},{},{}\n", blk.dp, blk.dpp, idx_str(ip[i]), idx_str(ipp[j]),
                                       idx_str(io[n]), v.real(), v.imag());
                }
    }
}

void table_intersections(const Options& o, std::ostream& out) {
    const auto fixed = explicit_tau(o);
    const int g = resolved_genus(o, fixed);
    const SiegelPoint tau = fixed ? *fixed : validate_siegel(RealMatrix::Zero(g, g), RealMatrix::Identity(g, g));
    const auto ks = o.slopes.empty() ? std::vector<int>{0, 1} : parse_int_list(o.slopes, "--slopes");
    if (ks.size() != 2) fail(ErrorKind::InvalidArgument, "--slopes needs two values for intersections");
    const RealVector zero = RealVector::Zero(g);
    const auto gens = intersection_points(Brane::finite(tau, ks[0], zero, zero), Brane::finite(tau, ks[1], zero, zero));
    out << "lambda,degree";
    for (int j = 0; j < g; ++j) out << ",r" << j;
    for (int j = 0; j < g; ++j) out << ",theta" << j;
    out << "\n";
    for (const auto& x : gens) {
        std::string lam;
        for (std::size_t i = 0; i < x.key.size(); ++i) lam += (i ? " " : "") + std::to_string(x.key[i]);
        out << lam << "," << x.degree;
        for (int j = 0; j < g; ++j) out << fmt::format(",{}", x.r[j]);
        for (int j = 0; j < g; ++j) out << fmt::format(",{}", x.theta[j]);
        out << "\n";
    }
}

int cmd_table(const Options& o) {
    std::ofstream file;
    if (!o.out.empty()) {
        file.open(o.out, std::ios::out | std::ios::trunc | std::ios::binary);
        if (!file) fail(ErrorKind::InvalidArgument, "cannot write " + o.out);
    }
    std::ostream& sink = o.out.empty() ? std::cout : file;
    if (o.table == "ext")
        table_ext(o, sink);
    else if (o.table == "ring")
        table_ring(o, sink);
    else if (o.table == "intersections")
        table_intersections(o, sink);
    else
        fail(ErrorKind::InvalidArgument, "unknown table \"" + o.table + "\"");
    return exit_pass;
}

void add_tau_flags(CLI::App* cmd, Options& o) {
    cmd->add_option("--g", o.g, "genus")->check(CLI::Range(1, max_genus));
    cmd->add_option("--tau", o.tau_json, R"(modulus as JSON {"B": [[...]], "Omega": [[...]]})");
    cmd->add_option("--tau-file", o.tau_file, "file holding the modulus JSON");
    cmd->add_option("--seed", o.seed, "seed for random moduli and translates (mt19937_64)");
    cmd->add_option("--tol", o.tol, "tolerance override");
    cmd->add_option("--out", o.out, "output file (stdout if absent)");
}

} // namespace

int main(int argc, char** argv) {
    setup_logging();
    Options o;
    CLI::App app{"Theta functions and homological mirror symmetry checks for abelian varieties"};
    app.require_subcommand(1);

    auto* theta = app.add_subcommand("theta", "evaluate a theta function with characteristics");
    add_tau_flags(theta, o);
    theta->add_option("--z", o.z, "argument: g reals, 2g reals (re then im) or g [re,im] pairs");
    theta->add_option("--c", o.c, "characteristic c (JSON array)");
    theta->add_option("--d", o.d, "characteristic d (JSON array)");

    auto* verify = app.add_subcommand("verify", "run verification scenarios, one JSON report per line");
    add_tau_flags(verify, o);
    verify->add_option("scenario", o.scenario, "product | dims | ring | vertical | cohomology | all")
        ->required()
        ->check(CLI::IsMember({"product", "dims", "ring", "vertical", "cohomology", "all"}));
    verify->add_option("--jobs", o.jobs, "worker threads");
    verify->add_option("--slopes", o.slopes, "comma-separated slopes (three for product, two for vertical)");
    verify->add_option("--k-max", o.k_max, "top degree for the ring check");
    verify->add_option("--a2-offset", o.a2_offset, "cohomology: shift of a2 relative to a1 (all coordinates)");
    verify->add_option("--epsilon", o.epsilon, "perturbation size for equal-slope complexes");
    verify->add_option("--draws", o.draws, "random draws per configuration");
    verify->add_flag("--timing", o.timing, "record wall time in reports (breaks byte-identical output)");

    auto* table = app.add_subcommand("table", "print CSV tables");
    add_tau_flags(table, o);
    table->add_option("kind", o.table, "ext | ring | intersections")
        ->required()
        ->check(CLI::IsMember({"ext", "ring", "intersections"}));
    table->add_option("--k-range", o.k_range, "ext: slope range lo,hi");
    table->add_option("--d-max", o.d_max, "ring: top degree");
    table->add_option("--slopes", o.slopes, "intersections: two slopes");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_usage;
    }

    try {
        if (theta->parsed()) return cmd_theta(o);
        if (verify->parsed()) return cmd_verify(o);
        if (table->parsed()) return cmd_table(o);
    } catch (const Error& e) {
        std::cerr << to_string(e.kind()) << ": " << e.what() << "\n";
        return e.kind() == ErrorKind::BoxTooLarge ? exit_resource : exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    }
    return exit_usage;
}
