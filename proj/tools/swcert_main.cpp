// swcert: stability certification for discrete-time switched linear systems
// under ranged dwell-time switching.
//
// Subcommands:
//   analyze   build and solve one certificate problem, optionally saving the
//             certificate file
//   sweep     grid over periodic dwell values and cycle lengths, CSV reports
//   simulate  trajectory CSV (and SVG) under periodic or random switching
//   verify    re-check a certificate file against a system document
//   convert   switch a certificate file between its two forms
//
// Exit codes: 0 completed, 1 verification FAIL, 2 usage error, 3 numerical
// failure.
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "swcert/certificate.hpp"
#include "swcert/io.hpp"
#include "swcert/oracles.hpp"
#include "swcert/sweep.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFail = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

struct CommonArgs {
    std::string system_path;
    std::string condition = "b";
    int tau = 0;          // periodic dwell override [tau, tau]
    int tau_min = 0;      // ranged dwell override
    int tau_max = 0;
    double eps = 1e-8;
    double mu = 1e8;
    long long cap = swcert::kDefaultCycleCap;
};

swcert::SwitchedSystem load_with_overrides(const CommonArgs& args) {
    swcert::SwitchedSystem sys = swcert::load_system_file(args.system_path);
    if (args.tau > 0) return sys.with_dwell(args.tau, args.tau);
    if (args.tau_min > 0 || args.tau_max > 0) {
        if (args.tau_min <= 0 || args.tau_max <= 0)
            throw std::invalid_argument("both --tau-min and --tau-max are required for a ranged override");
        return sys.with_dwell(args.tau_min, args.tau_max);
    }
    return sys;
}

swcert::SolverOptions solver_options(const CommonArgs& args) {
    swcert::SolverOptions opts;
    opts.margin_eps = args.eps;
    opts.norm_cap = args.mu;
    return opts;
}

std::vector<double> parse_vector(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
    if (out.empty()) throw std::invalid_argument("--x0 needs a comma-separated list of numbers");
    return out;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot open output file: " + path);
    out << content;
}

int run_analyze(const CommonArgs& args, int length, const std::string& out_path) {
    const swcert::SwitchedSystem sys = load_with_overrides(args);
    const swcert::CycleFamily family = swcert::enumerate_cycles(sys, length, args.cap);
    const swcert::Condition condition = args.condition == "a" ? swcert::Condition::A : swcert::Condition::B;
    const swcert::LmiProblem problem = condition == swcert::Condition::B ? swcert::build_condition_b(sys, family)
                                                                         : swcert::build_condition_a(sys, family);
    const auto counts = swcert::complexity_counts(sys, length, condition);
    std::cout << "condition " << args.condition << ", L=" << length << ", cycles=" << family.size()
              << ", decision blocks=" << counts.num_variables << ", constraints=" << counts.num_lmis << "\n";

    const swcert::FeasibilityResult result = swcert::solve_feasibility(problem, solver_options(args));
    std::cout << "status: " << swcert::to_string(result.status) << "\n";
    std::cout << "attained margin: " << result.margin << " (eps=" << result.eps << ", mu=" << result.mu
              << ", iterations=" << result.iterations << ")\n";
    if (result.status == swcert::SolveStatus::NumericalFailure) {
        std::cout << "note: " << result.note << "\n";
        return kExitNumerical;
    }
    if (result.status == swcert::SolveStatus::Inconclusive) {
        std::cout << "note: the criteria are sufficient only; an inconclusive solve is not an instability proof\n";
        return kExitOk;
    }

    swcert::VerificationReport report;
    std::string cert_json;
    if (condition == swcert::Condition::B) {
        const auto cert = swcert::certificate_b_from_result(sys, family, result);
        report = swcert::verify_certificate_b(sys, family, cert);
        cert_json = swcert::certificate_to_json(family, cert);
    } else {
        const auto cert = swcert::certificate_a_from_result(sys, family, problem, result);
        report = swcert::verify_certificate_a(sys, family, cert);
        cert_json = swcert::certificate_to_json(family, cert);
    }
    if (!report.pass) {
        std::cout << "post-verification FAILED (worst " << report.worst_label << " at " << report.worst_lambda_max
                  << "); refusing to emit a certificate\n";
        return kExitNumerical;
    }
    std::cout << "post-verification PASS, worst check " << report.worst_label << " at " << report.worst_lambda_max
              << "\n";
    if (!out_path.empty()) {
        write_file(out_path, cert_json);
        std::cout << "certificate written to " << out_path << "\n";
    }
    return kExitOk;
}

int run_sweep_cmd(const CommonArgs& args, int length_min, int length_max, int witness_length_max,
                  const std::string& out_path, const std::string& summary_path, bool svg) {
    if (args.tau_min <= 0 || args.tau_max <= 0 || args.tau_min > args.tau_max)
        throw std::invalid_argument("sweep needs --tau-min <= --tau-max, both positive");
    if (length_min > length_max) throw std::invalid_argument("sweep needs --L-min <= --L-max");

    const swcert::SwitchedSystem base = swcert::load_system_file(args.system_path);
    std::vector<int> taus, lengths;
    for (int t = args.tau_min; t <= args.tau_max; ++t) taus.push_back(t);
    for (int l = length_min; l <= length_max; ++l) lengths.push_back(l);

    swcert::SweepOptions opts;
    opts.condition = args.condition == "a" ? swcert::Condition::A : swcert::Condition::B;
    opts.solver = solver_options(args);
    opts.cap = args.cap;
    opts.witness_length_max = witness_length_max;

    const swcert::SweepResult result = swcert::run_sweep(base, taus, lengths, opts);
    swcert::write_summary_text(std::cout, result);
    if (!out_path.empty()) {
        std::ostringstream csv;
        swcert::write_sweep_csv(csv, result);
        write_file(out_path, csv.str());
        if (svg) {
            std::ostringstream svg_text;
            swcert::write_sweep_svg(svg_text, result);
            write_file(out_path + ".svg", svg_text.str());
        }
    }
    if (!summary_path.empty()) {
        std::ostringstream csv;
        swcert::write_summary_csv(csv, result);
        write_file(summary_path, csv.str());
    }
    return result.any_numerical_failure ? kExitNumerical : kExitOk;
}

int run_simulate(const CommonArgs& args, std::uint64_t seed, bool seed_given, int segments, const std::string& x0_text,
                 long long horizon, const std::string& out_path, bool svg) {
    const swcert::SwitchedSystem sys = load_with_overrides(args);
    swcert::SwitchingSignal sig;
    std::string signal_desc;
    if (seed_given) {
        int n_segments = segments;
        if (n_segments <= 0)
            n_segments = static_cast<int>(horizon / sys.dwell_min + 2);
        sig = swcert::random_admissible_signal(sys, seed, n_segments);
        signal_desc = "random admissible signal, seed " + std::to_string(seed);
    } else {
        // periodic rotation through the modes at the lower dwell bound
        for (int m = 1; m <= sys.num_modes(); ++m) sig.segments.push_back({m, sys.dwell_min});
        signal_desc = "periodic switching, dwell " + std::to_string(sys.dwell_min);
        if (sys.dwell_min != sys.dwell_max)
            throw std::invalid_argument("periodic simulation needs --tau (or a system with dwell min == max)");
    }
    std::vector<double> x0 =
        x0_text.empty() ? std::vector<double>(static_cast<std::size_t>(sys.state_dim), 1.0) : parse_vector(x0_text);

    const swcert::Trajectory traj = swcert::simulate(sys, sig, x0, horizon);
    std::ostringstream x0_desc;
    for (std::size_t i = 0; i < x0.size(); ++i) x0_desc << (i ? "," : "") << x0[i];
    std::cout << "simulated " << horizon << " steps (" << signal_desc << ", x0=[" << x0_desc.str() << "])\n";
    std::cout << "final norm " << swcert::norm2(traj.states.back()) << " from initial norm "
              << swcert::norm2(traj.states.front()) << "\n";

    std::ostringstream csv;
    swcert::write_trajectory_csv(csv, sys, sig, traj);
    if (out_path.empty()) {
        std::cout << csv.str();
    } else {
        write_file(out_path, csv.str());
        if (svg) {
            std::vector<double> norms;
            for (const auto& x : traj.states) norms.push_back(swcert::norm2(x));
            std::ostringstream svg_text;
            swcert::write_norm_svg(svg_text, {{signal_desc, norms}}, "state norm, " + signal_desc);
            write_file(out_path + ".svg", svg_text.str());
        }
    }
    return kExitOk;
}

swcert::LoadedCertificate load_certificate_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open certificate file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return swcert::load_certificate_json(buf.str());
}

int run_verify(const std::string& system_path, const std::string& cert_path, double tol) {
    const swcert::SwitchedSystem sys = swcert::load_system_file(system_path);
    const swcert::LoadedCertificate cert = load_certificate_file(cert_path);
    const swcert::CycleFamily family = swcert::enumerate_cycles(sys, cert.meta().L);
    swcert::validate_certificate_layout(cert, family);
    const swcert::VerificationReport report =
        cert.condition == 'b' ? swcert::verify_certificate_b(sys, family, *cert.b, tol)
                              : swcert::verify_certificate_a(sys, family, *cert.a, tol);
    std::cout << (report.pass ? "PASS" : "FAIL") << ": " << report.checks.size() << " checks, worst "
              << report.worst_label << " at lambda_max " << report.worst_lambda_max << " (tol " << tol << ")\n";
    return report.pass ? kExitOk : kExitVerifyFail;
}

int run_convert(const std::string& system_path, const std::string& cert_path, const std::string& out_path,
                double delta0, double shrink, int max_attempts, double tol) {
    const swcert::SwitchedSystem sys = swcert::load_system_file(system_path);
    const swcert::LoadedCertificate cert = load_certificate_file(cert_path);
    const swcert::CycleFamily family = swcert::enumerate_cycles(sys, cert.meta().L);
    swcert::validate_certificate_layout(cert, family);
    std::string out_json;
    if (cert.condition == 'b') {
        swcert::ConvertOptions opts;
        opts.delta0 = delta0;
        opts.shrink = shrink;
        opts.max_attempts = max_attempts;
        const swcert::CertificateA converted = swcert::convert_b_to_a(sys, family, *cert.b, opts, tol);
        out_json = swcert::certificate_to_json(family, converted);
        std::cout << "converted product-form certificate to clock form\n";
    } else {
        const swcert::CertificateB extracted = swcert::extract_b_from_a(sys, family, *cert.a, tol);
        out_json = swcert::certificate_to_json(family, extracted);
        std::cout << "extracted product-form certificate from clock form\n";
    }
    write_file(out_path, out_json);
    std::cout << "written to " << out_path << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stability certification for switched linear systems under ranged dwell-time switching"};
    app.require_subcommand(1);

    CommonArgs common;
    int length = 1, length_min = 1, length_max = 10, witness_length_max = 4;
    std::string out_path, summary_path, cert_path, x0_text;
    bool svg = false;
    std::uint64_t seed = 0;
    bool seed_given = false;
    int segments = 0;
    long long horizon = 100;
    double tol = swcert::kDefaultVerifyTol;
    double delta0 = 0.0, shrink = 0.1;
    int max_attempts = 30;

    auto add_system_flags = [&](CLI::App* cmd, bool with_condition = true) {
        cmd->add_option("--system", common.system_path, "system document (JSON)")->required();
        if (with_condition)
            cmd->add_option("--condition", common.condition, "certificate form, a or b")
                ->check(CLI::IsMember({"a", "b"}));
        cmd->add_option("--tau", common.tau, "periodic dwell override [tau, tau]");
        cmd->add_option("--tau-min", common.tau_min, "dwell range lower bound override");
        cmd->add_option("--tau-max", common.tau_max, "dwell range upper bound override");
        cmd->add_option("--eps", common.eps, "strictness margin for Feasible verdicts");
        cmd->add_option("--mu", common.mu, "normalization cap on the decision blocks");
        cmd->add_option("--cap", common.cap, "cycle enumeration cap");
    };

    CLI::App* analyze = app.add_subcommand("analyze", "solve one certificate problem");
    add_system_flags(analyze);
    analyze->add_option("--L", length, "cycle length");
    analyze->add_option("--out", out_path, "write the certificate here when feasible");

    CLI::App* sweep = app.add_subcommand("sweep", "grid over periodic dwell values and cycle lengths");
    add_system_flags(sweep);
    sweep->add_option("--L-min", length_min, "smallest cycle length");
    sweep->add_option("--L-max", length_max, "largest cycle length");
    sweep->add_option("--witness-L-max", witness_length_max, "oracle witness search depth");
    sweep->add_option("--out", out_path, "per-point CSV output path");
    sweep->add_option("--summary-out", summary_path, "summary CSV output path");
    sweep->add_flag("--svg", svg, "also write an SVG scatter next to --out");

    CLI::App* simulate = app.add_subcommand("simulate", "simulate a trajectory and emit CSV");
    add_system_flags(simulate, false);
    simulate->add_option("--seed", seed, "random admissible signal with this seed")
        ->trigger_on_parse()
        ->each([&](const std::string&) { seed_given = true; });
    simulate->add_option("--segments", segments, "segment count for the random signal");
    simulate->add_option("--x0", x0_text, "initial state, comma separated (default: all ones)");
    simulate->add_option("--horizon", horizon, "number of steps");
    simulate->add_option("--out", out_path, "trajectory CSV path (stdout when omitted)");
    simulate->add_flag("--svg", svg, "also write a norm plot next to --out");

    CLI::App* verify = app.add_subcommand("verify", "re-check a certificate file");
    verify->add_option("--system", common.system_path, "system document (JSON)")->required();
    verify->add_option("--cert", cert_path, "certificate file")->required();
    verify->add_option("--tol", tol, "verification tolerance");

    CLI::App* convert = app.add_subcommand("convert", "convert a certificate between its two forms");
    convert->add_option("--system", common.system_path, "system document (JSON)")->required();
    convert->add_option("--cert", cert_path, "certificate file")->required();
    convert->add_option("--out", out_path, "output certificate path")->required();
    convert->add_option("--tol", tol, "verification tolerance");
    convert->add_option("--delta0", delta0, "initial recursion offset (0: automatic)");
    convert->add_option("--shrink", shrink, "offset shrink factor per attempt");
    convert->add_option("--max-attempts", max_attempts, "shrink schedule length");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*analyze) return run_analyze(common, length, out_path);
        if (*sweep) return run_sweep_cmd(common, length_min, length_max, witness_length_max, out_path, summary_path, svg);
        if (*simulate) return run_simulate(common, seed, seed_given, segments, x0_text, horizon, out_path, svg);
        if (*verify) return run_verify(common.system_path, cert_path, tol);
        if (*convert)
            return run_convert(common.system_path, cert_path, out_path, delta0, shrink, max_attempts, tol);
    } catch (const swcert::conversion_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const swcert::numerical_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitOk;
}
