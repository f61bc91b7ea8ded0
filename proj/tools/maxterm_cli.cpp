// maxterm: certify, search, verify and report.
//
// Exit status: 0 when every target is certified (or a report is consistent and
// passing), 2 when the run completed without certifying, 1 on operational errors.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "maxterm/certificate_io.hpp"
#include "maxterm/maxterm.hpp"
#include "maxterm/oracle.hpp"

namespace {

using namespace maxterm;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitNotCertified = 2;

struct RunConfig {
    std::string K = "7137/2000";
    std::string alpha = "198074929/50000000";
    int N = 5;
    std::int64_t M = 2000000;
    int dps = 90;
    int workers = 1;
    std::int64_t chunk_size = 8192;
    std::string target_mesh = "1709176398/1000000000";
    std::string target_A = "170919/100000";
    std::string target_beta = "58507/100000";
    std::string out_path;
    bool strict_replication = false;
    bool json_log = false;
};

FamilyParams parse_params(const std::string& K, const std::string& alpha, int N) {
    return FamilyParams::make(Rational::parse(K), Rational::parse(alpha), N);
}

/// Fails early, before any computation, when the certificate cannot be written.
void check_writable(const std::string& path) {
    if (path.empty()) return;
    const std::filesystem::path p(path);
    if (std::filesystem::is_directory(p)) throw Error("output path is a directory: " + path);
    const bool existed = std::filesystem::exists(p);
    std::ofstream probe(p, std::ios::app);
    if (!probe) throw Error("cannot write output file: " + path);
    probe.close();
    if (!existed) std::filesystem::remove(p);
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::trunc);
    out << text;
    if (!out) throw Error("failed writing " + path);
}

int run_certify(const RunConfig& cfg) {
    const FamilyParams params = parse_params(cfg.K, cfg.alpha, cfg.N);
    const Targets targets{Rational::parse(cfg.target_mesh), Rational::parse(cfg.target_A),
                          Rational::parse(cfg.target_beta)};
    MeshSpec mesh;
    mesh.M = cfg.M;
    mesh.precision_digits = cfg.dps;
    mesh.workers = cfg.workers;
    mesh.chunk_size = cfg.chunk_size;
    mesh.validate();
    check_writable(cfg.out_path);

    const Certificate cert =
        certify(params, mesh, targets, cfg.strict_replication ? LipschitzMode::Four : LipschitzMode::Exact);
    std::cout << emit_log(cert, cfg.json_log ? LogFormat::Json : LogFormat::Text) << std::flush;
    if (!cfg.out_path.empty()) write_file(cfg.out_path, emit_log(cert, LogFormat::Json));
    return cert.passed() ? kExitOk : kExitNotCertified;
}

int run_search(const search::SearchConfig& cfg) {
    const auto candidates = search::grid_search(cfg);
    std::printf("%-4s %-12s %-12s %-14s %-22s %-22s %s\n", "rank", "K", "alpha", "approx_A", "K (rational)",
                "alpha (rational)", "refine moves");
    int rank = 1;
    for (const auto& c : candidates) {
        std::printf("%-4d %-12.8f %-12.8f %-14.10f %-22s %-22s %zu\n", rank++, c.K, c.alpha, c.A,
                    c.K_rational.str().c_str(), c.alpha_rational.str().c_str(), c.trace.size() - 1);
    }
    return kExitOk;
}

struct VerifyConfig {
    std::string K = "7137/2000";
    std::string alpha = "198074929/50000000";
    int N = 5;
    int digits = 60;
    int window = 50;
    int points = 20;
    int samples = 4096;
    int max_m = 4;
    std::uint64_t seed = 1;
    std::string tolerance = "1/10000000000000000000000000000000000000000";
};

std::string sci(const oracle::Real& x) {
    std::ostringstream os;
    os << std::scientific << std::setprecision(3) << x;
    return os.str();
}

/// Identity and convergence suites against the oracle, as residual tables.
int run_verify(const VerifyConfig& cfg) {
    const FamilyParams params = parse_params(cfg.K, cfg.alpha, cfg.N);
    if (cfg.digits < 20 || cfg.window < 1 || cfg.points < 1 || cfg.samples < 64 || cfg.max_m < 1)
        throw DomainError("verify needs digits >= 20, window >= 1, points >= 1, samples >= 64, max-m >= 1");
    oracle::DigitsScope scope(cfg.digits);
    const oracle::Real tol = oracle::to_real(Rational::parse(cfg.tolerance));
    const auto coeffs = oracle::laurent_coeffs(params, cfg.window);
    const oracle::Real K = oracle::to_real(params.K);
    const oracle::Complex eps = oracle::expi(oracle::to_real(params.alpha));
    const oracle::Real q = 1 / K;

    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> radius(0.5, 2.0), angle(0.0, 6.283185307179586);
    bool ok = true;

    std::printf("Identity residuals (digits %d, window %d, tolerance %s)\n", cfg.digits, cfg.window,
                sci(tol).c_str());
    std::printf("%-4s %-26s %-26s %-12s %-12s\n", "#", "Re z", "Im z", "functional", "theta");
    for (int i = 0; i < cfg.points; ++i) {
        const double r = radius(rng), t = angle(rng);
        const Rational re = search::exact_double(r * std::cos(t));
        const Rational im = search::exact_double(r * std::sin(t));
        const oracle::Complex z{oracle::to_real(re), oracle::to_real(im)};
        const oracle::Complex k_z = oracle::eval_k_window(z, coeffs);
        const oracle::Real functional =
            oracle::abs(oracle::eval_k_window(z * K, coeffs) - z * oracle::eval_k_window(eps * z, coeffs));
        const oracle::Real theta = oracle::abs(oracle::theta_phi(z * q, eps * oracle::reciprocal(z), cfg.window) - k_z);
        ok = ok && functional < tol && theta < tol;
        std::printf("%-4d %-26.17g %-26.17g %-12s %-12s\n", i, r * std::cos(t), r * std::sin(t), sci(functional).c_str(),
                    sci(theta).c_str());
    }

    std::printf("\nScaling of the maximum modulus, M(K^m, k) / K^(m(m-1)/2) (%d samples)\n", cfg.samples);
    oracle::Real first = 0;
    for (int m = 0; m <= 3; ++m) {
        const oracle::Real v = oracle::hp_max_modulus(params.K.pow(m), params, cfg.samples, cfg.digits, cfg.window).re /
                               oracle::to_real(mu_at_Km(m, params));
        if (m == 0) first = v;
        std::ostringstream os;
        os << std::setprecision(20) << v;
        std::printf("m = %d  %s  spread %s\n", m, os.str().c_str(), sci(boost::multiprecision::abs(v - first)).c_str());
    }

    std::printf("\nMaximum-term ratio mu(K^m, f) / M(K^m, f) (%d samples)\n", cfg.samples);
    for (int m = 1; m <= cfg.max_m; ++m) {
        const auto ratio = oracle::hp_beta_ratio(m, params, cfg.samples, cfg.digits, cfg.window);
        std::ostringstream os;
        os << std::setprecision(20) << ratio.re;
        std::printf("m = %d  %s\n", m, os.str().c_str());
    }
    std::printf("\nIdentity residuals within tolerance : %s\n", ok ? "True" : "False");
    return ok ? kExitOk : kExitNotCertified;
}

int run_report(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read certificate: " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    const Certificate cert = parse_certificate(buffer.str());
    std::cout << emit_log(cert, LogFormat::Text);
    const auto issues = audit_certificate(nlohmann::json::parse(buffer.str()));
    for (const auto& issue : issues) std::cout << "inconsistent: " << issue << "\n";
    std::cout << "Certificate arithmetic consistent : " << (issues.empty() ? "True" : "False") << "\n";
    return issues.empty() && cert.passed() ? kExitOk : kExitNotCertified;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Certified bounds for the maximum-term constant of the family k(Kz) = z k(eps z)"};
    app.set_version_flag("--version", std::string(maxterm::kVersion));
    app.require_subcommand(1);

    RunConfig run;
    auto* certify_cmd = app.add_subcommand("certify", "certify max|P| on a mesh and the bounds on A and beta");
    certify_cmd->add_option("--K", run.K, "K > 1 as p/q or a decimal")->capture_default_str();
    certify_cmd->add_option("--alpha", run.alpha, "alpha, with epsilon = exp(i alpha)")->capture_default_str();
    certify_cmd->add_option("--N", run.N, "truncation index")->capture_default_str();
    certify_cmd->add_option("--M", run.M, "mesh size")->capture_default_str();
    certify_cmd->add_option("--dps", run.dps, "working precision in decimal digits")->capture_default_str();
    certify_cmd->add_option("--workers", run.workers, "worker threads")->capture_default_str();
    certify_cmd->add_option("--chunk-size", run.chunk_size, "mesh points per work unit")->capture_default_str();
    certify_cmd->add_option("--target-mesh", run.target_mesh, "bound for the mesh maximum")->capture_default_str();
    certify_cmd->add_option("--target-A", run.target_A, "strict upper target for A")->capture_default_str();
    certify_cmd->add_option("--target-beta", run.target_beta, "strict lower target for beta")->capture_default_str();
    certify_cmd->add_option("--out", run.out_path, "write the JSON certificate here");
    certify_cmd->add_flag("--strict-replication", run.strict_replication, "use the Lipschitz constant 4");
    certify_cmd->add_flag("--json", run.json_log, "print the certificate as JSON instead of the text log");

    search::SearchConfig scfg;
    auto* search_cmd = app.add_subcommand("search", "non-rigorous grid search over (K, alpha)");
    search_cmd->add_option("--K-low", scfg.K_low)->capture_default_str();
    search_cmd->add_option("--K-high", scfg.K_high)->capture_default_str();
    search_cmd->add_option("--alpha-low", scfg.alpha_low)->capture_default_str();
    search_cmd->add_option("--alpha-high", scfg.alpha_high)->capture_default_str();
    search_cmd->add_option("--grid-K", scfg.grid_K)->capture_default_str();
    search_cmd->add_option("--grid-alpha", scfg.grid_alpha)->capture_default_str();
    search_cmd->add_option("--samples", scfg.theta_samples, "theta samples per evaluation")->capture_default_str();
    search_cmd->add_option("--refine-iters", scfg.refine_iters)->capture_default_str();
    search_cmd->add_option("--N", scfg.N)->capture_default_str();
    search_cmd->add_option("--keep", scfg.keep, "candidates to refine and print")->capture_default_str();
    search_cmd->add_option("--max-denominator", scfg.max_denominator)->capture_default_str();

    VerifyConfig vcfg;
    auto* verify_cmd = app.add_subcommand("verify", "oracle identity and convergence residual tables");
    verify_cmd->add_option("--K", vcfg.K)->capture_default_str();
    verify_cmd->add_option("--alpha", vcfg.alpha)->capture_default_str();
    verify_cmd->add_option("--N", vcfg.N)->capture_default_str();
    verify_cmd->add_option("--digits", vcfg.digits)->capture_default_str();
    verify_cmd->add_option("--window", vcfg.window)->capture_default_str();
    verify_cmd->add_option("--points", vcfg.points, "random points for the identities")->capture_default_str();
    verify_cmd->add_option("--samples", vcfg.samples, "circle samples for maximum moduli")->capture_default_str();
    verify_cmd->add_option("--max-m", vcfg.max_m, "largest m for the maximum-term ratio")->capture_default_str();
    verify_cmd->add_option("--seed", vcfg.seed)->capture_default_str();
    verify_cmd->add_option("--tolerance", vcfg.tolerance, "identity residual tolerance")->capture_default_str();

    std::string report_path;
    auto* report_cmd = app.add_subcommand("report", "print a JSON certificate and re-check its arithmetic");
    report_cmd->add_option("certificate", report_path, "certificate JSON file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitError;
    }

    try {
        if (*certify_cmd) return run_certify(run);
        if (*search_cmd) return run_search(scfg);
        if (*verify_cmd) return run_verify(vcfg);
        return run_report(report_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
}
