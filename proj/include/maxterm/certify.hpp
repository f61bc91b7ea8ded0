/**
 * @file certify.hpp
 * @brief Mesh certification of max |P| and the derived bounds on A and beta.
 *
 * Pipeline: U = max_j abs_upper(P(theta_j)) over theta_j = 2 pi j / M, then
 * A <= U + L pi / M + tail, and beta = 1/A >= 1/A_upper. Every comparison
 * against a target is a conservative one from ball.hpp.
 */
#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <exception>
#include <string>
#include <thread>
#include <vector>

#include "maxterm/ball.hpp"
#include "maxterm/error.hpp"
#include "maxterm/rational.hpp"
#include "maxterm/series.hpp"
#include "maxterm/version.hpp"

namespace maxterm {

struct MeshSpec {
    std::int64_t M = 2000000;
    int precision_digits = 90;
    int workers = 1;
    std::int64_t chunk_size = 8192;

    void validate() const {
        if (M < 1) throw DomainError("mesh size M must be positive");
        if (precision_digits < 1) throw DomainError("precision must be at least one digit");
        if (workers < 1) throw DomainError("workers must be positive");
        if (chunk_size < 1) throw DomainError("chunk size must be positive");
    }

    Precision precision() const { return Precision::from_digits(precision_digits); }

    friend bool operator==(const MeshSpec&, const MeshSpec&) = default;
};

struct Targets {
    Rational mesh = Rational(1709176398) / Rational(1000000000);
    Rational A = Rational(170919) / Rational(100000);
    Rational beta = Rational(58507) / Rational(100000);

    friend bool operator==(const Targets&, const Targets&) = default;
};

/// How the mesh slack L pi / M picks its Lipschitz constant.
enum class LipschitzMode {
    Exact, ///< 2 sum (2n+1) K^{-T_n}
    Four,  ///< the constant 4, valid for the reference parameters
};

struct MeshMax {
    Dyadic upper;          ///< >= |P(theta_j)| for every j
    std::int64_t argmax{}; ///< smallest j attaining `upper` among the per-point bounds

    friend bool operator==(const MeshMax&, const MeshMax&) = default;
};

struct Certificate {
    FamilyParams params;
    MeshSpec mesh;
    Dyadic mesh_max_upper;
    std::int64_t argmax_index{};
    Rational lipschitz;
    bool strict_replication = false;
    Dyadic mesh_slack; ///< upper bound on lipschitz * pi / M
    Rational tail;
    Dyadic A_upper;
    Dyadic beta_lower;
    Rational target_mesh;
    Rational target_A;
    Rational target_beta;
    bool passed_mesh = false;
    bool passed_A = false;
    bool passed_beta = false;
    std::string software_version = kVersion;
    double wall_time_seconds = 0.0;

    bool passed() const { return passed_mesh && passed_A && passed_beta; }
};

/// Equality of everything except the informational fields (wall time, workers, chunk size).
inline bool same_result(const Certificate& a, const Certificate& b) {
    return a.params == b.params && a.mesh.M == b.mesh.M && a.mesh.precision_digits == b.mesh.precision_digits &&
           a.mesh_max_upper == b.mesh_max_upper && a.argmax_index == b.argmax_index && a.lipschitz == b.lipschitz &&
           a.strict_replication == b.strict_replication && a.mesh_slack == b.mesh_slack && a.tail == b.tail &&
           a.A_upper == b.A_upper && a.beta_lower == b.beta_lower && a.target_mesh == b.target_mesh &&
           a.target_A == b.target_A && a.target_beta == b.target_beta && a.passed_mesh == b.passed_mesh &&
           a.passed_A == b.passed_A && a.passed_beta == b.passed_beta && a.software_version == b.software_version;
}

/// Ball containing theta_j = 2 pi j / M: the pi ball times the exact rational 2j/M.
inline RealBall mesh_point(std::int64_t j, std::int64_t M, Precision p) {
    if (M < 1 || j < 0 || j >= M) throw DomainError("mesh index outside 0..M-1");
    if (j == 0) return RealBall();
    const Precision q = p + 16;
    const Rational frac = Rational(mpz_class(std::to_string(2 * j)), mpz_class(std::to_string(M)));
    return mul(ball_pi(q), ball_from_rational(frac, q), p);
}

/// abs_upper(P(theta_j)) for one mesh point.
inline Dyadic mesh_point_upper(std::int64_t j, std::int64_t M, const CoefficientTable& table) {
    const ComplexBall z = eval_P(mesh_point(j, M, table.precision() + 16), table);
    if (z.re().rad() >= Dyadic(1) || z.im().rad() >= Dyadic(1))
        throw PrecisionError("enclosure of P lost all accuracy at j = " + std::to_string(j) +
                             "; raise the working precision");
    return abs_upper(z);
}

namespace detail {

/// Larger bound wins; equal bounds keep the smaller index.
inline void merge_max(MeshMax& acc, const MeshMax& other) {
    if (other.upper > acc.upper || (other.upper == acc.upper && other.argmax < acc.argmax)) acc = other;
}

} // namespace detail

/// Maximum of the per-point upper bounds over the whole mesh.
///
/// Chunks [c * chunk_size, (c+1) * chunk_size) are handed to workers on demand;
/// each chunk reduces to (max, smallest argmax) and chunk results are folded in
/// chunk order, so the result does not depend on workers or chunk size.
inline MeshMax mesh_max_upper(const FamilyParams& params, const MeshSpec& mesh) {
    params.validate();
    mesh.validate();
    const CoefficientTable table(params, mesh.precision());
    const std::int64_t chunks = (mesh.M + mesh.chunk_size - 1) / mesh.chunk_size;
    std::vector<MeshMax> results(static_cast<std::size_t>(chunks));
    std::atomic<std::int64_t> next{0};
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(mesh.workers));

    auto work = [&](int worker) {
        try {
            for (std::int64_t c = next++; c < chunks; c = next++) {
                const std::int64_t begin = c * mesh.chunk_size;
                const std::int64_t end = std::min(mesh.M, begin + mesh.chunk_size);
                MeshMax local{mesh_point_upper(begin, mesh.M, table), begin};
                for (std::int64_t j = begin + 1; j < end; ++j) {
                    Dyadic u = mesh_point_upper(j, mesh.M, table);
                    if (u > local.upper) local = {std::move(u), j};
                }
                results[static_cast<std::size_t>(c)] = std::move(local);
            }
        } catch (...) {
            errors[static_cast<std::size_t>(worker)] = std::current_exception();
            next = chunks; // stop the others early
        }
    };

    const int nthreads = static_cast<int>(std::min<std::int64_t>(mesh.workers, chunks));
    if (nthreads <= 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(nthreads));
        for (int w = 0; w < nthreads; ++w) pool.emplace_back(work, w);
        for (auto& t : pool) t.join();
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    MeshMax best = results.front();
    for (std::size_t c = 1; c < results.size(); ++c) detail::merge_max(best, results[c]);
    return best;
}

/// Rigorous upper bound on L * pi / M.
inline Dyadic mesh_slack_upper(const Rational& lipschitz, std::int64_t M, Precision p) {
    const RealBall slack = mul(ball_pi(p), ball_from_rational(lipschitz / Rational(mpz_class(std::to_string(M))), p), p);
    return slack.upper().round(p.bits, Rounding::Ceil);
}

inline Rational lipschitz_constant(const FamilyParams& params, LipschitzMode mode) {
    return mode == LipschitzMode::Four ? Rational(4) : lipschitz_bound(params);
}

/// Builds the certificate from a mesh maximum: A_upper = U + slack + tail (each
/// rounded up), beta_lower = 1/A_upper rounded down, flags by exact comparison.
inline Certificate assemble_bound(const FamilyParams& params, const MeshSpec& mesh, const MeshMax& mesh_max,
                                  const Targets& targets, LipschitzMode mode = LipschitzMode::Exact) {
    const Precision p = mesh.precision();
    Certificate cert;
    cert.params = params;
    cert.mesh = mesh;
    cert.mesh_max_upper = mesh_max.upper;
    cert.argmax_index = mesh_max.argmax;
    cert.strict_replication = mode == LipschitzMode::Four;
    cert.lipschitz = lipschitz_constant(params, mode);
    if (cert.strict_replication && lipschitz_bound(params) > cert.lipschitz)
        throw DomainError("the constant 4 is not a Lipschitz bound for these parameters");
    cert.mesh_slack = mesh_slack_upper(cert.lipschitz, mesh.M, p);
    cert.tail = tail_bound(params);
    const Dyadic tail_up = Dyadic::from_rational(cert.tail, p.bits, Rounding::Ceil);
    cert.A_upper = (mesh_max.upper + cert.mesh_slack + tail_up).round(p.bits, Rounding::Ceil);
    if (cert.A_upper.sign() <= 0) throw DomainError("A_upper is not positive");
    cert.beta_lower = Dyadic::div(Dyadic(1), cert.A_upper, p.bits, Rounding::Floor);
    cert.target_mesh = targets.mesh;
    cert.target_A = targets.A;
    cert.target_beta = targets.beta;
    cert.passed_mesh = certainly_le(cert.mesh_max_upper, targets.mesh);
    cert.passed_A = certainly_lt(cert.A_upper, targets.A);
    cert.passed_beta = certainly_gt(cert.beta_lower, targets.beta);
    return cert;
}

/// Full pipeline: mesh maximum, bound assembly, target checks.
inline Certificate certify(const FamilyParams& params, const MeshSpec& mesh, const Targets& targets,
                           LipschitzMode mode = LipschitzMode::Exact) {
    const auto start = std::chrono::steady_clock::now();
    const MeshMax mm = mesh_max_upper(params, mesh);
    Certificate cert = assemble_bound(params, mesh, mm, targets, mode);
    cert.wall_time_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return cert;
}

/// Recomputes every derived field of a certificate from its exact inputs and
/// mesh_max_upper. Returns one message per inconsistency; empty means consistent.
inline std::vector<std::string> recheck(const Certificate& cert) {
    std::vector<std::string> issues;
    try {
        cert.params.validate();
        cert.mesh.validate();
        const Certificate fresh =
            assemble_bound(cert.params, cert.mesh, MeshMax{cert.mesh_max_upper, cert.argmax_index},
                           Targets{cert.target_mesh, cert.target_A, cert.target_beta},
                           cert.strict_replication ? LipschitzMode::Four : LipschitzMode::Exact);
        auto check = [&](bool ok, const char* field) {
            if (!ok) issues.emplace_back(std::string(field) + " does not match its recomputed value");
        };
        check(fresh.lipschitz == cert.lipschitz, "lipschitz");
        check(fresh.mesh_slack == cert.mesh_slack, "mesh_slack");
        check(fresh.tail == cert.tail, "tail");
        check(fresh.A_upper == cert.A_upper, "A_upper");
        check(fresh.beta_lower == cert.beta_lower, "beta_lower");
        check(fresh.passed_mesh == cert.passed_mesh, "passed_mesh");
        check(fresh.passed_A == cert.passed_A, "passed_A");
        check(fresh.passed_beta == cert.passed_beta, "passed_beta");
        if (cert.argmax_index < 0 || cert.argmax_index >= cert.mesh.M) issues.emplace_back("argmax_index outside the mesh");
    } catch (const Error& e) {
        issues.emplace_back(e.what());
    }
    return issues;
}

} // namespace maxterm
