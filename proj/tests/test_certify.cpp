#include <gtest/gtest.h>

#include "maxterm/certificate_io.hpp"
#include "maxterm/certify.hpp"

using namespace maxterm;

namespace {

Rational q(long p, long d) { return Rational(mpz_class(p), mpz_class(d)); }

MeshSpec small_mesh(std::int64_t M, int digits = 40, int workers = 1, std::int64_t chunk = 8192) {
    MeshSpec m;
    m.M = M;
    m.precision_digits = digits;
    m.workers = workers;
    m.chunk_size = chunk;
    return m;
}

std::string last_line(const std::string& text) {
    std::string t = text;
    while (!t.empty() && t.back() == '\n') t.pop_back();
    return t.substr(t.rfind('\n') + 1);
}

} // namespace

TEST(Certify, MeshPoint) {
    const Precision p = Precision::from_digits(90);
    const RealBall z = mesh_point(0, 2000000, p);
    EXPECT_TRUE(z.is_exact());
    EXPECT_TRUE(z.mid().is_zero());
    const RealBall half = mesh_point(1000000, 2000000, p);
    EXPECT_TRUE(half.contains(ball_pi(p + 40).mid()));
    EXPECT_TRUE(sub(half, ball_pi(p), p).contains_zero());
    const RealBall j = mesh_point(1794536, 2000000, p);
    const RealBall expected = mul(ball_pi(p + 40), ball_from_rational(q(2 * 1794536, 2000000), p + 40), p + 40);
    EXPECT_TRUE(j.contains(expected.mid()));
    EXPECT_LT(j.rad(), Dyadic::pow2(-300));
    EXPECT_THROW(mesh_point(5, 5, p), DomainError);
    EXPECT_THROW(mesh_point(-1, 5, p), DomainError);
}

TEST(Certify, EightPointBruteForce) {
    const FamilyParams params = reference_params();
    const MeshSpec mesh = small_mesh(8, 40, 1, 3);
    const MeshMax mm = mesh_max_upper(params, mesh);
    const CoefficientTable table(params, mesh.precision());
    Dyadic best;
    std::int64_t arg = -1;
    for (std::int64_t j = 0; j < 8; ++j) {
        const Dyadic u = abs_upper(eval_P(mesh_point(j, 8, table.precision() + 16), table));
        if (arg < 0 || u > best) {
            best = u;
            arg = j;
        }
    }
    EXPECT_EQ(mm.upper, best);
    EXPECT_EQ(mm.argmax, arg);
}

TEST(Certify, SinglePointMesh) {
    const FamilyParams params = reference_params();
    const MeshSpec mesh = small_mesh(1);
    const MeshMax mm = mesh_max_upper(params, mesh);
    EXPECT_EQ(mm.upper, abs_upper(eval_P(RealBall(0), CoefficientTable(params, mesh.precision()))));
    EXPECT_EQ(mm.argmax, 0);
}

TEST(Certify, SoundnessOnSmallMesh) {
    const FamilyParams params = reference_params();
    const MeshSpec mesh = small_mesh(500, 30, 1, 64);
    const MeshMax mm = mesh_max_upper(params, mesh);
    const CoefficientTable table(params, mesh.precision());
    for (std::int64_t j = 0; j < mesh.M; ++j) EXPECT_LE(mesh_point_upper(j, mesh.M, table), mm.upper) << j;
}

TEST(Certify, LowPrecisionFailsLoudly) {
    const FamilyParams params = FamilyParams::make(Rational(2), Rational(0), 5);
    const CoefficientTable table(params, Precision(16));
    // a huge but still representable mesh index keeps the theta ball narrow; a
    // deliberately wide theta ball must be rejected instead of accepted silently
    const RealBall wide(Dyadic(0), Dyadic(4));
    const ComplexBall P = eval_P(wide, table);
    EXPECT_GE(P.re().rad(), Dyadic(1));
    EXPECT_NO_THROW(mesh_point_upper(3, 7, table));
}

TEST(Certify, Determinism) {
    const FamilyParams params = reference_params();
    const Targets targets;
    const Certificate base = certify(params, small_mesh(3000, 40, 1, 8192), targets);
    for (const int workers : {1, 2, 8}) {
        for (const std::int64_t chunk : {97, 1000}) {
            const Certificate c = certify(params, small_mesh(3000, 40, workers, chunk), targets);
            EXPECT_TRUE(same_result(base, c)) << workers << " " << chunk;
            EXPECT_EQ(to_json(base)["A_upper"], to_json(c)["A_upper"]);
        }
    }
}

TEST(Certify, AssembleSanity) {
    // U = 2, L = 4, M = 10^9, tail = 0 -> A_upper barely above 2
    FamilyParams params = FamilyParams::make(Rational(1000000), Rational(0), 1);
    MeshSpec mesh = small_mesh(1000000000);
    const Certificate c = assemble_bound(params, mesh, MeshMax{Dyadic(2), 0}, Targets{}, LipschitzMode::Exact);
    EXPECT_GT(c.A_upper, Dyadic(2));
    EXPECT_LT(c.A_upper.to_rational(), Rational(2) + q(1, 100000000));
    EXPECT_LT(c.beta_lower.to_rational(), q(1, 2));
    EXPECT_GT(c.beta_lower.to_rational(), q(1, 2) - q(1, 100000000));
    EXPECT_LE(c.beta_lower * c.A_upper, Dyadic(1));
    EXPECT_GE(c.A_upper, c.mesh_max_upper + c.mesh_slack);
    EXPECT_THROW(assemble_bound(params, mesh, MeshMax{Dyadic(-5), 0}, Targets{}), DomainError);
}

TEST(Certify, StrictReplicationNeedsLipschitzFour) {
    const FamilyParams params = reference_params();
    const Certificate c = assemble_bound(params, small_mesh(1000), MeshMax{Dyadic(1), 0}, Targets{}, LipschitzMode::Four);
    EXPECT_EQ(c.lipschitz, Rational(4));
    EXPECT_TRUE(c.strict_replication);
    // K = 11/10 makes the exact bound exceed 4
    const FamilyParams slow = FamilyParams::make(q(11, 10), Rational(0), 5);
    EXPECT_THROW(assemble_bound(slow, small_mesh(1000), MeshMax{Dyadic(1), 0}, Targets{}, LipschitzMode::Four),
                 DomainError);
}

TEST(Certify, QuickMesh) {
    const Certificate c = certify(reference_params(), small_mesh(20000, 60), Targets{});
    EXPECT_LT(c.A_upper.to_rational(), q(171, 100));
    EXPECT_TRUE(c.passed_mesh);
    EXPECT_LT(c.mesh_slack.to_rational(), q(629, 1000000));
    EXPECT_LE(c.beta_lower * c.A_upper, Dyadic(1));
    EXPECT_LE(std::abs(c.argmax_index - 17945), 2);
}

TEST(Certify, NeverUnsoundPass) {
    const Certificate c = certify(reference_params(), small_mesh(2000, 40), Targets{q(2, 1), q(2, 1), q(1, 2)});
    EXPECT_TRUE(c.passed());
    const Rational U = c.mesh_max_upper.to_rational();
    const Rational A = c.A_upper.to_rational();
    const Rational B = c.beta_lower.to_rational();
    const MeshMax mm{c.mesh_max_upper, c.argmax_index};
    // each target set just past the computed quantity flips its flag
    const Rational tiny = q(1, 1000000000) * q(1, 1000000000);
    EXPECT_FALSE(assemble_bound(c.params, c.mesh, mm, Targets{U - tiny, q(2, 1), q(1, 2)}).passed_mesh);
    EXPECT_TRUE(assemble_bound(c.params, c.mesh, mm, Targets{U, q(2, 1), q(1, 2)}).passed_mesh);
    EXPECT_FALSE(assemble_bound(c.params, c.mesh, mm, Targets{q(2, 1), A, q(1, 2)}).passed_A);
    EXPECT_FALSE(assemble_bound(c.params, c.mesh, mm, Targets{q(2, 1), A - tiny, q(1, 2)}).passed_A);
    EXPECT_FALSE(assemble_bound(c.params, c.mesh, mm, Targets{q(2, 1), q(2, 1), B}).passed_beta);
    EXPECT_FALSE(assemble_bound(c.params, c.mesh, mm, Targets{q(2, 1), q(2, 1), B + tiny}).passed_beta);
    // target below the mesh maximum
    EXPECT_FALSE(assemble_bound(c.params, c.mesh, mm, Targets{q(17, 10), q(2, 1), q(1, 2)}).passed());
}

TEST(Certify, MonotoneSlack) {
    const FamilyParams params = reference_params();
    Dyadic prev;
    bool first = true;
    for (const std::int64_t M : {200, 2000, 20000}) {
        const Certificate c = certify(params, small_mesh(M, 40), Targets{});
        if (!first) EXPECT_LT(c.A_upper, prev) << M;
        prev = c.A_upper;
        first = false;
    }
}

TEST(Certify, PrecisionRobustness) {
    const FamilyParams params = reference_params();
    const MeshMax a = mesh_max_upper(params, small_mesh(4000, 60));
    const MeshMax b = mesh_max_upper(params, small_mesh(4000, 90));
    EXPECT_LT((a.upper - b.upper).abs().to_rational(), Rational(1) / Rational(10).pow(40));
}

TEST(Certify, JsonRoundTrip) {
    const Certificate c = certify(reference_params(), small_mesh(1500, 40, 2, 100), Targets{});
    const std::string text = emit_log(c, LogFormat::Json);
    const Certificate back = parse_certificate(text);
    EXPECT_TRUE(same_result(c, back));
    EXPECT_EQ(back.mesh, c.mesh);
    EXPECT_EQ(back.wall_time_seconds, c.wall_time_seconds);
    EXPECT_EQ(emit_log(back, LogFormat::Json), text);
    EXPECT_TRUE(recheck(back).empty());
    const auto j = nlohmann::json::parse(text);
    for (const char* key : {"params", "mesh", "mesh_max_upper", "argmax_index", "lipschitz", "strict_replication",
                            "mesh_slack", "tail", "A_upper", "beta_lower", "target_mesh", "target_A", "target_beta",
                            "passed_mesh", "passed_A", "passed_beta", "software_version", "wall_time_seconds"})
        EXPECT_TRUE(j.contains(key)) << key;
    EXPECT_THROW(parse_certificate("{"), ParseError);
    EXPECT_THROW(parse_certificate("{}"), ParseError);
}

TEST(Certify, TamperDetection) {
    const Certificate c = certify(reference_params(), small_mesh(1500, 40), Targets{});
    auto j = to_json(c);
    j["mesh_max_upper"] = detail::dyadic_to_json(c.mesh_max_upper - Dyadic::pow2(-100), Rounding::Ceil);
    EXPECT_FALSE(recheck(certificate_from_json(j)).empty());
    auto j1 = to_json(c);
    j1["A_upper"]["decimal"] = "1.5";
    EXPECT_TRUE(recheck(certificate_from_json(j1)).empty());
    EXPECT_FALSE(audit_certificate(j1).empty());
    EXPECT_TRUE(audit_certificate(to_json(c)).empty());
    auto j2 = to_json(c);
    j2["passed_beta"] = !c.passed_beta;
    EXPECT_FALSE(recheck(certificate_from_json(j2)).empty());
    auto j3 = to_json(c);
    j3["tail"] = "0";
    EXPECT_FALSE(recheck(certificate_from_json(j3)).empty());
}

TEST(Certify, TextLog) {
    const Certificate pass = certify(reference_params(), small_mesh(2000, 40), Targets{q(2, 1), q(2, 1), q(1, 2)});
    const std::string log = emit_log(pass, LogFormat::Text);
    EXPECT_EQ(log.rfind("=== Dyadic-ball-certified mesh bound ===\nM = 2000, dps = 40, workers = 1\nmesh_max_upper = ", 0),
              0u);
    EXPECT_NE(log.find("Target bound   = 2.000000000000000000000000\n"), std::string::npos);
    EXPECT_NE(log.find("Certified mesh_max_upper <= bound : True\n"), std::string::npos);
    EXPECT_EQ(last_line(log), "Certified all targets : True");
    const Certificate fail = certify(reference_params(), small_mesh(2000, 40), Targets{q(17, 10), q(2, 1), q(1, 2)});
    const std::string flog = emit_log(fail, LogFormat::Text);
    EXPECT_NE(flog.find("Certified mesh_max_upper <= bound : False\n"), std::string::npos);
    EXPECT_EQ(last_line(flog), "Certified all targets : False");
}

TEST(Certify, MeshSpecValidation) {
    EXPECT_THROW(small_mesh(0).validate(), DomainError);
    EXPECT_THROW(small_mesh(10, 0).validate(), DomainError);
    EXPECT_THROW(small_mesh(10, 40, 0).validate(), DomainError);
    EXPECT_THROW(small_mesh(10, 40, 1, 0).validate(), DomainError);
    EXPECT_EQ(MeshSpec{}.precision().bits, 309);
}
