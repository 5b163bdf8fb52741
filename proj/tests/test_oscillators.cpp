#include <gtest/gtest.h>

#include <cmath>

#include "adaptsync/oscillators.hpp"
#include "support/generators.hpp"

using namespace adaptsync;

namespace {

Vector v3(double a, double b, double c) { return Eigen::Vector3d(a, b, c); }

void expect_vec_near(const Vector& got, const Vector& want, double tol) {
    ASSERT_EQ(got.size(), want.size());
    for (Eigen::Index i = 0; i < got.size(); ++i) EXPECT_NEAR(got(i), want(i), tol) << "component " << i;
}

} // namespace

TEST(Chua, OriginIsEquilibrium) { expect_vec_near(make_chua()(v3(0, 0, 0)), v3(0, 0, 0), 0.0); }

TEST(Chua, InnerSegmentHandValue) {
    // h(1) = 2/7 - 3/14 * 2 = -1/7
    EXPECT_NEAR(chua_diode(1.0), -1.0 / 7.0, 1e-15);
    expect_vec_near(make_chua()(v3(1, 0, 0)), v3(9.0 / 7.0, 1, 0), 1e-14);
}

TEST(Chua, OuterSegmentHandValue) {
    EXPECT_NEAR(chua_diode(2.0), 1.0 / 7.0, 1e-15);
    expect_vec_near(make_chua()(v3(2, 0, 0)), v3(-9.0 / 7.0, 2, 0), 1e-14);
}

TEST(Chua, FreeFunctionMatchesModel) {
    gen::Rng rng(1);
    const auto m = make_chua();
    for (int k = 0; k < 50; ++k) {
        const Vector x = gen::vector(rng, 3, 5.0);
        expect_vec_near(m(x), chua_field(x), 0.0);
    }
}

TEST(Chua, GloballyLipschitzWithDerivedConstant) {
    // Jacobian entries are bounded: |∂f1/∂x1| <= 9·2/7, ∂f1/∂x2 = 9, row two is
    // (1, -1, 1), ∂f3/∂x2 = -100/7. The Frobenius norm of that bound dominates
    // the operator norm on every linear piece.
    const double alpha = 9.0, beta = 100.0 / 7.0;
    const double lip = std::sqrt(alpha * alpha * (4.0 / 49.0) + alpha * alpha + 3.0 + beta * beta);
    gen::Rng rng(2);
    const auto f = make_chua();
    for (int k = 0; k < 5000; ++k) {
        const Vector x = gen::vector(rng, 3, 20.0), y = gen::vector(rng, 3, 20.0);
        EXPECT_LE((f(x) - f(y)).norm(), lip * (x - y).norm() * (1 + 1e-12));
    }
}

TEST(Chen, OriginIsEquilibrium) { expect_vec_near(make_chen()(v3(0, 0, 0)), v3(0, 0, 0), 0.0); }

TEST(Chen, OnesHandValue) { expect_vec_near(make_chen()(v3(1, 1, 1)), v3(0, 20, -2), 1e-14); }

TEST(Chen, NontrivialEquilibrium) {
    const double s = std::sqrt(63.0);
    EXPECT_LE(make_chen()(v3(s, s, 21)).norm(), 1e-9);
    EXPECT_LE(make_chen()(v3(-s, -s, 21)).norm(), 1e-9);
}

TEST(Lorenz, OriginIsEquilibrium) { expect_vec_near(make_lorenz()(v3(0, 0, 0)), v3(0, 0, 0), 0.0); }

TEST(Lorenz, OnesHandValue) { expect_vec_near(make_lorenz()(v3(1, 1, 1)), v3(0, 26, -5.0 / 3.0), 1e-14); }

TEST(Lorenz, NontrivialEquilibrium) {
    const double s = std::sqrt(72.0);
    EXPECT_LE(make_lorenz()(v3(s, s, 27)).norm(), 1e-9);
    EXPECT_LE(make_lorenz()(v3(-s, -s, 27)).norm(), 1e-9);
}

TEST(Rossler, OriginIsNotEquilibrium) { expect_vec_near(make_rossler()(v3(0, 0, 0)), v3(0, 0, 0.2), 1e-15); }

TEST(Rossler, HandValues) {
    expect_vec_near(make_rossler()(v3(0, 0, 1)), v3(-1, 0, -5.5), 1e-14);
    expect_vec_near(make_rossler()(v3(0, 1, 0)), v3(-1, 0.2, 0.2), 1e-14);
}

TEST(Models, AreAutonomous) {
    gen::Rng rng(3);
    for (const auto& name : model_names()) {
        const auto m = make_model(name);
        const Vector x = gen::vector(rng, static_cast<Eigen::Index>(m.dim()), 10.0);
        expect_vec_near(m(x, 0.0), m(x, 123.4), 0.0);
    }
}

TEST(Models, DefaultBoxes) {
    const auto chua = make_chua().default_box();
    EXPECT_EQ(chua.lower, v3(-5, -5, -5));
    EXPECT_EQ(chua.upper, v3(5, 5, 5));
    EXPECT_EQ(make_lorenz().default_box().upper, v3(30, 30, 30));
    EXPECT_EQ(make_chen().default_box().lower, v3(-30, -30, -30));
    EXPECT_EQ(make_rossler().default_box().lower, v3(-15, -15, 0));
    EXPECT_EQ(make_rossler().default_box().upper, v3(15, 15, 30));
}

TEST(Models, ParameterOverridesChangeTheField) {
    const auto m = make_model("lorenz", {{"rho", 10.0}});
    expect_vec_near(m(v3(1, 1, 1)), v3(0, 8, -5.0 / 3.0), 1e-14);
    EXPECT_DOUBLE_EQ(m.params().at("rho"), 10.0);
}

TEST(Models, UnknownParameterIsAConfigError) {
    try {
        make_model("chua", {{"gamma", 1.0}});
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.path(), "model.params.gamma");
    }
}

TEST(Models, UnknownNameIsAConfigError) {
    try {
        make_model("duffing");
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.path(), "model.name");
    }
}

TEST(Models, WrongDimensionThrows) { EXPECT_THROW(make_chua()(Vector::Zero(2)), DimensionError); }

// --- QUAD probe -------------------------------------------------------------

TEST(QuadProbe, ContractingFieldHolds) {
    const auto m = make_model("linear", {{"k", -1.0}});
    const auto cert = quad_probe(m, Vector::Zero(3), 1.0, m.default_box(), 2000, 1);
    EXPECT_TRUE(cert.holds());
    EXPECT_LE(cert.max_violation, 0.0);
}

TEST(QuadProbe, ExpandingFieldFails) {
    const auto m = make_model("linear", {{"k", 1.0}});
    const auto cert = quad_probe(m, Vector::Zero(3), 1.0, m.default_box(), 2000, 1);
    EXPECT_FALSE(cert.holds());
    // residual = 2‖x − y‖² at the reported pair
    EXPECT_NEAR(cert.max_violation, 2.0 * (cert.argmax_x - cert.argmax_y).squaredNorm(), 1e-12);
}

TEST(QuadProbe, ResidualIsZeroOnTheDiagonal) {
    gen::Rng rng(4);
    for (const auto& name : model_names()) {
        const auto m = make_model(name);
        const Vector x = gen::vector(rng, 3, 10.0);
        EXPECT_EQ(quad_residual(m, Vector::Constant(3, 2.5), 0.7, x, x), 0.0);
    }
}

TEST(QuadProbe, ResidualIsSymmetricInTheSamplePair) {
    gen::Rng rng(5);
    for (const auto& name : model_names()) {
        const auto m = make_model(name);
        for (int k = 0; k < 100; ++k) {
            const Vector x = gen::vector(rng, 3, 10.0), y = gen::vector(rng, 3, 10.0);
            const Vector d = gen::vector(rng, 3, 5.0);
            const double a = quad_residual(m, d, 0.3, x, y), b = quad_residual(m, d, 0.3, y, x);
            EXPECT_NEAR(a, b, 1e-10 * std::max(1.0, std::abs(a)));
        }
    }
}

TEST(QuadProbe, LorenzGridFindsASmallestConsistentGain) {
    const auto m = make_lorenz();
    Box box{Vector::Constant(3, -30.0), Vector::Constant(3, 30.0)};
    double smallest = -1.0;
    for (double d : {10.0, 20.0, 40.0, 80.0}) {
        const auto cert = quad_probe(m, Vector::Constant(3, d), 1.0, box, 20000, 7);
        if (cert.holds()) {
            smallest = d;
            break;
        }
    }
    ASSERT_GT(smallest, 0.0);
    // Monotone in d: every larger gain on the grid also holds.
    EXPECT_TRUE(quad_probe(m, Vector::Constant(3, 80.0), 1.0, box, 20000, 7).holds());
    // The residual is affine in d, so the reported max for a larger d is smaller.
    EXPECT_LT(quad_probe(m, Vector::Constant(3, 80.0), 1.0, box, 20000, 7).max_violation,
              quad_probe(m, Vector::Constant(3, smallest), 1.0, box, 20000, 7).max_violation);
}

TEST(QuadProbe, DeterministicPerSeed) {
    const auto m = make_chen();
    const auto a = quad_probe(m, Vector::Constant(3, 30.0), 0.5, m.default_box(), 500, 9);
    const auto b = quad_probe(m, Vector::Constant(3, 30.0), 0.5, m.default_box(), 500, 9);
    EXPECT_EQ(a.max_violation, b.max_violation);
    EXPECT_EQ(a.argmax_x, b.argmax_x);
}

TEST(QuadProbe, RejectsBadInputs) {
    const auto m = make_chua();
    EXPECT_THROW(quad_probe(m, Vector::Zero(2), 1.0, m.default_box(), 10, 1), DimensionError);
    EXPECT_THROW(quad_probe(m, Vector::Zero(3), 1.0, m.default_box(), 0, 1), InvalidArgument);
    Box empty{Vector::Constant(3, 1.0), Vector::Constant(3, -1.0)};
    EXPECT_THROW(quad_probe(m, Vector::Zero(3), 1.0, empty, 10, 1), InvalidArgument);
}
