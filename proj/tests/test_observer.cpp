#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "pfc/observer.hpp"
#include "pfc/simulator.hpp"
#include "test_support.hpp"

using namespace pfc;
using pfc::testing::direct_canonical;
using pfc::testing::no_beta;

namespace {

// neutrally stable two-block observable pair: a pure chain plus an
// oscillator, so the open-loop error would not decay on its own
struct ObsCase {
    Matrix A;
    Matrix C;
};

ObsCase neutral_two_block(std::mt19937& rng) {
    Vector a1(2), a2(2);
    a1 << 0.0, 0.0;   // double chain
    a2 << 0.0, 0.25;  // oscillator at 0.5 rad/s
    auto beta = no_beta(2);
    beta[0][1] = Vector(2);
    beta[0][1] << 0.3, -0.2;
    const CanonicalData cd = direct_canonical({2, 2}, {a1, a2}, beta);
    const Matrix S = testing::random_orthogonal(4, rng);
    const Matrix Ac = S.transpose() * cd.A_hat * S;
    const Matrix Bc = S.transpose() * cd.B_hat;
    return {Ac.transpose(), Bc.transpose()};
}

}  // namespace

TEST_CASE("observer transform: single-output companion pair") {
    Matrix A(2, 2);
    A << 0, 0, 1, 0;
    Matrix C(1, 2);
    C << 0, 1;
    const ObserverData od = observer_transform(A, C);
    CHECK(od.p() == 1);
    CHECK(od.dual.r == std::vector<int>{2});
    Matrix expect(2, 2);
    expect << 0, 0, 1, 0;
    CHECK((od.A_o - expect).norm() < 1e-12);
    // structural duality: exactly the transpose images of the dual transform
    const CanonicalData check =
        canonical_transform(PlantModel{A.transpose(), C.transpose()});
    CHECK((od.A_o - check.A_hat.transpose()).norm() == 0.0);
    CHECK((od.C_o - check.B_hat.transpose()).norm() == 0.0);
}

TEST_CASE("observer transform: already canonical dual keeps the structure") {
    std::mt19937 rng(31);
    const auto truth = testing::random_canonical_plant({2, 1}, 2, rng, 0.3);
    const Matrix A = truth.plant.A.transpose();
    const Matrix C = truth.plant.B.transpose();
    const ObserverData od = observer_transform(A, C);
    CHECK(od.p() == 2);
    CHECK(verify_canonical_structure(od.dual, 1e-8).pass);
}

TEST_CASE("observer transform: random observable 5x5 with two outputs") {
    std::mt19937 rng(33);
    const auto truth = testing::random_canonical_plant({3, 2}, 2, rng, 0.4);
    const ObserverData od = observer_transform(truth.plant.A.transpose(),
                                               truth.plant.B.transpose());
    CHECK(od.n() == 5);
    CHECK(od.p() == 2);
    CHECK(verify_canonical_structure(od.dual, 1e-8).pass);
}

TEST_CASE("unobservable pair raises") {
    Matrix A = Matrix::Identity(3, 3);
    Matrix C = Matrix::Zero(1, 3);
    C(0, 0) = 1.0;
    CHECK_THROWS_AS(observer_transform(A, C), NotObservable);
}

TEST_CASE("scalar block innovation: eta = (g / 2R) ytilde") {
    Matrix A(1, 1);
    A << -0.4;
    Matrix C(1, 1);
    C << 1.0;
    const ObserverData od = observer_transform(A, C);
    const GainSignal g = GainSignal::sinusoid(1.0, 1.2);
    const Observer obs(od, {g}, {2.0});
    CHECK(obs.block_k(1) == 2);
    for (double t : {0.3, 1.7, 4.4}) {
        const double R = 0.8;
        const Vector eta = obs.innovation(1, 0.5, t, R);
        REQUIRE(eta.size() == 1);
        CHECK(eta(0) == doctest::Approx(g.eval(t) / (2.0 * R) * 0.5).epsilon(1e-12));
    }
    CHECK(obs.innovation(1, 0.0, 0.9, 1.0).norm() == 0.0);
}

TEST_CASE("nominal single block: error decays exponentially under the dual law") {
    Vector a(2);
    a << 0.3, -0.2;  // one unstable root near +0.32
    const CanonicalData block = direct_canonical({2}, {a}, no_beta(1));
    const Matrix A = block.A_hat.transpose();
    const Matrix C = block.B_hat.transpose();
    const ObserverData od = observer_transform(A, C);
    const GainSignal g = GainSignal::sinusoid(1.0, 1.0);
    const double lambda = select_lambdas(block, 2.0).lambdas[0];
    const Observer obs(od, {g}, {lambda});

    const int n = 2;
    auto rhs = [&](double t, const Vector& s) {
        const Vector x = s.head(n);
        const Vector xh = s.segment(n, n);
        const Vector R = s.tail(1);
        Vector y(1);
        y << g.eval(t) * (C * x)(0);
        Vector d(2 * n + 1);
        d.head(n) = A * x;
        d.segment(n, n) = obs.rhs(xh, Vector::Zero(n), y, t, R);
        d.tail(1) = obs.filter_rhs_all(t, R);
        return d;
    };
    Vector s0(2 * n + 1);
    s0 << 1.0, -0.7, 0.0, 0.0, 1.0;
    const Trajectory traj = integrate(rhs, s0, 0.0, 40.0, 1e-3);
    std::vector<double> err;
    err.reserve(traj.size());
    for (const auto& s : traj.states) {
        err.push_back((s.head(n) - s.segment(n, n)).norm());
    }
    const DecayFit fit = fit_decay_rate(traj.times, err, 0.5);
    CHECK(fit.rate > 0.05);
    CHECK(err.back() < 1e-2 * err.front());
}

TEST_CASE("zero estimation error: the observer copies the plant") {
    std::mt19937 rng(41);
    const ObsCase oc = neutral_two_block(rng);
    const ObserverData od = observer_transform(oc.A, oc.C);
    auto [g1, g2] = bump_schedule();
    const Observer obs(od, {g1, g2}, {2.0, 2.0});

    Vector x = Vector::Ones(4);
    Vector u = Vector::LinSpaced(4, 0.5, 0.8);
    Vector R(2);
    R << 0.9, 1.1;
    const double t = 0.6;
    Vector y(2);
    const Vector z = od.Tz * x;
    for (int i = 1; i <= 2; ++i) {
        const GainSignal& gi = i == 1 ? g1 : g2;
        y(od.output_of_block(i)) =
            gi.eval(t) * z(od.dual.block_offset(i) + od.dual.r[i - 1] - 1);
    }
    const Vector d = obs.rhs(x, u, y, t, R);
    CHECK((d - (oc.A * x + u)).norm() < 1e-12);
}

TEST_CASE("two-block cascade: reconstruction under bump measurement gains") {
    std::mt19937 rng(43);
    const ObsCase oc = neutral_two_block(rng);
    const ObserverData od = observer_transform(oc.A, oc.C);
    auto [g1, g2] = bump_schedule();
    const std::vector<GainSignal> gains = {g1, g2};
    // modest decays: large lambda starves the filters during the long
    // off-windows and the injection gains g^k/2R turn stiff
    std::vector<double> lambdas;
    for (int i = 1; i <= 2; ++i) {
        const CanonicalData block =
            direct_canonical({od.dual.r[i - 1]}, {od.dual.alpha[i - 1]}, no_beta(1));
        lambdas.push_back(select_lambdas(block, 0.5).lambdas[0]);
    }
    const Observer obs(od, gains, lambdas);

    const int n = od.n();
    auto rhs = [&](double t, const Vector& s) {
        const Vector x = s.head(n);
        const Vector xh = s.segment(n, n);
        const Vector R = s.tail(2);
        Vector y(2);
        const Vector z = od.Tz * x;
        for (int i = 1; i <= 2; ++i) {
            y(od.output_of_block(i)) =
                gains[i - 1].eval(t) * z(od.dual.block_offset(i) + od.dual.r[i - 1] - 1);
        }
        Vector d(2 * n + 2);
        d.head(n) = oc.A * x;
        d.segment(n, n) = obs.rhs(xh, Vector::Zero(n), y, t, R);
        d.tail(2) = obs.filter_rhs_all(t, R);
        return d;
    };
    Vector s0(2 * n + 2);
    s0.setZero();
    s0.head(n) << 0.6, -0.4, 0.8, -0.2;
    s0.tail(2) << 1.0, 1.0;
    const Trajectory traj = integrate(rhs, s0, 0.0, 80.0, 5e-4);
    std::vector<double> err;
    for (const auto& s : traj.states) err.push_back((s.head(n) - s.segment(n, n)).norm());
    const DecayFit fit = fit_decay_rate(traj.times, err, 0.4);
    CHECK(fit.rate > 0.0);
    CHECK(err.back() < 1e-3 * err.front());
}
