#include "doctest.h"
#include "ocol/algorithms.hpp"

#include <cmath>

using namespace ocol;

namespace {
ReferenceFunction two_x4() { return ReferenceFunction::PolyNorm(2, 8.0); }

std::vector<Vector> random_linear_stream(Rng& rng, std::size_t n, long T, double bound) {
    std::vector<Vector> gs;
    for (long t = 0; t < T; ++t) {
        Vector g(n);
        for (double& v : g) v = rng.uniform(-bound, bound);
        gs.push_back(g);
    }
    return gs;
}
} // namespace

TEST_SUITE_BEGIN("algorithms");

TEST_CASE("schedule_eta closed forms") {
    CHECK(schedule_eta(StepSchedule::InverseTM(2.0), 5) == doctest::Approx(0.1));
    CHECK(schedule_eta(StepSchedule::SqrtDecay(4.0, 1.0, StepSchedule::Offset::t), 4) ==
          doctest::Approx(1.0));
    CHECK(schedule_eta(StepSchedule::Constant(0.3), 123) == doctest::Approx(0.3));
}

TEST_CASE("schedules are positive and non-increasing far out") {
    for (auto s : {StepSchedule::SqrtDecay(2.0, 0.5, StepSchedule::Offset::t),
                   StepSchedule::SqrtDecay(1.0, 2.0, StepSchedule::Offset::t_plus_1,
                                           StepSchedule::Numerator::sqrt_2K),
                   StepSchedule::InverseTM(0.25), StepSchedule::Constant(0.7)}) {
        double prev = std::numeric_limits<double>::infinity();
        for (long t = 1; t <= 1000000; t = t < 100 ? t + 1 : t * 3) {
            double e = s.eta(t);
            CHECK(e > 0.0);
            CHECK(e <= prev + 1e-15);
            prev = e;
        }
    }
}

TEST_CASE("schedules reject bad parameters") {
    CHECK_THROWS_AS(StepSchedule::Constant(-1.0), ParamError);
    CHECK_THROWS_AS(StepSchedule::InverseTM(0.0), ParamError);
    CHECK_THROWS_AS(StepSchedule::SqrtDecay(-2.0, 1.0), ParamError);
}

TEST_CASE("stabilization gamma") {
    auto mk = [](StepSchedule s, DsomdState::GammaMode m) {
        DsomdState st;
        st.schedule = s;
        st.gamma_mode = m;
        return st;
    };
    auto ratio = mk(StepSchedule::SqrtDecay(1.0, 1.0, StepSchedule::Offset::t),
                    DsomdState::GammaMode::ratio);
    CHECK(stabilization_gamma(ratio, 1) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));

    auto one = mk(StepSchedule::SqrtDecay(1.0, 1.0, StepSchedule::Offset::t),
                  DsomdState::GammaMode::one);
    CHECK(stabilization_gamma(one, 7) == 1.0);

    auto flat = mk(StepSchedule::Constant(0.4), DsomdState::GammaMode::ratio);
    CHECK(stabilization_gamma(flat, 3) == doctest::Approx(1.0));
}

TEST_CASE("ftrl_init picks the regularizer argmin") {
    auto a = ftrl_init(ReferenceFunction::SquaredL2(), StepSchedule::Constant(1.0),
                       DomainSpec::Box({-1.0}, {1.0}), CompositeRegularizer::Zero());
    CHECK(std::fabs(a.x[0]) <= 1e-12);

    auto b = ftrl_init(ReferenceFunction::NegEntropy(), StepSchedule::Constant(1.0),
                       DomainSpec::Simplex(4), CompositeRegularizer::Zero());
    for (double v : b.x) CHECK(v == doctest::Approx(0.25).epsilon(1e-9));

    // FTL: degenerate argmin, tie broken at the box midpoint
    auto c = ftrl_init(std::nullopt, StepSchedule::Constant(1.0), DomainSpec::Box({-1.0}, {1.0}),
                       CompositeRegularizer::Zero());
    CHECK(c.x[0] == doctest::Approx(0.0));
}

TEST_CASE("ftrl_init rejects initial iterates where Psi does not vanish") {
    CHECK_THROWS_AS(ftrl_init(std::nullopt, StepSchedule::Constant(1.0),
                              DomainSpec::Box({1.0}, {2.0}), CompositeRegularizer::L1(1.0)),
                    ValidationError);
}

TEST_CASE("ftrl_step closed-form rounds") {
    auto st = ftrl_init(ReferenceFunction::SquaredL2(), StepSchedule::Constant(1.0),
                        DomainSpec::AllSpace(1), CompositeRegularizer::Zero());
    Vector x2 = ftrl_step(st, LossFunction::Linear({1.0}));
    CHECK(x2[0] == doctest::Approx(-1.0));

    auto st2 = ftrl_init(two_x4(), StepSchedule::Constant(0.5), DomainSpec::Box({-2.0}, {2.0}),
                         CompositeRegularizer::Zero());
    for (int t = 0; t < 5; ++t) {
        Vector x = ftrl_step(st2, LossFunction::ScaledQuadratic(1.0, {0.0}));
        CHECK(std::fabs(x[0]) <= 1e-10);
    }
}

TEST_CASE("FTL is the mean of quadratic centers") {
    auto st = ftrl_init(std::nullopt, StepSchedule::Constant(1.0), DomainSpec::Box({0.0}, {4.0}),
                        CompositeRegularizer::Zero());
    ftrl_step(st, LossFunction::ScaledQuadratic(1.0, {1.0}));
    Vector x3 = ftrl_step(st, LossFunction::ScaledQuadratic(1.0, {3.0}));
    CHECK(x3[0] == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("da_step closed forms") {
    auto st = ftrl_init(ReferenceFunction::SquaredL2(), StepSchedule::Constant(0.5),
                        DomainSpec::AllSpace(1), CompositeRegularizer::Zero(), true);
    Vector x2 = da_step(st, {2.0});
    CHECK(x2[0] == doctest::Approx(-1.0));

    auto se = ftrl_init(ReferenceFunction::NegEntropy(), StepSchedule::Constant(1.0),
                        DomainSpec::Simplex(2), CompositeRegularizer::Zero(), true);
    Vector xe = da_step(se, {1.0, 0.0});
    CHECK(xe[0] == doctest::Approx(std::exp(-1.0) / (1.0 + std::exp(-1.0))).epsilon(1e-9));
    CHECK(xe[1] == doctest::Approx(1.0 / (1.0 + std::exp(-1.0))).epsilon(1e-9));
}

TEST_CASE("dual averaging reduces to FTRL on linear losses") {
    struct Setup {
        ReferenceFunction R;
        DomainSpec dom;
    };
    std::vector<Setup> setups = {
        {ReferenceFunction::SquaredL2(), DomainSpec::Box({-1.0, -1.0, -1.0}, {1.0, 1.0, 1.0})},
        {ReferenceFunction::SquaredL2(), DomainSpec::Box({-2.0}, {2.0})},
        {ReferenceFunction::NegEntropy(), DomainSpec::Simplex(3)},
    };
    Rng rng(57);
    auto sched = StepSchedule::SqrtDecay(1.0, 1.0, StepSchedule::Offset::t_plus_1);
    for (const auto& su : setups) {
        auto gs = random_linear_stream(rng, su.dom.dimension(), 50, 1.0);
        auto da = ftrl_init(su.R, sched, su.dom, CompositeRegularizer::Zero(), true);
        auto ft = ftrl_init(su.R, sched, su.dom, CompositeRegularizer::Zero(), false);
        for (const auto& g : gs) {
            Vector xa = da_step(da, g);
            Vector xb = ftrl_step(ft, LossFunction::Linear(g));
            CHECK(linf_dist(xa, xb) <= 1e-7);
        }
    }
}

TEST_CASE("rda with Psi = 0 equals dual averaging") {
    Rng rng(91);
    auto dom = DomainSpec::Box({-1.0, -1.0}, {1.0, 1.0});
    auto sched = StepSchedule::SqrtDecay(2.0, 1.0);
    auto gs = random_linear_stream(rng, 2, 30, 1.0);
    auto a = ftrl_init(ReferenceFunction::SquaredL2(), sched, dom, CompositeRegularizer::Zero(),
                       true);
    auto b = ftrl_init(ReferenceFunction::SquaredL2(), sched, dom, CompositeRegularizer::Zero(),
                       true);
    for (const auto& g : gs) CHECK(linf_dist(da_step(a, g), rda_step(b, g)) <= 1e-12);
}

TEST_CASE("rda soft-thresholds: 1-D closed form") {
    auto st = ftrl_init(ReferenceFunction::SquaredL2(), StepSchedule::Constant(1.0),
                        DomainSpec::AllSpace(1), CompositeRegularizer::L1(1.0), true);
    Vector x2 = rda_step(st, {3.0});
    CHECK(x2[0] == doctest::Approx(-2.0).epsilon(1e-10));
}

TEST_CASE("rda produces exact zeros when the threshold condition holds") {
    auto st = ftrl_init(two_x4(), StepSchedule::Constant(0.5), DomainSpec::Box({-2.0}, {2.0}),
                        CompositeRegularizer::L1(0.5), true);
    Vector x2 = rda_step(st, {0.3}); // |sum g| = 0.3 <= t*lambda = 0.5
    CHECK(x2[0] == 0.0);
}

TEST_CASE("dsomd_step is a gradient step for the identity mirror map") {
    auto st = dsomd_init(ReferenceFunction::SquaredL2(), StepSchedule::Constant(0.1),
                         DomainSpec::AllSpace(1), DsomdState::GammaMode::one,
                         CompositeRegularizer::Zero(), Vector{1.0});
    Vector x2 = dsomd_step(st, {2.0});
    CHECK(x2[0] == doctest::Approx(0.8));
}

TEST_CASE("dsomd_step on the simplex is multiplicative weights") {
    auto st = dsomd_init(ReferenceFunction::NegEntropy(), StepSchedule::Constant(1.0),
                         DomainSpec::Simplex(2), DsomdState::GammaMode::one,
                         CompositeRegularizer::Zero(), Vector{0.5, 0.5});
    Vector x2 = dsomd_step(st, {1.0, 0.0});
    CHECK(x2[0] == doctest::Approx(std::exp(-1.0) / (1.0 + std::exp(-1.0))).epsilon(1e-9));
    CHECK(x2[1] == doctest::Approx(1.0 / (1.0 + std::exp(-1.0))).epsilon(1e-9));
}

TEST_CASE("dual stabilization mixes toward the initial dual point") {
    // eta_t = 1/t gives gamma_1 = 1/2; with g = 0 the next iterate is halfway
    auto st = dsomd_init(ReferenceFunction::SquaredL2(), StepSchedule::InverseTM(1.0),
                         DomainSpec::AllSpace(1), DsomdState::GammaMode::ratio,
                         CompositeRegularizer::Zero(), Vector{0.0});
    st.x = {1.0};
    Vector x2 = dsomd_step(st, {0.0});
    CHECK(x2[0] == doctest::Approx(0.5));
}

TEST_CASE("stability anchor: dual iterate interpolates when g = 0") {
    auto st = dsomd_init(ReferenceFunction::NegEntropy(),
                         StepSchedule::SqrtDecay(1.0, 1.0, StepSchedule::Offset::t),
                         DomainSpec::Simplex(3), DsomdState::GammaMode::ratio,
                         CompositeRegularizer::Zero(), Vector{0.2, 0.3, 0.5});
    Vector xhat1 = st.xhat1;
    Vector xt = st.x;
    double gamma = stabilization_gamma(st, 1);
    dsomd_step(st, {0.0, 0.0, 0.0});
    Vector expected(xt.size());
    Vector gx = ReferenceFunction::NegEntropy().gradient(xt);
    for (std::size_t i = 0; i < xt.size(); ++i)
        expected[i] = gamma * gx[i] + (1.0 - gamma) * xhat1[i];
    CHECK(linf_dist(st.last_yhat, expected) <= 1e-12);
}

TEST_CASE("vanilla OMD equals explicit gradient descent") {
    Rng rng(101);
    auto sched = StepSchedule::SqrtDecay(1.0, 1.0, StepSchedule::Offset::t);
    auto st = dsomd_init(ReferenceFunction::SquaredL2(), sched, DomainSpec::AllSpace(2),
                         DsomdState::GammaMode::one, CompositeRegularizer::Zero(),
                         Vector{0.3, -0.4});
    Vector x = st.x;
    for (long t = 1; t <= 40; ++t) {
        Vector g{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
        Vector got = dsomd_step(st, g);
        axpy(x, -sched.eta(t), g);
        CHECK(linf_dist(got, x) == 0.0);
    }
}

TEST_CASE("composite dsomd applies the eta_{t+1}-weighted prox") {
    auto psi = CompositeRegularizer::L1(0.4);
    auto sched = StepSchedule::SqrtDecay(1.0, 1.0, StepSchedule::Offset::t);
    auto dom = DomainSpec::Box({-1.0, -1.0}, {1.0, 1.0});
    auto st = dsomd_init(ReferenceFunction::SquaredL2(), sched, dom,
                         DsomdState::GammaMode::ratio, psi, Vector{0.0, 0.0});
    Vector g{-2.0, 0.3};
    Vector got = dsomd_step(st, g);

    // replay the dual algebra by hand
    double eta1 = sched.eta(1), gamma = sched.eta(2) / sched.eta(1);
    Vector yhat{gamma * (-eta1 * g[0]), gamma * (-eta1 * g[1])};
    auto pr = composite_bregman_prox(ReferenceFunction::SquaredL2(), yhat, psi, sched.eta(2), dom);
    CHECK(linf_dist(got, pr.point) <= 1e-12);
}

TEST_SUITE_END();
