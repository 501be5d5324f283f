#include <cmath>
#include <limits>

#include "doctest.h"
#include "gen.hpp"
#include "oracles.hpp"
#include "rfedit/errors.hpp"
#include "rfedit/flow.hpp"
#include "rfedit/straighten.hpp"

using namespace rfedit;
using gen::vec;

namespace {

const Condition c0{"src", vec({0.0, 0.0})};

class NanField final : public VelocityField {
public:
    std::size_t dim() const override { return 2; }
    Vector velocity(const Latent& z, double t, const Condition&) const override {
        return t > 0.6 ? Vector::Constant(2, std::nan("")) : Vector(z * 0.0);
    }
};

class ZeroEps final : public EpsilonField {
public:
    explicit ZeroEps(std::shared_ptr<const NoiseSchedule> s) : m_s(std::move(s)) {}
    std::size_t dim() const override { return 2; }
    Vector epsilon(const Latent& z, double, const Condition&) const override { return Vector::Zero(z.size()); }
    const NoiseSchedule& schedule() const override { return *m_s; }

private:
    std::shared_ptr<const NoiseSchedule> m_s;
};

double rel(const Vector& a, const Vector& b) { return (a - b).norm() / std::max(1.0, b.norm()); }

std::shared_ptr<const GaussianModel> one_component(const Vector& m, double sigma) {
    return std::make_shared<const GaussianModel>(std::map<std::string, Vector>{{"src", m}}, sigma);
}

}  // namespace

TEST_SUITE("time grid") {
    TEST_CASE("uniform grids place nodes and window bounds") {
        const TimeGrid g4 = make_uniform_grid(4, 0.0, 1.0, 4);
        CHECK(g4.times() == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
        CHECK(g4.window_bounds() == g4.times());

        const TimeGrid g1 = make_uniform_grid(4, 0.0, 1.0, 1);
        CHECK(g1.times() == g4.times());
        CHECK(g1.window_bounds() == std::vector<double>{0.0, 1.0});

        const TimeGrid g12 = make_uniform_grid(12, 0.0, 1.0, 4);
        CHECK(g12.times().size() == 13);
        CHECK(g12.window_bounds() == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
    }

    TEST_CASE("grid construction errors") {
        CHECK_THROWS_AS(make_uniform_grid(6, 0.0, 1.0, 4), ConfigError);
        CHECK_THROWS_AS(make_uniform_grid(4, 0.5, 0.5, 1), DomainError);
        CHECK_THROWS_AS(make_uniform_grid(4, 0.7, 0.2, 1), DomainError);
        CHECK_THROWS(TimeGrid({0.0, 0.5, 0.5, 1.0}));
        CHECK_THROWS(TimeGrid({0.0, 1.5}));
        CHECK_THROWS(TimeGrid({0.0, 0.5, 1.0}, {0.0, 0.4, 1.0}));
    }

    TEST_CASE("windows are closed at the top") {
        const TimeGrid g = make_uniform_grid(4, 0.0, 1.0, 2);
        CHECK(g.window_index(0.0) == 0);
        CHECK(g.window_index(0.25) == 0);
        CHECK(g.window_index(0.5) == 0);
        CHECK(g.window_index(0.5000001) == 1);
        CHECK(g.window_index(1.0) == 1);
    }

    TEST_CASE("property: random uniform grids are increasing with bounds on nodes") {
        gen::Rng rng(11);
        for (int trial = 0; trial < 200; ++trial) {
            const std::size_t windows = 1 + rng.index(5);
            const std::size_t steps = windows * (1 + rng.index(6));
            const double lo = rng.uniform(0.0, 0.5);
            const double hi = rng.uniform(lo + 0.01, 1.0);
            const TimeGrid g = make_uniform_grid(steps, lo, hi, windows);
            REQUIRE(g.steps() == steps);
            REQUIRE(g.windows() == windows);
            for (std::size_t k = 0; k < steps; ++k)
                REQUIRE(g.dt(k) > 0.0);
            for (double b : g.window_bounds())
                REQUIRE(g.has_node(b));
            CHECK(g.t(0) == lo);
            CHECK(g.t(steps) == hi);
        }
    }
}

TEST_SUITE("euler steps") {
    TEST_CASE("constant and zero fields") {
        const TimeGrid g = make_uniform_grid(4, 0.0, 1.0, 1);
        gen::ConstantField drift(vec({1.0, 0.0}));
        gen::ConstantField zero(vec({0.0, 0.0}));
        NfeCounter nfe;
        CHECK(denoise_step(drift, g, vec({0, 0}), 0, c0, nfe) == vec({0.25, 0.0}));
        CHECK(invert_step(drift, g, vec({0.25, 0}), 0, c0, nfe) == vec({0.0, 0.0}));
        CHECK(denoise_step(zero, g, vec({3, -4}), 2, c0, nfe) == vec({3, -4}));
        CHECK(invert_step(zero, g, vec({3, -4}), 2, c0, nfe) == vec({3, -4}));
        CHECK(nfe.count() == 4);
    }

    TEST_CASE("gaussian rf field at t = 0.5 with sigma = 1 is the constant +m") {
        // The velocity that moves toward data under z_k = z_{k+1} + v dt is E[x0 - eps | z_t];
        // the oracle computes it from posterior means.
        const Vector m = vec({2.0, 0.0});
        auto field = gaussian_rf_field(one_component(m, 1.0));
        const Condition c = field->model().condition("src");
        const Vector z = vec({1.0, 1.0});
        const Vector expected_v = oracle::velocity(z, m, 1.0, oracle::linear(0.5));
        CHECK(rel(expected_v, m) < 1e-15);
        CHECK(rel(field->velocity(z, 0.5, c), expected_v) < 1e-14);

        const TimeGrid g({0.0, 0.5, 1.0});
        NfeCounter nfe;
        const Latent out = denoise_step(*field, g, z, 0, c, nfe);
        CHECK(rel(out, vec({2.0, 1.0})) < 1e-14);
    }

    TEST_CASE("non-finite velocity raises a numerical error with step and time") {
        const TimeGrid g = make_uniform_grid(4, 0.0, 1.0, 1);
        NanField f;
        NfeCounter nfe;
        CHECK_NOTHROW(denoise_step(f, g, vec({1, 1}), 1, c0, nfe));
        try {
            denoise_step(f, g, vec({1, 1}), 2, c0, nfe);
            FAIL("expected NumericalError");
        } catch (const NumericalError& e) {
            CHECK(e.step() == 2);
            CHECK(e.time() == 0.75);
        }
        CHECK_THROWS_AS(denoise_step(f, g, vec({1, 1}), 4, c0, nfe), IndexError);
        CHECK_THROWS_AS(denoise_step(f, g, vec({1, 1, 1}), 0, c0, nfe), DomainError);
    }

    TEST_CASE("property: invert then denoise on a constant field is the identity") {
        gen::Rng rng(12);
        for (int trial = 0; trial < 500; ++trial) {
            const std::size_t dim = 1 + rng.index(8);
            gen::ConstantField f(rng.normal_vector(dim, 3.0));
            const TimeGrid g = make_uniform_grid(1 + rng.index(16), 0.0, 1.0, 1);
            const std::size_t k = rng.index(g.steps());
            const Latent z = rng.normal_vector(dim, 5.0);
            NfeCounter nfe;
            const Latent back = denoise_step(f, g, invert_step(f, g, z, k, c0, nfe), k, c0, nfe);
            REQUIRE(rel(back, z) <= 1e-12);
        }
    }
}

TEST_SUITE("inversion and sampling loops") {
    TEST_CASE("zero and constant field trajectories") {
        const TimeGrid g = make_uniform_grid(4, 0.0, 1.0, 1);
        gen::ConstantField zero(vec({0.0, 0.0}));
        NfeCounter nfe;
        const TrajectoryRecord r0 = invert(zero, vec({3, 4}), c0, g, 4, nfe);
        for (const auto& z : r0.latents())
            CHECK(z == vec({3, 4}));
        for (const auto& v : r0.velocities())
            CHECK(v == vec({0, 0}));

        gen::ConstantField drift(vec({1.0, 0.0}));
        const TrajectoryRecord r1 = invert(drift, vec({0, 0}), c0, g, 4, nfe);
        const std::vector<double> xs{0.0, -0.25, -0.5, -0.75, -1.0};
        for (std::size_t k = 0; k < 5; ++k)
            CHECK(r1.latents()[k][0] == doctest::Approx(xs[k]).epsilon(1e-15));

        const auto path = sample(drift, vec({-1, 0}), c0, g, 4, nfe);
        CHECK(path.size() == 5);
        CHECK(path.front() == vec({-1, 0}));
        CHECK(path.back().norm() < 1e-15);

        const auto still = sample(zero, vec({2, 2}), c0, g, 3, nfe);
        for (const auto& z : still)
            CHECK(z == vec({2, 2}));
    }

    TEST_CASE("nfe accounting is exact and additive") {
        gen::Rng rng(13);
        auto model = rng.model(3);
        auto field = gaussian_rf_field(model);
        const Condition c = model->condition("src");
        const TimeGrid g = make_uniform_grid(8, 0.0, 1.0, 2);
        NfeCounter nfe;
        const TrajectoryRecord r = invert(*field, rng.normal_vector(3), c, g, 5, nfe);
        CHECK(r.nfe() == 5);
        CHECK(nfe.count() == 5);
        sample(*field, r.latents().back(), c, g, 5, nfe);
        CHECK(nfe.count() == 10);
        CHECK_THROWS_AS(invert(*field, rng.normal_vector(3), c, g, 9, nfe), IndexError);
    }

    TEST_CASE("property: record self-consistency on gaussian fields") {
        gen::Rng rng(14);
        for (int trial = 0; trial < 100; ++trial) {
            const std::size_t dim = 1 + rng.index(6);
            auto model = rng.model(dim);
            auto field = trial % 2 ? gaussian_rf_field(model) : vp_flow_field(model, make_schedule("cosine"));
            const Condition c = model->condition("src");
            const std::size_t n = 1 + rng.index(12);
            const TimeGrid g = make_uniform_grid(n, 0.0, 1.0, 1);
            NfeCounter nfe;
            const TrajectoryRecord r = invert(*field, rng.normal_vector(dim, 2.0), c, g, n, nfe);
            REQUIRE(r.latents().size() == r.velocities().size() + 1);
            REQUIRE(r.nfe() >= r.velocities().size());
            for (std::size_t k = 0; k < n; ++k) {
                const Vector expected = r.latents()[k] - r.velocities()[k] * g.dt(k);
                REQUIRE(rel(r.latents()[k + 1], expected) <= 1e-12);
                // The cached velocity is the field at (latents[k], t_k).
                REQUIRE(rel(r.velocities()[k], field->velocity(r.latents()[k], g.t(k), c)) <= 1e-12);
            }
        }
    }

    TEST_CASE("round trip on a straightened field shrinks linearly in dt") {
        const Vector m = vec({2.0, -1.0});
        auto model = one_component(m, 0.7);
        auto base = gaussian_rf_field(model);
        const StraightenedField straight(*base, make_uniform_grid(4, 0, 1, 4), model->conditions());
        const Condition c = model->condition("src");
        const Latent z0 = vec({1.3, 0.4});
        double previous = 0.0;
        for (std::size_t n : {4, 8, 16, 32, 64}) {
            const TimeGrid g = make_uniform_grid(n, 0.0, 1.0, 4);
            NfeCounter nfe;
            const auto r = invert(straight, z0, c, g, n, nfe);
            const double err = (sample(straight, r.latents().back(), c, g, n, nfe).back() - z0).norm();
            if (previous > 0.0) {
                CHECK(previous / err == doctest::Approx(2.0).epsilon(0.2));
            }
            previous = err;
        }
    }
}

TEST_SUITE("ddim") {
    TEST_CASE("zero noise prediction scales z0") {
        ZeroEps eps(make_schedule("cosine"));
        const TimeGrid g = make_uniform_grid(4, 0.0, 1.0, 1);
        NfeCounter nfe;
        const Latent z0 = vec({1.5, -2.0});
        const auto r = ddim_invert(eps, z0, c0, g, 4, nfe);
        CHECK(nfe.count() == 4);
        for (std::size_t k = 0; k <= 4; ++k) {
            const double scale = std::sqrt(eps.alpha_bar(g.t(k)));
            CHECK(rel(r.latents()[k], scale * z0) < 1e-12);
        }
    }

    TEST_CASE("schedule reaching zero at the noise end is a configuration error") {
        ZeroEps eps(make_schedule("linear"));
        const TimeGrid g = make_uniform_grid(4, 0.0, 1.0, 1);
        NfeCounter nfe;
        CHECK_THROWS_AS(ddim_invert(eps, vec({1, 1}), c0, g, 4, nfe), ConfigError);
        CHECK_NOTHROW(ddim_invert(eps, vec({1, 1}), c0, g, 3, nfe));
    }

    TEST_CASE("one-shot step error equals the noise difference against the fixed point") {
        gen::Rng rng(15);
        int checked = 0;
        for (int trial = 0; trial < 50; ++trial) {
            const std::size_t dim = 1 + rng.index(4);
            auto model = rng.model(dim);
            auto schedule = make_schedule("cosine");
            const GaussianEpsilonField eps(model, schedule);
            const Condition c = model->condition("src");
            const TimeGrid g = make_uniform_grid(4, 0.0, 1.0, 1);
            const Latent z0 = model->mean(c) + model->sigma() * rng.normal_vector(dim);
            NfeCounter nfe;
            const auto r = ddim_invert(eps, z0, c, g, 4, nfe);

            for (std::size_t k = 0; k < 4; ++k) {
                const double t = g.t(k + 1);
                const double abar = schedule->alpha_bar(t);
                auto eps_at = [&](const oracle::Vec& z) -> oracle::Vec {
                    return oracle::posterior(z, model->mean(c), model->sigma(), oracle::cosine(t)).eps;
                };
                const oracle::FixedPoint fp = oracle::ddim_fixed_point(eps_at, z0, r.latents()[k], abar);
                // record identity holds bit-exactly for the effective velocity
                REQUIRE(r.latents()[k + 1] == r.latents()[k] - r.velocities()[k] * g.dt(k));
                if (!fp.converged)
                    continue;  // small sigma or abar near 0: the map barely contracts
                const oracle::Vec& fixed = fp.z;
                const oracle::Vec predicted = std::sqrt(1 - abar) * (eps_at(r.latents()[k]) - eps_at(fixed));
                REQUIRE((r.latents()[k + 1] - fixed - predicted).norm() <= 1e-8 * std::max(1.0, fixed.norm()));
                ++checked;
            }
        }
        CHECK(checked >= 90);
        MESSAGE("fixed points converged on " << checked << " of 200 steps");
    }

    TEST_CASE("curved vp: 4-step ddim round trip is worse than perrfi on the straightened field") {
        const Vector m = vec({2.0, 0.0});
        auto model = one_component(m, 1.0);
        auto schedule = make_schedule("cosine");
        auto vp = vp_flow_field(model, schedule);
        const StraightenedField straight(*vp, make_uniform_grid(4, 0, 1, 4), model->conditions());
        const GaussianEpsilonField eps(model, schedule);
        const Condition c = model->condition("src");
        const TimeGrid g = make_uniform_grid(4, 0.0, 1.0, 4);
        gen::Rng rng(16);
        double perrfi = 0, ddim = 0;
        for (int i = 0; i < 100; ++i) {
            const Latent z0 = m + rng.normal_vector(2);
            NfeCounter nfe;
            const auto a = invert(straight, z0, c, g, 4, nfe);
            perrfi += (sample(straight, a.latents().back(), c, g, 4, nfe).back() - z0).norm();
            const auto b = ddim_invert(eps, z0, c, g, 4, nfe);
            ddim += (ddim_sample(eps, b.latents().back(), c, g, 4, nfe).back() - z0).norm();
            CHECK(nfe.count() == 16);
        }
        CHECK(perrfi < ddim);
    }
}
