#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "pilotwave/equivariance.hpp"
#include "pilotwave/errors.hpp"
#include "pilotwave/normal.hpp"
#include "pilotwave/quadrature.hpp"
#include "pilotwave/stern_gerlach.hpp"

using namespace pilotwave;
using std::numbers::pi;

namespace {

const SternGerlach& standard() {
    static const SternGerlach sg(MagnetSpec{}, 1e-4);
    return sg;
}

double gauss(double z, double sigma) {
    return std::exp(-z * z / (2.0 * sigma * sigma)) / (std::sqrt(2.0 * pi) * sigma);
}

}  // namespace

TEST_CASE("derived magnet quantities") {
    const auto& d = standard().derived();
    const PhysicalConstants c;
    const double dt = 0.01 / 500.0;
    CHECK(d.field_time == doctest::Approx(2e-5).epsilon(1e-15));
    CHECK(d.z_delta == doctest::Approx(c.bohr_magneton * 1e3 * dt * dt / (2.0 * 1.8e-25)).epsilon(1e-15));
    CHECK(d.u == doctest::Approx(c.bohr_magneton * 1e3 * dt / 1.8e-25).epsilon(1e-15));
    CHECK(d.z_delta == doctest::Approx(1.0e-5).epsilon(0.05));
    CHECK(d.u == doctest::Approx(1.0).epsilon(0.05));
    CHECK(d.decoherence_time == doctest::Approx((3e-4 - d.z_delta) / d.u).epsilon(1e-14));
    CHECK(d.decoherence_time == doctest::Approx(2.9e-4).epsilon(0.05));
    CHECK(d.larmor_frequency == doctest::Approx(2.0 * c.bohr_magneton * 5.0 / c.hbar).epsilon(1e-15));

    MagnetSpec bad;
    bad.gradient = 0.0;
    CHECK_THROWS_AS(SternGerlach(bad, 1e-4), std::invalid_argument);
    CHECK_THROWS_AS(SternGerlach(MagnetSpec{}, 0.0), std::invalid_argument);
}

TEST_CASE("stronger gradient separates faster") {
    MagnetSpec strong;
    strong.gradient = 2e3;
    const SternGerlach sg2(strong, 1e-4);
    const auto& a = standard().derived();
    const auto& b = sg2.derived();
    CHECK(b.u == doctest::Approx(2.0 * a.u).epsilon(1e-14));
    CHECK(b.z_delta == doctest::Approx(2.0 * a.z_delta).epsilon(1e-14));
    CHECK(b.decoherence_time < a.decoherence_time);
}

TEST_CASE("initial spinor") {
    const SternGerlach& sg = standard();
    const SpinOrientation s0{pi / 3.0, 0.7};
    for (double z : {-2e-4, 0.0, 3e-5}) {
        const SpinorSample v = sg.spinor(s0, z, 0.0).value;
        const double a = std::pow(2.0 * pi * 1e-8, -0.25) * std::exp(-z * z / (4.0 * 1e-8));
        CHECK(std::abs(v.plus - a * std::cos(pi / 6.0) * std::polar(1.0, -0.35)) < 1e-12 * a);
        CHECK(std::abs(v.minus - a * std::sin(pi / 6.0) * std::polar(1.0, 0.35)) < 1e-12 * a);
    }
    CHECK_THROWS_AS((void)sg.spinor(s0, 0.0, -1e-9), std::domain_error);
    CHECK_THROWS_AS((void)sg.in_field(s0, 0.0, 3e-5), std::domain_error);
    CHECK_THROWS_AS((void)sg.after_field(s0, 0.0, -1e-9), std::domain_error);
}

TEST_CASE("packet displacement and continuity at the field exit") {
    const SternGerlach& sg = standard();
    const double dt = sg.derived().field_time;
    CHECK(sg.component_center(dt) == doctest::Approx(sg.derived().z_delta).epsilon(1e-14));
    CHECK(sg.component_center(dt + 1e-4) ==
          doctest::Approx(sg.derived().z_delta + sg.derived().u * 1e-4).epsilon(1e-14));
    const SpinOrientation s0{1.0, 2.0};
    for (double z : {-1e-4, 0.0, 4e-5}) {
        const SpinorJet in = sg.in_field(s0, z, dt);
        const SpinorJet out = sg.after_field(s0, z, 0.0);
        CHECK(std::abs(in.value.plus - out.value.plus) < 1e-9 * std::abs(in.value.plus));
        CHECK(std::abs(in.value.minus - out.value.minus) < 1e-9 * std::abs(in.value.minus));
        CHECK(std::abs(in.dz.plus - out.dz.plus) < 1e-9 * std::abs(in.dz.plus));
    }
}

TEST_CASE("density equals the spinor modulus") {
    const SternGerlach& sg = standard();
    const SpinOrientation s0{pi / 3.0, 0.0};
    for (double t : {0.0, 1e-5, 2e-5, 1e-4, 4e-4}) {
        for (double z : {-3e-4, -1e-4, 0.0, 2e-4, 5e-4}) {
            const double rho = sg.spinor(s0, z, t).value.density();
            CHECK(sg.density_total(s0.theta, z, t) == doctest::Approx(rho).epsilon(1e-12).scale(1e-300));
            CHECK(sg.z_marginal(s0.theta, t).pdf(z) == doctest::Approx(rho).epsilon(1e-12).scale(1e-300));
        }
        QuadratureSpec spec;
        spec.abs_tol = 1e-12;
        const double c = sg.component_center(t);
        const double norm = integrate_real(
            [&](double z) { return sg.spinor(s0, z, t).value.density(); }, -c - 1.5e-3, c + 1.5e-3, spec);
        CHECK(norm == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("eigenstate and weights") {
    const SternGerlach& sg = standard();
    for (double t : {0.0, 1e-5, 3e-4}) {
        for (double z : {-1e-4, 0.0, 1e-4}) {
            CHECK(sg.spinor({0.0, 0.0}, z, t).value.minus == Complex(0.0, 0.0));
            CHECK(sg.spinor({pi, 0.0}, z, t).value.plus == Complex(0.0, 0.0));
        }
    }
    const auto mix = sg.z_marginal(pi / 3.0, 3e-4);
    REQUIRE(mix.components().size() == 2);
    double up = 0.0;
    for (const auto& c : mix.components()) {
        if (c.mean > 0.0) up += c.weight;
    }
    CHECK(up == doctest::Approx(0.75).epsilon(1e-14));
}

TEST_CASE("frozen width is justified") {
    const SternGerlach& sg = standard();
    const double spread = sg.hbar() * sg.derived().field_time / (2.0 * sg.mass() * sg.sigma0());
    CHECK(spread == doctest::Approx(5.8579e-11).epsilon(1e-4));
    const double ratio = std::sqrt(1.0 + std::pow(spread / sg.sigma0(), 2));
    CHECK(ratio - 1.0 < 1e-12);
}

TEST_CASE("decoherence from the overlap criterion") {
    const SternGerlach& sg = standard();
    CHECK(sg.normalized_overlap(0.0) > 0.9);
    const double t_ov = sg.overlap_separation_time();
    CHECK(t_ov == doctest::Approx(sg.decoherence_time()).epsilon(0.10));
    CHECK(sg.normalized_overlap(t_ov) == doctest::Approx(std::exp(-4.5)).epsilon(1e-6));
    CHECK(sg.normalized_overlap(2.0 * t_ov) < sg.normalized_overlap(t_ov));
    MagnetSpec flat;
    flat.gradient = 1e-300;
    CHECK_THROWS((void)decoherence_time(flat, 1e-4));
}

TEST_CASE("spin density matrix") {
    const SternGerlach& sg = standard();
    const SpinOrientation s0{pi / 3.0, 0.9};
    const auto r0 = sg.spin_density_matrix(s0, 0.0);
    CHECK(r0[0].real() == doctest::Approx(0.75).epsilon(1e-10));
    CHECK(r0[3].real() == doctest::Approx(0.25).epsilon(1e-10));
    CHECK(std::abs(r0[1]) == doctest::Approx(std::cos(pi / 6.0) * std::sin(pi / 6.0)).epsilon(1e-10));
    CHECK(std::abs(r0[1] - std::conj(r0[2])) < 1e-14);
    const double purity = std::norm(r0[0]) + std::norm(r0[3]) + 2.0 * std::norm(r0[1]);
    CHECK(purity == doctest::Approx(1.0).epsilon(1e-10));

    const double dt = sg.derived().field_time;
    for (double s : {sg.decoherence_time(), 2.0 * sg.decoherence_time(), sg.magnet().drift_time()}) {
        const auto r = sg.spin_density_matrix(s0, dt + s);
        CHECK(std::fabs(r[0].real() - 0.75) < 1e-6);
        CHECK(std::fabs(r[3].real() - 0.25) < 1e-6);
        CHECK(std::abs(r[1]) < 1e-4);
        CHECK(std::abs(r[2]) < 1e-4);
    }
}

TEST_CASE("measurement read from the impact") {
    const SternGerlach& sg = standard();
    const SpinOrientation s0{pi / 3.0, 0.0};
    const double s = sg.decoherence_time() + 1e-4;
    const double c = sg.derived().z_delta + sg.derived().u * s;
    const auto up = measurement_demo(sg, s0, c, s);
    CHECK(up.sign == 1);
    CHECK(up.eigenvalue == doctest::Approx(0.5 * sg.hbar()));
    CHECK(std::abs(up.state.plus) == doctest::Approx(1.0));
    CHECK(up.state.minus == Complex(0.0, 0.0));
    const auto down = measurement_demo(sg, s0, -c, s);
    CHECK(down.sign == -1);
    CHECK(down.eigenvalue == doctest::Approx(-0.5 * sg.hbar()));
    CHECK_THROWS_AS((void)measurement_demo(sg, s0, 0.0, 0.0), AmbiguousRegionError);
}

TEST_CASE("threshold position") {
    const SternGerlach& sg = standard();
    CHECK(sg.threshold_position(pi / 2.0) == doctest::Approx(0.0).scale(1e-4).epsilon(1e-12));
    CHECK(sg.threshold_position(pi / 3.0) == doctest::Approx(-0.6744897501960817e-4).epsilon(1e-10));
    CHECK(std::isinf(sg.threshold_position(0.0)));
    CHECK(sg.threshold_position(0.0) < 0.0);
    CHECK(sg.threshold_position(pi) > 0.0);
    // split at time t leaves exactly sin^2(theta/2) below it
    const double t = 3e-4;
    const double split = sg.split_position(pi / 3.0, t);
    CHECK(sg.z_marginal(pi / 3.0, t).cdf(split) == doctest::Approx(0.25).epsilon(1e-10));
}

TEST_CASE("guidance in the magnet") {
    const SternGerlach& sg = standard();
    const auto v_sym = sg.velocity_field({pi / 2.0, 0.0});
    CHECK(std::fabs(v_sym(0.0, 1e-9)) < 1e-12);
    const auto v = sg.velocity_field({pi / 3.0, 0.0});
    const double dt = sg.derived().field_time;
    const double s = 10.0 * sg.decoherence_time();
    const double z = sg.component_center(dt + s);
    CHECK(v(z, dt + s) == doctest::Approx(sg.derived().u).epsilon(1e-9));
    CHECK(v(-z, dt + s) == doctest::Approx(-sg.derived().u).epsilon(1e-9));
    const auto o = spin_orientation(sg.spinor({pi / 3.0, 0.0}, z, dt + s).value);
    CHECK(o.theta < 1e-9);
}

TEST_CASE("born rule and threshold law for pure states") {
    const SternGerlach& sg = standard();
    for (double theta : {pi / 6.0, pi / 3.0, pi / 2.0, 2.0 * pi / 3.0}) {
        SgEnsembleOptions opts;
        opts.pure = {theta, 0.0};
        opts.n = 4000;
        opts.seed = 12;
        opts.spin_samples = 4;
        opts.step = {1e-10, 1, 24};
        const SgEnsemble e = run_sg_ensemble(sg, opts);
        const double p = std::pow(std::cos(theta / 2.0), 2);
        INFO("theta " << theta);
        CHECK(std::fabs(e.up_fraction - p) < 3.0 * std::sqrt(p * (1.0 - p) / opts.n));
        CHECK(e.violations == 0);
    }
}

TEST_CASE("mixture ensemble") {
    SgEnsembleOptions opts;
    opts.mode = SgMode::Mixture;
    opts.n = 4000;
    opts.seed = 3;
    opts.spin_samples = 4;
    opts.step = {1e-10, 1, 24};
    const SgEnsemble e = run_sg_ensemble(standard(), opts);
    CHECK(std::fabs(e.up_fraction - 0.5) < 3.0 * std::sqrt(0.25 / opts.n));
    CHECK(e.violations == 0);
}

TEST_CASE("equivariance of the z-marginal") {
    const SternGerlach& sg = standard();
    const double t_D = sg.derived().field_time + sg.decoherence_time();
    SgEnsembleOptions opts;
    opts.n = 5000;
    opts.seed = 8;
    opts.spin_samples = 2;
    opts.extra_times = {t_D};
    opts.step = {1e-10, 1, 24};
    const SgEnsemble e = run_sg_ensemble(sg, opts);
    std::vector<Trajectory> trs;
    for (const auto& r : e.runs) trs.push_back(r.trajectory);
    const auto report = equivariance_check(trs, t_D, sg.z_marginal(pi / 3.0, t_D), 50);
    CHECK(report.passed);
    // the marginal density has the analytic two-Gaussian form
    const double c = sg.component_center(t_D);
    CHECK(sg.z_marginal(pi / 3.0, t_D).pdf(0.3e-4) ==
          doctest::Approx(0.75 * gauss(0.3e-4 - c, 1e-4) + 0.25 * gauss(0.3e-4 + c, 1e-4)).epsilon(1e-13));
}

TEST_CASE("ensemble is independent of the worker count") {
    SgEnsembleOptions opts;
    opts.n = 64;
    opts.spin_samples = 3;
    opts.workers = 1;
    const SgEnsemble a = run_sg_ensemble(standard(), opts);
    opts.workers = 3;
    const SgEnsemble b = run_sg_ensemble(standard(), opts);
    for (std::size_t i = 0; i < a.runs.size(); ++i) {
        CHECK(a.runs[i].trajectory.final_position() == b.runs[i].trajectory.final_position());
    }
}
