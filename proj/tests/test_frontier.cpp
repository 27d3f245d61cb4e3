#include <doctest.h>

#include <cmath>

#include "parity/error.hpp"
#include "parity/frontier.hpp"

using namespace parity;

TEST_CASE("parabola derived constants") {
    const ParityLined line{2.0, 1.0};
    const auto p = build_parabola(line);
    CHECK(p.view_max.sigma == doctest::Approx(25.0));
    CHECK(p.view_max.exp_return == doctest::Approx(51.0));
    CHECK(p.tangency.sigma == doctest::Approx(12.5));
    CHECK(p.tangency.exp_return == doctest::Approx(26.0));
    CHECK(std::abs(p.h - 13.0) < 1e-12);
    CHECK(std::abs(p.A - 52.0) < 1e-12);
    CHECK(std::abs(p.k - 9.25) < 1e-12);
}

TEST_CASE("parabola touches the line once and stays below it") {
    for (const ParityLined line : {ParityLined{2.0, 1.0}, ParityLined{0.75, 0.0}, ParityLined{1.3, 0.02}}) {
        const auto p = build_parabola(line);
        const double xt = p.tangency.sigma;
        CHECK(std::abs(p.upper(xt) - line.slope * xt - line.intercept) < 1e-9);
        // slope of the upper branch at the tangency point equals the line's
        const double d = p.A / (2.0 * std::sqrt(p.A * (xt - p.k)));
        CHECK(std::abs(d - line.slope) < 1e-9);
        for (const auto& s : sample_curve(p, 400)) {
            CHECK(s.y_upper <= p.line(s.x) + 1e-9);
            CHECK(s.y_lower <= s.y_upper);
        }
    }
}

TEST_CASE("curve sampling and errors") {
    const auto p = build_parabola(ParityLined{2.0, 1.0});
    const auto pts = sample_curve(p, 10);
    REQUIRE(pts.size() == 10);
    CHECK(pts.back().x == doctest::Approx(p.view_max.sigma));
    CHECK(pts.front().x > p.k);
    CHECK_THROWS_AS(sample_curve(p, 1), Error);
    CHECK_THROWS_AS(build_parabola(ParityLined{0.0, 1.0}), Error);
    CHECK_THROWS_AS(build_parabola(ParityLined{2.0, 1.0}, 50.0, 0.5, 0.0), Error);
    // a non-positive tangency height leaves no parabola
    try {
        build_parabola(ParityLined{2.0, -100.0});
        FAIL("expected DegenerateParabola");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DegenerateParabola);
    }
}

TEST_CASE("unit height constant collapses the parabola") {
    CHECK_THROWS_AS(build_parabola(ParityLined{2.0, 1.0}, 50.0, 0.5, 1.0), Error);
    const auto p = build_parabola(ParityLined{2.0, 1.0});
    CHECK(p.upper(p.tangency.sigma) == doctest::Approx(26.0));
    CHECK(p.lower(p.tangency.sigma) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(p.upper(p.k) == doctest::Approx(p.h));
    for (const auto& s : sample_curve(p)) {
        CHECK(std::abs((s.y_upper - p.h) * (s.y_upper - p.h) - p.A * (s.x - p.k)) < 1e-9);
        CHECK(std::abs((s.y_lower - p.h) * (s.y_lower - p.h) - p.A * (s.x - p.k)) < 1e-9);
    }
}
