#include <doctest.h>

#include <Eigen/Core>

#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "oracles.hpp"
#include "parity/error.hpp"
#include "parity/price_csv.hpp"
#include "parity/riskstats.hpp"

using namespace parity;

namespace {

Eigen::VectorXd to_eigen(const std::vector<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::Io;
}

}  // namespace

TEST_CASE("log_return") {
    CHECK(log_return(100.0, 100.0) == 0.0);
    CHECK(log_return(100.0, 110.0) == doctest::Approx(0.0953101798).epsilon(1e-9));
    CHECK(log_return(100.0, 50.0) == doctest::Approx(-0.6931471806).epsilon(1e-9));
    CHECK(code_of([] { log_return(0.0, 1.0); }) == ErrorCode::Domain);
    CHECK(code_of([] { log_return(1.0, -1.0); }) == ErrorCode::Domain);
}

TEST_CASE("log returns are invariant to price scaling") {
    std::mt19937_64 rng(7);
    std::lognormal_distribution<double> px(4.0, 0.3);
    std::vector<double> p(50), q(50);
    for (std::size_t i = 0; i < p.size(); ++i) {
        p[i] = px(rng);
        q[i] = p[i] * 10.0;
    }
    const auto a = log_returns<double>(p);
    const auto b = log_returns<double>(q);
    REQUIRE(a.size() == 49);
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("rolling mean and vol") {
    const Eigen::VectorXd r = to_eigen({0.01, -0.01, 0.01, -0.01});
    CHECK(rolling_mean(r, 4) == doctest::Approx(0.0));
    CHECK(rolling_vol(r, 4) == doctest::Approx(std::sqrt(0.0004 / 3.0)).epsilon(1e-12));
    CHECK(rolling_vol(to_eigen(std::vector<double>(5, 0.02)), 5) == 0.0);
    CHECK(code_of([&] { rolling_vol(r, 90); }) == ErrorCode::InsufficientData);
    CHECK(code_of([&] { rolling_vol(r, 1); }) == ErrorCode::InvalidArgument);
    CHECK(rolling_mean(r, 2) == doctest::Approx(0.0));
}

TEST_CASE("rolling vol matches the two-pass oracle") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> n(0.0005, 0.02);
    for (int rep = 0; rep < 200; ++rep) {
        std::vector<double> xs(120);
        for (double& x : xs) x = n(rng);
        CHECK(std::abs(rolling_vol(to_eigen(xs), 90) - oracle::sample_vol(xs, 90)) < 1e-12);
        CHECK(std::abs(rolling_mean(to_eigen(xs), 90) - oracle::mean(xs, 90)) < 1e-15);
    }
}

TEST_CASE("correlation") {
    const Eigen::VectorXd a = to_eigen({1, 2, 3, 4, 5});
    const Eigen::VectorXd b = to_eigen({2, 4, 6, 8, 10});
    CHECK(correlation(a, b, 5) == doctest::Approx(1.0));
    CHECK(correlation(a, Eigen::VectorXd(-b), 5) == doctest::Approx(-1.0));
    CHECK(code_of([&] { correlation(a, to_eigen({1, 1, 1, 1, 1}), 5); }) == ErrorCode::UndefinedStatistic);
    const double r = correlation(a, to_eigen({1, 3, 2, 5, 4}), 5);
    CHECK(r >= -1.0);
    CHECK(r <= 1.0);
    CHECK(r == doctest::Approx(0.8));
}

TEST_CASE("sharpe and trailing estimate") {
    CHECK(sharpe(0.10, 0.02, 0.16) == doctest::Approx(0.5));
    CHECK(code_of([] { sharpe(0.1, 0.0, 0.0); }) == ErrorCode::UndefinedStatistic);
    const Eigen::VectorXd r = to_eigen({0.01, 0.03, 0.02});
    const auto [m, s] = trailing_estimate(r, 90);
    CHECK(m == doctest::Approx(0.02));
    CHECK(s == doctest::Approx(0.01));
    CHECK(code_of([] { trailing_estimate(to_eigen({0.01}), 90); }) == ErrorCode::InsufficientData);
}

TEST_CASE("price csv") {
    std::istringstream empty("date,asset_id,price\n");
    CHECK(read_price_csv(empty).empty());

    std::istringstream ok("date,asset_id,price\n2024-01-01,alpha,10\n2024-01-02,alpha,11\n2024-01-01,beta,5.5\n");
    const auto rows = read_price_csv(ok);
    REQUIRE(rows.size() == 3);
    PriceStore store;
    CHECK(store.ingest(rows) == 3);
    CHECK(store.prices("alpha") == std::vector<double>{10.0, 11.0});
    CHECK(store.returns("alpha")(0) == doctest::Approx(std::log(1.1)));
    CHECK(store.latest("alpha", Date::parse("2024-01-05"))->price == Decimal(11));
    CHECK(!store.latest("alpha", Date::parse("2023-12-31")).has_value());

    // duplicates are rejected atomically
    std::istringstream dup("date,asset_id,price\n2024-01-03,alpha,12\n2024-01-01,beta,6\n");
    CHECK(code_of([&] { store.ingest(read_price_csv(dup)); }) == ErrorCode::Conflict);
    CHECK(store.size() == 3);

    std::istringstream bad("date,asset_id,price\n2024-01-01,alpha,10\n2024-01-02,alpha,-1\n");
    try {
        read_price_csv(bad);
        FAIL("expected parse error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Parse);
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
    std::istringstream header("when,asset,price\n");
    CHECK(code_of([&] { read_price_csv(header); }) == ErrorCode::Parse);

    std::ostringstream out;
    write_price_csv(out, rows);
    std::istringstream back(out.str());
    const auto again = read_price_csv(back);
    REQUIRE(again.size() == rows.size());
    CHECK(again[2].price == rows[2].price);
}
