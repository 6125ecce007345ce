#include "radiomap/experiment.hpp"

#include <doctest.h>

#include <cmath>
#include <map>
#include <set>
#include <sstream>

using namespace radiomap;

namespace {

ExperimentConfig small_config() {
    ExperimentConfig c;
    c.field.n = 20;
    c.field.side = 400;
    c.field.shadowing.resolution = 10;
    c.sources.count = 2;
    c.values = {0.2, 0.3};
    c.trials = 3;
    c.svt.max_iters = 40;
    return c;
}

std::string report_bytes(const NmseReport &r) {
    std::ostringstream os;
    write_report_csv(os, r);
    return os.str();
}

} // namespace

TEST_CASE("minimal sweep yields one row") {
    ExperimentConfig c = small_config();
    c.strategies = {Method::uniform};
    c.values = {0.25};
    c.trials = 1;
    const NmseReport r = run_experiment(c);
    REQUIRE(r.rows.size() == 1);
    CHECK(r.rows[0].strategy == "uniform");
    CHECK(r.rows[0].sweep_value == 0.25);
    CHECK(r.rows[0].ok);
    CHECK(r.rows[0].nmse >= 0);
    CHECK(r.rows[0].iterations <= c.svt.max_iters);
}

TEST_CASE("rows are ordered by strategy, sweep value and trial") {
    const ExperimentConfig c = small_config();
    const NmseReport r = run_experiment(c);
    REQUIRE(r.rows.size() == 3 * 2 * 3);
    std::size_t q = 0;
    for (Method m : c.strategies)
        for (double v : c.values)
            for (int t = 0; t < c.trials; ++t, ++q) {
                CHECK(r.rows[q].strategy == to_string(m));
                CHECK(r.rows[q].sweep_value == v);
                CHECK(r.rows[q].trial == t);
                CHECK(r.rows[q].ok);
            }
}

TEST_CASE("every strategy sees the same ground truth per trial") {
    const NmseReport r = run_experiment(small_config());
    std::map<int, std::set<std::uint64_t>> hashes;
    std::map<std::pair<double, int>, std::set<std::uint64_t>> seeds;
    for (const auto &row : r.rows) {
        hashes[row.trial].insert(row.truth_hash);
        seeds[{row.sweep_value, row.trial}].insert(row.seed);
    }
    std::set<std::uint64_t> distinct;
    for (const auto &[trial, h] : hashes) {
        CHECK(h.size() == 1);
        distinct.insert(*h.begin());
    }
    CHECK(distinct.size() == 3);
    for (const auto &[key, s] : seeds)
        CHECK(s.size() == 1);
}

TEST_CASE("reports are byte-identical across reruns and worker counts") {
    ExperimentConfig c = small_config();
    const std::string first = report_bytes(run_experiment(c));
    CHECK(report_bytes(run_experiment(c)) == first);
    c.workers = 3;
    CHECK(report_bytes(run_experiment(c)) == first);
    c.seed = 2;
    CHECK(report_bytes(run_experiment(c)) != first);
}

TEST_CASE("summary matches a recomputation from raw rows") {
    const NmseReport r = run_experiment(small_config());
    const auto summary = r.summary();
    CHECK(summary.size() == 6);
    for (const auto &s : summary) {
        std::vector<double> v;
        for (const auto &row : r.rows)
            if (row.strategy == s.strategy && row.sweep_value == s.sweep_value)
                v.push_back(row.nmse);
        REQUIRE(v.size() == 3);
        const double mean = (v[0] + v[1] + v[2]) / 3;
        double ss = 0;
        for (double x : v)
            ss += (x - mean) * (x - mean);
        CHECK(s.count == 3);
        CHECK(s.mean == doctest::Approx(mean).epsilon(1e-14));
        CHECK(s.std_error == doctest::Approx(std::sqrt(ss / 2 / 3)).epsilon(1e-12));
        CHECK(r.find(s.strategy, s.sweep_value).mean == s.mean);
    }
    CHECK_THROWS_AS(r.find("uniform", 0.9), ConfigError);
}

TEST_CASE("k-NN curve is constant in the interpolation ratio") {
    ExperimentConfig c = small_config();
    c.scheme = Scheme::interpolation;
    c.axis = SweepAxis::interpolation_ratio;
    c.sampling_ratio = 0.15;
    c.values = {0.1, 0.3, 0.5};
    c.strategies = {Method::energy_modified, Method::uniform, Method::leverage, Method::knn};
    const NmseReport r = run_experiment(c);
    CHECK(r.rows.size() == 4 * 3 * 3);
    for (int t = 0; t < 3; ++t) {
        std::set<double> knn;
        for (const auto &row : r.rows)
            if (row.strategy == "knn" && row.trial == t)
                knn.insert(row.nmse);
        CHECK(knn.size() == 1);
    }
    for (const auto &row : r.rows)
        CHECK(row.ok);
}

TEST_CASE("sub-operation failures are recorded per row") {
    ExperimentConfig c = small_config();
    c.sources.count = 0;
    c.field.shadowing.enabled = false;
    c.strategies = {Method::uniform, Method::knn};
    c.values = {0.2};
    c.trials = 2;
    const NmseReport r = run_experiment(c);
    REQUIRE(r.rows.size() == 4);
    for (const auto &row : r.rows) {
        CHECK_FALSE(row.ok);
        CHECK(!row.error.empty());
        CHECK(std::isnan(row.nmse));
    }
    const auto s = r.summary();
    CHECK(s[0].count == 0);
    CHECK(report_bytes(r).find(",failed\n") != std::string::npos);
}

TEST_CASE("sweep counts") {
    ExperimentConfig c;
    CHECK(c.counts(0.1) == std::pair<int, int>{1000, 3000});
    c.axis = SweepAxis::interpolation_ratio;
    c.sampling_ratio = 0.1;
    CHECK(c.counts(0.5) == std::pair<int, int>{1000, 5000});
}

TEST_CASE("experiment validation") {
    ExperimentConfig c;
    CHECK_NOTHROW(c.validate());
    c.trials = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = ExperimentConfig{};
    c.values = {0.0};
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = ExperimentConfig{};
    c.values = {1.5};
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = ExperimentConfig{};
    c.scheme = Scheme::interpolation;
    c.values = {0.8};
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = ExperimentConfig{};
    c.strategies.clear();
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = ExperimentConfig{};
    c.workers = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = ExperimentConfig{};
    c.sources.margin = 0.5;
    CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("enum names round-trip") {
    for (Method m : {Method::uniform, Method::leverage, Method::energy_modified, Method::knn})
        CHECK(method_from_string(to_string(m)) == m);
    for (Scheme s : {Scheme::completion, Scheme::interpolation})
        CHECK(scheme_from_string(to_string(s)) == s);
    for (SweepAxis a : {SweepAxis::sampling_ratio, SweepAxis::interpolation_ratio})
        CHECK(sweep_axis_from_string(to_string(a)) == a);
    CHECK_THROWS_AS(method_from_string("kriging"), ConfigError);
}

TEST_CASE("double formatting round-trips") {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, 123456789.125, -2.5}) {
        const std::string s = format_double(v);
        CHECK(std::stod(s) == v);
    }
    CHECK(format_double(std::nan("")) == "nan");
    CHECK(format_double(0.25) == "0.25");
}

TEST_CASE("matrix hash separates different contents") {
    Matrix a = Matrix::Ones(3, 3);
    Matrix b = a;
    CHECK(hash_matrix(a) == hash_matrix(b));
    b(2, 1) = std::nextafter(1.0, 2.0);
    CHECK(hash_matrix(a) != hash_matrix(b));
}
