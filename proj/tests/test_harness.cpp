#include <doctest.h>

#include <cmath>
#include <map>
#include <sstream>
#include <vector>

#include "ppics/data_io.hpp"
#include "ppics/errors.hpp"
#include "ppics/harness.hpp"
#include "ppics/rng.hpp"

using namespace ppics;

namespace {

CsConfig harness_cfg(std::int64_t start_n = 40) {
    CsConfig cfg;
    cfg.alpha = 0.1;
    cfg.t_star = 500;
    cfg.start_n = start_n;
    return cfg;
}

bool rows_equal(const std::vector<MetricRow>& a, const std::vector<MetricRow>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].scenario != b[i].scenario || a[i].method != b[i].method ||
            a[i].n != b[i].n)
            return false;
        const bool vol_same = (std::isnan(a[i].avg_volume) && std::isnan(b[i].avg_volume)) ||
                              a[i].avg_volume == b[i].avg_volume;
        if (!vol_same || a[i].cum_miscoverage != b[i].cum_miscoverage) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("noisy generator: sigma 0 gives perfect predictions") {
    Scenario sc;
    sc.kind = Scenario::Kind::noisy;
    sc.sigma_y = 0.0;
    CounterRng rng(1, 0);
    for (int k = 0; k < 100; ++k) {
        const auto [y, f] = sc.draw(rng);
        CHECK(y == f);
    }
    CHECK(sc.lambda_star() == 1.0);
}

TEST_CASE("noisy generator: empirical correlation tracks the model") {
    for (double sigma : {0.8, 3.0}) {
        Scenario sc;
        sc.kind = Scenario::Kind::noisy;
        sc.sigma_y = sigma;
        CounterRng rng(77, 0);
        double sy = 0, sf = 0, syy = 0, sff = 0, syf = 0;
        const int n = 100000;
        for (int k = 0; k < n; ++k) {
            const auto [y, f] = sc.draw(rng);
            sy += y;
            sf += f;
            syy += y * y;
            sff += f * f;
            syf += y * f;
        }
        const double cov = syf / n - (sy / n) * (sf / n);
        const double vy = syy / n - (sy / n) * (sy / n);
        const double vf = sff / n - (sf / n) * (sf / n);
        const double corr = cov / std::sqrt(vy * vf);
        CHECK(corr == doctest::Approx(1.0 / std::sqrt(1.0 + sigma * sigma)).epsilon(0.01));
        CHECK(sc.lambda_star() ==
              doctest::Approx(1.0 / (1.0 + sigma * sigma)).epsilon(1e-15));
    }
}

TEST_CASE("biased generator: mean rectifier approaches upsilon") {
    Scenario sc;
    sc.kind = Scenario::Kind::biased;
    sc.upsilon = 2.5;
    sc.dof = 5.0;
    CounterRng rng(12, 0);
    double sum = 0.0, sumsq = 0.0;
    const int n = 100000;
    for (int k = 0; k < n; ++k) {
        const auto [y, f] = sc.draw(rng);
        const double d = f - y;
        sum += d;
        sumsq += d * d;
    }
    const double mean = sum / n;
    const double sd = std::sqrt(sumsq / n - mean * mean);
    CHECK(std::abs(mean - sc.upsilon) <= 3.0 * sd / std::sqrt(static_cast<double>(n)));
    CHECK(sc.population_mean_f() == 2.5);
}

TEST_CASE("biased generator dof boundary") {
    Scenario ok;
    ok.kind = Scenario::Kind::biased;
    ok.dof = 5.0;
    CHECK_NOTHROW(ok.validate());
    Scenario bad = ok;
    bad.dof = 2.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);

    // dof = inf dispatches to the gaussian sampler: finite draws.
    Scenario inf_sc;
    inf_sc.kind = Scenario::Kind::biased;
    CounterRng rng(3, 0);
    for (int k = 0; k < 10; ++k) CHECK(std::isfinite(inf_sc.draw(rng).first));
}

TEST_CASE("run_replications: reps=1 average equals that replication's width") {
    Scenario sc;
    sc.kind = Scenario::Kind::noisy;
    sc.sigma_y = 0.8;
    sc.n_max = 60;
    sc.reps = 1;
    sc.base_seed = 5;
    const auto rows =
        run_replications(sc, {{Flavor::classical, std::nullopt}}, harness_cfg());
    CHECK(rows.size() == 21);  // n = 40..60
    for (const auto& row : rows) {
        CHECK(row.n >= 40);
        CHECK((row.cum_miscoverage == 0.0 || row.cum_miscoverage == 1.0));
        CHECK(row.avg_volume > 0.0);
    }
}

TEST_CASE("run_replications is deterministic and jobs-independent") {
    Scenario sc;
    sc.kind = Scenario::Kind::noisy;
    sc.sigma_y = 3.0;
    sc.n_max = 80;
    sc.reps = 25;
    sc.base_seed = 99;
    const std::vector<MethodSpec> methods = {{Flavor::classical, std::nullopt},
                                             {Flavor::ppi, std::nullopt},
                                             {Flavor::ppi_plus, std::nullopt}};
    const auto rows1 = run_replications(sc, methods, harness_cfg(), 1);
    const auto rows2 = run_replications(sc, methods, harness_cfg(), 1);
    const auto rows4 = run_replications(sc, methods, harness_cfg(), 4);
    CHECK(rows_equal(rows1, rows2));
    CHECK(rows_equal(rows1, rows4));
}

TEST_CASE("cum_miscoverage is monotone and avg_volume halves from n=100 to n=1000") {
    Scenario sc;
    sc.kind = Scenario::Kind::noisy;
    sc.sigma_y = 0.8;
    sc.n_max = 1000;
    sc.reps = 30;
    sc.base_seed = 31;
    const std::vector<MethodSpec> methods = {{Flavor::classical, std::nullopt},
                                             {Flavor::ppi_plus, std::nullopt}};
    const auto rows = run_replications(sc, methods, harness_cfg(), 2);
    std::map<std::string, std::map<std::int64_t, const MetricRow*>> by_method;
    for (const auto& row : rows) {
        by_method[row.method][row.n] = &row;
        CHECK(row.cum_miscoverage >= 0.0);
        CHECK(row.cum_miscoverage <= 1.0);
    }
    for (const auto& [method, table] : by_method) {
        double prev = 0.0;
        for (const auto& [n, row] : table) {
            CHECK(row->cum_miscoverage >= prev);
            prev = row->cum_miscoverage;
        }
        CHECK(table.at(100)->avg_volume >= 2.0 * table.at(1000)->avg_volume);
    }
}

TEST_CASE("exact scenario checks coverage from the first observation") {
    Scenario sc;
    sc.kind = Scenario::Kind::exact_gaussian;
    sc.n_max = 200;
    sc.reps = 50;
    sc.base_seed = 404;
    const std::vector<MethodSpec> methods = {
        {Flavor::classical, Prior::gaussian(0.0, 0.1)}};
    const auto rows = run_replications(sc, methods, harness_cfg(1), 2);
    CHECK(rows.front().n == 1);
    CHECK(rows.back().n == 200);
    CHECK(rows.back().cum_miscoverage <= 0.2);
}

TEST_CASE("replay: determinism, split accounting, and degenerate files") {
    ReplayData data;
    CounterRng rng(2024, 0);
    for (int k = 0; k < 300; ++k) {
        const double y = rng.next_normal();
        data.labelled.emplace_back(y, y + 0.3 * rng.next_normal());
    }

    const std::vector<MethodSpec> methods = {{Flavor::classical, std::nullopt},
                                             {Flavor::ppi_plus, std::nullopt}};
    CsConfig cfg = harness_cfg();
    const auto rows1 = run_replay(data, 120, 10, 7, methods, cfg, 1);
    const auto rows2 = run_replay(data, 120, 10, 7, methods, cfg, 3);
    CHECK(rows_equal(rows1, rows2));
    CHECK(rows1.size() == 2 * (120 - 40 + 1));

    // theta* is the mean label over the whole table.
    double mean = 0.0;
    for (std::size_t i = 0; i < data.labelled.size(); ++i)
        mean += (data.labelled[i].first - mean) / static_cast<double>(i + 1);
    CHECK(data.theta_star() == doctest::Approx(mean).epsilon(1e-14));

    // Degenerate file: identical rows give zero-width classical intervals
    // that trivially cover.
    ReplayData flat;
    for (int k = 0; k < 80; ++k) flat.labelled.emplace_back(1.25, 1.25);
    const auto frows =
        run_replay(flat, 60, 3, 1, {{Flavor::classical, std::nullopt}}, cfg, 1);
    for (const auto& row : frows) {
        CHECK(row.avg_volume == 0.0);
        CHECK(row.cum_miscoverage == 0.0);
    }

    CHECK_THROWS_AS(run_replay(data, 500, 2, 1, methods, cfg, 1), ConfigError);
}

TEST_CASE("replay assisted on a finite pool needs a positive delta") {
    ReplayData data;
    CounterRng rng(11, 0);
    for (int k = 0; k < 200; ++k) {
        const double y = rng.next_normal();
        data.labelled.emplace_back(y, y);
    }
    CsConfig cfg = harness_cfg();
    cfg.delta = 0.0;
    const std::vector<MethodSpec> assisted = {{Flavor::ppi, Prior::gaussian(0.0, 0.1)}};
    CHECK_THROWS_AS(run_replay(data, 100, 2, 1, assisted, cfg, 1), ConfigError);
    cfg.delta = 0.01;
    CHECK_NOTHROW(run_replay(data, 100, 2, 1, assisted, cfg, 1));
}

TEST_CASE("csv round trip: metric tables re-parse under the documented schema") {
    Scenario sc;
    sc.kind = Scenario::Kind::noisy;
    sc.sigma_y = 0.1;
    sc.n_max = 45;
    sc.reps = 2;
    sc.base_seed = 3;
    const auto rows = run_replications(sc, {{Flavor::ppi, std::nullopt}}, harness_cfg(), 1);
    std::ostringstream os;
    write_metric_csv(os, rows);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "scenario,method,n,avg_volume,cum_miscoverage");
    std::size_t count = 0;
    while (std::getline(is, line)) {
        std::stringstream ss(line);
        std::string scenario, method, n, vol, cov;
        std::getline(ss, scenario, ',');
        std::getline(ss, method, ',');
        std::getline(ss, n, ',');
        std::getline(ss, vol, ',');
        std::getline(ss, cov, ',');
        CHECK(std::stoll(n) == rows[count].n);
        CHECK(std::stod(vol) == rows[count].avg_volume);  // 17 digits round-trip
        CHECK(std::stod(cov) == rows[count].cum_miscoverage);
        ++count;
    }
    CHECK(count == rows.size());
}

TEST_CASE("csv reader: schema, blank lines, CRLF, and line-numbered errors") {
    {
        std::istringstream in("label,prediction\r\n1.5,2.5\r\n,3.25\n\n2,4\n");
        CsvReader reader(in, "data.csv");
        auto r1 = reader.next();
        REQUIRE(r1.has_value());
        CHECK(*r1->label == 1.5);
        CHECK(r1->prediction == 2.5);
        auto r2 = reader.next();
        REQUIRE(r2.has_value());
        CHECK(!r2->label.has_value());
        auto r3 = reader.next();
        REQUIRE(r3.has_value());
        CHECK(r3->line == 5);
        CHECK(!reader.next().has_value());
    }
    {
        std::istringstream in("label,prediction\n1.0,oops\n");
        CsvReader reader(in, "data.csv");
        try {
            reader.next();
            FAIL("expected DataError");
        } catch (const DataError& e) {
            CHECK(e.position == 2);
            CHECK(std::string(e.what()).find("data.csv:2") != std::string::npos);
        }
    }
    {
        std::istringstream in("foo,bar\n1,2\n");
        CsvReader reader(in, "data.csv");
        CHECK_THROWS_AS(reader.next(), DataError);
    }
    {
        std::istringstream in("label,prediction\n1.0,\n");
        CsvReader reader(in, "x");
        CHECK_THROWS_AS(reader.next(), DataError);
    }
}
