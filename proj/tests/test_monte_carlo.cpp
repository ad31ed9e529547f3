#include <cmath>
#include <sstream>

#include "doctest.h"
#include "varshift/errors.hpp"
#include "varshift/monte_carlo.hpp"

using namespace varshift;

namespace {

mc::ScenarioSpec basic_spec() {
    mc::ScenarioSpec spec;
    spec.name = "unit";
    spec.length = 100;
    spec.regime_variances = {1.0, 2.0};
    spec.change_points = {51};
    spec.replications = 400;
    spec.seed = 90210;
    spec.srsd = srsd::DetectorConfig{0.1, 30, 2.0};
    return spec;
}

}  // namespace

TEST_CASE("scenario validation") {
    auto spec = basic_spec();
    CHECK_NOTHROW(spec.validate());

    auto bad = spec;
    bad.regime_variances = {1.0};
    CHECK_THROWS_AS(bad.validate(), parameter_error);

    bad = spec;
    bad.change_points = {51, 51};
    bad.regime_variances = {1, 2, 3};
    CHECK_THROWS_AS(bad.validate(), parameter_error);

    bad = spec;
    bad.outlier_index = 200;
    CHECK_THROWS_AS(bad.validate(), parameter_error);

    bad = spec;
    bad.replications = 0;
    CHECK_THROWS_AS(bad.validate(), parameter_error);
}

TEST_CASE("replicate generation") {
    const auto spec = basic_spec();
    SUBCASE("same (seed, index) is identical") {
        const auto a = mc::generate_replicate(spec, 7);
        const auto b = mc::generate_replicate(spec, 7);
        CHECK(a == b);
        const auto c = mc::generate_replicate(spec, 8);
        CHECK(a != c);
    }
    SUBCASE("zero-variance regime gives zeros plus the outlier") {
        auto degenerate = spec;
        degenerate.regime_variances = {0.0};
        degenerate.change_points.clear();
        degenerate.outlier_index = 10;
        degenerate.outlier_value = 6.0;
        const auto series = mc::generate_replicate(degenerate, 0);
        for (int i = 0; i < degenerate.length; ++i) {
            CHECK(series[static_cast<std::size_t>(i)] == (i == 9 ? 6.0 : 0.0));
        }
    }
    SUBCASE("two-regime empirical variances approach the targets") {
        auto wide = spec;
        wide.regime_variances = {1.0, 9.0};
        double first = 0.0;
        double second = 0.0;
        const int reps = 2000;
        for (int rep = 0; rep < reps; ++rep) {
            const auto series = mc::generate_replicate(wide, rep);
            for (int i = 0; i < 50; ++i) first += series[static_cast<std::size_t>(i)] *
                                                   series[static_cast<std::size_t>(i)];
            for (int i = 50; i < 100; ++i) second += series[static_cast<std::size_t>(i)] *
                                                     series[static_cast<std::size_t>(i)];
        }
        first /= 50.0 * reps;
        second /= 50.0 * reps;
        CHECK(first == doctest::Approx(1.0).epsilon(0.02));
        CHECK(second == doctest::Approx(9.0).epsilon(0.02));
    }
}

TEST_CASE("single deterministic replicate") {
    auto spec = basic_spec();
    spec.replications = 1;
    spec.run_icss = false;
    const auto report = mc::run_experiment(spec);
    CHECK(report.srsd.replicates == 1);
    std::int64_t bins = 0;
    for (auto b : report.srsd.count_histogram) bins += b;
    CHECK(bins == 1);
}

TEST_CASE("experiment reports are worker-count independent") {
    auto spec = basic_spec();
    spec.replications = 600;
    const auto serial = mc::run_experiment(spec, 1);
    const auto parallel = mc::run_experiment(spec, 4);

    std::ostringstream a;
    std::ostringstream b;
    mc::write_report(a, serial);
    mc::write_report(b, parallel);
    CHECK(a.str() == b.str());

    std::ostringstream ha;
    std::ostringstream hb;
    mc::write_histogram(ha, serial);
    mc::write_histogram(hb, parallel);
    CHECK(ha.str() == hb.str());
}

TEST_CASE("tally internal consistency") {
    auto spec = basic_spec();
    spec.replications = 500;
    const auto report = mc::run_experiment(spec, 4);
    for (const auto* tally : {&report.srsd, &report.icss}) {
        std::int64_t replicates = 0;
        for (auto b : tally->count_histogram) replicates += b;
        CHECK(replicates == tally->replicates);
        CHECK(tally->failures == 0);
        double percent_total = 0.0;
        for (int bin = 0; bin < 4; ++bin) percent_total += tally->count_percent(bin);
        CHECK(percent_total == doctest::Approx(100.0).epsilon(1e-9));
        // Hits at the true point cannot exceed the histogram mass there.
        CHECK(tally->hits[0] <= tally->position_histogram[50]);
    }
    CHECK(report.resolvable_horizon == 71);
}

TEST_CASE("two seeds agree within Monte Carlo noise") {
    auto spec = basic_spec();
    spec.replications = 2000;
    const auto first = mc::run_experiment(spec, 4);
    spec.seed = 31415;
    const auto second = mc::run_experiment(spec, 4);
    for (int bin = 0; bin < 3; ++bin) {
        const double p = first.srsd.count_percent(bin) / 100.0;
        const double q = second.srsd.count_percent(bin) / 100.0;
        const double tolerance = 4.0 * std::sqrt(std::max(p, 0.01) * (1.0 - std::min(p, 0.99)) /
                                                 spec.replications);
        CHECK(std::fabs(p - q) < tolerance);
    }
}

TEST_CASE("scenario config parsing") {
    const std::string text = R"cfg(
# comparison scenarios
[doubling]
length = 100
variances = 1, 2
change_points = 51
replications = 50
seed = 11
srsd_p = 0.05
srsd_cutoff = 30
srsd_huber = 2
icss_alpha = 0.05

[with_outlier]
length = 100
variances = 6 1
change_points = 34
outlier_index = 65
outlier_value = 6
replications = 25
seed = 12
srsd_p = 0.05
srsd_cutoff = 25
srsd_huber = 2
detectors = srsd
)cfg";
    std::istringstream in(text);
    const auto specs = mc::parse_scenarios(in, "test.cfg");
    REQUIRE(specs.size() == 2);
    CHECK(specs[0].name == "doubling");
    CHECK(specs[0].regime_variances == std::vector<double>{1, 2});
    CHECK(specs[0].change_points == std::vector<int>{51});
    CHECK(specs[0].replications == 50);
    CHECK(specs[1].outlier_index == 65);
    CHECK(specs[1].run_icss == false);
    CHECK(specs[1].srsd.cutoff_length == 25);

    SUBCASE("unknown keys are field-level errors") {
        std::istringstream bad("[x]\nlength = 100\nvariances = 1\nwat = 2\n");
        try {
            mc::parse_scenarios(bad, "bad.cfg");
            FAIL("expected parameter_error");
        } catch (const parameter_error& err) {
            const std::string what = err.what();
            CHECK(what.find("bad.cfg:4") != std::string::npos);
            CHECK(what.find("wat") != std::string::npos);
        }
    }
    SUBCASE("validation failures name the section") {
        std::istringstream bad("[y]\nlength = 100\nvariances = 1,2\nreplications = 0\n");
        try {
            mc::parse_scenarios(bad, "bad.cfg");
            FAIL("expected parameter_error");
        } catch (const parameter_error& err) {
            CHECK(std::string(err.what()).find("[y]") != std::string::npos);
        }
    }
}

TEST_CASE("reference scenario list covers the study grid") {
    mc::SuiteOptions options;
    options.replications = 10;
    const auto specs = mc::reference_scenarios(options);
    int tuning = 0;
    int one_cp = 0;
    int two_cp = 0;
    int outlier = 0;
    int sweep = 0;
    for (const auto& spec : specs) {
        CHECK_NOTHROW(spec.validate());
        if (spec.name.starts_with("tuning_")) ++tuning;
        if (spec.name.starts_with("one_cp_")) ++one_cp;
        if (spec.name.starts_with("two_cp_")) ++two_cp;
        if (spec.name.starts_with("outlier_")) ++outlier;
        if (spec.name.starts_with("sweep_")) ++sweep;
    }
    CHECK(tuning == 9);
    CHECK(one_cp == 6);
    CHECK(two_cp == 4);
    CHECK(outlier == 4);
    CHECK(sweep == 18);
}
