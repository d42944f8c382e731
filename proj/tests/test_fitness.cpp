// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "passevo/errors.hpp"
#include "passevo/fitness.hpp"
#include "passevo/genome.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

using namespace passevo;
namespace fs = std::filesystem;

namespace {

// Deterministic backend: runtime = 1 + length/10, constant across runs.
// Counts measure() calls per key.
class CountingBackend final : public Backend {
public:
    std::string name() const override { return "counting"; }
    bool parallel_safe() const override { return true; }

    Measurement measure(const std::vector<std::string>& sequence,
                        std::size_t runs) override {
        std::string key;
        for (const auto& t : sequence)
            key += key.empty() ? t : " " + t;
        ++calls[key];
        ++total_calls;
        Measurement m;
        m.samples.assign(runs, 1.0 + static_cast<double>(sequence.size()) / 10.0);
        return m;
    }

    std::map<std::string, int> calls;
    int total_calls = 0;
};

// Every measurement fails to compile.
class FailingBackend final : public Backend {
public:
    std::string name() const override { return "failing"; }
    bool parallel_safe() const override { return true; }
    Measurement measure(const std::vector<std::string>&, std::size_t) override {
        Measurement m;
        m.status = MeasureStatus::CompileFailed;
        m.detail = "synthetic failure";
        return m;
    }
};

Individual individual_for(const std::vector<std::string>& tokens) {
    Individual ind;
    for (const auto& t : tokens)
        ind.genes.push_back({t, 0});
    return ind;
}

FitnessRecord record_of(std::vector<double> samples) {
    Measurement m;
    m.samples = std::move(samples);
    return record_from_measurement(m);
}

std::string temp_path(const char* stem) {
    return (fs::temp_directory_path() / (std::string("passevo_fit_") + stem)).string();
}

} // namespace

TEST_CASE("record_from_measurement computes mean and sample variance") {
    const FitnessRecord r = record_of({1.0, 2.0, 3.0});
    CHECK(r.status == MeasureStatus::Ok);
    CHECK(r.n == 3);
    CHECK(r.eval_count == 1);
    CHECK(r.mean_runtime == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(r.variance == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.samples == std::vector<double>{1.0, 2.0, 3.0});
    CHECK(r.ok());

    const FitnessRecord single = record_of({4.5});
    CHECK(single.n == 1);
    CHECK(single.mean_runtime == 4.5);
    CHECK(single.variance == 0.0);
}

TEST_CASE("record_from_measurement maps failures to penalty records") {
    Measurement m;
    m.status = MeasureStatus::TimedOut;
    m.detail = "watchdog";
    m.samples = {9.0}; // ignored on failure
    const FitnessRecord r = record_from_measurement(m);
    CHECK(r.status == MeasureStatus::TimedOut);
    CHECK(r.n == 0);
    CHECK_FALSE(r.ok());
    CHECK(r.detail == "watchdog");
    CHECK(fitness_of(r, FitnessMode::MeanRuntime) == penalty_fitness);
}

TEST_CASE("merge_records equals the record over concatenated samples") {
    const FitnessRecord a = record_of({1.0, 2.0, 3.0});
    const FitnessRecord b = record_of({5.0});
    const FitnessRecord m = merge_records(a, b);
    CHECK(m.n == 4);
    CHECK(m.eval_count == 2);
    CHECK(m.mean_runtime == doctest::Approx(2.75).epsilon(1e-12));
    CHECK(m.variance == doctest::Approx(8.75 / 3.0).epsilon(1e-12));
    CHECK(m.samples == std::vector<double>{1.0, 2.0, 3.0, 5.0});

    const FitnessRecord direct = record_of({1.0, 2.0, 3.0, 5.0});
    CHECK(m.mean_runtime == doctest::Approx(direct.mean_runtime).epsilon(1e-14));
    CHECK(m.variance == doctest::Approx(direct.variance).epsilon(1e-12));
}

TEST_CASE("merge_records drops raw samples when one side has none") {
    FitnessRecord disk; // as if loaded from a cache file
    disk.mean_runtime = 2.0;
    disk.variance = 0.5;
    disk.n = 10;
    disk.eval_count = 1;
    const FitnessRecord fresh = record_of({3.0, 3.0});
    const FitnessRecord m = merge_records(disk, fresh);
    CHECK(m.n == 12);
    CHECK(m.samples.empty());
    // Moments still follow the pooled formula.
    const double mean = (2.0 * 10 + 3.0 * 2) / 12.0;
    CHECK(m.mean_runtime == doctest::Approx(mean).epsilon(1e-12));
}

TEST_CASE("a failure poisons the merged record") {
    Measurement bad;
    bad.status = MeasureStatus::RunFailed;
    bad.detail = "first failure";
    const FitnessRecord fail = record_from_measurement(bad);
    const FitnessRecord good = record_of({1.0});

    const FitnessRecord m1 = merge_records(fail, good);
    CHECK(m1.status == MeasureStatus::RunFailed);
    CHECK(m1.detail == "first failure");
    CHECK(m1.eval_count == 2);
    CHECK_FALSE(m1.ok());

    const FitnessRecord m2 = merge_records(good, fail);
    CHECK(m2.status == MeasureStatus::RunFailed);
    CHECK(m2.eval_count == 2);
}

TEST_CASE("fitness_of maps modes and penalties") {
    const FitnessRecord r = record_of({1.0, 2.0, 3.0});
    CHECK(fitness_of(r, FitnessMode::MeanRuntime) == doctest::Approx(2.0));
    CHECK(fitness_of(r, FitnessMode::MeanPlusVariance) == doctest::Approx(3.0));

    FitnessRecord empty;
    CHECK(fitness_of(empty, FitnessMode::MeanRuntime) == penalty_fitness);
}

TEST_CASE("cache store, find and merge") {
    FitnessCache cache;
    CHECK(cache.find("a b") == nullptr);
    cache.store("a b", record_of({2.0}));
    const auto hit = cache.find("a b");
    REQUIRE(hit != nullptr);
    CHECK(hit->mean_runtime == 2.0);
    CHECK(cache.size() == 1);

    Measurement m;
    m.samples = {4.0};
    const auto merged = cache.merge("a b", m);
    REQUIRE(merged != nullptr);
    CHECK(merged->n == 2);
    CHECK(merged->mean_runtime == doctest::Approx(3.0));
    // The previously returned snapshot is untouched.
    CHECK(hit->n == 1);

    const auto fresh = cache.merge("new key", m);
    CHECK(fresh->n == 1);
    CHECK(cache.size() == 2);
    cache.clear();
    CHECK(cache.size() == 0);
}

TEST_CASE("cache file round-trip keeps moments exactly") {
    const std::string path = temp_path("roundtrip.tsv");
    FitnessCache cache;
    cache.store("a", record_of({0.1, 0.2, 0.30000000000000004}));
    cache.store("b b b", record_of({1.0 / 3.0}));
    Measurement bad;
    bad.status = MeasureStatus::CompileFailed;
    cache.store("broken", record_from_measurement(bad));
    cache.save_file(path);

    FitnessCache loaded;
    loaded.load_file(path);
    CHECK(loaded.size() == 2); // failures are not persisted
    CHECK(loaded.find("broken") == nullptr);
    const auto a = loaded.find("a");
    const auto orig = cache.find("a");
    REQUIRE(a != nullptr);
    CHECK(a->mean_runtime == orig->mean_runtime);
    CHECK(a->variance == orig->variance);
    CHECK(a->n == orig->n);
    CHECK(a->samples.empty());
    CHECK(a->status == MeasureStatus::Ok);
    fs::remove(path);
}

TEST_CASE("cache load rejects malformed files") {
    const std::string path = temp_path("malformed.tsv");
    auto write_and_try = [&](const std::string& text) {
        std::ofstream out(path);
        out << text;
        out.close();
        FitnessCache cache;
        CHECK_THROWS_AS(cache.load_file(path), ConfigError);
    };
    write_and_try("key\t1.0\t0.0\n");            // missing field
    write_and_try("key\t1.0\t0.0\t0\n");         // n = 0
    write_and_try("key\tnot_a_number\t0.0\t3\n"); // bad mean
    write_and_try("key\t1.0\t-0.5\t3\n");        // negative variance
    fs::remove(path);

    FitnessCache cache;
    CHECK_THROWS_AS(cache.load_file("/nonexistent/cache.tsv"), ConfigError);
}

TEST_CASE("memoizing evaluator measures each distinct key once") {
    CountingBackend backend;
    FitnessEvaluator eval(backend, {FitnessMode::MeanRuntime, true, 5});

    Individual a = individual_for({"x", "y"});
    Individual b = individual_for({"x", "y"});
    Individual c = individual_for({"y", "x"});

    const double fa = eval.evaluate(a);
    CHECK(fa == doctest::Approx(1.2));
    CHECK(a.evaluated());
    REQUIRE(a.record != nullptr);
    CHECK(a.record->n == 5);

    eval.evaluate(b); // same key: cache hit, no backend call
    eval.evaluate(c); // order matters: distinct key
    CHECK(backend.total_calls == 2);
    CHECK(backend.calls["x y"] == 1);
    CHECK(backend.calls["y x"] == 1);
    CHECK(eval.evaluations() == 3);
    CHECK(eval.measurements() == 2);
    CHECK(eval.cache_hits() == 1);
    CHECK(eval.cache().size() == 2);

    // Re-evaluating after clearing fitness is still a hit.
    a.clear_fitness();
    eval.evaluate(a);
    CHECK(backend.total_calls == 2);
    CHECK(eval.cache_hits() == 2);
}

TEST_CASE("non-memoizing evaluator re-measures and merges") {
    CountingBackend backend;
    FitnessEvaluator eval(backend, {FitnessMode::MeanRuntime, false, 4});

    Individual a = individual_for({"x"});
    eval.evaluate(a);
    Individual b = individual_for({"x"});
    eval.evaluate(b);

    CHECK(backend.total_calls == 2);
    CHECK(eval.measurements() == 2);
    CHECK(eval.cache_hits() == 0);
    REQUIRE(b.record != nullptr);
    CHECK(b.record->n == 8); // merged running average over both measurements
    CHECK(b.record->eval_count == 2);
}

TEST_CASE("failing backend yields penalty fitness, not a throw") {
    FailingBackend backend;
    FitnessEvaluator eval(backend, {FitnessMode::MeanRuntime, true, 3});
    Individual a = individual_for({"x"});
    const double f = eval.evaluate(a);
    CHECK(f == penalty_fitness);
    REQUIRE(a.record != nullptr);
    CHECK(a.record->status == MeasureStatus::CompileFailed);

    // The failure is cached like any other result.
    Individual b = individual_for({"x"});
    eval.evaluate(b);
    CHECK(eval.cache_hits() == 1);
}

TEST_CASE("MeanPlusVariance penalizes noisy sequences") {
    // Two fixed-sample backends via the cache: construct records directly.
    const FitnessRecord steady = record_of({2.0, 2.0, 2.0});
    const FitnessRecord noisy = record_of({1.0, 2.0, 3.0});
    CHECK(fitness_of(steady, FitnessMode::MeanRuntime) ==
          doctest::Approx(fitness_of(noisy, FitnessMode::MeanRuntime)));
    CHECK(fitness_of(steady, FitnessMode::MeanPlusVariance) <
          fitness_of(noisy, FitnessMode::MeanPlusVariance));
}

TEST_CASE("measure status names are stable") {
    CHECK(std::string(to_string(MeasureStatus::Ok)) == "Ok");
    CHECK(std::string(to_string(MeasureStatus::CompileFailed)) == "CompileFailed");
    CHECK(std::string(to_string(MeasureStatus::RunFailed)) == "RunFailed");
    CHECK(std::string(to_string(MeasureStatus::TimedOut)) == "TimedOut");
}
