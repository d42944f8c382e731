// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "passevo/genome.hpp"

#include <atomic>
#include <cstdint>
#include <limits>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

namespace passevo {

enum class MeasureStatus : std::uint8_t { Ok, CompileFailed, RunFailed, TimedOut };

const char* to_string(MeasureStatus status);

// Raw result of one backend measurement: per-run wall-clock seconds.
struct Measurement {
    MeasureStatus status = MeasureStatus::Ok;
    std::vector<double> samples;
    std::string detail;
};

// Produces a Measurement for a pass sequence. Implementations must map every
// toolchain failure to a status instead of throwing.
class Backend {
public:
    virtual ~Backend() = default;
    virtual std::string name() const = 0;
    virtual bool parallel_safe() const = 0;
    virtual Measurement measure(const std::vector<std::string>& sequence,
                                std::size_t runs) = 0;
};

enum class FitnessMode : std::uint8_t { MeanRuntime, MeanPlusVariance };

// Aggregated measurement behind a cache entry. `samples` retains the raw
// per-run values while the record lives in memory; records loaded from disk
// carry moments only (samples empty, n > 0).
struct FitnessRecord {
    MeasureStatus status = MeasureStatus::Ok;
    double mean_runtime = 0.0;
    double variance = 0.0;
    std::uint64_t n = 0;
    std::uint32_t eval_count = 0;
    std::vector<double> samples;
    std::string detail;

    bool ok() const { return status == MeasureStatus::Ok && n > 0; }
};

// Builds a record from a single measurement. Non-Ok measurements yield a
// penalty record (n = 0) that keeps only status and detail.
FitnessRecord record_from_measurement(const Measurement& m);

// Combines two records over their underlying sample sets via moment sums.
// Either side may be a penalty record; Ok wins only if both are Ok.
FitnessRecord merge_records(const FitnessRecord& a, const FitnessRecord& b);

constexpr double penalty_fitness = std::numeric_limits<double>::infinity();

// Scalar used for selection. Non-Ok or empty records map to the +inf
// sentinel, so they order after every finite fitness.
double fitness_of(const FitnessRecord& record, FitnessMode mode);

// Hash table from canonical sequence key to record. Safe for concurrent
// lookup/insert; entries are immutable snapshots replaced on merge.
class FitnessCache {
public:
    std::shared_ptr<const FitnessRecord> find(const std::string& key) const;

    void store(const std::string& key, FitnessRecord record);

    // Merges `m` into the existing entry (or inserts a fresh record) under a
    // single lock and returns the resulting snapshot.
    std::shared_ptr<const FitnessRecord> merge(const std::string& key,
                                               const Measurement& m);

    std::size_t size() const;
    void clear();

    // Disk format: one `key<TAB>mean<TAB>variance<TAB>n` line per Ok entry,
    // keys sorted, floats round-trip exact. Failure records are not
    // persisted; a stale failure may not survive a toolchain change.
    void load_file(const std::string& path);
    void save_file(const std::string& path) const;

private:
    mutable std::mutex mu_;
    std::unordered_map<std::string, std::shared_ptr<const FitnessRecord>> map_;
};

struct EvaluatorOptions {
    FitnessMode mode = FitnessMode::MeanRuntime;
    bool memoize = true;
    std::size_t runs_per_eval = 40;
};

// Applies the cache policy around a backend and assigns fitness scalars.
// memoize=true: one measurement per distinct key, hits cost nothing.
// memoize=false: every call measures and merges into the running average.
class FitnessEvaluator {
public:
    FitnessEvaluator(Backend& backend, EvaluatorOptions options);

    // Sets ind.fitness and ind.record; returns the fitness scalar.
    double evaluate(Individual& ind);

    Backend& backend() { return backend_; }
    FitnessCache& cache() { return cache_; }
    const FitnessCache& cache() const { return cache_; }
    const EvaluatorOptions& options() const { return options_; }
    bool parallel_safe() const { return backend_.parallel_safe(); }

    std::uint64_t evaluations() const { return evaluations_.load(); }
    std::uint64_t measurements() const { return measurements_.load(); }
    std::uint64_t cache_hits() const { return cache_hits_.load(); }

private:
    Backend& backend_;
    EvaluatorOptions options_;
    FitnessCache cache_;
    std::atomic<std::uint64_t> evaluations_{0};
    std::atomic<std::uint64_t> measurements_{0};
    std::atomic<std::uint64_t> cache_hits_{0};
};

} // namespace passevo
