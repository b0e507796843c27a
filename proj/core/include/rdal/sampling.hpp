#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "rdal/hypothesis.hpp"

namespace rdal {

// Per-run source of data randomness (sample draws and label noise).
// Never derived from the shared random string.
class DataStream {
public:
    explicit DataStream(std::uint64_t seed) : engine_(seed) {}

    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    std::uint64_t binomial(std::uint64_t trials, double p);
    // Failures before the first success of a Bernoulli(p) sequence.
    std::uint64_t geometric(double p);
    // Failures before `successes` successes.
    std::uint64_t negative_binomial(std::uint64_t successes, double p);

    std::mt19937_64& engine() noexcept { return engine_; }

private:
    std::mt19937_64 engine_;
};

struct Counters {
    std::uint64_t labels = 0;
    std::uint64_t unlabeled = 0;
    // Also charge the unlabeled draws a rejection sampler from D would discard.
    bool stream_accounting = false;
};

// k draws from D conditioned on DIS(v), labeled by the model's mechanism.
LabeledSample sample_labeled(const HypothesisClass& cls, const DataModel& model,
                             const VersionSpace& v, std::size_t k, DataStream& stream,
                             Counters& counters, std::size_t round = 0);

// Same distribution as sample_labeled, returned as per-point tallies.
// Draws the multinomial point counts and binomial label splits directly.
LabelCounts sample_label_counts(const HypothesisClass& cls, const DataModel& model,
                                const VersionSpace& v, std::uint64_t k, DataStream& stream,
                                Counters& counters, std::size_t round = 0);

// k draws from D restricted to `region` (renormalized), as tallies.
LabelCounts sample_label_counts_in(const DataModel& model, std::span<const DomainIndex> region,
                                   std::uint64_t k, DataStream& stream, Counters& counters,
                                   std::size_t round = 0);

std::vector<DomainIndex> sample_unlabeled(const DataModel& model, std::size_t m,
                                          DataStream& stream, Counters& counters);

// Number of m unlabeled draws from D that land in `region` (sorted ascending).
std::uint64_t count_unlabeled_in_region(const DataModel& model, std::span<const DomainIndex> region,
                                        std::uint64_t m, DataStream& stream, Counters& counters);

} // namespace rdal
