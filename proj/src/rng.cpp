#include "caresim/rng.h"

namespace caresim {

namespace {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

} // namespace

Rng::Rng(std::uint64_t seed) : Rng(seed, 0) {}

Rng::Rng(std::uint64_t master_seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(master_seed & 0xffffffffu),
                      static_cast<std::uint32_t>(master_seed >> 32),
                      static_cast<std::uint32_t>(stream), 0x5ca1ab1eu};
    engine_.seed(seq);
    key_ = splitmix64(splitmix64(master_seed) ^ (stream + 0x51ed270b27u));
}

double Rng::uniform() noexcept {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

bool Rng::bernoulli(double p) noexcept {
    if (p <= 0.0) {
        return false;
    }
    if (p >= 1.0) {
        return true;
    }
    return uniform() < p;
}

double Rng::keyed_uniform(std::uint64_t a, std::uint64_t b, std::uint64_t c) const noexcept {
    std::uint64_t h = splitmix64(key_ ^ a);
    h = splitmix64(h ^ b);
    h = splitmix64(h ^ c);
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

bool Rng::keyed_bernoulli(double p, std::uint64_t a, std::uint64_t b, std::uint64_t c) const noexcept {
    if (p <= 0.0) {
        return false;
    }
    if (p >= 1.0) {
        return true;
    }
    return keyed_uniform(a, b, c) < p;
}

std::size_t Rng::index(std::size_t n) noexcept {
    if (n <= 1) {
        return 0;
    }
    auto i = static_cast<std::size_t>(uniform() * static_cast<double>(n));
    return i < n ? i : n - 1;
}

std::size_t Rng::weighted_index(std::span<const double> weights) noexcept {
    double total = 0.0;
    for (double w : weights) {
        if (w > 0.0) {
            total += w;
        }
    }
    if (total <= 0.0) {
        return weights.size();
    }
    const double target = uniform() * total;
    double acc = 0.0;
    std::size_t last_positive = weights.size();
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] <= 0.0) {
            continue;
        }
        acc += weights[i];
        last_positive = i;
        if (target < acc) {
            return i;
        }
    }
    return last_positive;
}

RngStreams::RngStreams(std::uint64_t master_seed) {
    for (std::size_t i = 0; i < streams_.size(); ++i) {
        streams_[i] = Rng(master_seed, i + 1);
    }
}

} // namespace caresim
