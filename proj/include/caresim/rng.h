#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace caresim {

/// Seeded random source. Only the engine (mt19937_64) and the bit-to-double
/// conversion are used, both fully specified by the standard, so draws are
/// identical across standard library implementations.
class Rng {
public:
    Rng() = default;
    explicit Rng(std::uint64_t seed);
    Rng(std::uint64_t master_seed, std::uint64_t stream);

    double uniform() noexcept;  // [0, 1)
    bool bernoulli(double p) noexcept;

    /// Counter-based draw in [0, 1) determined by the stream seed and the key
    /// alone. Per-agent decisions use it so that an agent's draw does not
    /// depend on how many draws were taken before it, which keeps branched
    /// scenario runs aligned agent by agent.
    double keyed_uniform(std::uint64_t a, std::uint64_t b, std::uint64_t c = 0) const noexcept;
    bool keyed_bernoulli(double p, std::uint64_t a, std::uint64_t b, std::uint64_t c = 0) const noexcept;
    std::size_t index(std::size_t n) noexcept;  // uniform in [0, n)

    /// Draws an index with probability proportional to weights. Returns
    /// weights.size() when every weight is zero.
    std::size_t weighted_index(std::span<const double> weights) noexcept;

    template <class T> void shuffle(std::vector<T> &items) noexcept {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::swap(items[i - 1], items[index(i)]);
        }
    }

    bool operator==(const Rng &other) const noexcept {
        return engine_ == other.engine_ && key_ == other.key_;
    }

private:
    std::mt19937_64 engine_{};
    std::uint64_t key_ = 0;
};

/// Tags separating the keyed draws an agent takes in the same year.
enum class DrawTag : std::uint64_t {
    Death = 1, Birth, BirthSex, Divorce, CareTransition, Hire, LocalOffer, HireAccept, Fire, JobChange,
    ChangeAccept
};

// Care draws the allocation sequence; Health draws the yearly need-level
// transitions, so a policy that changes allocation leaves them aligned.
enum class Stream : std::size_t { Init, Demography, Economy, Care, Migration, Policy, Health, Count };

/// Independent per-module streams derived from one master seed, so extra
/// draws in one module never shift another module's sequence.
class RngStreams {
public:
    RngStreams() = default;
    explicit RngStreams(std::uint64_t master_seed);

    Rng &operator[](Stream s) noexcept { return streams_[static_cast<std::size_t>(s)]; }
    const Rng &operator[](Stream s) const noexcept {
        return streams_[static_cast<std::size_t>(s)];
    }

    bool operator==(const RngStreams &other) const noexcept { return streams_ == other.streams_; }

private:
    std::array<Rng, static_cast<std::size_t>(Stream::Count)> streams_{};
};

} // namespace caresim
