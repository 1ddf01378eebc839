#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <string_view>

namespace atlas::fixtures {

/// splitmix64 stream with hand-written distributions, so generated bytes do not
/// depend on the standard library's distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform in [0, n); n must be positive.
    std::size_t below(std::size_t n) { return static_cast<std::size_t>(next() % n); }

    /// Uniform integer in [lo, hi].
    std::int64_t between(std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(below(static_cast<std::size_t>(hi - lo + 1)));
    }

    bool chance(double p) { return uniform() < p; }

    /// Standard normal by Box-Muller.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u = uniform();
        while (u <= 0.0) u = uniform();
        const double v = uniform();
        const double r = std::sqrt(-2.0 * std::log(u));
        spare_ = r * std::sin(2.0 * std::numbers::pi * v);
        has_spare_ = true;
        return r * std::cos(2.0 * std::numbers::pi * v);
    }

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

struct FixtureParams {
    std::uint64_t seed = 1;
    std::size_t n_agents = 100;
    std::size_t n_statements = 400;
    std::size_t n_docs = 500;
    std::size_t embedding_dim = 32;
    std::size_t ontology_depth = 3;
    std::size_t ontology_branching = 4;
    /// Degree-proportional endpoint draws; false draws endpoints uniformly.
    bool preferential = true;
};

inline constexpr std::string_view kSyntheticGraphId = "synthetic";

/// Writes a seeded synthetic dataset directory. Throws PreconditionError for
/// non-positive sizes, fewer than 2 agents, or n_statements < n_agents - 1;
/// IoError when the directory cannot be written.
void gen_dataset(const FixtureParams& params, const std::filesystem::path& out);

inline constexpr std::string_view kScenarioGraphId = "covid19-fixture";
inline constexpr std::string_view kScenarioGraphName = "COVID-19";
/// Synthetic stand-ins for the cytokine-release and tocilizumab articles.
inline constexpr std::array<std::string_view, 2> kSeedDois = {"10.0000/seed.cytokine-release-syndrome",
                                                             "10.0000/seed.tocilizumab-treatment"};
inline constexpr std::size_t kTocilizumabIl6Evidence = 39;
inline constexpr std::size_t kTocilizumabTargets = 121;
inline constexpr std::size_t kIl6IncomingNeighbors = 1998;
inline constexpr std::size_t kIl6OutgoingNeighbors = 999;

/// Writes the fixed COVID-19 walkthrough dataset.
void scenario_fixture(const std::filesystem::path& out);

}  // namespace atlas::fixtures
