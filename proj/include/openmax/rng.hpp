#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace openmax
{
    // Seeded generator with a fully specified output stream.
    //
    // The raw engine is std::mt19937_64, whose sequence is fixed by the C++
    // standard. The standard distributions are not portable across library
    // implementations, so bounded integers and unit reals are derived here:
    //  * below(n): rejection sampling on the low bits under the smallest covering
    //              mask (no modulo bias).
    //  * unit():   (next() >> 11) * 2^-53, a double in [0, 1).
    // Any change to these definitions must bump kName.
    class Rng
    {
    public:
        static constexpr std::string_view kName = "mt19937_64/rejection-v1";

        explicit Rng(std::uint64_t seed) : m_engine(seed) {}

        std::uint64_t next() { return m_engine(); }

        // Uniform integer in [0, n). Requires n > 0.
        std::uint64_t below(std::uint64_t n);

        // Uniform integer in [lo, hi] (inclusive).
        std::int64_t between(std::int64_t lo, std::int64_t hi);

        double unit();

    private:
        std::mt19937_64 m_engine;
    };
}
