#include "openmax/rng.hpp"

#include <bit>
#include <stdexcept>

namespace openmax
{
    std::uint64_t Rng::below(std::uint64_t n)
    {
        if (n == 0)
        {
            throw std::invalid_argument("Rng::below requires n > 0");
        }
        if (n == 1)
        {
            return 0;
        }
        // Smallest all-ones mask covering n - 1; expected draws < 2.
        const unsigned shift = static_cast<unsigned>(std::countl_zero(n - 1));
        const std::uint64_t mask = ~std::uint64_t{0} >> shift;
        for (;;)
        {
            const std::uint64_t candidate = next() & mask;
            if (candidate < n)
            {
                return candidate;
            }
        }
    }

    std::int64_t Rng::between(std::int64_t lo, std::int64_t hi)
    {
        if (hi < lo)
        {
            throw std::invalid_argument("Rng::between requires lo <= hi");
        }
        const std::uint64_t span = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo);
        if (span == ~std::uint64_t{0})
        {
            return static_cast<std::int64_t>(next());
        }
        return static_cast<std::int64_t>(static_cast<std::uint64_t>(lo) + below(span + 1));
    }

    double Rng::unit()
    {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }
}
