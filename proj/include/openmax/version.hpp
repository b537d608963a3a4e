#pragma once

namespace openmax
{
    inline constexpr const char *kToolName = "openmax";
    inline constexpr const char *kToolVersion = "0.1.0";
}
