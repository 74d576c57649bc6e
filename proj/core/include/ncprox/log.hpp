#pragma once

#include <functional>
#include <string_view>

namespace ncprox {

using WarningSink = std::function<void(std::string_view)>;

/// Emits a warning through the installed sink (stderr by default).
void warn(std::string_view message);

/// Replaces the warning sink and returns the previous one. Not thread-safe;
/// install sinks before starting concurrent work.
WarningSink set_warning_sink(WarningSink sink);

}  // namespace ncprox
