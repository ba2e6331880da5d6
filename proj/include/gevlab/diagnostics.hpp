#pragma once

#include <functional>
#include <string_view>

namespace gevlab {

using WarningHandler = std::function<void(std::string_view)>;

/// Report a non-fatal numerical diagnostic. Defaults to stderr.
void warn(std::string_view message);

/// Install a handler for diagnostics; returns the previous one.
WarningHandler set_warning_handler(WarningHandler handler);

}  // namespace gevlab
