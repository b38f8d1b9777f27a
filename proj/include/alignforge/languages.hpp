#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace alignforge::languages {

/// English name for an ISO 639-1 code ("gl" -> "Galician"). Throws
/// UsageError listing the known codes when the code is not in the table.
const std::string& name(std::string_view code);

bool is_known(std::string_view code);

std::vector<std::string> known_codes();

}  // namespace alignforge::languages
