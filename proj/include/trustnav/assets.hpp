#pragma once

#include <string_view>

// Default data files compiled into the binary. The same files live under
// data/ and can be overridden at runtime through the config file.
namespace trustnav::assets {

std::string_view lexicon_json();
std::string_view attack_lexicon_json();
std::string_view mock_rules_json();
std::string_view cooccurrence_json();
std::string_view prompt_assets_json();

}  // namespace trustnav::assets
