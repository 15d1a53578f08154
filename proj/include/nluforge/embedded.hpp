#pragma once

#include <string_view>

// Built-in copies of the JSON documents under data/. Each can be replaced by a
// file through the pipeline config.
namespace nluforge::embedded {

std::string_view templates();
std::string_view rules();
std::string_view strategies();
std::string_view synonyms();

}  // namespace nluforge::embedded
