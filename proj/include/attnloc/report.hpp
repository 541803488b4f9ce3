#pragma once

#include <string>
#include <string_view>

#include "attnloc/explainer.hpp"

namespace attnloc {

inline constexpr int kColorBins = 5;

// Equal-width bins over [0, 1]; 0 is the lightest, 4 the deepest.
int color_bin(double weight);

// "fnv1a:<16 hex digits>" of the localization JSON the report was built from.
std::string generated_from(std::string_view json_text);

// Source listing with heatmap statements' operands in reds (F_t weights) and
// their suspiciousness score, and passing-only statements in blues (C_t
// weights). Throws Error if the localization names a statement the source
// does not contain.
std::string render_html(const Localization& loc, std::string_view source, std::string_view json_text);
std::string render_ansi(const Localization& loc, std::string_view source, std::string_view json_text);

}  // namespace attnloc
