#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>

namespace tsroute {

/// Canonical float formatting: the shortest decimal form within 9 significant
/// digits that parses back to the exact value, else the plain 9-digit form.
/// Keeps CSV/JSON artifacts byte-stable across runs.
inline std::string format_num(double x) {
	if (std::isnan(x)) return "nan";
	if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
	char buf[64];
	for (int prec = 1; prec <= 9; ++prec) {
		std::snprintf(buf, sizeof(buf), "%.*g", prec, x);
		if (std::strtod(buf, nullptr) == x) return buf;
	}
	std::snprintf(buf, sizeof(buf), "%.9g", x);
	return buf;
}

/// Round to the canonical 9-significant-digit representation. Applied to
/// values before they land in JSON artifacts so serializers print the same
/// short form the CSVs carry.
inline double canon_num(double x) {
	if (!std::isfinite(x)) return x;
	char buf[64];
	std::snprintf(buf, sizeof(buf), "%.9g", x);
	return std::strtod(buf, nullptr);
}

} // namespace tsroute
