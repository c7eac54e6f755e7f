#pragma once

#include <cstdint>
#include <cstdio>
#include <string>

#include "tsroute/error.hpp"

namespace tsroute {

/// Civil-date <-> day-count conversions (proleptic Gregorian, days since
/// 1970-01-01). Standard Hinnant-style algorithms.
inline int64_t days_from_civil(int y, unsigned m, unsigned d) {
	y -= m <= 2;
	const int64_t era = (y >= 0 ? y : y - 399) / 400;
	const unsigned yoe = static_cast<unsigned>(y - era * 400);
	const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
	const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
	return era * 146097 + static_cast<int64_t>(doe) - 719468;
}

struct CivilDate {
	int year;
	unsigned month;
	unsigned day;
};

inline CivilDate civil_from_days(int64_t z) {
	z += 719468;
	const int64_t era = (z >= 0 ? z : z - 146096) / 146097;
	const unsigned doe = static_cast<unsigned>(z - era * 146097);
	const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
	const int64_t y = static_cast<int64_t>(yoe) + era * 400;
	const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
	const unsigned mp = (5 * doy + 2) / 153;
	const unsigned d = doy - (153 * mp + 2) / 5 + 1;
	const unsigned m = mp + (mp < 10 ? 3 : -9);
	return {static_cast<int>(y + (m <= 2)), m, d};
}

/// Calendar fields for one epoch-seconds instant (UTC).
inline int hour_of_day(int64_t epoch_s) {
	int64_t h = (epoch_s / 3600) % 24;
	if (h < 0) h += 24;
	return static_cast<int>(h);
}

inline int day_of_week(int64_t epoch_s) {
	// 1970-01-01 was a Thursday; encode Monday=0 .. Sunday=6.
	int64_t days = epoch_s / 86400;
	if (epoch_s < 0 && epoch_s % 86400 != 0) --days;
	int64_t dow = (days + 3) % 7;
	if (dow < 0) dow += 7;
	return static_cast<int>(dow);
}

inline int month_of_year(int64_t epoch_s) {
	int64_t days = epoch_s / 86400;
	if (epoch_s < 0 && epoch_s % 86400 != 0) --days;
	return static_cast<int>(civil_from_days(days).month); // 1..12
}

/// Parses "YYYY-MM-DD", "YYYY-MM-DD HH:MM:SS" or "YYYY-MM-DDTHH:MM:SS"
/// (optional trailing 'Z') into epoch seconds. Anything else fails.
inline int64_t parse_iso8601(const std::string& text) {
	int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
	char sep = 0;
	int n = std::sscanf(text.c_str(), "%d-%d-%d%c%d:%d:%d", &y, &mo, &d, &sep, &h, &mi, &s);
	if (n != 3 && n != 7)
		raise(ErrorCode::ParseError, "unparseable timestamp '" + text + "'");
	if (n == 7 && sep != 'T' && sep != ' ')
		raise(ErrorCode::ParseError, "unparseable timestamp '" + text + "'");
	if (mo < 1 || mo > 12 || d < 1 || d > 31 || h < 0 || h > 23 || mi < 0 || mi > 59 || s < 0 || s > 60)
		raise(ErrorCode::ParseError, "timestamp out of range '" + text + "'");
	return days_from_civil(y, static_cast<unsigned>(mo), static_cast<unsigned>(d)) * 86400
	     + h * 3600 + mi * 60 + s;
}

inline std::string format_iso8601(int64_t epoch_s) {
	int64_t days = epoch_s / 86400;
	int64_t rem = epoch_s % 86400;
	if (rem < 0) {
		rem += 86400;
		--days;
	}
	CivilDate cd = civil_from_days(days);
	char buf[32];
	std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d:%02dZ", cd.year, cd.month, cd.day,
	              static_cast<int>(rem / 3600), static_cast<int>((rem / 60) % 60),
	              static_cast<int>(rem % 60));
	return buf;
}

} // namespace tsroute
