#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "tsroute/calendar.hpp"
#include "tsroute/csv.hpp"
#include "tsroute/dataset.hpp"
#include "tsroute/error.hpp"
#include "tsroute/numfmt.hpp"
#include "tsroute/series.hpp"

namespace tsroute {

/// Column names of a long-format corpus CSV.
struct LongCsvSchema {
	std::string id_column = "series_id";
	std::string timestamp_column = "timestamp";
	std::string value_column = "value";
};

namespace detail {

inline bool is_plain_integer(const std::string& text) {
	if (text.empty()) return false;
	size_t i = (text[0] == '-' || text[0] == '+') ? 1 : 0;
	if (i == text.size()) return false;
	for (; i < text.size(); ++i)
		if (!std::isdigit(static_cast<unsigned char>(text[i]))) return false;
	return true;
}

} // namespace detail

/// Reads a long-format CSV (`series_id,timestamp,value`) into a corpus. Rows
/// may arrive in any order; they are grouped by id and sorted by timestamp.
/// Timestamps are either ISO-8601 instants or non-negative integer step
/// indices; the whole file must use one convention. Seasonal metadata comes
/// from the dataset config entry, never from the data.
inline Corpus ingest_long_csv(const std::string& path, const DatasetSpec& dataset,
                              const LongCsvSchema& schema = {}) {
	CsvTable table = read_csv(path);
	int id_col = table.require_column(schema.id_column);
	int ts_col = table.require_column(schema.timestamp_column);
	int val_col = table.require_column(schema.value_column);
	if (table.rows.empty()) raise(ErrorCode::ParseError, "no data rows in '" + path + "'");

	// Decide the time axis from the first row.
	TimeAxis axis = detail::is_plain_integer(table.rows.front()[ts_col]) ? TimeAxis::step_index
	                                                                     : TimeAxis::epoch_seconds;

	struct Row {
		int64_t tick;
		double value;
	};
	std::map<std::string, std::vector<Row>> groups;
	for (size_t r = 0; r < table.rows.size(); ++r) {
		const auto& fields = table.rows[r];
		const std::string& id = fields[id_col];
		if (id.empty()) raise(ErrorCode::ParseError, "empty series_id at data row " + std::to_string(r + 1));
		std::string where = "'" + path + "' row " + std::to_string(r + 1);
		int64_t tick;
		if (axis == TimeAxis::step_index) {
			if (!detail::is_plain_integer(fields[ts_col]))
				raise(ErrorCode::ParseError, "mixed timestamp formats in " + where);
			tick = parse_int(fields[ts_col], where);
			if (tick < 0) raise(ErrorCode::ParseError, "negative step index in " + where);
		} else {
			tick = parse_iso8601(fields[ts_col]);
		}
		double value = parse_double(fields[val_col], where);
		if (!std::isfinite(value))
			raise(ErrorCode::NonFiniteValue, "non-finite value for series '" + id + "' in " + where);
		groups[id].push_back({tick, value});
	}

	std::vector<Series> series;
	series.reserve(groups.size());
	for (auto& [id, rows] : groups) {
		std::stable_sort(rows.begin(), rows.end(),
		                 [](const Row& a, const Row& b) { return a.tick < b.tick; });
		std::vector<int64_t> ticks(rows.size());
		std::vector<double> values(rows.size());
		for (size_t i = 0; i < rows.size(); ++i) {
			ticks[i] = rows[i].tick;
			values[i] = rows[i].value;
		}
		// Series construction enforces uniform spacing and rejects duplicates.
		series.emplace_back(id, std::move(ticks), std::move(values), dataset.frequency,
		                    dataset.seasonal_period, dataset.mase_m, axis);
	}
	return Corpus(std::move(series));
}

/// Canonical long-CSV serialization: rows sorted by (series_id, timestamp),
/// ISO instants for epoch axes, bare indices for step axes. Values carry the
/// canonical 9-significant-digit formatting, so re-ingesting the output
/// reproduces the corpus at canonical precision.
inline std::string corpus_to_long_csv(const Corpus& corpus, const LongCsvSchema& schema = {}) {
	std::ostringstream out;
	out << schema.id_column << ',' << schema.timestamp_column << ',' << schema.value_column << '\n';
	for (const Series& s : corpus.series()) {
		for (size_t i = 0; i < s.length(); ++i) {
			out << s.id() << ',';
			if (s.axis() == TimeAxis::step_index)
				out << s.timestamp(i);
			else
				out << format_iso8601(s.timestamp(i));
			out << ',' << format_num(s.values()[i]) << '\n';
		}
	}
	return out.str();
}

} // namespace tsroute
