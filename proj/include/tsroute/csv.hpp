#pragma once

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "tsroute/error.hpp"

namespace tsroute {

/// Minimal CSV support: comma-separated, header row, no quoting. All artifact
/// formats in this toolkit are plain numeric/identifier columns, so quoted
/// fields are out of scope and rejected implicitly by the parsers above them.
struct CsvTable {
	std::vector<std::string> header;
	std::vector<std::vector<std::string>> rows;

	int column(const std::string& name) const {
		for (size_t i = 0; i < header.size(); ++i)
			if (header[i] == name) return static_cast<int>(i);
		return -1;
	}

	int require_column(const std::string& name) const {
		int idx = column(name);
		if (idx < 0) raise(ErrorCode::MissingColumn, "column '" + name + "' not found");
		return idx;
	}
};

inline std::vector<std::string> split_csv_line(const std::string& line) {
	std::vector<std::string> fields;
	std::string cur;
	for (char c : line) {
		if (c == ',') {
			fields.push_back(cur);
			cur.clear();
		} else if (c != '\r') {
			cur.push_back(c);
		}
	}
	fields.push_back(cur);
	return fields;
}

inline CsvTable read_csv(const std::string& path) {
	std::ifstream in(path);
	if (!in) raise(ErrorCode::IoError, "cannot open '" + path + "'");
	CsvTable table;
	std::string line;
	if (!std::getline(in, line)) raise(ErrorCode::ParseError, "empty CSV '" + path + "'");
	table.header = split_csv_line(line);
	while (std::getline(in, line)) {
		if (line.empty()) continue;
		table.rows.push_back(split_csv_line(line));
		if (table.rows.back().size() != table.header.size())
			raise(ErrorCode::ParseError,
			      "row with " + std::to_string(table.rows.back().size()) + " fields, expected "
			          + std::to_string(table.header.size()) + " in '" + path + "'");
	}
	return table;
}

inline double parse_double(const std::string& text, const std::string& context = "input") {
	char* end = nullptr;
	const char* begin = text.c_str();
	double v = std::strtod(begin, &end);
	if (end == begin || *end != '\0')
		raise(ErrorCode::ParseError, "bad number '" + text + "' in " + context);
	return v;
}

inline long long parse_int(const std::string& text, const std::string& context = "input") {
	char* end = nullptr;
	const char* begin = text.c_str();
	long long v = std::strtoll(begin, &end, 10);
	if (end == begin || *end != '\0')
		raise(ErrorCode::ParseError, "bad integer '" + text + "' in " + context);
	return v;
}

/// Serialized writes go through one writer per file; build the full text,
/// then write once.
inline void write_text_file(const std::string& path, const std::string& content) {
	std::ofstream out(path, std::ios::binary);
	if (!out) raise(ErrorCode::IoError, "cannot write '" + path + "'");
	out << content;
	if (!out) raise(ErrorCode::IoError, "short write to '" + path + "'");
}

inline std::string read_text_file(const std::string& path) {
	std::ifstream in(path, std::ios::binary);
	if (!in) raise(ErrorCode::IoError, "cannot open '" + path + "'");
	std::ostringstream ss;
	ss << in.rdbuf();
	return ss.str();
}

} // namespace tsroute
