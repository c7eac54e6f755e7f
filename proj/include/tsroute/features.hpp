#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tsroute/csv.hpp"
#include "tsroute/error.hpp"
#include "tsroute/numfmt.hpp"
#include "tsroute/series.hpp"

namespace tsroute {

namespace detail {

inline double mean_of(std::span<const double> values) {
	double sum = 0.0;
	for (double v : values) sum += v;
	return sum / static_cast<double>(values.size());
}

inline bool is_constant(std::span<const double> values) {
	for (double v : values)
		if (v != values.front()) return false;
	return true;
}

} // namespace detail

/// Shannon entropy of the normalized periodogram of the mean-removed series,
/// scaled to [0, 1] by log(bin count). The DC bin is excluded. A constant
/// series has an empty spectrum and scores 0. Requires at least 8 points.
inline double spectral_entropy(std::span<const double> values) {
	const std::size_t n = values.size();
	if (n < 8) raise(ErrorCode::TooShort, "spectral entropy needs at least 8 points");
	if (detail::is_constant(values)) return 0.0;

	const double mean = detail::mean_of(values);
	const std::size_t nbins = n / 2;
	std::vector<double> power(nbins, 0.0);
	double total = 0.0;
	for (std::size_t k = 1; k <= nbins; ++k) {
		double re = 0.0;
		double im = 0.0;
		for (std::size_t t = 0; t < n; ++t) {
			const double angle =
			    -2.0 * std::numbers::pi * static_cast<double>(k) * static_cast<double>(t) /
			    static_cast<double>(n);
			const double centered = values[t] - mean;
			re += centered * std::cos(angle);
			im += centered * std::sin(angle);
		}
		power[k - 1] = re * re + im * im;
		total += power[k - 1];
	}
	if (!(total > 0.0)) return 0.0;
	if (nbins < 2) return 0.0;

	double entropy = 0.0;
	for (double p : power) {
		if (p <= 0.0) continue;
		const double q = p / total;
		entropy -= q * std::log(q);
	}
	entropy /= std::log(static_cast<double>(nbins));
	return std::clamp(entropy, 0.0, 1.0);
}

/// Population standard deviation over |mean|. A constant series scores 0
/// (checked before the mean test, so constant-zero is 0, not undefined).
/// When |mean| is below 1e-12 times the value range the ratio is unstable
/// and the feature is undefined (nullopt).
inline std::optional<double> coeff_variation(std::span<const double> values) {
	if (values.empty()) raise(ErrorCode::TooShort, "coefficient of variation needs data");
	if (detail::is_constant(values)) return 0.0;

	const double mean = detail::mean_of(values);
	auto [lo, hi] = std::minmax_element(values.begin(), values.end());
	const double range = *hi - *lo;
	if (std::abs(mean) < 1e-12 * range) return std::nullopt;

	double var = 0.0;
	for (double v : values) var += (v - mean) * (v - mean);
	var /= static_cast<double>(values.size());
	return std::sqrt(var) / std::abs(mean);
}

/// Autocorrelation at the seasonal lag, with length-adjusted normalization:
/// the lag-S cross term is averaged over its T-S products while the variance
/// is averaged over all T, so an exactly periodic series scores ~1 regardless
/// of how many periods fit. Clamped to [-1, 1]; constant series score 0.
/// Requires at least two full periods.
inline double seasonal_acf(std::span<const double> values, int seasonal_period) {
	if (seasonal_period < 1) raise(ErrorCode::InvalidPeriod, "seasonal period must be >= 1");
	const std::size_t n = values.size();
	const auto lag = static_cast<std::size_t>(seasonal_period);
	if (n < 2 * lag) raise(ErrorCode::TooShort, "seasonal acf needs at least two periods");
	if (detail::is_constant(values)) return 0.0;

	const double mean = detail::mean_of(values);
	double cross = 0.0;
	for (std::size_t t = lag; t < n; ++t)
		cross += (values[t] - mean) * (values[t - lag] - mean);
	double var = 0.0;
	for (double v : values) var += (v - mean) * (v - mean);

	const double num = cross / static_cast<double>(n - lag);
	const double den = var / static_cast<double>(n);
	if (!(den > 0.0)) return 0.0;
	return std::clamp(num / den, -1.0, 1.0);
}

/// R-squared of an ordinary least squares fit of value against time index.
/// Clamped to [0, 1]; constant series score 0. Requires at least 3 points.
inline double trend_r2(std::span<const double> values) {
	const std::size_t n = values.size();
	if (n < 3) raise(ErrorCode::TooShort, "trend fit needs at least 3 points");
	if (detail::is_constant(values)) return 0.0;

	const double t_mean = static_cast<double>(n - 1) / 2.0;
	const double y_mean = detail::mean_of(values);
	double sxy = 0.0;
	double sxx = 0.0;
	double syy = 0.0;
	for (std::size_t t = 0; t < n; ++t) {
		const double dt = static_cast<double>(t) - t_mean;
		const double dy = values[t] - y_mean;
		sxy += dt * dy;
		sxx += dt * dt;
		syy += dy * dy;
	}
	if (!(syy > 0.0)) return 0.0;
	const double r2 = (sxy * sxy) / (sxx * syy);
	return std::clamp(r2, 0.0, 1.0);
}

/// The four routing features for one series, plus the number of points they
/// were computed from. coeff_variation is nullopt when the near-zero-mean
/// guard fires; every other feature is always defined.
struct SeriesFeatures {
	std::string series_id;
	double spectral_entropy = 0.0;
	std::optional<double> coeff_variation;
	double seasonal_acf = 0.0;
	double trend_r2 = 0.0;
	std::size_t n_points = 0;
};

inline SeriesFeatures extract_features(const Series& series) {
	SeriesFeatures out;
	out.series_id = series.id();
	out.n_points = series.length();
	try {
		out.spectral_entropy = spectral_entropy(series.values());
		out.coeff_variation = coeff_variation(series.values());
		out.seasonal_acf = seasonal_acf(series.values(), series.seasonal_period());
		out.trend_r2 = trend_r2(series.values());
	} catch (const Error& e) {
		raise(e.code(), "series '" + series.id() + "': " + e.message());
	}
	return out;
}

/// Features over the leading fraction of the series (the training portion).
/// Test actuals never reach the feature computations.
inline SeriesFeatures extract_all(const Series& series, double training_fraction) {
	if (!(training_fraction > 0.0) || training_fraction > 1.0)
		raise(ErrorCode::InvalidArgument, "training fraction must be in (0, 1]");
	auto n_train = static_cast<std::size_t>(
	    std::floor(training_fraction * static_cast<double>(series.length())));
	n_train = std::clamp<std::size_t>(n_train, 1, series.length());
	return extract_features(series.prefix(n_train));
}

inline std::vector<SeriesFeatures> extract_features(const Corpus& corpus) {
	std::vector<SeriesFeatures> out;
	out.reserve(corpus.size());
	for (const Series& s : corpus.series()) out.push_back(extract_features(s));
	return out;
}

inline std::string features_to_csv(const std::vector<SeriesFeatures>& rows) {
	std::string out = "series_id,spectral_entropy,coeff_variation,seasonal_acf,trend_r2,n_points\n";
	for (const SeriesFeatures& f : rows) {
		out += f.series_id;
		out += ',';
		out += format_num(f.spectral_entropy);
		out += ',';
		out += f.coeff_variation ? format_num(*f.coeff_variation) : "undefined";
		out += ',';
		out += format_num(f.seasonal_acf);
		out += ',';
		out += format_num(f.trend_r2);
		out += ',';
		out += std::to_string(f.n_points);
		out += '\n';
	}
	return out;
}

inline std::vector<SeriesFeatures> features_from_csv(const CsvTable& table) {
	const std::size_t id_col = table.require_column("series_id");
	const std::size_t ent_col = table.require_column("spectral_entropy");
	const std::size_t cv_col = table.require_column("coeff_variation");
	const std::size_t acf_col = table.require_column("seasonal_acf");
	const std::size_t r2_col = table.require_column("trend_r2");
	const std::size_t n_col = table.require_column("n_points");
	std::vector<SeriesFeatures> out;
	out.reserve(table.rows.size());
	for (const auto& row : table.rows) {
		SeriesFeatures f;
		f.series_id = row[id_col];
		f.spectral_entropy = parse_double(row[ent_col]);
		if (row[cv_col] != "undefined") f.coeff_variation = parse_double(row[cv_col]);
		f.seasonal_acf = parse_double(row[acf_col]);
		f.trend_r2 = parse_double(row[r2_col]);
		f.n_points = static_cast<std::size_t>(parse_int(row[n_col]));
		out.push_back(std::move(f));
	}
	return out;
}

} // namespace tsroute
