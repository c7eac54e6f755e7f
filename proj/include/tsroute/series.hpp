#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "tsroute/error.hpp"

namespace tsroute {

/// Observation frequency. Hourly and daily are the named cases; anything else
/// carries its period in seconds.
class Frequency {
public:
	static Frequency hourly() { return Frequency(3600); }
	static Frequency daily() { return Frequency(86400); }
	static Frequency other(int64_t period_seconds) {
		if (period_seconds <= 0) raise(ErrorCode::InvalidArgument, "frequency period must be positive");
		return Frequency(period_seconds);
	}

	Frequency() : period_seconds_(3600) {}

	int64_t period_seconds() const { return period_seconds_; }
	bool is_hourly() const { return period_seconds_ == 3600; }
	bool is_daily() const { return period_seconds_ == 86400; }

	std::string to_string() const {
		if (is_hourly()) return "hourly";
		if (is_daily()) return "daily";
		return "other:" + std::to_string(period_seconds_);
	}

	static Frequency parse(const std::string& text) {
		if (text == "hourly") return hourly();
		if (text == "daily") return daily();
		if (text.rfind("other:", 0) == 0) {
			char* end = nullptr;
			long long p = std::strtoll(text.c_str() + 6, &end, 10);
			if (*end == '\0' && p > 0) return other(p);
		}
		raise(ErrorCode::ParseError, "bad frequency '" + text + "'");
	}

	friend bool operator==(const Frequency& a, const Frequency& b) {
		return a.period_seconds_ == b.period_seconds_;
	}

private:
	explicit Frequency(int64_t p) : period_seconds_(p) {}
	int64_t period_seconds_;
};

/// Whether timestamps were given as instants (epoch seconds) or as plain step
/// indices. Index axes are anchored at epoch zero for calendar purposes.
enum class TimeAxis { epoch_seconds, step_index };

/// One univariate series: uniformly spaced timestamps, values, seasonal
/// metadata. Immutable after construction; invariants are checked once here.
class Series {
public:
	Series(std::string id, std::vector<int64_t> timestamps, std::vector<double> values,
	       Frequency frequency, int seasonal_period, int mase_m,
	       TimeAxis axis = TimeAxis::epoch_seconds)
	    : id_(std::move(id)), values_(std::move(values)), frequency_(frequency),
	      seasonal_period_(seasonal_period), mase_m_(mase_m), axis_(axis) {
		if (values_.empty()) raise(ErrorCode::InvalidArgument, "series '" + id_ + "' has no values");
		if (timestamps.size() != values_.size())
			raise(ErrorCode::InvalidArgument,
			      "series '" + id_ + "': timestamp/value length mismatch");
		if (seasonal_period_ < 1)
			raise(ErrorCode::InvalidPeriod, "series '" + id_ + "': seasonal_period must be >= 1");
		if (mase_m_ < 1)
			raise(ErrorCode::InvalidPeriod, "series '" + id_ + "': mase_m must be >= 1");
		for (double v : values_)
			if (!std::isfinite(v))
				raise(ErrorCode::NonFiniteValue, "series '" + id_ + "' contains a non-finite value");
		start_tick_ = timestamps.front();
		// The stride is dictated by the axis, not inferred from the data:
		// step indices advance by 1, epoch instants by the declared
		// frequency. Any other delta is a gap or a duplicate.
		tick_step_ = axis_ == TimeAxis::step_index ? 1 : frequency_.period_seconds();
		for (size_t i = 1; i < timestamps.size(); ++i) {
			int64_t gap = timestamps[i] - timestamps[i - 1];
			if (gap == 0)
				raise(ErrorCode::DuplicateTimestamp,
				      "series '" + id_ + "': duplicate timestamp at row " + std::to_string(i));
			if (gap != tick_step_)
				raise(ErrorCode::NonUniformSpacing,
				      "series '" + id_ + "': spacing " + std::to_string(gap) + " != "
				          + std::to_string(tick_step_) + " at row " + std::to_string(i));
		}
	}

	const std::string& id() const { return id_; }
	const std::vector<double>& values() const { return values_; }
	size_t length() const { return values_.size(); }
	Frequency frequency() const { return frequency_; }
	int seasonal_period() const { return seasonal_period_; }
	int mase_m() const { return mase_m_; }
	TimeAxis axis() const { return axis_; }
	int64_t start_tick() const { return start_tick_; }
	int64_t tick_step() const { return tick_step_; }

	int64_t timestamp(size_t i) const { return start_tick_ + static_cast<int64_t>(i) * tick_step_; }

	std::vector<int64_t> timestamps() const {
		std::vector<int64_t> out(values_.size());
		for (size_t i = 0; i < out.size(); ++i) out[i] = timestamp(i);
		return out;
	}

	/// Instant of point i in epoch seconds; index axes count steps of the
	/// declared frequency from epoch zero.
	int64_t epoch_seconds(size_t i) const {
		int64_t t = timestamp(i);
		return axis_ == TimeAxis::step_index ? t * frequency_.period_seconds() : t;
	}

	/// Copy of the first n points, keeping identity and metadata.
	Series prefix(size_t n) const {
		if (n < 1 || n > length())
			raise(ErrorCode::InvalidArgument, "series '" + id_ + "': bad prefix length");
		std::vector<int64_t> ts(n);
		for (size_t i = 0; i < n; ++i) ts[i] = timestamp(i);
		return Series(id_, std::move(ts), {values_.begin(), values_.begin() + n}, frequency_,
		              seasonal_period_, mase_m_, axis_);
	}

	/// Copy of the last n points.
	Series suffix(size_t n) const {
		if (n < 1 || n > length())
			raise(ErrorCode::InvalidArgument, "series '" + id_ + "': bad suffix length");
		size_t from = length() - n;
		std::vector<int64_t> ts(n);
		for (size_t i = 0; i < n; ++i) ts[i] = timestamp(from + i);
		return Series(id_, std::move(ts), {values_.begin() + from, values_.end()}, frequency_,
		              seasonal_period_, mase_m_, axis_);
	}

private:
	std::string id_;
	std::vector<double> values_;
	Frequency frequency_;
	int seasonal_period_;
	int mase_m_;
	TimeAxis axis_;
	int64_t start_tick_ = 0;
	int64_t tick_step_ = 1;
};

/// Train/test split of one series: history keeps the first T-H points, the
/// last H values become held-out actuals.
struct SplitSeries {
	Series history;
	std::vector<double> actuals;
	int horizon;
};

inline SplitSeries split_last_h(const Series& s, int horizon) {
	if (horizon < 1) raise(ErrorCode::InvalidArgument, "horizon must be >= 1");
	if (static_cast<size_t>(horizon) >= s.length())
		raise(ErrorCode::HorizonTooLong,
		      "series '" + s.id() + "': horizon " + std::to_string(horizon) + " >= length "
		          + std::to_string(s.length()));
	size_t train_len = s.length() - static_cast<size_t>(horizon);
	std::vector<double> actuals(s.values().begin() + train_len, s.values().end());
	return SplitSeries{s.prefix(train_len), std::move(actuals), horizon};
}

/// A corpus is a set of series sorted by id, unique ids.
class Corpus {
public:
	Corpus() = default;

	explicit Corpus(std::vector<Series> series) : series_(std::move(series)) {
		std::sort(series_.begin(), series_.end(),
		          [](const Series& a, const Series& b) { return a.id() < b.id(); });
		for (size_t i = 1; i < series_.size(); ++i)
			if (series_[i].id() == series_[i - 1].id())
				raise(ErrorCode::InvalidArgument, "duplicate series id '" + series_[i].id() + "'");
	}

	const std::vector<Series>& series() const { return series_; }
	size_t size() const { return series_.size(); }
	bool empty() const { return series_.empty(); }

	const Series* find(const std::string& id) const {
		auto it = std::lower_bound(series_.begin(), series_.end(), id,
		                           [](const Series& s, const std::string& key) { return s.id() < key; });
		if (it == series_.end() || it->id() != id) return nullptr;
		return &*it;
	}

private:
	std::vector<Series> series_;
};

} // namespace tsroute
