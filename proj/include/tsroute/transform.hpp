#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "tsroute/error.hpp"

namespace tsroute {

enum class TransformKind { identity, zscore, log1p };

inline const char* to_string(TransformKind kind) {
	switch (kind) {
		case TransformKind::identity: return "identity";
		case TransformKind::zscore: return "zscore";
		case TransformKind::log1p: return "log1p";
	}
	return "identity";
}

inline TransformKind parse_transform_kind(const std::string& text) {
	if (text == "identity") return TransformKind::identity;
	if (text == "zscore") return TransformKind::zscore;
	if (text == "log1p") return TransformKind::log1p;
	raise(ErrorCode::ParseError, "bad transform '" + text + "'");
}

/// Value transform fitted on training data only. zscore uses the population
/// (1/N) standard deviation. log1p needs no fitting and requires x > -1.
class Transform {
public:
	static Transform identity() { return Transform(TransformKind::identity, 0.0, 1.0); }

	static Transform fit(TransformKind kind, std::span<const double> training) {
		if (kind != TransformKind::zscore) return Transform(kind, 0.0, 1.0);
		if (training.empty()) raise(ErrorCode::InvalidArgument, "cannot fit zscore on empty data");
		double mean = 0.0;
		for (double v : training) mean += v;
		mean /= static_cast<double>(training.size());
		double var = 0.0;
		for (double v : training) var += (v - mean) * (v - mean);
		var /= static_cast<double>(training.size());
		double std_dev = std::sqrt(var);
		if (!(std_dev > 0.0))
			raise(ErrorCode::DegenerateSeries, "zero training variance; zscore undefined");
		return Transform(TransformKind::zscore, mean, std_dev);
	}

	TransformKind kind() const { return kind_; }
	double fitted_mean() const { return mean_; }
	double fitted_std() const { return std_; }

	std::vector<double> apply(std::span<const double> values) const {
		std::vector<double> out(values.begin(), values.end());
		switch (kind_) {
			case TransformKind::identity:
				break;
			case TransformKind::zscore:
				for (double& v : out) v = (v - mean_) / std_;
				break;
			case TransformKind::log1p:
				for (double& v : out) {
					if (v <= -1.0)
						raise(ErrorCode::DomainError, "log1p requires values > -1");
					v = std::log1p(v);
				}
				break;
		}
		return out;
	}

	std::vector<double> invert(std::span<const double> values) const {
		std::vector<double> out(values.begin(), values.end());
		switch (kind_) {
			case TransformKind::identity:
				break;
			case TransformKind::zscore:
				for (double& v : out) v = v * std_ + mean_;
				break;
			case TransformKind::log1p:
				for (double& v : out) v = std::expm1(v);
				break;
		}
		return out;
	}

private:
	Transform(TransformKind kind, double mean, double std_dev)
	    : kind_(kind), mean_(mean), std_(std_dev) {}

	TransformKind kind_;
	double mean_;
	double std_;
};

} // namespace tsroute
