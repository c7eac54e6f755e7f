#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <memory>
#include <semaphore>
#include <string>
#include <utility>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "tsroute/error.hpp"
#include "tsroute/forecaster.hpp"

namespace tsroute {

/// Where and how to reach a forecast service. The in-flight bound caps
/// concurrent requests across threads sharing one client.
struct RemoteEndpoint {
	std::string host = "127.0.0.1";
	int port = 8080;
	std::string path = "/forecast";
	double timeout_seconds = 10.0;
	int max_in_flight = 8;
};

namespace detail {

inline nlohmann::json remote_request_body(const ForecastRequest& req) {
	return nlohmann::json{{"series_id", req.series_id},
	                      {"history", req.history},
	                      {"horizon", req.horizon},
	                      {"frequency", req.frequency.to_string()}};
}

inline std::pair<std::vector<double>, std::string> parse_remote_response(
    const std::string& body, const ForecastRequest& req) {
	nlohmann::json j = nlohmann::json::parse(body, nullptr, false);
	if (j.is_discarded() || !j.is_object() || !j.contains("forecast") ||
	    !j.at("forecast").is_array() || !j.contains("model") || !j.at("model").is_string())
		raise(ErrorCode::MalformedResponse,
		      "series '" + req.series_id + "': response is not {forecast: [...], model: str}");

	std::vector<double> forecast;
	forecast.reserve(j.at("forecast").size());
	for (const auto& v : j.at("forecast")) {
		if (!v.is_number())
			raise(ErrorCode::MalformedResponse,
			      "series '" + req.series_id + "': non-numeric forecast value");
		const double d = v.get<double>();
		if (!std::isfinite(d))
			raise(ErrorCode::MalformedResponse,
			      "series '" + req.series_id + "': non-finite forecast value");
		forecast.push_back(d);
	}
	if (forecast.size() != static_cast<std::size_t>(req.horizon))
		raise(ErrorCode::LengthMismatch, "series '" + req.series_id + "': service returned " +
		                                     std::to_string(forecast.size()) +
		                                     " values, expected " + std::to_string(req.horizon));
	return {std::move(forecast), j.at("model").get<std::string>()};
}

} // namespace detail

/// One POST to the forecast service. Transport failures (connect, timeout,
/// broken socket) surface as Timeout; anything the server sends that is not
/// a 200 with a well-formed body surfaces as MalformedResponse, except a
/// wrong-length forecast which is LengthMismatch. Latency is the full round
/// trip and the result is flagged accordingly.
inline ForecastResult remote_forecast(const ForecastRequest& req, const RemoteEndpoint& endpoint) {
	req.validate();
	const auto start = std::chrono::steady_clock::now();

	httplib::Client client(endpoint.host, endpoint.port);
	const auto timeout = std::chrono::duration<double>(endpoint.timeout_seconds);
	client.set_connection_timeout(timeout);
	client.set_read_timeout(timeout);
	client.set_write_timeout(timeout);

	const std::string body = detail::remote_request_body(req).dump();
	httplib::Result res = client.Post(endpoint.path, body, "application/json");
	if (!res)
		raise(ErrorCode::Timeout, "series '" + req.series_id + "': no response from " +
		                              endpoint.host + ":" + std::to_string(endpoint.port) +
		                              " (" + httplib::to_string(res.error()) + ")");
	if (res->status != 200)
		raise(ErrorCode::MalformedResponse, "series '" + req.series_id + "': service returned " +
		                                        std::to_string(res->status));

	auto [forecast, model] = detail::parse_remote_response(res->body, req);

	ForecastResult result;
	result.series_id = req.series_id;
	result.model_name = std::move(model);
	result.predicted = std::move(forecast);
	result.latency_micros = std::chrono::duration_cast<std::chrono::microseconds>(
	                            std::chrono::steady_clock::now() - start)
	                            .count();
	result.warnings.push_back("latency includes network round-trip");
	detail::check_result(result, req.horizon);
	return result;
}

/// Client wrapper enforcing the endpoint's in-flight bound across threads.
class RemoteForecaster final : public Forecaster {
public:
	explicit RemoteForecaster(RemoteEndpoint endpoint)
	    : endpoint_(std::move(endpoint)),
	      in_flight_(std::make_unique<std::counting_semaphore<kMaxBound>>(
	          endpoint_.max_in_flight > 0 ? endpoint_.max_in_flight : 1)) {
		if (endpoint_.max_in_flight < 1 || endpoint_.max_in_flight > kMaxBound)
			raise(ErrorCode::InvalidArgument, "max_in_flight must be in 1.." +
			                                      std::to_string(kMaxBound));
	}

	ForecastResult forecast(const ForecastRequest& req) const override {
		in_flight_->acquire();
		try {
			ForecastResult result = remote_forecast(req, endpoint_);
			in_flight_->release();
			return result;
		} catch (...) {
			in_flight_->release();
			throw;
		}
	}

	std::string name() const override { return "remote"; }
	ForecasterClass forecaster_class() const override { return ForecasterClass::generalist; }

	const RemoteEndpoint& endpoint() const { return endpoint_; }

private:
	static constexpr int kMaxBound = 4096;
	RemoteEndpoint endpoint_;
	std::unique_ptr<std::counting_semaphore<kMaxBound>> in_flight_;
};

} // namespace tsroute
