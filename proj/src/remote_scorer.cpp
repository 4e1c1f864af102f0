#include <algorithm>
#include <future>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "kgpathrl/errors.hpp"
#include "kgpathrl/scorers.hpp"

namespace kgpathrl {

RemoteScorer::RemoteScorer(std::string endpoint, RemoteScorerOptions options)
    : endpoint_(std::move(endpoint)), options_(options) {
  while (!endpoint_.empty() && endpoint_.back() == '/') endpoint_.pop_back();
  if (endpoint_.empty()) throw InvalidQueryError("empty scorer endpoint");
  if (options_.batch_size == 0) throw InvalidQueryError("batch size must be >= 1");
  if (options_.attempts < 1) throw InvalidQueryError("attempts must be >= 1");
  options_.max_in_flight = std::max(1u, options_.max_in_flight);
}

bool RemoteScorer::healthy() const {
  httplib::Client client(endpoint_);
  client.set_connection_timeout(options_.timeout);
  client.set_read_timeout(options_.timeout);
  auto res = client.Get("/health");
  if (!res || res->status != 200) return false;
  try {
    return nlohmann::json::parse(res->body).value("status", "") == "ok";
  } catch (const nlohmann::json::exception&) {
    return false;
  }
}

std::vector<double> RemoteScorer::score_chunk(std::span<const Instance> chunk,
                                              std::size_t chunk_index,
                                              std::size_t offset) const {
  nlohmann::json body;
  auto& items = body["instances"] = nlohmann::json::array();
  for (const Instance& inst : chunk) {
    items.push_back({{"question", inst.question}, {"context", inst.context}});
  }
  const std::string payload = body.dump();
  const std::string where = "chunk " + std::to_string(chunk_index) + " (instances " +
                            std::to_string(offset) + ".." +
                            std::to_string(offset + chunk.size() - 1) + ")";

  std::string last_failure;
  auto backoff = options_.initial_backoff;
  for (int attempt = 1; attempt <= options_.attempts; ++attempt) {
    if (attempt > 1) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
    httplib::Client client(endpoint_);
    client.set_connection_timeout(options_.timeout);
    client.set_read_timeout(options_.timeout);
    ++requests_;
    auto res = client.Post("/score", payload, "application/json");
    if (!res) {
      last_failure = httplib::to_string(res.error());
      continue;
    }
    if (res->status != 200) {
      last_failure = "HTTP " + std::to_string(res->status);
      continue;
    }
    nlohmann::json reply;
    try {
      reply = nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::parse_error&) {
      throw ProtocolError(where + ": response is not JSON");
    }
    if (!reply.contains("scores") || !reply["scores"].is_array()) {
      throw ProtocolError(where + ": response lacks a scores array");
    }
    const auto& scores = reply["scores"];
    if (scores.size() != chunk.size()) {
      throw ProtocolError(where + ": expected " + std::to_string(chunk.size()) +
                          " scores, got " + std::to_string(scores.size()));
    }
    std::vector<double> out;
    out.reserve(scores.size());
    for (const auto& s : scores) {
      if (!s.is_number()) throw ProtocolError(where + ": non-numeric score");
      const double v = s.get<double>();
      if (!(v >= 0.0 && v <= 1.0)) {
        throw ProtocolError(where + ": score " + s.dump() + " outside [0, 1]");
      }
      out.push_back(v);
    }
    return out;
  }
  throw ScoringError("scorer service " + endpoint_ + " failed on " + where + " after " +
                     std::to_string(options_.attempts) + " attempts: " + last_failure);
}

std::vector<double> RemoteScorer::score_batch(std::span<const Instance> instances) const {
  std::vector<double> out(instances.size());
  const std::size_t bs = options_.batch_size;
  const std::size_t chunks = (instances.size() + bs - 1) / bs;
  for (std::size_t first = 0; first < chunks; first += options_.max_in_flight) {
    const std::size_t last = std::min(chunks, first + options_.max_in_flight);
    std::vector<std::future<std::vector<double>>> wave;
    for (std::size_t c = first; c < last; ++c) {
      const std::size_t offset = c * bs;
      const auto chunk = instances.subspan(offset, std::min(bs, instances.size() - offset));
      wave.push_back(std::async(std::launch::async, [this, chunk, c, offset] {
        return score_chunk(chunk, c, offset);
      }));
    }
    for (std::size_t c = first; c < last; ++c) {
      auto scores = wave[c - first].get();
      std::copy(scores.begin(), scores.end(), out.begin() + static_cast<std::ptrdiff_t>(c * bs));
    }
  }
  return out;
}

}  // namespace kgpathrl
