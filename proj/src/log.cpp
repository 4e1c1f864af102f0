#include "kgpathrl/log.hpp"

#include <iostream>
#include <mutex>
#include <utility>

namespace kgpathrl {
namespace {

std::mutex& handler_mutex() {
  static std::mutex mu;
  return mu;
}

WarningHandler& handler() {
  static WarningHandler h = [](const std::string& m) {
    std::cerr << "warning: " << m << '\n';
  };
  return h;
}

}  // namespace

void warn(const std::string& message) {
  std::lock_guard lock(handler_mutex());
  if (handler()) handler()(message);
}

WarningHandler set_warning_handler(WarningHandler h) {
  std::lock_guard lock(handler_mutex());
  return std::exchange(handler(), std::move(h));
}

ScopedWarningCapture::ScopedWarningCapture()
    : previous_(set_warning_handler(
          [this](const std::string& m) { messages_.push_back(m); })) {}

ScopedWarningCapture::~ScopedWarningCapture() {
  set_warning_handler(std::move(previous_));
}

}  // namespace kgpathrl
