#pragma once

#include <functional>
#include <string>
#include <vector>

namespace kgpathrl {

using WarningHandler = std::function<void(const std::string&)>;

// Routes a warning to the installed handler (stderr by default).
void warn(const std::string& message);

// Installs a handler and returns the previous one.
WarningHandler set_warning_handler(WarningHandler handler);

// Captures warnings for the lifetime of the object; restores the previous
// handler on destruction.
class ScopedWarningCapture {
 public:
  ScopedWarningCapture();
  ~ScopedWarningCapture();
  ScopedWarningCapture(const ScopedWarningCapture&) = delete;
  ScopedWarningCapture& operator=(const ScopedWarningCapture&) = delete;

  const std::vector<std::string>& messages() const { return messages_; }

 private:
  std::vector<std::string> messages_;
  WarningHandler previous_;
};

}  // namespace kgpathrl
