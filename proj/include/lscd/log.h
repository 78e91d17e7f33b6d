#ifndef LSCD_LOG_H_
#define LSCD_LOG_H_

#include <functional>
#include <string>
#include <vector>

namespace lscd {

enum class LogLevel { kInfo, kWarning };

using LogSink = std::function<void(LogLevel, const std::string &)>;

// Replaces the process-wide sink and returns the previous one. The default
// sink writes warnings to stderr and drops info messages unless verbose
// logging was enabled.
LogSink set_log_sink(LogSink sink);
void set_verbose_logging(bool verbose);

void log_info(const std::string &message);
void log_warning(const std::string &message);

// Captures messages for the lifetime of the object, restoring the previous
// sink on destruction.
class ScopedLogCapture {
 public:
  ScopedLogCapture();
  ~ScopedLogCapture();
  ScopedLogCapture(const ScopedLogCapture &) = delete;
  ScopedLogCapture &operator=(const ScopedLogCapture &) = delete;

  const std::vector<std::string> &warnings() const { return warnings_; }

 private:
  LogSink previous_;
  std::vector<std::string> warnings_;
};

}  // namespace lscd

#endif  // LSCD_LOG_H_
