#include "lscd/log.h"

#include <iostream>
#include <mutex>

namespace lscd {
namespace {

std::mutex g_log_mutex;
bool g_verbose = false;

void default_sink(LogLevel level, const std::string &message) {
  if (level == LogLevel::kInfo && !g_verbose) return;
  std::cerr << (level == LogLevel::kWarning ? "warning: " : "") << message
            << '\n';
}

LogSink &current_sink() {
  static LogSink sink = default_sink;
  return sink;
}

void emit(LogLevel level, const std::string &message) {
  std::lock_guard<std::mutex> lock(g_log_mutex);
  current_sink()(level, message);
}

}  // namespace

LogSink set_log_sink(LogSink sink) {
  std::lock_guard<std::mutex> lock(g_log_mutex);
  LogSink previous = std::move(current_sink());
  current_sink() = sink ? std::move(sink) : LogSink(default_sink);
  return previous;
}

void set_verbose_logging(bool verbose) {
  std::lock_guard<std::mutex> lock(g_log_mutex);
  g_verbose = verbose;
}

void log_info(const std::string &message) { emit(LogLevel::kInfo, message); }

void log_warning(const std::string &message) {
  emit(LogLevel::kWarning, message);
}

ScopedLogCapture::ScopedLogCapture() {
  previous_ = set_log_sink([this](LogLevel level, const std::string &message) {
    if (level == LogLevel::kWarning) warnings_.push_back(message);
  });
}

ScopedLogCapture::~ScopedLogCapture() { set_log_sink(std::move(previous_)); }

}  // namespace lscd
