#pragma once

#include <mutex>
#include <thread>

#include "ccnet/text.hpp"

namespace ccnet {

using text::Timestamp;

class Clock {
 public:
  virtual ~Clock() = default;
  virtual Timestamp now() = 0;
  virtual void sleep_until(Timestamp t) = 0;
};

class SystemClock final : public Clock {
 public:
  Timestamp now() override {
    return std::chrono::time_point_cast<std::chrono::milliseconds>(std::chrono::system_clock::now());
  }
  void sleep_until(Timestamp t) override { std::this_thread::sleep_until(t); }
};

/// Manual clock: time only moves through advance() or sleep_until(). Thread-safe.
class FakeClock final : public Clock {
 public:
  explicit FakeClock(Timestamp start = Timestamp{}) : now_(start) {}

  Timestamp now() override {
    std::lock_guard lock(mu_);
    return now_;
  }
  void sleep_until(Timestamp t) override {
    std::lock_guard lock(mu_);
    if (t > now_) now_ = t;
  }
  void advance(std::chrono::milliseconds d) {
    std::lock_guard lock(mu_);
    now_ += d;
  }

 private:
  std::mutex mu_;
  Timestamp now_;
};

/// Always reports one instant; sleeping is a no-op. Used for reproducible
/// stamps, never for pacing.
class PinnedClock final : public Clock {
 public:
  explicit PinnedClock(Timestamp t) : t_(t) {}
  Timestamp now() override { return t_; }
  void sleep_until(Timestamp) override {}

 private:
  Timestamp t_;
};

}  // namespace ccnet
