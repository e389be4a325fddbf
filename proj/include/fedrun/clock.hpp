#pragma once

#include <chrono>
#include <cstdint>
#include <memory>

namespace fedrun {

// Time source for decisions and audit records. The in-memory transport uses
// LogicalClock so repeated runs produce byte-identical audit payloads; live
// TCP runs use SystemClock (UTC milliseconds).
class Clock {
public:
    virtual ~Clock() = default;
    virtual int64_t now_ms() = 0;
};

class SystemClock final : public Clock {
public:
    int64_t now_ms() override {
        using namespace std::chrono;
        return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
    }
};

// Monotone counter; every query advances one tick so timestamps stay unique.
class LogicalClock final : public Clock {
public:
    explicit LogicalClock(int64_t start = 0) : t_(start) {}
    int64_t now_ms() override { return t_++; }

private:
    int64_t t_;
};

}  // namespace fedrun
