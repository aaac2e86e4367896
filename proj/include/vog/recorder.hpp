#pragma once

#include "vog/error.hpp"
#include "vog/frame.hpp"
#include "vog/framestore.hpp"

#include <condition_variable>
#include <cstddef>
#include <deque>
#include <functional>
#include <mutex>
#include <optional>

namespace vog {

/// Fixed-capacity FIFO. push() blocks while full; there is no way to drop.
/// abort() wakes every waiter and makes further pushes fail.
template <typename T>
class BoundedQueue {
public:
    explicit BoundedQueue(std::size_t capacity) : capacity_(capacity)
    {
        if (capacity_ == 0)
            throw Error(ErrorCode::InvalidArgument, "queue capacity must be at least 1");
    }

    /// Returns false only after abort(). `blocked` is set when the call had to wait.
    bool push(T value, bool* blocked = nullptr)
    {
        std::unique_lock lock(mutex_);
        if (blocked)
            *blocked = items_.size() >= capacity_ && !aborted_;
        not_full_.wait(lock, [&] { return items_.size() < capacity_ || aborted_; });
        if (aborted_)
            return false;
        items_.push_back(std::move(value));
        max_occupancy_ = std::max(max_occupancy_, items_.size());
        not_empty_.notify_one();
        return true;
    }

    /// Empty optional once the queue is closed and drained (or aborted).
    std::optional<T> pop()
    {
        std::unique_lock lock(mutex_);
        not_empty_.wait(lock, [&] { return !items_.empty() || closed_ || aborted_; });
        if (aborted_ || items_.empty())
            return std::nullopt;
        T value = std::move(items_.front());
        items_.pop_front();
        not_full_.notify_one();
        return value;
    }

    void close()
    {
        std::lock_guard lock(mutex_);
        closed_ = true;
        not_empty_.notify_all();
    }

    void abort()
    {
        std::lock_guard lock(mutex_);
        aborted_ = true;
        not_empty_.notify_all();
        not_full_.notify_all();
    }

    std::size_t max_occupancy() const
    {
        std::lock_guard lock(mutex_);
        return max_occupancy_;
    }

private:
    const std::size_t capacity_;
    mutable std::mutex mutex_;
    std::condition_variable not_empty_;
    std::condition_variable not_full_;
    std::deque<T> items_;
    std::size_t max_occupancy_ = 0;
    bool closed_ = false;
    bool aborted_ = false;
};

struct RecorderConfig {
    std::size_t buffer_capacity = 64;
    // Backpressure is the only overflow policy.

    void validate() const;
};

struct RecorderStats {
    std::uint64_t produced = 0;
    std::uint64_t persisted = 0;
    std::size_t max_occupancy = 0;
    std::uint64_t producer_waits = 0;
};

/// Returns the next frame, or nullopt when the source is exhausted.
using FrameProducer = std::function<std::optional<Frame>()>;

/// Runs `producer` on the calling thread and a consumer thread writing into
/// `sink`, connected by a bounded queue. Sink errors (e.g. StorageFull) stop
/// both sides and are rethrown here.
RecorderStats record(const FrameProducer& producer, const RecorderConfig& config, FrameSink& sink);

} // namespace vog
