#pragma once

#include <condition_variable>
#include <deque>
#include <mutex>
#include <optional>

namespace faceswap {

// Bounded FIFO connecting pipeline stages. Two overflow policies:
// push_block waits for space (lossless), push_drop_oldest sheds the stalest
// queued item. FIFO order is preserved either way.
template <typename T>
class BoundedQueue {
 public:
  explicit BoundedQueue(size_t capacity) : capacity_(capacity) {}

  void push_block(T item) {
    std::unique_lock lock(m_);
    space_.wait(lock, [&] { return q_.size() < capacity_ || closed_; });
    if (closed_) return;
    q_.push_back(std::move(item));
    items_.notify_one();
  }

  // Returns the number of items dropped to make room (0 or 1).
  size_t push_drop_oldest(T item) {
    std::unique_lock lock(m_);
    if (closed_) return 0;
    size_t dropped = 0;
    if (q_.size() >= capacity_) {
      q_.pop_front();
      dropped = 1;
    }
    q_.push_back(std::move(item));
    items_.notify_one();
    return dropped;
  }

  // Blocks until an item arrives; nullopt once closed and drained.
  std::optional<T> pop() {
    std::unique_lock lock(m_);
    items_.wait(lock, [&] { return !q_.empty() || closed_; });
    if (q_.empty()) return std::nullopt;
    T item = std::move(q_.front());
    q_.pop_front();
    space_.notify_one();
    return item;
  }

  void close() {
    std::lock_guard lock(m_);
    closed_ = true;
    items_.notify_all();
    space_.notify_all();
  }

 private:
  std::mutex m_;
  std::condition_variable items_, space_;
  std::deque<T> q_;
  size_t capacity_;
  bool closed_ = false;
};

}  // namespace faceswap
