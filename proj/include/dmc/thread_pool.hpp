#pragma once

#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace dmc {

// Minimal fork-join pool. Work is split into fixed contiguous ranges, never
// stolen, so a run's output cannot depend on scheduling. parallel_for blocks
// until every range has completed.
class ThreadPool {
 public:
  explicit ThreadPool(unsigned n_threads) {
    const unsigned n = n_threads > 1 ? n_threads - 1 : 0;  // caller is worker 0
    workers_.reserve(n);
    for (unsigned i = 0; i < n; ++i) {
      workers_.emplace_back([this] { worker_loop(); });
    }
  }

  ~ThreadPool() {
    {
      std::lock_guard lock(mu_);
      stop_ = true;
    }
    cv_.notify_all();
    for (auto& w : workers_) w.join();
  }

  ThreadPool(const ThreadPool&) = delete;
  ThreadPool& operator=(const ThreadPool&) = delete;

  unsigned width() const { return static_cast<unsigned>(workers_.size()) + 1; }

  // Run fn(i) for i in [0, n). fn must be safe to call concurrently for
  // distinct i.
  void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    if (n == 0) return;
    const unsigned lanes = width();
    if (lanes == 1 || n == 1) {
      for (std::size_t i = 0; i < n; ++i) fn(i);
      return;
    }
    {
      std::lock_guard lock(mu_);
      job_ = &fn;
      job_size_ = n;
      job_lanes_ = lanes;
      next_lane_ = 1;  // lane 0 runs on the calling thread
      pending_ = lanes - 1;
      ++generation_;
    }
    cv_.notify_all();
    run_lane(0);
    std::unique_lock lock(mu_);
    done_cv_.wait(lock, [this] { return pending_ == 0; });
    job_ = nullptr;
  }

 private:
  void run_lane(unsigned lane) {
    const std::size_t n = job_size_;
    const unsigned lanes = job_lanes_;
    const std::size_t chunk = (n + lanes - 1) / lanes;
    const std::size_t begin = static_cast<std::size_t>(lane) * chunk;
    const std::size_t end = begin + chunk < n ? begin + chunk : n;
    for (std::size_t i = begin; i < end; ++i) (*job_)(i);
  }

  void worker_loop() {
    std::uint64_t seen = 0;
    for (;;) {
      unsigned lane;
      {
        std::unique_lock lock(mu_);
        cv_.wait(lock, [&] { return stop_ || generation_ != seen; });
        if (stop_) return;
        seen = generation_;
        lane = next_lane_++;
      }
      run_lane(lane);
      {
        std::lock_guard lock(mu_);
        if (--pending_ == 0) done_cv_.notify_all();
      }
    }
  }

  std::vector<std::thread> workers_;
  std::mutex mu_;
  std::condition_variable cv_;
  std::condition_variable done_cv_;
  const std::function<void(std::size_t)>* job_ = nullptr;
  std::size_t job_size_ = 0;
  unsigned job_lanes_ = 1;
  unsigned next_lane_ = 1;
  unsigned pending_ = 0;
  std::uint64_t generation_ = 0;
  bool stop_ = false;
};

}  // namespace dmc
