#pragma once

#include <barrier>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace graphtv {

/*
 * Fixed set of worker threads that execute one job at a time. run() blocks
 * until every worker has finished, so consecutive jobs are separated by a
 * full barrier. The calling thread acts as worker 0.
 */
class WorkerTeam {
public:
    explicit WorkerTeam(unsigned workers)
        : size_(workers == 0 ? 1 : workers), start_(size_), done_(size_)
    {
        threads_.reserve(size_ - 1);
        for (unsigned w = 1; w < size_; ++w) {
            threads_.emplace_back([this, w] { loop(w); });
        }
    }

    WorkerTeam(const WorkerTeam&) = delete;
    WorkerTeam& operator=(const WorkerTeam&) = delete;

    ~WorkerTeam()
    {
        if (threads_.empty()) return;
        stop_ = true;
        start_.arrive_and_wait();
        for (auto& th : threads_) th.join();
    }

    unsigned size() const { return size_; }

    /// Calls job(worker, size()) once on every worker and waits for all.
    void run(const std::function<void(unsigned, unsigned)>& job)
    {
        if (threads_.empty()) {
            job(0, 1);
            return;
        }
        job_ = &job;
        start_.arrive_and_wait();
        job(0, size_);
        done_.arrive_and_wait();
        job_ = nullptr;
    }

    /// Half-open slice of [0, n) owned by `worker` out of `workers`.
    static std::pair<std::size_t, std::size_t> slice(std::size_t n, unsigned worker, unsigned workers)
    {
        return {n * worker / workers, n * (worker + 1) / workers};
    }

private:
    void loop(unsigned w)
    {
        for (;;) {
            start_.arrive_and_wait();
            if (stop_) return;
            (*job_)(w, size_);
            done_.arrive_and_wait();
        }
    }

    unsigned size_;
    std::barrier<> start_;
    std::barrier<> done_;
    // Written by the caller before start_ and read by workers after it.
    const std::function<void(unsigned, unsigned)>* job_ = nullptr;
    bool stop_ = false;
    std::vector<std::thread> threads_;
};

} // namespace graphtv
