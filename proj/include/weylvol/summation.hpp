// Compensated summation and a deterministic fork-join helper.
#pragma once

#include <atomic>
#include <cmath>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace weylvol {

/// Neumaier's variant of Kahan summation: tracks a running compensation so
/// the result is far more accurate than naive accumulation and, crucially,
/// a fixed addend order gives bit-identical results on every run.
class NeumaierSum {
public:
    void add(double x) {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }

    /// Merge a partial sum produced by another NeumaierSum. Merging partials
    /// in a fixed order keeps the grand total reproducible.
    void merge(const NeumaierSum& other) {
        add(other.sum_);
        comp_ += other.comp_;
    }

    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// Runs fn(0..count-1) on up to `threads` workers. Work items are claimed
/// dynamically but each item's index is fixed, so callers that store
/// per-index results and reduce them in index order are deterministic
/// regardless of thread count or scheduling.
inline void run_indexed_tasks(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn) {
    if (count == 0) return;
    if (threads <= 1 || count == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            fn(i);
        }
    };
    unsigned n = threads < count ? threads : unsigned(count);
    std::vector<std::thread> pool;
    pool.reserve(n - 1);
    for (unsigned i = 0; i + 1 < n; ++i) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
}

}  // namespace weylvol
