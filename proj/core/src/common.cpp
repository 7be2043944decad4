#include "hibarrier/common.hpp"

#include <algorithm>
#include <atomic>
#include <sstream>
#include <thread>

namespace hibarrier {

std::uint64_t split_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

Vec random_unit(Rng& rng, int n) {
    std::normal_distribution<double> g(0.0, 1.0);
    Vec v(n);
    do {
        for (int i = 0; i < n; ++i) v[i] = g(rng);
    } while (v.norm() < 1e-12);
    return v / v.norm();
}

Vec Box::uniform(Rng& rng) const {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Vec x(dim());
    for (int i = 0; i < dim(); ++i) x[i] = lo[i] + (hi[i] - lo[i]) * u(rng);
    return x;
}

double Box::radius() const {
    double s = 0.0;
    for (int i = 0; i < dim(); ++i) {
        const double m = std::max(std::abs(lo[i]), std::abs(hi[i]));
        s += m * m;
    }
    return std::sqrt(s);
}

std::string format_vec(const Vec& v) {
    std::ostringstream os;
    os.precision(17);
    os << '(';
    for (int i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
    os << ')';
    return os.str();
}

void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& body) {
    const std::size_t w = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(workers, 1)));
    if (w <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    {
        std::vector<std::jthread> pool;
        pool.reserve(w);
        for (std::size_t t = 0; t < w; ++t) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < count; i = next++) {
                    try {
                        body(i);
                    } catch (...) {
                        if (!failed.exchange(true)) failure = std::current_exception();
                    }
                }
            });
        }
    }
    if (failure) std::rethrow_exception(failure);
}

}  // namespace hibarrier
