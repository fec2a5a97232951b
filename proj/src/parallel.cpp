#include "ergodix/parallel.hpp"

#include <atomic>
#include <cmath>

namespace ergodix {

namespace {
std::atomic<unsigned> g_threads{1};

struct Neumaier {
  double sum = 0.0;
  double carry = 0.0;
  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      carry += (sum - t) + x;
    } else {
      carry += (x - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + carry; }
};
}  // namespace

void set_thread_count(unsigned threads) { g_threads = threads == 0 ? 1 : threads; }

unsigned thread_count() { return g_threads; }

double ordered_sum(std::span<const double> values) {
  Neumaier acc;
  for (double v : values) acc.add(v);
  return acc.value();
}

std::complex<double> ordered_sum(std::span<const std::complex<double>> values) {
  Neumaier re;
  Neumaier im;
  for (const auto& v : values) {
    re.add(v.real());
    im.add(v.imag());
  }
  return {re.value(), im.value()};
}

}  // namespace ergodix
