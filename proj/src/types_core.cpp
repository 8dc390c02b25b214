#include "central_approx/types_core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>

#include "central_approx/error.hpp"

namespace central_approx {

double log_of(const BigInt& x) {
  if (x <= 0) throw ValidationError("log_of: non-positive big integer");
  const std::size_t bits = boost::multiprecision::msb(x) + 1;
  if (bits <= 60) return std::log(x.convert_to<double>());
  const std::size_t shift = bits - 60;
  const BigInt top = x >> shift;
  return std::log(top.convert_to<double>()) + static_cast<double>(shift) * std::numbers::ln2;
}

double log_of(const BigRational& x) {
  if (x <= 0) throw ValidationError("log_of: non-positive rational");
  return log_of(boost::multiprecision::numerator(x)) -
         log_of(boost::multiprecision::denominator(x));
}

BigRational exact_rational(double x) {
  if (!std::isfinite(x)) throw ValidationError("exact_rational: non-finite value");
  if (x == 0.0) return BigRational(0);
  int exponent = 0;
  const double mantissa = std::frexp(x, &exponent);  // x = mantissa * 2^exponent
  const auto scaled = static_cast<std::int64_t>(std::ldexp(mantissa, 53));
  exponent -= 53;
  BigRational r(scaled);
  if (exponent > 0) {
    r *= BigRational(BigInt(1) << exponent);
  } else if (exponent < 0) {
    r /= BigRational(BigInt(1) << (-exponent));
  }
  return r;
}

BigInt factorial(std::int64_t k) {
  if (k < 0) throw ValidationError("factorial of negative number");
  BigInt f = 1;
  for (std::int64_t i = 2; i <= k; ++i) f *= i;
  return f;
}

Alphabet::Alphabet(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw ValidationError("alphabet must be nonempty");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) throw ValidationError("alphabet values must be finite");
    for (std::size_t j = 0; j < i; ++j)
      if (values_[i] == values_[j]) throw ValidationError("alphabet values must be distinct");
  }
}

std::size_t Alphabet::index_of(double v) const {
  for (std::size_t i = 0; i < values_.size(); ++i)
    if (values_[i] == v) return i;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  throw ValidationError(std::string("symbol not in alphabet: ") + buf);
}

std::string Alphabet::label(std::size_t i) const {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%+g", value(i));
  return buf;
}

ProbMeasure::ProbMeasure(std::vector<double> weights) : weights_(std::move(weights)) {
  if (weights_.empty()) throw ValidationError("probability measure must be nonempty");
  double total = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w))
      throw ValidationError("probability weights must be finite and nonnegative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) throw ValidationError("probability weights must sum to 1");
}

ProbMeasure ProbMeasure::normalized(std::vector<double> weights) {
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w))
      throw ValidationError("weights must be finite and nonnegative");
    total += w;
  }
  if (!(total > 0.0)) throw ValidationError("weights must have positive total");
  for (double& w : weights) w /= total;
  return ProbMeasure(std::move(weights));
}

ProbMeasure ProbMeasure::from_logits(std::span<const double> logits) {
  const double mx = *std::max_element(logits.begin(), logits.end());
  std::vector<double> w(logits.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::exp(logits[i] - mx);
  return normalized(std::move(w));
}

ProbMeasure ProbMeasure::uniform(std::size_t n) {
  return ProbMeasure(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

double ProbMeasure::min() const noexcept {
  return *std::min_element(weights_.begin(), weights_.end());
}

double sup_distance(const ProbMeasure& a, const ProbMeasure& b) {
  if (a.size() != b.size()) throw ValidationError("sup_distance: size mismatch");
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

TypeVector::TypeVector(std::vector<std::int64_t> counts) : counts_(std::move(counts)) {
  if (counts_.empty()) throw ValidationError("type vector must have at least one cell");
  for (auto c : counts_) {
    if (c < 0) throw ValidationError("type counts must be nonnegative");
    total_ += c;
  }
}

void LogSumExp::add(double log_term) noexcept {
  if (log_term == -std::numeric_limits<double>::infinity()) return;
  if (log_term <= max_) {
    scaled_ += std::exp(log_term - max_);
  } else {
    scaled_ = scaled_ * std::exp(max_ - log_term) + 1.0;
    max_ = log_term;
  }
}

void LogSumExp::merge(const LogSumExp& other) noexcept {
  if (other.empty()) return;
  if (empty()) {
    *this = other;
    return;
  }
  if (other.max_ <= max_) {
    scaled_ += other.scaled_ * std::exp(other.max_ - max_);
  } else {
    scaled_ = scaled_ * std::exp(max_ - other.max_) + other.scaled_;
    max_ = other.max_;
  }
}

double LogSumExp::value() const noexcept {
  if (empty()) return -std::numeric_limits<double>::infinity();
  return max_ + std::log(scaled_);
}

LogFactorials::LogFactorials(std::int64_t n) : table_(static_cast<std::size_t>(n) + 1) {
  for (std::int64_t k = 0; k <= n; ++k)
    table_[static_cast<std::size_t>(k)] = std::lgamma(static_cast<double>(k) + 1.0);
}

double log_multinomial(std::span<const std::int64_t> counts, const LogFactorials& lf) {
  std::int64_t total = 0;
  double s = 0.0;
  for (auto c : counts) {
    total += c;
    s -= lf(c);
  }
  return s + lf(total);
}

double log_multinomial(const TypeVector& counts) {
  double s = std::lgamma(static_cast<double>(counts.total()) + 1.0);
  for (auto c : counts.counts()) s -= std::lgamma(static_cast<double>(c) + 1.0);
  return s;
}

BigInt multinomial_exact(const TypeVector& counts) {
  if (counts.total() > kExactMultinomialLimit)
    throw GuardError("exact multinomial limited to N <= 2000");
  // Product of binomials avoids dividing N! by a huge denominator.
  BigInt result = 1;
  std::int64_t running = 0;
  for (auto c : counts.counts()) {
    for (std::int64_t i = 1; i <= c; ++i) {
      result *= running + i;
      result /= i;
    }
    running += c;
  }
  return result;
}

double log_multinomial_exact(const TypeVector& counts) { return log_of(multinomial_exact(counts)); }

double entropy(std::span<const double> p) {
  double h = 0.0;
  for (double x : p)
    if (x > 0.0) h -= x * std::log(x);
  return h;
}

double local_approx_log_multinomial(const ProbMeasure& nu, std::span<const double> v,
                                    std::int64_t N) {
  if (v.size() != nu.size()) throw ValidationError("local approximation: size mismatch");
  if (N <= 0) throw ValidationError("local approximation: N must be positive");
  double vsum = 0.0;
  for (double x : v) vsum += x;
  if (std::abs(vsum) > 1e-12) throw ValidationError("local approximation: sum of v must be 0");
  const double n = static_cast<double>(N);
  const double two_pi = 2.0 * std::numbers::pi;
  double out = 0.5 * std::log(two_pi * n);
  for (std::size_t i = 0; i < nu.size(); ++i) {
    if (!(nu[i] > 0.0)) throw ValidationError("local approximation: nu must be strictly positive");
    out -= 0.5 * std::log(two_pi * n * nu[i]);
    out -= std::sqrt(n) * v[i] * std::log(nu[i]);
    out -= 0.5 * v[i] * v[i] / nu[i];
  }
  return out + n * entropy(nu);
}

double type_count(std::int64_t N, std::size_t cells) {
  if (N < 0 || cells == 0) return 0.0;
  double c = 1.0;
  const auto k = static_cast<std::int64_t>(cells) - 1;
  for (std::int64_t i = 1; i <= k; ++i) {
    c = c * static_cast<double>(N + i) / static_cast<double>(i);
    if (!std::isfinite(c)) return std::numeric_limits<double>::infinity();
  }
  return std::round(c);
}

TypeEnumeration::iterator::iterator(std::int64_t N, std::size_t cells)
    : counts_(cells, 0), done_(false) {
  counts_.back() = N;
}

TypeEnumeration::iterator& TypeEnumeration::iterator::operator++() {
  // Rightmost i < last with a positive suffix after it: bump it, and move
  // the remainder of the suffix to the last cell.
  const std::size_t last = counts_.size() - 1;
  std::int64_t suffix = counts_[last];
  for (std::size_t i = last; i-- > 0;) {
    if (suffix > 0) {
      ++counts_[i];
      for (std::size_t j = i + 1; j < last; ++j) counts_[j] = 0;
      counts_[last] = suffix - 1;
      return *this;
    }
    suffix += counts_[i];
  }
  done_ = true;
  return *this;
}

TypeEnumeration enumerate_types(std::int64_t N, std::size_t cells,
                                const EnumerationLimits& limits) {
  if (N < 0) throw ValidationError("enumerate_types: N must be nonnegative");
  if (cells == 0) throw ValidationError("enumerate_types: need at least one cell");
  const double count = type_count(N, cells);
  if (count > limits.max_types) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "type enumeration guard: %.4g types (N=%lld, cells=%zu) exceeds limit %.4g",
                  count, static_cast<long long>(N), cells, limits.max_types);
    throw GuardError(buf);
  }
  return TypeEnumeration(N, cells);
}

}  // namespace central_approx
