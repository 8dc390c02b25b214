#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstddef>
#include <cstdint>
#include <iterator>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace central_approx {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

/// Natural log of a positive big integer (accurate to double precision).
double log_of(const BigInt& x);
/// Natural log of a positive big rational.
double log_of(const BigRational& x);
/// The exact binary value of a finite double.
BigRational exact_rational(double x);
BigInt factorial(std::int64_t k);

/// Ordered set of distinct finite reals.
class Alphabet {
 public:
  explicit Alphabet(std::vector<double> values);

  static Alphabet binary() { return Alphabet({0.0, 1.0}); }
  static Alphabet spins() { return Alphabet({1.0, -1.0}); }

  std::size_t size() const noexcept { return values_.size(); }
  double value(std::size_t i) const { return values_.at(i); }
  const std::vector<double>& values() const noexcept { return values_; }
  /// Position of `v`; throws ValidationError if absent.
  std::size_t index_of(double v) const;
  std::string label(std::size_t i) const;

 private:
  std::vector<double> values_;
};

/// Nonnegative weights summing to one (within 1e-12).
class ProbMeasure {
 public:
  explicit ProbMeasure(std::vector<double> weights);

  /// Normalizes nonnegative weights with positive total.
  static ProbMeasure normalized(std::vector<double> weights);
  /// exp(logits - max) normalized.
  static ProbMeasure from_logits(std::span<const double> logits);
  static ProbMeasure uniform(std::size_t n);

  std::size_t size() const noexcept { return weights_.size(); }
  double operator[](std::size_t i) const { return weights_[i]; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  double min() const noexcept;

 private:
  std::vector<double> weights_;
};

double sup_distance(const ProbMeasure& a, const ProbMeasure& b);

/// Nonnegative integer counts with a fixed total.
class TypeVector {
 public:
  explicit TypeVector(std::vector<std::int64_t> counts);

  std::int64_t total() const noexcept { return total_; }
  std::size_t cells() const noexcept { return counts_.size(); }
  std::int64_t operator[](std::size_t i) const { return counts_[i]; }
  const std::vector<std::int64_t>& counts() const noexcept { return counts_; }

 private:
  std::vector<std::int64_t> counts_;
  std::int64_t total_ = 0;
};

/// Streaming log-sum-exp.
class LogSumExp {
 public:
  void add(double log_term) noexcept;
  void merge(const LogSumExp& other) noexcept;
  double value() const noexcept;
  bool empty() const noexcept { return max_ == -std::numeric_limits<double>::infinity(); }

 private:
  double max_ = -std::numeric_limits<double>::infinity();
  double scaled_ = 0.0;
};

/// log k! for k = 0..n, via lgamma.
class LogFactorials {
 public:
  explicit LogFactorials(std::int64_t n);
  double operator()(std::int64_t k) const { return table_.at(static_cast<std::size_t>(k)); }

 private:
  std::vector<double> table_;
};

/// log N!/prod(counts!) by log-gamma.
double log_multinomial(const TypeVector& counts);
double log_multinomial(std::span<const std::int64_t> counts, const LogFactorials& lf);

inline constexpr std::int64_t kExactMultinomialLimit = 2000;
/// Exact N!/prod(counts!); rejects N > 2000.
BigInt multinomial_exact(const TypeVector& counts);
double log_multinomial_exact(const TypeVector& counts);

/// Shannon entropy in nats with 0 log 0 = 0.
double entropy(std::span<const double> p);
inline double entropy(const ProbMeasure& p) { return entropy(p.weights()); }

/// Log of the Gaussian local approximation of the multinomial coefficient
/// at counts N nu + sqrt(N) v:
///   log[sqrt(2 pi N) / prod sqrt(2 pi N nu)] + N H(nu)
///   - sqrt(N) sum v log nu - (1/2) sum v^2 / nu.
/// Requires nu > 0 everywhere and sum v = 0.
double local_approx_log_multinomial(const ProbMeasure& nu, std::span<const double> v,
                                    std::int64_t N);

struct EnumerationLimits {
  double max_types = 1e8;
};

/// C(N + cells - 1, cells - 1) as a double (inf on overflow).
double type_count(std::int64_t N, std::size_t cells);

/// All nonnegative integer vectors of length `cells` summing to N, in
/// ascending lexicographic order. Single-pass; the referenced vector is
/// overwritten on increment.
class TypeEnumeration {
 public:
  class iterator {
   public:
    using iterator_category = std::input_iterator_tag;
    using value_type = std::vector<std::int64_t>;
    using difference_type = std::ptrdiff_t;
    using pointer = const value_type*;
    using reference = const value_type&;

    iterator() = default;
    reference operator*() const { return counts_; }
    pointer operator->() const { return &counts_; }
    iterator& operator++();
    void operator++(int) { ++*this; }
    bool operator==(const iterator& o) const { return done_ == o.done_; }

   private:
    friend class TypeEnumeration;
    explicit iterator(std::int64_t N, std::size_t cells);
    std::vector<std::int64_t> counts_;
    bool done_ = true;
  };

  TypeEnumeration(std::int64_t N, std::size_t cells) : N_(N), cells_(cells) {}
  iterator begin() const { return iterator(N_, cells_); }
  iterator end() const { return iterator(); }

 private:
  std::int64_t N_;
  std::size_t cells_;
};

/// Validated enumeration; throws GuardError when the type count exceeds the limit.
TypeEnumeration enumerate_types(std::int64_t N, std::size_t cells,
                                const EnumerationLimits& limits = {});

}  // namespace central_approx
