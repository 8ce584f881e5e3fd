#pragma once

// Arbitrary-precision real and complex scalars backed by MPFR.
//
// Every value owns its own precision. New values (constants, conversions,
// results of arithmetic) are created at the precision of the innermost
// PrecisionContext active on the calling thread, so a computation run under
// a fixed context is deterministic bit for bit.

#include <mpfr.h>

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace potlab {

/// Scoped binary precision for values created on this thread.
class PrecisionContext {
public:
    static constexpr unsigned kMinBits = 64;

    explicit PrecisionContext(unsigned bits);
    ~PrecisionContext();
    PrecisionContext(const PrecisionContext&) = delete;
    PrecisionContext& operator=(const PrecisionContext&) = delete;

    [[nodiscard]] unsigned bits() const { return bits_; }

    /// Precision currently in force on this thread (128 when no context is open).
    static unsigned current();

private:
    unsigned bits_;
    unsigned previous_;
};

class Real {
public:
    Real();
    Real(int v);
    Real(long v);
    Real(long long v);
    Real(unsigned long v);
    Real(double v);
    explicit Real(std::string_view decimal);

    Real(const Real& other);
    Real(Real&& other) noexcept;
    Real& operator=(const Real& other);
    Real& operator=(Real&& other) noexcept;
    ~Real();

    [[nodiscard]] unsigned bits() const;
    [[nodiscard]] double to_double() const;
    /// Decimal scientific notation with `digits` significant digits.
    [[nodiscard]] std::string to_string(int digits) const;

    [[nodiscard]] bool is_zero() const;
    [[nodiscard]] bool is_finite() const;
    [[nodiscard]] bool is_nan() const;
    [[nodiscard]] int sign() const;
    /// Binary exponent e with value = m * 2^e, 0.5 <= |m| < 1.
    [[nodiscard]] long exponent() const;

    static Real infinity(int sign = 1);
    static Real pi();
    static Real ln2();

    Real& operator+=(const Real& o);
    Real& operator-=(const Real& o);
    Real& operator*=(const Real& o);
    Real& operator/=(const Real& o);

    friend Real operator+(const Real& a, const Real& b);
    friend Real operator-(const Real& a, const Real& b);
    friend Real operator*(const Real& a, const Real& b);
    friend Real operator/(const Real& a, const Real& b);
    friend Real operator-(const Real& a);

    friend bool operator==(const Real& a, const Real& b);
    friend std::partial_ordering operator<=>(const Real& a, const Real& b);

    [[nodiscard]] mpfr_srcptr get() const { return v_; }
    [[nodiscard]] mpfr_ptr get() { return v_; }

private:
    mpfr_t v_;
};

Real abs(const Real& x);
Real sqrt(const Real& x);
Real log(const Real& x);
Real log1p(const Real& x);
Real log2(const Real& x);
Real exp(const Real& x);
Real sin(const Real& x);
Real cos(const Real& x);
Real asin(const Real& x);
Real acos(const Real& x);
Real atan2(const Real& y, const Real& x);
Real hypot(const Real& x, const Real& y);
Real pow(const Real& x, const Real& y);
Real pow(const Real& x, long n);
/// x * 2^e, exact.
Real ldexp(const Real& x, long e);
Real fmod(const Real& x, const Real& y);
const Real& min(const Real& a, const Real& b);
const Real& max(const Real& a, const Real& b);

/// Neumaier-compensated accumulator.
class CompensatedSum {
public:
    CompensatedSum() = default;
    void add(const Real& term);
    [[nodiscard]] Real value() const { return sum_ + carry_; }

private:
    Real sum_;
    Real carry_;
};

struct Complex {
    Real re;
    Real im;

    Complex() = default;
    Complex(Real r) : re(std::move(r)) {}
    Complex(Real r, Real i) : re(std::move(r)), im(std::move(i)) {}
    Complex(double r) : re(r) {}
    Complex(int r) : re(r) {}

    Complex& operator+=(const Complex& o);
    Complex& operator-=(const Complex& o);
    Complex& operator*=(const Complex& o);

    friend Complex operator+(const Complex& a, const Complex& b);
    friend Complex operator-(const Complex& a, const Complex& b);
    friend Complex operator*(const Complex& a, const Complex& b);
    friend Complex operator/(const Complex& a, const Complex& b);
    friend Complex operator-(const Complex& a);
};

Real abs(const Complex& z);
Real norm(const Complex& z);
/// log|z|; -inf at z = 0.
Real log_abs(const Complex& z);
Complex conj(const Complex& z);
/// Principal square root (branch cut on the negative real axis).
Complex sqrt(const Complex& z);
Complex pow(const Complex& z, long n);
Complex polar(const Real& r, const Real& theta);

}  // namespace potlab
