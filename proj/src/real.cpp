#include "potlab/real.hpp"

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace potlab {

namespace {

thread_local unsigned g_bits = 128;

constexpr mpfr_rnd_t kRnd = MPFR_RNDN;

void init_current(mpfr_ptr v) { mpfr_init2(v, static_cast<mpfr_prec_t>(g_bits)); }

template <typename Fn>
Real unary(const Real& x, Fn fn) {
    Real r;
    fn(r.get(), x.get(), kRnd);
    return r;
}

}  // namespace

PrecisionContext::PrecisionContext(unsigned bits) : bits_(bits), previous_(g_bits) {
    if (bits < kMinBits) {
        throw std::invalid_argument("PrecisionContext: bits must be >= 64, got " + std::to_string(bits));
    }
    g_bits = bits;
}

PrecisionContext::~PrecisionContext() { g_bits = previous_; }

unsigned PrecisionContext::current() { return g_bits; }

Real::Real() {
    init_current(v_);
    mpfr_set_zero(v_, 1);
}

Real::Real(int v) : Real(static_cast<long>(v)) {}

Real::Real(long v) {
    init_current(v_);
    mpfr_set_si(v_, v, kRnd);
}

Real::Real(long long v) {
    init_current(v_);
    static_assert(sizeof(long long) == sizeof(long));
    mpfr_set_si(v_, static_cast<long>(v), kRnd);
}

Real::Real(unsigned long v) {
    init_current(v_);
    mpfr_set_ui(v_, v, kRnd);
}

Real::Real(double v) {
    init_current(v_);
    mpfr_set_d(v_, v, kRnd);
}

Real::Real(std::string_view decimal) {
    init_current(v_);
    const std::string s(decimal);
    if (mpfr_set_str(v_, s.c_str(), 10, kRnd) != 0) {
        mpfr_clear(v_);
        throw std::invalid_argument("Real: cannot parse '" + s + "'");
    }
}

Real::Real(const Real& other) {
    mpfr_init2(v_, mpfr_get_prec(other.v_));
    mpfr_set(v_, other.v_, kRnd);
}

Real::Real(Real&& other) noexcept {
    v_[0] = other.v_[0];
    other.v_[0]._mpfr_d = nullptr;
}

Real& Real::operator=(const Real& other) {
    if (this != &other) {
        if (v_[0]._mpfr_d == nullptr) {
            mpfr_init2(v_, mpfr_get_prec(other.v_));
        } else {
            mpfr_set_prec(v_, mpfr_get_prec(other.v_));
        }
        mpfr_set(v_, other.v_, kRnd);
    }
    return *this;
}

Real& Real::operator=(Real&& other) noexcept {
    std::swap(v_[0], other.v_[0]);
    return *this;
}

Real::~Real() {
    if (v_[0]._mpfr_d != nullptr) {
        mpfr_clear(v_);
    }
}

unsigned Real::bits() const { return static_cast<unsigned>(mpfr_get_prec(v_)); }

double Real::to_double() const { return mpfr_get_d(v_, kRnd); }

std::string Real::to_string(int digits) const {
    if (mpfr_nan_p(v_)) return "nan";
    if (mpfr_inf_p(v_)) return mpfr_sgn(v_) > 0 ? "inf" : "-inf";
    if (digits < 1) digits = 1;
    const int len = mpfr_snprintf(nullptr, 0, "%.*Re", digits - 1, v_);
    std::vector<char> buf(static_cast<size_t>(len) + 1);
    mpfr_snprintf(buf.data(), buf.size(), "%.*Re", digits - 1, v_);
    return {buf.data(), static_cast<size_t>(len)};
}

bool Real::is_zero() const { return mpfr_zero_p(v_) != 0; }
bool Real::is_finite() const { return mpfr_number_p(v_) != 0; }
bool Real::is_nan() const { return mpfr_nan_p(v_) != 0; }
int Real::sign() const { return mpfr_sgn(v_); }
long Real::exponent() const { return mpfr_get_exp(v_); }

Real Real::infinity(int sign) {
    Real r;
    mpfr_set_inf(r.v_, sign);
    return r;
}

Real Real::pi() {
    Real r;
    mpfr_const_pi(r.v_, kRnd);
    return r;
}

Real Real::ln2() {
    Real r;
    mpfr_const_log2(r.v_, kRnd);
    return r;
}

Real& Real::operator+=(const Real& o) {
    mpfr_add(v_, v_, o.v_, kRnd);
    return *this;
}
Real& Real::operator-=(const Real& o) {
    mpfr_sub(v_, v_, o.v_, kRnd);
    return *this;
}
Real& Real::operator*=(const Real& o) {
    mpfr_mul(v_, v_, o.v_, kRnd);
    return *this;
}
Real& Real::operator/=(const Real& o) {
    mpfr_div(v_, v_, o.v_, kRnd);
    return *this;
}

Real operator+(const Real& a, const Real& b) {
    Real r;
    mpfr_add(r.v_, a.v_, b.v_, kRnd);
    return r;
}
Real operator-(const Real& a, const Real& b) {
    Real r;
    mpfr_sub(r.v_, a.v_, b.v_, kRnd);
    return r;
}
Real operator*(const Real& a, const Real& b) {
    Real r;
    mpfr_mul(r.v_, a.v_, b.v_, kRnd);
    return r;
}
Real operator/(const Real& a, const Real& b) {
    Real r;
    mpfr_div(r.v_, a.v_, b.v_, kRnd);
    return r;
}
Real operator-(const Real& a) {
    Real r;
    mpfr_neg(r.v_, a.v_, kRnd);
    return r;
}

bool operator==(const Real& a, const Real& b) { return mpfr_equal_p(a.v_, b.v_) != 0; }

std::partial_ordering operator<=>(const Real& a, const Real& b) {
    if (mpfr_unordered_p(a.v_, b.v_)) return std::partial_ordering::unordered;
    const int c = mpfr_cmp(a.v_, b.v_);
    if (c < 0) return std::partial_ordering::less;
    if (c > 0) return std::partial_ordering::greater;
    return std::partial_ordering::equivalent;
}

Real abs(const Real& x) { return unary(x, mpfr_abs); }
Real sqrt(const Real& x) { return unary(x, mpfr_sqrt); }
Real log(const Real& x) { return unary(x, mpfr_log); }
Real log1p(const Real& x) { return unary(x, mpfr_log1p); }
Real log2(const Real& x) { return unary(x, mpfr_log2); }
Real exp(const Real& x) { return unary(x, mpfr_exp); }
Real sin(const Real& x) { return unary(x, mpfr_sin); }
Real cos(const Real& x) { return unary(x, mpfr_cos); }
Real asin(const Real& x) { return unary(x, mpfr_asin); }
Real acos(const Real& x) { return unary(x, mpfr_acos); }

Real atan2(const Real& y, const Real& x) {
    Real r;
    mpfr_atan2(r.get(), y.get(), x.get(), kRnd);
    return r;
}

Real hypot(const Real& x, const Real& y) {
    Real r;
    mpfr_hypot(r.get(), x.get(), y.get(), kRnd);
    return r;
}

Real pow(const Real& x, const Real& y) {
    Real r;
    mpfr_pow(r.get(), x.get(), y.get(), kRnd);
    return r;
}

Real pow(const Real& x, long n) {
    Real r;
    mpfr_pow_si(r.get(), x.get(), n, kRnd);
    return r;
}

Real ldexp(const Real& x, long e) {
    Real r;
    mpfr_mul_2si(r.get(), x.get(), e, kRnd);
    return r;
}

Real fmod(const Real& x, const Real& y) {
    Real r;
    mpfr_fmod(r.get(), x.get(), y.get(), kRnd);
    return r;
}

const Real& min(const Real& a, const Real& b) { return b < a ? b : a; }
const Real& max(const Real& a, const Real& b) { return a < b ? b : a; }

void CompensatedSum::add(const Real& term) {
    Real t = sum_ + term;
    if (abs(sum_) >= abs(term)) {
        carry_ += (sum_ - t) + term;
    } else {
        carry_ += (term - t) + sum_;
    }
    sum_ = std::move(t);
}

Complex& Complex::operator+=(const Complex& o) {
    re += o.re;
    im += o.im;
    return *this;
}

Complex& Complex::operator-=(const Complex& o) {
    re -= o.re;
    im -= o.im;
    return *this;
}

Complex& Complex::operator*=(const Complex& o) {
    *this = *this * o;
    return *this;
}

Complex operator+(const Complex& a, const Complex& b) { return {a.re + b.re, a.im + b.im}; }
Complex operator-(const Complex& a, const Complex& b) { return {a.re - b.re, a.im - b.im}; }
Complex operator*(const Complex& a, const Complex& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
Complex operator/(const Complex& a, const Complex& b) {
    // Smith's algorithm.
    if (abs(b.re) >= abs(b.im)) {
        const Real r = b.im / b.re;
        const Real d = b.re + r * b.im;
        return {(a.re + a.im * r) / d, (a.im - a.re * r) / d};
    }
    const Real r = b.re / b.im;
    const Real d = b.im + r * b.re;
    return {(a.re * r + a.im) / d, (a.im * r - a.re) / d};
}
Complex operator-(const Complex& a) { return {-a.re, -a.im}; }

Real abs(const Complex& z) { return hypot(z.re, z.im); }
Real norm(const Complex& z) { return z.re * z.re + z.im * z.im; }
Real log_abs(const Complex& z) { return log(abs(z)); }
Complex conj(const Complex& z) { return {z.re, -z.im}; }

Complex sqrt(const Complex& z) {
    if (z.re.is_zero() && z.im.is_zero()) return {Real(0), z.im};
    const Real t = sqrt((abs(z) + abs(z.re)) / Real(2));
    if (z.re.sign() >= 0) {
        return {t, z.im / (t * Real(2))};
    }
    Real im = t;
    if (z.im.sign() < 0 || (z.im.is_zero() && mpfr_signbit(z.im.get()))) im = -im;
    return {abs(z.im) / (t * Real(2)), im};
}

Complex pow(const Complex& z, long n) {
    if (n < 0) return Complex(Real(1)) / pow(z, -n);
    Complex result(Real(1), Real(0));
    Complex base = z;
    while (n > 0) {
        if (n & 1) result = result * base;
        n >>= 1;
        if (n > 0) base = base * base;
    }
    return result;
}

Complex polar(const Real& r, const Real& theta) { return {r * cos(theta), r * sin(theta)}; }

}  // namespace potlab
