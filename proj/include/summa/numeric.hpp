#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace summa {

using index_t = std::uint64_t;

template <typename I = std::int64_t>
struct rational {
    I num = 0;
    I den = 1;

    constexpr rational() = default;
    constexpr rational(I n) : num(n), den(1) {}
    constexpr rational(I n, I d) : num(n), den(d) { normalize(); }

    constexpr void normalize()
    {
        if (den == 0) throw std::domain_error("rational: zero denominator");
        if (den < 0) {
            num = -num;
            den = -den;
        }
        I g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
    }

    constexpr double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }

    friend constexpr rational operator+(rational a, rational b)
    {
        I g = std::gcd(a.den, b.den);
        return {a.num * (b.den / g) + b.num * (a.den / g), a.den / g * b.den};
    }
    friend constexpr rational operator-(rational a) { return {-a.num, a.den}; }
    friend constexpr rational operator-(rational a, rational b) { return a + (-b); }
    friend constexpr rational operator*(rational a, rational b)
    {
        I g1 = std::gcd(a.num < 0 ? -a.num : a.num, b.den);
        I g2 = std::gcd(b.num < 0 ? -b.num : b.num, a.den);
        if (g1 == 0) g1 = 1;
        if (g2 == 0) g2 = 1;
        return {(a.num / g1) * (b.num / g2), (a.den / g2) * (b.den / g1)};
    }
    friend constexpr rational operator/(rational a, rational b) { return a * rational(b.den, b.num); }
    rational& operator+=(rational b) { return *this = *this + b; }
    rational& operator-=(rational b) { return *this = *this - b; }
    rational& operator*=(rational b) { return *this = *this * b; }

    friend constexpr bool operator==(rational a, rational b) { return a.num == b.num && a.den == b.den; }
    friend constexpr bool operator<(rational a, rational b)
    {
        using W = __int128;
        return static_cast<W>(a.num) * b.den < static_cast<W>(b.num) * a.den;
    }
    friend constexpr bool operator<=(rational a, rational b) { return !(b < a); }
    friend constexpr bool operator>(rational a, rational b) { return b < a; }
    friend constexpr bool operator>=(rational a, rational b) { return !(a < b); }

    friend constexpr rational abs(rational a) { return {a.num < 0 ? -a.num : a.num, a.den}; }

    std::string str() const { return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den); }
    friend std::ostream& operator<<(std::ostream& os, const rational& r) { return os << r.str(); }
};

using q64 = rational<std::int64_t>;

// Neumaier variant of compensated summation.
class kahan {
public:
    void add(double x) noexcept
    {
        double t = sum_ + x;
        if (std::fabs(sum_) >= std::fabs(x))
            c_ += (sum_ - t) + x;
        else
            c_ += (x - t) + sum_;
        sum_ = t;
    }
    kahan& operator+=(double x) noexcept
    {
        add(x);
        return *this;
    }
    double value() const noexcept { return sum_ + c_; }

private:
    double sum_ = 0.0;
    double c_ = 0.0;
};

// Dense m x d block, row-major: (i, j) with i < rows (codomain), j < cols (domain).
struct Block {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> v;

    Block() = default;
    Block(std::size_t m, std::size_t d, double fill = 0.0) : rows(m), cols(d), v(m * d, fill) {}
    Block(std::size_t m, std::size_t d, std::vector<double> values) : rows(m), cols(d), v(std::move(values))
    {
        if (v.size() != m * d) throw std::invalid_argument("Block: size mismatch");
    }

    static Block identity(std::size_t n)
    {
        Block b(n, n);
        for (std::size_t i = 0; i < n; ++i) b(i, i) = 1.0;
        return b;
    }

    double& operator()(std::size_t i, std::size_t j) { return v[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return v[i * cols + j]; }

    std::vector<double> apply(const std::vector<double>& x) const
    {
        std::vector<double> y(rows, 0.0);
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < cols; ++j) y[i] += (*this)(i, j) * x[j];
        return y;
    }

    double abs_sum() const
    {
        kahan s;
        for (double a : v) s += std::fabs(a);
        return s.value();
    }

    bool is_zero() const
    {
        for (double a : v)
            if (a != 0.0) return false;
        return true;
    }

    friend bool operator==(const Block& a, const Block& b) = default;
};

inline double norm1(const std::vector<double>& x)
{
    kahan s;
    for (double a : x) s += std::fabs(a);
    return s.value();
}

inline double norm_inf(const std::vector<double>& x)
{
    double m = 0.0;
    for (double a : x) m = std::max(m, std::fabs(a));
    return m;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b)
{
    double m = 0.0;
    for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
    return m;
}

} // namespace summa
