#pragma once

#include <array>
#include <cmath>
#include <complex>

namespace slab::detail {

/// Truncated bivariate Taylor series of total degree <= 6 with complex
/// coefficients. Seeding the two independent directions and evaluating a
/// closed-form expression yields all mixed partials at once, to roundoff.
/// Coefficient of e1^a e2^b lives at flat index (a+b)(a+b+1)/2 + b.
class Taylor2 {
public:
    static constexpr int kDeg = 6;
    static constexpr int kSize = (kDeg + 1) * (kDeg + 2) / 2;
    using C = std::complex<double>;

    Taylor2() { c_.fill(C(0.0)); }
    explicit Taylor2(C value) : Taylor2() { c_[0] = value; }

    static int idx(int a, int b) { return (a + b) * (a + b + 1) / 2 + b; }

    static Taylor2 var1(C x0) {
        Taylor2 t(x0);
        t.c_[idx(1, 0)] = 1.0;
        return t;
    }
    static Taylor2 var2(C x0) {
        Taylor2 t(x0);
        t.c_[idx(0, 1)] = 1.0;
        return t;
    }
    /// seed depending on both directions: x0 + s1*e1 + s2*e2
    static Taylor2 linear(C x0, C s1, C s2) {
        Taylor2 t(x0);
        t.c_[idx(1, 0)] = s1;
        t.c_[idx(0, 1)] = s2;
        return t;
    }

    C coeff(int a, int b) const { return c_[static_cast<size_t>(idx(a, b))]; }
    /// mixed partial d^{a+b} f / de1^a de2^b
    C deriv(int a, int b) const {
        static const double fact[] = {1, 1, 2, 6, 24, 120, 720};
        return coeff(a, b) * (fact[a] * fact[b]);
    }

    Taylor2 operator+(const Taylor2& o) const {
        Taylor2 r;
        for (int i = 0; i < kSize; ++i) r.c_[static_cast<size_t>(i)] =
            c_[static_cast<size_t>(i)] + o.c_[static_cast<size_t>(i)];
        return r;
    }
    Taylor2 operator-(const Taylor2& o) const {
        Taylor2 r;
        for (int i = 0; i < kSize; ++i) r.c_[static_cast<size_t>(i)] =
            c_[static_cast<size_t>(i)] - o.c_[static_cast<size_t>(i)];
        return r;
    }
    Taylor2 operator*(C s) const {
        Taylor2 r;
        for (int i = 0; i < kSize; ++i) r.c_[static_cast<size_t>(i)] =
            c_[static_cast<size_t>(i)] * s;
        return r;
    }
    friend Taylor2 operator*(C s, const Taylor2& t) { return t * s; }

    Taylor2 operator*(const Taylor2& o) const {
        Taylor2 r;
        for (int a1 = 0; a1 <= kDeg; ++a1)
            for (int b1 = 0; a1 + b1 <= kDeg; ++b1) {
                const C v1 = coeff(a1, b1);
                if (v1 == 0.0) continue;
                for (int a2 = 0; a1 + a2 + b1 <= kDeg; ++a2)
                    for (int b2 = 0; a1 + a2 + b1 + b2 <= kDeg; ++b2) {
                        const C v2 = o.coeff(a2, b2);
                        if (v2 == 0.0) continue;
                        r.c_[static_cast<size_t>(idx(a1 + a2, b1 + b2))] += v1 * v2;
                    }
            }
        return r;
    }

    /// compose an analytic f with this series, given f^{(k)}(c00) for k<=6
    Taylor2 compose(const std::array<C, kDeg + 1>& df) const {
        static const double fact[] = {1, 1, 2, 6, 24, 120, 720};
        Taylor2 du = *this;
        du.c_[0] = 0.0;
        Taylor2 r(df[kDeg] / fact[kDeg]);
        for (int k = kDeg - 1; k >= 0; --k) {
            r = r * du;
            r.c_[0] += df[static_cast<size_t>(k)] / fact[static_cast<size_t>(k)];
        }
        return r;
    }

private:
    std::array<C, kSize> c_{};
};

inline Taylor2 texp(const Taylor2& u) {
    using C = Taylor2::C;
    std::array<C, 7> df;
    df.fill(std::exp(u.coeff(0, 0)));
    return u.compose(df);
}

inline Taylor2 tsin(const Taylor2& u) {
    using C = Taylor2::C;
    const C s = std::sin(u.coeff(0, 0)), c = std::cos(u.coeff(0, 0));
    std::array<C, 7> df = {s, c, -s, -c, s, c, -s};
    return u.compose(df);
}

inline Taylor2 tcos(const Taylor2& u) {
    using C = Taylor2::C;
    const C s = std::sin(u.coeff(0, 0)), c = std::cos(u.coeff(0, 0));
    std::array<C, 7> df = {c, -s, -c, s, c, -s, -c};
    return u.compose(df);
}

inline Taylor2 tcosh(const Taylor2& u) {
    using C = Taylor2::C;
    const C ch = std::cosh(u.coeff(0, 0)), sh = std::sinh(u.coeff(0, 0));
    std::array<C, 7> df = {ch, sh, ch, sh, ch, sh, ch};
    return u.compose(df);
}

inline Taylor2 trecip(const Taylor2& u) {
    using C = Taylor2::C;
    const C u0 = u.coeff(0, 0);
    std::array<C, 7> df;
    C p = 1.0 / u0;
    double sign = 1.0, fact = 1.0;
    for (int k = 0; k <= 6; ++k) {
        df[static_cast<size_t>(k)] = sign * fact * p;
        p /= u0;
        sign = -sign;
        fact *= (k + 1);
    }
    return u.compose(df);
}

/// atan'(z) = 1/(1+z^2); higher derivatives from the partial fractions
/// 1/(1+z^2) = (1/2i)[1/(z-i) - 1/(z+i)].
inline Taylor2 tatan(const Taylor2& u) {
    using C = Taylor2::C;
    const C z0 = u.coeff(0, 0);
    const C i(0.0, 1.0);
    std::array<C, 7> df;
    df[0] = std::atan(z0);
    C pm = 1.0 / (z0 - i), pp = 1.0 / (z0 + i);
    double fact = 1.0, sign = 1.0;
    for (int k = 1; k <= 6; ++k) {
        df[static_cast<size_t>(k)] = sign * fact * (pm - pp) / (2.0 * i);
        pm /= (z0 - i);
        pp /= (z0 + i);
        sign = -sign;
        fact *= k;
    }
    return u.compose(df);
}

}  // namespace slab::detail
