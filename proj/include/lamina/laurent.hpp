#pragma once
// Sparse Laurent polynomials in x_1..x_n (integer exponents) and
// y_1..y_n (non-negative exponents) with arbitrary-precision integer
// coefficients.  Monomial order: lexicographic on the concatenated
// exponent vector (x-exponents, then y-exponents); the lead term is the
// lexicographically largest.

#include <gmpxx.h>

#include <map>
#include <string>
#include <vector>

#include "lamina/common.hpp"

namespace lamina {

// Branch guard for the Laurent engine (polynomials larger than this abort
// the computation rather than exhausting memory).
inline constexpr std::size_t kMaxMonomials = 200000;

class LaurentPoly {
 public:
  using Exp = std::vector<int>;  // length 2n: x-exponents ++ y-exponents

  LaurentPoly() = default;
  explicit LaurentPoly(int n) : n_(n) {}

  static LaurentPoly constant(int n, const mpz_class& c) {
    LaurentPoly p(n);
    if (c != 0) p.terms_[Exp(2 * n, 0)] = c;
    return p;
  }
  static LaurentPoly x(int n, int i) {
    LaurentPoly p(n);
    Exp e(2 * n, 0);
    e[i] = 1;
    p.terms_[e] = 1;
    return p;
  }
  static LaurentPoly y(int n, int j) {
    LaurentPoly p(n);
    Exp e(2 * n, 0);
    e[n + j] = 1;
    p.terms_[e] = 1;
    return p;
  }
  static LaurentPoly monomial(int n, const Exp& e, const mpz_class& c) {
    LaurentPoly p(n);
    require(static_cast<int>(e.size()) == 2 * n, errc::DimensionMismatch,
            "monomial exponent length");
    if (c != 0) p.terms_[e] = c;
    return p;
  }

  int nvars() const { return n_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t n_terms() const { return terms_.size(); }
  const std::map<Exp, mpz_class>& terms() const { return terms_; }

  bool operator==(const LaurentPoly& o) const {
    return n_ == o.n_ && terms_ == o.terms_;
  }

  LaurentPoly& operator+=(const LaurentPoly& o) {
    check_n(o);
    for (const auto& [e, c] : o.terms_) {
      auto it = terms_.find(e);
      if (it == terms_.end()) {
        terms_.emplace(e, c);
      } else {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
      }
    }
    return *this;
  }
  friend LaurentPoly operator+(LaurentPoly a, const LaurentPoly& b) {
    a += b;
    return a;
  }

  LaurentPoly operator-() const {
    LaurentPoly r = *this;
    for (auto& [e, c] : r.terms_) c = -c;
    return r;
  }
  LaurentPoly& operator-=(const LaurentPoly& o) { return *this += -o; }
  friend LaurentPoly operator-(LaurentPoly a, const LaurentPoly& b) {
    a -= b;
    return a;
  }

  friend LaurentPoly operator*(const LaurentPoly& a, const LaurentPoly& b) {
    a.check_n(b);
    LaurentPoly r(a.n_);
    for (const auto& [ea, ca] : a.terms_)
      for (const auto& [eb, cb] : b.terms_) {
        Exp e(ea.size());
        for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
        auto it = r.terms_.find(e);
        if (it == r.terms_.end()) {
          r.terms_.emplace(std::move(e), ca * cb);
        } else {
          it->second += ca * cb;
          if (it->second == 0) r.terms_.erase(it);
        }
        require(r.terms_.size() <= kMaxMonomials, errc::SizeGuardExceeded,
                "polynomial exceeds " + std::to_string(kMaxMonomials) +
                    " monomials");
      }
    return r;
  }
  LaurentPoly& operator*=(const LaurentPoly& o) { return *this = *this * o; }

  LaurentPoly pow(int k) const {
    require(k >= 0, errc::DimensionMismatch, "negative power");
    LaurentPoly r = constant(n_, 1);
    for (int i = 0; i < k; ++i) r *= *this;
    return r;
  }

  // Lead term = lexicographically largest exponent.
  std::pair<Exp, mpz_class> lead() const {
    require(!terms_.empty(), errc::DimensionMismatch, "lead of zero");
    auto it = std::prev(terms_.end());
    return {it->first, it->second};
  }

  // Exact division (the quotient must again be a valid Laurent polynomial
  // in x with polynomial y-part).  Throws InexactDivision otherwise.
  friend LaurentPoly divide_exact(LaurentPoly num, const LaurentPoly& den) {
    num.check_n(den);
    require(!den.is_zero(), errc::InexactDivision, "division by zero");
    LaurentPoly q(num.n_);
    const auto [de, dc] = den.lead();
    std::size_t steps = 0;
    while (!num.is_zero()) {
      require(++steps <= kMaxMonomials, errc::InexactDivision,
              "division does not terminate");
      const auto [ne, nc] = num.lead();
      Exp e(ne.size());
      for (std::size_t i = 0; i < e.size(); ++i) e[i] = ne[i] - de[i];
      for (int j = num.n_; j < 2 * num.n_; ++j)
        require(e[j] >= 0, errc::InexactDivision,
                "quotient has negative coefficient-variable exponent");
      require(mpz_divisible_p(nc.get_mpz_t(), dc.get_mpz_t()),
              errc::InexactDivision, "coefficient not divisible");
      LaurentPoly m = monomial(num.n_, e, nc / dc);
      q += m;
      num -= m * den;
    }
    return q;
  }

  // Canonical rendering: terms in descending lexicographic order,
  // "c*x1^a1*...*y1^b1*..." with unit coefficients and zero exponents
  // elided.
  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::string out;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
      const auto& [e, c] = *it;
      std::string t;
      mpz_class a = c;
      if (!out.empty()) {
        out += (a < 0) ? " - " : " + ";
        if (a < 0) a = -a;
      } else if (a < 0) {
        out += "-";
        a = -a;
      }
      std::vector<std::string> factors;
      if (a != 1) factors.push_back(a.get_str());
      for (int i = 0; i < 2 * n_; ++i) {
        if (e[i] == 0) continue;
        std::string v = (i < n_) ? "x" + std::to_string(i + 1)
                                 : "y" + std::to_string(i - n_ + 1);
        if (e[i] != 1) v += "^" + std::to_string(e[i]);
        factors.push_back(v);
      }
      if (factors.empty()) factors.push_back("1");
      out += join(factors, "*");
    }
    return out;
  }

 private:
  void check_n(const LaurentPoly& o) const {
    require(n_ == o.n_, errc::DimensionMismatch, "mixed variable counts");
  }
  int n_ = 0;
  std::map<Exp, mpz_class> terms_;
};

}  // namespace lamina
