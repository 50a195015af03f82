#include "lacunary/arithmetic.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <numeric>
#include <queue>

namespace lacunary {

namespace {

i64 mod_pos(i64 a, i64 m) {
    i64 r = a % m;
    return r < 0 ? r + m : r;
}

i64 binomial_small(i64 n, i64 k) {
    if (k < 0 || k > n) return 0;
    i64 r = 1;
    for (i64 i = 1; i <= k; ++i) r = checked_mul(r, n - k + i) / i;
    return r;
}

int jacobi(i64 a, i64 n) {
    // n odd positive
    a = mod_pos(a, n);
    int t = 1;
    while (a != 0) {
        while ((a & 1) == 0) {
            a >>= 1;
            i64 r = n & 7;
            if (r == 3 || r == 5) t = -t;
        }
        std::swap(a, n);
        if ((a & 3) == 3 && (n & 3) == 3) t = -t;
        a %= n;
    }
    return n == 1 ? t : 0;
}

// Builds a multiplicative table from its values on prime powers.
template <class T, class F>
std::vector<T> multiplicative_table(i64 bound, F&& local) {
    std::vector<T> out(static_cast<std::size_t>(bound + 1), T{});
    if (bound >= 1) out[1] = T{1};
    auto spf = smallest_prime_factor_table(bound);
    for (i64 n = 2; n <= bound; ++n) {
        const i64 p = spf[n];
        i64 m = n;
        int a = 0;
        while (m % p == 0) {
            m /= p;
            ++a;
        }
        out[n] = out[m] * local(p, a);
    }
    return out;
}

}  // namespace

bool is_squarefree(i64 n) {
    if (n == 0) return false;
    n = std::abs(n);
    for (i64 p = 2; p * p <= n; ++p) {
        if (n % p == 0) {
            n /= p;
            if (n % p == 0) return false;
        }
    }
    return true;
}

bool is_fundamental_discriminant(i64 D) {
    if (D == 0 || D == 1) return false;
    if (mod_pos(D, 4) == 1) return is_squarefree(D);
    if (mod_pos(D, 4) != 0) return false;
    const i64 m = D / 4;
    const i64 r = mod_pos(m, 4);
    return (r == 2 || r == 3) && is_squarefree(m);
}

Discriminant Discriminant::make(i64 D) {
    if (!is_fundamental_discriminant(D))
        throw DomainError("not a fundamental discriminant: " + std::to_string(D));
    Discriminant d;
    d.D = D;
    d.absD = std::abs(D);
    d.Q = std::sqrt(static_cast<double>(d.absD)) / (2.0 * kPi);
    d.sign = D < 0 ? -1 : 1;
    return d;
}

int kronecker(i64 D, i64 n) {
    if (D == 0) throw DomainError("kronecker symbol requires D != 0");
    if (n == 0) return (D == 1 || D == -1) ? 1 : 0;
    int t = 1;
    if (n < 0) {
        n = -n;
        if (D < 0) t = -t;
    }
    while ((n & 1) == 0) {
        n >>= 1;
        if ((D & 1) == 0) return 0;
        const i64 r = mod_pos(D, 8);
        if (r == 3 || r == 5) t = -t;
    }
    return t * jacobi(D, n);
}

Character::Character(i64 D) : D_(D), mod_(std::abs(D)) {
    if (D == 0) throw DomainError("character requires D != 0");
    table_.resize(static_cast<std::size_t>(mod_));
    for (i64 n = 0; n < mod_; ++n) table_[n] = static_cast<signed char>(kronecker(D, n));
}

std::vector<std::pair<i64, int>> factorize(i64 n) {
    std::vector<std::pair<i64, int>> f;
    n = std::abs(n);
    for (i64 p = 2; p * p <= n; ++p) {
        if (n % p) continue;
        int a = 0;
        while (n % p == 0) {
            n /= p;
            ++a;
        }
        f.emplace_back(p, a);
    }
    if (n > 1) f.emplace_back(n, 1);
    return f;
}

std::vector<i64> divisors(i64 n) {
    std::vector<i64> d{1};
    for (auto [p, a] : factorize(n)) {
        const std::size_t s = d.size();
        i64 pk = 1;
        for (int k = 1; k <= a; ++k) {
            pk *= p;
            for (std::size_t i = 0; i < s; ++i) d.push_back(d[i] * pk);
        }
    }
    std::sort(d.begin(), d.end());
    return d;
}

std::vector<i64> primes_up_to(i64 n) {
    std::vector<i64> ps;
    if (n < 2) return ps;
    std::vector<bool> comp(static_cast<std::size_t>(n + 1), false);
    for (i64 p = 2; p <= n; ++p) {
        if (comp[p]) continue;
        ps.push_back(p);
        for (i64 k = p * p; k <= n; k += p) comp[k] = true;
    }
    return ps;
}

int mobius(i64 n) {
    int m = 1;
    for (auto [p, a] : factorize(n)) {
        if (a > 1) return 0;
        m = -m;
    }
    return m;
}

i64 tau(i64 n) { return tau_r(n, 2); }

i64 tau_r(i64 n, int r) {
    if (r < 1) throw DomainError("tau_r requires r >= 1");
    i64 t = 1;
    for (auto [p, a] : factorize(n)) t = checked_mul(t, binomial_small(a + r - 1, r - 1));
    return t;
}

i64 sigma(i64 n) {
    i64 s = 1;
    for (auto [p, a] : factorize(n)) {
        i64 term = 1, pk = 1;
        for (int k = 1; k <= a; ++k) {
            pk *= p;
            term += pk;
        }
        s = checked_mul(s, term);
    }
    return s;
}

i64 euler_phi(i64 n) {
    n = std::abs(n);
    i64 r = n;
    for (auto [p, a] : factorize(n)) r = r / p * (p - 1);
    return r;
}

int omega(i64 n) { return static_cast<int>(factorize(n).size()); }

bool is_cubefree(i64 n) {
    for (auto [p, a] : factorize(n))
        if (a >= 3) return false;
    return n != 0;
}

std::vector<std::int32_t> smallest_prime_factor_table(i64 n) {
    if (n > (i64{1} << 31) - 1) throw CapacityError("sieve bound exceeds 32-bit index range");
    std::vector<std::int32_t> spf(static_cast<std::size_t>(std::max<i64>(n + 1, 2)), 0);
    for (i64 i = 2; i <= n; ++i) {
        if (spf[i]) continue;
        for (i64 k = i; k <= n; k += i)
            if (!spf[k]) spf[k] = static_cast<std::int32_t>(i);
    }
    return spf;
}

std::vector<int> mobius_table(i64 n) {
    return multiplicative_table<int>(n, [](i64, int a) { return a == 1 ? -1 : 0; });
}

std::vector<i64> tau_r_table(i64 n, int r) {
    if (r < 1) throw DomainError("tau_r requires r >= 1");
    return multiplicative_table<i64>(n, [r](i64, int a) { return binomial_small(a + r - 1, r - 1); });
}

i64 ramanujan_sum(i64 h, i64 c) {
    if (h < 1 || c < 1) throw DomainError("ramanujan_sum requires h, c >= 1");
    const i64 g = std::gcd(h, c);
    i64 s = 0;
    for (i64 d : divisors(g)) s += d * mobius(c / d);
    return s;
}

cplx gauss_ramanujan(i64 h, i64 c, const Discriminant& disc) {
    if (c < 1 || h < 0) throw DomainError("gauss_ramanujan requires c >= 1, h >= 0");
    if (c % disc.absD != 0) throw DomainError("gauss_ramanujan requires |D| | c");
    Character chi(disc.D);
    KahanSum<double> re, im;
    for (i64 a = 1; a <= c; ++a) {
        if (std::gcd(a, c) != 1) continue;
        const int x = chi(a);
        if (x == 0) continue;
        const double ang = 2.0 * kPi * static_cast<double>(mod_pos(a * (h % c), c)) / c;
        re += x * std::cos(ang);
        im += x * std::sin(ang);
    }
    return {re.value(), im.value()};
}

cplx gauss_sum(const Discriminant& disc) { return gauss_ramanujan(1, disc.absD, disc); }

// ---------------------------------------------------------------------------
// Binary quadratic forms

Form reduce_form(Form f) {
    using i128 = __int128;
    const i128 D = static_cast<i128>(f.b) * f.b - static_cast<i128>(4) * f.a * f.c;
    for (;;) {
        if (f.b > f.a || f.b <= -f.a) {
            // shift b into (-a, a]
            f.b = mod_pos(f.b + f.a - 1, 2 * f.a) - (f.a - 1);
            f.c = static_cast<i64>((static_cast<i128>(f.b) * f.b - D) / (4 * static_cast<i128>(f.a)));
        }
        if (f.a > f.c) {
            std::swap(f.a, f.c);
            f.b = -f.b;
            continue;
        }
        if (f.a == f.c && f.b < 0) f.b = -f.b;
        return f;
    }
}

std::vector<Form> reduced_forms(i64 D) {
    if (D >= 0) throw DomainError("reduced forms are provided for D < 0 only");
    std::vector<Form> out;
    const i64 absD = -D;
    for (i64 a = 1; 3 * a * a <= absD; ++a) {
        for (i64 b = -a + 1; b <= a; ++b) {
            if (mod_pos(b - D, 2) != 0) continue;
            const i64 num = b * b - D;
            if (num % (4 * a) != 0) continue;
            const i64 c = num / (4 * a);
            if (c < a) continue;
            if (a == c && b < 0) continue;
            if (std::gcd(std::gcd(a, std::abs(b)), c) != 1) continue;
            out.push_back({a, b, c});
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

i64 eval_form(const Form& f, i64 x, i64 y) { return f.a * x * x + f.b * x * y + f.c * y * y; }

// Extended gcd: returns g and sets u, v with a u + b v = g.
i64 ext_gcd(i64 a, i64 b, i64& u, i64& v) {
    if (b == 0) {
        u = a >= 0 ? 1 : -1;
        v = 0;
        return std::abs(a);
    }
    i64 u1, v1;
    const i64 g = ext_gcd(b, a % b, u1, v1);
    u = v1;
    v = u1 - (a / b) * v1;
    return g;
}

// An equivalent form whose first coefficient is coprime to m.
Form coprime_representative(const Form& g, i64 m) {
    if (std::gcd(g.a, m) == 1) return g;
    for (i64 bound = 1;; ++bound) {
        for (i64 x = -bound; x <= bound; ++x) {
            for (i64 y = -bound; y <= bound; ++y) {
                if (std::max(std::abs(x), std::abs(y)) != bound) continue;
                if (std::gcd(x, y) != 1) continue;
                const i64 val = eval_form(g, x, y);
                if (std::gcd(val, m) != 1) continue;
                // x s - y r = 1
                i64 s, negr;
                ext_gcd(x, y, s, negr);
                const i64 r = -negr;
                Form t;
                t.a = val;
                t.b = 2 * g.a * x * r + g.b * (x * s + r * y) + 2 * g.c * y * s;
                t.c = eval_form(g, r, s);
                return t;
            }
        }
    }
}

}  // namespace

Form compose_forms(const Form& f, const Form& g0, i64 D) {
    const Form g = coprime_representative(g0, f.a);
    const i64 A = checked_mul(f.a, g.a);
    const i64 twoA = 2 * A;
    for (i64 B = 0; B < twoA; ++B) {
        if (mod_pos(B - f.b, 2 * f.a) != 0) continue;
        if (mod_pos(B - g.b, 2 * g.a) != 0) continue;
        const i64 num = checked_mul(B, B) - D;
        if (num % (4 * A) != 0) continue;
        return reduce_form({A, B, num / (4 * A)});
    }
    throw NumericalError("form composition found no admissible middle coefficient");
}

ClassGroup::ClassGroup(i64 D) : D_(D) {
    if (!is_fundamental_discriminant(D) || D > 0)
        throw DomainError("class group requires a negative fundamental discriminant");
    forms_ = reduced_forms(D);
    const int h = order();
    table_.assign(h, std::vector<int>(h, 0));
    for (int i = 0; i < h; ++i)
        for (int j = 0; j < h; ++j) table_[i][j] = index_of(compose_forms(forms_[i], forms_[j], D));

    // Greedy generators: add any element outside the current subgroup.
    std::vector<bool> in_sub(h, false);
    in_sub[0] = true;
    for (int cand = 1; cand < h; ++cand) {
        if (in_sub[cand]) continue;
        gens_.push_back(cand);
        gen_orders_.push_back(element_order(cand));
        std::queue<int> q;
        for (int i = 0; i < h; ++i)
            if (in_sub[i]) q.push(i);
        while (!q.empty()) {
            const int x = q.front();
            q.pop();
            for (int g : gens_) {
                const int y = table_[x][g];
                if (!in_sub[y]) {
                    in_sub[y] = true;
                    q.push(y);
                }
            }
        }
    }

    // Enumerate generator value assignments and keep those defining homomorphisms.
    const std::size_t ng = gens_.size();
    std::vector<int> k(ng, 0);
    for (;;) {
        std::vector<cplx> val(h);
        std::vector<bool> set(h, false);
        val[0] = 1.0;
        set[0] = true;
        bool ok = true;
        std::queue<int> q;
        q.push(0);
        while (!q.empty() && ok) {
            const int x = q.front();
            q.pop();
            for (std::size_t i = 0; i < ng && ok; ++i) {
                const double ang = 2.0 * kPi * k[i] / gen_orders_[i];
                const cplx z = val[x] * cplx(std::cos(ang), std::sin(ang));
                const int y = table_[x][gens_[i]];
                if (set[y]) {
                    if (std::abs(val[y] - z) > 1e-9) ok = false;
                } else {
                    val[y] = z;
                    set[y] = true;
                    q.push(y);
                }
            }
        }
        if (ok) chars_.push_back(std::move(val));
        std::size_t i = 0;
        while (i < ng) {
            if (++k[i] < gen_orders_[i]) break;
            k[i] = 0;
            ++i;
        }
        if (i == ng) break;
    }
    if (static_cast<int>(chars_.size()) != h)
        throw NumericalError("character enumeration did not produce |G| characters");
}

int ClassGroup::index_of(const Form& f) const {
    auto it = std::lower_bound(forms_.begin(), forms_.end(), f);
    if (it == forms_.end() || !(*it == f)) throw NumericalError("form not found among reduced forms");
    return static_cast<int>(it - forms_.begin());
}

int ClassGroup::inverse(int i) const {
    for (int j = 0; j < order(); ++j)
        if (table_[i][j] == 0) return j;
    throw NumericalError("class group element without inverse");
}

int ClassGroup::element_order(int i) const {
    int k = 1, x = i;
    while (x != 0) {
        x = table_[x][i];
        ++k;
    }
    return k;
}

i64 class_number(i64 D) {
    if (D > 0) throw DomainError("class_number is provided for D < 0 only");
    Discriminant::make(D);
    return static_cast<i64>(reduced_forms(D).size());
}

int unit_count(i64 D) {
    if (D == -3) return 6;
    if (D == -4) return 4;
    return 2;
}

// ---------------------------------------------------------------------------
// L(1, chi)

double L1_chi_class_number(const Discriminant& disc) {
    if (disc.D > 0) throw DomainError("class number formula route requires D < 0");
    const double h = static_cast<double>(class_number(disc.D));
    return 2.0 * kPi * h / (unit_count(disc.D) * std::sqrt(static_cast<double>(disc.absD)));
}

namespace {

// Digamma for x >= 10 by its asymptotic series.
double digamma_large(double x) {
    const auto& b = bernoulli_even();
    double s = std::log(x) - 0.5 / x;
    const double x2 = 1.0 / (x * x);
    double p = x2;
    for (std::size_t k = 0; k < b.size(); ++k) {
        s -= b[k] / (2.0 * (k + 1)) * p;
        p *= x2;
    }
    return s;
}

}  // namespace

double L1_chi_series(const Discriminant& disc) {
    const i64 q = disc.absD;
    const i64 K = 20;
    Character chi(disc.D);
    KahanSum<double> s;
    for (i64 n = 1; n <= K * q; ++n) {
        const int x = chi(n);
        if (x) s += x / static_cast<double>(n);
    }
    KahanSum<double> tail;
    for (i64 a = 1; a <= q; ++a) {
        const int x = chi(a);
        if (x) tail += x * digamma_large(static_cast<double>(K) + static_cast<double>(a) / q);
    }
    return s.value() - tail.value() / static_cast<double>(q);
}

double L1_chi(const Discriminant& disc) {
    const double series = L1_chi_series(disc);
    if (disc.D < 0) {
        const double cn = L1_chi_class_number(disc);
        if (std::abs(series - cn) > 1e-8 * std::abs(cn))
            throw NumericalError("L(1,chi) routes disagree for D=" + std::to_string(disc.D));
        return cn;
    }
    return series;
}

double epsilon_of_D(const Discriminant& disc) {
    return L1_chi(disc) * std::log(static_cast<double>(disc.absD));
}

std::vector<std::pair<i64, double>> scan_discriminants(i64 lo, i64 hi) {
    if (lo > hi) std::swap(lo, hi);
    std::vector<std::pair<i64, double>> out;
    for (i64 D = lo; D <= hi; ++D) {
        if (!is_fundamental_discriminant(D)) continue;
        out.emplace_back(D, epsilon_of_D(Discriminant::make(D)));
    }
    std::stable_sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
        if (x.second != y.second) return x.second < y.second;
        return x.first > y.first;
    });
    return out;
}

// ---------------------------------------------------------------------------
// Coefficient tables

const char* coeff_kind_name(CoeffKind k) {
    switch (k) {
        case CoeffKind::lambda0: return "lambda0";
        case CoeffKind::rho: return "rho";
        case CoeffKind::lambda_psi: return "lambda_psi";
        case CoeffKind::lambda_tilde: return "lambda_tilde";
        case CoeffKind::vonmangoldt_j: return "vonmangoldt_j";
    }
    return "?";
}

std::optional<CoeffKind> parse_coeff_kind(const std::string& s) {
    for (CoeffKind k : {CoeffKind::lambda0, CoeffKind::rho, CoeffKind::lambda_psi,
                        CoeffKind::lambda_tilde, CoeffKind::vonmangoldt_j})
        if (s == coeff_kind_name(k)) return k;
    return std::nullopt;
}

std::vector<i64> lambda0_table(const Character& chi, i64 bound) {
    return multiplicative_table<i64>(bound, [&](i64 p, int a) {
        const int x = chi(p);
        if (x == 0) return i64{1};
        if (x == 1) return static_cast<i64>(a + 1);
        return static_cast<i64>(a % 2 == 0 ? 1 : 0);
    });
}

std::vector<i64> rho_table(const Character& chi, i64 bound) {
    return multiplicative_table<i64>(bound, [&](i64 p, int a) -> i64 {
        const int x = chi(p);
        if (a == 1) return -(1 + x);
        if (a == 2) return x;
        return 0;
    });
}

std::vector<double> lambda_psi_table(const ClassGroup& G, int psi_index, i64 bound) {
    if (psi_index < 0 || psi_index >= G.character_count())
        throw DomainError("class group character index out of range");
    const i64 absD = -G.D();
    std::vector<cplx> acc(static_cast<std::size_t>(bound + 1), cplx{});
    for (int qi = 0; qi < G.order(); ++qi) {
        const Form& f = G.forms()[qi];
        const cplx psi = G.character(psi_index, qi);
        // a f(x,y) = (a x + b y / 2)^2 + |D| y^2 / 4
        const i64 ymax = static_cast<i64>(std::floor(std::sqrt(4.0 * f.a * bound / absD))) + 1;
        for (i64 y = -ymax; y <= ymax; ++y) {
            const double rest = bound - absD * static_cast<double>(y) * y / (4.0 * f.a);
            if (rest < 0) continue;
            const double center = -static_cast<double>(f.b) * y / (2.0 * f.a);
            const double half = std::sqrt(rest / f.a);
            const i64 xlo = static_cast<i64>(std::floor(center - half)) - 1;
            const i64 xhi = static_cast<i64>(std::ceil(center + half)) + 1;
            for (i64 x = xlo; x <= xhi; ++x) {
                const i64 n = eval_form(f, x, y);
                if (n >= 1 && n <= bound) acc[n] += psi;
            }
        }
    }
    const double w = unit_count(G.D());
    std::vector<double> out(acc.size(), 0.0);
    for (std::size_t n = 1; n < acc.size(); ++n) out[n] = acc[n].real() / w;
    return out;
}

CoefficientTable coeff_table(CoeffKind kind, const Discriminant& disc, i64 bound,
                             const CoeffParams& params) {
    if (bound < 1) throw DomainError("coefficient table bound must be >= 1");
    CoefficientTable t;
    t.kind = kind;
    t.D = disc.D;
    t.bound = bound;
    t.params = params;
    Character chi(disc.D);
    auto to_double = [](const std::vector<i64>& v) { return std::vector<double>(v.begin(), v.end()); };
    switch (kind) {
        case CoeffKind::lambda0: t.values = to_double(lambda0_table(chi, bound)); break;
        case CoeffKind::rho: t.values = to_double(rho_table(chi, bound)); break;
        case CoeffKind::lambda_psi: {
            if (disc.D > 0) throw DomainError("lambda_psi requires D < 0");
            ClassGroup G(disc.D);
            t.values = lambda_psi_table(G, params.psi_index, bound);
            break;
        }
        case CoeffKind::lambda_tilde: {
            // completely multiplicative
            t.values.assign(static_cast<std::size_t>(bound + 1), 0.0);
            t.values[1] = 1.0;
            auto spf = smallest_prime_factor_table(bound);
            for (i64 n = 2; n <= bound; ++n) {
                const i64 p = spf[n];
                const int x = chi(p);
                const double lp = (1.0 + x) * (1.0 + x) / ((1.0 + x / double(p)) * (1.0 + x / double(p)));
                t.values[n] = t.values[n / p] * lp;
            }
            break;
        }
        case CoeffKind::vonmangoldt_j: {
            if (params.degree < 0) throw DomainError("von Mangoldt degree must be >= 0");
            // (lambda * log^j) convolved with rho
            const auto lam = lambda0_table(chi, bound);
            const auto rho = rho_table(chi, bound);
            std::vector<double> weighted(static_cast<std::size_t>(bound + 1), 0.0);
            for (i64 n = 1; n <= bound; ++n)
                weighted[n] = lam[n] * std::pow(std::log(static_cast<double>(n)) / params.log_scale, params.degree);
            t.values.assign(static_cast<std::size_t>(bound + 1), 0.0);
            std::vector<KahanSum<double>> acc(static_cast<std::size_t>(bound + 1));
            for (i64 d = 1; d <= bound; ++d) {
                if (rho[d] == 0) continue;
                for (i64 e = 1; d * e <= bound; ++e)
                    if (weighted[e] != 0.0) acc[d * e] += rho[d] * weighted[e];
            }
            for (i64 n = 1; n <= bound; ++n) t.values[n] = acc[n].value();
            break;
        }
    }
    return t;
}

// ---------------------------------------------------------------------------
// Disk cache

namespace {

constexpr char kMagic[8] = {'L', 'A', 'C', 'C', 'O', 'E', 'F', '1'};
static_assert(std::endian::native == std::endian::little, "cache layout assumes a little-endian host");

std::string kind_key(CoeffKind kind, const CoeffParams& params) {
    std::string k = coeff_kind_name(kind);
    if (kind == CoeffKind::lambda_psi) k += std::to_string(params.psi_index);
    if (kind == CoeffKind::vonmangoldt_j) k += std::to_string(params.degree);
    return k;
}

template <class T>
void put(std::ofstream& os, T v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <class T>
bool get(std::ifstream& is, T& v) {
    return static_cast<bool>(is.read(reinterpret_cast<char*>(&v), sizeof(T)));
}

}  // namespace

std::filesystem::path coeff_cache_path(const std::filesystem::path& cache_dir, CoeffKind kind,
                                       const CoeffParams& params, i64 D, i64 bound) {
    return cache_dir / "coeffs" /
           (kind_key(kind, params) + "-" + std::to_string(D) + "-" + std::to_string(bound) + ".bin");
}

void save_coeff_table(const std::filesystem::path& path, const CoefficientTable& t) {
    std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw std::runtime_error("cannot write cache file " + tmp.string());
        os.write(kMagic, sizeof kMagic);
        put<std::int32_t>(os, static_cast<std::int32_t>(t.kind));
        put<std::int32_t>(os, t.kind == CoeffKind::lambda_psi ? t.params.psi_index : t.params.degree);
        put<std::int64_t>(os, t.D);
        put<std::int64_t>(os, t.bound);
        os.write(reinterpret_cast<const char*>(t.values.data()),
                 static_cast<std::streamsize>(t.values.size() * sizeof(double)));
        if (!os) throw std::runtime_error("short write to cache file " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::optional<CoefficientTable> load_coeff_table(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) return std::nullopt;
    char magic[8];
    if (!is.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0) return std::nullopt;
    std::int32_t kind = 0, param = 0;
    std::int64_t D = 0, bound = 0;
    if (!get(is, kind) || !get(is, param) || !get(is, D) || !get(is, bound)) return std::nullopt;
    if (kind < 0 || kind > static_cast<int>(CoeffKind::vonmangoldt_j) || bound < 1) return std::nullopt;
    CoefficientTable t;
    t.kind = static_cast<CoeffKind>(kind);
    t.D = D;
    t.bound = bound;
    if (t.kind == CoeffKind::lambda_psi)
        t.params.psi_index = param;
    else
        t.params.degree = param;
    t.values.resize(static_cast<std::size_t>(bound + 1));
    if (!is.read(reinterpret_cast<char*>(t.values.data()),
                 static_cast<std::streamsize>(t.values.size() * sizeof(double))))
        return std::nullopt;
    return t;
}

CoefficientTable cached_coeff_table(const std::filesystem::path& cache_dir, CoeffKind kind,
                                    const Discriminant& disc, i64 bound, const CoeffParams& params) {
    // The file holds unscaled values; the log scale is applied after loading.
    CoeffParams raw = params;
    raw.log_scale = 1.0;
    const auto path = coeff_cache_path(cache_dir, kind, raw, disc.D, bound);
    std::optional<CoefficientTable> t = load_coeff_table(path);
    if (!t || t->kind != kind || t->D != disc.D || t->bound != bound) {
        t = coeff_table(kind, disc, bound, raw);
        save_coeff_table(path, *t);
    }
    if (kind == CoeffKind::vonmangoldt_j && params.log_scale != 1.0) {
        const double f = std::pow(params.log_scale, -params.degree);
        for (double& v : t->values) v *= f;
    }
    t->params = params;
    return *t;
}

LacunarityResult lacunarity_sum(const Discriminant& disc, double lo, double hi) {
    if (lo < 1.0) throw DomainError("lacunarity_sum requires lo >= 1");
    LacunarityResult r;
    if (hi <= lo) return r;
    const i64 nlo = static_cast<i64>(std::floor(lo));
    const i64 nhi = static_cast<i64>(std::floor(hi));
    Character chi(disc.D);
    const auto lam = lambda0_table(chi, nhi);
    KahanSum<double> s;
    for (i64 n = nlo + 1; n <= nhi; ++n)
        if (lam[n]) s += lam[n] / static_cast<double>(n);
    r.sum = s.value();
    r.ratio = r.sum / (L1_chi(disc) * std::log(hi));
    return r;
}

}  // namespace lacunary
