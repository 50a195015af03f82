// Integer and multiplicative-function foundations for quadratic characters.
#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lacunary/common.hpp"

namespace lacunary {

using i64 = std::int64_t;

bool is_squarefree(i64 n);
bool is_fundamental_discriminant(i64 D);

// A fundamental discriminant with its derived conductor data.
struct Discriminant {
    i64 D = 0;
    i64 absD = 0;
    double Q = 0.0;  // sqrt|D| / 2 pi
    int sign = 0;

    // Throws DomainError unless D is fundamental.
    static Discriminant make(i64 D);
};

// Kronecker symbol (D/n). Throws DomainError when D == 0.
int kronecker(i64 D, i64 n);

// Character table chi_D(n mod |D|) for a fundamental D; periodic in n.
class Character {
public:
    explicit Character(i64 D);
    int operator()(i64 n) const {
        i64 r = n % mod_;
        if (r < 0) r += mod_;
        return table_[static_cast<std::size_t>(r)];
    }
    i64 D() const { return D_; }
    i64 modulus() const { return mod_; }

private:
    i64 D_;
    i64 mod_;
    std::vector<signed char> table_;
};

// Prime factorization as (p, exponent) pairs in ascending p.
std::vector<std::pair<i64, int>> factorize(i64 n);
std::vector<i64> divisors(i64 n);
std::vector<i64> primes_up_to(i64 n);

int mobius(i64 n);
i64 tau(i64 n);
i64 tau_r(i64 n, int r);  // number of ordered r-fold factorizations
i64 sigma(i64 n);
i64 euler_phi(i64 n);
int omega(i64 n);  // number of distinct prime factors
bool is_cubefree(i64 n);

// Sieve tables of length n+1 (index 0 unused).
std::vector<int> mobius_table(i64 n);
std::vector<std::int32_t> smallest_prime_factor_table(i64 n);
std::vector<i64> tau_r_table(i64 n, int r);

// r_h(c) = sum_{d | (c,h)} d mu(c/d), exact.
i64 ramanujan_sum(i64 h, i64 c);

// Direct sum over reduced residues a mod c of chi(a) e(a h / c); requires |D| | c.
cplx gauss_ramanujan(i64 h, i64 c, const Discriminant& disc);
cplx gauss_sum(const Discriminant& disc);  // tau(chi) = gauss_ramanujan(1, |D|)

// Reduced primitive positive definite binary quadratic form a x^2 + b x y + c y^2.
struct Form {
    i64 a, b, c;
    bool operator==(const Form&) const = default;
    auto operator<=>(const Form&) const = default;
};

std::vector<Form> reduced_forms(i64 D);
Form reduce_form(Form f);
Form compose_forms(const Form& f, const Form& g, i64 D);

// Class group of an imaginary quadratic order realized on reduced forms.
class ClassGroup {
public:
    explicit ClassGroup(i64 D);
    i64 D() const { return D_; }
    int order() const { return static_cast<int>(forms_.size()); }
    const std::vector<Form>& forms() const { return forms_; }
    int identity() const { return 0; }
    int multiply(int i, int j) const { return table_[i][j]; }
    int inverse(int i) const;
    int element_order(int i) const;
    // Generators chosen greedily and their orders.
    const std::vector<int>& generators() const { return gens_; }
    const std::vector<int>& generator_orders() const { return gen_orders_; }
    // Number of characters (equals the group order).
    int character_count() const { return static_cast<int>(chars_.size()); }
    // Value of character k on class i; k = 0 is the trivial character.
    cplx character(int k, int i) const { return chars_[k][i]; }
    int index_of(const Form& f) const;

private:
    i64 D_;
    std::vector<Form> forms_;
    std::vector<std::vector<int>> table_;
    std::vector<int> gens_;
    std::vector<int> gen_orders_;
    std::vector<std::vector<cplx>> chars_;
};

i64 class_number(i64 D);
int unit_count(i64 D);  // w = 6, 4, 2

// L(1, chi) via the class number formula (D < 0 only).
double L1_chi_class_number(const Discriminant& disc);
// L(1, chi) via a partial character sum with an Euler-Maclaurin digamma tail.
double L1_chi_series(const Discriminant& disc);
// Both routes (when available); throws NumericalError if they disagree by more than 1e-8.
double L1_chi(const Discriminant& disc);

double epsilon_of_D(const Discriminant& disc);
std::vector<std::pair<i64, double>> scan_discriminants(i64 lo, i64 hi);

enum class CoeffKind { lambda0, rho, lambda_psi, lambda_tilde, vonmangoldt_j };

const char* coeff_kind_name(CoeffKind k);
std::optional<CoeffKind> parse_coeff_kind(const std::string& s);

struct CoeffParams {
    int psi_index = 0;     // lambda_psi: character index in the class group dual
    int degree = 0;        // vonmangoldt_j: degree j
    double log_scale = 1;  // vonmangoldt_j: divide by log_scale^j
};

struct CoefficientTable {
    CoeffKind kind = CoeffKind::lambda0;
    i64 D = 0;
    i64 bound = 0;
    CoeffParams params;
    std::vector<double> values;  // index 0 unused

    double operator[](i64 n) const { return values[static_cast<std::size_t>(n)]; }
};

// Sieve-style table construction up to `bound`.
CoefficientTable coeff_table(CoeffKind kind, const Discriminant& disc, i64 bound,
                             const CoeffParams& params = {});

// Integer tables for the two divisor-type sequences.
std::vector<i64> lambda0_table(const Character& chi, i64 bound);
std::vector<i64> rho_table(const Character& chi, i64 bound);

// lambda_psi by representation counts over reduced forms.
std::vector<double> lambda_psi_table(const ClassGroup& G, int psi_index, i64 bound);

// Disk cache: cache_dir/coeffs/<kind>-<D>-<bound>.bin, 8-byte magic header, little endian.
std::filesystem::path coeff_cache_path(const std::filesystem::path& cache_dir, CoeffKind kind,
                                       const CoeffParams& params, i64 D, i64 bound);
void save_coeff_table(const std::filesystem::path& path, const CoefficientTable& t);
std::optional<CoefficientTable> load_coeff_table(const std::filesystem::path& path);
CoefficientTable cached_coeff_table(const std::filesystem::path& cache_dir, CoeffKind kind,
                                    const Discriminant& disc, i64 bound,
                                    const CoeffParams& params = {});

struct LacunarityResult {
    double sum = 0.0;    // sum_{lo < n <= hi} lambda0(n)/n
    double ratio = 0.0;  // sum / (L(1,chi) log hi)
};
LacunarityResult lacunarity_sum(const Discriminant& disc, double lo, double hi);

}  // namespace lacunary
