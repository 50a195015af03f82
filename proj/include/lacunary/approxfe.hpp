// Smooth partition of unity, the entire kernel f(z), and the partition of G(s) into Dirichlet polynomials.
#pragma once

#include "lacunary/arithmetic.hpp"
#include "lacunary/lfunctions.hpp"

namespace lacunary {

struct CropProfile {
    double alpha = 0.51;
    double beta = 0.505;
    int r = 3;           // mollifier crop exponent
    double N = 100.0;    // level
    double M = 10.0;     // mollifier length
    int smoothness = 4;  // C^k transition, polynomial of degree 2k+1

    // Throws DomainError unless 1/2 < beta < alpha < 1, N >= 2, M >= 1, k >= 4, r >= 1.
    void validate() const;
};

// Default profile with the level tied to the height: N = Q^2 T^2.
CropProfile profile_for_height(const Discriminant& disc, double T, double alpha = 0.51, double beta = 0.505);

// Polynomial smoothstep S of degree 2k+1 with S(0)=0, S(1)=1 and k vanishing derivatives at both ends.
double smoothstep(double v, int k, int deriv = 0);

double crop_a(double x, const CropProfile& p);
double crop_b(double x, const CropProfile& p);
double crop_a_second_derivative(double u, const CropProfile& p);
// Mollifier crop g(m) = (1 - log m / log M)^r on [1, M], zero beyond.
double crop_g(double m, const CropProfile& p);

// f(z) = (1/log N) int_beta^alpha a''(u) N^{u z} du, an entire function.
cplx f_of_z(cplx z, const CropProfile& p);

// Numeric Mellin inversion (1/2 pi i) int_{(1)} f(z) y^{-z} z^{-2} dz; reproduces a(log y / log N).
double crop_a_via_mellin(double y, const CropProfile& p);

// delta(s) = 2 log(|s|/T) / log N with T = sqrt(N)/Q.
double delta_of_s(cplx s, const Discriminant& disc, const CropProfile& p);

// A(s) = sum_{n <= N^alpha} a(log n / log N) lambda(n) n^{-s}.
cplx A_poly(cplx s, const Discriminant& disc, const CropProfile& p);
// B(s) through its conjugate form with b*(x) = b(1 - x + delta); requires Re s = 1/2 and delta in range.
cplx B_poly(cplx s, const Discriminant& disc, const CropProfile& p);
// B(s) = sum_n b(log(Q^2|s|^2/n)/log N) lambda(n) n^{s-1}, valid for any s.
cplx B_poly_direct(cplx s, const Discriminant& disc, const CropProfile& p);

// eta(s,z) = (X(s+z)/(X(s)(Q|s|)^{-2z}) - 1)/z^2.
cplx eta(cplx s, cplx z, const Discriminant& disc);

struct ContourResult {
    cplx value;
    double truncation = 0.0;      // |Im z| reached
    double tail_estimate = 0.0;   // size of the last panels, an estimate of the neglected tail
};

// R(s) = (1/2 pi i) int_{Re z = -1/log(Q|s|)} L(1-s-z) (Q|s|)^{-2z} f(z) eta(s,z) dz.
// Panels of width 1 with 32 nodes, at least up to |Im z| = 40 and then extended until ten consecutive
// panels contribute less than tol in total. Throws NumericalError if |Im z| = 1000 is reached first.
ContourResult R_term(cplx s, const Discriminant& disc, const CropProfile& p, double tol = 1e-8);

// Residue of the R-integrand at z = -s, the pole of L(1-s-z) lying between Re z = -1 and the R contour.
cplx R_crossing_residue(cplx s, const Discriminant& disc, const CropProfile& p);

struct PartitionTerms {
    cplx G, A, B, X, R, polar, crossing;
    double R_tail = 0.0;
    double residual = 0.0;          // |G - A - X B + X R - X crossing + polar|
    double printed_residual = 0.0;  // |G - A - X B - X R - polar|, the all-plus sign arrangement
    double corollary_gap = 0.0;  // |G - A - X B|
};

PartitionTerms partition_terms(cplx s, const Discriminant& disc, const CropProfile& p);
double partition_residual(cplx s, const Discriminant& disc, const CropProfile& p);

}  // namespace lacunary
