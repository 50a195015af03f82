// Python bindings for a subset of the library: arithmetic, L-values, zero census, the singular series and the
// lambda identity suite. Discriminants are passed as plain integers.
#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lacunary/identities.hpp"
#include "lacunary/levinson.hpp"
#include "lacunary/offdiagonal.hpp"

namespace py = pybind11;
using namespace lacunary;

namespace {

Discriminant disc(i64 D) { return Discriminant::make(D); }

py::dict census_dict(const ZeroCensus& c) {
    py::list gammas;
    for (const auto& z : c.zeros) gammas.append(z.gamma);
    py::dict d;
    d["D"] = c.D;
    d["T"] = c.T;
    d["N"] = c.N;
    d["N0"] = c.N0;
    d["N00"] = c.N00;
    d["gammas"] = gammas;
    return d;
}

}  // namespace

PYBIND11_MODULE(_lacunary, m) {
    m.doc() = "Desk-scale checks for mollified L-function moments of imaginary quadratic fields";

    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<CapacityError>(m, "CapacityError", PyExc_RuntimeError);
    py::register_exception<IdentityFailure>(m, "IdentityFailure", PyExc_ArithmeticError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

    m.def("is_fundamental_discriminant", &is_fundamental_discriminant, py::arg("D"));
    m.def("kronecker", &kronecker, py::arg("D"), py::arg("n"));
    m.def("class_number", &class_number, py::arg("D"));
    m.def("ramanujan_sum", &ramanujan_sum, py::arg("h"), py::arg("c"));
    m.def("L1_chi", [](i64 D) { return L1_chi(disc(D)); }, py::arg("D"));
    m.def("epsilon_of_D", [](i64 D) { return epsilon_of_D(disc(D)); }, py::arg("D"));
    m.def("scan_discriminants", &scan_discriminants, py::arg("lo"), py::arg("hi"),
          "Fundamental discriminants in [lo, hi] with epsilon(D), ascending in epsilon.");
    m.def(
        "coefficients",
        [](const std::string& kind, i64 D, i64 bound) {
            const auto k = parse_coeff_kind(kind);
            if (!k) throw DomainError("unknown coefficient kind '" + kind + "'");
            auto t = coeff_table(*k, disc(D), bound);
            return std::vector<double>(t.values.begin() + 1, t.values.end());
        },
        py::arg("kind"), py::arg("D"), py::arg("bound"), "Coefficients a(1), ..., a(bound).");

    m.def("dirichlet_L", [](cplx s, i64 D) { return dirichlet_L(s, disc(D)); }, py::arg("s"), py::arg("D"));
    m.def("zeta", &zeta, py::arg("s"));
    m.def(
        "functional_equation_residual", [](cplx s, i64 D) { return functional_equation_residual(s, disc(D)); },
        py::arg("s"), py::arg("D"));
    m.def(
        "zero_census",
        [](i64 D, double T, double grid_step) { return census_dict(count_critical_zeros(disc(D), T, grid_step)); },
        py::arg("D"), py::arg("T"), py::arg("grid_step") = 0.02);

    m.def(
        "singular_series",
        [](i64 u, i64 v, i64 h, i64 D) {
            SingularInput in{u, v, h, disc(D)};
            in.validate();
            return singular_series_closed(in);
        },
        py::arg("u"), py::arg("v"), py::arg("h"), py::arg("D"));
    m.def("psi", [](double z, int deriv) { return psi_eval(z, TestFunctionPair{}, deriv); }, py::arg("z"),
          py::arg("deriv") = 0);
    m.def("phi_kernel", [](double z) { return phi_kernel(z, TestFunctionPair{}); }, py::arg("z"));

    m.def(
        "identity_grid",
        [](const std::vector<i64>& Ds, i64 uv_max, int jobs, double tol) {
            const IdentityReport r = identity_grid(Ds, uv_max, jobs, tol);
            py::dict d;
            d["checks"] = r.checks;
            d["worst"] = r.worst;
            d["failures"] = r.failures.size();
            return d;
        },
        py::arg("Ds"), py::arg("uv_max"), py::arg("jobs") = 0, py::arg("tol") = 1e-10);
    m.def("R_tilde_one", [](i64 D) { return R_tilde_one_closed(disc(D)); }, py::arg("D"));
}
