"""Python access to the lacunary C++ library."""

from ._lacunary import (
    CapacityError,
    DomainError,
    IdentityFailure,
    NumericalError,
    L1_chi,
    R_tilde_one,
    class_number,
    coefficients,
    dirichlet_L,
    epsilon_of_D,
    functional_equation_residual,
    identity_grid,
    is_fundamental_discriminant,
    kronecker,
    phi_kernel,
    psi,
    ramanujan_sum,
    scan_discriminants,
    singular_series,
    zero_census,
    zeta,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
