//! Special functions: rising factorials, Gauss hypergeometric sums, the two
//! orthogonal polynomial families in use, and weighted quadrature.

pub mod hypergeom;
pub mod orthopoly;
pub mod pochhammer;
pub mod quadrature;

pub use hypergeom::{
    hypergeom_series, hypergeom_terminating, hypergeom_terminating_exact, terminating_polynomial,
    HypergeomParams,
};
pub use orthopoly::{jacobi_eval, laguerre_eval};
pub use pochhammer::{beta, gamma, ln_gamma, pochhammer, Scalar};
pub use quadrature::{
    adaptive_gk15, gauss_jacobi_01, gauss_laguerre, gauss_legendre_01, integrate_01_weighted,
    integrate_halfline_exp, QuadRule, DEFAULT_TOL,
};
