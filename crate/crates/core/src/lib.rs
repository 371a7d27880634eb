//! Block predictor-corrector Runge-Kutta schemes.
//!
//! A scheme starts every step with an explicit Euler predictor at the
//! corrector's abscissae and then applies `m` correction sweeps with the
//! matrix `A` of a (typically implicit) corrector. Within a sweep the `s`
//! flux evaluations are independent, so they can run in parallel.
//!
//! The crate computes the linear stability polynomial of such a scheme,
//! `1 + z b·1 + z² b·A1 + ... + z^{m+1} b·A^m 1`, and checks that it is the
//! degree-`m+1` Taylor polynomial of the corrector's stability function
//! `R(z) = 1 + z b·(I - zA)^{-1} 1`. On top of that it scans stability
//! regions, derives stability-limited step sizes, and integrates ODEs with
//! the scheme itself.
//!
//! ```
//! use pcrk::stability::{pc_stability_polynomial, stability_function};
//! use pcrk::tableau::PCScheme;
//!
//! let scheme = PCScheme::builtin("radau-iia-2", 3).unwrap();
//! let poly = pc_stability_polynomial(&scheme);
//! let r = stability_function(&scheme.corrector);
//! let taylor = r.rational.taylor(4);
//! for k in 0..=4 {
//!     assert!((poly.coeff(k) - taylor.coeff(k)).abs() < 1e-12);
//! }
//! ```

// Guards such as `!(h > 0.0)` deliberately reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod integrator;
pub mod polyalg;
pub mod region;
pub mod stability;
pub mod tableau;

pub use error::{Error, Result};
pub use num_complex::Complex64;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/tableaux.md")]
    mod tableaux {}
    #[doc = include_str!("../../../book/src/stability.md")]
    mod stability {}
    #[doc = include_str!("../../../book/src/regions.md")]
    mod regions {}
    #[doc = include_str!("../../../book/src/integrator.md")]
    mod integrator {}
}
