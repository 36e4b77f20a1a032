//! Yamabe test energies for LeBrun's hyperbolic monopole metrics, shooting for
//! radial orbifold Yamabe metrics on `O(−n)`, and exact characteristic-number
//! budgets for the bubble trees of degenerating monopole configurations.
//!
//! ```
//! use monopole_yamabe::hgeom::{HPoint, MonopoleConfig};
//! use monopole_yamabe::conformal::Gauge;
//! use monopole_yamabe::yamabe::{self, QuadratureSpec};
//!
//! let config = MonopoleConfig::single(HPoint::origin(), 2)?;
//! let report = yamabe::energy(&config, Gauge::Hyperbolic, &QuadratureSpec::default())?;
//! assert!((report.energy - yamabe::single_point_energy(2)).abs() < 1e-6);
//! # Ok::<(), monopole_yamabe::Error>(())
//! ```

pub mod error;
pub use error::{Error, Result};

pub mod cli;
pub mod conformal;
pub mod degeneration;
pub mod hgeom;
pub mod ode;
pub mod quadrature;
pub mod yamabe;

// The book's snippets run as doc-tests so the guide cannot drift from the API.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/hyperbolic.md")]
    mod hyperbolic {}
    #[doc = include_str!("../../../book/src/energies.md")]
    mod energies {}
    #[doc = include_str!("../../../book/src/quadrature.md")]
    mod quadrature {}
    #[doc = include_str!("../../../book/src/radial_ode.md")]
    mod radial_ode {}
    #[doc = include_str!("../../../book/src/bubble_trees.md")]
    mod bubble_trees {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
