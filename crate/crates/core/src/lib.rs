//! Band gaps of doubly periodic square arrays of thin elastic shells in a fluid.

pub mod cpa;
pub mod error;
pub mod foldy;
mod isotropic;
pub mod lattice;
pub mod mae;
pub mod model;
pub mod rayleigh;
pub mod roots;
pub mod shell;
pub mod special;
pub mod sweep;

pub use error::{Error, Result};
pub use lattice::{BlochVector, SquareLattice};
pub use model::{ArrayConfig, BandGap, DispersionCurve, MethodId};
pub use shell::{FluidSpec, ResonanceParams, ShellSpec};

#[cfg(doctest)]
mod guide {
    #[doc = include_str!("../../../book/src/introduction.md")]
    struct Introduction;
    #[doc = include_str!("../../../book/src/shells.md")]
    struct Shells;
    #[doc = include_str!("../../../book/src/lattice.md")]
    struct Lattice;
    #[doc = include_str!("../../../book/src/rayleigh.md")]
    struct Rayleigh;
    #[doc = include_str!("../../../book/src/foldy.md")]
    struct Foldy;
    #[doc = include_str!("../../../book/src/mae.md")]
    struct Mae;
    #[doc = include_str!("../../../book/src/cpa.md")]
    struct Cpa;
    #[doc = include_str!("../../../book/src/sweeps.md")]
    struct Sweeps;
}
