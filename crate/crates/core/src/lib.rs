//! Random walks on prime fields driven by a deterministic map.
//!
//! The walks studied here move `x -> f(x) ± γ` on `F_p`, where `f` is either a
//! bijection agreeing with a non-linear rational function, the squaring map,
//! or a linear map. This crate holds the allocation-only machinery:
//!
//! * [`field`], [`poly`] and [`map`]: prime-field arithmetic, rational maps and
//!   their total extensions to `F_p`.
//! * [`kernel`]: exact sparse transition kernels, distributions, total
//!   variation and seeded trajectory sampling.
//! * [`stationary`]: recurrent classes, exact stationary laws, periods,
//!   mixing times and the support-fraction experiment for `p ≡ 1 (mod 4)`.
//! * [`expsum`]: exponential sums over progressions and their averaged forms.
//! * [`progression`] and [`cheeger`]: arithmetic-progression decompositions and
//!   exact / searched Cheeger constants.
//!
//! The crate is `no_std` and only needs `alloc`. IO, parallel drivers and the
//! command line live in the `fpchain` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod cheeger;
pub mod descriptor;
pub mod error;
pub mod expsum;
pub mod field;
pub mod kernel;
pub mod map;
mod modsolve;
pub mod poly;
pub mod progression;
pub mod rng;
pub mod stationary;

pub use error::{Error, Result};
pub use field::PrimeFieldCtx;
pub use kernel::{ChainSpec, Distribution, TransitionKernel, Variant};
pub use map::{RationalMap, TotalMap};
