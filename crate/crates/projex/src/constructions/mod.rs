//! Finite-depth builders for the planar sets and direction arcs.

pub mod bigex;
pub mod blocks;
pub mod main2;
pub mod main_cascade;
pub mod set_e;
pub mod textfmt;

use crate::error::{Error, Result};
use crate::geometry::{Arc, BallUnion, SquareUnion};

pub use bigex::{construct_bigex, BigexParams, BigexReport};
pub use blocks::{block_B, block_L, block_Q, block_U, directions_d, star_power, star_product, BlockSkeleton};
pub use main2::{construct_main2, Main2Params, Main2State};
pub use main_cascade::{construct_main, MainParams, MainState};
pub use set_e::{construct_set_e, SetEState};

/// Default bound on the number of primitive objects a builder materialises.
pub const DEFAULT_CAP: u64 = 100_000_000;

/// Size cap, overridable through `PROJEX_CAP`.
pub fn size_cap() -> u64 {
    std::env::var("PROJEX_CAP").ok().and_then(|v| v.trim().parse().ok()).unwrap_or(DEFAULT_CAP)
}

pub(crate) fn check_cap(count: u64, what: &str) -> Result<()> {
    let cap = size_cap();
    if count > cap {
        return Err(Error::Cap(format!("{what} needs {count} objects, cap is {cap}")));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub enum GenSet {
    Balls(BallUnion),
    Squares(SquareUnion),
}

/// One level of a nested construction.
#[derive(Clone, Debug, PartialEq)]
pub struct Generation {
    pub level: usize,
    pub set: Option<GenSet>,
    pub arcs: Vec<Arc>,
}
