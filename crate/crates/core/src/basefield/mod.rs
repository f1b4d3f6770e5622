//! Valued coefficient fields and their residue fields.

pub mod ffactor;
pub mod finite;
pub mod mpoly;
pub mod padic;

pub use finite::{FfElem, FiniteTower};
pub use padic::PadicRationals;
pub mod funcfield;

pub use funcfield::{FnTower, FunctionField};
pub mod rank2;

pub use rank2::{QtElem, RationalFunctionsRank2};
