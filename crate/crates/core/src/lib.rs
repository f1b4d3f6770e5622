#![cfg_attr(not(test), no_std)]
extern crate alloc;

pub mod basefield;
pub mod error;
pub mod expr;
pub mod field;
pub mod indval;
pub mod lattice;
pub mod mlv;
pub mod okutsu;
pub mod ordgroup;
pub mod poly;
pub mod residual;
pub mod series;
