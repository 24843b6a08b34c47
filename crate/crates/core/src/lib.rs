#![no_std]
extern crate alloc;

pub mod cohen;
pub mod evdiff;
pub mod generic;
pub mod iteration;
pub mod poset;
pub mod product;
pub mod scale;
pub mod seq;
pub mod suites;

pub use cohen::{CohenCondition, CohenPoset};
pub use poset::{Enumerable, Index, Poset, Truncation};
pub use seq::{EvDiffCondition, Mode, ScaleCondition, SeqCondition, SeqPoset};
