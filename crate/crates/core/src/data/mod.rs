//! Dictionary-encoded discrete tables.
//!
//! Every column carries a [`Vocab`] sorted in natural order, so interval
//! predicates become contiguous index ranges. Index `size` of each vocab is
//! reserved for the MASK token and never appears in stored rows.

mod synth;
mod table;
mod text;
mod vocab;

pub use synth::{synth_table, SynthSpec};
pub use table::{Column, Table};
pub(crate) use text::contains;
pub use text::{synth_urls, TextTable, PAD_CHAR};
pub use vocab::{Vocab, MASK_SENTINEL};
