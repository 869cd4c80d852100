//! File formats, synthetic data, reporting, and the `dineq` command-line
//! tool on top of the [`dineq_core`] statistics.
//!
//! - [`io`]: the household survey CSV schema, reading and writing
//! - [`synth`]: deterministic synthetic survey generation with presets
//! - [`report`]: result documents and their table / JSON / CSV / Markdown
//!   renderings
//! - [`verify`]: internal-consistency checks with fixed tolerances
//! - [`cli`]: the command definitions and dispatch

pub mod cli;
pub mod io;
pub mod report;
pub mod synth;
pub mod verify;
