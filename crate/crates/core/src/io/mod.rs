//! Configuration, result tables, SVG plots and the subcommand runner
//! behind the `ptkr` binary.

pub mod config;
pub mod run;
pub mod svg;
pub mod table;

pub use config::{parse_config, parse_config_with, RunConfig};
pub use run::{error_record, run_subcommand, RunOutput, Task};
pub use table::{read_table, write_table, Column, ColumnKind, ResultTable, Value};
