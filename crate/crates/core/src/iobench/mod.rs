//! Map, scenario and solution files, seeded instance generation, built-in
//! maps and the CSV benchmark harness.

mod bench;
mod format;
mod generate;
mod maps;

pub use bench::{
    aggregate, read_csv, run_benchmark, write_csv, BenchError, BenchmarkRow, Seeds, SweepCell,
    SweepConfig, CSV_HEADER,
};
pub use format::{
    parse_map, parse_scenario, parse_solution, validate_solution_text, write_map, write_scenario,
    write_solution, ParseError,
};
pub use generate::{generate_instance, is_connected, GenError};
pub use maps::{builtin_map, random_map, BUILTIN_MAPS};
