//! Data ingestion, persistence and plotting.

pub mod csv;
pub mod datasets;
pub mod fct;
pub mod reference;
pub mod svg;

pub use self::csv::{load_csv, parse_csv, write_csv};
pub use datasets::{bundled, Dataset};
pub use fct::{read_factorization, write_factorization, FactorizationFile};
pub use svg::{budget_plots, emit_ternary_svg, render_ternary_svg, TernaryPlot};
