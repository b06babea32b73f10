//! Counterexample constructors, experiment drivers, and the reproduction
//! harness that checks every claim end to end.

pub mod constructions;
pub mod corpus;
pub mod experiments;
pub mod reproduce;

pub use constructions::{
    close_hartman, close_ours, closeness, curved_lexmax, curved_witness, make_hartman_set,
    make_rate_segment, make_sharp_lower_set, rate_epsilon, sharp_lower_points, ClosenessVerdict,
    RateSegment, RATE_BETA,
};
pub use experiments::{
    convergence_curve, stability_curve, worst_possible_output, ConvergenceCheck,
    ConvergenceOptions, Expectation, ExperimentRecord, StabilityOptions,
};

use crate::csv::{fmt_f64, fmt_opt, Table};

/// Tolerance used when deciding a record's pass flag.
pub const RECORD_TOL: f64 = 1e-9;

/// Column names of [`records_table`].
pub const RECORD_COLUMNS: [&str; 12] = [
    "set", "n", "k", "a", "c", "eps", "gamma", "d_total", "d_k", "bound", "pass", "grid_slack",
];

/// Renders experiment records with the standard columns.
pub fn records_table(records: &[ExperimentRecord]) -> Table {
    let mut t = Table::new(&RECORD_COLUMNS);
    for r in records {
        t.push(vec![
            r.set.clone(),
            r.n.to_string(),
            r.k.map(|k| k.to_string()).unwrap_or_default(),
            fmt_opt(r.a),
            fmt_opt(r.c),
            fmt_opt(r.eps),
            fmt_opt(r.gamma),
            fmt_f64(r.d_total),
            fmt_opt(r.d_k),
            fmt_opt(r.bound),
            r.pass.to_string(),
            fmt_f64(r.grid_slack),
        ]);
    }
    t
}
