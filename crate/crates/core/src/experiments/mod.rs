//! Experiment suites and reports.
