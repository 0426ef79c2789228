//! Scenario-driven front end for the hyperbolic dynamics lab: a JSON
//! scenario schema, task execution with JSON reports and CSV traces, and a
//! registry reproducing the worked examples end to end.

pub mod registry;
pub mod scenario;

/// Failure taxonomy mapped to process exit codes: configuration/schema
/// errors exit 2, numerical non-convergence exits 3, verification failures
/// exit 1.
#[derive(Debug)]
pub enum RunFailure {
    Config(String),
    Verification(String),
    NonConvergence(String),
}

impl RunFailure {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunFailure::Verification(_) => 1,
            RunFailure::Config(_) => 2,
            RunFailure::NonConvergence(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            RunFailure::Config(m) | RunFailure::Verification(m) | RunFailure::NonConvergence(m) => {
                m
            }
        }
    }
}

impl From<hypdyn_core::Error> for RunFailure {
    fn from(e: hypdyn_core::Error) -> RunFailure {
        use hypdyn_core::Error::*;
        if e.is_nonconvergence() {
            return RunFailure::NonConvergence(e.to_string());
        }
        match e {
            Domain { .. } | InvalidLabel { .. } | NotAvailable | NoInverse
            | InvalidParameter(_) => RunFailure::Config(e.to_string()),
            _ => RunFailure::Verification(e.to_string()),
        }
    }
}

/// Caps the rayon pool from `HYPDYN_THREADS` when set; call once at startup.
pub fn configure_threads() {
    if let Ok(v) = std::env::var("HYPDYN_THREADS") {
        if let Ok(n) = v.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build_global();
        }
    }
}
