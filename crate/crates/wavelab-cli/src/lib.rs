//! Command-line front end for the wavelab solvers: experiment
//! configuration, the right-hand-side mini-grammar, orchestration of the
//! convergence, inf-sup, stability, and demonstration studies, and CSV/JSON
//! report emission.

pub mod cli;
pub mod config;
pub mod csv;
pub mod experiments;
pub mod rhs;

use serde::Serialize;

/// A failed run, classified by exit code: usage and configuration problems
/// exit 1, violated numerical assertions exit 2, solver breakdowns exit 3.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Failure {
    Usage(String),
    Numerical(String),
    Solver(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Numerical(_) => 2,
            Failure::Solver(_) => 3,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Failure::Usage(_) => "usage",
            Failure::Numerical(_) => "numerical",
            Failure::Solver(_) => "solver",
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Numerical(m) | Failure::Solver(m) => m,
        }
    }

    /// Machine-readable error object for stderr.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Inner<'a> {
            kind: &'static str,
            exit_code: i32,
            message: &'a str,
        }
        #[derive(Serialize)]
        struct Wrapper<'a> {
            error: Inner<'a>,
        }
        serde_json::to_string(&Wrapper {
            error: Inner {
                kind: self.kind(),
                exit_code: self.exit_code(),
                message: self.message(),
            },
        })
        .expect("error object serializes")
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.kind(), self.message())
    }
}

impl std::error::Error for Failure {}

impl From<wavelab::Error> for Failure {
    fn from(e: wavelab::Error) -> Self {
        use wavelab::Error::*;
        match &e {
            InvalidArgument(_) | ShapeMismatch(_) | MalformedSamples(_)
            | NonFiniteProfile { .. } | Io { .. } => Failure::Usage(e.to_string()),
            NotPositiveDefinite { .. } | SingularSystem(_) | NoConvergence { .. } => {
                Failure::Solver(e.to_string())
            }
        }
    }
}

pub type RunResult<T> = std::result::Result<T, Failure>;

/// Dispatches a parsed command line to its experiment.
pub fn run(cli: &cli::Cli) -> RunResult<()> {
    match &cli.command {
        cli::Command::Ode(cmd) => experiments::ode::run(cmd),
        cli::Command::Wave(cmd) => experiments::wave::run(cmd),
        cli::Command::Report(cmd) => experiments::report::run(cmd),
    }
}
