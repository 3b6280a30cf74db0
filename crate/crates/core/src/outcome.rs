use std::fmt;

use crate::hypergraph::{Coloring, Hyperedge};

/// Why a colorer declined to return a coloring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Failure {
    /// An initially monochromatic edge had no vertex allowed to recolor.
    UnfixableMonoEdge { position: u64 },
    ResidualOverflowBlue { position: u64 },
    ResidualOverflowRed { position: u64 },
    /// A stored residual set ended up entirely Blue.
    FinalCheckBlue,
    /// A stored residual set ended up entirely Red.
    FinalCheckRed,
    /// The fixed split left this edge inside one class.
    MonochromaticEdge { edge: Hyperedge, position: u64 },
    PassBudgetExhausted { passes: usize },
}

impl Failure {
    /// Stable snake_case tag used in CLI and CSV output.
    pub fn reason(&self) -> &'static str {
        match self {
            Failure::UnfixableMonoEdge { .. } => "unfixable_mono_edge",
            Failure::ResidualOverflowBlue { .. } => "residual_overflow_blue",
            Failure::ResidualOverflowRed { .. } => "residual_overflow_red",
            Failure::FinalCheckBlue => "final_check_blue",
            Failure::FinalCheckRed => "final_check_red",
            Failure::MonochromaticEdge { .. } => "monochromatic_edge",
            Failure::PassBudgetExhausted { .. } => "pass_budget_exhausted",
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.reason())?;
        match self {
            Failure::UnfixableMonoEdge { position }
            | Failure::ResidualOverflowBlue { position }
            | Failure::ResidualOverflowRed { position } => write!(f, " at edge {position}"),
            Failure::MonochromaticEdge { edge, position } => write!(f, " {edge} at edge {position}"),
            Failure::PassBudgetExhausted { passes } => write!(f, " after {passes} passes"),
            Failure::FinalCheckBlue | Failure::FinalCheckRed => Ok(()),
        }
    }
}

/// Counters collected during a run. Each algorithm fills the fields it uses.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RunStats {
    /// Edges read, summed over passes.
    pub edges_read: u64,
    pub discovered_vertices: usize,
    pub flips: usize,
    /// Initially monochromatic edges with no recolorable vertex.
    pub unfixable_edges: usize,
    /// Largest number of vertex entries held at once (per-vertex table plus residuals).
    pub peak_state_entries: usize,
    pub blue_residual_size: usize,
    pub red_residual_size: usize,
    pub passes: usize,
    pub resamples: usize,
}

/// Result of a colorer: a coloring or a declared failure, plus statistics.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColorOutcome<C = Coloring> {
    pub result: Result<C, Failure>,
    pub stats: RunStats,
}

impl<C> ColorOutcome<C> {
    pub fn is_success(&self) -> bool {
        self.result.is_ok()
    }

    pub fn coloring(&self) -> Option<&C> {
        self.result.as_ref().ok()
    }

    pub fn failure(&self) -> Option<&Failure> {
        self.result.as_ref().err()
    }
}
