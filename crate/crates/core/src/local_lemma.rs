//! Multi-pass resampling colorer for hypergraphs whose edges meet few others.
//!
//! Each pass reads the whole stream. Vertices get a random color the first
//! time they are seen. An edge that is monochromatic when it arrives, and
//! none of whose vertices was already resampled during the current pass, has
//! all its vertices resampled. The run ends after the first pass that sees no
//! monochromatic edge, so a returned coloring is always valid. State is one
//! color and one pass stamp per vertex.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::hypergraph::{check_edge, max_edge_intersections, Color, Coloring, Hyperedge, Hypergraph, VertexId};
use crate::outcome::{ColorOutcome, Failure, RunStats};
use crate::rng::derive;
use crate::stream_io::EdgeSource;

const TAG_INITIAL: u64 = 11;
const TAG_RESAMPLE: u64 = 12;

/// Multiplier `c` in the default pass budget `ceil(c log2(v + 2))`.
pub const PASS_BUDGET_FACTOR: f64 = 4.0;

pub fn default_max_passes(v: usize) -> usize {
    (PASS_BUDGET_FACTOR * ((v + 2) as f64).log2()).ceil() as usize
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LocalConfig {
    pub seed: u64,
    /// `None` uses [`default_max_passes`] of the number of vertices found in the first pass.
    pub max_passes: Option<usize>,
}

impl LocalConfig {
    pub fn new(seed: u64) -> Self {
        LocalConfig { seed, max_passes: None }
    }

    pub fn with_max_passes(mut self, passes: usize) -> Self {
        self.max_passes = Some(passes);
        self
    }
}

/// One triggered resample.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResampleEvent {
    pub pass: usize,
    /// 1-based edge position within the pass.
    pub position: u64,
    pub edge: Hyperedge,
    /// Colors of the edge's vertices just before resampling.
    pub before: Vec<Color>,
}

fn random_color(word: u64) -> Color {
    if word & 1 == 0 {
        Color::Red
    } else {
        Color::Blue
    }
}

struct PassState {
    seed: u64,
    // color and the 1-based pass in which the vertex was last resampled
    vertices: HashMap<VertexId, (Color, usize)>,
}

impl PassState {
    fn color(&self, u: VertexId) -> Result<Color> {
        self.vertices
            .get(&u)
            .map(|s| s.0)
            .ok_or_else(|| Error::domain(format!("vertex {u} appeared after the first pass; the stream changed")))
    }

    fn monochromatic(&self, edge: &Hyperedge) -> Result<bool> {
        let first = self.color(edge.vertices()[0])?;
        for u in edge.iter().skip(1) {
            if self.color(u)? != first {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn touched(&self, edge: &Hyperedge, stamp: usize) -> bool {
        edge.iter().any(|u| self.vertices[&u].1 == stamp)
    }

    fn resample(&mut self, edge: &Hyperedge, pass: usize) {
        for u in edge.iter() {
            let c = random_color(derive(self.seed, &[TAG_RESAMPLE, pass as u64, u.0 as u64]));
            self.vertices.insert(u, (c, pass + 1));
        }
    }
}

fn run<S: EdgeSource + ?Sized>(
    source: &S,
    n: usize,
    config: &LocalConfig,
    mut log: Option<&mut Vec<ResampleEvent>>,
) -> Result<ColorOutcome> {
    if config.max_passes == Some(0) {
        return Err(Error::domain("max_passes must be at least 1"));
    }
    let mut state = PassState {
        seed: config.seed,
        vertices: HashMap::new(),
    };
    let mut stats = RunStats::default();
    let mut budget = config.max_passes.unwrap_or(usize::MAX);
    let mut pass = 0;
    while pass < budget {
        let mut mono = 0u64;
        for (i, edge) in source.pass()?.enumerate() {
            let edge = edge?;
            check_edge(&edge, n, None)?;
            stats.edges_read += 1;
            if pass == 0 {
                for u in edge.iter() {
                    state
                        .vertices
                        .entry(u)
                        .or_insert_with(|| (random_color(derive(config.seed, &[TAG_INITIAL, u.0 as u64])), 0));
                }
            }
            if !state.monochromatic(&edge)? {
                continue;
            }
            mono += 1;
            if state.touched(&edge, pass + 1) {
                continue;
            }
            if let Some(log) = log.as_deref_mut() {
                log.push(ResampleEvent {
                    pass,
                    position: i as u64 + 1,
                    before: edge.iter().map(|u| state.vertices[&u].0).collect(),
                    edge: edge.clone(),
                });
            }
            state.resample(&edge, pass);
            stats.resamples += edge.len();
        }
        pass += 1;
        stats.passes = pass;
        if pass == 1 {
            stats.discovered_vertices = state.vertices.len();
            stats.peak_state_entries = state.vertices.len();
            if config.max_passes.is_none() {
                budget = default_max_passes(state.vertices.len());
            }
        }
        if mono == 0 {
            let coloring: Coloring = state.vertices.iter().map(|(&u, &(c, _))| (u, c)).collect();
            return Ok(ColorOutcome {
                result: Ok(coloring),
                stats,
            });
        }
    }
    Ok(ColorOutcome {
        result: Err(Failure::PassBudgetExhausted { passes: pass }),
        stats,
    })
}

/// Colors the `n`-uniform stream behind `source`, replaying it once per pass.
pub fn local_stream_color<S: EdgeSource + ?Sized>(source: &S, n: usize, config: &LocalConfig) -> Result<ColorOutcome> {
    run(source, n, config, None)
}

/// As [`local_stream_color`], also returning every resample in order.
pub fn local_stream_color_traced<S: EdgeSource + ?Sized>(
    source: &S,
    n: usize,
    config: &LocalConfig,
) -> Result<(ColorOutcome, Vec<ResampleEvent>)> {
    let mut log = Vec::new();
    let out = run(source, n, config, Some(&mut log))?;
    Ok((out, log))
}

/// `(1 - epsilon) 2^(n-1) / e - 1`, the most other edges any edge may meet.
pub fn local_intersection_threshold(n: usize, epsilon: f64) -> f64 {
    (1.0 - epsilon) * 2f64.powi(n as i32 - 1) / std::f64::consts::E - 1.0
}

/// Whether every edge of `h` meets at most [`local_intersection_threshold`] others.
pub fn check_local_precondition(h: &Hypergraph, epsilon: f64) -> bool {
    max_edge_intersections(h) as f64 <= local_intersection_threshold(h.uniformity(), epsilon)
}
