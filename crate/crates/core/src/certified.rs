//! Streaming delayed recoloring that never returns an invalid coloring.
//!
//! A final coloring can only be invalid in three ways:
//!
//! * an initially monochromatic edge had no recolorable vertex and stayed
//!   monochromatic;
//! * an edge whose initially red vertices are all recolorable ended up
//!   entirely Blue;
//! * the same with the colors swapped.
//!
//! The first is detected when the edge arrives. For the other two, the
//! engine stores the red part (resp. blue part) of every edge where that
//! part is all recolorable, and rechecks the stored sets at the end. The two
//! stores are each capped at `cap` vertex entries (default `n`). Exceeding a
//! cap aborts the run.

use std::borrow::Borrow;

use crate::error::{Error, Result};
use crate::hypergraph::{Color, Hyperedge, VertexId, MIN_UNIFORMITY};
use crate::outcome::{ColorOutcome, Failure};
use crate::recolor::{EdgeEvent, RecolorState, StreamRecolor};
use crate::tape::Tape;

/// The stored residual sets.
///
/// `blue` holds red parts that could turn entirely Blue; `red` holds blue
/// parts that could turn entirely Red.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ResidualStore {
    blue: Vec<Vec<VertexId>>,
    red: Vec<Vec<VertexId>>,
    blue_size: usize,
    red_size: usize,
}

impl ResidualStore {
    pub fn blue_sets(&self) -> &[Vec<VertexId>] {
        &self.blue
    }

    pub fn red_sets(&self) -> &[Vec<VertexId>] {
        &self.red
    }

    /// Sum of the sizes of the stored blue-guard sets.
    pub fn blue_size(&self) -> usize {
        self.blue_size
    }

    pub fn red_size(&self) -> usize {
        self.red_size
    }
}

/// The vertices of `edge` initially colored `side`, if non-empty and all recolorable.
fn guarded_part(edge: &Hyperedge, state: &RecolorState, side: Color) -> Option<Vec<VertexId>> {
    let mut part = Vec::new();
    for u in edge.iter() {
        let s = state.get(u).expect("instantiated");
        if s.initial == side {
            if !s.recolor {
                return None;
            }
            part.push(u);
        }
    }
    (!part.is_empty()).then_some(part)
}

pub struct CertifiedRecolor<'t, T: ?Sized> {
    engine: StreamRecolor<'t, T>,
    residuals: ResidualStore,
    cap: usize,
    failure: Option<Failure>,
    peak: usize,
}

impl<'t, T: Tape + ?Sized> CertifiedRecolor<'t, T> {
    pub fn new(tape: &'t T, p: f64, cap: usize) -> Result<Self> {
        if cap == 0 {
            return Err(Error::domain("residual cap must be at least 1"));
        }
        Ok(CertifiedRecolor {
            engine: StreamRecolor::new(tape, p),
            residuals: ResidualStore::default(),
            cap,
            failure: None,
            peak: 0,
        })
    }

    /// Processes one edge. Once a failure is recorded, later edges are ignored.
    pub fn push(&mut self, edge: &Hyperedge) -> Result<(), Failure> {
        if let Some(f) = &self.failure {
            return Err(f.clone());
        }
        let event = self.engine.push(edge);
        let position = self.engine.stats().edges_read;
        let outcome = self.guard(edge, event, position);
        self.peak = self
            .peak
            .max(self.engine.state().len() + self.residuals.blue_size + self.residuals.red_size);
        if let Err(f) = &outcome {
            self.failure = Some(f.clone());
        }
        outcome
    }

    fn guard(&mut self, edge: &Hyperedge, event: EdgeEvent, position: u64) -> Result<(), Failure> {
        if event == EdgeEvent::NoRecolorableVertex {
            return Err(Failure::UnfixableMonoEdge { position });
        }
        let state = self.engine.state();
        if let Some(part) = guarded_part(edge, state, Color::Red) {
            if self.residuals.blue_size + part.len() > self.cap {
                return Err(Failure::ResidualOverflowBlue { position });
            }
            self.residuals.blue_size += part.len();
            self.residuals.blue.push(part);
        }
        if let Some(part) = guarded_part(edge, state, Color::Blue) {
            if self.residuals.red_size + part.len() > self.cap {
                return Err(Failure::ResidualOverflowRed { position });
            }
            self.residuals.red_size += part.len();
            self.residuals.red.push(part);
        }
        Ok(())
    }

    pub fn residuals(&self) -> &ResidualStore {
        &self.residuals
    }

    pub fn state(&self) -> &RecolorState {
        self.engine.state()
    }

    pub fn finish(self) -> ColorOutcome {
        let mut stats = self.engine.stats().clone();
        stats.blue_residual_size = self.residuals.blue_size;
        stats.red_residual_size = self.residuals.red_size;
        stats.peak_state_entries = self.peak;
        if let Some(f) = self.failure {
            return ColorOutcome { result: Err(f), stats };
        }
        let state = self.engine.state();
        let entirely = |set: &[VertexId], color: Color| {
            set.iter().all(|&u| state.get(u).expect("instantiated").current == color)
        };
        let result = if self.residuals.blue.iter().any(|s| entirely(s, Color::Blue)) {
            Err(Failure::FinalCheckBlue)
        } else if self.residuals.red.iter().any(|s| entirely(s, Color::Red)) {
            Err(Failure::FinalCheckRed)
        } else {
            Ok(state.coloring())
        };
        ColorOutcome { result, stats }
    }
}

/// Runs [`CertifiedRecolor`] over `edges`. Panics if `cap` is zero.
pub fn certified_stream_color<T, I>(edges: I, tape: &T, p: f64, cap: usize) -> ColorOutcome
where
    T: Tape + ?Sized,
    I: IntoIterator,
    I::Item: Borrow<Hyperedge>,
{
    let mut engine = CertifiedRecolor::new(tape, p, cap).expect("cap >= 1");
    for e in edges {
        if engine.push(e.borrow()).is_err() {
            break;
        }
    }
    engine.finish()
}

/// Residual sizes `(blue, red)` the certified engine would accumulate over
/// the whole stream with no cap and no early abort.
pub fn residual_sizes<T, I>(edges: I, tape: &T, p: f64) -> (usize, usize)
where
    T: Tape + ?Sized,
    I: IntoIterator,
    I::Item: Borrow<Hyperedge>,
{
    let mut state = RecolorState::default();
    let (mut blue, mut red) = (0, 0);
    for e in edges {
        let e = e.borrow();
        for u in e.iter() {
            state.discover(u, tape, p);
        }
        blue += guarded_part(e, &state, Color::Red).map_or(0, |s| s.len());
        red += guarded_part(e, &state, Color::Blue).map_or(0, |s| s.len());
    }
    (blue, red)
}

/// `q n p 2^-n (1 + p)^(n-1)`, the expected size of either residual store
/// over `q` edges of a uniform random initial coloring.
pub fn residual_expected_size_bound(n: usize, q: u64, p: f64) -> Result<f64> {
    if n < MIN_UNIFORMITY || !(p > 0.0 && p < 1.0) {
        return Err(Error::domain(format!("need n >= {MIN_UNIFORMITY} and 0 < p < 1, got n={n} p={p}")));
    }
    let nf = n as f64;
    Ok(q as f64 * nf * p * 2f64.powi(-(n as i32)) * (1.0 + p).powi(n as i32 - 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::{validate_coloring, Hypergraph};
    use crate::recolor::{p_default, stream_color};
    use crate::stream_io::gen_uniform_random;
    use crate::tape::{FixedTape, RandomTape};

    fn edge(ids: &[u32]) -> Hyperedge {
        Hyperedge::from_ids(ids).unwrap()
    }

    #[test]
    fn clean_stream_returns_initial_coloring() {
        let tape = FixedTape::new()
            .with(1, Color::Red, false, 1)
            .with(2, Color::Blue, false, 2)
            .with(3, Color::Red, false, 3)
            .with(4, Color::Blue, false, 4);
        let edges = [edge(&[1, 2, 3]), edge(&[2, 3, 4])];
        let mut engine = CertifiedRecolor::new(&tape, 0.5, 3).unwrap();
        for e in &edges {
            engine.push(e).unwrap();
        }
        assert_eq!(engine.residuals().blue_size(), 0);
        assert_eq!(engine.residuals().red_size(), 0);
        let initial = engine.state().initial_coloring();
        let out = engine.finish();
        assert_eq!(out.result, Ok(initial));
    }

    #[test]
    fn empty_stream_succeeds() {
        let out = certified_stream_color(Vec::<Hyperedge>::new(), &RandomTape::new(0), 0.1, 3);
        assert!(out.coloring().unwrap().is_empty());
    }

    #[test]
    fn unfixable_mono_edge_fails() {
        let tape = FixedTape::new()
            .with(1, Color::Red, false, 1)
            .with(2, Color::Red, false, 2)
            .with(3, Color::Red, false, 3);
        let out = certified_stream_color([edge(&[1, 2, 3])], &tape, 0.5, 3);
        assert_eq!(out.result, Err(Failure::UnfixableMonoEdge { position: 1 }));
        assert_eq!(out.failure().unwrap().reason(), "unfixable_mono_edge");
    }

    #[test]
    fn final_check_catches_edge_turned_blue() {
        // {1,2,3} all Red with 1 and 2 recolorable flips 1; {2,4,5} flips 2;
        // {1,2,6} has red part {1,2}, all recolorable, and ends entirely Blue.
        let tape = FixedTape::new()
            .with(1, Color::Red, true, 1)
            .with(2, Color::Red, true, 2)
            .with(3, Color::Red, false, 3)
            .with(4, Color::Red, false, 4)
            .with(5, Color::Red, false, 5)
            .with(6, Color::Blue, false, 6);
        let edges = [edge(&[1, 2, 6]), edge(&[1, 2, 3]), edge(&[2, 4, 5])];
        let (plain, _) = stream_color(&edges, &tape, 0.5);
        let h = Hypergraph::from_edges(3, edges.iter().cloned()).unwrap();
        assert_eq!(validate_coloring(&h, &plain).unwrap(), vec![&edges[0]]);

        let out = certified_stream_color(&edges, &tape, 0.5, 10);
        assert_eq!(out.result, Err(Failure::FinalCheckBlue));
        assert_eq!(out.stats.blue_residual_size, 2);
    }

    #[test]
    fn final_check_catches_edge_turned_red() {
        let tape = FixedTape::new()
            .with(1, Color::Blue, true, 1)
            .with(2, Color::Blue, true, 2)
            .with(3, Color::Blue, false, 3)
            .with(4, Color::Blue, false, 4)
            .with(5, Color::Blue, false, 5)
            .with(6, Color::Red, false, 6);
        let edges = [edge(&[1, 2, 6]), edge(&[1, 2, 3]), edge(&[2, 4, 5])];
        let out = certified_stream_color(&edges, &tape, 0.5, 10);
        assert_eq!(out.result, Err(Failure::FinalCheckRed));
    }

    #[test]
    fn overflow_aborts() {
        let tape = FixedTape::new()
            .with(1, Color::Red, true, 1)
            .with(2, Color::Blue, true, 2)
            .with(3, Color::Blue, false, 3)
            .with(4, Color::Red, true, 4);
        // Red parts {1} then {1,4}: sizes 1 then 3 > cap 2.
        let edges = [edge(&[1, 2, 3]), edge(&[1, 3, 4])];
        let out = certified_stream_color(&edges, &tape, 0.5, 2);
        assert_eq!(out.result, Err(Failure::ResidualOverflowBlue { position: 2 }));
        let tape = FixedTape::new()
            .with(1, Color::Blue, true, 1)
            .with(2, Color::Red, true, 2)
            .with(3, Color::Red, false, 3)
            .with(4, Color::Blue, true, 4);
        let out = certified_stream_color(&edges, &tape, 0.5, 2);
        assert_eq!(out.result, Err(Failure::ResidualOverflowRed { position: 2 }));
        assert!(CertifiedRecolor::new(&tape, 0.5, 0).is_err());
    }

    #[test]
    fn stored_sets_are_recolorable_and_capped() {
        let p = 0.3;
        for seed in 0..200u64 {
            let edges: Vec<_> = gen_uniform_random(40, 5, 120, seed).unwrap().collect();
            let tape = RandomTape::new(seed);
            let mut engine = CertifiedRecolor::new(&tape, p, 5).unwrap();
            for e in &edges {
                if engine.push(e).is_err() {
                    break;
                }
            }
            let store = engine.residuals().clone();
            let state = engine.state();
            for set in store.blue_sets() {
                assert!(!set.is_empty());
                assert!(set.iter().all(|&u| state.get(u).unwrap().recolor && state.get(u).unwrap().initial == Color::Red));
            }
            for set in store.red_sets() {
                assert!(set.iter().all(|&u| state.get(u).unwrap().recolor && state.get(u).unwrap().initial == Color::Blue));
            }
            assert!(store.blue_size() <= 5 && store.red_size() <= 5);
            let distinct = engine.state().len();
            let out = engine.finish();
            assert!(out.stats.peak_state_entries <= distinct + 2 * 5);
        }
    }

    #[test]
    fn never_returns_invalid_coloring() {
        let mut successes = 0;
        for seed in 0..500u64 {
            let (n, v, q) = (4, 12, 30);
            let edges: Vec<_> = gen_uniform_random(v, n, q, seed).unwrap().collect();
            let h = Hypergraph::from_edges(n, edges.iter().cloned()).unwrap();
            let out = certified_stream_color(&edges, &RandomTape::new(seed), 0.35, 4 * n);
            if let Ok(c) = &out.result {
                assert!(validate_coloring(&h, c).unwrap().is_empty(), "seed {seed}");
                successes += 1;
            }
        }
        assert!(successes > 50, "{successes}");
    }

    #[test]
    fn expected_size_bound_values() {
        assert_eq!(residual_expected_size_bound(12, 0, 0.1).unwrap(), 0.0);
        let p = p_default(12).unwrap();
        let b = residual_expected_size_bound(12, 900, p).unwrap();
        // Independently evaluated: 0.348040356...
        assert!((b - 0.348_040_356).abs() < 1e-8, "{b}");
        assert!(residual_expected_size_bound(2, 10, 0.1).is_err());
        assert!(residual_expected_size_bound(5, 10, 1.0).is_err());
    }

    #[test]
    fn expected_size_bound_at_large_n() {
        // At q = 0.1 sqrt(n / ln n) 2^n and p = p_default(n) the bound is at most n / 20.
        for n in [100usize, 128, 200, 400, 800] {
            let nf = n as f64;
            let p = p_default(n).unwrap();
            // Evaluate in log space: q would overflow u64.
            let log_q = (0.1 * (nf / nf.ln()).sqrt()).ln() + nf * std::f64::consts::LN_2;
            let log_b = log_q + nf.ln() + p.ln() - nf * std::f64::consts::LN_2 + (nf - 1.0) * p.ln_1p();
            assert!(log_b.exp() <= nf / 20.0, "n={n}: {}", log_b.exp());
            if n <= 60 {
                let b = residual_expected_size_bound(n, log_q.exp() as u64, p).unwrap();
                assert!((b - log_b.exp()).abs() / b < 1e-6);
            }
        }
    }

    #[test]
    fn expected_size_bound_matches_simulation() {
        let (n, v, q) = (6usize, 60u32, 200u64);
        let p = 0.3;
        let trials = 2000u64;
        let mut sum = 0.0;
        for seed in 0..trials {
            let edges: Vec<_> = gen_uniform_random(v, n, q, seed).unwrap().collect();
            sum += residual_sizes(&edges, &RandomTape::new(seed + 7_000), p).0 as f64;
        }
        let mean = sum / trials as f64;
        let expected = residual_expected_size_bound(n, q, p).unwrap();
        assert!((mean - expected).abs() / expected < 0.1, "{mean} vs {expected}");
    }
}
