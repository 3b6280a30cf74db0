//! Delayed recoloring, offline and streaming.
//!
//! Both engines start from the tape's initial coloring and let a vertex flip
//! at most once, and only when its recoloring bit is set. The offline engine
//! walks vertices in permutation order. A vertex flips when some edge
//! containing it was monochromatic initially and still is. The streaming engine
//! handles one edge at a time. When an initially monochromatic edge
//! arrives, it flips the edge's first recolorable vertex in permutation
//! order, unless that vertex has already flipped.
//!
//! For every hypergraph, tape and arrival order the two engines flip exactly
//! the same vertices. In the offline walk, an initially monochromatic edge
//! is untouched until its first recolorable vertex comes up, and then that
//! vertex flips. No other vertex ever flips.

use std::borrow::Borrow;
use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::hypergraph::{Color, Coloring, Hyperedge, Hypergraph, VertexId, MIN_UNIFORMITY};
use crate::outcome::RunStats;
use crate::tape::Tape;

/// The recoloring probability `(ln n - ln ln n) / (2n)`.
pub fn p_default(n: usize) -> Result<f64> {
    if n < MIN_UNIFORMITY {
        return Err(Error::domain(format!("p_default needs n >= {MIN_UNIFORMITY}, got {n}")));
    }
    let ln = (n as f64).ln();
    Ok((ln - ln.ln()) / (2.0 * n as f64))
}

/// What the engine holds for one discovered vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VertexState {
    pub initial: Color,
    pub current: Color,
    pub recolor: bool,
    pub priority: u64,
}

impl VertexState {
    pub fn flipped(&self) -> bool {
        self.initial != self.current
    }
}

/// Per-vertex table of discovered vertices.
#[derive(Clone, Debug, Default)]
pub struct RecolorState {
    vertices: HashMap<VertexId, VertexState>,
}

impl RecolorState {
    pub fn get(&self, u: VertexId) -> Option<&VertexState> {
        self.vertices.get(&u)
    }

    /// Instantiates `u` from the tape if unseen; returns whether it was new.
    pub fn discover<T: Tape + ?Sized>(&mut self, u: VertexId, tape: &T, p: f64) -> bool {
        let mut fresh = false;
        self.vertices.entry(u).or_insert_with(|| {
            fresh = true;
            let initial = tape.initial_color(u);
            VertexState {
                initial,
                current: initial,
                recolor: tape.recolor_bit(u, p),
                priority: tape.priority(u),
            }
        });
        fresh
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn coloring(&self) -> Coloring {
        self.vertices.iter().map(|(&u, s)| (u, s.current)).collect()
    }

    pub fn initial_coloring(&self) -> Coloring {
        self.vertices.iter().map(|(&u, s)| (u, s.initial)).collect()
    }

    fn state(&self, u: VertexId) -> &VertexState {
        self.vertices
            .get(&u)
            .unwrap_or_else(|| panic!("vertex {u} not instantiated"))
    }

    fn initially_monochromatic(&self, edge: &Hyperedge) -> bool {
        let first = self.state(edge.vertices()[0]).initial;
        edge.iter().all(|u| self.state(u).initial == first)
    }

    fn currently_monochromatic(&self, edge: &Hyperedge) -> bool {
        let first = self.state(edge.vertices()[0]).current;
        edge.iter().all(|u| self.state(u).current == first)
    }

    fn flip(&mut self, u: VertexId) {
        let s = self.vertices.get_mut(&u).expect("instantiated");
        debug_assert!(!s.flipped(), "vertex {u} flipped twice");
        s.current = s.current.flip();
    }
}

/// The recolorable vertex of `edge` that comes first in permutation order.
///
/// Panics if a vertex of `edge` has not been instantiated in `state`.
pub fn first_flippable(edge: &Hyperedge, state: &RecolorState) -> Option<VertexId> {
    edge.iter()
        .filter(|&u| state.state(u).recolor)
        .min_by_key(|&u| (state.state(u).priority, u))
}

/// When an initially monochromatic edge triggers a flip.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum FlipRule {
    /// Always, unless the chosen vertex already flipped. This is the rule
    /// whose output matches the offline engine.
    #[default]
    InitialMonochromatic,
    /// Only if the edge is still monochromatic under the current coloring
    /// when it arrives. Can flip strictly fewer vertices than the offline
    /// engine.
    StillMonochromatic,
}

/// What happened when an edge was pushed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeEvent {
    /// Not monochromatic under the initial coloring.
    Bichromatic,
    Flipped(VertexId),
    /// Initially monochromatic but already repaired by an earlier flip.
    AlreadyFixed,
    /// Initially monochromatic with no recolorable vertex; it stays monochromatic.
    NoRecolorableVertex,
}

/// One-pass streaming delayed recoloring.
pub struct StreamRecolor<'t, T: ?Sized> {
    tape: &'t T,
    p: f64,
    rule: FlipRule,
    state: RecolorState,
    stats: RunStats,
    flip_log: Vec<VertexId>,
}

impl<'t, T: Tape + ?Sized> StreamRecolor<'t, T> {
    pub fn new(tape: &'t T, p: f64) -> Self {
        StreamRecolor {
            tape,
            p,
            rule: FlipRule::default(),
            state: RecolorState::default(),
            stats: RunStats::default(),
            flip_log: Vec::new(),
        }
    }

    pub fn with_rule(mut self, rule: FlipRule) -> Self {
        self.rule = rule;
        self
    }

    pub fn push(&mut self, edge: &Hyperedge) -> EdgeEvent {
        self.stats.edges_read += 1;
        for u in edge.iter() {
            self.state.discover(u, self.tape, self.p);
        }
        self.stats.discovered_vertices = self.state.len();
        self.stats.peak_state_entries = self.stats.peak_state_entries.max(self.state.len());

        if !self.state.initially_monochromatic(edge) {
            return EdgeEvent::Bichromatic;
        }
        if self.rule == FlipRule::StillMonochromatic && !self.state.currently_monochromatic(edge) {
            return EdgeEvent::AlreadyFixed;
        }
        match first_flippable(edge, &self.state) {
            None => {
                self.stats.unfixable_edges += 1;
                EdgeEvent::NoRecolorableVertex
            }
            Some(u) if self.state.state(u).flipped() => EdgeEvent::AlreadyFixed,
            Some(u) => {
                self.state.flip(u);
                self.stats.flips += 1;
                self.flip_log.push(u);
                EdgeEvent::Flipped(u)
            }
        }
    }

    pub fn state(&self) -> &RecolorState {
        &self.state
    }

    pub fn stats(&self) -> &RunStats {
        &self.stats
    }

    /// Vertices in the order they flipped.
    pub fn flip_log(&self) -> &[VertexId] {
        &self.flip_log
    }

    pub fn finish(self) -> (Coloring, RunStats) {
        (self.state.coloring(), self.stats)
    }
}

/// Runs [`StreamRecolor`] over `edges`.
pub fn stream_color<T, I>(edges: I, tape: &T, p: f64) -> (Coloring, RunStats)
where
    T: Tape + ?Sized,
    I: IntoIterator,
    I::Item: Borrow<Hyperedge>,
{
    let mut engine = StreamRecolor::new(tape, p);
    for e in edges {
        engine.push(e.borrow());
    }
    engine.finish()
}

/// Full trace of an offline run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OfflineRun {
    pub initial: Coloring,
    pub coloring: Coloring,
    /// Vertices in the order they flipped.
    pub flips: Vec<VertexId>,
}

/// Offline delayed recoloring with the whole hypergraph in memory.
///
/// Colors the vertices that appear in some edge; isolated vertices of a
/// declared universe are left out, as a stream would never reveal them.
pub fn offline_run<T: Tape + ?Sized>(h: &Hypergraph, tape: &T, p: f64) -> OfflineRun {
    let mut state = RecolorState::default();
    let mut order = h.edge_vertices();
    for &u in &order {
        state.discover(u, tape, p);
    }
    let initial = state.initial_coloring();

    let mut touching: HashMap<VertexId, Vec<usize>> = HashMap::new();
    for (i, e) in h.edges().iter().enumerate() {
        if state.initially_monochromatic(e) {
            for u in e.iter() {
                touching.entry(u).or_default().push(i);
            }
        }
    }

    order.sort_unstable_by_key(|&u| tape.order_key(u));
    let mut flips = Vec::new();
    for u in order {
        if !state.state(u).recolor {
            continue;
        }
        let Some(edges) = touching.get(&u) else {
            continue;
        };
        if edges.iter().any(|&i| state.currently_monochromatic(&h.edges()[i])) {
            state.flip(u);
            flips.push(u);
        }
    }
    OfflineRun {
        initial,
        coloring: state.coloring(),
        flips,
    }
}

pub fn offline_color<T: Tape + ?Sized>(h: &Hypergraph, tape: &T, p: f64) -> Coloring {
    offline_run(h, tape, p).coloring
}

#[cfg(test)]
mod tests {
    use std::collections::HashSet;

    use proptest::prelude::*;

    use super::*;
    use crate::hypergraph::validate_coloring;
    use crate::stream_io::gen_uniform_random;
    use crate::tape::{FixedTape, RandomTape};

    fn edge(ids: &[u32]) -> Hyperedge {
        Hyperedge::from_ids(ids).unwrap()
    }

    #[test]
    fn p_default_values() {
        // Independently evaluated in double precision.
        assert!((p_default(100).unwrap() - 0.015_389_952_8).abs() < 1e-9);
        assert!((p_default(12).unwrap() - 0.065_611_314_85).abs() < 1e-9);
        assert!((p_default(3).unwrap() - 0.167_427_410_2).abs() < 1e-9);
        // Within the tolerances quoted alongside the rounded figures.
        assert!((p_default(100).unwrap() - 0.0153900).abs() < 1e-6);
        assert!((p_default(12).unwrap() - 0.065605).abs() < 1e-5);
        assert!((p_default(3).unwrap() - 0.167435).abs() < 1e-5);
        assert!(p_default(2).is_err());
        for n in 3..2000 {
            let p = p_default(n).unwrap();
            assert!(p > 0.0 && p < 1.0);
        }
    }

    fn hand_tape() -> FixedTape {
        FixedTape::new()
            .with(1, Color::Red, true, 3)
            .with(2, Color::Red, true, 1)
            .with(3, Color::Red, true, 2)
    }

    #[test]
    fn hand_trace_single_edge() {
        let h = Hypergraph::from_edges(3, [edge(&[1, 2, 3])]).unwrap();
        let tape = hand_tape();
        let offline = offline_run(&h, &tape, 0.5);
        assert_eq!(offline.flips, vec![VertexId(2)]);
        assert_eq!(offline.coloring.get(VertexId(1)), Some(Color::Red));
        assert_eq!(offline.coloring.get(VertexId(2)), Some(Color::Blue));
        assert_eq!(offline.coloring.get(VertexId(3)), Some(Color::Red));
        let (streamed, stats) = stream_color(h.edges(), &tape, 0.5);
        assert_eq!(streamed, offline.coloring);
        assert_eq!(stats.flips, 1);
    }

    #[test]
    fn repeated_edge_flips_once() {
        let tape = hand_tape();
        let mut engine = StreamRecolor::new(&tape, 0.5);
        let e = edge(&[1, 2, 3]);
        assert_eq!(engine.push(&e), EdgeEvent::Flipped(VertexId(2)));
        assert_eq!(engine.push(&e), EdgeEvent::AlreadyFixed);
        assert_eq!(engine.stats().flips, 1);
    }

    #[test]
    fn bichromatic_edge_only_updates_state() {
        let tape = FixedTape::new()
            .with(1, Color::Red, true, 1)
            .with(2, Color::Blue, true, 2)
            .with(3, Color::Red, true, 3);
        let mut engine = StreamRecolor::new(&tape, 0.5);
        assert_eq!(engine.push(&edge(&[1, 2, 3])), EdgeEvent::Bichromatic);
        assert_eq!(engine.state().len(), 3);
        assert_eq!(engine.stats().flips, 0);
    }

    #[test]
    fn no_recolorable_vertex_is_recorded() {
        let tape = FixedTape::new()
            .with(1, Color::Blue, false, 1)
            .with(2, Color::Blue, false, 2)
            .with(3, Color::Blue, false, 3);
        let (c, stats) = stream_color([edge(&[1, 2, 3])], &tape, 0.5);
        assert_eq!(stats.unfixable_edges, 1);
        assert_eq!(c.red_count(), 0);
    }

    #[test]
    fn first_flippable_examples() {
        let mut state = RecolorState::default();
        let tape = FixedTape::new()
            .with(1, Color::Red, true, 70)
            .with(2, Color::Red, false, 20)
            .with(3, Color::Red, true, 90);
        for u in 1..=3 {
            state.discover(VertexId(u), &tape, 0.5);
        }
        assert_eq!(first_flippable(&edge(&[1, 2, 3]), &state), Some(VertexId(1)));

        let none = FixedTape::new()
            .with(1, Color::Red, false, 1)
            .with(2, Color::Red, false, 2)
            .with(3, Color::Red, false, 3);
        let mut s2 = RecolorState::default();
        for u in 1..=3 {
            s2.discover(VertexId(u), &none, 0.5);
        }
        assert_eq!(first_flippable(&edge(&[1, 2, 3]), &s2), None);

        let all = FixedTape::new()
            .with(1, Color::Red, true, 5)
            .with(2, Color::Red, true, 4)
            .with(3, Color::Red, true, 4);
        let mut s3 = RecolorState::default();
        for u in 1..=3 {
            s3.discover(VertexId(u), &all, 0.5);
        }
        // Equal priorities fall back to the smaller id.
        assert_eq!(first_flippable(&edge(&[3, 1, 2]), &s3), Some(VertexId(2)));
    }

    #[test]
    fn identity_cases() {
        let edges: Vec<_> = gen_uniform_random(30, 4, 80, 1).unwrap().collect();
        let h = Hypergraph::from_edges(4, edges.iter().cloned()).unwrap();
        for seed in 0..20 {
            let tape = RandomTape::new(seed);
            let run = offline_run(&h, &tape, 0.0);
            assert_eq!(run.coloring, run.initial);
        }
        // No initially monochromatic edge: nothing flips even with p = 1.
        let tape = FixedTape::new()
            .with(1, Color::Red, true, 1)
            .with(2, Color::Blue, true, 2)
            .with(3, Color::Red, true, 3)
            .with(4, Color::Blue, true, 4);
        let h = Hypergraph::from_edges(3, [edge(&[1, 2, 3]), edge(&[2, 3, 4])]).unwrap();
        let run = offline_run(&h, &tape, 1.0);
        assert_eq!(run.coloring, run.initial);
    }

    /// Two initially red edges share vertex 2, whose flip for the second edge
    /// repairs the first before vertex 1 gets its turn in the stream.
    #[test]
    fn still_monochromatic_rule_can_diverge_from_offline() {
        let tape = FixedTape::new()
            .with(1, Color::Red, true, 1)
            .with(2, Color::Red, true, 2)
            .with(3, Color::Red, false, 3)
            .with(4, Color::Red, false, 4)
            .with(5, Color::Red, false, 5);
        let a = edge(&[1, 2, 3]);
        let b = edge(&[2, 4, 5]);
        let h = Hypergraph::from_edges(3, [a.clone(), b.clone()]).unwrap();
        let offline = offline_color(&h, &tape, 0.5);
        assert_eq!(offline.red_count(), 3);

        let mut strict = StreamRecolor::new(&tape, 0.5).with_rule(FlipRule::StillMonochromatic);
        strict.push(&b);
        strict.push(&a);
        let (strict_coloring, _) = strict.finish();
        assert_eq!(strict_coloring.get(VertexId(1)), Some(Color::Red));
        assert_ne!(strict_coloring, offline);

        let (default_coloring, _) = stream_color([&b, &a], &tape, 0.5);
        assert_eq!(default_coloring, offline);
    }

    #[test]
    fn each_vertex_flips_at_most_once() {
        for seed in 0..50u64 {
            let edges: Vec<_> = gen_uniform_random(12, 3, 200, seed).unwrap().collect();
            let h = Hypergraph::from_edges(3, edges.iter().cloned()).unwrap();
            let tape = RandomTape::new(seed ^ 0xabc);
            let run = offline_run(&h, &tape, 0.4);
            let unique: HashSet<_> = run.flips.iter().collect();
            assert_eq!(unique.len(), run.flips.len());
            let mut engine = StreamRecolor::new(&tape, 0.4);
            for e in &edges {
                engine.push(e);
            }
            let unique: HashSet<_> = engine.flip_log().iter().collect();
            assert_eq!(unique.len(), engine.flip_log().len());
            // Every flipped vertex differs from its initial color, nothing else does.
            for (u, c) in run.coloring.iter() {
                assert_eq!(c != run.initial.get(u).unwrap(), run.flips.contains(&u));
            }
        }
    }

    #[test]
    fn delayed_recoloring_beats_random_coloring_on_dense_instance() {
        // 40 edges on 10 vertices at n=4: a random coloring fails often, recoloring helps.
        let p = 0.3;
        let mut valid = 0;
        for seed in 0..200u64 {
            let edges: Vec<_> = gen_uniform_random(10, 4, 12, seed).unwrap().collect();
            let h = Hypergraph::from_edges(4, edges).unwrap();
            let c = offline_color(&h, &RandomTape::new(seed), p);
            if validate_coloring(&h, &c).unwrap().is_empty() {
                valid += 1;
            }
        }
        assert!(valid > 100, "valid = {valid}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn streaming_matches_offline(
            n in 3usize..8,
            extra in 0u32..40,
            q in 0u64..150,
            seed: u64,
            tape_seed: u64,
            order_seed: u64,
            p in 0.0f64..1.0,
        ) {
            let v = n as u32 + extra;
            let mut edges: Vec<_> = gen_uniform_random(v, n, q, seed).unwrap().collect();
            let h = Hypergraph::from_edges(n, edges.iter().cloned()).unwrap();
            let tape = RandomTape::new(tape_seed);
            let offline = offline_color(&h, &tape, p);
            use rand::seq::SliceRandom;
            edges.shuffle(&mut crate::rng::seeded_rng(order_seed));
            let (streamed, stats) = stream_color(&edges, &tape, p);
            prop_assert_eq!(streamed, offline);
            prop_assert!(stats.peak_state_entries <= v as usize);
        }

        #[test]
        fn tape_is_order_independent(seed: u64, us in proptest::collection::vec(1u32..1000, 1..50)) {
            let tape = RandomTape::new(seed);
            let mut forward = RecolorState::default();
            for &u in &us {
                forward.discover(VertexId(u), &tape, 0.3);
            }
            let mut backward = RecolorState::default();
            for &u in us.iter().rev() {
                backward.discover(VertexId(u), &tape, 0.3);
            }
            for &u in &us {
                prop_assert_eq!(forward.get(VertexId(u)), backward.get(VertexId(u)));
            }
        }
    }
}
