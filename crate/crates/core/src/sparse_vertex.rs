//! Colorers and bounds for hypergraphs on few vertices.
//!
//! When the universe `[v]` is known up front and `v` is at most a small
//! multiple of `n^2`, a uniformly random split of `[v]` into two almost equal
//! classes already leaves each edge monochromatic with probability below
//! `2^-(n-1)`. The streaming colorer fixes such a split before reading
//! anything and only checks edges against it.

use std::borrow::Borrow;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::SliceRandom;

use crate::combinatorics::{binomial, ratio_to_f64};
use crate::error::{Error, Result};
use crate::hypergraph::{check_edge, Color, Coloring, Hyperedge, KColoring, VertexId, MIN_UNIFORMITY};
use crate::outcome::{ColorOutcome, Failure, RunStats};
use crate::rng::{derive, seeded_rng};

const TAG_SPLIT: u64 = 0x5350_4c49;

/// A partition of `[v]` into `k` classes whose sizes differ by at most one.
///
/// The vertices are shuffled with a seed-keyed generator and cut into
/// consecutive chunks, larger chunks first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KSplit {
    k: u32,
    classes: Vec<u32>,
}

impl KSplit {
    pub fn new(v: u32, k: u32, seed: u64) -> Result<Self> {
        if v == 0 || k < 2 {
            return Err(Error::domain(format!("need v >= 1 and k >= 2, got v={v} k={k}")));
        }
        let mut order: Vec<u32> = (0..v).collect();
        order.shuffle(&mut seeded_rng(derive(seed, &[TAG_SPLIT])));
        let (base, extra) = (v / k, v % k);
        let mut classes = vec![0; v as usize];
        let mut pos = 0usize;
        for class in 0..k {
            let size = (base + u32::from(class < extra)) as usize;
            for &i in &order[pos..pos + size] {
                classes[i as usize] = class;
            }
            pos += size;
        }
        Ok(KSplit { k, classes })
    }

    pub fn universe(&self) -> u32 {
        self.classes.len() as u32
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn class_of(&self, u: VertexId) -> Option<u32> {
        let i = u.0.checked_sub(1)?;
        self.classes.get(i as usize).copied()
    }

    pub fn class_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k as usize];
        for &c in &self.classes {
            sizes[c as usize] += 1;
        }
        sizes
    }

    pub fn coloring(&self) -> KColoring {
        self.classes
            .iter()
            .enumerate()
            .map(|(i, &c)| (VertexId(i as u32 + 1), c))
            .collect()
    }
}

/// A two-class [`KSplit`]: `ceil(v/2)` Red vertices and `floor(v/2)` Blue ones.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BalancedSplit(KSplit);

impl BalancedSplit {
    pub fn new(v: u32, seed: u64) -> Result<Self> {
        KSplit::new(v, 2, seed).map(BalancedSplit)
    }

    pub fn universe(&self) -> u32 {
        self.0.universe()
    }

    pub fn color_of(&self, u: VertexId) -> Option<Color> {
        self.0.class_of(u).map(class_color)
    }

    pub fn coloring(&self) -> Coloring {
        classes_to_colors(&self.0.coloring())
    }
}

fn class_color(class: u32) -> Color {
    if class == 0 {
        Color::Red
    } else {
        Color::Blue
    }
}

/// Reads class 0 as Red and every other class as Blue.
pub fn classes_to_colors(c: &KColoring) -> Coloring {
    c.iter().map(|(u, class)| (u, class_color(class))).collect()
}

/// Checks streamed edges against a fixed [`KSplit`], stopping at the first
/// edge inside one class.
#[derive(Clone, Debug)]
pub struct SplitColorer {
    split: KSplit,
    uniformity: usize,
    stats: RunStats,
    failure: Option<Failure>,
}

impl SplitColorer {
    pub fn new(split: KSplit, uniformity: usize) -> Result<Self> {
        if uniformity < MIN_UNIFORMITY {
            return Err(Error::domain(format!("uniformity must be at least {MIN_UNIFORMITY}")));
        }
        let stats = RunStats {
            discovered_vertices: split.classes.len(),
            peak_state_entries: split.classes.len(),
            passes: 1,
            ..RunStats::default()
        };
        Ok(SplitColorer {
            split,
            uniformity,
            stats,
            failure: None,
        })
    }

    /// Checks one edge. The outer error reports a malformed edge; the inner
    /// one a monochromatic edge, after which further edges are ignored.
    pub fn push(&mut self, edge: &Hyperedge) -> Result<Result<(), Failure>> {
        if let Some(f) = &self.failure {
            return Ok(Err(f.clone()));
        }
        check_edge(edge, self.uniformity, Some(self.split.universe()))?;
        self.stats.edges_read += 1;
        let mut classes = edge.iter().map(|u| self.split.class_of(u).expect("checked"));
        let first = classes.next().expect("non-empty edge");
        if classes.all(|c| c == first) {
            let f = Failure::MonochromaticEdge {
                edge: edge.clone(),
                position: self.stats.edges_read,
            };
            self.failure = Some(f.clone());
            return Ok(Err(f));
        }
        Ok(Ok(()))
    }

    pub fn stats(&self) -> &RunStats {
        &self.stats
    }

    pub fn finish(self) -> ColorOutcome<KColoring> {
        let result = match self.failure {
            Some(f) => Err(f),
            None => Ok(self.split.coloring()),
        };
        ColorOutcome {
            result,
            stats: self.stats,
        }
    }
}

/// Runs a [`SplitColorer`] over `edges` with a fresh `k`-way split of `[v]`.
pub fn k_balanced_stream_color<I>(edges: I, v: u32, n: usize, k: u32, seed: u64) -> Result<ColorOutcome<KColoring>>
where
    I: IntoIterator,
    I::Item: Borrow<Hyperedge>,
{
    let mut colorer = SplitColorer::new(KSplit::new(v, k, seed)?, n)?;
    for e in edges {
        if colorer.push(e.borrow())?.is_err() {
            break;
        }
    }
    Ok(colorer.finish())
}

/// Two-coloring with a [`BalancedSplit`]; same seed derivation as `k = 2`.
pub fn balanced_stream_color<I>(edges: I, v: u32, n: usize, seed: u64) -> Result<ColorOutcome>
where
    I: IntoIterator,
    I::Item: Borrow<Hyperedge>,
{
    let out = k_balanced_stream_color(edges, v, n, 2, seed)?;
    Ok(ColorOutcome {
        result: out.result.map(|c| classes_to_colors(&c)),
        stats: out.stats,
    })
}

fn check_vn(v: u64, n: usize) -> Result<()> {
    if n < MIN_UNIFORMITY || v < n as u64 {
        return Err(Error::domain(format!("need n >= {MIN_UNIFORMITY} and v >= n, got v={v} n={n}")));
    }
    Ok(())
}

/// Exact probability that a fixed `n`-subset of `[v]` lies inside one class
/// of a uniform `k`-way balanced split.
pub fn k_mono_prob_exact_ratio(v: u64, n: usize, k: u64) -> Result<BigRational> {
    check_vn(v, n)?;
    if k < 2 {
        return Err(Error::domain("k must be at least 2"));
    }
    let (base, extra) = (v / k, v % k);
    let nn = n as u64;
    let inside = binomial(base + 1, nn) * extra + binomial(base, nn) * (k - extra);
    Ok(BigRational::new(BigInt::from(inside), BigInt::from(binomial(v, nn))))
}

pub fn k_mono_prob_exact(v: u64, n: usize, k: u64) -> Result<f64> {
    k_mono_prob_exact_ratio(v, n, k).map(|r| ratio_to_f64(&r))
}

/// `(C(ceil(v/2), n) + C(floor(v/2), n)) / C(v, n)` as an exact ratio.
pub fn mono_prob_exact_ratio(v: u64, n: usize) -> Result<BigRational> {
    k_mono_prob_exact_ratio(v, n, 2)
}

pub fn mono_prob_exact(v: u64, n: usize) -> Result<f64> {
    k_mono_prob_exact(v, n, 2)
}

/// `2^-(n-1) exp(-(n-1)^2 / 2v)`, an upper bound on [`mono_prob_exact`].
pub fn mono_prob_bound(v: u64, n: usize) -> Result<f64> {
    check_vn(v, n)?;
    let m = n as f64 - 1.0;
    Ok((-m * std::f64::consts::LN_2 - m * m / (2.0 * v as f64)).exp())
}

/// `q 2^-(n-1) exp(-t/8)`: the failure probability bound of
/// [`balanced_stream_color`] on `q` edges over at most `n^2 / t` vertices.
pub fn balanced_failure_bound(n: usize, t: f64, q: u64) -> Result<f64> {
    if n < MIN_UNIFORMITY || t.is_nan() || t < 4.0 {
        return Err(Error::domain(format!("need n >= {MIN_UNIFORMITY} and t >= 4, got n={n} t={t}")));
    }
    let m = n as f64 - 1.0;
    Ok(q as f64 * (-m * std::f64::consts::LN_2 - t / 8.0).exp())
}

/// Lower and upper bounds on the fewest edges of a non-two-colorable
/// `n`-uniform hypergraph on at most `n^2 / t` vertices, for `4 <= t <= n^2/(2n-1)`.
///
/// The upper bound is infinite when `n <= 2t`.
pub fn m_bounds(n: usize, t: f64) -> Result<(f64, f64)> {
    let nf = n as f64;
    if n < MIN_UNIFORMITY || !(t >= 4.0 && t <= nf * nf / (2.0 * nf - 1.0)) {
        return Err(Error::domain(format!("need 4 <= t <= n^2/(2n-1), got n={n} t={t}")));
    }
    let lower = ((nf - 1.0) * std::f64::consts::LN_2 + t / 8.0).exp();
    let upper = if nf > 2.0 * t {
        nf * nf / t * (nf * std::f64::consts::LN_2 + t * nf / (nf - 2.0 * t)).exp()
    } else {
        f64::INFINITY
    };
    Ok((lower, upper))
}

/// The `k`-coloring analogue of [`m_bounds`], for `0 < t <= n^2/(kn-1)`:
/// `k^(n-1) e^(-(k-1)t/2)` and `(n^2/t) k^n e^((k-1)tn/(n-kt))`.
///
/// The upper bound is infinite when `n <= kt`.
pub fn mk_bounds(n: usize, t: f64, k: u32) -> Result<(f64, f64)> {
    let (nf, kf) = (n as f64, k as f64);
    if n < MIN_UNIFORMITY || k < 2 || !(t > 0.0 && t <= nf * nf / (kf * nf - 1.0)) {
        return Err(Error::domain(format!("need k >= 2 and 0 < t <= n^2/(kn-1), got n={n} t={t} k={k}")));
    }
    let lower = ((nf - 1.0) * kf.ln() - (kf - 1.0) * t / 2.0).exp();
    let upper = if nf > kf * t {
        nf * nf / t * (nf * kf.ln() + (kf - 1.0) * t * nf / (nf - kf * t)).exp()
    } else {
        f64::INFINITY
    };
    Ok((lower, upper))
}
