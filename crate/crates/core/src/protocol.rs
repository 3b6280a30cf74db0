//! A one-round two-player coloring protocol built from random lists.
//!
//! Alice holds `H_A`, Bob holds `H_B`, both with at most `q_cap` edges over
//! `[v]`. They share a collection of `r` lists of `k` colorings each. Alice
//! names a list all of whose colorings are valid for `H_A`; Bob answers with
//! a coloring from that list valid for `H_B`. Whenever the collection is
//! good (see [`verify_goodness`]) the answer is valid for `H_A ∪ H_B`.
//!
//! Everything here is exhaustive and only meant for tiny `v` and `n`.

use crate::combinatorics::binomial;
use crate::error::{Error, Result};
use crate::hypergraph::{validate_coloring, Color, Coloring, Hyperedge, Hypergraph, VertexId, MIN_UNIFORMITY};
use crate::rng::derive;

const TAG_LISTS: u64 = 0x4c49_5354;

/// Largest `C(v, n)` for which [`verify_goodness`] enumerates hypergraphs.
pub const MAX_ENUMERATED_EDGES: u64 = 20;
/// Largest `q_cap` for which [`verify_goodness`] enumerates hypergraphs.
pub const MAX_ENUMERATED_Q: usize = 2;

/// `r` lists of `k` colorings of `[v]`, shared by both players.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ListCollection {
    v: u32,
    n: usize,
    q_cap: usize,
    lists: Vec<Vec<Coloring>>,
}

impl ListCollection {
    /// Wraps explicit lists. Every list must be non-empty and of equal
    /// length, and every coloring must color exactly `[v]`.
    pub fn from_lists(v: u32, n: usize, q_cap: usize, lists: Vec<Vec<Coloring>>) -> Result<Self> {
        check_params(v, n)?;
        let k = lists.first().map_or(0, Vec::len);
        if k == 0 || lists.iter().any(|l| l.len() != k) {
            return Err(Error::domain("lists must be non-empty and of equal length"));
        }
        for c in lists.iter().flatten() {
            if c.len() != v as usize || (1..=v).any(|u| c.get(VertexId(u)).is_none()) {
                return Err(Error::domain(format!("every coloring must color exactly 1..={v}")));
            }
        }
        Ok(ListCollection { v, n, q_cap, lists })
    }

    pub fn universe(&self) -> u32 {
        self.v
    }

    pub fn uniformity(&self) -> usize {
        self.n
    }

    pub fn q_cap(&self) -> usize {
        self.q_cap
    }

    pub fn lists(&self) -> &[Vec<Coloring>] {
        &self.lists
    }

    pub fn list(&self, i: usize) -> Option<&[Coloring]> {
        self.lists.get(i).map(Vec::as_slice)
    }

    /// Bits needed for Alice's message.
    pub fn message_bits(&self) -> u32 {
        usize::BITS - (self.lists.len() - 1).leading_zeros()
    }
}

fn check_params(v: u32, n: usize) -> Result<()> {
    if n < MIN_UNIFORMITY || (v as usize) < n {
        return Err(Error::domain(format!("need n >= {MIN_UNIFORMITY} and v >= n, got v={v} n={n}")));
    }
    Ok(())
}

/// `r` lists of `k` independent uniform colorings of `[v]`.
pub fn gen_list_collection(v: u32, n: usize, q_cap: usize, r: usize, k: usize, seed: u64) -> Result<ListCollection> {
    if r == 0 || k == 0 {
        return Err(Error::domain("r and k must be at least 1"));
    }
    let lists = (0..r as u64)
        .map(|i| {
            (0..k as u64)
                .map(|j| {
                    (1..=v)
                        .map(|u| {
                            let bit = derive(seed, &[TAG_LISTS, i, j, u as u64]) & 1;
                            (VertexId(u), if bit == 0 { Color::Red } else { Color::Blue })
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    ListCollection::from_lists(v, n, q_cap, lists)
}

/// List size and count `(r, k) = (2^n, ceil(6 * 2^(n/2) * log2 v))` for which
/// a random collection is good once `n` is large and `v` polynomial in `n`.
pub fn lemma_parameters(v: u32, n: usize) -> Result<(u128, u64)> {
    check_params(v, n)?;
    if n > 120 {
        return Err(Error::domain("n too large for the list-count preset"));
    }
    let k = (6.0 * 2f64.powf(n as f64 / 2.0) * (v as f64).log2()).ceil() as u64;
    Ok((1u128 << n, k))
}

/// The edge cap `floor(2^(n/2))` under which the lemma's collection works.
pub fn lemma_q_cap(n: usize) -> u64 {
    2f64.powf(n as f64 / 2.0).floor() as u64
}

fn is_valid(h: &Hypergraph, c: &Coloring) -> bool {
    // A vertex outside the colorings' universe counts as a violation.
    validate_coloring(h, c).is_ok_and(|bad| bad.is_empty())
}

/// The smallest index of a list whose every coloring is valid for `h_a`.
pub fn alice_message(h_a: &Hypergraph, c: &ListCollection) -> Option<usize> {
    c.lists.iter().position(|l| l.iter().all(|x| is_valid(h_a, x)))
}

/// The first coloring in `list` valid for `h_b`.
pub fn bob_answer<'l>(h_b: &Hypergraph, list: &'l [Coloring]) -> Option<&'l Coloring> {
    list.iter().find(|x| is_valid(h_b, x))
}

/// Alice's message followed by Bob's answer.
pub fn run_protocol<'c>(h_a: &Hypergraph, h_b: &Hypergraph, c: &'c ListCollection) -> Option<&'c Coloring> {
    let i = alice_message(h_a, c)?;
    bob_answer(h_b, &c.lists[i])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Goodness {
    /// Every list holds a valid coloring for every hypergraph.
    pub good_for_bob: bool,
    /// Every hypergraph has a list of colorings all valid for it.
    pub good_for_alice: bool,
}

impl Goodness {
    pub fn is_good(&self) -> bool {
        self.good_for_bob && self.good_for_alice
    }
}

/// All `n`-subsets of `[v]` in lexicographic order.
pub fn all_edges(v: u32, n: usize) -> Vec<Hyperedge> {
    fn rec(next: u32, v: u32, n: usize, cur: &mut Vec<u32>, out: &mut Vec<Hyperedge>) {
        if cur.len() == n {
            out.push(Hyperedge::from_ids(cur).expect("distinct"));
            return;
        }
        for u in next..=v {
            if (v - u + 1) as usize + cur.len() < n {
                break;
            }
            cur.push(u);
            rec(u + 1, v, n, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(1, v, n, &mut Vec::with_capacity(n), &mut out);
    out
}

/// Bitmask enumeration of the collection's instance space.
struct Enumeration {
    edges: Vec<Hyperedge>,
    // mono[i][j]: edges (as bits) monochromatic under coloring j of list i
    mono: Vec<Vec<u32>>,
}

impl Enumeration {
    fn new(c: &ListCollection) -> Result<Self> {
        let total = binomial(c.v as u64, c.n as u64);
        if total > MAX_ENUMERATED_EDGES.into() {
            return Err(Error::InstanceTooLarge {
                what: "C(v, n)",
                actual: u64::try_from(total).unwrap_or(u64::MAX),
                limit: MAX_ENUMERATED_EDGES,
            });
        }
        if c.q_cap > MAX_ENUMERATED_Q {
            return Err(Error::InstanceTooLarge {
                what: "q_cap",
                actual: c.q_cap as u64,
                limit: MAX_ENUMERATED_Q as u64,
            });
        }
        let edges = all_edges(c.v, c.n);
        let mono = c
            .lists
            .iter()
            .map(|l| {
                l.iter()
                    .map(|x| {
                        edges.iter().enumerate().fold(0u32, |m, (i, e)| {
                            let first = x.get(e.vertices()[0]);
                            if e.iter().all(|u| x.get(u) == first) {
                                m | 1 << i
                            } else {
                                m
                            }
                        })
                    })
                    .collect()
            })
            .collect();
        Ok(Enumeration { edges, mono })
    }

    /// Every hypergraph with exactly `q` distinct edges, as an edge bitmask.
    fn instances(&self, q: usize) -> impl Iterator<Item = u32> + '_ {
        (0u32..1 << self.edges.len()).filter(move |m| m.count_ones() as usize == q)
    }

    fn hypergraph(&self, n: usize, mask: u32) -> Hypergraph {
        let edges = (0..self.edges.len()).filter(|i| mask >> i & 1 == 1).map(|i| self.edges[i].clone());
        Hypergraph::from_edges(n, edges).expect("uniform")
    }
}

/// Checks both goodness conditions over every hypergraph with exactly
/// `q_cap` distinct edges on `[v]`.
///
/// Hypergraphs with fewer edges need no separate check: dropping edges only
/// makes colorings more valid.
pub fn verify_goodness(c: &ListCollection) -> Result<Goodness> {
    let en = Enumeration::new(c)?;
    let mut good = Goodness {
        good_for_bob: true,
        good_for_alice: true,
    };
    for h in en.instances(c.q_cap) {
        if good.good_for_bob && !en.mono.iter().all(|l| l.iter().any(|&m| m & h == 0)) {
            good.good_for_bob = false;
        }
        if good.good_for_alice && !en.mono.iter().any(|l| l.iter().all(|&m| m & h == 0)) {
            good.good_for_alice = false;
        }
        if !good.good_for_bob && !good.good_for_alice {
            break;
        }
    }
    Ok(good)
}

/// Runs the protocol on every pair of hypergraphs with exactly `q_cap`
/// distinct edges and counts pairs where it fails to produce a coloring
/// valid for the union.
///
/// Returns `(pairs, failures)`.
pub fn verify_protocol(c: &ListCollection) -> Result<(u64, u64)> {
    let en = Enumeration::new(c)?;
    let graphs: Vec<Hypergraph> = en.instances(c.q_cap).map(|m| en.hypergraph(c.n, m)).collect();
    let (mut pairs, mut failures) = (0u64, 0u64);
    for h_a in &graphs {
        let msg = alice_message(h_a, c);
        for h_b in &graphs {
            pairs += 1;
            let union = Hypergraph::from_edges(c.n, h_a.edges().iter().chain(h_b.edges()).cloned()).expect("uniform");
            let ok = msg
                .and_then(|i| bob_answer(h_b, &c.lists[i]))
                .is_some_and(|x| is_valid(&union, x));
            failures += u64::from(!ok);
        }
    }
    Ok((pairs, failures))
}
