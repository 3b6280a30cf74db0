//! Exhaustive two-colorability oracle for small instances.

use crate::error::{Error, Result};
use crate::hypergraph::{Color, Coloring, Hypergraph};

/// Largest vertex count [`brute_force_two_colorable`] will enumerate.
pub const MAX_BRUTE_FORCE_VERTICES: usize = 30;

/// Searches all two-colorings of `h`'s vertex set for a valid one.
///
/// The first vertex is pinned to Red, halving the search, since swapping
/// colors preserves validity. An empty vertex set yields the empty coloring.
pub fn brute_force_two_colorable(h: &Hypergraph) -> Result<Option<Coloring>> {
    let vertices = h.vertices();
    let v = vertices.len();
    if v > MAX_BRUTE_FORCE_VERTICES {
        return Err(Error::InstanceTooLarge {
            what: "vertex count",
            actual: v as u64,
            limit: MAX_BRUTE_FORCE_VERTICES as u64,
        });
    }
    if v == 0 {
        return Ok(Some(Coloring::new()));
    }
    let masks: Vec<u32> = h
        .edges()
        .iter()
        .map(|e| {
            e.iter().fold(0u32, |m, u| {
                let idx = vertices.binary_search(&u).expect("edge vertex in vertex set");
                m | (1 << idx)
            })
        })
        .collect();

    // Bit i set means vertex i is Blue; bit 0 stays clear.
    let found = (0u32..1 << (v - 1))
        .map(|half| half << 1)
        .find(|&blue| masks.iter().all(|&m| m & blue != 0 && m & blue != m));

    Ok(found.map(|blue| {
        vertices
            .iter()
            .enumerate()
            .map(|(i, &u)| (u, if blue >> i & 1 == 1 { Color::Blue } else { Color::Red }))
            .collect()
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::{validate_coloring, Hyperedge};

    const FANO: [[u32; 3]; 7] = [
        [1, 2, 4],
        [2, 3, 5],
        [3, 4, 6],
        [4, 5, 7],
        [5, 6, 1],
        [6, 7, 2],
        [7, 1, 3],
    ];

    fn fano_without(skip: Option<usize>) -> Hypergraph {
        Hypergraph::from_edges(
            3,
            FANO.iter()
                .enumerate()
                .filter(|(i, _)| Some(*i) != skip)
                .map(|(_, e)| Hyperedge::from_ids(e).unwrap()),
        )
        .unwrap()
    }

    #[test]
    fn empty_is_colorable() {
        let h = Hypergraph::with_universe(3, 5).unwrap();
        let c = brute_force_two_colorable(&h).unwrap().unwrap();
        assert_eq!(c.len(), 5);
        assert_eq!(c.red_count(), 5);
        assert!(brute_force_two_colorable(&Hypergraph::new(3).unwrap()).unwrap().unwrap().is_empty());
    }

    #[test]
    fn fano_is_not_two_colorable() {
        assert!(brute_force_two_colorable(&fano_without(None)).unwrap().is_none());
    }

    #[test]
    fn fano_minus_an_edge_is_two_colorable() {
        for skip in 0..7 {
            let h = fano_without(Some(skip));
            let c = brute_force_two_colorable(&h).unwrap().expect("colorable");
            assert!(validate_coloring(&h, &c).unwrap().is_empty());
        }
    }

    #[test]
    fn every_fano_coloring_has_a_violation() {
        let h = fano_without(None);
        for bits in 0u32..128 {
            let c: Coloring = (1..=7u32)
                .map(|u| {
                    let color = if bits >> (u - 1) & 1 == 1 { Color::Blue } else { Color::Red };
                    (u.into(), color)
                })
                .collect();
            assert!(!validate_coloring(&h, &c).unwrap().is_empty());
        }
    }

    #[test]
    fn guard_rejects_large_instances() {
        let h = Hypergraph::with_universe(3, 31).unwrap();
        assert!(matches!(
            brute_force_two_colorable(&h),
            Err(Error::InstanceTooLarge { .. })
        ));
    }

    #[test]
    fn few_vertices_always_colorable() {
        // v <= 2n - 2: any balanced split leaves each class below n.
        for n in 3..=6usize {
            let v = 2 * n - 2;
            let all: Vec<Hyperedge> = (0u32..1 << v)
                .filter(|m| m.count_ones() as usize == n)
                .map(|m| {
                    let ids: Vec<u32> = (0..v as u32).filter(|i| m >> i & 1 == 1).map(|i| i + 1).collect();
                    Hyperedge::from_ids(&ids).unwrap()
                })
                .collect();
            let h = Hypergraph::from_edges(n, all).unwrap();
            assert!(brute_force_two_colorable(&h).unwrap().is_some(), "n={n}");
        }
    }
}
