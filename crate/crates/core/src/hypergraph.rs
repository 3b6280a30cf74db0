//! Hypergraph domain types and coloring validity.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Smallest uniformity accepted by [`Hypergraph`] and the `HGS1` header.
pub const MIN_UNIFORMITY: usize = 3;

/// Opaque vertex identity. Declared universes are `1..=v`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexId(pub u32);

impl VertexId {
    pub fn get(self) -> u32 {
        self.0
    }
}

impl From<u32> for VertexId {
    fn from(id: u32) -> Self {
        VertexId(id)
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Color {
    Red,
    Blue,
}

impl Color {
    pub fn flip(self) -> Color {
        match self {
            Color::Red => Color::Blue,
            Color::Blue => Color::Red,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Color::Red => "red",
            Color::Blue => "blue",
        }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Color {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "red" | "Red" | "R" => Ok(Color::Red),
            "blue" | "Blue" | "B" => Ok(Color::Blue),
            other => Err(other.to_string()),
        }
    }
}

/// An ordered tuple of distinct vertices.
///
/// The order is kept so streams round-trip byte for byte; set semantics
/// (intersection, monochromaticity) ignore it.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Hyperedge {
    vertices: Vec<VertexId>,
}

impl Hyperedge {
    pub fn new(vertices: Vec<VertexId>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::InvalidEdge("edge has no vertices".into()));
        }
        if let Some(dup) = first_duplicate(&vertices) {
            return Err(Error::InvalidEdge(format!("vertex {dup} repeated")));
        }
        Ok(Hyperedge { vertices })
    }

    /// Convenience constructor from raw ids.
    pub fn from_ids(ids: &[u32]) -> Result<Self> {
        Self::new(ids.iter().copied().map(VertexId).collect())
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    /// Number of vertices, i.e. the uniformity this edge was built for.
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn contains(&self, u: VertexId) -> bool {
        self.vertices.contains(&u)
    }

    pub fn intersects(&self, other: &Hyperedge) -> bool {
        self.vertices.iter().any(|u| other.contains(*u))
    }

    pub fn iter(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices.iter().copied()
    }
}

pub(crate) fn first_duplicate(vertices: &[VertexId]) -> Option<VertexId> {
    let mut sorted = vertices.to_vec();
    sorted.sort_unstable();
    sorted.windows(2).find(|w| w[0] == w[1]).map(|w| w[0])
}

impl fmt::Display for Hyperedge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, u) in self.vertices.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{u}")?;
        }
        f.write_str("}")
    }
}

/// An `n`-uniform multi-hypergraph held in memory.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hypergraph {
    uniformity: usize,
    universe: Option<u32>,
    edges: Vec<Hyperedge>,
}

impl Hypergraph {
    pub fn new(uniformity: usize) -> Result<Self> {
        if uniformity < MIN_UNIFORMITY {
            return Err(Error::domain(format!(
                "uniformity {uniformity} below minimum {MIN_UNIFORMITY}"
            )));
        }
        Ok(Hypergraph {
            uniformity,
            universe: None,
            edges: Vec::new(),
        })
    }

    /// A hypergraph over the declared vertex universe `1..=universe`.
    pub fn with_universe(uniformity: usize, universe: u32) -> Result<Self> {
        let mut h = Self::new(uniformity)?;
        if (universe as usize) < uniformity {
            return Err(Error::domain(format!(
                "universe {universe} smaller than uniformity {uniformity}"
            )));
        }
        h.universe = Some(universe);
        Ok(h)
    }

    pub fn from_edges(uniformity: usize, edges: impl IntoIterator<Item = Hyperedge>) -> Result<Self> {
        let mut h = Self::new(uniformity)?;
        for e in edges {
            h.push(e)?;
        }
        Ok(h)
    }

    pub fn push(&mut self, edge: Hyperedge) -> Result<()> {
        check_edge(&edge, self.uniformity, self.universe)?;
        self.edges.push(edge);
        Ok(())
    }

    pub fn uniformity(&self) -> usize {
        self.uniformity
    }

    pub fn universe(&self) -> Option<u32> {
        self.universe
    }

    pub fn edges(&self) -> &[Hyperedge] {
        &self.edges
    }

    /// Edge count `q`, duplicates included.
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Sorted union of the edges' vertex sets.
    pub fn edge_vertices(&self) -> Vec<VertexId> {
        let set: BTreeSet<VertexId> = self.edges.iter().flat_map(|e| e.iter()).collect();
        set.into_iter().collect()
    }

    /// The vertex set: the declared universe if any, otherwise the union of edges.
    pub fn vertices(&self) -> Vec<VertexId> {
        match self.universe {
            Some(v) => (1..=v).map(VertexId).collect(),
            None => self.edge_vertices(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        match self.universe {
            Some(v) => v as usize,
            None => self.edge_vertices().len(),
        }
    }
}

/// Checks arity and universe membership; distinctness is guaranteed by [`Hyperedge::new`].
pub(crate) fn check_edge(edge: &Hyperedge, uniformity: usize, universe: Option<u32>) -> Result<()> {
    if edge.len() != uniformity {
        return Err(Error::ArityMismatch {
            expected: uniformity,
            found: edge.len(),
        });
    }
    if let Some(v) = universe {
        if let Some(&u) = edge.vertices().iter().find(|u| u.0 == 0 || u.0 > v) {
            return Err(Error::OutOfUniverse {
                vertex: u,
                universe: v,
            });
        }
    }
    Ok(())
}

/// A vertex coloring with colors of type `C`.
///
/// Two-colorings use [`Color`]; `k`-colorings use class indices `0..k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assignment<C> {
    colors: BTreeMap<VertexId, C>,
}

pub type Coloring = Assignment<Color>;
pub type KColoring = Assignment<u32>;

impl<C> Default for Assignment<C> {
    fn default() -> Self {
        Assignment {
            colors: BTreeMap::new(),
        }
    }
}

impl<C: Copy> Assignment<C> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, u: VertexId) -> Option<C> {
        self.colors.get(&u).copied()
    }

    pub fn set(&mut self, u: VertexId, color: C) {
        self.colors.insert(u, color);
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    /// Entries in ascending vertex order.
    pub fn iter(&self) -> impl Iterator<Item = (VertexId, C)> + '_ {
        self.colors.iter().map(|(&u, &c)| (u, c))
    }

    fn color_of(&self, u: VertexId) -> Result<C> {
        self.get(u).ok_or(Error::MissingAssignment(u))
    }
}

impl Coloring {
    pub fn uniform(vertices: impl IntoIterator<Item = VertexId>, color: Color) -> Self {
        vertices.into_iter().map(|u| (u, color)).collect()
    }

    pub fn red_count(&self) -> usize {
        self.colors.values().filter(|&&c| c == Color::Red).count()
    }
}

impl<C> FromIterator<(VertexId, C)> for Assignment<C> {
    fn from_iter<I: IntoIterator<Item = (VertexId, C)>>(iter: I) -> Self {
        Assignment {
            colors: iter.into_iter().collect(),
        }
    }
}

/// True iff every vertex of `edge` has the same color.
pub fn is_monochromatic<C: Copy + Eq>(edge: &Hyperedge, coloring: &Assignment<C>) -> Result<bool> {
    let mut vertices = edge.iter();
    let Some(first) = vertices.next() else {
        return Ok(true);
    };
    let first = coloring.color_of(first)?;
    let mut mono = true;
    for u in vertices {
        // Keep scanning after a mismatch so missing assignments are always reported.
        if coloring.color_of(u)? != first {
            mono = false;
        }
    }
    Ok(mono)
}

/// Returns exactly the monochromatic edges of `h` (with multiplicity).
pub fn validate_coloring<'h, C: Copy + Eq>(
    h: &'h Hypergraph,
    coloring: &Assignment<C>,
) -> Result<Vec<&'h Hyperedge>> {
    let mut violations = Vec::new();
    for e in h.edges() {
        if is_monochromatic(e, coloring)? {
            violations.push(e);
        }
    }
    Ok(violations)
}

/// Largest number of other edges (counted with multiplicity) that a single edge meets.
pub fn max_edge_intersections(h: &Hypergraph) -> usize {
    let mut incident: HashMap<VertexId, Vec<usize>> = HashMap::new();
    for (i, e) in h.edges().iter().enumerate() {
        for u in e.iter() {
            incident.entry(u).or_default().push(i);
        }
    }
    let mut seen = vec![usize::MAX; h.len()];
    let mut best = 0;
    for (i, e) in h.edges().iter().enumerate() {
        let mut count = 0;
        for u in e.iter() {
            for &j in &incident[&u] {
                if j != i && seen[j] != i {
                    seen[j] = i;
                    count += 1;
                }
            }
        }
        best = best.max(count);
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn edge(ids: &[u32]) -> Hyperedge {
        Hyperedge::from_ids(ids).unwrap()
    }

    fn coloring(red: &[u32], blue: &[u32]) -> Coloring {
        red.iter()
            .map(|&u| (VertexId(u), Color::Red))
            .chain(blue.iter().map(|&u| (VertexId(u), Color::Blue)))
            .collect()
    }

    #[test]
    fn mono_examples() {
        let e = edge(&[1, 2, 3]);
        assert!(is_monochromatic(&e, &coloring(&[1, 2, 3], &[])).unwrap());
        assert!(!is_monochromatic(&e, &coloring(&[2, 3], &[1])).unwrap());
        let fano_line = edge(&[1, 2, 4]);
        assert!(is_monochromatic(&fano_line, &coloring(&[1, 2, 3, 4], &[5, 6, 7])).unwrap());
    }

    #[test]
    fn missing_assignment_is_an_error() {
        let e = edge(&[1, 2, 3]);
        let err = is_monochromatic(&e, &coloring(&[2], &[1])).unwrap_err();
        assert!(matches!(err, Error::MissingAssignment(VertexId(3))));
    }

    #[test]
    fn validate_lists_violations() {
        let h = Hypergraph::from_edges(3, [edge(&[1, 2, 3])]).unwrap();
        let all_blue = coloring(&[], &[1, 2, 3]);
        assert_eq!(validate_coloring(&h, &all_blue).unwrap(), vec![&edge(&[1, 2, 3])]);
        assert!(validate_coloring(&h, &coloring(&[1], &[2, 3])).unwrap().is_empty());
    }

    #[test]
    fn edge_rejects_duplicates() {
        assert!(Hyperedge::from_ids(&[1, 2, 1]).is_err());
        assert!(Hyperedge::from_ids(&[]).is_err());
    }

    #[test]
    fn hypergraph_checks_arity_and_universe() {
        let mut h = Hypergraph::with_universe(3, 4).unwrap();
        assert!(matches!(
            h.push(edge(&[1, 2])),
            Err(Error::ArityMismatch { expected: 3, found: 2 })
        ));
        assert!(matches!(h.push(edge(&[1, 2, 5])), Err(Error::OutOfUniverse { .. })));
        h.push(edge(&[1, 2, 4])).unwrap();
        assert_eq!(h.vertex_count(), 4);
        assert_eq!(h.edge_vertices().len(), 3);
        assert!(Hypergraph::new(2).is_err());
        assert!(Hypergraph::with_universe(3, 2).is_err());
    }

    #[test]
    fn intersection_counts() {
        let single = Hypergraph::from_edges(3, [edge(&[1, 2, 3])]).unwrap();
        assert_eq!(max_edge_intersections(&single), 0);
        let disjoint = Hypergraph::from_edges(3, [edge(&[1, 2, 3]), edge(&[4, 5, 6])]).unwrap();
        assert_eq!(max_edge_intersections(&disjoint), 0);
        let star = Hypergraph::from_edges(
            3,
            [edge(&[1, 2, 3]), edge(&[1, 4, 5]), edge(&[1, 6, 7])],
        )
        .unwrap();
        assert_eq!(max_edge_intersections(&star), 2);
        // Order is ignored and duplicates count.
        let dup = Hypergraph::from_edges(3, [edge(&[1, 2, 3]), edge(&[3, 2, 1])]).unwrap();
        assert_eq!(max_edge_intersections(&dup), 1);
    }
}
