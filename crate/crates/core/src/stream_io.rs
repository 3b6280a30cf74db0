//! The `HGS1` edge-stream format, coloring files, and instance generators.
//!
//! A stream is a header line followed by one edge per line:
//!
//! ```text
//! HGS1 n=3 v=7 q=2
//! 1 2 4
//! 2 3 5
//! ```
//!
//! Vertex ids are decimal and separated by single spaces. `v` declares the
//! vertex universe `1..=v`; `q` records the intended edge count and is not
//! enforced. Blank lines are ignored when reading.

use std::borrow::Borrow;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, ParseErrorKind, Result};
use crate::hypergraph::{
    check_edge, first_duplicate, Assignment, Color, Coloring, Hyperedge, Hypergraph, KColoring,
    VertexId, MIN_UNIFORMITY,
};
use crate::rng::seeded_rng;

pub const MAGIC: &str = "HGS1";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EdgeStreamHeader {
    pub uniformity: usize,
    pub universe: Option<u32>,
    pub edge_count: Option<u64>,
}

impl EdgeStreamHeader {
    pub fn new(uniformity: usize) -> Self {
        EdgeStreamHeader {
            uniformity,
            universe: None,
            edge_count: None,
        }
    }

    pub fn with_universe(mut self, v: u32) -> Self {
        self.universe = Some(v);
        self
    }

    pub fn with_edge_count(mut self, q: u64) -> Self {
        self.edge_count = Some(q);
        self
    }

    pub fn validate(&self) -> std::result::Result<(), String> {
        if self.uniformity < MIN_UNIFORMITY {
            return Err(format!("n={} below minimum {MIN_UNIFORMITY}", self.uniformity));
        }
        if let Some(v) = self.universe {
            if (v as usize) < self.uniformity {
                return Err(format!("v={v} smaller than n={}", self.uniformity));
            }
        }
        Ok(())
    }

    /// Bits needed per vertex id, `ceil(log2(v))`, when the universe is known.
    pub fn bits_per_vertex(&self) -> Option<u32> {
        self.universe.map(|v| u32::BITS - (v.max(1) - 1).leading_zeros())
    }

    /// An empty hypergraph matching this header.
    pub fn hypergraph(&self) -> Result<Hypergraph> {
        match self.universe {
            Some(v) => Hypergraph::with_universe(self.uniformity, v),
            None => Hypergraph::new(self.uniformity),
        }
    }

    fn parse(line: &str) -> std::result::Result<Self, String> {
        let mut tokens = line.split_whitespace();
        match tokens.next() {
            Some(MAGIC) => {}
            Some(other) => return Err(format!("expected {MAGIC}, found {other:?}")),
            None => return Err("empty header".into()),
        }
        let (mut n, mut v, mut q) = (None, None, None);
        for tok in tokens {
            let (key, value) = tok
                .split_once('=')
                .ok_or_else(|| format!("expected key=value, found {tok:?}"))?;
            let bad = || format!("bad value in {tok:?}");
            let slot_taken = match key {
                "n" => n.replace(value.parse::<usize>().map_err(|_| bad())?).is_some(),
                "v" => v.replace(value.parse::<u32>().map_err(|_| bad())?).is_some(),
                "q" => q.replace(value.parse::<u64>().map_err(|_| bad())?).is_some(),
                _ => return Err(format!("unknown key {key:?}")),
            };
            if slot_taken {
                return Err(format!("key {key:?} repeated"));
            }
        }
        let header = EdgeStreamHeader {
            uniformity: n.ok_or("missing n")?,
            universe: v,
            edge_count: q,
        };
        header.validate()?;
        Ok(header)
    }
}

impl fmt::Display for EdgeStreamHeader {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{MAGIC} n={}", self.uniformity)?;
        if let Some(v) = self.universe {
            write!(f, " v={v}")?;
        }
        if let Some(q) = self.edge_count {
            write!(f, " q={q}")?;
        }
        Ok(())
    }
}

/// Lazily parsed edge stream. Stops after the first error.
pub struct EdgeStream<R> {
    header: EdgeStreamHeader,
    reader: R,
    line: usize,
    buf: String,
    done: bool,
}

/// Reads the header and returns a single-pass iterator over the edges.
pub fn parse_stream<R: BufRead>(mut reader: R) -> Result<EdgeStream<R>> {
    let mut buf = String::new();
    reader.read_line(&mut buf)?;
    let header = EdgeStreamHeader::parse(buf.trim_end()).map_err(|msg| Error::Parse {
        line: 1,
        kind: ParseErrorKind::MalformedHeader(msg),
    })?;
    Ok(EdgeStream {
        header,
        reader,
        line: 1,
        buf,
        done: false,
    })
}

impl<R> EdgeStream<R> {
    pub fn header(&self) -> &EdgeStreamHeader {
        &self.header
    }

    fn parse_edge(&self, text: &str) -> std::result::Result<Hyperedge, ParseErrorKind> {
        let vertices = text
            .split_whitespace()
            .map(|tok| {
                tok.parse::<u32>()
                    .map(VertexId)
                    .map_err(|_| ParseErrorKind::BadVertex(tok.to_string()))
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        let n = self.header.uniformity;
        if vertices.len() != n {
            return Err(ParseErrorKind::WrongArity {
                expected: n,
                found: vertices.len(),
            });
        }
        if let Some(v) = self.header.universe {
            if let Some(&u) = vertices.iter().find(|u| u.0 == 0 || u.0 > v) {
                return Err(ParseErrorKind::OutOfUniverse {
                    vertex: u,
                    universe: v,
                });
            }
        }
        if let Some(dup) = first_duplicate(&vertices) {
            return Err(ParseErrorKind::DuplicateVertex(dup));
        }
        Ok(Hyperedge::new(vertices).expect("checked above"))
    }
}

impl<R: BufRead> Iterator for EdgeStream<R> {
    type Item = Result<Hyperedge>;

    fn next(&mut self) -> Option<Self::Item> {
        while !self.done {
            self.buf.clear();
            match self.reader.read_line(&mut self.buf) {
                Ok(0) => self.done = true,
                Ok(_) => {
                    self.line += 1;
                    let text = self.buf.trim_end();
                    if text.is_empty() {
                        continue;
                    }
                    let parsed = self.parse_edge(text).map_err(|kind| Error::Parse {
                        line: self.line,
                        kind,
                    });
                    self.done = parsed.is_err();
                    return Some(parsed);
                }
                Err(e) => {
                    self.done = true;
                    return Some(Err(e.into()));
                }
            }
        }
        None
    }
}

/// Reads a whole stream into memory.
pub fn read_hypergraph<R: BufRead>(reader: R) -> Result<(EdgeStreamHeader, Hypergraph)> {
    let stream = parse_stream(reader)?;
    let header = *stream.header();
    let mut h = header.hypergraph()?;
    for edge in stream {
        h.push(edge?)?;
    }
    Ok((header, h))
}

pub fn open_stream(path: &Path) -> Result<EdgeStream<BufReader<File>>> {
    parse_stream(BufReader::new(File::open(path)?))
}

/// Writes `header` and `edges` in `HGS1` format.
pub fn write_stream<W, I>(mut out: W, header: &EdgeStreamHeader, edges: I) -> Result<()>
where
    W: Write,
    I: IntoIterator,
    I::Item: Borrow<Hyperedge>,
{
    header.validate().map_err(Error::Domain)?;
    writeln!(out, "{header}")?;
    let mut line = String::new();
    for edge in edges {
        let edge = edge.borrow();
        check_edge(edge, header.uniformity, header.universe)?;
        line.clear();
        for (i, u) in edge.iter().enumerate() {
            if i > 0 {
                line.push(' ');
            }
            line.push_str(&u.0.to_string());
        }
        line.push('\n');
        out.write_all(line.as_bytes())?;
    }
    out.flush()?;
    Ok(())
}

/// [`write_stream`] into a byte buffer.
pub fn encode_stream<I>(header: &EdgeStreamHeader, edges: I) -> Result<Vec<u8>>
where
    I: IntoIterator,
    I::Item: Borrow<Hyperedge>,
{
    let mut buf = Vec::new();
    write_stream(&mut buf, header, edges)?;
    Ok(buf)
}

/// A stream that can be read more than once, for multi-pass algorithms.
pub trait EdgeSource {
    type Pass<'a>: Iterator<Item = Result<Hyperedge>> + 'a
    where
        Self: 'a;

    /// Starts a fresh pass from the first edge.
    fn pass(&self) -> Result<Self::Pass<'_>>;
}

impl EdgeSource for [Hyperedge] {
    type Pass<'a> = std::iter::Map<std::slice::Iter<'a, Hyperedge>, fn(&Hyperedge) -> Result<Hyperedge>>;

    fn pass(&self) -> Result<Self::Pass<'_>> {
        Ok(self.iter().map(|e| Ok(e.clone())))
    }
}

impl EdgeSource for Hypergraph {
    type Pass<'a> = <[Hyperedge] as EdgeSource>::Pass<'a>;

    fn pass(&self) -> Result<Self::Pass<'_>> {
        self.edges().pass()
    }
}

/// An `HGS1` file reopened from the start on every pass.
#[derive(Clone, Debug)]
pub struct FileSource {
    path: PathBuf,
}

impl FileSource {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        FileSource { path: path.into() }
    }

    pub fn header(&self) -> Result<EdgeStreamHeader> {
        Ok(*open_stream(&self.path)?.header())
    }
}

impl EdgeSource for FileSource {
    type Pass<'a> = EdgeStream<BufReader<File>>;

    fn pass(&self) -> Result<Self::Pass<'_>> {
        open_stream(&self.path)
    }
}

/// Writes one `vertex color` line per entry, in vertex order.
pub fn write_coloring<W: Write, C: Copy + fmt::Display>(mut out: W, coloring: &Assignment<C>) -> Result<()> {
    for (u, c) in coloring.iter() {
        writeln!(out, "{u} {c}")?;
    }
    out.flush()?;
    Ok(())
}

/// A coloring file: either `red`/`blue` colors or integer class indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ColoringFile {
    Two(Coloring),
    K(KColoring),
}

pub fn read_coloring<R: BufRead>(reader: R) -> Result<ColoringFile> {
    let mut two = Coloring::new();
    let mut k = KColoring::new();
    let mut is_k: Option<bool> = None;
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let text = line.trim();
        if text.is_empty() {
            continue;
        }
        let err = |kind| Error::Parse { line: i + 1, kind };
        let (u, c) = text
            .split_once(' ')
            .ok_or_else(|| err(ParseErrorKind::BadColor(text.to_string())))?;
        let u = VertexId(
            u.parse()
                .map_err(|_| err(ParseErrorKind::BadVertex(u.to_string())))?,
        );
        let c = c.trim();
        let numeric = *is_k.get_or_insert_with(|| c.parse::<u32>().is_ok());
        if numeric {
            let class = c.parse::<u32>().map_err(|_| err(ParseErrorKind::BadColor(c.to_string())))?;
            k.set(u, class);
        } else {
            let color = c.parse::<Color>().map_err(|s| err(ParseErrorKind::BadColor(s)))?;
            two.set(u, color);
        }
    }
    Ok(if is_k == Some(true) {
        ColoringFile::K(k)
    } else {
        ColoringFile::Two(two)
    })
}

fn check_generator_params(v: u32, n: usize) -> Result<()> {
    if n < MIN_UNIFORMITY {
        return Err(Error::domain(format!("n={n} below minimum {MIN_UNIFORMITY}")));
    }
    if (v as usize) < n {
        return Err(Error::domain(format!("v={v} smaller than n={n}")));
    }
    Ok(())
}

/// Draws `n` distinct vertices of `1..=v`, redrawing on collision.
fn sample_edge(rng: &mut ChaCha8Rng, v: u32, n: usize) -> Hyperedge {
    let mut vertices = Vec::with_capacity(n);
    while vertices.len() < n {
        let u = VertexId(rng.random_range(1..=v));
        if !vertices.contains(&u) {
            vertices.push(u);
        }
    }
    Hyperedge::new(vertices).expect("distinct by construction")
}

/// Independent uniform `n`-subsets of `1..=v`, produced lazily.
#[derive(Clone, Debug)]
pub struct UniformEdges {
    rng: ChaCha8Rng,
    v: u32,
    n: usize,
    remaining: u64,
}

impl Iterator for UniformEdges {
    type Item = Hyperedge;

    fn next(&mut self) -> Option<Hyperedge> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        Some(sample_edge(&mut self.rng, self.v, self.n))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let r = usize::try_from(self.remaining).unwrap_or(usize::MAX);
        (r, Some(r))
    }
}

/// `q` edges drawn independently and uniformly from the `C(v, n)` possible edges.
pub fn gen_uniform_random(v: u32, n: usize, q: u64, seed: u64) -> Result<UniformEdges> {
    check_generator_params(v, n)?;
    Ok(UniformEdges {
        rng: seeded_rng(seed),
        v,
        n,
        remaining: q,
    })
}

/// Vertex count `N = floor(n^2 / t)` and edge count
/// `q = ceil(N * 2^n * exp(t n / (n - 2t)) * ln 2)` of the random
/// non-two-colorable construction.
pub fn erdos_parameters(n: usize, t: f64) -> Result<(u32, u64)> {
    let nf = n as f64;
    if n < MIN_UNIFORMITY || !(t.is_finite() && t > 0.0) {
        return Err(Error::domain(format!("need n >= {MIN_UNIFORMITY} and t > 0, got n={n} t={t}")));
    }
    if t > nf * nf / (2.0 * nf - 1.0) {
        return Err(Error::domain(format!("t={t} exceeds n^2/(2n-1) for n={n}")));
    }
    if 2.0 * t >= nf {
        return Err(Error::domain(format!(
            "t={t} must satisfy 2t < n={n} for exp(tn/(n-2t)) to be defined"
        )));
    }
    let big_n = (nf * nf / t).floor();
    if big_n < 2.0 * nf - 1.0 {
        return Err(Error::domain(format!("N={big_n} below 2n-1")));
    }
    let q = (big_n * 2f64.powi(n as i32) * (t * nf / (nf - 2.0 * t)).exp() * std::f64::consts::LN_2).ceil();
    if !q.is_finite() || q >= 2f64.powi(63) {
        return Err(Error::domain(format!("edge count {q:e} too large")));
    }
    Ok((big_n as u32, q as u64))
}

/// The random non-two-colorable construction on `N` vertices.
#[derive(Clone, Debug)]
pub struct ErdosInstance {
    pub vertices: u32,
    pub edge_count: u64,
    pub edges: UniformEdges,
}

pub fn gen_erdos(n: usize, t: f64, seed: u64) -> Result<ErdosInstance> {
    let (big_n, q) = erdos_parameters(n, t)?;
    Ok(ErdosInstance {
        vertices: big_n,
        edge_count: q,
        edges: gen_uniform_random(big_n, n, q, seed)?,
    })
}

/// Random edges over `1..=v`, keeping only those that leave every edge
/// meeting at most `max_intersections` others.
///
/// Stops at `q` edges or after `64 * q + 1024` rejected draws, so the result
/// may hold fewer than `q` edges.
pub fn gen_bounded_intersection(
    v: u32,
    n: usize,
    q: usize,
    max_intersections: usize,
    seed: u64,
) -> Result<Hypergraph> {
    check_generator_params(v, n)?;
    let mut rng = seeded_rng(seed);
    let mut edges: Vec<Hyperedge> = Vec::with_capacity(q);
    let mut degree: Vec<usize> = Vec::with_capacity(q);
    let mut rejections = 0usize;
    let budget = 64 * q + 1024;
    let mut hits = Vec::new();
    while edges.len() < q && rejections < budget {
        let cand = sample_edge(&mut rng, v, n);
        hits.clear();
        hits.extend((0..edges.len()).filter(|&i| edges[i].intersects(&cand)));
        if hits.len() <= max_intersections && hits.iter().all(|&i| degree[i] < max_intersections) {
            for &i in &hits {
                degree[i] += 1;
            }
            degree.push(hits.len());
            edges.push(cand);
        } else {
            rejections += 1;
        }
    }
    let mut h = Hypergraph::with_universe(n, v)?;
    for e in edges {
        h.push(e)?;
    }
    Ok(h)
}

/// What to generate, with its seed.
#[derive(Clone, Debug, PartialEq)]
pub enum GenSpec {
    Uniform { v: u32, n: usize, q: u64, seed: u64 },
    Erdos { n: usize, t: f64, seed: u64 },
    Bounded { v: u32, n: usize, q: usize, max_intersections: usize, seed: u64 },
}

impl GenSpec {
    pub fn seed(&self) -> u64 {
        match *self {
            GenSpec::Uniform { seed, .. } | GenSpec::Erdos { seed, .. } | GenSpec::Bounded { seed, .. } => seed,
        }
    }

    pub fn with_seed(&self, seed: u64) -> GenSpec {
        let mut spec = self.clone();
        match &mut spec {
            GenSpec::Uniform { seed: s, .. } | GenSpec::Erdos { seed: s, .. } | GenSpec::Bounded { seed: s, .. } => {
                *s = seed
            }
        }
        spec
    }

    /// Header and lazily generated edges.
    pub fn generate(&self) -> Result<(EdgeStreamHeader, Box<dyn Iterator<Item = Hyperedge> + Send>)> {
        match *self {
            GenSpec::Uniform { v, n, q, seed } => {
                let edges = gen_uniform_random(v, n, q, seed)?;
                let header = EdgeStreamHeader::new(n).with_universe(v).with_edge_count(q);
                Ok((header, Box::new(edges)))
            }
            GenSpec::Erdos { n, t, seed } => {
                let inst = gen_erdos(n, t, seed)?;
                let header = EdgeStreamHeader::new(n)
                    .with_universe(inst.vertices)
                    .with_edge_count(inst.edge_count);
                Ok((header, Box::new(inst.edges)))
            }
            GenSpec::Bounded { v, n, q, max_intersections, seed } => {
                let h = gen_bounded_intersection(v, n, q, max_intersections, seed)?;
                let header = EdgeStreamHeader::new(n)
                    .with_universe(v)
                    .with_edge_count(h.len() as u64);
                Ok((header, Box::new(h.edges().to_vec().into_iter())))
            }
        }
    }

    /// Generates the whole instance into memory.
    pub fn materialize(&self) -> Result<(EdgeStreamHeader, Hypergraph)> {
        let (header, edges) = self.generate()?;
        let mut h = header.hypergraph()?;
        for e in edges {
            h.push(e)?;
        }
        Ok((header, h))
    }
}

/// Writes a generated instance to `out`.
pub fn write_generated<W: Write>(out: W, spec: &GenSpec) -> Result<EdgeStreamHeader> {
    let (header, edges) = spec.generate()?;
    write_stream(out, &header, edges)?;
    Ok(header)
}
