use rand::Rng;

use crate::error::{Error, Result};
use crate::hypermatrix::io::line_col;

/// Largest vertex count; adjacency rows are stored as 64-bit masks.
pub const MAX_VERTICES: usize = 64;

/// Simple undirected graph on vertices `0..n`.
///
/// Edges are kept as `(i, j)` with `i < j`, sorted lexicographically, so every
/// construction that walks the edge list is reproducible.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<u64>,
}

impl Graph {
    /// Build from 0-based edges. Loops, duplicates and out-of-range vertices are errors.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput(
                "graph needs at least one vertex".into(),
            ));
        }
        if n > MAX_VERTICES {
            return Err(Error::SizeCap(format!(
                "graphs are limited to {MAX_VERTICES} vertices, got {n}"
            )));
        }
        let mut adj = vec![0u64; n];
        let mut list = Vec::new();
        for (a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::InvalidInput(format!(
                    "edge ({a}, {b}) out of range for {n} vertices"
                )));
            }
            if a == b {
                return Err(Error::InvalidInput(format!("loop at vertex {a}")));
            }
            if adj[a] >> b & 1 == 1 {
                return Err(Error::InvalidInput(format!("duplicate edge ({a}, {b})")));
            }
            adj[a] |= 1 << b;
            adj[b] |= 1 << a;
            list.push((a.min(b), a.max(b)));
        }
        list.sort_unstable();
        Ok(Self {
            n,
            edges: list,
            adj,
        })
    }

    pub fn empty(n: usize) -> Result<Self> {
        Self::new(n, [])
    }

    pub fn complete(n: usize) -> Result<Self> {
        Self::new(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))))
    }

    pub fn path(n: usize) -> Result<Self> {
        Self::new(n, (1..n).map(|i| (i - 1, i)))
    }

    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidInput(
                "cycle needs at least 3 vertices".into(),
            ));
        }
        Self::new(n, (0..n).map(|i| (i, (i + 1) % n)))
    }

    /// Hub vertex 0 joined to a cycle on `1..=rim`.
    pub fn wheel(rim: usize) -> Result<Self> {
        if rim < 3 {
            return Err(Error::InvalidInput(
                "wheel needs a rim of at least 3 vertices".into(),
            ));
        }
        let spokes = (1..=rim).map(|i| (0, i));
        let rim_edges = (1..=rim).map(move |i| (i, i % rim + 1));
        Self::new(rim + 1, spokes.chain(rim_edges))
    }

    pub fn petersen() -> Result<Self> {
        let outer = (0..5).map(|i| (i, (i + 1) % 5));
        let spokes = (0..5).map(|i| (i, i + 5));
        let inner = (0..5).map(|i| (5 + i, 5 + (i + 2) % 5));
        Self::new(10, outer.chain(spokes).chain(inner))
    }

    /// Erdős–Rényi `G(n, p)`.
    pub fn random(n: usize, p: f64, rng: &mut impl Rng) -> Result<Self> {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if rng.random::<f64>() < p {
                    edges.push((i, j));
                }
            }
        }
        Self::new(n, edges)
    }

    /// Graph whose edge set is selected by the bits of `mask` over the
    /// lexicographic list of vertex pairs. Enumerating masks enumerates all
    /// labeled graphs on `n` vertices.
    pub fn from_pair_mask(n: usize, mask: u64) -> Result<Self> {
        let pairs = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)));
        Self::new(
            n,
            pairs
                .enumerate()
                .filter(|(b, _)| mask >> b & 1 == 1)
                .map(|(_, e)| e),
        )
    }

    /// Induced subgraph on the given vertices, relabeled in order.
    pub fn induced(&self, vertices: &[usize]) -> Result<Self> {
        let mut edges = Vec::new();
        for (a, &u) in vertices.iter().enumerate() {
            for (b, &v) in vertices.iter().enumerate().skip(a + 1) {
                if self.has_edge(u, v) {
                    edges.push((a, b));
                }
            }
        }
        Self::new(vertices.len(), edges)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        a < self.n && self.adj[a] >> b & 1 == 1
    }

    pub fn neighbor_mask(&self, v: usize) -> u64 {
        self.adj[v]
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&u| self.adj[v] >> u & 1 == 1)
    }

    pub fn is_proper_coloring(&self, colors: &[u8]) -> bool {
        colors.len() == self.n && self.edges.iter().all(|&(a, b)| colors[a] != colors[b])
    }

    /// Some proper coloring with colors `0..k`, by backtracking.
    pub fn coloring(&self, k: u8) -> Option<Vec<u8>> {
        let mut colors = vec![u8::MAX; self.n];
        fn assign(g: &Graph, v: usize, k: u8, colors: &mut [u8]) -> bool {
            if v == g.n {
                return true;
            }
            for c in 0..k {
                if g.neighbors(v).filter(|&u| u < v).all(|u| colors[u] != c) {
                    colors[v] = c;
                    if assign(g, v + 1, k, colors) {
                        return true;
                    }
                }
            }
            false
        }
        assign(self, 0, k, &mut colors).then_some(colors)
    }

    pub fn three_coloring(&self) -> Option<Vec<u8>> {
        self.coloring(3)
    }

    /// Text form: `n m` on the first line, then one 1-based edge per line.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.n, self.m());
        for &(a, b) in &self.edges {
            s.push_str(&format!("{} {}\n", a + 1, b + 1));
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .split('\n')
            .scan(0usize, |off, raw| {
                let start = *off;
                *off += raw.len() + 1;
                Some((start, raw))
            })
            .map(|(start, raw)| (start, raw.split('#').next().unwrap_or("")))
            .filter(|(_, body)| !body.trim().is_empty());

        let err_at = |offset: usize, message: String| {
            let (line, column) = line_col(text, offset);
            Error::Parse {
                line,
                column,
                message,
            }
        };
        let fields = |start: usize, body: &str| -> Result<Vec<(usize, usize)>> {
            let mut out = Vec::new();
            let mut rest = body;
            let mut pos = start;
            while let Some(skip) = rest.find(|c: char| !c.is_whitespace()) {
                pos += skip;
                rest = &rest[skip..];
                let len = rest.find(char::is_whitespace).unwrap_or(rest.len());
                let value = rest[..len].parse::<usize>().map_err(|_| {
                    err_at(
                        pos,
                        format!("expected a non-negative integer, got {:?}", &rest[..len]),
                    )
                })?;
                out.push((pos, value));
                pos += len;
                rest = &rest[len..];
            }
            Ok(out)
        };

        let (start, header) = lines
            .next()
            .ok_or_else(|| err_at(0, "empty graph file".into()))?;
        let head = fields(start, header)?;
        if head.len() != 2 {
            return Err(err_at(start, "header must be \"n m\"".into()));
        }
        let (n, m) = (head[0].1, head[1].1);
        if n == 0 {
            return Err(err_at(head[0].0, "vertex count must be positive".into()));
        }
        if n > MAX_VERTICES {
            return Err(err_at(
                head[0].0,
                format!("at most {MAX_VERTICES} vertices are supported"),
            ));
        }
        let mut edges: Vec<(usize, usize)> = Vec::with_capacity(m);
        let mut seen = vec![0u64; n];
        for (start, body) in lines.by_ref() {
            let f = fields(start, body)?;
            if f.len() != 2 {
                return Err(err_at(start, "edge line must be \"i j\"".into()));
            }
            if edges.len() == m {
                return Err(err_at(start, format!("more than the declared {m} edges")));
            }
            for &(pos, v) in &f {
                if v == 0 || v > n {
                    return Err(err_at(pos, format!("vertex {v} out of range 1..={n}")));
                }
            }
            let (a, b) = (f[0].1 - 1, f[1].1 - 1);
            if a == b {
                return Err(err_at(f[0].0, format!("loop at vertex {}", a + 1)));
            }
            if seen[a] >> b & 1 == 1 {
                return Err(err_at(
                    f[0].0,
                    format!("duplicate edge {} {}", a + 1, b + 1),
                ));
            }
            seen[a] |= 1 << b;
            seen[b] |= 1 << a;
            edges.push((a, b));
        }
        if edges.len() != m {
            return Err(err_at(
                text.len(),
                format!("declared {m} edges, found {}", edges.len()),
            ));
        }
        Self::new(n, edges)
    }
}
