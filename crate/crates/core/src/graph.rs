//! Simple undirected labeled graphs, the standard family generators, and the
//! basic invariants (girth, cycle rank, connectivity) everything else is
//! built on.
//!
//! Vertex numbering is fixed per family so that edge lists, embeddings and
//! certificates are reproducible byte for byte: hypercubes use binary-string
//! order (vertex index = integer value of the coordinate vector), complete
//! bipartite graphs number part A first, circulants join `i` to `i ± j` mod n
//! for each jump `j`.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid family parameters: {0}")]
    Family(String),
    #[error("invalid edge: {0}")]
    Edge(String),
    #[error("edge list does not match declared family `{0}`")]
    FamilyMismatch(String),
}

/// Named graph family with parameters.
///
/// The textual form (`complete 7`, `complete-bipartite 5 3`, `cube 4`,
/// `folded-cube 4`, `octahedron 4`, `circulant 12 1,3`, `cycle 5`, `path 4`)
/// is used in graph-file comments and certificate headers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FamilySpec {
    Complete(usize),
    CompleteBipartite(usize, usize),
    Cube(usize),
    FoldedCube(usize),
    Octahedron(usize),
    Circulant(usize, Vec<usize>),
    Cycle(usize),
    Path(usize),
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilySpec::Complete(n) => write!(f, "complete {n}"),
            FamilySpec::CompleteBipartite(a, b) => write!(f, "complete-bipartite {a} {b}"),
            FamilySpec::Cube(d) => write!(f, "cube {d}"),
            FamilySpec::FoldedCube(d) => write!(f, "folded-cube {d}"),
            FamilySpec::Octahedron(r) => write!(f, "octahedron {r}"),
            FamilySpec::Circulant(n, jumps) => {
                let js: Vec<String> = jumps.iter().map(|j| j.to_string()).collect();
                write!(f, "circulant {n} {}", js.join(","))
            }
            FamilySpec::Cycle(n) => write!(f, "cycle {n}"),
            FamilySpec::Path(n) => write!(f, "path {n}"),
        }
    }
}

impl FamilySpec {
    /// Parses the textual form produced by `Display`.
    pub fn parse(text: &str) -> Result<FamilySpec, GraphError> {
        let toks: Vec<&str> = text.split_whitespace().collect();
        let bad = |msg: &str| GraphError::Family(format!("{msg} in `{text}`"));
        let num = |s: &str| -> Result<usize, GraphError> {
            s.parse::<usize>()
                .map_err(|_| bad("malformed number"))
        };
        match toks.as_slice() {
            ["complete", n] => Ok(FamilySpec::Complete(num(n)?)),
            ["complete-bipartite", a, b] => {
                Ok(FamilySpec::CompleteBipartite(num(a)?, num(b)?))
            }
            ["cube", d] => Ok(FamilySpec::Cube(num(d)?)),
            ["folded-cube", d] => Ok(FamilySpec::FoldedCube(num(d)?)),
            ["octahedron", r] => Ok(FamilySpec::Octahedron(num(r)?)),
            ["circulant", n, jumps] => {
                let n = num(n)?;
                let jumps = jumps
                    .split(',')
                    .map(|j| j.trim().parse::<usize>().map_err(|_| bad("malformed jump")))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(FamilySpec::Circulant(n, jumps))
            }
            ["cycle", n] => Ok(FamilySpec::Cycle(num(n)?)),
            ["path", n] => Ok(FamilySpec::Path(num(n)?)),
            _ => Err(bad("unknown family")),
        }
    }
}

/// Simple undirected graph on vertices `0..p`.
///
/// Edges are kept sorted with `u < v`; the optional family tag records how the
/// graph was generated and the optional bipartition lists, per vertex, which
/// side of a 2-coloring it belongs to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    p: usize,
    edges: Vec<(usize, usize)>,
    pub family: Option<FamilySpec>,
    pub bipartition: Option<Vec<bool>>,
}

/// Length of a shortest cycle, or `Infinite` for forests.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Girth {
    Finite(usize),
    Infinite,
}

impl Graph {
    /// Builds a graph after validating simplicity and vertex ranges.
    /// Edges may be listed in either endpoint order; they are normalized and
    /// sorted.
    pub fn new(p: usize, edges: &[(usize, usize)]) -> Result<Graph, GraphError> {
        let mut norm: Vec<(usize, usize)> = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            if u == v {
                return Err(GraphError::Edge(format!("loop at vertex {u}")));
            }
            if u >= p || v >= p {
                return Err(GraphError::Edge(format!(
                    "edge ({u}, {v}) out of range for {p} vertices"
                )));
            }
            norm.push((u.min(v), u.max(v)));
        }
        norm.sort_unstable();
        if let Some(w) = norm.windows(2).find(|w| w[0] == w[1]) {
            return Err(GraphError::Edge(format!(
                "duplicate edge ({}, {})",
                w[0].0, w[0].1
            )));
        }
        Ok(Graph {
            p,
            edges: norm,
            family: None,
            bipartition: None,
        })
    }

    /// Attaches a bipartition, validating that every edge crosses it.
    pub fn with_bipartition(mut self, parts: Vec<bool>) -> Result<Graph, GraphError> {
        if parts.len() != self.p {
            return Err(GraphError::Edge(format!(
                "bipartition length {} does not match {} vertices",
                parts.len(),
                self.p
            )));
        }
        if let Some(&(u, v)) = self.edges.iter().find(|&&(u, v)| parts[u] == parts[v]) {
            return Err(GraphError::Edge(format!(
                "edge ({u}, {v}) does not cross the bipartition"
            )));
        }
        self.bipartition = Some(parts);
        Ok(self)
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        let key = (u.min(v), u.max(v));
        self.edges.binary_search(&key).is_ok()
    }

    /// Sorted neighbor lists.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.p];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        adj
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0usize; self.p];
        for &(u, v) in &self.edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        deg
    }

    /// True when `p == 0` or all vertices are mutually reachable.
    pub fn is_connected(&self) -> bool {
        self.components().1 <= 1
    }

    /// Component id per vertex (ids are 0-based in order of least vertex) and
    /// the component count.
    pub fn components(&self) -> (Vec<usize>, usize) {
        let adj = self.adjacency();
        let mut comp = vec![usize::MAX; self.p];
        let mut count = 0;
        for start in 0..self.p {
            if comp[start] != usize::MAX {
                continue;
            }
            comp[start] = count;
            let mut queue = VecDeque::from([start]);
            while let Some(u) = queue.pop_front() {
                for &w in &adj[u] {
                    if comp[w] == usize::MAX {
                        comp[w] = count;
                        queue.push_back(w);
                    }
                }
            }
            count += 1;
        }
        (comp, count)
    }

    /// q − p + (number of components).
    pub fn cycle_rank(&self) -> usize {
        self.q() + self.components().1 - self.p
    }

    /// Length of a shortest cycle via BFS from every vertex.
    pub fn girth(&self) -> Girth {
        let adj = self.adjacency();
        let mut best: Option<usize> = None;
        for src in 0..self.p {
            let mut dist = vec![usize::MAX; self.p];
            let mut parent = vec![usize::MAX; self.p];
            dist[src] = 0;
            let mut queue = VecDeque::from([src]);
            while let Some(u) = queue.pop_front() {
                for &w in &adj[u] {
                    if dist[w] == usize::MAX {
                        dist[w] = dist[u] + 1;
                        parent[w] = u;
                        queue.push_back(w);
                    } else if parent[u] != w && parent[w] != u {
                        let c = dist[u] + dist[w] + 1;
                        if best.map_or(true, |b| c < b) {
                            best = Some(c);
                        }
                    }
                }
            }
            if best == Some(3) {
                break;
            }
        }
        match best {
            Some(g) => Girth::Finite(g),
            None => Girth::Infinite,
        }
    }

    /// Edge-set equality ignoring family and bipartition metadata.
    pub fn same_graph(&self, other: &Graph) -> bool {
        self.p == other.p && self.edges == other.edges
    }
}

/// Generates the named family with its canonical vertex numbering.
pub fn generate(spec: &FamilySpec) -> Result<Graph, GraphError> {
    let fail = |msg: String| Err(GraphError::Family(msg));
    match spec {
        FamilySpec::Complete(n) => {
            if *n < 1 {
                return fail("complete graph needs n >= 1".into());
            }
            let mut edges = Vec::new();
            for u in 0..*n {
                for v in u + 1..*n {
                    edges.push((u, v));
                }
            }
            let mut g = Graph::new(*n, &edges)?;
            g.family = Some(spec.clone());
            Ok(g)
        }
        FamilySpec::CompleteBipartite(a, b) => {
            if *a < 1 || *b < 1 {
                return fail("complete bipartite graph needs a, b >= 1".into());
            }
            let mut edges = Vec::new();
            for u in 0..*a {
                for v in 0..*b {
                    edges.push((u, a + v));
                }
            }
            let mut parts = vec![false; *a];
            parts.extend(std::iter::repeat(true).take(*b));
            let mut g = Graph::new(a + b, &edges)?.with_bipartition(parts)?;
            g.family = Some(spec.clone());
            Ok(g)
        }
        FamilySpec::Cube(d) => {
            if *d < 1 || *d > 20 {
                return fail(format!("cube dimension {d} out of supported range 1..=20"));
            }
            let p = 1usize << d;
            let mut edges = Vec::new();
            for v in 0..p {
                for k in 0..*d {
                    let w = v ^ (1 << k);
                    if v < w {
                        edges.push((v, w));
                    }
                }
            }
            let parts: Vec<bool> = (0..p).map(|v: usize| v.count_ones() % 2 == 1).collect();
            let mut g = Graph::new(p, &edges)?.with_bipartition(parts)?;
            g.family = Some(spec.clone());
            Ok(g)
        }
        FamilySpec::FoldedCube(d) => {
            if *d < 2 || *d > 20 {
                return fail(format!(
                    "folded cube dimension {d} out of supported range 2..=20"
                ));
            }
            let p = 1usize << d;
            let mask = p - 1;
            let mut edges = Vec::new();
            for v in 0..p {
                for k in 0..*d {
                    let w = v ^ (1 << k);
                    if v < w {
                        edges.push((v, w));
                    }
                }
                let w = v ^ mask;
                if v < w {
                    edges.push((v, w));
                }
            }
            let mut g = Graph::new(p, &edges)?;
            if d % 2 == 1 {
                let parts: Vec<bool> = (0..p).map(|v: usize| v.count_ones() % 2 == 1).collect();
                g = g.with_bipartition(parts)?;
            }
            g.family = Some(spec.clone());
            Ok(g)
        }
        FamilySpec::Octahedron(r) => {
            if *r < 1 {
                return fail("octahedron needs r >= 1".into());
            }
            let p = 2 * r;
            let mut edges = Vec::new();
            for u in 0..p {
                for v in u + 1..p {
                    if !(u / 2 == v / 2) {
                        edges.push((u, v));
                    }
                }
            }
            let mut g = Graph::new(p, &edges)?;
            g.family = Some(spec.clone());
            Ok(g)
        }
        FamilySpec::Circulant(n, jumps) => {
            if *n < 3 {
                return fail("circulant needs n >= 3".into());
            }
            if jumps.is_empty() {
                return fail("circulant needs at least one jump".into());
            }
            let mut seen = BTreeSet::new();
            for &j in jumps {
                if j < 1 || 2 * j > *n {
                    return fail(format!("circulant jump {j} outside [1, {n}/2]"));
                }
                if !seen.insert(j) {
                    return fail(format!("duplicate circulant jump {j}"));
                }
            }
            let mut edge_set = BTreeSet::new();
            for v in 0..*n {
                for &j in jumps {
                    let w = (v + j) % n;
                    edge_set.insert((v.min(w), v.max(w)));
                }
            }
            let edges: Vec<_> = edge_set.into_iter().collect();
            let mut g = Graph::new(*n, &edges)?;
            if n % 2 == 0 && jumps.iter().all(|j| j % 2 == 1) {
                g = g.with_bipartition((0..*n).map(|v| v % 2 == 1).collect())?;
            }
            g.family = Some(spec.clone());
            Ok(g)
        }
        FamilySpec::Cycle(n) => {
            if *n < 3 {
                return fail("cycle needs n >= 3".into());
            }
            let edges: Vec<_> = (0..*n).map(|v| (v, (v + 1) % n)).collect();
            let mut g = Graph::new(*n, &edges)?;
            if n % 2 == 0 {
                g = g.with_bipartition((0..*n).map(|v| v % 2 == 1).collect())?;
            }
            g.family = Some(spec.clone());
            Ok(g)
        }
        FamilySpec::Path(n) => {
            if *n < 1 {
                return fail("path needs n >= 1".into());
            }
            let edges: Vec<_> = (0..n.saturating_sub(1)).map(|v| (v, v + 1)).collect();
            let mut g = Graph::new(*n, &edges)?
                .with_bipartition((0..*n).map(|v| v % 2 == 1).collect())?;
            g.family = Some(spec.clone());
            Ok(g)
        }
    }
}

/// Parses the graph file format: first a `p q` line, then `q` lines `u v`
/// with `u < v`, with `#` comment lines allowed. A trailing `# family <spec>`
/// comment re-attaches family metadata; the edge list is checked against the
/// generated family.
pub fn parse_graph(text: &str) -> Result<Graph, GraphError> {
    let mut header: Option<(usize, usize)> = None;
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut family: Option<FamilySpec> = None;
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            let comment = comment.trim();
            if let Some(spec) = comment.strip_prefix("family ") {
                family = Some(FamilySpec::parse(spec).map_err(|e| GraphError::Parse {
                    line: lineno,
                    msg: e.to_string(),
                })?);
            }
            continue;
        }
        let nums: Vec<&str> = line.split_whitespace().collect();
        if nums.len() != 2 {
            return Err(GraphError::Parse {
                line: lineno,
                msg: format!("expected two numbers, got `{line}`"),
            });
        }
        let a = nums[0].parse::<usize>().map_err(|_| GraphError::Parse {
            line: lineno,
            msg: format!("malformed number `{}`", nums[0]),
        })?;
        let b = nums[1].parse::<usize>().map_err(|_| GraphError::Parse {
            line: lineno,
            msg: format!("malformed number `{}`", nums[1]),
        })?;
        match header {
            None => header = Some((a, b)),
            Some((p, q)) => {
                if edges.len() == q {
                    return Err(GraphError::Parse {
                        line: lineno,
                        msg: format!("more than {q} edge lines"),
                    });
                }
                if a >= b {
                    return Err(GraphError::Parse {
                        line: lineno,
                        msg: if a == b {
                            format!("loop at vertex {a}")
                        } else {
                            format!("edge ({a}, {b}) not in u < v order")
                        },
                    });
                }
                if b >= p {
                    return Err(GraphError::Parse {
                        line: lineno,
                        msg: format!("vertex {b} out of range for {p} vertices"),
                    });
                }
                if edges.contains(&(a, b)) {
                    return Err(GraphError::Parse {
                        line: lineno,
                        msg: format!("duplicate edge ({a}, {b})"),
                    });
                }
                edges.push((a, b));
            }
        }
    }
    let (p, q) = header.ok_or(GraphError::Parse {
        line: 1,
        msg: "missing `p q` header".into(),
    })?;
    if edges.len() != q {
        return Err(GraphError::Parse {
            line: text.lines().count(),
            msg: format!("expected {q} edges, found {}", edges.len()),
        });
    }
    let g = Graph::new(p, &edges)?;
    match family {
        None => Ok(g),
        Some(spec) => {
            let canonical = generate(&spec)?;
            if !g.same_graph(&canonical) {
                return Err(GraphError::FamilyMismatch(spec.to_string()));
            }
            Ok(canonical)
        }
    }
}

/// Serializes to the graph file format; inverse of `parse_graph` on canonical
/// forms.
pub fn serialize_graph(g: &Graph) -> String {
    let mut out = format!("{} {}\n", g.p(), g.q());
    for &(u, v) in g.edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    if let Some(f) = &g.family {
        out.push_str(&format!("# family {f}\n"));
    }
    out
}
