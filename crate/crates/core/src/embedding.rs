//! Rotation systems — combinatorial orientable embeddings — with face
//! tracing, Euler genus, and the surgery primitives every construction is
//! assembled from: mirror copies, disjoint unions, tubes between faces,
//! vertex/path insertion into a face, edge deletion, and dart re-pairing.
//!
//! A rotation system stores, for each vertex, the cyclic order of its
//! neighbors. Since every graph handled here is simple, a dart (directed half
//! of an edge) is identified by its ordered endpoint pair, and the dart
//! pairing is implicit: the dart `u -> v` pairs with `v -> u`. Faces are the
//! orbits of "cross to the paired dart, then advance one step in the rotation
//! at its vertex". The opposite convention would trace the mirror surface;
//! one convention is fixed so serialized faces are reproducible.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

use crate::graph::{Graph, GraphError};

#[derive(Debug, Error)]
pub enum EmbedError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid rotation system: {0}")]
    Invalid(String),
    #[error("face set is not orientable")]
    NotOrientable,
    #[error("invalid face data: {0}")]
    BadFace(String),
    #[error("surgery failed: {0}")]
    Surgery(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Directed half of an edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Dart {
    pub from: usize,
    pub to: usize,
}

impl Dart {
    pub fn new(from: usize, to: usize) -> Dart {
        Dart { from, to }
    }

    /// The opposite half of the same edge.
    pub fn paired(self) -> Dart {
        Dart { from: self.to, to: self.from }
    }
}

/// Closed walk of darts traced by the face permutation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaceWalk {
    pub darts: Vec<Dart>,
}

impl FaceWalk {
    pub fn len(&self) -> usize {
        self.darts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.darts.is_empty()
    }

    /// Vertices in walk order (one entry per dart).
    pub fn vertices(&self) -> Vec<usize> {
        self.darts.iter().map(|d| d.from).collect()
    }

    pub fn vertex_set(&self) -> BTreeSet<usize> {
        self.darts.iter().map(|d| d.from).collect()
    }

    pub fn contains_vertex(&self, v: usize) -> bool {
        self.darts.iter().any(|d| d.from == v)
    }

    fn positions_of(&self, v: usize) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.darts[i].from == v).collect()
    }

    /// Rotated so the smallest dart comes first; cyclic-equality normal form.
    pub fn canonicalized(&self) -> FaceWalk {
        if self.darts.is_empty() {
            return self.clone();
        }
        let k = (0..self.len())
            .min_by_key(|&i| self.darts[i])
            .unwrap();
        let mut darts = Vec::with_capacity(self.len());
        darts.extend_from_slice(&self.darts[k..]);
        darts.extend_from_slice(&self.darts[..k]);
        FaceWalk { darts }
    }

    /// The walk this face becomes in a mirrored copy shifted by `offset`:
    /// darts flipped, order reversed.
    pub fn mirror_image(&self, offset: usize) -> FaceWalk {
        let darts = self
            .darts
            .iter()
            .rev()
            .map(|d| Dart::new(d.to + offset, d.from + offset))
            .collect();
        FaceWalk { darts }.canonicalized()
    }

    /// Shifted copy of the walk (used to address copy-1 faces of a union).
    pub fn shifted(&self, offset: usize) -> FaceWalk {
        let darts = self
            .darts
            .iter()
            .map(|d| Dart::new(d.from + offset, d.to + offset))
            .collect();
        FaceWalk { darts }
    }
}

/// Vertex-disjoint quadrilateral cover: quad faces covering every vertex
/// exactly once.
#[derive(Clone, Debug)]
pub struct Vdqc {
    pub quads: Vec<FaceWalk>,
}

/// Result of the bounded VDQC search.
#[derive(Clone, Debug)]
pub enum VdqcOutcome {
    Found(Vdqc),
    NotFound { budget_exhausted: bool },
}

/// Combinatorial orientable embedding: a cyclic neighbor order per vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RotationSystem {
    rot: Vec<Vec<usize>>,
}

/// True when the positions (distinct indices on a cyclic walk) are listed in
/// the walk's cyclic order.
fn in_cyclic_order(positions: &[usize]) -> bool {
    let n = positions.len();
    if n <= 1 {
        return true;
    }
    let descents = (0..n)
        .filter(|&i| positions[i] > positions[(i + 1) % n])
        .count();
    descents == 1
}

/// Inserts `add` (in order) into `rot[v]` at the corner of `walk` at position
/// `pos`: immediately after the entry paired with the arriving dart.
fn corner_insert(rot: &mut [Vec<usize>], walk: &FaceWalk, pos: usize, add: &[usize]) {
    let v = walk.darts[pos].from;
    let arriving = walk.darts[(pos + walk.len() - 1) % walk.len()];
    debug_assert_eq!(arriving.to, v);
    let anchor = arriving.from;
    let idx = rot[v]
        .iter()
        .position(|&w| w == anchor)
        .expect("arriving dart endpoint present in rotation");
    for (k, &w) in add.iter().enumerate() {
        rot[v].insert(idx + 1 + k, w);
    }
}

impl RotationSystem {
    /// Builds a rotation system from explicit cyclic neighbor lists,
    /// validating ranges, simplicity, and dart-pairing symmetry.
    pub fn from_rotations(rot: Vec<Vec<usize>>) -> Result<RotationSystem, EmbedError> {
        let p = rot.len();
        for (v, list) in rot.iter().enumerate() {
            let mut seen = BTreeSet::new();
            for &w in list {
                if w >= p {
                    return Err(EmbedError::Invalid(format!(
                        "vertex {v} lists neighbor {w} out of range"
                    )));
                }
                if w == v {
                    return Err(EmbedError::Invalid(format!("vertex {v} lists itself")));
                }
                if !seen.insert(w) {
                    return Err(EmbedError::Invalid(format!(
                        "vertex {v} lists neighbor {w} twice"
                    )));
                }
            }
        }
        for (v, list) in rot.iter().enumerate() {
            for &w in list {
                if !rot[w].contains(&v) {
                    return Err(EmbedError::Invalid(format!(
                        "vertex {v} lists {w} but not vice versa"
                    )));
                }
            }
        }
        Ok(RotationSystem { rot })
    }

    /// Realizes a face set as an orientable embedding. Each face is a simple
    /// cycle of vertices; together they must cover every edge exactly twice.
    /// Face directions are chosen consistently (or `NotOrientable` is
    /// returned) and rotations are read off the corners.
    pub fn from_faces(p: usize, faces: &[Vec<usize>]) -> Result<RotationSystem, EmbedError> {
        for (i, f) in faces.iter().enumerate() {
            if f.len() < 3 {
                return Err(EmbedError::BadFace(format!("face {i} shorter than 3")));
            }
            let set: BTreeSet<_> = f.iter().collect();
            if set.len() != f.len() {
                return Err(EmbedError::BadFace(format!("face {i} repeats a vertex")));
            }
            if let Some(&&v) = set.iter().find(|&&&v| v >= p) {
                return Err(EmbedError::BadFace(format!(
                    "face {i} lists vertex {v} out of range"
                )));
            }
        }

        // Each undirected edge must be traversed exactly twice overall.
        let mut sides: BTreeMap<(usize, usize), Vec<(usize, usize)>> = BTreeMap::new();
        for (i, f) in faces.iter().enumerate() {
            for j in 0..f.len() {
                let (u, v) = (f[j], f[(j + 1) % f.len()]);
                sides.entry((u.min(v), u.max(v))).or_default().push((i, j));
            }
        }
        for (&(u, v), ent) in &sides {
            if ent.len() != 2 {
                return Err(EmbedError::BadFace(format!(
                    "edge ({u}, {v}) traversed {} times, expected 2",
                    ent.len()
                )));
            }
        }

        // 2-color the faces so the two sides of each edge run oppositely.
        let dart_at = |(i, j): (usize, usize)| -> Dart {
            let f = &faces[i];
            Dart::new(f[j], f[(j + 1) % f.len()])
        };
        let mut adj: Vec<Vec<(usize, bool)>> = vec![Vec::new(); faces.len()];
        for ent in sides.values() {
            let (a, b) = (ent[0], ent[1]);
            let same_dir = dart_at(a) == dart_at(b);
            if a.0 == b.0 {
                if same_dir {
                    return Err(EmbedError::NotOrientable);
                }
                continue;
            }
            adj[a.0].push((b.0, same_dir));
            adj[b.0].push((a.0, same_dir));
        }
        let mut flip: Vec<Option<bool>> = vec![None; faces.len()];
        for start in 0..faces.len() {
            if flip[start].is_some() {
                continue;
            }
            flip[start] = Some(false);
            let mut stack = vec![start];
            while let Some(i) = stack.pop() {
                let fi = flip[i].unwrap();
                for &(j, same_dir) in &adj[i] {
                    let want = fi ^ same_dir;
                    match flip[j] {
                        None => {
                            flip[j] = Some(want);
                            stack.push(j);
                        }
                        Some(fj) if fj != want => return Err(EmbedError::NotOrientable),
                        Some(_) => {}
                    }
                }
            }
        }

        // Read rotations off the directed corners: a corner (u -> v -> w)
        // makes w the rotation-successor of u at v.
        let mut succ: Vec<HashMap<usize, usize>> = vec![HashMap::new(); p];
        for (i, f) in faces.iter().enumerate() {
            let n = f.len();
            let directed: Vec<usize> = if flip[i].unwrap() {
                f.iter().rev().copied().collect()
            } else {
                f.clone()
            };
            for j in 0..n {
                let u = directed[j];
                let v = directed[(j + 1) % n];
                let w = directed[(j + 2) % n];
                if succ[v].insert(u, w).is_some() {
                    return Err(EmbedError::BadFace(format!(
                        "conflicting corners at vertex {v}"
                    )));
                }
            }
        }
        let mut rot: Vec<Vec<usize>> = Vec::with_capacity(p);
        for v in 0..p {
            let deg = succ[v].len();
            if deg == 0 {
                rot.push(Vec::new());
                continue;
            }
            let start = *succ[v].keys().min().unwrap();
            let mut list = vec![start];
            let mut cur = start;
            loop {
                let nxt = succ[v][&cur];
                if nxt == start {
                    break;
                }
                list.push(nxt);
                cur = nxt;
                if list.len() > deg {
                    break;
                }
            }
            if list.len() != deg {
                return Err(EmbedError::BadFace(format!(
                    "corners at vertex {v} do not close into a single cycle"
                )));
            }
            rot.push(list);
        }
        let rs = RotationSystem::from_rotations(rot)?;
        debug_assert_eq!(rs.trace_faces().len(), faces.len());
        Ok(rs)
    }

    pub fn p(&self) -> usize {
        self.rot.len()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.rot[v].len()
    }

    pub fn rotation(&self, v: usize) -> &[usize] {
        &self.rot[v]
    }

    /// The underlying simple graph (no family metadata).
    pub fn graph(&self) -> Graph {
        let mut edges = Vec::new();
        for (v, list) in self.rot.iter().enumerate() {
            for &w in list {
                if v < w {
                    edges.push((v, w));
                }
            }
        }
        Graph::new(self.rot.len(), &edges).expect("validated rotations form a simple graph")
    }

    pub fn q(&self) -> usize {
        self.rot.iter().map(|r| r.len()).sum::<usize>() / 2
    }

    /// Face-tracing permutation applied to one dart.
    pub fn next_in_face(&self, d: Dart) -> Dart {
        let list = &self.rot[d.to];
        let j = list
            .iter()
            .position(|&w| w == d.from)
            .expect("paired dart present");
        Dart::new(d.to, list[(j + 1) % list.len()])
    }

    /// All faces, deterministically ordered: the lowest unvisited dart starts
    /// each walk, so every walk begins at its minimal dart.
    pub fn trace_faces(&self) -> Vec<FaceWalk> {
        let mut all_darts: Vec<Dart> = Vec::new();
        for (v, list) in self.rot.iter().enumerate() {
            for &w in list {
                all_darts.push(Dart::new(v, w));
            }
        }
        all_darts.sort_unstable();
        let mut visited: BTreeSet<Dart> = BTreeSet::new();
        let mut faces = Vec::new();
        for &start in &all_darts {
            if visited.contains(&start) {
                continue;
            }
            let mut walk = Vec::new();
            let mut cur = start;
            loop {
                visited.insert(cur);
                walk.push(cur);
                cur = self.next_in_face(cur);
                if cur == start {
                    break;
                }
            }
            faces.push(FaceWalk { darts: walk });
        }
        faces
    }

    /// Sum over components of (2 - p + q - f) / 2, with an isolated vertex
    /// counting one face. Panics if the parity invariant fails — that would
    /// mean a surgery produced an inconsistent system.
    pub fn euler_genus(&self) -> usize {
        let g = self.graph();
        let (comp, ncomp) = g.components();
        let mut pc = vec![0isize; ncomp];
        let mut qc = vec![0isize; ncomp];
        let mut fc = vec![0isize; ncomp];
        for v in 0..g.p() {
            pc[comp[v]] += 1;
        }
        for &(u, _) in g.edges() {
            qc[comp[u]] += 1;
        }
        for f in self.trace_faces() {
            fc[comp[f.darts[0].from]] += 1;
        }
        let mut total = 0usize;
        for c in 0..ncomp {
            if qc[c] == 0 {
                fc[c] = 1;
            }
            let numer = 2 - (pc[c] - qc[c] + fc[c]);
            assert!(
                numer >= 0 && numer % 2 == 0,
                "Euler characteristic parity violated in component {c}"
            );
            total += (numer / 2) as usize;
        }
        total
    }

    /// Multiset of face lengths.
    pub fn face_census(&self) -> BTreeMap<usize, usize> {
        let mut census = BTreeMap::new();
        for f in self.trace_faces() {
            *census.entry(f.len()).or_insert(0) += 1;
        }
        census
    }

    pub fn is_quadrangulation(&self) -> bool {
        let census = self.face_census();
        !census.is_empty() && census.keys().all(|&l| l == 4)
    }

    pub fn is_triangulation(&self) -> bool {
        let census = self.face_census();
        !census.is_empty() && census.keys().all(|&l| l == 3)
    }

    /// Reverses every rotation; genus is preserved and every face walk is
    /// reversed.
    pub fn mirror(&self) -> RotationSystem {
        RotationSystem {
            rot: self
                .rot
                .iter()
                .map(|list| list.iter().rev().copied().collect())
                .collect(),
        }
    }

    /// Shifts `other`'s vertices by `self.p()` and concatenates. Genus adds.
    pub fn disjoint_union(&self, other: &RotationSystem) -> RotationSystem {
        let off = self.p();
        let mut rot = self.rot.clone();
        for list in &other.rot {
            rot.push(list.iter().map(|&w| w + off).collect());
        }
        RotationSystem { rot }
    }

    /// Renames vertices: `perm[old] = new`. `perm` must be a bijection.
    pub fn relabel(&self, perm: &[usize]) -> Result<RotationSystem, EmbedError> {
        let p = self.p();
        if perm.len() != p {
            return Err(EmbedError::Invalid("permutation length mismatch".into()));
        }
        let mut seen = vec![false; p];
        for &x in perm {
            if x >= p || seen[x] {
                return Err(EmbedError::Invalid("not a permutation".into()));
            }
            seen[x] = true;
        }
        let mut rot = vec![Vec::new(); p];
        for v in 0..p {
            rot[perm[v]] = self.rot[v].iter().map(|&w| perm[w]).collect();
        }
        Ok(RotationSystem { rot })
    }

    /// Rotates each neighbor list to start at its smallest entry.
    pub fn canonical(&self) -> RotationSystem {
        let rot = self
            .rot
            .iter()
            .map(|list| {
                if list.is_empty() {
                    return list.clone();
                }
                let k = (0..list.len()).min_by_key(|&i| list[i]).unwrap();
                let mut out = Vec::with_capacity(list.len());
                out.extend_from_slice(&list[k..]);
                out.extend_from_slice(&list[..k]);
                out
            })
            .collect();
        RotationSystem { rot }
    }

    /// Same embedding up to the choice of starting points of the cyclic
    /// orders.
    pub fn equivalent(&self, other: &RotationSystem) -> bool {
        self.canonical() == other.canonical()
    }

    fn find_face(&self, walk: &FaceWalk) -> Result<FaceWalk, EmbedError> {
        let target = walk.canonicalized();
        self.trace_faces()
            .into_iter()
            .find(|f| f.canonicalized() == target)
            .ok_or_else(|| {
                EmbedError::Surgery(format!(
                    "walk through vertices {:?} is not a face",
                    walk.vertices()
                ))
            })
    }

    fn unique_position(face: &FaceWalk, v: usize) -> Result<usize, EmbedError> {
        let pos = face.positions_of(v);
        match pos.as_slice() {
            [one] => Ok(*one),
            [] => Err(EmbedError::Surgery(format!("vertex {v} not on the face"))),
            _ => Err(EmbedError::Surgery(format!(
                "vertex {v} occurs more than once on the face"
            ))),
        }
    }

    /// Attaches a tube (handle) between two distinct faces, adding one new
    /// edge per matching pair. Matched vertices must be supplied in `face_a`'s
    /// walk order and must appear on `face_b` in reversed cyclic order; the
    /// two faces are replaced by `matching.len()` new faces.
    pub fn attach_tube(
        &self,
        face_a: &FaceWalk,
        face_b: &FaceWalk,
        matching: &[(usize, usize)],
    ) -> Result<RotationSystem, EmbedError> {
        let fa = self.find_face(face_a)?;
        let fb = self.find_face(face_b)?;
        if fa == fb {
            return Err(EmbedError::Surgery("tube faces must be distinct".into()));
        }
        let m = matching.len();
        if m == 0 {
            return Err(EmbedError::Surgery("empty tube matching".into()));
        }
        let mut seen = BTreeSet::new();
        for &(a, b) in matching {
            if !seen.insert(a) || !seen.insert(b) {
                return Err(EmbedError::Surgery(
                    "matching vertices are not distinct".into(),
                ));
            }
            if self.rot[a].contains(&b) {
                return Err(EmbedError::Surgery(format!("edge ({a}, {b}) already present")));
            }
        }
        let pos_a: Vec<usize> = matching
            .iter()
            .map(|&(a, _)| Self::unique_position(&fa, a))
            .collect::<Result<_, _>>()?;
        let pos_b: Vec<usize> = matching
            .iter()
            .map(|&(_, b)| Self::unique_position(&fb, b))
            .collect::<Result<_, _>>()?;
        if !in_cyclic_order(&pos_a) {
            return Err(EmbedError::Surgery(
                "matching does not follow the first face's walk order".into(),
            ));
        }
        let rev_b: Vec<usize> = pos_b.iter().rev().copied().collect();
        if !in_cyclic_order(&rev_b) {
            return Err(EmbedError::Surgery(
                "matching orientation incompatible: second face must be matched in reversed cyclic order"
                    .into(),
            ));
        }

        let f_before = self.trace_faces().len();
        let mut rot = self.rot.clone();
        for (i, &(a, b)) in matching.iter().enumerate() {
            corner_insert(&mut rot, &fa, pos_a[i], &[b]);
            corner_insert(&mut rot, &fb, pos_b[i], &[a]);
        }
        let out = RotationSystem::from_rotations(rot)?;
        let f_after = out.trace_faces().len();
        if f_after != f_before + m - 2 {
            return Err(EmbedError::Surgery(format!(
                "tube face accounting failed: {f_before} faces became {f_after}, expected {}",
                f_before + m - 2
            )));
        }
        Ok(out)
    }

    /// Attaches a tube carrying two chords: corners `t1`, `t2` of `face_a`
    /// are each joined to corner `z` of `face_b`. The face count is
    /// unchanged; genus rises by one when the faces share a component.
    pub fn attach_chord_tube(
        &self,
        face_a: &FaceWalk,
        t1: usize,
        t2: usize,
        face_b: &FaceWalk,
        z: usize,
    ) -> Result<RotationSystem, EmbedError> {
        let fa = self.find_face(face_a)?;
        let fb = self.find_face(face_b)?;
        if fa == fb {
            return Err(EmbedError::Surgery("tube faces must be distinct".into()));
        }
        if t1 == t2 || t1 == z || t2 == z {
            return Err(EmbedError::Surgery("chord endpoints must be distinct".into()));
        }
        for t in [t1, t2] {
            if self.rot[t].contains(&z) {
                return Err(EmbedError::Surgery(format!("edge ({t}, {z}) already present")));
            }
        }
        let p1 = Self::unique_position(&fa, t1)?;
        let p2 = Self::unique_position(&fa, t2)?;
        let pz = Self::unique_position(&fb, z)?;
        let f_before = self.trace_faces().len();
        let mut rot = self.rot.clone();
        corner_insert(&mut rot, &fa, p1, &[z]);
        corner_insert(&mut rot, &fa, p2, &[z]);
        corner_insert(&mut rot, &fb, pz, &[t1, t2]);
        let out = RotationSystem::from_rotations(rot)?;
        let f_after = out.trace_faces().len();
        if f_after != f_before {
            return Err(EmbedError::Surgery(format!(
                "chord tube face accounting failed: {f_before} faces became {f_after}"
            )));
        }
        Ok(out)
    }

    /// Adds a new vertex inside a face, joined to the listed boundary
    /// vertices (given in face order). The face of length L splits into
    /// `attach_to.len()` faces; genus is unchanged.
    pub fn insert_vertex_in_face(
        &self,
        face: &FaceWalk,
        attach_to: &[usize],
    ) -> Result<RotationSystem, EmbedError> {
        let f = self.find_face(face)?;
        if attach_to.len() < 2 {
            return Err(EmbedError::Surgery(
                "new vertex needs at least two attachments".into(),
            ));
        }
        let set: BTreeSet<_> = attach_to.iter().collect();
        if set.len() != attach_to.len() {
            return Err(EmbedError::Surgery("repeated attachment vertex".into()));
        }
        let positions: Vec<usize> = attach_to
            .iter()
            .map(|&t| Self::unique_position(&f, t))
            .collect::<Result<_, _>>()?;
        if !in_cyclic_order(&positions) {
            return Err(EmbedError::Surgery(
                "attachments not listed in face order".into(),
            ));
        }
        let z = self.p();
        let genus_before = self.euler_genus();
        let f_before = self.trace_faces().len();
        let mut rot = self.rot.clone();
        rot.push(attach_to.iter().rev().copied().collect());
        for (k, &t) in attach_to.iter().enumerate() {
            corner_insert(&mut rot, &f, positions[k], &[z]);
        }
        let out = RotationSystem::from_rotations(rot)?;
        let f_after = out.trace_faces().len();
        if f_after != f_before + attach_to.len() - 1 || out.euler_genus() != genus_before {
            return Err(EmbedError::Surgery(
                "vertex insertion did not split the face as expected".into(),
            ));
        }
        Ok(out)
    }

    /// Embeds a path `x - interior... - y` across a face (splitting it in
    /// two). Interior vertices must currently be isolated. With an empty
    /// interior this embeds the chord `x - y`.
    pub(crate) fn insert_path_in_face(
        &self,
        face: &FaceWalk,
        x: usize,
        y: usize,
        interior: &[usize],
    ) -> Result<RotationSystem, EmbedError> {
        let f = self.find_face(face)?;
        if x == y {
            return Err(EmbedError::Surgery("path endpoints must differ".into()));
        }
        for &w in interior {
            if !self.rot[w].is_empty() {
                return Err(EmbedError::Surgery(format!(
                    "interior vertex {w} is already embedded"
                )));
            }
        }
        if interior.is_empty() && self.rot[x].contains(&y) {
            return Err(EmbedError::Surgery(format!("edge ({x}, {y}) already present")));
        }
        let px = Self::unique_position(&f, x)?;
        let py = Self::unique_position(&f, y)?;
        let f_before = self.trace_faces().len();
        let mut rot = self.rot.clone();
        let first = *interior.first().unwrap_or(&y);
        let last = *interior.last().unwrap_or(&x);
        corner_insert(&mut rot, &f, px, &[first]);
        corner_insert(&mut rot, &f, py, &[last]);
        for (i, &w) in interior.iter().enumerate() {
            let prev = if i == 0 { x } else { interior[i - 1] };
            let next = if i + 1 == interior.len() { y } else { interior[i + 1] };
            rot[w] = vec![prev, next];
        }
        let out = RotationSystem::from_rotations(rot)?;
        if out.trace_faces().len() != f_before + 1 {
            return Err(EmbedError::Surgery("path insertion did not split the face".into()));
        }
        Ok(out)
    }

    /// Removes the listed edges from the rotations; remaining faces are
    /// whatever re-tracing yields. Never increases genus.
    pub fn delete_edges(&self, edges: &[(usize, usize)]) -> Result<RotationSystem, EmbedError> {
        let mut rot = self.rot.clone();
        for &(u, v) in edges {
            let iu = rot[u].iter().position(|&w| w == v).ok_or_else(|| {
                EmbedError::Surgery(format!("edge ({u}, {v}) not present"))
            })?;
            rot[u].remove(iu);
            let iv = rot[v].iter().position(|&w| w == u).ok_or_else(|| {
                EmbedError::Surgery(format!("edge ({u}, {v}) not present"))
            })?;
            rot[v].remove(iv);
        }
        RotationSystem::from_rotations(rot)
    }

    /// Re-pairs the darts of two independent edges: `(x1, y1)` and `(x2, y2)`
    /// become `(x1, y2)` and `(x2, y1)`. Rotations (corner positions) are
    /// untouched; only the neighbor labels change. No genus promise — callers
    /// assert what their construction expects.
    pub fn swap_edge_ends(
        &self,
        e1: (usize, usize),
        e2: (usize, usize),
    ) -> Result<RotationSystem, EmbedError> {
        let (x1, y1) = e1;
        let (x2, y2) = e2;
        let ends = [x1, y1, x2, y2];
        let set: BTreeSet<_> = ends.iter().collect();
        if set.len() != 4 {
            return Err(EmbedError::Surgery(
                "swap needs four distinct endpoints".into(),
            ));
        }
        if !self.rot[x1].contains(&y1) || !self.rot[x2].contains(&y2) {
            return Err(EmbedError::Surgery("swap edge not present".into()));
        }
        if self.rot[x1].contains(&y2) || self.rot[x2].contains(&y1) {
            return Err(EmbedError::Surgery("swap would duplicate an edge".into()));
        }
        let mut rot = self.rot.clone();
        let i1 = rot[x1].iter().position(|&w| w == y1).unwrap();
        let i2 = rot[y1].iter().position(|&w| w == x1).unwrap();
        let i3 = rot[x2].iter().position(|&w| w == y2).unwrap();
        let i4 = rot[y2].iter().position(|&w| w == x2).unwrap();
        rot[x1][i1] = y2;
        rot[y1][i2] = x2;
        rot[x2][i3] = y1;
        rot[y2][i4] = x1;
        RotationSystem::from_rotations(rot)
    }
}

/// Checks the cover invariants: each listed quad is a length-4 face with four
/// distinct vertices, and every vertex lies in exactly one of them.
pub fn verify_vdqc(rs: &RotationSystem, s: &Vdqc) -> bool {
    let faces: BTreeSet<FaceWalk> = rs
        .trace_faces()
        .into_iter()
        .map(|f| f.canonicalized())
        .collect();
    let mut covered = vec![0usize; rs.p()];
    for quad in &s.quads {
        if quad.len() != 4 || quad.vertex_set().len() != 4 {
            return false;
        }
        if !faces.contains(&quad.canonicalized()) {
            return false;
        }
        for v in quad.vertices() {
            covered[v] += 1;
        }
    }
    covered.iter().all(|&c| c == 1)
}

/// Exact-cover backtracking over the quad faces, bounded by a node budget.
pub fn find_vdqc(rs: &RotationSystem, budget_nodes: u64) -> VdqcOutcome {
    let quads: Vec<FaceWalk> = rs
        .trace_faces()
        .into_iter()
        .filter(|f| f.len() == 4 && f.vertex_set().len() == 4)
        .collect();
    let p = rs.p();
    let mut containing: Vec<Vec<usize>> = vec![Vec::new(); p];
    for (i, q) in quads.iter().enumerate() {
        for v in q.vertices() {
            containing[v].push(i);
        }
    }
    struct State<'a> {
        quads: &'a [FaceWalk],
        containing: &'a [Vec<usize>],
        covered: Vec<bool>,
        chosen: Vec<usize>,
        nodes: u64,
        budget: u64,
        exhausted: bool,
    }
    fn go(st: &mut State<'_>) -> bool {
        if st.nodes >= st.budget {
            st.exhausted = true;
            return false;
        }
        st.nodes += 1;
        let v = match st.covered.iter().position(|&c| !c) {
            None => return true,
            Some(v) => v,
        };
        for &qi in &st.containing[v] {
            if st.quads[qi].vertices().iter().any(|&w| st.covered[w]) {
                continue;
            }
            for w in st.quads[qi].vertices() {
                st.covered[w] = true;
            }
            st.chosen.push(qi);
            if go(st) {
                return true;
            }
            st.chosen.pop();
            for w in st.quads[qi].vertices() {
                st.covered[w] = false;
            }
            if st.exhausted {
                return false;
            }
        }
        false
    }
    let mut st = State {
        quads: &quads,
        containing: &containing,
        covered: vec![false; p],
        chosen: Vec::new(),
        nodes: 0,
        budget: budget_nodes,
        exhausted: false,
    };
    if go(&mut st) {
        VdqcOutcome::Found(Vdqc {
            quads: st.chosen.iter().map(|&i| quads[i].clone()).collect(),
        })
    } else {
        VdqcOutcome::NotFound {
            budget_exhausted: st.exhausted,
        }
    }
}

/// Parses the embedding file format: a `p` line, then one `v: n1 n2 ... nk`
/// line per vertex giving the cyclic rotation as a neighbor list.
pub fn parse_embedding(text: &str) -> Result<RotationSystem, EmbedError> {
    let mut p: Option<usize> = None;
    let mut rot: Vec<Option<Vec<usize>>> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match p {
            None => {
                let n = line.parse::<usize>().map_err(|_| EmbedError::Parse {
                    line: lineno,
                    msg: format!("expected vertex count, got `{line}`"),
                })?;
                p = Some(n);
                rot = vec![None; n];
            }
            Some(n) => {
                let (head, tail) = line.split_once(':').ok_or(EmbedError::Parse {
                    line: lineno,
                    msg: "expected `v: neighbors`".into(),
                })?;
                let v = head.trim().parse::<usize>().map_err(|_| EmbedError::Parse {
                    line: lineno,
                    msg: format!("malformed vertex `{head}`"),
                })?;
                if v >= n {
                    return Err(EmbedError::Parse {
                        line: lineno,
                        msg: format!("vertex {v} out of range for {n} vertices"),
                    });
                }
                if rot[v].is_some() {
                    return Err(EmbedError::Parse {
                        line: lineno,
                        msg: format!("vertex {v} listed twice"),
                    });
                }
                let ns = tail
                    .split_whitespace()
                    .map(|t| {
                        t.parse::<usize>().map_err(|_| EmbedError::Parse {
                            line: lineno,
                            msg: format!("malformed neighbor `{t}`"),
                        })
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                rot[v] = Some(ns);
            }
        }
    }
    let n = p.ok_or(EmbedError::Parse {
        line: 1,
        msg: "missing vertex count".into(),
    })?;
    let mut lists = Vec::with_capacity(n);
    for (v, r) in rot.into_iter().enumerate() {
        lists.push(r.ok_or(EmbedError::Parse {
            line: 0,
            msg: format!("vertex {v} has no rotation line"),
        })?);
    }
    RotationSystem::from_rotations(lists)
}

/// Serializes to the embedding file format in canonical form (each rotation
/// starts at its smallest neighbor).
pub fn serialize_embedding(rs: &RotationSystem) -> String {
    let canon = rs.canonical();
    let mut out = format!("{}\n", canon.p());
    for v in 0..canon.p() {
        let ns: Vec<String> = canon.rotation(v).iter().map(|w| w.to_string()).collect();
        if ns.is_empty() {
            out.push_str(&format!("{v}:\n"));
        } else {
            out.push_str(&format!("{v}: {}\n", ns.join(" ")));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn cycle_rs(n: usize) -> RotationSystem {
        let rot: Vec<Vec<usize>> = (0..n).map(|v| vec![(v + n - 1) % n, (v + 1) % n]).collect();
        RotationSystem::from_rotations(rot).unwrap()
    }

    /// Planar 3-cube via its six quadrilateral faces.
    pub(crate) fn planar_q3() -> RotationSystem {
        RotationSystem::from_faces(
            8,
            &[
                vec![0, 1, 3, 2],
                vec![4, 5, 7, 6],
                vec![0, 1, 5, 4],
                vec![2, 3, 7, 6],
                vec![0, 2, 6, 4],
                vec![1, 3, 7, 5],
            ],
        )
        .unwrap()
    }

    #[test]
    fn cycle_has_two_quad_faces() {
        let rs = cycle_rs(4);
        let faces = rs.trace_faces();
        assert_eq!(faces.len(), 2);
        assert!(faces.iter().all(|f| f.len() == 4));
        assert_eq!(rs.euler_genus(), 0);
    }

    #[test]
    fn planar_cube_is_a_quadrangulation() {
        let rs = planar_q3();
        assert_eq!(rs.p(), 8);
        assert_eq!(rs.q(), 12);
        let census = rs.face_census();
        assert_eq!(census.get(&4), Some(&6));
        assert!(rs.is_quadrangulation());
        assert!(!rs.is_triangulation());
        assert_eq!(rs.euler_genus(), 0);
    }

    #[test]
    fn k4_with_sorted_rotations_lands_on_the_torus() {
        let rot = vec![vec![1, 2, 3], vec![0, 2, 3], vec![0, 1, 3], vec![0, 1, 2]];
        let rs = RotationSystem::from_rotations(rot).unwrap();
        let faces = rs.trace_faces();
        assert_eq!(faces.len(), 2);
        let mut lens: Vec<usize> = faces.iter().map(|f| f.len()).collect();
        lens.sort_unstable();
        assert_eq!(lens, vec![4, 8]);
        assert_eq!(rs.euler_genus(), 1);
    }

    #[test]
    fn mirror_is_an_involution_and_preserves_the_census() {
        let rs = planar_q3();
        let m = rs.mirror();
        assert_eq!(m.mirror(), rs);
        assert_eq!(m.euler_genus(), 0);
        assert_eq!(m.face_census(), rs.face_census());
        // Mirror faces are the reversed originals.
        let orig: BTreeSet<FaceWalk> = rs
            .trace_faces()
            .iter()
            .map(|f| f.mirror_image(0))
            .collect();
        let mirrored: BTreeSet<FaceWalk> =
            m.trace_faces().into_iter().map(|f| f.canonicalized()).collect();
        assert_eq!(orig, mirrored);
    }

    #[test]
    fn disjoint_union_adds_genus_and_faces() {
        let a = cycle_rs(4);
        let b = cycle_rs(4);
        let u = a.disjoint_union(&b);
        assert_eq!(u.p(), 8);
        assert_eq!(u.euler_genus(), 0);
        assert_eq!(u.trace_faces().len(), 4);
        let torus = {
            let rot = vec![vec![1, 2, 3], vec![0, 2, 3], vec![0, 1, 3], vec![0, 1, 2]];
            RotationSystem::from_rotations(rot).unwrap()
        };
        assert_eq!(planar_q3().disjoint_union(&torus).euler_genus(), 1);
        let empty = RotationSystem::from_rotations(Vec::new()).unwrap();
        assert_eq!(planar_q3().disjoint_union(&empty), planar_q3());
    }

    #[test]
    fn tube_between_two_squares_builds_the_cube() {
        let u = cycle_rs(4).disjoint_union(&cycle_rs(4));
        let faces = u.trace_faces();
        let fa = faces.iter().find(|f| f.contains_vertex(0)).unwrap().clone();
        // The copy-1 face visiting 4,5,6,7 in reversed cyclic order relative
        // to fa's (0,1,2,3).
        let a_order = fa.vertices();
        let matching: Vec<(usize, usize)> = a_order.iter().map(|&v| (v, v + 4)).collect();
        let fb = faces
            .iter()
            .filter(|f| f.contains_vertex(4))
            .find(|f| {
                let vs = f.vertices();
                let rev: Vec<usize> = vs.iter().rev().copied().collect();
                let want: Vec<usize> = a_order.iter().map(|&v| v + 4).collect();
                (0..4).any(|r| (0..4).all(|i| rev[(i + r) % 4] == want[i]))
            })
            .unwrap()
            .clone();
        let tubed = u.attach_tube(&fa, &fb, &matching).unwrap();
        assert_eq!(tubed.q(), 12);
        assert_eq!(tubed.euler_genus(), 0);
        assert_eq!(tubed.face_census().get(&4), Some(&6));
        let g = tubed.graph();
        assert!(g.degrees().iter().all(|&d| d == 3));
    }

    #[test]
    fn tube_within_one_component_raises_genus() {
        let rs = cycle_rs(4);
        let faces = rs.trace_faces();
        // Matching (0,2),(1,3) between the two faces of the square gives K_4.
        let fa = faces[0].clone();
        let fb = faces[1].clone();
        let a_order = fa.vertices();
        let matching = vec![(a_order[0], (a_order[0] + 2) % 4), (a_order[1], (a_order[1] + 2) % 4)];
        let tubed = rs.attach_tube(&fa, &fb, &matching).unwrap();
        assert_eq!(tubed.q(), 6);
        assert_eq!(tubed.euler_genus(), 1);
    }

    #[test]
    fn tube_rejects_wrong_orientation() {
        let u = cycle_rs(4).disjoint_union(&cycle_rs(4));
        let faces = u.trace_faces();
        let fa = faces.iter().find(|f| f.contains_vertex(0)).unwrap().clone();
        let a_order = fa.vertices();
        // Matching aligned with (not reversed against) the far face's order.
        let fb = faces
            .iter()
            .filter(|f| f.contains_vertex(4))
            .find(|f| {
                let vs = f.vertices();
                let want: Vec<usize> = a_order.iter().map(|&v| v + 4).collect();
                (0..4).any(|r| (0..4).all(|i| vs[(i + r) % 4] == want[i]))
            })
            .unwrap()
            .clone();
        let matching: Vec<(usize, usize)> = a_order.iter().map(|&v| (v, v + 4)).collect();
        assert!(u.attach_tube(&fa, &fb, &matching).is_err());
    }

    #[test]
    fn vertex_insertion_preserves_genus_and_splits_faces() {
        let rs = planar_q3();
        let face = rs.trace_faces()[0].clone();
        let vs = face.vertices();
        // Opposite corners of a quad: both new faces are quads.
        let out = rs.insert_vertex_in_face(&face, &[vs[0], vs[2]]).unwrap();
        assert_eq!(out.p(), 9);
        assert_eq!(out.q(), 14);
        assert_eq!(out.euler_genus(), 0);
        assert!(out.is_quadrangulation());
        // Adjacent corners: faces of lengths 3 and 5.
        let out2 = rs.insert_vertex_in_face(&face, &[vs[0], vs[1]]).unwrap();
        assert_eq!(out2.euler_genus(), 0);
        let census = out2.face_census();
        assert_eq!(census.get(&3), Some(&1));
        assert_eq!(census.get(&5), Some(&1));
        // All four corners of a triangle preserve a triangulation.
        let torus_k4 = {
            let rot = vec![vec![1, 2, 3], vec![0, 2, 3], vec![0, 1, 3], vec![0, 1, 2]];
            RotationSystem::from_rotations(rot).unwrap()
        };
        let tri = torus_k4
            .trace_faces()
            .into_iter()
            .find(|f| f.len() == 4)
            .unwrap();
        let vs = tri.vertices();
        let out3 = torus_k4.insert_vertex_in_face(&tri, &vs).unwrap();
        assert_eq!(out3.euler_genus(), 1);
        assert_eq!(out3.q(), 10);
    }

    #[test]
    fn deleting_a_shared_edge_merges_two_quads() {
        let rs = planar_q3();
        let out = rs.delete_edges(&[(0, 1)]).unwrap();
        assert_eq!(out.q(), 11);
        assert_eq!(out.euler_genus(), 0);
        let census = out.face_census();
        assert_eq!(census.get(&4), Some(&4));
        assert_eq!(census.get(&6), Some(&1));
        assert!(rs.delete_edges(&[]).unwrap() == rs);
        assert!(rs.delete_edges(&[(0, 7)]).is_err());
    }

    #[test]
    fn swap_is_an_involution_and_can_change_genus() {
        let rs = planar_q3();
        // (0,1) and (6,7) are vertex-disjoint; swapped edges are absent.
        let once = rs.swap_edge_ends((0, 1), (6, 7)).unwrap();
        let back = once.swap_edge_ends((0, 7), (6, 1)).unwrap();
        assert_eq!(back, rs);
        // Some valid swap changes the genus; find one by brute force.
        let edges = rs.graph().edges().to_vec();
        let mut changed = false;
        for (i, &e1) in edges.iter().enumerate() {
            for &e2 in &edges[i + 1..] {
                let ends: BTreeSet<usize> = [e1.0, e1.1, e2.0, e2.1].into_iter().collect();
                if ends.len() != 4 {
                    continue;
                }
                if let Ok(out) = rs.swap_edge_ends(e1, e2) {
                    if out.euler_genus() != 0 {
                        changed = true;
                        break;
                    }
                }
            }
            if changed {
                break;
            }
        }
        assert!(changed, "no valid swap changed the genus of the planar cube");
    }

    #[test]
    fn vdqc_verify_and_search_on_the_planar_cube() {
        let rs = planar_q3();
        let faces = rs.trace_faces();
        let top = faces
            .iter()
            .find(|f| f.vertex_set() == BTreeSet::from([0, 1, 2, 3]))
            .unwrap();
        let bottom = faces
            .iter()
            .find(|f| f.vertex_set() == BTreeSet::from([4, 5, 6, 7]))
            .unwrap();
        let good = Vdqc { quads: vec![top.clone(), bottom.clone()] };
        assert!(verify_vdqc(&rs, &good));
        let side = faces
            .iter()
            .find(|f| f.vertex_set() == BTreeSet::from([0, 1, 4, 5]))
            .unwrap();
        let bad = Vdqc { quads: vec![top.clone(), side.clone()] };
        assert!(!verify_vdqc(&rs, &bad));
        match find_vdqc(&rs, 10_000) {
            VdqcOutcome::Found(s) => {
                assert_eq!(s.quads.len(), 2);
                assert!(verify_vdqc(&rs, &s));
            }
            other => panic!("expected a cover, got {other:?}"),
        }
        // A graph with no quad faces has no cover.
        let torus_k4 = {
            let rot = vec![vec![1, 2, 3], vec![0, 2, 3], vec![0, 1, 3], vec![0, 1, 2]];
            RotationSystem::from_rotations(rot).unwrap()
        };
        assert!(matches!(
            find_vdqc(&torus_k4, 10_000),
            VdqcOutcome::NotFound { budget_exhausted: false }
        ));
    }

    #[test]
    fn embedding_files_round_trip() {
        for rs in [planar_q3(), cycle_rs(5)] {
            let text = serialize_embedding(&rs);
            let back = parse_embedding(&text).unwrap();
            assert!(back.equivalent(&rs));
            assert_eq!(serialize_embedding(&back), text);
        }
        assert!(parse_embedding("2\n0: 1\n1: 0\n0: 1\n").is_err());
        assert!(parse_embedding("2\n0: 1\n1:\n").is_err());
        assert!(parse_embedding("2\n0: 5\n1: 0\n").is_err());
        assert!(parse_embedding("abc\n").is_err());
    }

    #[test]
    fn from_faces_rejects_bad_complexes() {
        // Edge covered once.
        assert!(RotationSystem::from_faces(3, &[vec![0, 1, 2]]).is_err());
        // Klein-style identification: same direction twice within one face
        // family that cannot be 2-colored.
        let err = RotationSystem::from_faces(
            4,
            &[vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]],
        );
        // The tetrahedron boundary is orientable, so this one succeeds.
        assert!(err.is_ok());
        assert_eq!(err.unwrap().euler_genus(), 0);
    }

    #[test]
    fn relabel_permutes_consistently() {
        let rs = planar_q3();
        let perm: Vec<usize> = (0..8).map(|v| (v + 3) % 8).collect();
        let out = rs.relabel(&perm).unwrap();
        assert_eq!(out.euler_genus(), 0);
        assert!(out.is_quadrangulation());
        let back: Vec<usize> = (0..8).map(|v| (v + 5) % 8).collect();
        assert_eq!(out.relabel(&back).unwrap(), rs);
    }
}
