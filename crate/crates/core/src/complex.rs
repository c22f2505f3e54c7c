//! Finite abstract simplicial complexes over dense integer vertex ids.
//!
//! A [`Complex`] is stored as the downward closure of its facet list. Faces
//! are sorted vertex sequences, and every complex carries the label table of
//! the vertex universe it was built over, so subcomplexes produced by
//! skeletons, induced subcomplexes or collapses keep the original labels.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use sha2::{Digest, Sha256};
use smallvec::SmallVec;
use thiserror::Error;

pub type VertexId = u32;

/// Largest supported face size (a tetrahedron).
pub const MAX_FACE_LEN: usize = 4;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ComplexError {
    #[error("malformed face: vertex `{0}` appears twice")]
    MalformedFace(String),
    #[error("empty face cannot be listed as a facet")]
    EmptyFace,
    #[error("the complex has no vertices")]
    Empty,
    #[error("dimension {0} is not supported (maximum is {max})", max = MAX_FACE_LEN - 1)]
    UnsupportedDimension(isize),
    #[error("`{0}` is not a face of the complex")]
    NotAFace(String),
    #[error("vertex id {0} is outside the label table")]
    UnknownVertex(VertexId),
}

/// A face: a strictly increasing sequence of vertex ids.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Face(SmallVec<[VertexId; MAX_FACE_LEN]>);

impl Face {
    /// Builds a face from arbitrary-order vertices, rejecting duplicates.
    pub fn new(vertices: impl IntoIterator<Item = VertexId>) -> Result<Face, ComplexError> {
        Self::sorted_unique(vertices).map_err(|v| ComplexError::MalformedFace(v.to_string()))
    }

    /// Sorts the vertices; on a repeat, returns the repeated vertex.
    fn sorted_unique(vertices: impl IntoIterator<Item = VertexId>) -> Result<Face, VertexId> {
        let mut vs: SmallVec<[VertexId; MAX_FACE_LEN]> = vertices.into_iter().collect();
        vs.sort_unstable();
        if let Some(w) = vs.windows(2).find(|w| w[0] == w[1]) {
            return Err(w[0]);
        }
        Ok(Face(vs))
    }

    pub(crate) fn from_sorted(vertices: &[VertexId]) -> Face {
        debug_assert!(vertices.windows(2).all(|w| w[0] < w[1]));
        Face(SmallVec::from_slice(vertices))
    }

    pub fn empty() -> Face {
        Face(SmallVec::new())
    }

    pub fn vertex(v: VertexId) -> Face {
        Face(SmallVec::from_slice(&[v]))
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `|face| - 1`; the empty face has dimension −1.
    pub fn dim(&self) -> isize {
        self.0.len() as isize - 1
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn is_subset(&self, other: &Face) -> bool {
        let mut it = other.0.iter();
        'outer: for v in &self.0 {
            for w in it.by_ref() {
                if w == v {
                    continue 'outer;
                }
                if w > v {
                    return false;
                }
            }
            return false;
        }
        true
    }

    /// Faces obtained by dropping exactly one vertex.
    pub fn boundary(&self) -> impl Iterator<Item = Face> + '_ {
        (0..self.0.len()).map(move |skip| {
            Face(
                self.0
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != skip)
                    .map(|(_, &v)| v)
                    .collect(),
            )
        })
    }

    /// All subsets of the face, including the empty face and the face itself.
    pub fn subfaces(&self) -> impl Iterator<Item = Face> + '_ {
        let n = self.0.len();
        (0u32..(1 << n)).map(move |mask| {
            Face(
                (0..n)
                    .filter(|i| mask & (1 << i) != 0)
                    .map(|i| self.0[i])
                    .collect(),
            )
        })
    }

    pub fn intersection(&self, other: &Face) -> Face {
        Face(
            self.0
                .iter()
                .copied()
                .filter(|&v| other.contains(v))
                .collect(),
        )
    }
}

impl fmt::Debug for Face {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0.as_slice())
    }
}

#[derive(Debug)]
struct LabelTable {
    names: Vec<String>,
    ids: HashMap<String, VertexId>,
}

/// Maps vertex ids to their original string labels.
#[derive(Clone, Debug)]
pub struct Labels(Arc<LabelTable>);

impl Labels {
    pub fn new(names: Vec<String>) -> Labels {
        let ids = names
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i as VertexId))
            .collect();
        Labels(Arc::new(LabelTable { names, ids }))
    }

    /// Labels `0`, `1`, …, `n-1`.
    pub fn numeric(n: usize) -> Labels {
        Labels::new((0..n).map(|i| i.to_string()).collect())
    }

    pub fn len(&self) -> usize {
        self.0.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.names.is_empty()
    }

    pub fn name(&self, v: VertexId) -> &str {
        &self.0.names[v as usize]
    }

    pub fn id(&self, name: &str) -> Option<VertexId> {
        self.0.ids.get(name).copied()
    }

    /// Space-separated labels of the face's vertices.
    pub fn render(&self, face: &Face) -> String {
        self.render_slice(face.vertices())
    }

    pub fn render_slice(&self, vertices: &[VertexId]) -> String {
        let mut out = String::new();
        for (i, &v) in vertices.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            out.push_str(self.name(v));
        }
        out
    }

    /// Resolves whitespace-free label tokens into a face.
    pub fn face<S: AsRef<str>>(&self, tokens: &[S]) -> Result<Face, ComplexError> {
        let ids = tokens
            .iter()
            .map(|t| {
                self.id(t.as_ref())
                    .ok_or_else(|| ComplexError::NotAFace(t.as_ref().to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Face::sorted_unique(ids).map_err(|v| ComplexError::MalformedFace(self.name(v).to_string()))
    }
}

impl PartialEq for Labels {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.names == other.0.names
    }
}

impl Eq for Labels {}

/// Face counts by dimension, starting at dimension −1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FVector(Vec<usize>);

impl FVector {
    /// `f_dim`; zero for dimensions above the complex's dimension.
    pub fn get(&self, dim: isize) -> usize {
        let idx = dim + 1;
        if idx < 0 {
            return 0;
        }
        self.0.get(idx as usize).copied().unwrap_or(0)
    }

    /// Counts `f_{-1}, f_0, …, f_d`.
    pub fn counts(&self) -> &[usize] {
        &self.0
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }
}

impl fmt::Display for FVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// An immutable finite simplicial complex.
#[derive(Clone, Debug)]
pub struct Complex {
    /// Inclusion-maximal faces, sorted lexicographically.
    facets: Vec<Face>,
    /// Every face including the empty one, sorted by size then lexicographically.
    faces: Vec<Face>,
    index: HashMap<Face, usize>,
    labels: Labels,
}

impl PartialEq for Complex {
    fn eq(&self, other: &Self) -> bool {
        self.facets == other.facets && self.labels == other.labels
    }
}

impl Eq for Complex {}

impl Complex {
    /// Builds a complex from facets given as label sequences.
    ///
    /// Vertex ids are assigned in order of first appearance. Listed faces
    /// contained in other listed faces are absorbed.
    pub fn from_facets<I, J, S>(facets: I) -> Result<Complex, ComplexError>
    where
        I: IntoIterator<Item = J>,
        J: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        Self::from_facets_reporting(facets).map(|(k, _)| k)
    }

    /// Like [`Complex::from_facets`], also returning the positions of
    /// listed faces that were absorbed (non-maximal or repeated).
    pub fn from_facets_reporting<I, J, S>(facets: I) -> Result<(Complex, Vec<usize>), ComplexError>
    where
        I: IntoIterator<Item = J>,
        J: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut names: Vec<String> = Vec::new();
        let mut ids: HashMap<String, VertexId> = HashMap::new();
        let mut listed = Vec::new();
        for face in facets {
            let mut vs = Vec::new();
            for label in face {
                let label = label.as_ref();
                let id = *ids.entry(label.to_string()).or_insert_with(|| {
                    names.push(label.to_string());
                    (names.len() - 1) as VertexId
                });
                vs.push(id);
            }
            if vs.is_empty() {
                return Err(ComplexError::EmptyFace);
            }
            let face = Face::sorted_unique(vs)
                .map_err(|v| ComplexError::MalformedFace(names[v as usize].clone()))?;
            listed.push(face);
        }
        let labels = Labels::new(names);
        let complex = Complex::from_faces(listed.iter().cloned(), labels)?;
        let mut seen = HashSet::new();
        let absorbed = listed
            .iter()
            .enumerate()
            .filter(|(_, f)| !seen.insert((*f).clone()) || complex.facets.binary_search(f).is_err())
            .map(|(i, _)| i)
            .collect();
        Ok((complex, absorbed))
    }

    /// Downward closure of `generators` over the given label table.
    pub fn from_faces(
        generators: impl IntoIterator<Item = Face>,
        labels: Labels,
    ) -> Result<Complex, ComplexError> {
        let mut set: HashSet<Face> = HashSet::new();
        set.insert(Face::empty());
        for g in generators {
            if g.len() > MAX_FACE_LEN {
                return Err(ComplexError::UnsupportedDimension(g.dim()));
            }
            if let Some(&v) = g.vertices().iter().find(|&&v| v as usize >= labels.len()) {
                return Err(ComplexError::UnknownVertex(v));
            }
            if set.contains(&g) {
                continue;
            }
            for sub in g.subfaces() {
                set.insert(sub);
            }
        }
        Self::from_closed(set, labels)
    }

    /// `set` must already be downward closed and contain the empty face.
    pub(crate) fn from_closed(set: HashSet<Face>, labels: Labels) -> Result<Complex, ComplexError> {
        if set.len() <= 1 {
            return Err(ComplexError::Empty);
        }
        let mut non_maximal: HashSet<Face> = HashSet::new();
        for f in &set {
            for b in f.boundary() {
                non_maximal.insert(b);
            }
        }
        let mut facets: Vec<Face> = set
            .iter()
            .filter(|f| !non_maximal.contains(*f))
            .cloned()
            .collect();
        facets.sort();
        let mut faces: Vec<Face> = set.into_iter().collect();
        faces.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        let index = faces
            .iter()
            .enumerate()
            .map(|(i, f)| (f.clone(), i))
            .collect();
        Ok(Complex {
            facets,
            faces,
            index,
            labels,
        })
    }

    pub fn facets(&self) -> &[Face] {
        &self.facets
    }

    /// All faces (including the empty face), sorted by size then lexicographically.
    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn faces_of_dim(&self, dim: isize) -> impl Iterator<Item = &Face> {
        self.faces.iter().filter(move |f| f.dim() == dim)
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.faces_of_dim(0).map(|f| f.vertices()[0])
    }

    pub fn num_vertices(&self) -> usize {
        self.faces_of_dim(0).count()
    }

    pub fn edges(&self) -> impl Iterator<Item = &Face> {
        self.faces_of_dim(1)
    }

    pub fn triangles(&self) -> impl Iterator<Item = &Face> {
        self.faces_of_dim(2)
    }

    pub fn contains(&self, face: &Face) -> bool {
        self.index.contains_key(face)
    }

    pub(crate) fn face_index(&self, face: &Face) -> Option<usize> {
        self.index.get(face).copied()
    }

    pub fn is_facet(&self, face: &Face) -> bool {
        self.facets.binary_search(face).is_ok()
    }

    pub fn labels(&self) -> &Labels {
        &self.labels
    }

    pub fn render(&self, face: &Face) -> String {
        self.labels.render(face)
    }

    pub fn f_vector(&self) -> FVector {
        let top = self.faces.last().map_or(0, |f| f.len());
        let mut counts = vec![0; top + 1];
        for f in &self.faces {
            counts[f.len()] += 1;
        }
        FVector(counts)
    }

    pub fn dimension(&self) -> isize {
        self.faces.last().map_or(-1, |f| f.dim())
    }

    pub fn is_pure(&self) -> bool {
        let d = self.dimension();
        self.facets.iter().all(|f| f.dim() == d)
    }

    pub fn reduced_euler_characteristic(&self) -> i64 {
        self.f_vector()
            .counts()
            .iter()
            .enumerate()
            .map(|(i, &c)| if i % 2 == 0 { -(c as i64) } else { c as i64 })
            .sum()
    }

    /// Connectivity of the 1-skeleton.
    pub fn is_connected(&self) -> bool {
        let verts: Vec<VertexId> = self.vertices().collect();
        let pos: HashMap<VertexId, usize> =
            verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut parent: Vec<usize> = (0..verts.len()).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let mut components = verts.len();
        for e in self.edges() {
            let a = find(&mut parent, pos[&e.vertices()[0]]);
            let b = find(&mut parent, pos[&e.vertices()[1]]);
            if a != b {
                parent[a] = b;
                components -= 1;
            }
        }
        components == 1
    }

    /// Whether every 3-clique of the 1-skeleton spans a triangle.
    pub fn is_flag2(&self) -> Result<bool, ComplexError> {
        let d = self.dimension();
        if d > 2 {
            return Err(ComplexError::UnsupportedDimension(d));
        }
        let mut adj: HashMap<VertexId, BTreeSet<VertexId>> = HashMap::new();
        for e in self.edges() {
            let (u, v) = (e.vertices()[0], e.vertices()[1]);
            adj.entry(u).or_default().insert(v);
            adj.entry(v).or_default().insert(u);
        }
        for e in self.edges() {
            let (u, v) = (e.vertices()[0], e.vertices()[1]);
            for &w in adj[&u].intersection(&adj[&v]) {
                if w > v && !self.contains(&Face::from_sorted(&[u, v, w])) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// The `k`-skeleton: all faces of dimension at most `k`.
    pub fn skeleton(&self, k: usize) -> Complex {
        let set = self
            .faces
            .iter()
            .filter(|f| f.len() <= k + 1)
            .cloned()
            .collect();
        Complex::from_closed(set, self.labels.clone()).expect("skeleton of a nonempty complex")
    }

    /// The subcomplex of faces contained in at least one of `faces`.
    pub fn induced(&self, faces: &[Face]) -> Result<Complex, ComplexError> {
        if let Some(f) = faces.iter().find(|f| !self.contains(f)) {
            return Err(ComplexError::NotAFace(self.render(f)));
        }
        Complex::from_faces(faces.iter().cloned(), self.labels.clone())
    }

    /// The barycentric subdivision.
    ///
    /// Vertex `i` of the result is the `i`-th nonempty face of `self` in
    /// [`Complex::faces`] order, labelled `{l0|l1|…}` after its vertices.
    pub fn barycentric_subdivision(&self) -> Complex {
        let names = self.faces[1..]
            .iter()
            .map(|f| {
                let parts: Vec<&str> = f.vertices().iter().map(|&v| self.labels.name(v)).collect();
                format!("{{{}}}", parts.join("|"))
            })
            .collect();
        let labels = Labels::new(names);
        let mut facets = Vec::new();
        for sigma in &self.facets {
            let mut perm: Vec<VertexId> = sigma.vertices().to_vec();
            for_each_permutation(&mut perm, &mut |order| {
                let mut chain = Vec::with_capacity(order.len());
                let mut prefix: Vec<VertexId> = Vec::with_capacity(order.len());
                for &v in order {
                    let at = prefix.binary_search(&v).unwrap_err();
                    prefix.insert(at, v);
                    let id = self.index[&Face::from_sorted(&prefix)] - 1;
                    chain.push(id as VertexId);
                }
                facets.push(Face::new(chain).expect("chain members are distinct"));
            });
        }
        Complex::from_faces(facets, labels).expect("subdivision of a nonempty complex")
    }

    /// Stable digest of the labelled facet list, independent of id assignment.
    pub fn fingerprint(&self) -> String {
        let mut rows: Vec<Vec<&str>> = self
            .facets
            .iter()
            .map(|f| {
                let mut r: Vec<&str> = f.vertices().iter().map(|&v| self.labels.name(v)).collect();
                r.sort_unstable();
                r
            })
            .collect();
        rows.sort();
        let mut hasher = Sha256::new();
        for r in rows {
            hasher.update(r.join(" ").as_bytes());
            hasher.update(b"\n");
        }
        hasher.finalize()[..8]
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

/// Calls `f` on every permutation of `items` (Heap's algorithm).
pub(crate) fn for_each_permutation<T: Copy>(items: &mut [T], f: &mut impl FnMut(&[T])) {
    let n = items.len();
    let mut c = vec![0usize; n];
    f(items);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                items.swap(0, i);
            } else {
                items.swap(c[i], i);
            }
            f(items);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}
