//! Canonical forms and exhaustive enumeration of small complexes and graphs.
//!
//! Triangles over `n ≤ 7` vertices are encoded as bits of a `u64`, bit `i`
//! standing for the `i`-th 3-set in lexicographic order; edges likewise in a
//! `u32`. The canonical form of a triangle set is its lexicographically least
//! sorted facet list over all vertex permutations.

use std::collections::BTreeSet;

use crate::complex::{for_each_permutation, Complex, Face, Labels, VertexId};
use crate::wsat::{Edge, Graph};

pub const MAX_CANON_VERTICES: usize = 7;

pub type Triangle = [u8; 3];

fn triples(n: usize) -> Vec<Triangle> {
    let mut out = Vec::new();
    for a in 0..n as u8 {
        for b in a + 1..n as u8 {
            for c in b + 1..n as u8 {
                out.push([a, b, c]);
            }
        }
    }
    out
}

fn pairs(n: usize) -> Vec<[u8; 2]> {
    let mut out = Vec::new();
    for a in 0..n as u8 {
        for b in a + 1..n as u8 {
            out.push([a, b]);
        }
    }
    out
}

fn permutations(n: usize) -> Vec<Vec<u8>> {
    let mut items: Vec<u8> = (0..n as u8).collect();
    let mut out = Vec::new();
    for_each_permutation(&mut items, &mut |p: &[u8]| out.push(p.to_vec()));
    out
}

/// `true` when sorted list of `a` precedes that of `b` (equal popcounts).
fn lex_less(a: u64, b: u64) -> bool {
    let diff = a ^ b;
    diff != 0 && a & (diff & diff.wrapping_neg()) != 0
}

/// Bit-level action of every vertex permutation on the 3-sets of `n` vertices.
pub struct TriangleCanon {
    triples: Vec<Triangle>,
    /// `images[p][i]` is the rank of the image of triple `i` under permutation `p`.
    images: Vec<Vec<u8>>,
}

impl TriangleCanon {
    pub fn new(n: usize) -> Self {
        assert!(
            n <= MAX_CANON_VERTICES,
            "canonical forms need n ≤ {MAX_CANON_VERTICES}"
        );
        let triples = triples(n);
        let rank = |t: &Triangle| triples.iter().position(|x| x == t).unwrap() as u8;
        let images = permutations(n)
            .iter()
            .map(|p| {
                triples
                    .iter()
                    .map(|t| {
                        let mut img = [p[t[0] as usize], p[t[1] as usize], p[t[2] as usize]];
                        img.sort_unstable();
                        rank(&img)
                    })
                    .collect()
            })
            .collect();
        TriangleCanon { triples, images }
    }

    pub fn encode(&self, tris: &[Triangle]) -> u64 {
        tris.iter().fold(0, |m, t| {
            let mut t = *t;
            t.sort_unstable();
            let i = self
                .triples
                .iter()
                .position(|x| *x == t)
                .expect("vertex out of range");
            m | 1 << i
        })
    }

    pub fn decode(&self, mask: u64) -> Vec<Triangle> {
        (0..self.triples.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| self.triples[i])
            .collect()
    }

    pub fn canonical(&self, mask: u64) -> u64 {
        let mut best = mask;
        for img in &self.images {
            let mut m = 0u64;
            let mut rest = mask;
            while rest != 0 {
                let i = rest.trailing_zeros() as usize;
                m |= 1 << img[i];
                rest &= rest - 1;
            }
            if lex_less(m, best) {
                best = m;
            }
        }
        best
    }
}

/// Least sorted facet list over all relabelings of the `n` vertices.
pub fn canonical_triangles(n: usize, tris: &[Triangle]) -> Vec<Triangle> {
    let canon = TriangleCanon::new(n);
    canon.decode(canon.canonical(canon.encode(tris)))
}

/// Builds a complex over the numeric labels `0..n`.
pub fn complex_from_triangles(tris: &[Triangle]) -> Complex {
    let n = tris
        .iter()
        .flatten()
        .map(|&v| v as usize + 1)
        .max()
        .unwrap_or(0);
    let faces = tris
        .iter()
        .map(|t| Face::new(t.iter().map(|&v| v as VertexId)).expect("distinct vertices"));
    Complex::from_faces(faces, Labels::numeric(n)).expect("nonempty triangle list")
}

/// Every pure connected 2-complex with at most `max_vertices` vertices and
/// at most `max_triangles` triangles, once per isomorphism class, as
/// canonical triangle lists over the vertices `0..k`. Ordered by triangle
/// count, then by canonical list.
pub fn connected_complexes(max_vertices: usize, max_triangles: usize) -> Vec<Vec<Triangle>> {
    if max_vertices < 3 || max_triangles == 0 {
        return Vec::new();
    }
    let canons: Vec<TriangleCanon> = (0..=max_vertices).map(TriangleCanon::new).collect();
    let mut out = Vec::new();
    let mut level: BTreeSet<Vec<Triangle>> = BTreeSet::from([vec![[0, 1, 2]]]);
    for t in 1..=max_triangles {
        out.extend(level.iter().cloned());
        if t == max_triangles {
            break;
        }
        let mut next = BTreeSet::new();
        for tris in &level {
            let k = tris
                .iter()
                .flatten()
                .map(|&v| v as usize + 1)
                .max()
                .unwrap();
            let limit = max_vertices.min(k + 2);
            for cand in triples(limit) {
                // a new facet must touch the existing vertices
                if cand[0] as usize >= k || tris.contains(&cand) {
                    continue;
                }
                // new vertices must be k, k+1 in order so the ids stay compact
                let fresh: Vec<u8> = cand.iter().copied().filter(|&v| v as usize >= k).collect();
                if fresh.iter().enumerate().any(|(i, &v)| v as usize != k + i) {
                    continue;
                }
                let m = k + fresh.len();
                let mut grown = tris.clone();
                grown.push(cand);
                let canon = &canons[m];
                next.insert(canon.decode(canon.canonical(canon.encode(&grown))));
            }
        }
        if next.is_empty() {
            break;
        }
        level = next;
    }
    out
}

fn mask_connected(n: usize, pairs: &[[u8; 2]], mask: u32) -> bool {
    let mut reached = 1u32;
    loop {
        let before = reached;
        for (i, p) in pairs.iter().enumerate() {
            if mask >> i & 1 == 1 && (reached >> p[0] & 1 == 1 || reached >> p[1] & 1 == 1) {
                reached |= 1 << p[0] | 1 << p[1];
            }
        }
        if reached == before {
            return reached.count_ones() as usize == n;
        }
    }
}

/// Every connected simple graph on `1..=max_vertices` vertices, once per
/// isomorphism class, as `(n, edges)` over the vertices `0..n`.
pub fn connected_graphs(max_vertices: usize) -> Vec<(usize, Vec<[u8; 2]>)> {
    assert!(max_vertices <= MAX_CANON_VERTICES);
    let mut out = Vec::new();
    for n in 1..=max_vertices {
        let pairs = pairs(n);
        let rank = |p: [u8; 2]| pairs.iter().position(|x| *x == p).unwrap() as u8;
        let images: Vec<Vec<u8>> = permutations(n)
            .iter()
            .map(|perm| {
                pairs
                    .iter()
                    .map(|e| {
                        let (a, b) = (perm[e[0] as usize], perm[e[1] as usize]);
                        rank([a.min(b), a.max(b)])
                    })
                    .collect()
            })
            .collect();
        let mut seen = BTreeSet::new();
        for mask in 0u32..1 << pairs.len() {
            if !mask_connected(n, &pairs, mask) {
                continue;
            }
            let canon = images
                .iter()
                .map(|img| {
                    (0..pairs.len())
                        .filter(|&i| mask >> i & 1 == 1)
                        .fold(0u32, |m, i| m | 1 << img[i])
                })
                .min()
                .unwrap();
            if seen.insert(canon) {
                out.push((
                    n,
                    (0..pairs.len())
                        .filter(|&i| canon >> i & 1 == 1)
                        .map(|i| pairs[i])
                        .collect(),
                ));
            }
        }
    }
    out
}

/// Builds a graph over the numeric labels `0..n`.
pub fn graph_from_edges(n: usize, edges: &[[u8; 2]]) -> Graph {
    Graph::new(
        0..n as VertexId,
        edges
            .iter()
            .map(|e| Edge::new(e[0] as VertexId, e[1] as VertexId).expect("no loops")),
        Labels::numeric(n),
    )
    .expect("edges within range")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn isomorphic_lists_share_a_form() {
        let a = canonical_triangles(5, &[[2, 3, 4], [0, 1, 2]]);
        let b = canonical_triangles(5, &[[0, 1, 2], [0, 3, 4]]);
        assert_eq!(a, b);
        assert_eq!(a, vec![[0, 1, 2], [0, 3, 4]]);
        assert_ne!(a, canonical_triangles(5, &[[0, 1, 2], [1, 2, 3]]));
    }

    #[test]
    fn two_triangle_classes() {
        let all = connected_complexes(4, 2);
        let pairs: Vec<_> = all.iter().filter(|t| t.len() == 2).collect();
        // sharing an edge; the bowtie needs a fifth vertex
        assert_eq!(pairs, vec![&vec![[0, 1, 2], [0, 1, 3]]]);
        let all = connected_complexes(5, 2);
        assert_eq!(all.iter().filter(|t| t.len() == 2).count(), 2);
        assert!(all.contains(&vec![[0, 1, 2], [0, 3, 4]]));
    }

    #[test]
    fn classes_on_four_vertices() {
        // 1..4 triangles of the tetrahedron boundary, one class each
        assert_eq!(connected_complexes(4, 4).len(), 4);
    }

    #[test]
    fn connected_graph_counts() {
        let counts: Vec<usize> = (1..=6)
            .map(|n| connected_graphs(6).iter().filter(|g| g.0 == n).count())
            .collect();
        assert_eq!(counts, vec![1, 1, 2, 6, 21, 112]);
    }

    #[test]
    fn numeric_complex() {
        let k = complex_from_triangles(&[[0, 1, 2], [0, 1, 3]]);
        assert_eq!(k.f_vector().counts(), &[1, 4, 5, 2]);
    }
}
