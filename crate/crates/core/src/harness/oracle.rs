//! Brute-force reference deciders for tests.
//!
//! These share no code with the search modules: faces are plain sorted
//! vectors, and every check is the textbook definition run over all
//! candidates.

use std::collections::{BTreeSet, HashSet};

use thiserror::Error;

use crate::complex::{Complex, VertexId};
use crate::wsat::Graph;

pub const SHELLING_MAX_FACETS: usize = 8;
/// Counts nonempty faces.
pub const COLLAPSE_MAX_FACES: usize = 24;
pub const WSAT_MAX_VERTICES: usize = 7;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{what} is {size}, over the oracle bound {bound}")]
pub struct OracleRefused {
    pub what: &'static str,
    pub size: usize,
    pub bound: usize,
}

fn refuse_over(what: &'static str, size: usize, bound: usize) -> Result<(), OracleRefused> {
    if size > bound {
        Err(OracleRefused { what, size, bound })
    } else {
        Ok(())
    }
}

type Set = Vec<VertexId>;

fn all_subsets(s: &Set) -> Vec<Set> {
    (0..1u32 << s.len())
        .map(|m| {
            (0..s.len())
                .filter(|i| m >> i & 1 == 1)
                .map(|i| s[i])
                .collect()
        })
        .collect()
}

fn is_subset(a: &Set, b: &Set) -> bool {
    a.iter().all(|v| b.contains(v))
}

fn facet_sets(k: &Complex) -> Vec<Set> {
    k.facets().iter().map(|f| f.vertices().to_vec()).collect()
}

/// `true` when some ordering of the facets is a shelling: each facet meets
/// the union of the earlier ones in a pure complex of dimension one less.
pub fn oracle_shelling(k: &Complex) -> Result<bool, OracleRefused> {
    let facets = facet_sets(k);
    refuse_over("facet count", facets.len(), SHELLING_MAX_FACETS)?;
    let size = facets[0].len();
    if facets.iter().any(|f| f.len() != size) {
        return Ok(false);
    }
    let mut order: Vec<usize> = (0..facets.len()).collect();
    let mut found = false;
    crate::complex::for_each_permutation(&mut order, &mut |p: &[usize]| {
        if !found && is_shelling(&facets, p) {
            found = true;
        }
    });
    Ok(found)
}

fn is_shelling(facets: &[Set], order: &[usize]) -> bool {
    for i in 1..order.len() {
        let f = &facets[order[i]];
        // faces of f lying in an earlier facet
        let shared: Vec<Set> = all_subsets(f)
            .into_iter()
            .filter(|s| !s.is_empty() && order[..i].iter().any(|&j| is_subset(s, &facets[j])))
            .collect();
        let maximal: Vec<&Set> = shared
            .iter()
            .filter(|s| !shared.iter().any(|t| t.len() > s.len() && is_subset(s, t)))
            .collect();
        if maximal.is_empty() || maximal.iter().any(|s| s.len() != f.len() - 1) {
            return false;
        }
    }
    true
}

/// `true` when a sequence of collapses reaches a single vertex. A move picks
/// a face τ lying in exactly one facet σ ≠ τ and deletes every face between
/// τ and σ.
pub fn oracle_collapsible(k: &Complex) -> Result<bool, OracleRefused> {
    let faces: BTreeSet<Set> = k
        .faces()
        .iter()
        .filter(|f| !f.is_empty())
        .map(|f| f.vertices().to_vec())
        .collect();
    refuse_over("face count", faces.len(), COLLAPSE_MAX_FACES)?;
    let mut seen = HashSet::new();
    Ok(collapses_to_point(faces, &mut seen))
}

fn collapses_to_point(faces: BTreeSet<Set>, seen: &mut HashSet<BTreeSet<Set>>) -> bool {
    if faces.len() == 1 {
        return true;
    }
    if !seen.insert(faces.clone()) {
        return false;
    }
    let facets: Vec<&Set> = faces
        .iter()
        .filter(|f| !faces.iter().any(|g| g.len() > f.len() && is_subset(f, g)))
        .collect();
    for tau in &faces {
        let containing: Vec<&&Set> = facets.iter().filter(|s| is_subset(tau, s)).collect();
        if containing.len() != 1 || *containing[0] == tau {
            continue;
        }
        let sigma = containing[0];
        let rest: BTreeSet<Set> = faces
            .iter()
            .filter(|g| !(is_subset(tau, g) && is_subset(g, sigma)))
            .cloned()
            .collect();
        if collapses_to_point(rest, seen) {
            return true;
        }
    }
    false
}

/// Least size of a spanning subgraph of `f` whose K₃-closure in `f` is all
/// of `f`, by trying every edge subset.
pub fn oracle_wsat(f: &Graph) -> Result<usize, OracleRefused> {
    refuse_over("vertex count", f.num_vertices(), WSAT_MAX_VERTICES)?;
    let edges: Vec<(VertexId, VertexId)> = f.edges().iter().map(|e| (e.u(), e.v())).collect();
    let m = edges.len();
    let adjacent = |present: &[bool], a: VertexId, b: VertexId| {
        edges
            .iter()
            .zip(present)
            .any(|(&(x, y), &p)| p && ((x, y) == (a, b) || (x, y) == (b, a)))
    };
    let mut best = m;
    for mask in 0u32..1 << m {
        let size = mask.count_ones() as usize;
        if size >= best {
            continue;
        }
        let mut present: Vec<bool> = (0..m).map(|i| mask >> i & 1 == 1).collect();
        let mut changed = true;
        while changed {
            changed = false;
            for i in 0..m {
                if present[i] {
                    continue;
                }
                let (a, b) = edges[i];
                let closes = f
                    .vertices()
                    .iter()
                    .any(|&w| adjacent(&present, a, w) && adjacent(&present, b, w));
                if closes {
                    present[i] = true;
                    changed = true;
                }
            }
        }
        if present.iter().all(|&p| p) {
            best = size;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::canon::graph_from_edges;

    fn cx(lines: &[&str]) -> Complex {
        Complex::from_facets(lines.iter().map(|l| l.split_whitespace())).unwrap()
    }

    #[test]
    fn bowtie_is_unshellable() {
        assert_eq!(oracle_shelling(&cx(&["a b c", "c d e"])), Ok(false));
        assert_eq!(oracle_shelling(&cx(&["a b c", "b c d"])), Ok(true));
    }

    #[test]
    fn wsat_of_k4_is_three() {
        let k4 = graph_from_edges(4, &[[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]]);
        assert_eq!(oracle_wsat(&k4), Ok(3));
        let c4 = graph_from_edges(4, &[[0, 1], [1, 2], [2, 3], [0, 3]]);
        assert_eq!(oracle_wsat(&c4), Ok(4));
    }

    #[test]
    fn cycle_is_not_collapsible() {
        assert_eq!(oracle_collapsible(&cx(&["a b", "b c", "a c"])), Ok(false));
        assert_eq!(oracle_collapsible(&cx(&["a b c"])), Ok(true));
        // the general move removes a vertex of a triangle together with its star
        assert_eq!(oracle_collapsible(&cx(&["a b c", "c d"])), Ok(true));
    }

    #[test]
    fn refuses_large_inputs() {
        let big = cx(&[
            "a b c", "a b d", "a c d", "b c d", "a b e", "a c e", "b c e", "c d e", "b d e",
        ]);
        assert_eq!(
            oracle_shelling(&big),
            Err(OracleRefused {
                what: "facet count",
                size: 9,
                bound: SHELLING_MAX_FACETS
            })
        );
        // every triangle on five vertices: 5 + 10 + 10 faces
        let full = cx(&[
            "a b c", "a b d", "a b e", "a c d", "a c e", "a d e", "b c d", "b c e", "b d e",
            "c d e",
        ]);
        assert_eq!(oracle_collapsible(&full).unwrap_err().size, 25);
        let k8 = graph_from_edges(8, &[[0, 1]]);
        assert!(oracle_wsat(&k8).is_err());
    }
}
