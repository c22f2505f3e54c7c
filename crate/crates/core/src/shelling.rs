//! Shelling verification and search for pure complexes.
//!
//! A facet order is a shelling when every facet after the first meets the
//! union of its predecessors in a pure subcomplex of codimension one. The
//! condition at position `i` depends only on the first `i` facets, so the
//! search can prune a prefix as soon as it fails.

use std::collections::HashSet;

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::complex::{Complex, Face};
use crate::search::{Budget, Exhausted, Outcome, Verdict};

/// An ordering of all facets of a complex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShellingCertificate {
    pub order: Vec<Face>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ShellingError {
    #[error("the complex is not pure")]
    NotPure,
    #[error("certificate is not a permutation of the facets: {0}")]
    Malformed(String),
}

/// Checks `cert` against the shelling condition.
///
/// Returns [`Verdict::Rejected`] with the 1-based position of the first
/// facet whose intersection with its predecessors is not pure of
/// codimension one.
pub fn verify_shelling(k: &Complex, cert: &ShellingCertificate) -> Result<Verdict, ShellingError> {
    if !k.is_pure() {
        return Err(ShellingError::NotPure);
    }
    let mut seen = HashSet::new();
    for f in &cert.order {
        if !k.is_facet(f) {
            return Err(ShellingError::Malformed(format!(
                "`{}` is not a facet",
                k.render(f)
            )));
        }
        if !seen.insert(f) {
            return Err(ShellingError::Malformed(format!(
                "`{}` is listed twice",
                k.render(f)
            )));
        }
    }
    if seen.len() != k.facets().len() {
        return Err(ShellingError::Malformed(format!(
            "{} of {} facets listed",
            seen.len(),
            k.facets().len()
        )));
    }

    // facets all have d + 1 vertices, so codimension-one faces have d
    let ridge_len = k.dimension() as usize;
    for (i, theta) in cert.order.iter().enumerate().skip(1) {
        let meets: Vec<Face> = cert.order[..i]
            .iter()
            .map(|p| theta.intersection(p))
            .collect();
        let ridges: Vec<&Face> = meets.iter().filter(|m| m.len() == ridge_len).collect();
        if ridges.is_empty() {
            return Ok(Verdict::reject(
                i + 1,
                format!(
                    "`{}` shares no codimension-one face with its predecessors",
                    k.render(theta)
                ),
            ));
        }
        if let Some(stray) = meets
            .iter()
            .find(|m| m.len() < ridge_len && !ridges.iter().any(|r| m.is_subset(r)))
        {
            return Ok(Verdict::reject(
                i + 1,
                format!(
                    "`{}` meets its predecessors in `{}`, which lies in no shared ridge",
                    k.render(theta),
                    k.render(stray)
                ),
            ));
        }
    }
    Ok(Verdict::Accepted)
}

/// Searches for a shelling by depth-first extension of facet prefixes.
///
/// Candidates at each node are the facets whose intersection with the
/// placed union is pure of codimension one, tried in lexicographic order.
/// In dimensions one and two, a candidate all of whose vertices are already
/// placed stays valid no matter what is placed later, so it is placed
/// immediately without branching (least such facet first). Prefix sets
/// already known to be dead ends are memoized.
pub fn find_shelling(
    k: &Complex,
    budget: &mut Budget,
) -> Result<Outcome<ShellingCertificate>, ShellingError> {
    if !k.is_pure() {
        return Err(ShellingError::NotPure);
    }
    let facets = k.facets();
    if facets.len() == 1 {
        return Ok(Outcome::Found(ShellingCertificate {
            order: facets.to_vec(),
        }));
    }
    if !ridge_graph_connected(k) {
        return Ok(Outcome::Refuted);
    }
    let chi = k.reduced_euler_characteristic();
    if k.dimension() == 2 && chi < 0 {
        // each facet that closes up a sphere adds one to the Euler characteristic,
        // every other step adds zero
        return Ok(Outcome::Refuted);
    }

    let mut search = ShellingSearch::new(k, chi);
    for root in 0..facets.len() {
        search.place(root);
        let found = match search.extend(budget) {
            Ok(found) => found,
            Err(Exhausted) => return Ok(Outcome::BudgetExceeded),
        };
        if found {
            let order = search.order.iter().map(|&i| facets[i].clone()).collect();
            return Ok(Outcome::Found(ShellingCertificate { order }));
        }
        search.unplace(root);
    }
    Ok(Outcome::Refuted)
}

/// Facets adjacent when they share a codimension-one face.
fn ridge_graph_connected(k: &Complex) -> bool {
    let facets = k.facets();
    let ridge_len = k.dimension() as usize;
    let mut seen = vec![false; facets.len()];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(i) = stack.pop() {
        for j in 0..facets.len() {
            if !seen[j] && facets[i].intersection(&facets[j]).len() == ridge_len {
                seen[j] = true;
                stack.push(j);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

struct FacetInfo {
    /// Codimension-one faces: (face index, local vertex mask).
    ridges: Vec<(usize, u32)>,
    /// Proper faces of size below the ridge size, including the empty face.
    smaller: Vec<(usize, u32)>,
    vertices: Vec<usize>,
}

struct ShellingSearch {
    info: Vec<FacetInfo>,
    dim: isize,
    chi: i64,
    /// Number of placed facets containing each face of the complex.
    cover: Vec<u32>,
    placed: FixedBitSet,
    order: Vec<usize>,
    /// Placed facets that met their predecessors in their whole boundary.
    closing_steps: i64,
    dead: HashSet<FixedBitSet>,
}

impl ShellingSearch {
    fn new(k: &Complex, chi: i64) -> Self {
        let ridge_len = k.dimension() as usize;
        let info = k
            .facets()
            .iter()
            .map(|f| {
                let mut ridges = Vec::new();
                let mut smaller = Vec::new();
                let mut vertices = Vec::new();
                let n = f.len();
                for mask in 0u32..(1 << n) - 1 {
                    let sub = Face::from_sorted(
                        &(0..n)
                            .filter(|i| mask & (1 << i) != 0)
                            .map(|i| f.vertices()[i])
                            .collect::<Vec<_>>(),
                    );
                    let idx = k.face_index(&sub).expect("subface of a facet");
                    if sub.len() == 1 {
                        vertices.push(idx);
                    }
                    if sub.len() == ridge_len {
                        ridges.push((idx, mask));
                    } else {
                        smaller.push((idx, mask));
                    }
                }
                FacetInfo {
                    ridges,
                    smaller,
                    vertices,
                }
            })
            .collect();
        let n = k.facets().len();
        ShellingSearch {
            info,
            dim: k.dimension(),
            chi,
            cover: vec![0; k.faces().len()],
            placed: FixedBitSet::with_capacity(n),
            order: Vec::with_capacity(n),
            closing_steps: 0,
            dead: HashSet::new(),
        }
    }

    fn present(&self, face: usize) -> bool {
        self.cover[face] > 0
    }

    fn is_candidate(&self, f: usize) -> bool {
        let info = &self.info[f];
        if !info.ridges.iter().any(|&(idx, _)| self.present(idx)) {
            return false;
        }
        // every placed lower face must sit inside a placed ridge of this facet
        info.smaller.iter().all(|&(idx, mask)| {
            !self.present(idx)
                || info
                    .ridges
                    .iter()
                    .any(|&(r, rmask)| self.present(r) && mask & rmask == mask)
        })
    }

    fn is_forced(&self, f: usize) -> bool {
        match self.dim {
            1 => self.is_candidate(f),
            2 => self.info[f].vertices.iter().all(|&v| self.present(v)) && self.is_candidate(f),
            _ => false,
        }
    }

    fn closes_sphere(&self, f: usize) -> bool {
        self.info[f]
            .ridges
            .iter()
            .all(|&(idx, _)| self.present(idx))
    }

    fn touch(&mut self, f: usize, delta: i32) {
        let info = &self.info[f];
        for &(idx, _) in info.ridges.iter().chain(info.smaller.iter()) {
            self.cover[idx] = (self.cover[idx] as i32 + delta) as u32;
        }
    }

    fn place(&mut self, f: usize) {
        if self.dim == 2 && !self.order.is_empty() && self.closes_sphere(f) {
            self.closing_steps += 1;
        }
        self.touch(f, 1);
        self.placed.insert(f);
        self.order.push(f);
    }

    fn unplace(&mut self, f: usize) {
        debug_assert_eq!(self.order.last(), Some(&f));
        self.order.pop();
        self.placed.set(f, false);
        self.touch(f, -1);
        if self.dim == 2 && !self.order.is_empty() && self.closes_sphere(f) {
            self.closing_steps -= 1;
        }
    }

    fn undo_to(&mut self, len: usize) {
        while self.order.len() > len {
            let f = *self.order.last().unwrap();
            self.unplace(f);
        }
    }

    fn extend(&mut self, budget: &mut Budget) -> Result<bool, Exhausted> {
        budget.spend()?;
        let total = self.info.len();
        let start = self.order.len();

        while let Some(f) = (0..total).find(|&f| !self.placed.contains(f) && self.is_forced(f)) {
            self.place(f);
        }
        if self.order.len() == total {
            return Ok(true);
        }
        if self.closing_steps > self.chi || self.dead.contains(&self.placed) {
            self.undo_to(start);
            return Ok(false);
        }

        let key = self.placed.clone();
        for f in 0..total {
            if self.placed.contains(f) || !self.is_candidate(f) {
                continue;
            }
            self.place(f);
            if self.extend(budget)? {
                return Ok(true);
            }
            self.unplace(f);
        }
        self.dead.insert(key);
        self.undo_to(start);
        Ok(false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cx(lines: &[&str]) -> Complex {
        Complex::from_facets(lines.iter().map(|l| l.split_whitespace())).unwrap()
    }

    fn order(k: &Complex, lines: &[&str]) -> ShellingCertificate {
        ShellingCertificate {
            order: lines
                .iter()
                .map(|l| {
                    k.labels()
                        .face(&l.split_whitespace().collect::<Vec<_>>())
                        .unwrap()
                })
                .collect(),
        }
    }

    #[test]
    fn shared_edge_pair_is_a_shelling() {
        let k = cx(&["a b c", "b c d"]);
        assert_eq!(
            verify_shelling(&k, &order(&k, &["a b c", "b c d"])),
            Ok(Verdict::Accepted)
        );
    }

    #[test]
    fn bowtie_order_is_rejected_at_second_facet() {
        let k = cx(&["a b c", "c d e"]);
        match verify_shelling(&k, &order(&k, &["a b c", "c d e"])).unwrap() {
            Verdict::Rejected { index, .. } => assert_eq!(index, 2),
            v => panic!("unexpected {v:?}"),
        }
    }

    #[test]
    fn tetrahedron_boundary_orders() {
        let k = cx(&["a b c", "a b d", "a c d", "b c d"]);
        let cert = order(&k, &["a b c", "a b d", "a c d", "b c d"]);
        assert!(verify_shelling(&k, &cert).unwrap().is_accepted());
    }

    #[test]
    fn vertex_only_contact_is_rejected() {
        // third triangle touches the first two in edge bc and the stray vertex e
        let k = cx(&["a b c", "a d e", "b c e"]);
        let v = verify_shelling(&k, &order(&k, &["a b c", "a d e", "b c e"])).unwrap();
        assert!(matches!(v, Verdict::Rejected { index: 2, .. }));
        let v = verify_shelling(&k, &order(&k, &["a b c", "b c e", "a d e"])).unwrap();
        assert!(matches!(v, Verdict::Rejected { index: 3, .. }));
    }

    #[test]
    fn malformed_certificates() {
        let k = cx(&["a b c", "b c d"]);
        assert!(matches!(
            verify_shelling(&k, &order(&k, &["a b c"])),
            Err(ShellingError::Malformed(_))
        ));
        assert!(matches!(
            verify_shelling(&k, &order(&k, &["a b c", "a b c"])),
            Err(ShellingError::Malformed(_))
        ));
        assert!(matches!(
            verify_shelling(&k, &order(&k, &["a b c", "b c"])),
            Err(ShellingError::Malformed(_))
        ));
        let impure = cx(&["a b c", "c d"]);
        assert_eq!(
            verify_shelling(&impure, &order(&impure, &["a b c", "c d"])),
            Err(ShellingError::NotPure)
        );
    }

    #[test]
    fn finds_lexicographic_shelling() {
        let k = cx(&["a b c", "b c d"]);
        let found = find_shelling(&k, &mut Budget::default()).unwrap();
        assert_eq!(found, Outcome::Found(order(&k, &["a b c", "b c d"])));
    }

    #[test]
    fn bowtie_is_unshellable() {
        let k = cx(&["a b c", "c d e"]);
        assert_eq!(
            find_shelling(&k, &mut Budget::default()),
            Ok(Outcome::Refuted)
        );
    }

    #[test]
    fn tetrahedron_boundary_is_shellable() {
        let k = cx(&["a b c", "a b d", "a c d", "b c d"]);
        let cert = find_shelling(&k, &mut Budget::default())
            .unwrap()
            .found()
            .unwrap();
        assert!(verify_shelling(&k, &cert).unwrap().is_accepted());
    }

    #[test]
    fn graphs_and_solid_simplices() {
        let path = cx(&["a b", "b c", "c d"]);
        let cert = find_shelling(&path, &mut Budget::default())
            .unwrap()
            .found()
            .unwrap();
        assert!(verify_shelling(&path, &cert).unwrap().is_accepted());
        let two_edges = cx(&["a b", "c d"]);
        assert_eq!(
            find_shelling(&two_edges, &mut Budget::default()),
            Ok(Outcome::Refuted)
        );
        let bipyramid = cx(&["a b c d", "b c d e"]);
        let cert = find_shelling(&bipyramid, &mut Budget::default())
            .unwrap()
            .found()
            .unwrap();
        assert!(verify_shelling(&bipyramid, &cert).unwrap().is_accepted());
    }

    #[test]
    fn annulus_is_unshellable() {
        let k = cx(&["a b d", "b d e", "b c e", "c e f", "a c f", "a d f"]);
        assert_eq!(k.reduced_euler_characteristic(), -1);
        assert_eq!(
            find_shelling(&k, &mut Budget::default()),
            Ok(Outcome::Refuted)
        );
    }

    #[test]
    fn budget_is_honoured() {
        let k = cx(&["a b c", "b c d", "c d e", "d e f"]);
        assert_eq!(
            find_shelling(&k, &mut Budget::new(1)),
            Ok(Outcome::BudgetExceeded)
        );
    }

    #[test]
    fn non_pure_input_is_an_error() {
        let k = cx(&["a b c", "c d"]);
        assert_eq!(
            find_shelling(&k, &mut Budget::default()),
            Err(ShellingError::NotPure)
        );
    }
}
