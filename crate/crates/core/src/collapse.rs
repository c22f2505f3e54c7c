//! Elementary collapses and collapsibility search.
//!
//! A nonempty face is free when exactly one other face of the complex
//! contains it; that coface is then a facet one dimension higher. An
//! elementary collapse removes the free face together with its coface.

use std::collections::HashSet;
use std::fmt;

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::complex::{Complex, ComplexError, Face};
use crate::search::{Budget, Exhausted, Outcome, Verdict};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CollapseStep {
    pub free_face: Face,
    pub facet: Face,
}

impl CollapseStep {
    pub fn new(free_face: Face, facet: Face) -> Self {
        CollapseStep { free_face, facet }
    }
}

/// Triangles deleted up front, then a collapse sequence ending at `target`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CollapseCertificate {
    pub removed_triangles: Vec<Face>,
    pub steps: Vec<CollapseStep>,
    pub target: Complex,
}

impl CollapseCertificate {
    pub fn targets_point(&self) -> bool {
        self.target.num_vertices() == 1 && self.target.dimension() == 0
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CollapseError {
    #[error("`{free_face} -> {facet}` is not an elementary collapse: {reason}")]
    NotFree {
        free_face: String,
        facet: String,
        reason: NotFreeReason,
    },
    #[error("the complex is not pure 2-dimensional")]
    NotPure2,
    #[error("the complex is not connected")]
    Disconnected,
    #[error("malformed certificate: {0}")]
    Malformed(String),
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

/// Why a proposed step is not a legal elementary collapse.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NotFreeReason {
    MissingFace(String),
    NotProperSubface,
    /// The free face also lies in this other face.
    AlsoIn(String),
}

impl fmt::Display for NotFreeReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NotFreeReason::MissingFace(s) => write!(f, "`{s}` is not a face"),
            NotFreeReason::NotProperSubface => write!(f, "free face is not a proper subface"),
            NotFreeReason::AlsoIn(s) => write!(f, "free face is also contained in `{s}`"),
        }
    }
}

/// Mutable view of a subcomplex of a fixed complex, as a bitset over its faces.
pub(crate) struct CollapseState<'a> {
    k: &'a Complex,
    present: FixedBitSet,
    /// Proper cofaces of each face.
    cofaces: Vec<Vec<usize>>,
    alive_vertices: usize,
}

impl<'a> CollapseState<'a> {
    pub(crate) fn new(k: &'a Complex) -> Self {
        let faces = k.faces();
        let mut cofaces = vec![Vec::new(); faces.len()];
        for (i, f) in faces.iter().enumerate() {
            for sub in f.subfaces() {
                if sub.len() < f.len() && !sub.is_empty() {
                    cofaces[k.face_index(&sub).unwrap()].push(i);
                }
            }
        }
        let mut present = FixedBitSet::with_capacity(faces.len());
        present.insert_range(..);
        CollapseState {
            k,
            present,
            cofaces,
            alive_vertices: k.num_vertices(),
        }
    }

    /// Removes a face without cofaces (used for deleting triangles).
    pub(crate) fn delete_maximal(&mut self, idx: usize) {
        debug_assert!(self.cofaces[idx].iter().all(|&c| !self.present[c]));
        self.present.set(idx, false);
        if self.k.faces()[idx].len() == 1 {
            self.alive_vertices -= 1;
        }
    }

    /// The unique present proper coface, if there is exactly one.
    fn partner(&self, idx: usize) -> Option<usize> {
        let mut present = self.cofaces[idx].iter().filter(|&&c| self.present[c]);
        match (present.next(), present.next()) {
            (Some(&c), None) => Some(c),
            _ => None,
        }
    }

    pub(crate) fn check_step(&self, step: &CollapseStep) -> Result<(usize, usize), NotFreeReason> {
        let k = self.k;
        let tau = k
            .face_index(&step.free_face)
            .filter(|&i| self.present[i])
            .ok_or_else(|| NotFreeReason::MissingFace(k.render(&step.free_face)))?;
        let sigma = k
            .face_index(&step.facet)
            .filter(|&i| self.present[i])
            .ok_or_else(|| NotFreeReason::MissingFace(k.render(&step.facet)))?;
        if step.free_face.is_empty()
            || step.free_face.len() >= step.facet.len()
            || !step.free_face.is_subset(&step.facet)
        {
            return Err(NotFreeReason::NotProperSubface);
        }
        let mut found = None;
        for &c in &self.cofaces[tau] {
            if self.present[c] && c != sigma {
                return Err(NotFreeReason::AlsoIn(k.render(&k.faces()[c])));
            }
            if c == sigma {
                found = Some(c);
            }
        }
        found
            .map(|s| (tau, s))
            .ok_or(NotFreeReason::NotProperSubface)
    }

    pub(crate) fn apply(&mut self, tau: usize, sigma: usize) {
        self.present.set(tau, false);
        self.present.set(sigma, false);
        if self.k.faces()[tau].len() == 1 {
            self.alive_vertices -= 1;
        }
    }

    fn undo(&mut self, tau: usize, sigma: usize) {
        self.present.insert(tau);
        self.present.insert(sigma);
        if self.k.faces()[tau].len() == 1 {
            self.alive_vertices += 1;
        }
    }

    /// Legal steps with free faces of the highest available dimension,
    /// lexicographic within that dimension.
    fn top_steps(&self) -> Vec<(usize, usize)> {
        let faces = self.k.faces();
        let mut best_len = 0;
        let mut steps = Vec::new();
        // faces are sorted by size, so walk downward and stop below the best size found
        for idx in (1..faces.len()).rev() {
            let len = faces[idx].len();
            if len < best_len {
                break;
            }
            if !self.present[idx] {
                continue;
            }
            if let Some(sigma) = self.partner(idx) {
                best_len = len;
                steps.push((idx, sigma));
            }
        }
        steps.reverse();
        steps
    }

    fn all_steps(&self) -> Vec<(usize, usize)> {
        (1..self.k.faces().len())
            .filter(|&i| self.present[i])
            .filter_map(|i| self.partner(i).map(|s| (i, s)))
            .collect()
    }

    pub(crate) fn is_point(&self) -> bool {
        self.alive_vertices == 1 && self.present.count_ones(..) == 2
    }

    pub(crate) fn to_complex(&self) -> Complex {
        let set = self
            .present
            .ones()
            .map(|i| self.k.faces()[i].clone())
            .collect();
        Complex::from_closed(set, self.k.labels().clone()).expect("collapses keep a vertex")
    }

    fn step(&self, tau: usize, sigma: usize) -> CollapseStep {
        CollapseStep::new(self.k.faces()[tau].clone(), self.k.faces()[sigma].clone())
    }

    fn dimension(&self) -> isize {
        self.present
            .ones()
            .next_back()
            .map_or(-1, |i| self.k.faces()[i].dim())
    }
}

/// Performs one elementary collapse.
pub fn apply_collapse(k: &Complex, step: &CollapseStep) -> Result<Complex, CollapseError> {
    let mut state = CollapseState::new(k);
    let (tau, sigma) = state
        .check_step(step)
        .map_err(|reason| CollapseError::NotFree {
            free_face: k.render(&step.free_face),
            facet: k.render(&step.facet),
            reason,
        })?;
    state.apply(tau, sigma);
    Ok(state.to_complex())
}

/// Every legal elementary collapse of `k`, ordered by free face then facet.
pub fn free_faces(k: &Complex) -> Vec<CollapseStep> {
    let state = CollapseState::new(k);
    state
        .all_steps()
        .into_iter()
        .map(|(t, s)| state.step(t, s))
        .collect()
}

/// Decides whether `k` collapses to a single vertex.
///
/// Depth-first over collapse sequences, always taking free faces of the
/// highest available dimension first (any collapse sequence can be
/// reordered that way). Subcomplexes known not to collapse are memoized.
/// In dimension at most two the outcome does not depend on the choices
/// made, so the first maximal sequence decides.
pub fn is_collapsible(k: &Complex, budget: &mut Budget) -> Outcome<CollapseCertificate> {
    if !k.is_connected() {
        return Outcome::Refuted;
    }
    let mut state = CollapseState::new(k);
    search_collapse(&mut state, budget).map(|steps| CollapseCertificate {
        removed_triangles: Vec::new(),
        steps,
        target: state.to_complex(),
    })
}

fn search_collapse(
    state: &mut CollapseState<'_>,
    budget: &mut Budget,
) -> Outcome<Vec<CollapseStep>> {
    let confluent = state.dimension() <= 2;
    let mut steps = Vec::new();
    let mut dead = HashSet::new();
    match collapse_dfs(state, &mut steps, &mut dead, confluent, budget) {
        Ok(true) => Outcome::Found(steps.iter().map(|&(t, s)| state.step(t, s)).collect()),
        Ok(false) => Outcome::Refuted,
        Err(Exhausted) => Outcome::BudgetExceeded,
    }
}

fn collapse_dfs(
    state: &mut CollapseState<'_>,
    steps: &mut Vec<(usize, usize)>,
    dead: &mut HashSet<FixedBitSet>,
    confluent: bool,
    budget: &mut Budget,
) -> Result<bool, Exhausted> {
    budget.spend()?;
    if state.is_point() {
        return Ok(true);
    }
    if dead.contains(&state.present) {
        return Ok(false);
    }
    for (tau, sigma) in state.top_steps() {
        state.apply(tau, sigma);
        steps.push((tau, sigma));
        if collapse_dfs(state, steps, dead, confluent, budget)? {
            return Ok(true);
        }
        steps.pop();
        state.undo(tau, sigma);
        if confluent {
            break;
        }
    }
    dead.insert(state.present.clone());
    Ok(false)
}

/// Decides whether deleting some `count` triangles leaves a collapsible complex.
///
/// Deleting `count` triangles lowers the reduced Euler characteristic by
/// `count`, and a collapsible complex has reduced Euler characteristic zero,
/// so only `count == χ̃(k)` can succeed. Triangle subsets of that size are
/// then tried in lexicographic order.
pub fn collapsible_after_removing(
    k: &Complex,
    count: usize,
    budget: &mut Budget,
) -> Result<Outcome<CollapseCertificate>, CollapseError> {
    if k.dimension() != 2 || !k.is_pure() {
        return Err(CollapseError::NotPure2);
    }
    if !k.is_connected() {
        return Err(CollapseError::Disconnected);
    }
    if k.reduced_euler_characteristic() != count as i64 {
        return Ok(Outcome::Refuted);
    }
    let triangles: Vec<usize> = k.triangles().map(|t| k.face_index(t).unwrap()).collect();
    if count > triangles.len() {
        return Ok(Outcome::Refuted);
    }
    let mut chosen: Vec<usize> = (0..count).collect();
    loop {
        if budget.spend().is_err() {
            return Ok(Outcome::BudgetExceeded);
        }
        let mut state = CollapseState::new(k);
        for &c in &chosen {
            state.delete_maximal(triangles[c]);
        }
        match search_collapse(&mut state, budget) {
            Outcome::Found(steps) => {
                return Ok(Outcome::Found(CollapseCertificate {
                    removed_triangles: chosen
                        .iter()
                        .map(|&c| k.faces()[triangles[c]].clone())
                        .collect(),
                    steps,
                    target: state.to_complex(),
                }))
            }
            Outcome::BudgetExceeded => return Ok(Outcome::BudgetExceeded),
            Outcome::Refuted => {}
        }
        if !next_combination(&mut chosen, triangles.len()) {
            return Ok(Outcome::Refuted);
        }
    }
}

/// Advances `c` to the next `c.len()`-subset of `0..n` in lexicographic order.
pub(crate) fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Replays a collapse certificate against `k`.
///
/// Structural problems with the removed triangles are errors; an illegal
/// step is a rejection at its 1-based position, and a final complex that
/// differs from the target is a rejection at `steps.len() + 1`.
pub fn verify_collapse(k: &Complex, cert: &CollapseCertificate) -> Result<Verdict, CollapseError> {
    let mut state = CollapseState::new(k);
    let mut seen = HashSet::new();
    for t in &cert.removed_triangles {
        if t.len() != 3 || !k.is_facet(t) {
            return Err(CollapseError::Malformed(format!(
                "removed face `{}` is not a triangle facet",
                k.render(t)
            )));
        }
        if !seen.insert(t) {
            return Err(CollapseError::Malformed(format!(
                "triangle `{}` removed twice",
                k.render(t)
            )));
        }
        state.delete_maximal(k.face_index(t).unwrap());
    }
    for (i, step) in cert.steps.iter().enumerate() {
        match state.check_step(step) {
            Ok((tau, sigma)) => state.apply(tau, sigma),
            Err(reason) => {
                return Ok(Verdict::reject(
                    i + 1,
                    format!(
                        "`{} -> {}`: {reason}",
                        k.render(&step.free_face),
                        k.render(&step.facet)
                    ),
                ))
            }
        }
    }
    if state.to_complex() != cert.target {
        return Ok(Verdict::reject(
            cert.steps.len() + 1,
            "final complex differs from the target",
        ));
    }
    Ok(Verdict::Accepted)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cx(lines: &[&str]) -> Complex {
        Complex::from_facets(lines.iter().map(|l| l.split_whitespace())).unwrap()
    }

    fn f(k: &Complex, s: &str) -> Face {
        k.labels()
            .face(&s.split_whitespace().collect::<Vec<_>>())
            .unwrap()
    }

    fn step(k: &Complex, free: &str, facet: &str) -> CollapseStep {
        CollapseStep::new(f(k, free), f(k, facet))
    }

    fn facets_of(k: &Complex) -> Vec<String> {
        k.facets().iter().map(|x| k.render(x)).collect()
    }

    #[test]
    fn collapse_edge_of_triangle() {
        let k = cx(&["a b c"]);
        let out = apply_collapse(&k, &step(&k, "b c", "a b c")).unwrap();
        assert_eq!(facets_of(&out), ["a b", "a c"]);
    }

    #[test]
    fn collapse_leaf_of_path() {
        let k = cx(&["a b", "b c"]);
        let out = apply_collapse(&k, &step(&k, "c", "b c")).unwrap();
        assert_eq!(facets_of(&out), ["a b"]);
        assert_eq!(out.num_vertices(), 2);
    }

    #[test]
    fn shared_edge_is_not_free() {
        let k = cx(&["a b c", "b c d"]);
        let err = apply_collapse(&k, &step(&k, "b c", "a b c")).unwrap_err();
        assert_eq!(
            err,
            CollapseError::NotFree {
                free_face: "b c".into(),
                facet: "a b c".into(),
                reason: NotFreeReason::AlsoIn("b c d".into()),
            }
        );
    }

    #[test]
    fn vertex_of_triangle_is_not_free() {
        let k = cx(&["a b c"]);
        assert!(apply_collapse(&k, &step(&k, "a", "a b c")).is_err());
    }

    #[test]
    fn free_faces_of_small_complexes() {
        let k = cx(&["a b c"]);
        let got: Vec<String> = free_faces(&k)
            .iter()
            .map(|s| k.render(&s.free_face))
            .collect();
        assert_eq!(got, ["a b", "a c", "b c"]);

        assert!(free_faces(&cx(&["a b", "b c", "a c"])).is_empty());

        let e = cx(&["a b"]);
        assert_eq!(
            free_faces(&e),
            vec![step(&e, "a", "a b"), step(&e, "b", "a b")]
        );
    }

    #[test]
    fn collapsibility_examples() {
        let tree = cx(&["a b", "b c", "b d", "d e"]);
        let cert = is_collapsible(&tree, &mut Budget::default())
            .found()
            .unwrap();
        assert!(cert.targets_point());
        assert!(verify_collapse(&tree, &cert).unwrap().is_accepted());

        assert_eq!(
            is_collapsible(&cx(&["a b", "b c", "a c"]), &mut Budget::default()),
            Outcome::Refuted
        );

        let tri = cx(&["a b c"]);
        let cert = is_collapsible(&tri, &mut Budget::default())
            .found()
            .unwrap();
        assert!(verify_collapse(&tri, &cert).unwrap().is_accepted());

        let tet = cx(&["a b c d"]);
        let cert = is_collapsible(&tet, &mut Budget::default())
            .found()
            .unwrap();
        assert!(verify_collapse(&tet, &cert).unwrap().is_accepted());

        let hollow = cx(&["a b c", "a b d", "a c d", "b c d"]);
        assert_eq!(
            is_collapsible(&hollow, &mut Budget::default()),
            Outcome::Refuted
        );
    }

    #[test]
    fn removal_gate_uses_euler_characteristic() {
        let tri = cx(&["a b c"]);
        let cert = collapsible_after_removing(&tri, 0, &mut Budget::default())
            .unwrap()
            .found()
            .unwrap();
        assert!(cert.removed_triangles.is_empty());
        assert_eq!(
            collapsible_after_removing(&tri, 1, &mut Budget::default()),
            Ok(Outcome::Refuted)
        );

        let pair = cx(&["a b c", "b c d"]);
        let cert = collapsible_after_removing(&pair, 0, &mut Budget::default())
            .unwrap()
            .found()
            .unwrap();
        assert!(verify_collapse(&pair, &cert).unwrap().is_accepted());

        let hollow = cx(&["a b c", "a b d", "a c d", "b c d"]);
        let cert = collapsible_after_removing(&hollow, 1, &mut Budget::default())
            .unwrap()
            .found()
            .unwrap();
        assert_eq!(cert.removed_triangles, vec![f(&hollow, "a b c")]);
        assert!(verify_collapse(&hollow, &cert).unwrap().is_accepted());
    }

    #[test]
    fn removal_preconditions() {
        assert_eq!(
            collapsible_after_removing(&cx(&["a b c", "c d"]), 0, &mut Budget::default()),
            Err(CollapseError::NotPure2)
        );
        assert_eq!(
            collapsible_after_removing(&cx(&["a b c", "d e f"]), 1, &mut Budget::default()),
            Err(CollapseError::Disconnected)
        );
    }

    #[test]
    fn hand_written_certificates() {
        let k = cx(&["a b c"]);
        let cert = CollapseCertificate {
            removed_triangles: vec![],
            steps: vec![
                step(&k, "b c", "a b c"),
                step(&k, "c", "a c"),
                step(&k, "b", "a b"),
            ],
            target: k.induced(&[f(&k, "a")]).unwrap(),
        };
        assert_eq!(verify_collapse(&k, &cert), Ok(Verdict::Accepted));

        // the same steps replayed on the bowtie: bc is free in abc there, but c
        // still lies in the second triangle
        let bowtie = cx(&["a b c", "c d e"]);
        assert!(matches!(
            verify_collapse(&bowtie, &cert),
            Ok(Verdict::Rejected { index: 2, .. })
        ));
        let foreign = CollapseCertificate {
            steps: vec![step(&bowtie, "c d", "a b c")],
            ..cert.clone()
        };
        assert!(matches!(
            verify_collapse(&bowtie, &foreign),
            Ok(Verdict::Rejected { index: 1, .. })
        ));

        let identity = CollapseCertificate {
            removed_triangles: vec![],
            steps: vec![],
            target: bowtie.clone(),
        };
        assert_eq!(verify_collapse(&bowtie, &identity), Ok(Verdict::Accepted));
    }

    #[test]
    fn wrong_target_is_rejected_after_last_step() {
        let k = cx(&["a b"]);
        let cert = CollapseCertificate {
            removed_triangles: vec![],
            steps: vec![step(&k, "b", "a b")],
            target: k.clone(),
        };
        assert!(matches!(
            verify_collapse(&k, &cert),
            Ok(Verdict::Rejected { index: 2, .. })
        ));
    }

    #[test]
    fn collapses_preserve_euler_characteristic() {
        let k = cx(&["a b c", "b c d", "c d e"]);
        let chi = k.reduced_euler_characteristic();
        for s in free_faces(&k) {
            assert_eq!(
                apply_collapse(&k, &s)
                    .unwrap()
                    .reduced_euler_characteristic(),
                chi
            );
        }
    }

    #[test]
    fn combinations_in_lex_order() {
        let mut c = vec![0, 1];
        let mut all = vec![c.clone()];
        while next_combination(&mut c, 4) {
            all.push(c.clone());
        }
        assert_eq!(
            all,
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![0, 3],
                vec![1, 2],
                vec![1, 3],
                vec![2, 3]
            ]
        );
        let mut empty: Vec<usize> = vec![];
        assert!(!next_combination(&mut empty, 3));
    }
}
