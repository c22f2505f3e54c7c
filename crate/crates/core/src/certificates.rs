//! Certificate converters linking shellings, weak saturation and collapses
//! of pure 2-dimensional complexes, and the end-to-end chain that runs them.
//!
//! * A shelling of `L` yields a spanning tree of `L`'s 1-skeleton that is
//!   weakly K₃-saturated, with a saturating order that follows the shelling.
//! * On a flag complex, a saturating spanning tree yields a collapse of `L`
//!   (after deleting the triangles not used as witnesses) down to the tree,
//!   and from there to a point.
//! * Deleting triangles is the only step that changes the reduced Euler
//!   characteristic, so a collapse to a point removes exactly `χ̃(L)` of them.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use thiserror::Error;

use crate::collapse::{verify_collapse, CollapseCertificate, CollapseError, CollapseStep};
use crate::complex::{Complex, ComplexError, Face, VertexId};
use crate::search::{Budget, Outcome, Verdict};
use crate::shelling::{find_shelling, verify_shelling, ShellingCertificate, ShellingError};
use crate::wsat::{verify_saturation, Edge, Graph, SaturationCertificate, WsatError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CertificateError {
    #[error("the complex is not pure 2-dimensional")]
    NotPure2,
    #[error("the complex is not connected")]
    Disconnected,
    #[error("the complex is not flag: {0}")]
    NotFlag(String),
    #[error("invalid shelling: {0}")]
    InvalidShelling(String),
    #[error("invalid saturation certificate: {0}")]
    InvalidSaturation(String),
    #[error("start graph has {edges} edges, a spanning tree needs {expected}")]
    NotATree { edges: usize, expected: usize },
    #[error(transparent)]
    Shelling(#[from] ShellingError),
    #[error(transparent)]
    Wsat(#[from] WsatError),
    #[error(transparent)]
    Collapse(#[from] CollapseError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

fn check_pure2_connected(l: &Complex) -> Result<(), CertificateError> {
    if l.dimension() != 2 || !l.is_pure() {
        return Err(CertificateError::NotPure2);
    }
    if !l.is_connected() {
        return Err(CertificateError::Disconnected);
    }
    Ok(())
}

fn triangle_edges(t: &Face) -> [Edge; 3] {
    let [a, b, c] = [t.vertices()[0], t.vertices()[1], t.vertices()[2]];
    // lexicographic: ab, ac, bc
    [Edge::new(a, b), Edge::new(a, c), Edge::new(b, c)]
        .map(|e| e.expect("triangle vertices are distinct"))
}

/// Builds a weakly K₃-saturated spanning tree from a shelling.
///
/// The first triangle contributes its two lexicographically least edges to
/// the tree and its third edge to the order. A later triangle meeting its
/// predecessors in a single edge brings one new vertex: the least edge of
/// the triangle at that vertex joins the tree and the other one is added to
/// the order. A triangle meeting them in two edges adds its third edge to
/// the order; one meeting them in all three adds nothing. Every added edge
/// is witnessed by its own triangle.
pub fn shelling_to_saturated_tree(
    l: &Complex,
    cert: &ShellingCertificate,
) -> Result<SaturationCertificate, CertificateError> {
    check_pure2_connected(l)?;
    if let Verdict::Rejected { index, reason } = verify_shelling(l, cert)? {
        return Err(CertificateError::InvalidShelling(format!(
            "position {index}: {reason}"
        )));
    }

    let mut seen_vertices: HashSet<VertexId> = HashSet::new();
    let mut seen_edges: HashSet<Edge> = HashSet::new();
    let mut tree: Vec<Edge> = Vec::new();
    let mut order = Vec::new();
    let mut witnesses = Vec::new();

    for (i, theta) in cert.order.iter().enumerate() {
        let verts = [
            theta.vertices()[0],
            theta.vertices()[1],
            theta.vertices()[2],
        ];
        let edges = triangle_edges(theta);
        if i == 0 {
            tree.extend([edges[0], edges[1]]);
            order.push(edges[2]);
            witnesses.push(verts);
        } else {
            let shared = edges.iter().filter(|e| seen_edges.contains(e)).count();
            match shared {
                1 => {
                    let fresh = *verts
                        .iter()
                        .find(|v| !seen_vertices.contains(v))
                        .expect("a triangle glued along one edge brings a new vertex");
                    let mut at_fresh = edges.iter().filter(|e| e.u() == fresh || e.v() == fresh);
                    let (to_tree, to_order) =
                        (*at_fresh.next().unwrap(), *at_fresh.next().unwrap());
                    tree.push(to_tree);
                    order.push(to_order);
                    witnesses.push(verts);
                }
                2 => {
                    let third = *edges.iter().find(|e| !seen_edges.contains(e)).unwrap();
                    order.push(third);
                    witnesses.push(verts);
                }
                3 => {}
                _ => panic!("a verified shelling never glues a triangle along no edge"),
            }
        }
        seen_vertices.extend(verts);
        seen_edges.extend(edges);
    }

    let host = Graph::one_skeleton(l);
    let start = host.with_edges(tree)?;
    Ok(SaturationCertificate {
        start,
        order,
        witnesses,
    })
}

/// Turns a saturating spanning tree of a flag complex into a collapse to a point.
///
/// Each added edge `e_i` lies in the triangle spanned by its witness. Those
/// triangles are distinct, all other triangles are deleted, and the
/// collapses `(e_i, triangle_i)` run in reverse order. The remaining tree is
/// then collapsed by repeatedly removing its largest leaf, ending at its
/// least vertex.
pub fn saturation_to_collapse(
    l: &Complex,
    cert: &SaturationCertificate,
) -> Result<CollapseCertificate, CertificateError> {
    check_pure2_connected(l)?;
    if !l.is_flag2()? {
        return Err(CertificateError::NotFlag(
            "some 3-clique of the 1-skeleton spans no triangle".into(),
        ));
    }
    let host = Graph::one_skeleton(l);
    if let Verdict::Rejected { index, reason } = verify_saturation(&host, cert)? {
        return Err(CertificateError::InvalidSaturation(format!(
            "edge {index}: {reason}"
        )));
    }
    let expected = host.num_vertices() - 1;
    if cert.start.num_edges() != expected {
        return Err(CertificateError::NotATree {
            edges: cert.start.num_edges(),
            expected,
        });
    }

    let mut used: BTreeSet<Face> = BTreeSet::new();
    let mut induced = Vec::with_capacity(cert.order.len());
    for j in &cert.witnesses {
        let theta = Face::new(j.iter().copied())?;
        if !l.contains(&theta) {
            return Err(CertificateError::NotFlag(format!(
                "witness `{}` spans no triangle",
                l.render(&theta)
            )));
        }
        // a later triangle contains its own edge, which no earlier one does
        assert!(used.insert(theta.clone()), "witness triangles are distinct");
        induced.push(theta);
    }
    let removed_triangles: Vec<Face> = l
        .triangles()
        .filter(|t| !used.contains(*t))
        .cloned()
        .collect();

    let mut steps: Vec<CollapseStep> = cert
        .order
        .iter()
        .zip(&induced)
        .rev()
        .map(|(e, t)| CollapseStep::new(e.face(), t.clone()))
        .collect();
    steps.extend(tree_collapse(&cert.start));

    let root = *cert.start.vertices().first().expect("nonempty graph");
    let target = l.induced(&[Face::vertex(root)])?;
    Ok(CollapseCertificate {
        removed_triangles,
        steps,
        target,
    })
}

/// Leaf collapses of a tree, largest leaf first, down to its least vertex.
fn tree_collapse(tree: &Graph) -> Vec<CollapseStep> {
    let mut adj: BTreeMap<VertexId, BTreeSet<VertexId>> = tree
        .vertices()
        .iter()
        .map(|&v| (v, BTreeSet::new()))
        .collect();
    for e in tree.edges() {
        adj.get_mut(&e.u()).unwrap().insert(e.v());
        adj.get_mut(&e.v()).unwrap().insert(e.u());
    }
    let mut leaves: BTreeSet<VertexId> = adj
        .iter()
        .filter(|(_, n)| n.len() == 1)
        .map(|(&v, _)| v)
        .collect();
    let mut steps = Vec::new();
    while adj.len() > 1 {
        let leaf = leaves
            .pop_last()
            .expect("a tree with two vertices has a leaf");
        let parent = *adj[&leaf].first().unwrap();
        adj.remove(&leaf);
        let rest = adj.get_mut(&parent).unwrap();
        rest.remove(&leaf);
        if rest.len() == 1 {
            leaves.insert(parent);
        }
        steps.push(CollapseStep::new(
            Face::vertex(leaf),
            Edge::new(leaf, parent).unwrap().face(),
        ));
    }
    steps
}

/// Whether a point-targeting certificate deletes exactly `χ̃(L)` triangles.
pub fn check_removal_count(l: &Complex, cert: &CollapseCertificate) -> bool {
    cert.targets_point() && cert.removed_triangles.len() as i64 == l.reduced_euler_characteristic()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Stage {
    Shelling,
    Saturation,
    Collapse,
    RemovalCount,
}

impl Stage {
    pub fn name(&self) -> &'static str {
        match self {
            Stage::Shelling => "shelling",
            Stage::Saturation => "saturation",
            Stage::Collapse => "collapse",
            Stage::RemovalCount => "removal-count",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StageStatus {
    Passed,
    /// The property fails for this complex (only the shelling stage can refute).
    Refuted(String),
    /// A produced certificate did not verify.
    Failed(String),
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StageResult {
    pub stage: Stage,
    pub status: StageStatus,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChainError {
    #[error("search budget exceeded during the {} stage", .0.name())]
    BudgetExceeded(Stage),
    #[error(transparent)]
    Certificate(#[from] CertificateError),
}

/// Everything produced by [`run_chain`].
#[derive(Clone, Debug)]
pub struct ChainReport {
    pub input_fingerprint: String,
    /// How many barycentric subdivisions were applied to obtain `subject`.
    pub subdivisions: u32,
    pub subject: Complex,
    pub chi: i64,
    pub shelling: Option<ShellingCertificate>,
    pub saturation: Option<SaturationCertificate>,
    pub collapse: Option<CollapseCertificate>,
    pub removed_count: Option<usize>,
    pub stages: Vec<StageResult>,
}

impl ChainReport {
    pub fn status(&self, stage: Stage) -> &StageStatus {
        &self
            .stages
            .iter()
            .find(|s| s.stage == stage)
            .expect("every stage is recorded")
            .status
    }

    pub fn all_passed(&self) -> bool {
        self.stages.iter().all(|s| s.status == StageStatus::Passed)
    }

    pub fn refuted(&self) -> bool {
        self.stages
            .iter()
            .any(|s| matches!(s.status, StageStatus::Refuted(_)))
    }
}

/// Runs shelling search, both converters and every verifier on `k`.
///
/// Flag inputs are used as they are; otherwise the chain runs on the second
/// barycentric subdivision.
pub fn run_chain(k: &Complex, budget: &mut Budget) -> Result<ChainReport, ChainError> {
    check_pure2_connected(k)?;
    let (subject, subdivisions) = if k.is_flag2().map_err(CertificateError::from)? {
        (k.clone(), 0)
    } else {
        (k.barycentric_subdivision().barycentric_subdivision(), 2)
    };
    let mut report = ChainReport {
        input_fingerprint: k.fingerprint(),
        subdivisions,
        chi: subject.reduced_euler_characteristic(),
        subject,
        shelling: None,
        saturation: None,
        collapse: None,
        removed_count: None,
        stages: Vec::new(),
    };
    let l = report.subject.clone();
    let record =
        |report: &mut ChainReport, stage, status| report.stages.push(StageResult { stage, status });
    let skip_rest = |report: &mut ChainReport, from: usize| {
        for stage in [
            Stage::Shelling,
            Stage::Saturation,
            Stage::Collapse,
            Stage::RemovalCount,
        ]
        .into_iter()
        .skip(from)
        {
            report.stages.push(StageResult {
                stage,
                status: StageStatus::Skipped,
            });
        }
    };

    let shelling = match find_shelling(&l, budget).map_err(CertificateError::from)? {
        Outcome::Found(c) => c,
        Outcome::Refuted => {
            record(
                &mut report,
                Stage::Shelling,
                StageStatus::Refuted("unshellable".into()),
            );
            skip_rest(&mut report, 1);
            return Ok(report);
        }
        Outcome::BudgetExceeded => return Err(ChainError::BudgetExceeded(Stage::Shelling)),
    };
    let verdict = verify_shelling(&l, &shelling).map_err(CertificateError::from)?;
    report.shelling = Some(shelling.clone());
    if let Verdict::Rejected { index, reason } = verdict {
        record(
            &mut report,
            Stage::Shelling,
            StageStatus::Failed(format!("position {index}: {reason}")),
        );
        skip_rest(&mut report, 1);
        return Ok(report);
    }
    record(&mut report, Stage::Shelling, StageStatus::Passed);

    let saturation = shelling_to_saturated_tree(&l, &shelling)?;
    let host = Graph::one_skeleton(&l);
    let verdict = verify_saturation(&host, &saturation).map_err(CertificateError::from)?;
    let tree_ok = saturation.start.num_edges() + 1 == host.num_vertices();
    report.saturation = Some(saturation.clone());
    match (verdict, tree_ok) {
        (Verdict::Accepted, true) => record(&mut report, Stage::Saturation, StageStatus::Passed),
        (Verdict::Accepted, false) => {
            record(
                &mut report,
                Stage::Saturation,
                StageStatus::Failed("start graph is not a spanning tree".into()),
            );
            skip_rest(&mut report, 2);
            return Ok(report);
        }
        (Verdict::Rejected { index, reason }, _) => {
            record(
                &mut report,
                Stage::Saturation,
                StageStatus::Failed(format!("edge {index}: {reason}")),
            );
            skip_rest(&mut report, 2);
            return Ok(report);
        }
    }

    let collapse = saturation_to_collapse(&l, &saturation)?;
    let verdict = verify_collapse(&l, &collapse).map_err(CertificateError::from)?;
    report.removed_count = Some(collapse.removed_triangles.len());
    report.collapse = Some(collapse.clone());
    match verdict {
        Verdict::Accepted if collapse.targets_point() => {
            record(&mut report, Stage::Collapse, StageStatus::Passed)
        }
        Verdict::Accepted => record(
            &mut report,
            Stage::Collapse,
            StageStatus::Failed("target is not a point".into()),
        ),
        Verdict::Rejected { index, reason } => record(
            &mut report,
            Stage::Collapse,
            StageStatus::Failed(format!("step {index}: {reason}")),
        ),
    }

    let status = if check_removal_count(&l, &collapse) {
        StageStatus::Passed
    } else {
        StageStatus::Failed(format!(
            "{} triangles removed, reduced Euler characteristic is {}",
            collapse.removed_triangles.len(),
            report.chi
        ))
    };
    record(&mut report, Stage::RemovalCount, status);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::collapse::verify_collapse;

    fn cx(lines: &[&str]) -> Complex {
        Complex::from_facets(lines.iter().map(|l| l.split_whitespace())).unwrap()
    }

    fn f(k: &Complex, s: &str) -> Face {
        k.labels()
            .face(&s.split_whitespace().collect::<Vec<_>>())
            .unwrap()
    }

    fn e(k: &Complex, s: &str) -> Edge {
        let face = f(k, s);
        Edge::new(face.vertices()[0], face.vertices()[1]).unwrap()
    }

    fn shelling(k: &Complex, lines: &[&str]) -> ShellingCertificate {
        ShellingCertificate {
            order: lines.iter().map(|l| f(k, l)).collect(),
        }
    }

    fn rendered_steps(k: &Complex, c: &CollapseCertificate) -> Vec<String> {
        c.steps
            .iter()
            .map(|s| format!("{} -> {}", k.render(&s.free_face), k.render(&s.facet)))
            .collect()
    }

    #[test]
    fn shared_edge_pair_end_to_end() {
        let l = cx(&["a b c", "b c d"]);
        let sat = shelling_to_saturated_tree(&l, &shelling(&l, &["a b c", "b c d"])).unwrap();
        let tree: Vec<Edge> = sat.start.edges().iter().copied().collect();
        assert_eq!(tree, vec![e(&l, "a b"), e(&l, "a c"), e(&l, "b d")]);
        assert_eq!(sat.order, vec![e(&l, "b c"), e(&l, "c d")]);
        assert_eq!(sat.witnesses, vec![[0, 1, 2], [1, 2, 3]]);
        assert!(verify_saturation(&Graph::one_skeleton(&l), &sat)
            .unwrap()
            .is_accepted());

        let col = saturation_to_collapse(&l, &sat).unwrap();
        assert!(col.removed_triangles.is_empty());
        assert_eq!(
            rendered_steps(&l, &col),
            [
                "c d -> b c d",
                "b c -> a b c",
                "d -> b d",
                "c -> a c",
                "b -> a b"
            ]
        );
        assert_eq!(col.target.facets(), &[f(&l, "a")]);
        assert!(verify_collapse(&l, &col).unwrap().is_accepted());
        assert!(check_removal_count(&l, &col));
    }

    #[test]
    fn single_triangle_base_case() {
        let l = cx(&["a b c"]);
        let sat = shelling_to_saturated_tree(&l, &shelling(&l, &["a b c"])).unwrap();
        assert_eq!(sat.start.num_edges(), 2);
        assert_eq!(sat.order, vec![e(&l, "b c")]);
        let col = saturation_to_collapse(&l, &sat).unwrap();
        assert_eq!(
            rendered_steps(&l, &col),
            ["b c -> a b c", "c -> a c", "b -> a b"]
        );
        assert!(check_removal_count(&l, &col));
    }

    #[test]
    fn tetrahedron_boundary_tree() {
        let l = cx(&["a b c", "a b d", "a c d", "b c d"]);
        let cert = find_shelling(&l, &mut Budget::default())
            .unwrap()
            .found()
            .unwrap();
        let sat = shelling_to_saturated_tree(&l, &cert).unwrap();
        assert_eq!(sat.start.num_edges(), 3);
        assert_eq!(sat.order.len(), 3);
        assert!(verify_saturation(&Graph::one_skeleton(&l), &sat)
            .unwrap()
            .is_accepted());
        // not flag-relevant here: the boundary of a tetrahedron is flag
        let col = saturation_to_collapse(&l, &sat).unwrap();
        assert_eq!(col.removed_triangles.len(), 1);
        assert!(verify_collapse(&l, &col).unwrap().is_accepted());
        assert!(check_removal_count(&l, &col));
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        let bowtie = cx(&["a b c", "c d e"]);
        assert!(matches!(
            shelling_to_saturated_tree(&bowtie, &shelling(&bowtie, &["a b c", "c d e"])),
            Err(CertificateError::InvalidShelling(_))
        ));

        let hollow = cx(&["a b", "b c", "a c"]);
        assert_eq!(
            shelling_to_saturated_tree(&hollow, &ShellingCertificate { order: vec![] }),
            Err(CertificateError::NotPure2)
        );

        // three triangles around a: the clique bcd spans no triangle
        let nonflag = cx(&["a b c", "a b d", "a c d"]);
        assert_eq!(nonflag.is_flag2(), Ok(false));
        let sat =
            shelling_to_saturated_tree(&nonflag, &shelling(&nonflag, &["a b c", "a b d", "a c d"]))
                .unwrap();
        assert!(matches!(
            saturation_to_collapse(&nonflag, &sat),
            Err(CertificateError::NotFlag(_))
        ));
    }

    #[test]
    fn removal_count_mismatch() {
        let l = cx(&["a b c"]);
        let over = CollapseCertificate {
            removed_triangles: vec![f(&l, "a b c")],
            steps: vec![],
            target: l.induced(&[f(&l, "a")]).unwrap(),
        };
        assert!(!check_removal_count(&l, &over));
        assert!(!verify_collapse(&l, &over).unwrap().is_accepted());
    }

    #[test]
    fn chain_on_small_complexes() {
        let tri = cx(&["a b c"]);
        let report = run_chain(&tri, &mut Budget::default()).unwrap();
        assert!(report.all_passed());
        assert_eq!(report.removed_count, Some(0));
        assert_eq!(report.subdivisions, 0);

        let pair = cx(&["a b c", "b c d"]);
        let report = run_chain(&pair, &mut Budget::default()).unwrap();
        assert!(report.all_passed());
        assert_eq!(report.removed_count, Some(report.chi as usize));

        let bowtie = cx(&["a b c", "c d e"]);
        let report = run_chain(&bowtie, &mut Budget::default()).unwrap();
        assert!(report.refuted());
        assert_eq!(report.status(Stage::Saturation), &StageStatus::Skipped);
    }

    #[test]
    fn chain_subdivides_non_flag_input() {
        let cone = cx(&["a b c", "a b d", "a c d"]);
        let report = run_chain(&cone, &mut Budget::default()).unwrap();
        assert_eq!(report.subdivisions, 2);
        // (n, m, t) = (4, 6, 3) -> (13, 30, 18) -> 61 vertices
        assert_eq!(report.subject.num_vertices(), 61);
        assert!(report.all_passed());
    }

    #[test]
    fn chain_budget_is_stage_tagged() {
        let pair = cx(&["a b c", "b c d"]);
        assert_eq!(
            run_chain(&pair, &mut Budget::new(0)).unwrap_err(),
            ChainError::BudgetExceeded(Stage::Shelling)
        );
    }
}
