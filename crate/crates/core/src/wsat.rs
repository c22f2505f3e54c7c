//! Weak K₃-saturation: bootstrap closures, saturation certificates, and
//! exact searches for saturating spanning trees and the saturation number.
//!
//! An edge of the host `F` missing from the current graph is *addable* when
//! its endpoints have a common neighbour in the current graph, i.e. adding it
//! completes a copy of K₃. Addability is monotone: once addable, an edge
//! stays addable as more edges appear, so the closure does not depend on the
//! order of additions.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::complex::{Complex, Face, Labels, VertexId};
use crate::search::{Budget, Exhausted, Outcome, Verdict};

/// An undirected edge with `u < v`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Edge(VertexId, VertexId);

impl Edge {
    /// `None` for a loop.
    pub fn new(a: VertexId, b: VertexId) -> Option<Edge> {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => Some(Edge(a, b)),
            std::cmp::Ordering::Greater => Some(Edge(b, a)),
            std::cmp::Ordering::Equal => None,
        }
    }

    pub fn u(&self) -> VertexId {
        self.0
    }

    pub fn v(&self) -> VertexId {
        self.1
    }

    pub fn face(&self) -> Face {
        Face::from_sorted(&[self.0, self.1])
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.0, self.1)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WsatError {
    #[error("complex of dimension {0} is not a graph")]
    NotAGraph(isize),
    #[error("edge endpoint {0} is not a vertex of the graph")]
    UnknownVertex(VertexId),
    #[error("loop at vertex {0}")]
    Loop(VertexId),
    #[error("edge `{0}` of the subgraph is not an edge of the host")]
    NotContained(String),
    #[error("the subgraph does not have the host's vertex set")]
    NotSpanning,
    #[error("the host graph is not connected")]
    Disconnected,
    #[error("malformed certificate: {0}")]
    Malformed(String),
    #[error("search budget exceeded")]
    BudgetExceeded,
}

/// A simple graph over a subset of a label table's vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    vertices: Vec<VertexId>,
    edges: BTreeSet<Edge>,
    labels: Labels,
}

impl Graph {
    pub fn new(
        vertices: impl IntoIterator<Item = VertexId>,
        edges: impl IntoIterator<Item = Edge>,
        labels: Labels,
    ) -> Result<Graph, WsatError> {
        let mut vertices: Vec<VertexId> = vertices.into_iter().collect();
        vertices.sort_unstable();
        vertices.dedup();
        if let Some(&v) = vertices.iter().find(|&&v| v as usize >= labels.len()) {
            return Err(WsatError::UnknownVertex(v));
        }
        let edges: BTreeSet<Edge> = edges.into_iter().collect();
        for e in &edges {
            for x in [e.0, e.1] {
                if vertices.binary_search(&x).is_err() {
                    return Err(WsatError::UnknownVertex(x));
                }
            }
        }
        Ok(Graph {
            vertices,
            edges,
            labels,
        })
    }

    /// Reads a complex of dimension at most one as a graph.
    pub fn from_complex(k: &Complex) -> Result<Graph, WsatError> {
        if k.dimension() > 1 {
            return Err(WsatError::NotAGraph(k.dimension()));
        }
        Ok(Self::one_skeleton(k))
    }

    /// The 1-skeleton of any complex.
    pub fn one_skeleton(k: &Complex) -> Graph {
        Graph {
            vertices: k.vertices().collect(),
            edges: k
                .edges()
                .map(|e| Edge(e.vertices()[0], e.vertices()[1]))
                .collect(),
            labels: k.labels().clone(),
        }
    }

    pub fn to_complex(&self) -> Complex {
        let gens = self
            .vertices
            .iter()
            .map(|&v| Face::vertex(v))
            .chain(self.edges.iter().map(Edge::face));
        Complex::from_faces(gens, self.labels.clone()).expect("graph with vertices")
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn edges(&self) -> &BTreeSet<Edge> {
        &self.edges
    }

    pub fn labels(&self) -> &Labels {
        &self.labels
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, e: Edge) -> bool {
        self.edges.contains(&e)
    }

    pub fn render_edge(&self, e: Edge) -> String {
        format!("{} {}", self.labels.name(e.0), self.labels.name(e.1))
    }

    pub fn is_connected(&self) -> bool {
        let dense = Dense::new(self);
        let adj = dense.adjacency(self.edges.iter().copied());
        dense.components(&adj) <= 1
    }

    /// A copy with the same vertices and the given edges.
    pub fn with_edges(&self, edges: impl IntoIterator<Item = Edge>) -> Result<Graph, WsatError> {
        Graph::new(self.vertices.iter().copied(), edges, self.labels.clone())
    }
}

/// A spanning subgraph, the order in which the missing host edges are added,
/// and for each added edge the vertex set of a K₃ it completes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SaturationCertificate {
    pub start: Graph,
    pub order: Vec<Edge>,
    pub witnesses: Vec<[VertexId; 3]>,
}

/// Dense re-indexing of a graph's vertices for bitset adjacency.
struct Dense {
    vertices: Vec<VertexId>,
    local: HashMap<VertexId, usize>,
}

impl Dense {
    fn new(g: &Graph) -> Dense {
        Dense {
            vertices: g.vertices.clone(),
            local: g
                .vertices
                .iter()
                .enumerate()
                .map(|(i, &v)| (v, i))
                .collect(),
        }
    }

    fn n(&self) -> usize {
        self.vertices.len()
    }

    fn pair(&self, e: Edge) -> (usize, usize) {
        (self.local[&e.0], self.local[&e.1])
    }

    fn edge(&self, a: usize, b: usize) -> Edge {
        Edge::new(self.vertices[a], self.vertices[b]).expect("distinct endpoints")
    }

    fn adjacency(&self, edges: impl IntoIterator<Item = Edge>) -> Vec<FixedBitSet> {
        let mut adj = vec![FixedBitSet::with_capacity(self.n()); self.n()];
        for e in edges {
            let (a, b) = self.pair(e);
            adj[a].insert(b);
            adj[b].insert(a);
        }
        adj
    }

    fn components(&self, adj: &[FixedBitSet]) -> usize {
        let mut seen = FixedBitSet::with_capacity(self.n());
        let mut count = 0;
        for s in 0..self.n() {
            if seen.contains(s) {
                continue;
            }
            count += 1;
            seen.insert(s);
            let mut stack = vec![s];
            while let Some(x) = stack.pop() {
                for y in adj[x].ones() {
                    if !seen.contains(y) {
                        seen.insert(y);
                        stack.push(y);
                    }
                }
            }
        }
        count
    }
}

fn edge_count(adj: &[FixedBitSet]) -> usize {
    adj.iter().map(|r| r.count_ones(..)).sum::<usize>() / 2
}

/// Closure of `current` inside `host` (both dense adjacency rows).
fn close(host: &[FixedBitSet], mut current: Vec<FixedBitSet>) -> Vec<FixedBitSet> {
    let mut queue: Vec<(usize, usize)> = Vec::new();
    for (a, row) in current.iter().enumerate() {
        queue.extend(row.ones().filter(|&b| a < b).map(|b| (a, b)));
    }
    while let Some((a, b)) = queue.pop() {
        // a new edge ab can only witness edges a-x with x ~ b, or b-x with x ~ a
        for (p, q) in [(a, b), (b, a)] {
            let mut fresh = host[p].clone();
            fresh.difference_with(&current[p]);
            fresh.intersect_with(&current[q]);
            fresh.set(p, false);
            for x in fresh.ones().collect::<Vec<_>>() {
                current[p].insert(x);
                current[x].insert(p);
                queue.push((p, x));
            }
        }
    }
    current
}

fn check_spanning_subgraph(f: &Graph, g: &Graph) -> Result<(), WsatError> {
    if f.vertices != g.vertices {
        return Err(WsatError::NotSpanning);
    }
    if let Some(e) = g.edges.iter().find(|e| !f.edges.contains(e)) {
        return Err(WsatError::NotContained(g.render_edge(*e)));
    }
    Ok(())
}

/// Adds host edges completing a K₃ until none is left.
pub fn k3_closure(f: &Graph, g: &Graph) -> Result<Graph, WsatError> {
    check_spanning_subgraph(f, g)?;
    let dense = Dense::new(f);
    let host = dense.adjacency(f.edges.iter().copied());
    let closed = close(&host, dense.adjacency(g.edges.iter().copied()));
    let mut edges = Vec::new();
    for (a, row) in closed.iter().enumerate() {
        edges.extend(row.ones().filter(|&b| a < b).map(|b| dense.edge(a, b)));
    }
    g.with_edges(edges)
}

pub fn is_weakly_saturated(f: &Graph, g: &Graph) -> Result<bool, WsatError> {
    Ok(k3_closure(f, g)?.num_edges() == f.num_edges())
}

/// Records a saturating order, always adding the lexicographically least
/// addable edge, witnessed through the least common neighbour.
pub fn extract_saturation_order(
    f: &Graph,
    g: &Graph,
) -> Result<Outcome<SaturationCertificate>, WsatError> {
    check_spanning_subgraph(f, g)?;
    let dense = Dense::new(f);
    let host = dense.adjacency(f.edges.iter().copied());
    let mut current = dense.adjacency(g.edges.iter().copied());

    let mut addable: BTreeSet<Edge> = f
        .edges
        .iter()
        .filter(|&&e| {
            let (a, b) = dense.pair(e);
            !current[a].contains(b) && !current[a].is_disjoint(&current[b])
        })
        .copied()
        .collect();
    let mut order = Vec::new();
    let mut witnesses = Vec::new();
    while let Some(e) = addable.pop_first() {
        let (a, b) = dense.pair(e);
        let mut common = current[a].clone();
        common.intersect_with(&current[b]);
        // vertex ids increase with local indices, so the first one is least
        let w = common.ones().next().expect("addable edge has a witness");
        let mut j = [e.0, e.1, dense.vertices[w]];
        j.sort_unstable();
        order.push(e);
        witnesses.push(j);
        current[a].insert(b);
        current[b].insert(a);
        for (p, q) in [(a, b), (b, a)] {
            let mut fresh = host[p].clone();
            fresh.difference_with(&current[p]);
            fresh.intersect_with(&current[q]);
            fresh.set(p, false);
            addable.extend(fresh.ones().map(|x| dense.edge(p, x)));
        }
    }
    if g.num_edges() + order.len() != f.num_edges() {
        return Ok(Outcome::Refuted);
    }
    Ok(Outcome::Found(SaturationCertificate {
        start: g.clone(),
        order,
        witnesses,
    }))
}

/// Replays a saturation certificate on the host `f`.
///
/// A certificate whose order is not exactly the missing host edges is
/// malformed; a witness that does not certify its edge is a rejection at
/// the edge's 1-based position.
pub fn verify_saturation(f: &Graph, cert: &SaturationCertificate) -> Result<Verdict, WsatError> {
    check_spanning_subgraph(f, &cert.start)?;
    let missing: BTreeSet<Edge> = f.edges.difference(&cert.start.edges).copied().collect();
    let listed: HashSet<Edge> = cert.order.iter().copied().collect();
    if listed.len() != cert.order.len() {
        return Err(WsatError::Malformed("an edge is listed twice".into()));
    }
    if let Some(e) = missing.iter().find(|e| !listed.contains(e)) {
        return Err(WsatError::Malformed(format!(
            "missing host edge `{}` is never added",
            f.render_edge(*e)
        )));
    }
    if let Some(e) = cert.order.iter().find(|e| !missing.contains(e)) {
        return Err(WsatError::Malformed(format!(
            "`{}` is not a missing host edge",
            f.render_edge(*e)
        )));
    }
    if cert.witnesses.len() != cert.order.len() {
        return Err(WsatError::Malformed(format!(
            "{} witnesses for {} edges",
            cert.witnesses.len(),
            cert.order.len()
        )));
    }

    let mut current = cert.start.edges.clone();
    for (i, (&e, j)) in cert.order.iter().zip(&cert.witnesses).enumerate() {
        current.insert(e);
        let [x, y, z] = *j;
        let triple = [Edge::new(x, y), Edge::new(x, z), Edge::new(y, z)];
        if triple.iter().any(Option::is_none) {
            return Ok(Verdict::reject(i + 1, "witness has repeated vertices"));
        }
        let triple = triple.map(Option::unwrap);
        if !triple.contains(&e) {
            return Ok(Verdict::reject(
                i + 1,
                format!("witness does not contain `{}`", f.render_edge(e)),
            ));
        }
        if let Some(absent) = triple.iter().find(|t| !current.contains(t)) {
            return Ok(Verdict::reject(
                i + 1,
                format!(
                    "witness edge `{}` is not present when `{}` is added",
                    f.render_edge(*absent),
                    f.render_edge(e)
                ),
            ));
        }
    }
    Ok(Verdict::Accepted)
}

/// Host edges lying in no K₃ of the host; every saturating subgraph contains them.
fn bridges_of_triangles(host: &[FixedBitSet], edges: &[(usize, usize)]) -> Vec<bool> {
    edges
        .iter()
        .map(|&(a, b)| host[a].is_disjoint(&host[b]))
        .collect()
}

/// Include/exclude search over the host edges in lexicographic order.
struct SubgraphSearch<'a> {
    host: &'a [FixedBitSet],
    edges: Vec<(usize, usize)>,
    forced: Vec<bool>,
    total: usize,
    n: usize,
    /// Only acyclic selections (spanning trees).
    forest: bool,
}

impl SubgraphSearch<'_> {
    fn closes(&self, chosen: &[usize], tail_from: usize) -> bool {
        let mut adj = vec![FixedBitSet::with_capacity(self.n); self.n];
        for &i in chosen
            .iter()
            .chain(&(tail_from..self.edges.len()).collect::<Vec<_>>())
        {
            let (a, b) = self.edges[i];
            adj[a].insert(b);
            adj[b].insert(a);
        }
        edge_count(&close(self.host, adj)) == self.total
    }

    /// Looks for exactly `size` edges whose closure is the whole host.
    fn run(
        &self,
        i: usize,
        size: usize,
        chosen: &mut Vec<usize>,
        uf: &mut Vec<usize>,
        budget: &mut Budget,
    ) -> Result<bool, Exhausted> {
        budget.spend()?;
        if chosen.len() == size {
            return Ok(self.forced[i..].iter().all(|f| !f) && self.closes(chosen, self.edges.len()));
        }
        if i == self.edges.len() || chosen.len() + (self.edges.len() - i) < size {
            return Ok(false);
        }
        let (a, b) = self.edges[i];
        let (ra, rb) = (find(uf, a), find(uf, b));
        if !self.forest || ra != rb {
            let saved = uf.clone();
            if self.forest {
                uf[ra] = rb;
            }
            chosen.push(i);
            if self.run(i + 1, size, chosen, uf, budget)? {
                return Ok(true);
            }
            chosen.pop();
            *uf = saved;
        }
        if !self.forced[i]
            && self.closes(chosen, i + 1)
            && self.run(i + 1, size, chosen, uf, budget)?
        {
            return Ok(true);
        }
        Ok(false)
    }
}

fn find(uf: &mut [usize], mut x: usize) -> usize {
    while uf[x] != x {
        uf[x] = uf[uf[x]];
        x = uf[x];
    }
    x
}

/// Dense re-indexing, adjacency rows and the edge list by local index.
type Prepared = (Dense, Vec<FixedBitSet>, Vec<(usize, usize)>);

fn prepare(f: &Graph) -> Result<Prepared, WsatError> {
    if !f.is_connected() {
        return Err(WsatError::Disconnected);
    }
    let dense = Dense::new(f);
    let host = dense.adjacency(f.edges.iter().copied());
    let edges = f.edges.iter().map(|&e| dense.pair(e)).collect();
    Ok((dense, host, edges))
}

/// Searches the spanning trees of `f` for one that is weakly K₃-saturated.
///
/// Any weakly saturated subgraph of a connected host is connected (an
/// addable edge never joins two components), so `wsat(F, K₃) = n − 1`
/// exactly when some spanning tree saturates.
pub fn decide_wsat_eq_treesize(
    f: &Graph,
    budget: &mut Budget,
) -> Result<Outcome<SaturationCertificate>, WsatError> {
    let (dense, host, edges) = prepare(f)?;
    let forced = bridges_of_triangles(&host, &edges);
    let search = SubgraphSearch {
        host: &host,
        total: edges.len(),
        forced,
        edges,
        n: dense.n(),
        forest: true,
    };
    let mut chosen = Vec::new();
    let mut uf: Vec<usize> = (0..dense.n()).collect();
    match search.run(0, dense.n() - 1, &mut chosen, &mut uf, budget) {
        Ok(true) => {
            let tree = f.with_edges(chosen.iter().map(|&i| {
                let (a, b) = search.edges[i];
                dense.edge(a, b)
            }))?;
            Ok(extract_saturation_order(f, &tree)?)
        }
        Ok(false) => Ok(Outcome::Refuted),
        Err(Exhausted) => Ok(Outcome::BudgetExceeded),
    }
}

/// The weak K₃-saturation number of a connected host, by exact search over
/// subgraph sizes from `n − 1` upward.
pub fn wsat_number(f: &Graph, budget: &mut Budget) -> Result<usize, WsatError> {
    let (dense, host, edges) = prepare(f)?;
    let forced = bridges_of_triangles(&host, &edges);
    let lower = (dense.n() - 1).max(forced.iter().filter(|&&x| x).count());
    let search = SubgraphSearch {
        host: &host,
        total: edges.len(),
        forced,
        edges,
        n: dense.n(),
        forest: false,
    };
    for size in lower..=search.total {
        let mut chosen = Vec::new();
        let mut uf: Vec<usize> = (0..dense.n()).collect();
        match search.run(0, size, &mut chosen, &mut uf, budget) {
            Ok(true) => return Ok(size),
            Ok(false) => {}
            Err(Exhausted) => return Err(WsatError::BudgetExceeded),
        }
    }
    unreachable!("the host saturates itself")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(n: usize, edges: &[(u32, u32)]) -> Graph {
        Graph::new(
            0..n as u32,
            edges.iter().map(|&(a, b)| Edge::new(a, b).unwrap()),
            Labels::numeric(n),
        )
        .unwrap()
    }

    fn complete(n: usize) -> Graph {
        let mut e = Vec::new();
        for a in 0..n as u32 {
            for b in a + 1..n as u32 {
                e.push((a, b));
            }
        }
        graph(n, &e)
    }

    fn c4() -> Graph {
        graph(4, &[(0, 1), (1, 2), (2, 3), (0, 3)])
    }

    #[test]
    fn closure_examples() {
        let k4 = complete(4);
        let star = graph(4, &[(0, 1), (0, 2), (0, 3)]);
        assert_eq!(k3_closure(&k4, &star).unwrap(), k4);

        let path = graph(4, &[(0, 1), (1, 2), (2, 3)]);
        assert_eq!(k3_closure(&c4(), &path).unwrap(), path);
        assert_eq!(k3_closure(&c4(), &c4()).unwrap(), c4());
    }

    #[test]
    fn closure_containment_errors() {
        let path = graph(4, &[(0, 1), (1, 2), (0, 2)]);
        assert_eq!(
            k3_closure(&c4(), &path),
            Err(WsatError::NotContained("0 2".into()))
        );
        let small = graph(3, &[(0, 1)]);
        assert_eq!(k3_closure(&c4(), &small), Err(WsatError::NotSpanning));
    }

    #[test]
    fn saturation_examples() {
        assert!(is_weakly_saturated(&complete(3), &graph(3, &[(0, 1), (1, 2)])).unwrap());
        assert!(!is_weakly_saturated(&c4(), &graph(4, &[(0, 1), (1, 2), (2, 3)])).unwrap());
        assert!(is_weakly_saturated(&complete(4), &graph(4, &[(0, 1), (1, 2), (2, 3)])).unwrap());
    }

    #[test]
    fn extracted_orders() {
        let k3 = complete(3);
        let cert = extract_saturation_order(&k3, &graph(3, &[(0, 1), (1, 2)]))
            .unwrap()
            .found()
            .unwrap();
        assert_eq!(cert.order, vec![Edge(0, 2)]);
        assert_eq!(cert.witnesses, vec![[0, 1, 2]]);
        assert_eq!(verify_saturation(&k3, &cert), Ok(Verdict::Accepted));

        let k4 = complete(4);
        let star = graph(4, &[(0, 1), (0, 2), (0, 3)]);
        let cert = extract_saturation_order(&k4, &star)
            .unwrap()
            .found()
            .unwrap();
        assert_eq!(cert.order, vec![Edge(1, 2), Edge(1, 3), Edge(2, 3)]);
        assert!(cert.witnesses.iter().all(|j| j[0] == 0));
        assert_eq!(verify_saturation(&k4, &cert), Ok(Verdict::Accepted));

        assert_eq!(
            extract_saturation_order(&c4(), &graph(4, &[(0, 1), (1, 2), (2, 3)])),
            Ok(Outcome::Refuted)
        );
    }

    #[test]
    fn verification_failures() {
        let k4 = complete(4);
        let star = graph(4, &[(0, 1), (0, 2), (0, 3)]);
        let cert = extract_saturation_order(&k4, &star)
            .unwrap()
            .found()
            .unwrap();

        let mut shuffled = cert.clone();
        shuffled.witnesses.rotate_left(1);
        // [0,1,3] cannot witness 1-2
        assert!(matches!(
            verify_saturation(&k4, &shuffled),
            Ok(Verdict::Rejected { index: 1, .. })
        ));

        let mut short = cert.clone();
        short.order.pop();
        short.witnesses.pop();
        assert!(matches!(
            verify_saturation(&k4, &short),
            Err(WsatError::Malformed(_))
        ));

        let mut premature = cert.clone();
        premature.order.swap(0, 2);
        premature.witnesses = vec![[1, 2, 3], [0, 1, 3], [0, 1, 2]];
        assert!(matches!(
            verify_saturation(&k4, &premature),
            Ok(Verdict::Rejected { index: 1, .. })
        ));
    }

    #[test]
    fn tree_decisions() {
        for n in 3..=6 {
            let kn = complete(n);
            let cert = decide_wsat_eq_treesize(&kn, &mut Budget::default())
                .unwrap()
                .found()
                .unwrap();
            assert_eq!(cert.start.num_edges(), n - 1);
            assert!(verify_saturation(&kn, &cert).unwrap().is_accepted());
        }
        assert_eq!(
            decide_wsat_eq_treesize(&c4(), &mut Budget::default()),
            Ok(Outcome::Refuted)
        );
        assert_eq!(
            decide_wsat_eq_treesize(&graph(4, &[(0, 1), (2, 3)]), &mut Budget::default()),
            Err(WsatError::Disconnected)
        );
        let single = graph(1, &[]);
        assert!(decide_wsat_eq_treesize(&single, &mut Budget::default())
            .unwrap()
            .is_found());
    }

    #[test]
    fn saturation_numbers() {
        assert_eq!(wsat_number(&complete(4), &mut Budget::default()), Ok(3));
        assert_eq!(wsat_number(&c4(), &mut Budget::default()), Ok(4));
        assert_eq!(wsat_number(&complete(3), &mut Budget::default()), Ok(2));
        // two triangles glued at a vertex: each needs two of its edges
        let bowtie = graph(5, &[(0, 1), (0, 2), (1, 2), (2, 3), (2, 4), (3, 4)]);
        assert_eq!(wsat_number(&bowtie, &mut Budget::default()), Ok(4));
        assert_eq!(
            wsat_number(&complete(5), &mut Budget::new(1)),
            Err(WsatError::BudgetExceeded)
        );
    }

    #[test]
    fn graph_from_complex() {
        let k = Complex::from_facets([["a", "b", "c"]]).unwrap();
        assert_eq!(Graph::from_complex(&k), Err(WsatError::NotAGraph(2)));
        let g = Graph::one_skeleton(&k);
        assert_eq!(g.num_edges(), 3);
        assert_eq!(Graph::from_complex(&g.to_complex()).unwrap(), g);
    }
}
