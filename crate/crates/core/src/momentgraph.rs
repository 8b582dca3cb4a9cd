//! Ordered moment graphs of category O blocks: vertices are the dot-orbit
//! of an antidominant weight under its integral Weyl group, edges come
//! from reflections and carry coroot labels, and the order is the weight
//! order. Includes the GKM check, open-subgraph machinery for both order
//! directions, order reversal and the longest-element relabeling.

use crate::coxeter::{
    integral_positive_roots, is_antidominant, orbit_and_stabilizer, weight_leq, CoxeterGroup,
    Root, RootSystemData, Weight,
};
use crate::polyalg::{LinearForm, PolyRing};
use serde_json::json;
use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

#[derive(Debug, thiserror::Error)]
pub enum GraphError {
    #[error("weight is not antidominant; blocks are parametrized by antidominant weights")]
    NotAntidominant,
    #[error("double edge between {x} and {y}: labels {a} and {b} from distinct reflections")]
    DoubleEdge { x: String, y: String, a: String, b: String },
    #[error(transparent)]
    Coxeter(#[from] crate::coxeter::CoxeterError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OrderDirection {
    Up,
    Down,
}

impl OrderDirection {
    pub fn flipped(self) -> OrderDirection {
        match self {
            OrderDirection::Up => OrderDirection::Down,
            OrderDirection::Down => OrderDirection::Up,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            OrderDirection::Up => "up",
            OrderDirection::Down => "down",
        }
    }
}

/// An edge between two comparable vertices; the label is the coroot line,
/// normalized to a primitive integer vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub x: usize,
    pub y: usize,
    pub label: LinearForm,
}

impl Edge {
    pub fn other(&self, v: usize) -> usize {
        if self.x == v {
            self.y
        } else {
            self.x
        }
    }

    pub fn touches(&self, v: usize) -> bool {
        self.x == v || self.y == v
    }
}

/// Group-theoretic context of a block graph, kept for relabeling and for
/// naming vertices by coset representatives.
#[derive(Clone)]
pub struct BlockContext {
    pub rs: RootSystemData,
    pub group: Arc<CoxeterGroup>,
    pub lambda: Weight,
    /// Minimal coset representative of each vertex, as a group index.
    pub reps: Vec<usize>,
}

/// Finite ordered moment graph. `leq` always stores the graph's own
/// current order; `reverse_order` flips both it and the direction flag.
#[derive(Clone)]
pub struct MomentGraph {
    pub ring: PolyRing,
    pub names: Vec<String>,
    pub weights: Vec<Weight>,
    pub lengths: Vec<usize>,
    pub edges: Vec<Edge>,
    leq: Vec<Vec<bool>>,
    pub direction: OrderDirection,
    pub block: Option<BlockContext>,
}

/// A vertex subset with its induced edges.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct SubgraphSelector {
    pub vertices: BTreeSet<usize>,
}

impl SubgraphSelector {
    pub fn new<I: IntoIterator<Item = usize>>(vs: I) -> Self {
        SubgraphSelector { vertices: vs.into_iter().collect() }
    }

    pub fn full(g: &MomentGraph) -> Self {
        SubgraphSelector::new(0..g.len())
    }

    pub fn empty() -> Self {
        SubgraphSelector { vertices: BTreeSet::new() }
    }

    pub fn contains(&self, v: usize) -> bool {
        self.vertices.contains(&v)
    }

    /// Indices of edges with both endpoints inside.
    pub fn induced_edges(&self, g: &MomentGraph) -> Vec<usize> {
        g.edges
            .iter()
            .enumerate()
            .filter(|(_, e)| self.contains(e.x) && self.contains(e.y))
            .map(|(i, _)| i)
            .collect()
    }
}

impl MomentGraph {
    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// Current order of the graph.
    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.leq[a][b]
    }

    /// Order adjusted by a direction relative to the stored one: `Up`
    /// reads the stored order, `Down` its reverse.
    pub fn leq_dir(&self, dir: OrderDirection, a: usize, b: usize) -> bool {
        match dir {
            OrderDirection::Up => self.leq[a][b],
            OrderDirection::Down => self.leq[b][a],
        }
    }

    pub fn vertex_by_name(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Edges `{v, y}` with `v < y` in the current order.
    pub fn upper_edges(&self, v: usize) -> Vec<usize> {
        self.edges
            .iter()
            .enumerate()
            .filter(|(_, e)| e.touches(v) && self.leq(v, e.other(v)))
            .map(|(i, _)| i)
            .collect()
    }

    /// Edges `{v, y}` with `y < v` in the current order.
    pub fn lower_edges(&self, v: usize) -> Vec<usize> {
        self.edges
            .iter()
            .enumerate()
            .filter(|(_, e)| e.touches(v) && self.leq(e.other(v), v))
            .map(|(i, _)| i)
            .collect()
    }

    pub fn incident_edges(&self, v: usize) -> Vec<usize> {
        self.edges
            .iter()
            .enumerate()
            .filter(|(_, e)| e.touches(v))
            .map(|(i, _)| i)
            .collect()
    }

    /// Build an arbitrary graph for tests and counterexamples. `leq` is
    /// taken as given (must be a partial order with comparable edge
    /// endpoints; asserted).
    pub fn handcrafted(
        ring: PolyRing,
        names: Vec<String>,
        edges: Vec<Edge>,
        leq: Vec<Vec<bool>>,
    ) -> MomentGraph {
        let n = names.len();
        for (i, row) in leq.iter().enumerate() {
            assert!(row[i], "order must be reflexive");
            for (j, &ij) in row.iter().enumerate() {
                assert!(i == j || !ij || !leq[j][i], "order must be antisymmetric");
                for (k, &jk) in leq[j].iter().enumerate() {
                    assert!(!(ij && jk) || leq[i][k], "order must be transitive");
                }
            }
        }
        for e in &edges {
            assert!(e.x != e.y, "no loops");
            assert!(leq[e.x][e.y] || leq[e.y][e.x], "edge endpoints must be comparable");
        }
        MomentGraph {
            ring,
            lengths: vec![0; n],
            weights: vec![Weight::zero(0); n],
            names,
            edges,
            leq,
            direction: OrderDirection::Up,
            block: None,
        }
    }

    pub fn reverse_order(&self) -> MomentGraph {
        let n = self.len();
        let mut leq = vec![vec![false; n]; n];
        for i in 0..n {
            for j in 0..n {
                leq[i][j] = self.leq[j][i];
            }
        }
        MomentGraph {
            ring: self.ring.clone(),
            names: self.names.clone(),
            weights: self.weights.clone(),
            lengths: self.lengths.clone(),
            edges: self.edges.clone(),
            leq,
            direction: self.direction.flipped(),
            block: self.block.clone(),
        }
    }

    /// True iff the vertex set is down-closed in the direction-adjusted
    /// order (edges of a selector are induced by construction).
    pub fn is_open(&self, sel: &SubgraphSelector, dir: OrderDirection) -> bool {
        sel.vertices
            .iter()
            .all(|&v| (0..self.len()).all(|u| !self.leq_dir(dir, u, v) || sel.contains(u)))
    }

    /// Down-closure of a vertex set in the direction-adjusted order.
    pub fn down_closure(&self, vs: &[usize], dir: OrderDirection) -> SubgraphSelector {
        let mut out = BTreeSet::new();
        for &v in vs {
            for u in 0..self.len() {
                if self.leq_dir(dir, u, v) {
                    out.insert(u);
                }
            }
        }
        SubgraphSelector { vertices: out }
    }

    /// All open vertex subsets when the graph is small; otherwise a
    /// deterministic generating family (the empty set, principal
    /// down-sets, their pairwise unions, and the full set).
    pub fn open_subgraphs(&self, dir: OrderDirection) -> Vec<SubgraphSelector> {
        let n = self.len();
        let mut out: BTreeSet<SubgraphSelector> = BTreeSet::new();
        if n <= 10 {
            for mask in 0u32..(1 << n) {
                let sel = SubgraphSelector::new((0..n).filter(|&v| mask & (1 << v) != 0));
                if self.is_open(&sel, dir) {
                    out.insert(sel);
                }
            }
        } else {
            out.insert(SubgraphSelector::empty());
            out.insert(SubgraphSelector::full(self));
            let principals: Vec<SubgraphSelector> =
                (0..n).map(|v| self.down_closure(&[v], dir)).collect();
            for p in &principals {
                out.insert(p.clone());
            }
            for a in 0..n {
                for b in a + 1..n {
                    let mut u = principals[a].vertices.clone();
                    u.extend(principals[b].vertices.iter().copied());
                    out.insert(SubgraphSelector { vertices: u });
                }
            }
        }
        let mut list: Vec<SubgraphSelector> = out.into_iter().collect();
        list.sort_by_key(|s| (s.vertices.len(), s.vertices.iter().copied().collect::<Vec<_>>()));
        list
    }

    /// The vertex bijection `x W' -> w0 x W'`, as image indices.
    pub fn w0_relabel(&self) -> Option<Vec<usize>> {
        let block = self.block.as_ref()?;
        let g = &block.group;
        let w0 = g.longest_element();
        let mut weight_index: HashMap<Vec<crate::polyalg::Q>, usize> = HashMap::new();
        for (i, w) in self.weights.iter().enumerate() {
            weight_index.insert(w.coords.clone(), i);
        }
        let mut map = Vec::with_capacity(self.len());
        for &rep in &block.reps {
            let img = g.dot_action(g.mult(w0, rep), &block.lambda, &block.rs.rho);
            map.push(*weight_index.get(&img.coords)?);
        }
        Some(map)
    }

    pub fn connected_components(&self) -> usize {
        let n = self.len();
        let mut comp: Vec<usize> = (0..n).collect();
        fn find(comp: &mut Vec<usize>, mut v: usize) -> usize {
            while comp[v] != v {
                comp[v] = comp[comp[v]];
                v = comp[v];
            }
            v
        }
        for e in &self.edges {
            let a = find(&mut comp, e.x);
            let b = find(&mut comp, e.y);
            comp[a] = b;
        }
        (0..n).filter(|&v| find(&mut comp, v) == v).count()
    }

    /// Cover relations of the current order, as (lower, upper) pairs.
    pub fn cover_relations(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut covers = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i == j || !self.leq(i, j) {
                    continue;
                }
                let has_mid = (0..n)
                    .any(|k| k != i && k != j && self.leq(i, k) && self.leq(k, j));
                if !has_mid {
                    covers.push((i, j));
                }
            }
        }
        covers
    }

    pub fn to_json(&self) -> serde_json::Value {
        let vertices: Vec<serde_json::Value> = (0..self.len())
            .map(|i| {
                json!({
                    "name": self.names[i],
                    "length": self.lengths[i],
                    "weight": self.weights[i].coords.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                })
            })
            .collect();
        let edges: Vec<serde_json::Value> = self
            .edges
            .iter()
            .map(|e| {
                json!({
                    "x": self.names[e.x],
                    "y": self.names[e.y],
                    "label": e.label.int_coeffs().iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                })
            })
            .collect();
        let covers: Vec<serde_json::Value> = self
            .cover_relations()
            .iter()
            .map(|&(a, b)| json!([self.names[a], self.names[b]]))
            .collect();
        json!({
            "schema_version": 1,
            "direction": self.direction.as_str(),
            "vertices": vertices,
            "edges": edges,
            "cover_relations": covers,
        })
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph moment_graph {\n  rankdir=BT;\n");
        for name in &self.names {
            out.push_str(&format!("  \"{name}\";\n"));
        }
        for e in &self.edges {
            let (lo, hi) = if self.leq(e.x, e.y) { (e.x, e.y) } else { (e.y, e.x) };
            out.push_str(&format!(
                "  \"{}\" -> \"{}\" [label=\"{}\"];\n",
                self.names[lo],
                self.names[hi],
                e.label.to_polynomial().render(&self.ring)
            ));
        }
        out.push_str("}\n");
        out
    }
}

/// Apply a group element to a root (weight side by the stored matrix,
/// coroot side by the inverse transpose).
pub fn apply_to_root(group: &CoxeterGroup, w: usize, root: &Root) -> Root {
    let n = group.ambient_rank;
    let m = &group.elements[w].matrix;
    let weight_coords: Vec<i64> = (0..n)
        .map(|i| (0..n).map(|j| m[i * n + j] * root.weight_coords[j]).sum())
        .collect();
    let wi = group.inverse(w);
    let mi = &group.elements[wi].matrix;
    // pairing invariance: coroot coords transform by the transpose of the
    // inverse matrix
    let coroot: Vec<i64> = (0..n)
        .map(|j| (0..n).map(|i| mi[i * n + j] * root.coroot[i]).sum())
        .collect();
    Root { weight_coords, coroot }
}

/// The reflection `s_alpha` applied to a weight: `v - <v, coroot> alpha`.
fn reflect_weight(root: &Root, v: &Weight) -> Weight {
    let pairing = root.pair(v);
    v.sub(&root.as_weight().scale(&pairing))
}

/// `s_alpha . mu` for the rho-shifted action.
fn reflect_dot(root: &Root, rho: &Weight, mu: &Weight) -> Weight {
    reflect_weight(root, &mu.add(rho)).sub(rho)
}

/// Moment graph of the block of an antidominant weight.
pub fn build_block_graph(rs: &RootSystemData, lambda: &Weight) -> Result<MomentGraph, GraphError> {
    if !is_antidominant(rs, lambda) {
        return Err(GraphError::NotAntidominant);
    }
    let group = Arc::new(crate::coxeter::integral_weyl_group(rs, lambda)?);
    let orbit = orbit_and_stabilizer(rs, &group, lambda)?;
    let n = orbit.representatives.len();
    let names: Vec<String> = orbit.representatives.iter().map(|&r| group.name(r)).collect();
    let lengths: Vec<usize> = orbit.representatives.iter().map(|&r| group.length(r)).collect();
    let weights = orbit.weights.clone();
    let mut weight_index: HashMap<Vec<crate::polyalg::Q>, usize> = HashMap::new();
    for (i, w) in weights.iter().enumerate() {
        weight_index.insert(w.coords.clone(), i);
    }
    let roots = integral_positive_roots(rs, lambda);
    let mut edge_at: HashMap<(usize, usize), LinearForm> = HashMap::new();
    let mut edges = Vec::new();
    for root in &roots {
        let label = LinearForm::from_ints(root.coroot.clone()).expect("coroot is nonzero");
        for i in 0..n {
            let img = reflect_dot(root, &rs.rho, &weights[i]);
            let Some(&j) = weight_index.get(&img.coords) else {
                continue;
            };
            if j <= i {
                continue;
            }
            if let Some(existing) = edge_at.get(&(i, j)) {
                if *existing != label {
                    return Err(GraphError::DoubleEdge {
                        x: names[i].clone(),
                        y: names[j].clone(),
                        a: existing.to_polynomial().render(&PolyRing::coroot_ring(rs.rank)),
                        b: label.to_polynomial().render(&PolyRing::coroot_ring(rs.rank)),
                    });
                }
                continue;
            }
            edge_at.insert((i, j), label.clone());
            edges.push(Edge { x: i, y: j, label: label.clone() });
        }
    }
    let mut leq = vec![vec![false; n]; n];
    for i in 0..n {
        for j in 0..n {
            leq[i][j] = weight_leq(rs, &weights[i], &weights[j]);
        }
    }
    let graph = MomentGraph {
        ring: PolyRing::coroot_ring(rs.rank),
        names,
        weights,
        lengths,
        edges,
        leq,
        direction: OrderDirection::Up,
        block: Some(BlockContext {
            rs: rs.clone(),
            group,
            lambda: lambda.clone(),
            reps: orbit.representatives,
        }),
    };
    Ok(graph)
}

/// GKM property: no two distinct edges at a common vertex carry the same
/// label line. Returns the offending (vertex, edge, edge) on failure.
pub fn gkm_check(g: &MomentGraph) -> Result<(), (usize, usize, usize)> {
    for v in 0..g.len() {
        let inc = g.incident_edges(v);
        for (a, &ea) in inc.iter().enumerate() {
            for &eb in inc.iter().skip(a + 1) {
                if g.edges[ea].label.same_line(&g.edges[eb].label) {
                    return Err((v, ea, eb));
                }
            }
        }
    }
    Ok(())
}
