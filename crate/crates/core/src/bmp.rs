//! The Braden-MacPherson construction in either order direction: starting
//! from a free rank-1 stalk at the base vertex, walk a linear extension of
//! the working order, define edge modules on upward edges as the lower
//! stalk modulo the label, and take the minimal graded free cover of the
//! boundary image at each new vertex. A generating family for the global
//! sections is maintained incrementally (lifts of the old generators plus
//! the kernel generators at the new vertex), which keeps the boundary
//! image computable without solving global section systems from scratch.

use crate::hecke::{KLTable, QPoly};
use crate::momentgraph::{gkm_check, MomentGraph, OrderDirection};
use crate::polyalg::{
    image_complement, reduce_mod_linear, Polynomial, Q, RationalMatrix, RowSpace,
    TrackedRowSpace,
};
use crate::sheaf::{Generator, GradedFreeModule, PolyMatrix, SectionVector, Sheaf};
use num_traits::{One, Zero};
use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

#[derive(Debug, thiserror::Error)]
pub enum BmpError {
    #[error("graph fails the GKM property at vertex {0} (edges {1}, {2}); the construction is undefined")]
    Gkm(String, usize, usize),
}

/// Bounds for the degreewise scans of the construction.
#[derive(Debug, Clone)]
pub struct DegreeBoundPolicy {
    /// Overrides the default per-vertex bound of twice the length gap.
    pub fixed_bound: Option<i64>,
    /// Extra degrees scanned past the last new generator before a vertex
    /// counts as saturated.
    pub saturation_window: i64,
    /// Compare final stalk ranks against a Kazhdan-Lusztig table when one
    /// is supplied.
    pub oracle_crosscheck: bool,
    /// Walk an alternative linear extension of the working order (for
    /// independence tests).
    pub alt_linear_extension: bool,
}

impl Default for DegreeBoundPolicy {
    fn default() -> Self {
        DegreeBoundPolicy {
            fixed_bound: None,
            saturation_window: 4,
            oracle_crosscheck: true,
            alt_linear_extension: false,
        }
    }
}

impl DegreeBoundPolicy {
    pub fn per_vertex_bound(&self, delta_len: i64) -> i64 {
        self.fixed_bound.unwrap_or(2 * delta_len)
    }
}

#[derive(Debug, Clone)]
pub struct BmpDiagnostics {
    /// Stalk generator degrees per vertex name.
    pub generator_degrees: BTreeMap<String, Vec<i64>>,
    /// Vertices whose degree scan ended before the window past the last
    /// new generator.
    pub unsaturated: Vec<String>,
    pub oracle_checked: bool,
    /// Vertices where the stalk rank disagrees with the oracle.
    pub oracle_mismatches: Vec<String>,
}

pub struct BMPResult {
    pub sheaf: Sheaf,
    pub base: usize,
    pub direction: OrderDirection,
    /// Generating family of the global sections, built along the way.
    pub gamma_generators: Vec<Generator>,
    pub diagnostics: BmpDiagnostics,
}

impl BMPResult {
    pub fn saturated(&self) -> bool {
        self.diagnostics.unsaturated.is_empty()
    }

    pub fn oracle_ok(&self) -> bool {
        self.diagnostics.oracle_mismatches.is_empty()
    }
}

/// Coordinates of the boundary slice at one vertex: per downward edge,
/// per edge-module generator, a monomial avoiding that label's pivot.
struct BoundaryLayout {
    entries: Vec<(usize, usize, Vec<u32>)>,
    index: HashMap<(usize, usize, Vec<u32>), usize>,
}

impl BoundaryLayout {
    /// `shapes[p]` lists the generator degrees of the module at boundary
    /// position `p`, with that edge's pivot variable.
    fn new(graph: &MomentGraph, shapes: &[(Vec<i64>, usize)], d: i64) -> BoundaryLayout {
        let ring = &graph.ring;
        let mut entries = Vec::new();
        for (p, (shifts, piv)) in shapes.iter().enumerate() {
            for (k, &s) in shifts.iter().enumerate() {
                if d - s < 0 {
                    continue;
                }
                for m in ring.quotient_component_basis(d - s, *piv).unwrap() {
                    entries.push((p, k, m));
                }
            }
        }
        let index = entries.iter().enumerate().map(|(i, e)| (e.clone(), i)).collect();
        BoundaryLayout { entries, index }
    }

    fn dim(&self) -> usize {
        self.entries.len()
    }

    fn coords(&self, tuple: &[Vec<Polynomial>]) -> Vec<Q> {
        let mut out = vec![Q::zero(); self.entries.len()];
        for (p, comp) in tuple.iter().enumerate() {
            for (k, poly) in comp.iter().enumerate() {
                for (exp, c) in poly.terms() {
                    if let Some(&i) = self.index.get(&(p, k, exp.clone())) {
                        out[i] = c.clone();
                    }
                }
            }
        }
        out
    }

    fn tuple(&self, shapes: &[(Vec<i64>, usize)], coords: &[Q]) -> Vec<Vec<Polynomial>> {
        let mut out: Vec<Vec<Polynomial>> = shapes
            .iter()
            .map(|(shifts, _)| vec![Polynomial::zero(); shifts.len()])
            .collect();
        for (i, (p, k, m)) in self.entries.iter().enumerate() {
            if !coords[i].is_zero() {
                out[*p][*k].add_term(m.clone(), coords[i].clone());
            }
        }
        out
    }
}

/// Scale a boundary tuple by a monomial, reducing per edge label.
fn scale_tuple(
    graph: &MomentGraph,
    labels: &[usize],
    tuple: &[Vec<Polynomial>],
    mono: &[u32],
) -> Vec<Vec<Polynomial>> {
    tuple
        .iter()
        .zip(labels.iter())
        .map(|(comp, &e)| {
            let label = &graph.edges[e].label;
            comp.iter()
                .map(|p| reduce_mod_linear(&p.mul_monomial(mono), label))
                .collect()
        })
        .collect()
}

/// Construct the BMP sheaf based at `base` in the direction-adjusted
/// order of the graph. An optional KL table enables the oracle
/// cross-check of final stalk ranks.
pub fn bmp(
    graph: &Arc<MomentGraph>,
    dir: OrderDirection,
    base: usize,
    policy: &DegreeBoundPolicy,
    oracle: Option<&KLTable>,
) -> Result<BMPResult, BmpError> {
    if let Err((v, a, b)) = gkm_check(graph) {
        return Err(BmpError::Gkm(graph.names[v].clone(), a, b));
    }
    let ring = &graph.ring;
    let nvars = ring.rank();
    let n = graph.len();
    let leq = |a: usize, b: usize| graph.leq_dir(dir, a, b);

    let mut stalks = vec![GradedFreeModule::zero(); n];
    let mut edge_modules = vec![GradedFreeModule::zero(); graph.edges.len()];
    let mut restrictions: Vec<(PolyMatrix, PolyMatrix)> = graph
        .edges
        .iter()
        .map(|_| (PolyMatrix::zero(0, 0), PolyMatrix::zero(0, 0)))
        .collect();
    stalks[base] = GradedFreeModule::free(0);

    // global section generators over the processed part
    let mut gens: Vec<Generator> = vec![Generator {
        degree: 0,
        section: {
            let mut comps = vec![vec![]; n];
            comps[base] = vec![Polynomial::one(nvars)];
            SectionVector { comps }
        },
    }];

    let mut unsaturated = Vec::new();
    let mut generator_degrees = BTreeMap::new();
    generator_degrees.insert(graph.names[base].clone(), vec![0]);

    // linear extension of the working order over the support
    let mut support: Vec<usize> = (0..n).filter(|&v| leq(base, v) && v != base).collect();
    let below_count: Vec<usize> =
        (0..n).map(|v| (0..n).filter(|&u| u != v && leq(u, v)).count()).collect();
    support.sort_by_key(|&v| {
        let name = if policy.alt_linear_extension {
            graph.names[v].chars().rev().collect::<String>()
        } else {
            graph.names[v].clone()
        };
        (below_count[v], name)
    });

    for &y in &support {
        // downward edges with a live module; fix their boundary order
        let mut dedges: Vec<usize> = graph
            .edges
            .iter()
            .enumerate()
            .filter(|(_, e)| e.touches(y) && leq(e.other(y), y) && !stalks[e.other(y)].is_zero())
            .map(|(i, _)| i)
            .collect();
        dedges.sort();
        // edge modules on those edges: lower stalk modulo the label
        for &e in &dedges {
            let z = graph.edges[e].other(y);
            edge_modules[e] = stalks[z].clone();
            let idm = PolyMatrix::identity(stalks[z].rank(), nvars);
            if graph.edges[e].x == z {
                restrictions[e].0 = idm;
            } else {
                restrictions[e].1 = idm;
            }
        }
        let shapes: Vec<(Vec<i64>, usize)> = dedges
            .iter()
            .map(|&e| (edge_modules[e].shifts().to_vec(), graph.edges[e].label.pivot()))
            .collect();
        // reduced boundary values of the current generators
        let theta: Vec<Vec<Vec<Polynomial>>> = gens
            .iter()
            .map(|g| {
                dedges
                    .iter()
                    .map(|&e| {
                        let z = graph.edges[e].other(y);
                        let label = &graph.edges[e].label;
                        g.section.comps[z]
                            .iter()
                            .map(|p| reduce_mod_linear(p, label))
                            .collect::<Vec<_>>()
                    })
                    .collect()
            })
            .collect();

        let delta_len = (graph.lengths[y] as i64 - graph.lengths[base] as i64).abs();
        let bound = policy.per_vertex_bound(delta_len).max(0);
        let scan_max = bound + policy.saturation_window;

        // boundary image per degree, with new stalk generators as the
        // complement of the variable multiples of the previous degree
        let mut new_gen_info: Vec<(i64, Vec<Vec<Polynomial>>)> = Vec::new();
        let mut prev_image: Vec<Vec<Vec<Polynomial>>> = Vec::new();
        let mut last_new = -1i64;
        let mut scanned = -1i64;
        let mut d = 0;
        while d <= scan_max {
            let layout = BoundaryLayout::new(graph, &shapes, d);
            scanned = d;
            if layout.dim() == 0 {
                prev_image = Vec::new();
                if last_new >= 0 && d - last_new >= policy.saturation_window {
                    break;
                }
                d += 2;
                continue;
            }
            let mut span_rows: Vec<Vec<Q>> = Vec::new();
            let mut span = RowSpace::new(layout.dim());
            for (g, th) in gens.iter().zip(theta.iter()) {
                if g.degree > d || (d - g.degree) % 2 != 0 {
                    continue;
                }
                for m in ring.graded_component_basis(d - g.degree).unwrap() {
                    let c = layout.coords(&scale_tuple(graph, &dedges, th, &m));
                    if span.insert(c.clone()) {
                        span_rows.push(c);
                    }
                }
            }
            let mut sub_rows: Vec<Vec<Q>> = Vec::new();
            for t in &prev_image {
                for var in 0..nvars {
                    let mut exp = vec![0u32; nvars];
                    exp[var] = 1;
                    sub_rows.push(layout.coords(&scale_tuple(graph, &dedges, t, &exp)));
                }
            }
            let fresh = image_complement(&span_rows, &sub_rows, layout.dim())
                .expect("variable multiples stay in the boundary image");
            for v in &fresh {
                new_gen_info.push((d, layout.tuple(&shapes, v)));
                last_new = d;
            }
            prev_image = span_rows.iter().map(|v| layout.tuple(&shapes, v)).collect();
            if last_new >= 0 && d - last_new >= policy.saturation_window && d >= bound {
                break;
            }
            d += 2;
        }
        if last_new >= 0 && scanned - last_new < policy.saturation_window {
            unsaturated.push(graph.names[y].clone());
        }

        let shifts: Vec<i64> = new_gen_info.iter().map(|(d, _)| *d).collect();
        generator_degrees.insert(graph.names[y].clone(), shifts.clone());
        stalks[y] = GradedFreeModule::new(shifts);
        // restriction from y: generator j maps to its boundary value
        for (p, &e) in dedges.iter().enumerate() {
            let mrows = edge_modules[e].rank();
            let mut m = PolyMatrix::zero(mrows, new_gen_info.len());
            for (j, (_, tuple)) in new_gen_info.iter().enumerate() {
                for (k, poly) in tuple[p].iter().enumerate() {
                    m.set_entry(k, j, poly.clone());
                }
            }
            if graph.edges[e].x == y {
                restrictions[e].0 = m;
            } else {
                restrictions[e].1 = m;
            }
        }

        // update the generating family: lift every old generator through
        // the new stalk, then add the kernel generators at y
        let stalk_y = stalks[y].clone();
        let mut solver_cache: HashMap<i64, (TrackedRowSpace, Vec<(usize, Vec<u32>)>)> =
            HashMap::new();
        let solver = |d: i64| -> (TrackedRowSpace, Vec<(usize, Vec<u32>)>) {
            let layout = BoundaryLayout::new(graph, &shapes, d);
            let basis = stalk_y.basis(ring, d);
            let mut tracked = TrackedRowSpace::new(layout.dim().max(1));
            for (j, m) in &basis {
                let tuple = scale_tuple(graph, &dedges, &{
                    new_gen_info[*j]
                        .1
                        .clone()
                }, m);
                let mut c = layout.coords(&tuple);
                if c.is_empty() {
                    c = vec![Q::zero()];
                }
                tracked.insert(c);
            }
            (tracked, basis)
        };
        for (gi, g) in gens.iter_mut().enumerate() {
            let dg = g.degree;
            let entry = solver_cache.entry(dg).or_insert_with(|| solver(dg));
            let (tracked, basis) = entry;
            let layout = BoundaryLayout::new(graph, &shapes, dg);
            let mut target = layout.coords(&theta[gi]);
            if target.is_empty() {
                target = vec![Q::zero()];
            }
            let combo = tracked
                .express(&target)
                .expect("boundary of a section lies in the image of the new stalk");
            let mut comp = vec![Polynomial::zero(); stalk_y.rank()];
            for (c, (j, m)) in combo.iter().zip(basis.iter()) {
                if !c.is_zero() {
                    comp[*j].add_term(m.clone(), c.clone());
                }
            }
            g.section.comps[y] = comp;
        }
        // kernel of the restriction out of y, degreewise minimal
        let mut prev_kernel: Vec<Vec<Polynomial>> = Vec::new();
        let mut d = 0;
        let mut last_new = -1i64;
        let mut scanned = -1i64;
        while d <= scan_max {
            scanned = d;
            let basis = stalk_y.basis(ring, d);
            if basis.is_empty() {
                d += 2;
                continue;
            }
            let layout = BoundaryLayout::new(graph, &shapes, d);
            let mut rows = vec![vec![Q::zero(); basis.len()]; layout.dim()];
            for (col, (j, m)) in basis.iter().enumerate() {
                let tuple = scale_tuple(graph, &dedges, &new_gen_info[*j].1, m);
                for (row, c) in layout.coords(&tuple).into_iter().enumerate() {
                    rows[row][col] = c;
                }
            }
            let kernel = if rows.is_empty() {
                (0..basis.len())
                    .map(|i| {
                        let mut v = vec![Q::zero(); basis.len()];
                        v[i] = Q::one();
                        v
                    })
                    .collect::<Vec<_>>()
            } else {
                RationalMatrix::from_rows(rows, basis.len()).kernel_basis()
            };
            let bindex: HashMap<(usize, Vec<u32>), usize> = basis
                .iter()
                .enumerate()
                .map(|(i, (k, m))| ((*k, m.clone()), i))
                .collect();
            let mut prev = RowSpace::new(basis.len());
            for t in &prev_kernel {
                for var in 0..nvars {
                    let mut exp = vec![0u32; nvars];
                    exp[var] = 1;
                    let scaled: Vec<Polynomial> =
                        t.iter().map(|p| p.mul_monomial(&exp)).collect();
                    let mut c = vec![Q::zero(); basis.len()];
                    for (k, p) in scaled.iter().enumerate() {
                        for (exp2, cc) in p.terms() {
                            c[bindex[&(k, exp2.clone())]] = cc.clone();
                        }
                    }
                    prev.insert(c);
                }
            }
            let mut next_prev = Vec::new();
            for v in &kernel {
                let mut comp = vec![Polynomial::zero(); stalk_y.rank()];
                for (i, (k, m)) in basis.iter().enumerate() {
                    if !v[i].is_zero() {
                        comp[*k].add_term(m.clone(), v[i].clone());
                    }
                }
                if prev.insert(v.clone()) {
                    let mut comps = vec![vec![]; n];
                    for (v2, st) in stalks.iter().enumerate() {
                        comps[v2] = vec![Polynomial::zero(); st.rank()];
                    }
                    comps[y] = comp.clone();
                    gens.push(Generator { degree: d, section: SectionVector { comps } });
                    last_new = d;
                }
                next_prev.push(comp);
            }
            prev_kernel = next_prev;
            if last_new >= 0 && d - last_new >= policy.saturation_window && d >= bound {
                break;
            }
            d += 2;
        }
        if last_new >= 0 && scanned - last_new < policy.saturation_window {
            let name = graph.names[y].clone();
            if !unsaturated.contains(&name) {
                unsaturated.push(name);
            }
        }
        // resize all sections to the final stalk ranks seen so far
        for g in gens.iter_mut() {
            if g.section.comps[y].len() != stalks[y].rank() {
                g.section.comps[y].resize(stalks[y].rank(), Polynomial::zero());
            }
        }
    }

    // normalize empty components on zero stalks
    for g in gens.iter_mut() {
        for (v, st) in stalks.iter().enumerate() {
            g.section.comps[v].resize(st.rank(), Polynomial::zero());
        }
    }
    for (e, edge) in graph.edges.iter().enumerate() {
        if edge_modules[e].is_zero() {
            restrictions[e].0 = PolyMatrix::zero(0, stalks[edge.x].rank());
            restrictions[e].1 = PolyMatrix::zero(0, stalks[edge.y].rank());
        }
    }

    let sheaf = Sheaf {
        graph: graph.clone(),
        stalks,
        edge_modules,
        restrictions,
    };
    let mut oracle_mismatches = Vec::new();
    let mut oracle_checked = false;
    if policy.oracle_crosscheck {
        if let (Some(table), Some(block)) = (oracle, graph.block.as_ref()) {
            oracle_checked = true;
            let group = &block.group;
            let w0 = group.longest_element();
            for v in 0..n {
                let expected = match dir {
                    OrderDirection::Down => table.eval_at_one(block.reps[v], block.reps[base]),
                    OrderDirection::Up => table.eval_at_one(
                        group.mult(w0, block.reps[v]),
                        group.mult(w0, block.reps[base]),
                    ),
                };
                if sheaf.stalks[v].rank() as i64 != expected {
                    oracle_mismatches.push(graph.names[v].clone());
                }
            }
        }
    }
    Ok(BMPResult {
        sheaf,
        base,
        direction: dir,
        gamma_generators: gens,
        diagnostics: BmpDiagnostics {
            generator_degrees,
            unsaturated,
            oracle_checked,
            oracle_mismatches,
        },
    })
}

/// Multiplicity data for every pair (base, vertex): ungraded rank and
/// graded stalk shifts.
pub struct MultiplicityTable {
    pub direction: OrderDirection,
    pub names: Vec<String>,
    /// `entries[w][x]` = (rank, shifts) of the sheaf based at `w`.
    pub entries: Vec<Vec<(usize, Vec<i64>)>>,
    pub all_saturated: bool,
    pub all_oracle_ok: bool,
}

impl MultiplicityTable {
    pub fn rank_poly(&self, w: usize, x: usize) -> QPoly {
        let mut coeffs = Vec::new();
        for &s in &self.entries[w][x].1 {
            let k = (s / 2) as usize;
            if coeffs.len() <= k {
                coeffs.resize(k + 1, 0);
            }
            coeffs[k] += 1;
        }
        QPoly::from_coeffs(coeffs)
    }
}

pub fn multiplicity_table(
    graph: &Arc<MomentGraph>,
    dir: OrderDirection,
    policy: &DegreeBoundPolicy,
    oracle: Option<&KLTable>,
) -> Result<MultiplicityTable, BmpError> {
    let mut entries = Vec::new();
    let mut all_saturated = true;
    let mut all_oracle_ok = true;
    for w in 0..graph.len() {
        let result = bmp(graph, dir, w, policy, oracle)?;
        all_saturated &= result.saturated();
        all_oracle_ok &= result.oracle_ok();
        entries.push(
            (0..graph.len())
                .map(|x| {
                    (
                        result.sheaf.stalks[x].rank(),
                        result.sheaf.stalks[x].shifts().to_vec(),
                    )
                })
                .collect(),
        );
    }
    Ok(MultiplicityTable {
        direction: dir,
        names: graph.names.clone(),
        entries,
        all_saturated,
        all_oracle_ok,
    })
}

/// Check that relabeling the up-sheaf based at `w0 x` along the longest
/// element reproduces the down-sheaf based at `x`, for every `x`:
/// identical stalk and edge-module shift multisets.
pub fn verify_w0_pullback(
    graph: &Arc<MomentGraph>,
    policy: &DegreeBoundPolicy,
    oracle: Option<&KLTable>,
) -> Result<Vec<(String, bool)>, BmpError> {
    let map = graph.w0_relabel().expect("block graph with context");
    let mut out = Vec::new();
    for x in 0..graph.len() {
        let down = bmp(graph, OrderDirection::Down, x, policy, oracle)?;
        let up = bmp(graph, OrderDirection::Up, map[x], policy, oracle)?;
        let mut ok = true;
        for v in 0..graph.len() {
            if down.sheaf.stalks[v] != up.sheaf.stalks[map[v]] {
                ok = false;
            }
        }
        for (e, edge) in graph.edges.iter().enumerate() {
            let image = graph
                .edges
                .iter()
                .position(|f| {
                    (f.x == map[edge.x] && f.y == map[edge.y])
                        || (f.x == map[edge.y] && f.y == map[edge.x])
                })
                .expect("image edge");
            if down.sheaf.edge_modules[e] != up.sheaf.edge_modules[image] {
                ok = false;
            }
        }
        out.push((graph.names[x].clone(), ok));
    }
    Ok(out)
}
