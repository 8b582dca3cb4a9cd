//! End-to-end acceptance checks. Each test prints one summary line for
//! its criterion; run with `--nocapture` to see them all.

use momentsheaf::bmp::{bmp, verify_w0_pullback, BMPResult, DegreeBoundPolicy};
use momentsheaf::coxeter::{build_root_system, CartanType, Weight};
use momentsheaf::hecke::{kl_table, KLTable};
use momentsheaf::momentgraph::{gkm_check, MomentGraph, OrderDirection};
use momentsheaf::polyalg::q_int;
use momentsheaf::sheaf::{
    check_f_projective, sections_degree, structure_algebra, Sheaf,
};
use momentsheaf::verify::{report_json, run_suite, Suite};
use momentsheaf::zlattice::{
    compare_shifted, dualize, gamma, graded_free_check, localize, project_open,
    verify_hom_correspondence, verma_flag_check,
};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

type FamilyKey = (char, usize, OrderDirection);

struct Shared {
    graphs: HashMap<(char, usize), Arc<MomentGraph>>,
    tables: HashMap<(char, usize), Arc<KLTable>>,
    families: HashMap<FamilyKey, Arc<Vec<BMPResult>>>,
}

fn shared() -> &'static Mutex<Shared> {
    static SHARED: OnceLock<Mutex<Shared>> = OnceLock::new();
    SHARED.get_or_init(|| {
        Mutex::new(Shared {
            graphs: HashMap::new(),
            tables: HashMap::new(),
            families: HashMap::new(),
        })
    })
}

fn cartan(c: char) -> CartanType {
    match c {
        'A' => CartanType::A,
        'B' => CartanType::B,
        _ => unreachable!(),
    }
}

fn graph(c: char, rank: usize) -> Arc<MomentGraph> {
    let mut s = shared().lock().unwrap();
    s.graphs
        .entry((c, rank))
        .or_insert_with(|| {
            let rs = build_root_system(cartan(c), rank).unwrap();
            Arc::new(build_block_graph_regular(&rs, rank))
        })
        .clone()
}

fn build_block_graph_regular(
    rs: &momentsheaf::coxeter::RootSystemData,
    rank: usize,
) -> MomentGraph {
    momentsheaf::momentgraph::build_block_graph(rs, &Weight::new(vec![q_int(-2); rank])).unwrap()
}

fn table(c: char, rank: usize) -> Arc<KLTable> {
    let g = graph(c, rank);
    let mut s = shared().lock().unwrap();
    s.tables
        .entry((c, rank))
        .or_insert_with(|| Arc::new(kl_table(&g.block.as_ref().unwrap().group)))
        .clone()
}

fn family(c: char, rank: usize, dir: OrderDirection) -> Arc<Vec<BMPResult>> {
    let g = graph(c, rank);
    let t = table(c, rank);
    let mut s = shared().lock().unwrap();
    s.families
        .entry((c, rank, dir))
        .or_insert_with(|| {
            let policy = DegreeBoundPolicy::default();
            Arc::new(
                (0..g.len())
                    .map(|x| bmp(&g, dir, x, &policy, Some(&t)).unwrap())
                    .collect(),
            )
        })
        .clone()
}

fn report(n: u32, name: &str, ok: bool, detail: &str) {
    println!("criterion {n} ({name}): {}", if ok { "pass" } else { "fail" });
    assert!(ok, "criterion {n} ({name}) failed: {detail}");
}

#[test]
fn criterion_01_kl_multiplicities() {
    let mut ok = true;
    let mut detail = String::new();
    for (c, rank) in [('A', 1), ('A', 2), ('B', 2), ('A', 3)] {
        let g = graph(c, rank);
        let t = table(c, rank);
        let fam = family(c, rank, OrderDirection::Down);
        let block = g.block.as_ref().unwrap();
        for w in 0..g.len() {
            for x in 0..g.len() {
                let rank_bmp = fam[w].sheaf.stalks[x].rank() as i64;
                let expected = t.eval_at_one(block.reps[x], block.reps[w]);
                if rank_bmp != expected {
                    ok = false;
                    detail = format!(
                        "{c}{rank}: ({}, {}) rank {rank_bmp} vs {expected}",
                        g.names[x], g.names[w]
                    );
                }
            }
            if !fam[w].saturated() {
                ok = false;
                detail = format!("{c}{rank}: base {} unsaturated", g.names[w]);
            }
        }
    }
    report(1, "multiplicities match the polynomial oracle", ok, &detail);
}

#[test]
fn criterion_02_first_nontrivial_multiplicity() {
    let g = graph('A', 3);
    let fam = family('A', 3, OrderDirection::Down);
    let w = g.vertex_by_name("s2s1s3s2").unwrap();
    let e = g.vertex_by_name("e").unwrap();
    let shifts = fam[w].sheaf.stalks[e].shifts();
    let ok = fam[w].sheaf.stalks[e].rank() == 2 && shifts == [0, 2];
    report(2, "first rank-two stalk is graded 1 + q", ok, &format!("{shifts:?}"));
}

#[test]
fn criterion_03_longest_element_pullback() {
    let mut ok = true;
    let mut detail = String::new();
    let policy = DegreeBoundPolicy::default();
    for (c, rank) in [('A', 1), ('A', 2), ('B', 2)] {
        let g = graph(c, rank);
        let t = table(c, rank);
        let r = verify_w0_pullback(&g, &policy, Some(&t)).unwrap();
        for (name, good) in r {
            if !good {
                ok = false;
                detail = format!("{c}{rank}: base {name}");
            }
        }
    }
    report(3, "pullback along the longest element", ok, &detail);
}

#[test]
fn criterion_04_structure_algebra_subgeneric() {
    let g = graph('A', 1);
    let (dims, _) = structure_algebra(&g, 10);
    let expected = vec![(0, 1), (2, 2), (4, 2), (6, 2), (8, 2), (10, 2)];
    let ok = dims == expected;
    report(4, "rank-one structure algebra dimensions", ok, &format!("{dims:?}"));
}

#[test]
fn criterion_05_adjunction_and_open_images() {
    let mut ok = true;
    let mut detail = String::new();
    let policy = DegreeBoundPolicy::default();
    let cap = 12;
    for (c, rank) in [('A', 1), ('A', 2)] {
        let g = graph(c, rank);
        let fam = family(c, rank, OrderDirection::Up);
        let opens = g.open_subgraphs(OrderDirection::Up);
        for x in 0..g.len() {
            let m = gamma(&fam[x].sheaf, &policy).lattice;
            let loc = localize(&m, cap);
            let Some(back) = &loc.sheaf else {
                ok = false;
                detail = format!("{c}{rank}: localization of base {} not free", g.names[x]);
                continue;
            };
            let again = gamma(back, &policy).lattice;
            if m.generator_degrees() != again.generator_degrees() {
                ok = false;
                detail = format!("{c}{rank}: base {} section generators changed", g.names[x]);
            }
            for sel in &opens {
                if sel.vertices.is_empty() {
                    continue;
                }
                let projected = project_open(&m, sel, cap);
                let (dims, _) = graded_free_check(&projected, cap);
                for (d, dim) in dims {
                    if !(0..=cap).contains(&d) {
                        continue;
                    }
                    if dim != sections_degree(back, sel, d).len() {
                        ok = false;
                        detail = format!(
                            "{c}{rank}: base {} open {:?} degree {d}",
                            g.names[x], sel.vertices
                        );
                    }
                }
            }
        }
    }
    report(5, "section functor adjunction and open images", ok, &detail);
}

#[test]
fn criterion_06_f_projectivity() {
    let mut ok = true;
    let mut detail = String::new();
    let window = DegreeBoundPolicy::default().saturation_window;
    for (c, rank) in [('A', 1), ('A', 2), ('B', 2), ('A', 3)] {
        let g = graph(c, rank);
        for dir in [OrderDirection::Up, OrderDirection::Down] {
            let fam = family(c, rank, dir);
            for x in 0..g.len() {
                let r = &fam[x];
                let max_shift = r
                    .sheaf
                    .stalks
                    .iter()
                    .flat_map(|s| s.shifts().iter().copied())
                    .max()
                    .unwrap_or(0);
                let cap = max_shift + window;
                let rep = check_f_projective(&r.sheaf, dir, cap, Some(&r.gamma_generators));
                if !rep.passed() {
                    ok = false;
                    detail = format!("{c}{rank} {} base {}", dir.as_str(), g.names[x]);
                }
            }
        }
    }
    report(6, "every constructed sheaf is projective", ok, &detail);
}

#[test]
fn criterion_07_verma_flag_equivalence() {
    let mut ok = true;
    let mut detail = String::new();
    let policy = DegreeBoundPolicy::default();
    for (c, rank) in [('A', 1), ('A', 2)] {
        let g = graph(c, rank);
        let fam = family(c, rank, OrderDirection::Up);
        let cap = 2 * g.lengths.iter().copied().max().unwrap() as i64 + 4;
        for x in 0..g.len() {
            let m = gamma(&fam[x].sheaf, &policy).lattice;
            let r = verma_flag_check(&m, OrderDirection::Up, cap);
            if !(r.agreement && r.direct_free && r.criterion) {
                ok = false;
                detail = format!(
                    "{c}{rank} base {}: direct={} criterion={} agree={}",
                    g.names[x], r.direct_free, r.criterion, r.agreement
                );
            }
        }
    }
    report(7, "both flag criteria agree", ok, &detail);
}

#[test]
fn criterion_08_self_duality_shifts() {
    let mut ok = true;
    let mut detail = String::new();
    let policy = DegreeBoundPolicy::default();
    for (c, rank) in [('A', 1), ('A', 2)] {
        let g = graph(c, rank);
        let map = g.w0_relabel().unwrap();
        let up = family(c, rank, OrderDirection::Up);
        let down = family(c, rank, OrderDirection::Down);
        let mut fam_shifts = Vec::new();
        for x in 0..g.len() {
            let m = gamma(&up[x].sheaf, &policy).lattice;
            let dual = match dualize(&m) {
                Ok(d) => d,
                Err(e) => {
                    ok = false;
                    detail = format!("{c}{rank} base {}: {e}", g.names[x]);
                    continue;
                }
            };
            let Some(dual_sheaf) = localize(&dual, 4).sheaf else {
                ok = false;
                detail = format!("{c}{rank} base {}: dual not free", g.names[x]);
                continue;
            };
            match compare_shifted(&dual_sheaf, &down[map[x]].sheaf, Some(&map)).shift {
                Some(s) => fam_shifts.push((g.lengths[x] as i64, s)),
                None => {
                    ok = false;
                    detail = format!("{c}{rank} base {}: no shift match", g.names[x]);
                }
            }
        }
        if ok && fam_shifts.len() > 1 {
            let (l0, s0) = fam_shifts[0];
            let mut slope = None;
            for &(l, s) in &fam_shifts[1..] {
                if l == l0 {
                    continue;
                }
                if (s - s0) % (l - l0) != 0 {
                    ok = false;
                    detail = format!("{c}{rank}: non-affine family {fam_shifts:?}");
                    break;
                }
                let sl = (s - s0) / (l - l0);
                if *slope.get_or_insert(sl) != sl {
                    ok = false;
                    detail = format!("{c}{rank}: non-affine family {fam_shifts:?}");
                }
            }
            if let Some(sl) = slope {
                if sl.abs() != 2 {
                    ok = false;
                    detail = format!("{c}{rank}: slope {sl}");
                }
            }
        }
    }
    report(8, "self-duality shift family is affine of slope two", ok, &detail);
}

#[test]
fn criterion_09_hom_correspondence() {
    let mut ok = true;
    let mut detail = String::new();
    // all pairs in the rank-two block
    let g = graph('A', 2);
    let map = g.w0_relabel().unwrap();
    let up = family('A', 2, OrderDirection::Up);
    let down = family('A', 2, OrderDirection::Down);
    let cap = 2 * g.lengths.iter().copied().max().unwrap() as i64 + 4;
    for x in 0..g.len() {
        let mut shift_for_x = None;
        for y in 0..g.len() {
            let r = verify_hom_correspondence(&up[x].sheaf, y, &down[map[x]].sheaf, map[y], cap);
            match r.shift {
                Some(s) if !r.into_degrees.is_empty() => {
                    if *shift_for_x.get_or_insert(s) != s {
                        ok = false;
                        detail = format!("A2 ({}, {}): shift not uniform", g.names[x], g.names[y]);
                    }
                }
                Some(_) => {}
                None => {
                    ok = false;
                    detail = format!(
                        "A2 ({}, {}): {:?} vs {:?}",
                        g.names[x], g.names[y], r.into_degrees, r.from_degrees
                    );
                }
            }
        }
    }
    // spot pair in the rank-three block
    let g3 = graph('A', 3);
    let map3 = g3.w0_relabel().unwrap();
    let w = g3.vertex_by_name("s2s1s3s2").unwrap();
    let x3 = map3[w];
    let w0_vertex = (0..g3.len()).max_by_key(|&v| g3.lengths[v]).unwrap();
    let t3 = table('A', 3);
    let policy = DegreeBoundPolicy::default();
    let up3 = bmp(&g3, OrderDirection::Up, x3, &policy, Some(&t3)).unwrap();
    let fam3 = family('A', 3, OrderDirection::Down);
    let cap3 = 2 * g3.lengths.iter().copied().max().unwrap() as i64 + 4;
    let spot =
        verify_hom_correspondence(&up3.sheaf, w0_vertex, &fam3[w].sheaf, map3[w0_vertex], cap3);
    if spot.into_degrees.len() != 2 || spot.from_degrees.len() != 2 || spot.shift.is_none() {
        ok = false;
        detail = format!("A3 spot: {:?} vs {:?}", spot.into_degrees, spot.from_degrees);
    }
    report(9, "skyscraper morphism dimensions correspond", ok, &detail);
}

#[test]
fn criterion_10_negative_controls() {
    use momentsheaf::momentgraph::Edge;
    use momentsheaf::polyalg::{LinearForm, PolyRing};
    let mut ok = true;
    let mut detail = String::new();
    // proportional labels at one vertex must be rejected with a witness
    let ring = PolyRing::coroot_ring(2);
    let fixture = MomentGraph::handcrafted(
        ring,
        vec!["a".into(), "b".into(), "c".into()],
        vec![
            Edge { x: 0, y: 1, label: LinearForm::from_ints(vec![1, 0]).unwrap() },
            Edge { x: 0, y: 2, label: LinearForm::from_ints(vec![2, 0]).unwrap() },
        ],
        vec![
            vec![true, true, true],
            vec![false, true, false],
            vec![false, false, true],
        ],
    );
    match gkm_check(&fixture) {
        Ok(()) => {
            ok = false;
            detail = "double label fixture accepted".into();
        }
        Err((v, _, _)) => {
            if fixture.names[v] != "a" {
                ok = false;
                detail = format!("witness at wrong vertex {}", fixture.names[v]);
            }
        }
    }
    // a skyscraper below the top of the order is not projective
    let g = graph('A', 2);
    let e = g.vertex_by_name("e").unwrap();
    let sky = Sheaf::skyscraper(g.clone(), e, 0);
    if check_f_projective(&sky, OrderDirection::Up, 4, None).passed() {
        ok = false;
        detail = "non-maximal skyscraper passed projectivity".into();
    }
    // a zero degree bound must be reported as unsaturated
    let g3 = graph('A', 3);
    let t3 = table('A', 3);
    let w = g3.vertex_by_name("s2s1s3s2").unwrap();
    let mut truncated = DegreeBoundPolicy::default();
    truncated.fixed_bound = Some(0);
    let r = bmp(&g3, OrderDirection::Down, w, &truncated, Some(&t3)).unwrap();
    if r.saturated() {
        ok = false;
        detail = "truncated bound not flagged".into();
    }
    report(10, "negative controls are caught", ok, &detail);
}

#[test]
fn criterion_11_determinism() {
    let rs = build_root_system(CartanType::A, 2).unwrap();
    let make = || {
        let g = Arc::new(build_block_graph_regular(&rs, 2));
        let outcomes = run_suite(&g, Suite::All, &DegreeBoundPolicy::default()).unwrap();
        serde_json::to_string_pretty(&report_json(&outcomes)).unwrap()
    };
    let first = make();
    let second = make();
    let ok = first == second && first.contains("\"passed\": true");
    report(11, "repeated verification is byte-identical", ok, "runs differ");
}
