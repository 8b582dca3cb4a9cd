//! Root systems, Weyl groups, Bruhat order, the rho-shifted dot action,
//! integral Weyl groups, orbits and coset representatives.
//!
//! Weights live in the fundamental-weight basis with exact rational
//! coordinates, so `<lambda, coroot_i>` is a coordinate read-off. Coroots
//! are stored in simple-coroot coordinates, which are also the variables of
//! the polynomial ring `S = S(h)` used by the sheaf machinery.

use crate::polyalg::{q_int, Q};
use num_traits::{One, Signed, Zero};
use std::collections::HashMap;
use std::fmt;

/// Largest Weyl group the generator will enumerate.
pub const WEYL_CAP: usize = 1152;

#[derive(Debug, thiserror::Error)]
pub enum CoxeterError {
    #[error("unsupported Cartan type/rank: {0}{1}")]
    Unsupported(String, usize),
    #[error("Weyl group cap exceeded: more than {0} elements")]
    CapExceeded(usize),
    #[error("weight is not antidominant for its integral system; replace it by the antidominant representative of its dot-orbit")]
    NotAntidominant,
    #[error("weight has wrong number of coordinates: expected {expected}, got {got}")]
    BadWeight { expected: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CartanType {
    A,
    B,
    C,
    D,
    G2,
}

impl fmt::Display for CartanType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CartanType::A => write!(f, "A"),
            CartanType::B => write!(f, "B"),
            CartanType::C => write!(f, "C"),
            CartanType::D => write!(f, "D"),
            CartanType::G2 => write!(f, "G"),
        }
    }
}

impl CartanType {
    pub fn parse(s: &str) -> Option<CartanType> {
        match s {
            "A" | "a" => Some(CartanType::A),
            "B" | "b" => Some(CartanType::B),
            "C" | "c" => Some(CartanType::C),
            "D" | "d" => Some(CartanType::D),
            "G" | "g" | "G2" | "g2" => Some(CartanType::G2),
            _ => None,
        }
    }
}

/// A weight in fundamental-weight coordinates: `coords[i] = <w, coroot_i>`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Weight {
    pub coords: Vec<Q>,
}

impl Weight {
    pub fn new(coords: Vec<Q>) -> Self {
        Weight { coords }
    }

    pub fn zero(rank: usize) -> Self {
        Weight { coords: vec![Q::zero(); rank] }
    }

    pub fn add(&self, other: &Weight) -> Weight {
        Weight::new(self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Weight) -> Weight {
        Weight::new(self.coords.iter().zip(&other.coords).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, c: &Q) -> Weight {
        Weight::new(self.coords.iter().map(|a| a * c).collect())
    }

    pub fn render(&self) -> String {
        let parts: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        format!("({})", parts.join(","))
    }
}

/// A root together with its coroot. `weight_coords` expresses the root in
/// the fundamental-weight basis; `coroot` is in simple-coroot coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Root {
    pub weight_coords: Vec<i64>,
    pub coroot: Vec<i64>,
}

impl Root {
    pub fn negated(&self) -> Root {
        Root {
            weight_coords: self.weight_coords.iter().map(|c| -c).collect(),
            coroot: self.coroot.iter().map(|c| -c).collect(),
        }
    }

    /// `<lambda, coroot>` for a weight in fundamental coordinates.
    pub fn pair(&self, w: &Weight) -> Q {
        let mut acc = Q::zero();
        for (c, x) in self.coroot.iter().zip(&w.coords) {
            acc += x * q_int(*c);
        }
        acc
    }

    pub fn as_weight(&self) -> Weight {
        Weight::new(self.weight_coords.iter().map(|&c| q_int(c)).collect())
    }
}

/// Complete root system data for a supported Cartan type.
#[derive(Debug, Clone)]
pub struct RootSystemData {
    pub cartan_type: CartanType,
    pub rank: usize,
    /// `cartan[i][j] = <alpha_j, coroot_i>`.
    pub cartan: Vec<Vec<i64>>,
    pub positive_roots: Vec<Root>,
    /// Half-sum of positive roots; `(1, ..., 1)` in fundamental coordinates.
    pub rho: Weight,
}

pub fn build_root_system(ty: CartanType, rank: usize) -> Result<RootSystemData, CoxeterError> {
    let ok = match ty {
        CartanType::A => (1..=4).contains(&rank),
        CartanType::B | CartanType::C => (2..=4).contains(&rank),
        CartanType::D => (3..=4).contains(&rank),
        CartanType::G2 => rank == 2,
    };
    if !ok {
        return Err(CoxeterError::Unsupported(ty.to_string(), rank));
    }
    let n = rank;
    let mut cartan = vec![vec![0i64; n]; n];
    for (i, row) in cartan.iter_mut().enumerate() {
        row[i] = 2;
    }
    let link = |c: &mut Vec<Vec<i64>>, i: usize, j: usize| {
        c[i][j] = -1;
        c[j][i] = -1;
    };
    match ty {
        CartanType::A => {
            for i in 0..n - 1 {
                link(&mut cartan, i, i + 1);
            }
        }
        CartanType::B => {
            for i in 0..n - 1 {
                link(&mut cartan, i, i + 1);
            }
            // last simple root short: <alpha_{n-2}, coroot_{n-1}> = -2
            cartan[n - 1][n - 2] = -2;
        }
        CartanType::C => {
            for i in 0..n - 1 {
                link(&mut cartan, i, i + 1);
            }
            cartan[n - 2][n - 1] = -2;
        }
        CartanType::D => {
            for i in 0..n - 2 {
                link(&mut cartan, i, i + 1);
            }
            link(&mut cartan, n - 3, n - 1);
            cartan[n - 2][n - 1] = 0;
            cartan[n - 1][n - 2] = 0;
            if n >= 4 {
                // chain stops at the fork node n-3
                cartan[n - 2][n - 3] = -1;
                cartan[n - 3][n - 2] = -1;
            }
        }
        CartanType::G2 => {
            cartan[0][1] = -1;
            cartan[1][0] = -3;
        }
    }
    // simple roots: weight coords of alpha_j are the j-th column of cartan
    let mut simple = Vec::new();
    for j in 0..n {
        let mut coroot = vec![0i64; n];
        coroot[j] = 1;
        simple.push(Root {
            weight_coords: (0..n).map(|i| cartan[i][j]).collect(),
            coroot,
        });
    }
    // close the simple roots under simple reflections
    let mut all: Vec<Root> = simple.clone();
    let mut seen: HashMap<Vec<i64>, usize> = all
        .iter()
        .enumerate()
        .map(|(k, r)| (r.weight_coords.clone(), k))
        .collect();
    let mut frontier: Vec<Root> = simple.clone();
    while let Some(r) = frontier.pop() {
        for i in 0..n {
            let img = reflect_root(&cartan, i, &r);
            if !seen.contains_key(&img.weight_coords) {
                seen.insert(img.weight_coords.clone(), all.len());
                all.push(img.clone());
                frontier.push(img);
            }
        }
    }
    // positivity: expand in simple roots and keep the nonnegative ones
    let mut positive = Vec::new();
    for r in &all {
        if let Some(m) = expand_in_simple(&cartan, &r.weight_coords) {
            if m.iter().all(|c| *c >= Q::zero()) {
                positive.push(r.clone());
            }
        }
    }
    positive.sort_by_key(|r| (r.weight_coords.iter().map(|c| c.abs()).sum::<i64>(), r.weight_coords.clone()));
    let expected = match ty {
        CartanType::A => n * (n + 1) / 2,
        CartanType::B | CartanType::C => n * n,
        CartanType::D => n * (n - 1),
        CartanType::G2 => 6,
    };
    assert_eq!(positive.len(), expected, "positive root count for {ty}{n}");
    Ok(RootSystemData {
        cartan_type: ty,
        rank: n,
        cartan,
        positive_roots: positive,
        rho: Weight::new(vec![q_int(1); n]),
    })
}

/// Apply the simple reflection `s_i` to a root (both coordinates).
fn reflect_root(cartan: &[Vec<i64>], i: usize, r: &Root) -> Root {
    // weight side: s_i(v) = v - v_i * alpha_i
    let vi = r.weight_coords[i];
    let weight_coords = (0..cartan.len())
        .map(|k| r.weight_coords[k] - vi * cartan[k][i])
        .collect();
    // coroot side: s_i(cv) = cv - <alpha_i, cv> * coroot_i, with
    // <alpha_i, sum c_j coroot_j> = sum c_j cartan[j][i]
    let pair: i64 = r.coroot.iter().enumerate().map(|(j, c)| c * cartan[j][i]).sum();
    let coroot = (0..cartan.len())
        .map(|k| r.coroot[k] - if k == i { pair } else { 0 })
        .collect();
    Root { weight_coords, coroot }
}

/// Solve `delta = C * m` for the simple-root coefficients `m`.
fn expand_in_simple(cartan: &[Vec<i64>], delta_coords: &[i64]) -> Option<Vec<Q>> {
    expand_in_simple_q(cartan, &delta_coords.iter().map(|&c| q_int(c)).collect::<Vec<_>>())
}

fn expand_in_simple_q(cartan: &[Vec<i64>], delta: &[Q]) -> Option<Vec<Q>> {
    let n = cartan.len();
    let mut a: Vec<Vec<Q>> = (0..n)
        .map(|i| {
            let mut row: Vec<Q> = cartan[i].iter().map(|&c| q_int(c)).collect();
            row.push(delta[i].clone());
            row
        })
        .collect();
    // Gaussian elimination, n <= 4
    let mut row = 0;
    for col in 0..n {
        let Some(p) = (row..n).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(row, p);
        let inv = a[row][col].recip();
        for j in col..=n {
            a[row][j] = &a[row][j] * &inv;
        }
        for r in 0..n {
            if r != row && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for j in col..=n {
                    let t = &a[row][j] * &f;
                    a[r][j] -= t;
                }
            }
        }
        row += 1;
    }
    // Cartan matrices are invertible, so row == n
    let mut m = vec![Q::zero(); n];
    let mut r = 0;
    for col in 0..n {
        if r < n && a[r][col] == q_int(1) {
            m[col] = a[r][n].clone();
            r += 1;
        }
    }
    Some(m)
}

/// True iff `nu - mu` is a nonnegative-integer combination of simple roots.
pub fn weight_leq(rs: &RootSystemData, mu: &Weight, nu: &Weight) -> bool {
    let delta: Vec<Q> = nu.coords.iter().zip(&mu.coords).map(|(a, b)| a - b).collect();
    match expand_in_simple_q(&rs.cartan, &delta) {
        Some(m) => m.iter().all(|c| c.denom().is_one() && !c.is_negative()),
        None => false,
    }
}

/// One Weyl group element: an exact integer matrix on weight coordinates
/// plus a reduced word in the generators of the group it belongs to.
#[derive(Debug, Clone)]
pub struct WeylElement {
    /// Row-major `n x n` matrix acting on fundamental-weight coordinates.
    pub matrix: Vec<i64>,
    pub word: Vec<usize>,
}

impl WeylElement {
    pub fn length(&self) -> usize {
        self.word.len()
    }

    pub fn apply(&self, n: usize, w: &Weight) -> Weight {
        let mut out = vec![Q::zero(); n];
        for i in 0..n {
            for j in 0..n {
                let m = self.matrix[i * n + j];
                if m != 0 {
                    out[i] += &w.coords[j] * q_int(m);
                }
            }
        }
        Weight::new(out)
    }

    pub fn word_name(&self) -> String {
        if self.word.is_empty() {
            "e".to_string()
        } else {
            self.word.iter().map(|i| format!("s{}", i + 1)).collect()
        }
    }
}

/// A finite reflection group generated by the simple reflections of a
/// (sub)system of positive roots, with Bruhat order and reduced words.
#[derive(Debug, Clone)]
pub struct CoxeterGroup {
    pub ambient_rank: usize,
    /// Positive roots of the (sub)system this group reflects.
    pub positive_roots: Vec<Root>,
    /// Indices into `positive_roots` of the simple system.
    pub simple_indices: Vec<usize>,
    pub elements: Vec<WeylElement>,
    index: HashMap<Vec<i64>, usize>,
    /// `leq[x][w]` is Bruhat `x <= w`.
    leq: Vec<Vec<bool>>,
    longest: usize,
}

fn identity_matrix(n: usize) -> Vec<i64> {
    let mut m = vec![0i64; n * n];
    for i in 0..n {
        m[i * n + i] = 1;
    }
    m
}

fn mat_mul(n: usize, a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut out = vec![0i64; n * n];
    for i in 0..n {
        for k in 0..n {
            let av = a[i * n + k];
            if av == 0 {
                continue;
            }
            for j in 0..n {
                out[i * n + j] += av * b[k * n + j];
            }
        }
    }
    out
}

/// Matrix of the reflection in `root` acting on weight coordinates:
/// `s(v) = v - <v, coroot> * root`.
pub fn reflection_matrix(n: usize, root: &Root) -> Vec<i64> {
    let mut m = identity_matrix(n);
    for i in 0..n {
        for j in 0..n {
            m[i * n + j] -= root.weight_coords[i] * root.coroot[j];
        }
    }
    m
}

impl CoxeterGroup {
    /// Generate the group of a full root system.
    pub fn full(rs: &RootSystemData) -> Result<CoxeterGroup, CoxeterError> {
        CoxeterGroup::from_positive_roots(rs.rank, rs.positive_roots.clone())
    }

    /// Generate the reflection group of a set of positive roots (assumed
    /// closed: the positive span of an honest subsystem, e.g. integral
    /// roots of a weight).
    pub fn from_positive_roots(ambient_rank: usize, positive_roots: Vec<Root>) -> Result<CoxeterGroup, CoxeterError> {
        let n = ambient_rank;
        // simple system: positive roots that are not sums of two others
        let weight_set: std::collections::HashSet<Vec<i64>> =
            positive_roots.iter().map(|r| r.weight_coords.clone()).collect();
        let mut simple_indices = Vec::new();
        for (k, r) in positive_roots.iter().enumerate() {
            let mut decomposable = false;
            for a in &positive_roots {
                let diff: Vec<i64> = r
                    .weight_coords
                    .iter()
                    .zip(&a.weight_coords)
                    .map(|(x, y)| x - y)
                    .collect();
                if diff != vec![0; n] && weight_set.contains(&diff) {
                    decomposable = true;
                    break;
                }
            }
            if !decomposable {
                simple_indices.push(k);
            }
        }
        // label generators deterministically; for a full system this puts
        // the simple roots in Bourbaki order (coroot e_1 before e_2 ...)
        simple_indices.sort_by(|&a, &b| positive_roots[b].coroot.cmp(&positive_roots[a].coroot));
        let gens: Vec<Vec<i64>> = simple_indices
            .iter()
            .map(|&k| reflection_matrix(n, &positive_roots[k]))
            .collect();
        // breadth-first by word length; first (lex-least) word wins
        let mut elements = vec![WeylElement { matrix: identity_matrix(n), word: vec![] }];
        let mut index: HashMap<Vec<i64>, usize> = HashMap::new();
        index.insert(elements[0].matrix.clone(), 0);
        let mut level: Vec<usize> = vec![0];
        while !level.is_empty() {
            let mut next = Vec::new();
            for &ei in &level {
                for (g, gm) in gens.iter().enumerate() {
                    let m = mat_mul(n, &elements[ei].matrix, gm);
                    if !index.contains_key(&m) {
                        let mut word = elements[ei].word.clone();
                        word.push(g);
                        index.insert(m.clone(), elements.len());
                        next.push(elements.len());
                        elements.push(WeylElement { matrix: m, word });
                        if elements.len() > WEYL_CAP {
                            return Err(CoxeterError::CapExceeded(WEYL_CAP));
                        }
                    }
                }
            }
            level = next;
        }
        let mut group = CoxeterGroup {
            ambient_rank: n,
            positive_roots,
            simple_indices,
            elements,
            index,
            leq: Vec::new(),
            longest: 0,
        };
        group.check_lengths();
        group.compute_bruhat();
        group.longest = (0..group.len())
            .max_by_key(|&i| group.elements[i].length())
            .unwrap();
        debug_assert_eq!(
            group.mult(group.longest, group.longest),
            0,
            "longest element must be an involution"
        );
        Ok(group)
    }

    fn check_lengths(&self) {
        let neg_set: std::collections::HashSet<Vec<i64>> = self
            .positive_roots
            .iter()
            .map(|r| r.negated().weight_coords)
            .collect();
        for e in &self.elements {
            let inv = self
                .positive_roots
                .iter()
                .filter(|r| {
                    let img: Vec<i64> = (0..self.ambient_rank)
                        .map(|i| {
                            (0..self.ambient_rank)
                                .map(|j| e.matrix[i * self.ambient_rank + j] * r.weight_coords[j])
                                .sum()
                        })
                        .collect();
                    neg_set.contains(&img)
                })
                .count();
            assert_eq!(inv, e.length(), "length must equal inversion count");
        }
    }

    fn compute_bruhat(&mut self) {
        let m = self.len();
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by_key(|&i| self.elements[i].length());
        let mut leq = vec![vec![false; m]; m];
        for &w in &order {
            if self.elements[w].length() == 0 {
                leq[w][w] = true;
                continue;
            }
            let s = self.elements[w].word[0];
            let sw = self.left_mult_gen(s, w);
            for x in 0..m {
                if x == w {
                    leq[x][w] = true;
                    continue;
                }
                if self.elements[x].length() >= self.elements[w].length() {
                    continue;
                }
                let sx = self.left_mult_gen(s, x);
                leq[x][w] = if self.elements[sx].length() < self.elements[x].length() {
                    leq[sx][sw]
                } else {
                    leq[x][sw]
                };
            }
        }
        self.leq = leq;
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn identity(&self) -> usize {
        self.index[&identity_matrix(self.ambient_rank)]
    }

    pub fn index_of(&self, matrix: &[i64]) -> Option<usize> {
        self.index.get(matrix).copied()
    }

    pub fn mult(&self, a: usize, b: usize) -> usize {
        let m = mat_mul(self.ambient_rank, &self.elements[a].matrix, &self.elements[b].matrix);
        self.index[&m]
    }

    pub fn inverse(&self, a: usize) -> usize {
        let n = self.ambient_rank;
        let mut m = identity_matrix(n);
        for &g in self.elements[a].word.iter().rev() {
            let gm = reflection_matrix(n, &self.positive_roots[self.simple_indices[g]]);
            m = mat_mul(n, &m, &gm);
        }
        self.index[&m]
    }

    /// Left multiplication by simple generator `g`.
    pub fn left_mult_gen(&self, g: usize, a: usize) -> usize {
        let n = self.ambient_rank;
        let gm = reflection_matrix(n, &self.positive_roots[self.simple_indices[g]]);
        self.index[&mat_mul(n, &gm, &self.elements[a].matrix)]
    }

    /// Bruhat order: `x <= w` iff some reduced word of `w` has a subword
    /// that is a reduced word of `x`.
    pub fn bruhat_leq(&self, x: usize, w: usize) -> bool {
        self.leq[x][w]
    }

    pub fn length(&self, x: usize) -> usize {
        self.elements[x].length()
    }

    pub fn longest_element(&self) -> usize {
        self.longest
    }

    /// Index of the reflection `s_root` as a group element.
    pub fn reflection(&self, root: &Root) -> Option<usize> {
        self.index_of(&reflection_matrix(self.ambient_rank, root))
    }

    /// `w (lambda + rho) - rho`.
    pub fn dot_action(&self, w: usize, lambda: &Weight, rho: &Weight) -> Weight {
        let shifted = lambda.add(rho);
        self.elements[w].apply(self.ambient_rank, &shifted).sub(rho)
    }

    pub fn name(&self, x: usize) -> String {
        self.elements[x].word_name()
    }

    /// Find the element by its word name (e.g. "s2s1s3s2" or "e").
    pub fn by_name(&self, name: &str) -> Option<usize> {
        if name == "e" {
            return Some(self.identity());
        }
        let n = self.ambient_rank;
        let mut m = identity_matrix(n);
        for part in name.split('s').skip(1) {
            let g: usize = part.parse().ok()?;
            if g == 0 || g > self.simple_indices.len() {
                return None;
            }
            let gm = reflection_matrix(n, &self.positive_roots[self.simple_indices[g - 1]]);
            m = mat_mul(n, &m, &gm);
        }
        self.index_of(&m)
    }
}

/// Dot action of an arbitrary matrix-realized element on a weight.
pub fn dot_action(rs: &RootSystemData, w: &WeylElement, lambda: &Weight) -> Weight {
    w.apply(rs.rank, &lambda.add(&rs.rho)).sub(&rs.rho)
}

/// Positive integral roots of `lambda`: `{alpha in R+ : <lambda, coroot> in Z}`.
pub fn integral_positive_roots(rs: &RootSystemData, lambda: &Weight) -> Vec<Root> {
    rs.positive_roots
        .iter()
        .filter(|r| r.pair(lambda).denom().is_one())
        .cloned()
        .collect()
}

/// Integral Weyl group of `lambda`, generated by the reflections of its
/// positive integral roots.
pub fn integral_weyl_group(rs: &RootSystemData, lambda: &Weight) -> Result<CoxeterGroup, CoxeterError> {
    if lambda.coords.len() != rs.rank {
        return Err(CoxeterError::BadWeight { expected: rs.rank, got: lambda.coords.len() });
    }
    CoxeterGroup::from_positive_roots(rs.rank, integral_positive_roots(rs, lambda))
}

/// True iff `<lambda + rho, coroot> <= 0` for every positive integral root.
pub fn is_antidominant(rs: &RootSystemData, lambda: &Weight) -> bool {
    let shifted = lambda.add(&rs.rho);
    integral_positive_roots(rs, lambda)
        .iter()
        .all(|r| !r.pair(&shifted).is_positive())
}

/// The dot-orbit of an antidominant weight under its integral Weyl group,
/// as (minimal coset representative, weight) pairs, plus the stabilizer.
pub struct OrbitData {
    /// Indices into `group.elements`, each the minimal-length (then lex
    /// smallest word) representative of its coset, sorted by
    /// (length, word).
    pub representatives: Vec<usize>,
    pub weights: Vec<Weight>,
    /// Stabilizer of `lambda` inside the integral Weyl group.
    pub stabilizer: Vec<usize>,
}

pub fn orbit_and_stabilizer(
    rs: &RootSystemData,
    group: &CoxeterGroup,
    lambda: &Weight,
) -> Result<OrbitData, CoxeterError> {
    if !is_antidominant(rs, lambda) {
        return Err(CoxeterError::NotAntidominant);
    }
    // elements are sorted by (length, lex word) from the BFS, so the first
    // hit per weight is the minimal representative
    let mut order: Vec<usize> = (0..group.len()).collect();
    order.sort_by_key(|&i| (group.elements[i].length(), group.elements[i].word.clone()));
    let mut seen: HashMap<Vec<Q>, usize> = HashMap::new();
    let mut representatives = Vec::new();
    let mut weights = Vec::new();
    for &w in &order {
        let mu = group.dot_action(w, lambda, &rs.rho);
        if !seen.contains_key(&mu.coords) {
            seen.insert(mu.coords.clone(), representatives.len());
            representatives.push(w);
            weights.push(mu);
        }
    }
    let stabilizer: Vec<usize> = (0..group.len())
        .filter(|&w| group.dot_action(w, lambda, &rs.rho) == *lambda)
        .collect();
    assert_eq!(representatives.len() * stabilizer.len(), group.len());
    Ok(OrbitData { representatives, weights, stabilizer })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::q_ratio;

    fn weights(v: &[i64]) -> Weight {
        Weight::new(v.iter().map(|&c| q_int(c)).collect())
    }

    #[test]
    fn root_counts() {
        assert_eq!(build_root_system(CartanType::A, 1).unwrap().positive_roots.len(), 1);
        assert_eq!(build_root_system(CartanType::A, 2).unwrap().positive_roots.len(), 3);
        assert_eq!(build_root_system(CartanType::A, 3).unwrap().positive_roots.len(), 6);
        assert_eq!(build_root_system(CartanType::B, 2).unwrap().positive_roots.len(), 4);
        assert_eq!(build_root_system(CartanType::C, 3).unwrap().positive_roots.len(), 9);
        assert_eq!(build_root_system(CartanType::D, 4).unwrap().positive_roots.len(), 12);
        assert_eq!(build_root_system(CartanType::G2, 2).unwrap().positive_roots.len(), 6);
        assert!(build_root_system(CartanType::A, 9).is_err());
    }

    #[test]
    fn b2_has_long_short_pair() {
        let rs = build_root_system(CartanType::B, 2).unwrap();
        // some positive root pairs with coroot sum-of-coefficients ratio 2
        let norms: Vec<i64> = rs
            .positive_roots
            .iter()
            .map(|r| {
                // <alpha, coroot_alpha> = 2 always; compare coroot entries instead
                r.coroot.iter().map(|c| c.abs()).max().unwrap()
            })
            .collect();
        assert!(norms.iter().any(|&m| m >= 2), "coroot pairing ratio 2 visible: {norms:?}");
    }

    #[test]
    fn cartan_pairing_consistency() {
        for (ty, rank) in [
            (CartanType::A, 3),
            (CartanType::B, 3),
            (CartanType::C, 3),
            (CartanType::D, 4),
            (CartanType::G2, 2),
        ] {
            let rs = build_root_system(ty, rank).unwrap();
            // simple roots are the first `rank` by construction ordering:
            // recover them as roots with unit coroot
            for j in 0..rank {
                let alpha_j = rs
                    .positive_roots
                    .iter()
                    .find(|r| {
                        r.coroot.iter().enumerate().all(|(k, &c)| c == i64::from(k == j))
                    })
                    .expect("simple root present");
                for i in 0..rank {
                    assert_eq!(alpha_j.weight_coords[i], rs.cartan[i][j]);
                }
            }
        }
    }

    #[test]
    fn weyl_group_sizes_and_lengths() {
        let rs = build_root_system(CartanType::A, 1).unwrap();
        let g = CoxeterGroup::full(&rs).unwrap();
        assert_eq!(g.len(), 2);

        let rs = build_root_system(CartanType::A, 2).unwrap();
        let g = CoxeterGroup::full(&rs).unwrap();
        assert_eq!(g.len(), 6);
        let mut lens: Vec<usize> = g.elements.iter().map(|e| e.length()).collect();
        lens.sort();
        assert_eq!(lens, vec![0, 1, 1, 2, 2, 3]);

        let rs = build_root_system(CartanType::B, 2).unwrap();
        let g = CoxeterGroup::full(&rs).unwrap();
        assert_eq!(g.len(), 8);
        assert_eq!(g.length(g.longest_element()), 4);
    }

    #[test]
    fn bruhat_examples() {
        let rs = build_root_system(CartanType::A, 2).unwrap();
        let g = CoxeterGroup::full(&rs).unwrap();
        let e = g.identity();
        for w in 0..g.len() {
            assert!(g.bruhat_leq(e, w));
        }
        let s1 = g.by_name("s1").unwrap();
        let s1s2 = g.by_name("s1s2").unwrap();
        let s2s1 = g.by_name("s2s1").unwrap();
        assert!(g.bruhat_leq(s1, s1s2));
        assert!(!g.bruhat_leq(s1s2, s2s1));
        assert!(!g.bruhat_leq(s2s1, s1s2));
    }

    /// Exhaustive subword-property oracle for the Bruhat order in A2.
    #[test]
    fn bruhat_matches_subword_oracle_a2() {
        let rs = build_root_system(CartanType::A, 2).unwrap();
        let g = CoxeterGroup::full(&rs).unwrap();
        for x in 0..g.len() {
            for w in 0..g.len() {
                let wy = &g.elements[w].word;
                // enumerate subwords of the fixed reduced word of w
                let mut found = false;
                for mask in 0u32..(1 << wy.len()) {
                    let sub: Vec<usize> = wy
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| mask & (1 << i) != 0)
                        .map(|(_, &s)| s)
                        .collect();
                    let n = g.ambient_rank;
                    let mut m = identity_matrix(n);
                    for &s in &sub {
                        let gm = reflection_matrix(n, &g.positive_roots[g.simple_indices[s]]);
                        m = mat_mul(n, &m, &gm);
                    }
                    let idx = g.index_of(&m).unwrap();
                    if idx == x && g.length(idx) == sub.len() {
                        found = true;
                        break;
                    }
                }
                assert_eq!(g.bruhat_leq(x, w), found, "x={} w={}", g.name(x), g.name(w));
            }
        }
    }

    #[test]
    fn bruhat_refines_length() {
        for (ty, rank) in [(CartanType::A, 2), (CartanType::B, 2)] {
            let rs = build_root_system(ty, rank).unwrap();
            let g = CoxeterGroup::full(&rs).unwrap();
            for x in 0..g.len() {
                for w in 0..g.len() {
                    if g.bruhat_leq(x, w) && x != w {
                        assert!(g.length(x) < g.length(w));
                    }
                }
            }
        }
    }

    #[test]
    fn dot_action_examples() {
        // A1: s . (-2 rho) = 0
        let rs = build_root_system(CartanType::A, 1).unwrap();
        let g = CoxeterGroup::full(&rs).unwrap();
        let s = g.by_name("s1").unwrap();
        let lam = weights(&[-2]);
        assert_eq!(g.dot_action(s, &lam, &rs.rho), weights(&[0]));
        // identity fixes everything
        assert_eq!(g.dot_action(g.identity(), &lam, &rs.rho), lam);
    }

    #[test]
    fn dot_action_is_group_action() {
        for (ty, rank) in [(CartanType::A, 2), (CartanType::B, 2)] {
            let rs = build_root_system(ty, rank).unwrap();
            let g = CoxeterGroup::full(&rs).unwrap();
            let lam = Weight::new(vec![q_ratio(-7, 3), q_int(-2)]);
            for v in 0..g.len() {
                for w in 0..g.len() {
                    let lhs = g.dot_action(g.mult(v, w), &lam, &rs.rho);
                    let rhs = g.dot_action(v, &g.dot_action(w, &lam, &rs.rho), &rs.rho);
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn integral_subsystem_examples() {
        let rs = build_root_system(CartanType::A, 2).unwrap();
        // integral weight: everything is integral
        assert_eq!(integral_positive_roots(&rs, &weights(&[-2, -2])).len(), 3);
        // (1/2, 0): only alpha2
        let r = integral_positive_roots(&rs, &Weight::new(vec![q_ratio(1, 2), q_int(0)]));
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].coroot, vec![0, 1]);
        // (1/2, 1/2): only the highest root alpha1 + alpha2
        let r = integral_positive_roots(&rs, &Weight::new(vec![q_ratio(1, 2), q_ratio(1, 2)]));
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].coroot, vec![1, 1]);
    }

    #[test]
    fn antidominance() {
        let rs = build_root_system(CartanType::A, 2).unwrap();
        assert!(is_antidominant(&rs, &weights(&[-2, -2])));
        assert!(!is_antidominant(&rs, &weights(&[0, 0])));
        assert!(is_antidominant(&rs, &weights(&[-1, -3])));
    }

    #[test]
    fn orbit_examples() {
        // A1, lambda = -2rho: orbit {-2rho, 0}, trivial stabilizer
        let rs = build_root_system(CartanType::A, 1).unwrap();
        let g = integral_weyl_group(&rs, &weights(&[-2])).unwrap();
        let orbit = orbit_and_stabilizer(&rs, &g, &weights(&[-2])).unwrap();
        assert_eq!(orbit.weights.len(), 2);
        assert_eq!(orbit.stabilizer.len(), 1);
        assert!(orbit.weights.contains(&weights(&[0])));

        // A2 regular
        let rs = build_root_system(CartanType::A, 2).unwrap();
        let g = integral_weyl_group(&rs, &weights(&[-2, -2])).unwrap();
        let orbit = orbit_and_stabilizer(&rs, &g, &weights(&[-2, -2])).unwrap();
        assert_eq!(orbit.weights.len(), 6);

        // A2 singular: lambda = (-1, -3), <lambda + rho, coroot_1> = 0
        let orbit = orbit_and_stabilizer(&rs, &g, &weights(&[-1, -3])).unwrap();
        assert_eq!(orbit.weights.len(), 3);
        assert_eq!(orbit.stabilizer.len(), 2);

        // non-antidominant input is rejected
        assert!(orbit_and_stabilizer(&rs, &g, &weights(&[0, 0])).is_err());
    }

    #[test]
    fn longest_element_examples() {
        let rs = build_root_system(CartanType::A, 2).unwrap();
        let g = CoxeterGroup::full(&rs).unwrap();
        let w0 = g.longest_element();
        assert_eq!(g.length(w0), 3);
        assert_eq!(g.mult(w0, w0), g.identity());
        // conjugation by w0 preserves length
        for x in 0..g.len() {
            let c = g.mult(g.mult(w0, x), w0);
            assert_eq!(g.length(c), g.length(x));
        }
    }

    #[test]
    fn weight_order_examples() {
        let rs = build_root_system(CartanType::A, 1).unwrap();
        let a = weights(&[-2]);
        let b = weights(&[0]);
        assert!(weight_leq(&rs, &a, &a));
        assert!(weight_leq(&rs, &a, &b));
        assert!(!weight_leq(&rs, &b, &a));
        let rs = build_root_system(CartanType::A, 2).unwrap();
        // weights differing by alpha1 - alpha2: incomparable
        let mu = weights(&[0, 0]);
        let alpha1 = rs.positive_roots.iter().find(|r| r.coroot == vec![1, 0]).unwrap().as_weight();
        let alpha2 = rs.positive_roots.iter().find(|r| r.coroot == vec![0, 1]).unwrap().as_weight();
        let nu = mu.add(&alpha1).sub(&alpha2);
        assert!(!weight_leq(&rs, &mu, &nu));
        assert!(!weight_leq(&rs, &nu, &mu));
    }

    #[test]
    fn bruhat_agrees_with_weight_order_for_regular_blocks() {
        for (ty, rank) in [(CartanType::A, 2), (CartanType::B, 2)] {
            let rs = build_root_system(ty, rank).unwrap();
            let lam = Weight::new(vec![q_int(-2); rank]);
            let g = integral_weyl_group(&rs, &lam).unwrap();
            for x in 0..g.len() {
                for w in 0..g.len() {
                    let wx = g.dot_action(x, &lam, &rs.rho);
                    let ww = g.dot_action(w, &lam, &rs.rho);
                    assert_eq!(
                        g.bruhat_leq(x, w),
                        weight_leq(&rs, &wx, &ww),
                        "x={} w={}",
                        g.name(x),
                        g.name(w)
                    );
                }
            }
        }
    }
}
