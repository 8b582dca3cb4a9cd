//! Kazhdan-Lusztig polynomials via the canonical-basis recursion, with an
//! independent R-polynomial inversion identity used as a cross-check.

use crate::coxeter::CoxeterGroup;

/// Polynomial in `q` with integer coefficients, `coeffs[k]` the
/// coefficient of `q^k`. The vector carries no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QPoly {
    pub coeffs: Vec<i64>,
}

impl QPoly {
    pub fn zero() -> Self {
        QPoly { coeffs: vec![] }
    }

    pub fn one() -> Self {
        QPoly { coeffs: vec![1] }
    }

    pub fn monomial(k: usize) -> Self {
        let mut coeffs = vec![0; k + 1];
        coeffs[k] = 1;
        QPoly { coeffs }
    }

    pub fn from_coeffs(mut coeffs: Vec<i64>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        QPoly { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, k: usize) -> i64 {
        self.coeffs.get(k).copied().unwrap_or(0)
    }

    pub fn add(&self, other: &QPoly) -> QPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        QPoly::from_coeffs((0..n).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    pub fn sub(&self, other: &QPoly) -> QPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        QPoly::from_coeffs((0..n).map(|k| self.coeff(k) - other.coeff(k)).collect())
    }

    pub fn mul(&self, other: &QPoly) -> QPoly {
        if self.is_zero() || other.is_zero() {
            return QPoly::zero();
        }
        let mut coeffs = vec![0i64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if *a == 0 {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        QPoly::from_coeffs(coeffs)
    }

    pub fn scale(&self, c: i64) -> QPoly {
        QPoly::from_coeffs(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Multiply by `q^k`.
    pub fn shift(&self, k: usize) -> QPoly {
        if self.is_zero() {
            return QPoly::zero();
        }
        let mut coeffs = vec![0i64; k];
        coeffs.extend_from_slice(&self.coeffs);
        QPoly { coeffs }
    }

    pub fn eval_at_one(&self) -> i64 {
        self.coeffs.iter().sum()
    }

    /// `q^n * p(1/q)` as a polynomial; `n` must bound the degree.
    pub fn reverse_to(&self, n: usize) -> QPoly {
        assert!(self.degree().map_or(true, |d| d <= n));
        QPoly::from_coeffs((0..=n).map(|k| self.coeff(n - k)).collect())
    }

    pub fn render(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (k, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let body = match k {
                0 => format!("{c}"),
                1 if c == 1 => "q".to_string(),
                1 if c == -1 => "-q".to_string(),
                1 => format!("{c}q"),
                _ if c == 1 => format!("q^{k}"),
                _ if c == -1 => format!("-q^{k}"),
                _ => format!("{c}q^{k}"),
            };
            parts.push(body);
        }
        let mut s = parts.remove(0);
        for p in parts {
            if let Some(rest) = p.strip_prefix('-') {
                s.push_str(" - ");
                s.push_str(rest);
            } else {
                s.push_str(" + ");
                s.push_str(&p);
            }
        }
        s
    }
}

/// All Kazhdan-Lusztig polynomials of a finite Coxeter group, indexed by
/// element indices of the group.
pub struct KLTable {
    polys: Vec<Vec<QPoly>>,
}

impl KLTable {
    pub fn get(&self, x: usize, w: usize) -> &QPoly {
        &self.polys[x][w]
    }

    pub fn eval_at_one(&self, x: usize, w: usize) -> i64 {
        self.polys[x][w].eval_at_one()
    }
}

/// Coefficient `mu(z, v)`: the coefficient of `q^{(l(v)-l(z)-1)/2}` in
/// `P_{z,v}`, zero when the length gap is even or `z > v`.
fn mu(group: &CoxeterGroup, table: &[Vec<QPoly>], z: usize, v: usize) -> i64 {
    let lz = group.length(z);
    let lv = group.length(v);
    if lz >= lv || (lv - lz) % 2 == 0 {
        return 0;
    }
    table[z][v].coeff((lv - lz - 1) / 2)
}

/// Compute the full KL table with the recursion on a left descent `s` of
/// `w` (the first letter of its stored reduced word): for `v = sw`,
/// `P_{x,w} = q^{1-c} P_{sx,v} + q^c P_{x,v}
///           - sum_{x <= z < v, sz < z} mu(z,v) q^{(l(w)-l(z))/2} P_{x,z}`
/// with `c = 1` iff `sx < x`.
pub fn kl_table(group: &CoxeterGroup) -> KLTable {
    let m = group.len();
    let mut polys = vec![vec![QPoly::zero(); m]; m];
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by_key(|&i| group.length(i));
    for &w in &order {
        polys[w][w] = QPoly::one();
        if group.length(w) == 0 {
            continue;
        }
        let s = group.elements[w].word[0];
        let v = group.left_mult_gen(s, w);
        let lw = group.length(w);
        // correction terms do not depend on x beyond the x <= z condition
        let corrections: Vec<(usize, i64)> = (0..m)
            .filter(|&z| {
                group.bruhat_leq(z, v)
                    && group.length(group.left_mult_gen(s, z)) < group.length(z)
            })
            .map(|z| (z, mu(group, &polys, z, v)))
            .filter(|&(_, c)| c != 0)
            .collect();
        for x in 0..m {
            if x == w || !group.bruhat_leq(x, w) {
                continue;
            }
            let sx = group.left_mult_gen(s, x);
            let c = usize::from(group.length(sx) < group.length(x));
            let mut p = polys[sx][v].shift(1 - c).add(&polys[x][v].shift(c));
            for &(z, muc) in &corrections {
                if group.bruhat_leq(x, z) {
                    let k = (lw - group.length(z)) / 2;
                    p = p.sub(&polys[x][z].shift(k).scale(muc));
                }
            }
            polys[x][w] = p;
        }
    }
    KLTable { polys }
}

/// R-polynomials by the descent recursion, used only as an independent
/// oracle against the KL table.
pub fn r_table(group: &CoxeterGroup) -> Vec<Vec<QPoly>> {
    let m = group.len();
    let mut r = vec![vec![QPoly::zero(); m]; m];
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by_key(|&i| group.length(i));
    let qm1 = QPoly::from_coeffs(vec![-1, 1]);
    for &w in &order {
        r[w][w] = QPoly::one();
        if group.length(w) == 0 {
            continue;
        }
        let s = group.elements[w].word[0];
        let sw = group.left_mult_gen(s, w);
        for x in 0..m {
            if x == w || !group.bruhat_leq(x, w) {
                continue;
            }
            let sx = group.left_mult_gen(s, x);
            r[x][w] = if group.length(sx) < group.length(x) {
                r[sx][sw].clone()
            } else {
                qm1.mul(&r[x][sw]).add(&r[sx][sw].shift(1))
            };
        }
    }
    r
}

/// Check `q^{l(w)-l(x)} P_{x,w}(1/q) = sum_{x<=y<=w} R_{x,y} P_{y,w}` for
/// every pair. Returns the first failing pair, if any.
pub fn check_inversion_identity(group: &CoxeterGroup, table: &KLTable) -> Option<(usize, usize)> {
    let r = r_table(group);
    let m = group.len();
    for x in 0..m {
        for w in 0..m {
            if !group.bruhat_leq(x, w) {
                continue;
            }
            let lhs = table.get(x, w).reverse_to(group.length(w) - group.length(x));
            let mut rhs = QPoly::zero();
            for y in 0..m {
                if group.bruhat_leq(x, y) && group.bruhat_leq(y, w) {
                    rhs = rhs.add(&r[x][y].mul(table.get(y, w)));
                }
            }
            if lhs != rhs {
                return Some((x, w));
            }
        }
    }
    None
}
