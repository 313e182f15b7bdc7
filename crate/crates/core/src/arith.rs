//! Exact integer arithmetic: prime-set bookkeeping, extended gcd, and the
//! Hermite/Smith canonical forms that back every abelian-group computation.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::fmt;

use crate::error::ArithError;

/// A set of primes: either all of them or a single prime `p`.
///
/// The complement set (written π' throughout) is empty in the first case and
/// "all primes except p" in the second.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum PiSet {
    AllPrimes,
    SinglePrime(u64),
}

impl PiSet {
    pub fn all() -> Self {
        PiSet::AllPrimes
    }

    /// Builds the one-element set {p}, rejecting composite or unit `p`.
    pub fn single(p: u64) -> Result<Self, ArithError> {
        if is_prime_u64(p) {
            Ok(PiSet::SinglePrime(p))
        } else {
            Err(ArithError::NotPrime(p))
        }
    }

    /// True iff every prime factor of `n` lies in the set. `n` must be ≥ 1;
    /// 1 counts as a π-number for every π.
    pub fn is_pi_number(&self, n: &BigInt) -> bool {
        assert!(n.is_positive(), "π-number test needs a positive integer");
        match self {
            PiSet::AllPrimes => true,
            PiSet::SinglePrime(p) => {
                let p = BigInt::from(*p);
                let mut m = n.clone();
                while (&m % &p).is_zero() {
                    m /= &p;
                }
                m.is_one()
            }
        }
    }

    /// True iff no prime factor of `n` lies in the set (a π'-number).
    pub fn is_pi_prime_number(&self, n: &BigInt) -> bool {
        assert!(n.is_positive(), "π'-number test needs a positive integer");
        match self {
            PiSet::AllPrimes => n.is_one(),
            PiSet::SinglePrime(p) => !(n % BigInt::from(*p)).is_zero(),
        }
    }

    /// π'-primes up to `limit`, ascending.
    pub fn pi_prime_primes_upto(&self, limit: u64) -> Vec<u64> {
        let mut out = Vec::new();
        for q in 2..=limit {
            if is_prime_u64(q) {
                let in_pi = match self {
                    PiSet::AllPrimes => true,
                    PiSet::SinglePrime(p) => q == *p,
                };
                if !in_pi {
                    out.push(q);
                }
            }
        }
        out
    }
}

impl fmt::Display for PiSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PiSet::AllPrimes => write!(f, "all"),
            PiSet::SinglePrime(p) => write!(f, "{p}"),
        }
    }
}

pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Splits `n ≥ 1` as `n = q·t` with `q` the maximal divisor whose prime
/// factors all lie in π and `t` coprime to π. For π = all primes, `t = 1`.
pub fn pi_part(n: &BigInt, pi: &PiSet) -> (BigInt, BigInt) {
    assert!(n.is_positive(), "pi_part requires n >= 1");
    match pi {
        PiSet::AllPrimes => (n.clone(), BigInt::one()),
        PiSet::SinglePrime(p) => {
            let p = BigInt::from(*p);
            let mut q = BigInt::one();
            let mut t = n.clone();
            while (&t % &p).is_zero() {
                t /= &p;
                q *= &p;
            }
            (q, t)
        }
    }
}

/// Extended gcd: returns `(g, u, v)` with `g = gcd(a, b) > 0` and
/// `u·a + v·b = g`. Errors when both arguments are zero.
pub fn bezout(a: &BigInt, b: &BigInt) -> Result<(BigInt, BigInt, BigInt), ArithError> {
    if a.is_zero() && b.is_zero() {
        return Err(ArithError::BezoutBothZero);
    }
    let (mut old_r, mut r) = (a.clone(), b.clone());
    let (mut old_s, mut s) = (BigInt::one(), BigInt::zero());
    let (mut old_t, mut t) = (BigInt::zero(), BigInt::one());
    while !r.is_zero() {
        let q = &old_r / &r;
        let tmp = &old_r - &q * &r;
        old_r = std::mem::replace(&mut r, tmp);
        let tmp = &old_s - &q * &s;
        old_s = std::mem::replace(&mut s, tmp);
        let tmp = &old_t - &q * &t;
        old_t = std::mem::replace(&mut t, tmp);
    }
    if old_r.is_negative() {
        old_r = -old_r;
        old_s = -old_s;
        old_t = -old_t;
    }
    Ok((old_r, old_s, old_t))
}

/// Dense integer matrix with row-major storage.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        IntMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vec(&self, i: usize) -> Vec<BigInt> {
        self.row(i).to_vec()
    }

    pub fn is_zero_row(&self, i: usize) -> bool {
        self.row(i).iter().all(Zero::is_zero)
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = IntMatrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let prod = a * &other[(k, j)];
                    out[(i, j)] += prod;
                }
            }
        }
        out
    }

    pub fn stack(top: &IntMatrix, bottom: &IntMatrix) -> IntMatrix {
        assert_eq!(top.cols, bottom.cols, "dimension mismatch");
        let mut data = top.data.clone();
        data.extend_from_slice(&bottom.data);
        IntMatrix { rows: top.rows + bottom.rows, cols: top.cols, data }
    }

    /// Drops all-zero rows; the resulting matrix spans the same row lattice.
    pub fn without_zero_rows(&self) -> IntMatrix {
        let rows: Vec<Vec<BigInt>> =
            (0..self.rows).filter(|&i| !self.is_zero_row(i)).map(|i| self.row_vec(i)).collect();
        if rows.is_empty() {
            IntMatrix::zero(0, self.cols)
        } else {
            IntMatrix::from_rows(rows)
        }
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(i * self.cols + c, j * self.cols + c);
        }
    }

    fn negate_row(&mut self, i: usize) {
        for c in 0..self.cols {
            let v = -std::mem::take(&mut self[(i, c)]);
            self[(i, c)] = v;
        }
    }

    /// row_i += f * row_j
    fn add_row_multiple(&mut self, i: usize, j: usize, f: &BigInt) {
        if f.is_zero() {
            return;
        }
        for c in 0..self.cols {
            let add = f * &self[(j, c)];
            self[(i, c)] += add;
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + i, r * self.cols + j);
        }
    }

    /// col_i += f * col_j
    fn add_col_multiple(&mut self, i: usize, j: usize, f: &BigInt) {
        if f.is_zero() {
            return;
        }
        for r in 0..self.rows {
            let add = f * &self[(r, j)];
            self[(r, i)] += add;
        }
    }

    /// Bareiss fraction-free determinant (square matrices).
    pub fn det(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "det needs a square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut m = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if m[(k, k)].is_zero() {
                let Some(p) = (k + 1..n).find(|&r| !m[(r, k)].is_zero()) else {
                    return BigInt::zero();
                };
                m.swap_rows(k, p);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &m[(i, j)] * &m[(k, k)] - &m[(i, k)] * &m[(k, j)];
                    m[(i, j)] = &num / &prev;
                }
            }
            prev = m[(k, k)].clone();
        }
        sign * m[(n - 1, n - 1)].clone()
    }

    pub fn is_unimodular(&self) -> bool {
        self.rows == self.cols && self.det().abs().is_one()
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (r, c): (usize, usize)) -> &BigInt {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut BigInt {
        &mut self.data[r * self.cols + c]
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self[(i, j)])?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

/// Row-style Hermite normal form. Pivots are positive, entries above a pivot
/// are reduced into `[0, pivot)`, zero rows sink to the bottom. The row
/// lattice is unchanged and the result is the canonical representative of it
/// (up to trailing zero rows).
pub fn hermite_reduce(m: &IntMatrix) -> IntMatrix {
    hermite_with_transform(m).0
}

/// HNF together with a unimodular `U` such that `H = U · M`.
pub fn hermite_with_transform(m: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let mut h = m.clone();
    let mut u = IntMatrix::identity(m.rows());
    let mut pivot_row = 0usize;
    for col in 0..h.cols() {
        if pivot_row == h.rows() {
            break;
        }
        // clear below: repeatedly reduce by the minimal-magnitude entry
        loop {
            let mut best: Option<usize> = None;
            for r in pivot_row..h.rows() {
                if !h[(r, col)].is_zero() {
                    let better = match best {
                        None => true,
                        Some(b) => h[(r, col)].abs() < h[(b, col)].abs(),
                    };
                    if better {
                        best = Some(r);
                    }
                }
            }
            let Some(b) = best else { break };
            h.swap_rows(pivot_row, b);
            u.swap_rows(pivot_row, b);
            let mut done = true;
            for r in pivot_row + 1..h.rows() {
                if !h[(r, col)].is_zero() {
                    let q = -(&h[(r, col)] / &h[(pivot_row, col)]);
                    h.add_row_multiple(r, pivot_row, &q);
                    u.add_row_multiple(r, pivot_row, &q);
                    if !h[(r, col)].is_zero() {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if h[(pivot_row, col)].is_zero() {
            continue;
        }
        if h[(pivot_row, col)].is_negative() {
            h.negate_row(pivot_row);
            u.negate_row(pivot_row);
        }
        let pivot = h[(pivot_row, col)].clone();
        for r in 0..pivot_row {
            let q = -h[(r, col)].div_floor(&pivot);
            h.add_row_multiple(r, pivot_row, &q);
            u.add_row_multiple(r, pivot_row, &q);
        }
        pivot_row += 1;
    }
    (h, u)
}

/// Smith normal form: `(S, U, V)` with `S = U·M·V`, `U` and `V` unimodular,
/// `S` diagonal with non-negative entries in a divisibility chain.
pub fn smith_normal_form(m: &IntMatrix) -> (IntMatrix, IntMatrix, IntMatrix) {
    let mut s = m.clone();
    let mut u = IntMatrix::identity(m.rows());
    let mut v = IntMatrix::identity(m.cols());
    let n = m.rows().min(m.cols());
    let mut t = 0usize;
    while t < n {
        // locate a minimal-magnitude nonzero entry in the trailing block
        let mut pivot: Option<(usize, usize)> = None;
        for i in t..s.rows() {
            for j in t..s.cols() {
                if !s[(i, j)].is_zero() {
                    let better = match pivot {
                        None => true,
                        Some(p) => s[(i, j)].abs() < s[p].abs(),
                    };
                    if better {
                        pivot = Some((i, j));
                    }
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        s.swap_rows(t, pi);
        u.swap_rows(t, pi);
        s.swap_cols(t, pj);
        v.swap_cols(t, pj);
        loop {
            let mut clean = true;
            for i in t + 1..s.rows() {
                if !s[(i, t)].is_zero() {
                    let q = -(&s[(i, t)] / &s[(t, t)]);
                    s.add_row_multiple(i, t, &q);
                    u.add_row_multiple(i, t, &q);
                    if !s[(i, t)].is_zero() {
                        s.swap_rows(t, i);
                        u.swap_rows(t, i);
                        clean = false;
                    }
                }
            }
            for j in t + 1..s.cols() {
                if !s[(t, j)].is_zero() {
                    let q = -(&s[(t, j)] / &s[(t, t)]);
                    s.add_col_multiple(j, t, &q);
                    v.add_col_multiple(j, t, &q);
                    if !s[(t, j)].is_zero() {
                        s.swap_cols(t, j);
                        v.swap_cols(t, j);
                        clean = false;
                    }
                }
            }
            if !clean {
                continue;
            }
            // pivot must divide the whole trailing block for the chain to hold
            let mut fixed = true;
            'scan: for i in t + 1..s.rows() {
                for j in t + 1..s.cols() {
                    if !(&s[(i, j)] % &s[(t, t)]).is_zero() {
                        s.add_row_multiple(t, i, &BigInt::one());
                        u.add_row_multiple(t, i, &BigInt::one());
                        fixed = false;
                        break 'scan;
                    }
                }
            }
            if fixed {
                break;
            }
        }
        if s[(t, t)].is_negative() {
            s.negate_row(t);
            u.negate_row(t);
        }
        t += 1;
    }
    (s, u, v)
}

/// Integer inverse of a unimodular matrix.
pub fn unimodular_inverse(m: &IntMatrix) -> IntMatrix {
    assert_eq!(m.rows(), m.cols());
    let n = m.rows();
    // H = U·M with M unimodular forces H = I, so U is the inverse.
    let (h, u) = hermite_with_transform(m);
    assert_eq!(h, IntMatrix::identity(n), "matrix is not unimodular");
    u
}

/// Solves `x · M = target` over the integers, if possible.
pub fn solve_row(m: &IntMatrix, target: &[BigInt]) -> Option<Vec<BigInt>> {
    assert_eq!(m.cols(), target.len());
    let (h, u) = hermite_with_transform(m);
    let y = solve_row_hnf(&h, target)?;
    // x = y · U
    let mut x = vec![BigInt::zero(); m.rows()];
    for (i, yi) in y.iter().enumerate() {
        if yi.is_zero() {
            continue;
        }
        for (xj, uij) in x.iter_mut().zip(u.row(i)) {
            *xj += yi * uij;
        }
    }
    Some(x)
}

/// Back-substitution against an HNF matrix.
fn solve_row_hnf(h: &IntMatrix, target: &[BigInt]) -> Option<Vec<BigInt>> {
    let mut residual = target.to_vec();
    let mut coeffs = vec![BigInt::zero(); h.rows()];
    for i in 0..h.rows() {
        let Some(pcol) = h.row(i).iter().position(|x| !x.is_zero()) else { continue };
        // pivot columns strictly increase, so any earlier residual entries
        // can no longer be cleared
        for c in 0..pcol {
            if !residual[c].is_zero() {
                return None;
            }
        }
        let (q, r) = residual[pcol].div_rem(&h[(i, pcol)]);
        if !r.is_zero() {
            return None;
        }
        if !q.is_zero() {
            for (res, hij) in residual.iter_mut().zip(h.row(i)) {
                *res -= &q * hij;
            }
        }
        coeffs[i] = q;
    }
    if residual.iter().all(Zero::is_zero) {
        Some(coeffs)
    } else {
        None
    }
}

/// True iff `x` lies in the row lattice of `m`.
pub fn lattice_contains(m: &IntMatrix, x: &[BigInt]) -> bool {
    solve_row(m, x).is_some()
}

/// Basis (HNF rows) of `{ x : x · M = 0 }`.
pub fn left_kernel(m: &IntMatrix) -> IntMatrix {
    let (h, u) = hermite_with_transform(m);
    let rows: Vec<Vec<BigInt>> =
        (0..h.rows()).filter(|&i| h.is_zero_row(i)).map(|i| u.row_vec(i)).collect();
    if rows.is_empty() {
        return IntMatrix::zero(0, m.rows());
    }
    hermite_reduce(&IntMatrix::from_rows(rows)).without_zero_rows()
}

/// Canonical basis of the sum of two row lattices.
pub fn lattice_sum(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    hermite_reduce(&IntMatrix::stack(a, b)).without_zero_rows()
}

/// Canonical basis of the intersection of two row lattices.
pub fn lattice_intersect(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    assert_eq!(a.cols(), b.cols());
    if a.rows() == 0 || b.rows() == 0 {
        return IntMatrix::zero(0, a.cols());
    }
    // x = s·A = t·B  ⇔  (s, t) kills the stacked matrix [A; -B]
    let mut neg_b = b.clone();
    for i in 0..neg_b.rows() {
        neg_b.negate_row(i);
    }
    let stacked = IntMatrix::stack(a, &neg_b);
    let ker = left_kernel(&stacked);
    let rows: Vec<Vec<BigInt>> = (0..ker.rows())
        .map(|i| {
            let coeffs = ker.row(i);
            let mut x = vec![BigInt::zero(); a.cols()];
            for (s, arow) in coeffs[..a.rows()].iter().zip(0..a.rows()) {
                if s.is_zero() {
                    continue;
                }
                for (xj, aij) in x.iter_mut().zip(a.row(arow)) {
                    *xj += s * aij;
                }
            }
            x
        })
        .collect();
    if rows.is_empty() {
        return IntMatrix::zero(0, a.cols());
    }
    hermite_reduce(&IntMatrix::from_rows(rows)).without_zero_rows()
}
