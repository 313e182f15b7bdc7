//! Finitely generated abelian groups `Z^f ⊕ Z/m₁ ⊕ … ⊕ Z/mₛ` with torsion
//! moduli in divisibility-chain order, their subgroups as integer lattices in
//! Hermite normal form, and π'-saturation computed through Smith normal form.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::arith::{
    hermite_reduce, lattice_contains, pi_part, smith_normal_form, solve_row, unimodular_inverse,
    IntMatrix, PiSet,
};
use crate::error::GroupError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbelianGroup {
    free_rank: usize,
    moduli: Vec<BigInt>,
}

impl AbelianGroup {
    pub fn new(free_rank: usize, moduli: Vec<BigInt>) -> Result<Self, GroupError> {
        let two = BigInt::from(2);
        for (i, m) in moduli.iter().enumerate() {
            if m < &two {
                return Err(GroupError::BadTorsionModuli);
            }
            if i + 1 < moduli.len() && !(&moduli[i + 1] % m).is_zero() {
                return Err(GroupError::BadTorsionModuli);
            }
        }
        if free_rank == 0 && moduli.is_empty() {
            // the trivial group is representable but useless as a factor
            return Err(GroupError::ParentMismatch("abelian group has rank 0".into()));
        }
        Ok(AbelianGroup { free_rank, moduli })
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn moduli(&self) -> &[BigInt] {
        &self.moduli
    }

    /// Number of coordinates (free then torsion).
    pub fn dim(&self) -> usize {
        self.free_rank + self.moduli.len()
    }

    pub fn validate(&self, v: &[BigInt]) -> Result<(), GroupError> {
        if v.len() == self.dim() {
            Ok(())
        } else {
            Err(GroupError::ParentMismatch(format!(
                "vector has {} coordinates, group has {}",
                v.len(),
                self.dim()
            )))
        }
    }

    /// Canonical coordinates: torsion entries reduced into `[0, m)`.
    pub fn reduce(&self, mut v: Vec<BigInt>) -> Vec<BigInt> {
        assert_eq!(v.len(), self.dim());
        for (i, m) in self.moduli.iter().enumerate() {
            let idx = self.free_rank + i;
            v[idx] = v[idx].mod_floor(m);
        }
        v
    }

    pub fn identity(&self) -> Vec<BigInt> {
        vec![BigInt::zero(); self.dim()]
    }

    pub fn add(&self, a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
        self.reduce(a.iter().zip(b).map(|(x, y)| x + y).collect())
    }

    pub fn neg(&self, a: &[BigInt]) -> Vec<BigInt> {
        self.reduce(a.iter().map(|x| -x).collect())
    }

    pub fn scale(&self, a: &[BigInt], n: &BigInt) -> Vec<BigInt> {
        self.reduce(a.iter().map(|x| x * n).collect())
    }

    pub fn is_identity(&self, a: &[BigInt]) -> bool {
        a.iter().all(Zero::is_zero)
    }

    /// Rows spanning the relation lattice `mᵢ·e_{f+i}`.
    pub fn relation_rows(&self) -> IntMatrix {
        let mut m = IntMatrix::zero(self.moduli.len(), self.dim());
        for (i, modulus) in self.moduli.iter().enumerate() {
            m[(i, self.free_rank + i)] = modulus.clone();
        }
        m
    }

    pub fn presentation(&self) -> Presentation {
        Presentation { n: self.dim(), relations: self.relation_rows() }
    }

    /// True iff every torsion modulus is a π-number.
    pub fn pi_prime_torsion_free(&self, pi: &PiSet) -> bool {
        self.moduli.iter().all(|m| pi.is_pi_number(m))
    }

    /// Smallest `e > 0` with `e·a = 0`, or None when `a` has infinite order.
    pub fn element_order(&self, a: &[BigInt]) -> Option<BigInt> {
        if a[..self.free_rank].iter().any(|x| !x.is_zero()) {
            return None;
        }
        let mut ord = BigInt::one();
        for (i, m) in self.moduli.iter().enumerate() {
            let x = &a[self.free_rank + i];
            if x.is_zero() {
                continue;
            }
            let g = x.gcd(m);
            ord = ord.lcm(&(m / g));
        }
        Some(ord)
    }

    /// Some `e` with `e·x = v`, if one exists.
    pub fn cyclic_exponent(&self, x: &[BigInt], v: &[BigInt]) -> Option<BigInt> {
        // a free coordinate of x pins e exactly
        for i in 0..self.free_rank {
            if !x[i].is_zero() {
                let (e, rem) = v[i].div_rem(&x[i]);
                if !rem.is_zero() {
                    return None;
                }
                return if self.scale(x, &e) == self.reduce(v.to_vec()) { Some(e) } else { None };
            }
        }
        if v[..self.free_rank].iter().any(|c| !c.is_zero()) {
            return None;
        }
        // torsion only: merge per-coordinate congruences e·xᵢ ≡ vᵢ (mod mᵢ)
        let mut sol = (BigInt::zero(), BigInt::one());
        for (i, m) in self.moduli.iter().enumerate() {
            let (r, n) = solve_congruence(&x[self.free_rank + i], &v[self.free_rank + i], m)?;
            sol = crt_merge(&sol, &(r, n))?;
        }
        Some(sol.0)
    }
}

/// Solutions of `a·e ≡ b (mod m)` as a residue class `e ≡ r (mod n)`.
fn solve_congruence(a: &BigInt, b: &BigInt, m: &BigInt) -> Option<(BigInt, BigInt)> {
    let a = a.mod_floor(m);
    let b = b.mod_floor(m);
    if a.is_zero() {
        return if b.is_zero() { Some((BigInt::zero(), BigInt::one())) } else { None };
    }
    let (g, u, _) = crate::arith::bezout(&a, m).expect("nonzero");
    if !(&b % &g).is_zero() {
        return None;
    }
    let n = m / &g;
    let r = ((&b / &g) * u).mod_floor(&n);
    Some((r, n))
}

fn crt_merge(a: &(BigInt, BigInt), b: &(BigInt, BigInt)) -> Option<(BigInt, BigInt)> {
    let (r1, n1) = a;
    let (r2, n2) = b;
    let (g, u, _) = crate::arith::bezout(n1, n2).expect("moduli nonzero");
    let diff = r2 - r1;
    if !(&diff % &g).is_zero() {
        return None;
    }
    let lcm = n1 / &g * n2;
    let r = (r1 + (&diff / &g) * u * n1).mod_floor(&lcm);
    Some((r, lcm))
}

/// Subgroup of an abelian group, stored as the HNF basis of its preimage
/// lattice in `Z^dim` (relation rows included). The basis is the canonical
/// key: two subgroups are equal iff the matrices coincide.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbelianSubgroup {
    dim: usize,
    basis: IntMatrix,
}

impl AbelianSubgroup {
    pub fn from_generators(group: &AbelianGroup, gens: &[Vec<BigInt>]) -> Self {
        let pres = group.presentation();
        AbelianSubgroup { dim: group.dim(), basis: pres.sublattice(gens) }
    }

    pub fn from_lattice(dim: usize, lattice: IntMatrix) -> Self {
        AbelianSubgroup { dim, basis: hermite_reduce(&lattice).without_zero_rows() }
    }

    pub fn basis(&self) -> &IntMatrix {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        lattice_contains(&self.basis, v)
    }

    /// Integer combination of the stored basis rows yielding `v`.
    pub fn membership_combination(&self, v: &[BigInt]) -> Option<Vec<BigInt>> {
        solve_row(&self.basis, v)
    }

    /// Canonical coset representative: residue reduction by the HNF pivots.
    pub fn coset_rep(&self, v: &[BigInt]) -> Vec<BigInt> {
        let mut r = v.to_vec();
        for i in 0..self.basis.rows() {
            let Some(pcol) = self.basis.row(i).iter().position(|x| !x.is_zero()) else {
                continue;
            };
            let q = r[pcol].div_floor(&self.basis[(i, pcol)]);
            if !q.is_zero() {
                for (rj, bij) in r.iter_mut().zip(self.basis.row(i)) {
                    *rj -= &q * bij;
                }
            }
        }
        r
    }

    /// Abstract invariants `(free_rank, torsion)` of the subgroup itself.
    pub fn invariants(&self, group: &AbelianGroup) -> (usize, Vec<BigInt>) {
        Presentation { n: group.dim(), relations: group.relation_rows() }
            .subgroup_invariants(&self.basis)
    }

    pub fn is_cyclic(&self, group: &AbelianGroup) -> bool {
        let (free, torsion) = self.invariants(group);
        free + torsion.len() <= 1
    }
}

/// A finitely generated abelian group presented as `Z^n / rowspan(relations)`.
/// Subgroups correspond to lattices between the relation lattice and `Z^n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    pub n: usize,
    pub relations: IntMatrix,
}

impl Presentation {
    pub fn free(n: usize) -> Self {
        Presentation { n, relations: IntMatrix::zero(0, n) }
    }

    pub fn new(n: usize, relations: IntMatrix) -> Self {
        assert_eq!(relations.cols(), n);
        Presentation { n, relations }
    }

    /// HNF basis of the lattice spanned by `gens` and the relations.
    pub fn sublattice(&self, gens: &[Vec<BigInt>]) -> IntMatrix {
        let mut rows: Vec<Vec<BigInt>> = gens.to_vec();
        for i in 0..self.relations.rows() {
            rows.push(self.relations.row_vec(i));
        }
        if rows.is_empty() {
            return IntMatrix::zero(0, self.n);
        }
        hermite_reduce(&IntMatrix::from_rows(rows)).without_zero_rows()
    }

    pub fn full_lattice(&self) -> IntMatrix {
        IntMatrix::identity(self.n)
    }

    /// The π'-isolator of the subgroup given by `sub` (a lattice containing
    /// the relations): the smallest lattice `L ⊇ sub` such that `Z^n / L` has
    /// no π'-torsion. Computed from the Smith decomposition of `sub`.
    pub fn pi_prime_isolator(&self, sub: &IntMatrix, pi: &PiSet) -> IntMatrix {
        assert_eq!(sub.cols(), self.n);
        if sub.rows() == 0 {
            // trivial subgroup of a free group: already isolated
            return IntMatrix::zero(0, self.n);
        }
        let (s, _, v) = smith_normal_form(sub);
        let vinv = unimodular_inverse(&v);
        let k = sub.rows().min(self.n);
        let mut gens: Vec<Vec<BigInt>> = Vec::new();
        for i in 0..k {
            let d = &s[(i, i)];
            if d.is_zero() {
                continue;
            }
            let (d_pi, _) = pi_part(d, pi);
            let mut row = vinv.row_vec(i);
            for x in &mut row {
                *x *= &d_pi;
            }
            gens.push(row);
        }
        if gens.is_empty() {
            return IntMatrix::zero(0, self.n);
        }
        hermite_reduce(&IntMatrix::from_rows(gens)).without_zero_rows()
    }

    /// True iff the subgroup equals its own π'-isolator.
    pub fn is_pi_prime_isolated(&self, sub: &IntMatrix, pi: &PiSet) -> bool {
        self.pi_prime_isolator(sub, pi) == hermite_reduce(sub).without_zero_rows()
    }

    /// Canonical coordinates of an element modulo the relations.
    pub fn reduce(&self, v: &[BigInt]) -> Vec<BigInt> {
        AbelianSubgroup { dim: self.n, basis: hermite_reduce(&self.relations).without_zero_rows() }
            .coset_rep(v)
    }

    /// Abstract invariants `(free_rank, torsion)` of `sub / relations`.
    pub fn subgroup_invariants(&self, sub: &IntMatrix) -> (usize, Vec<BigInt>) {
        let basis = hermite_reduce(sub).without_zero_rows();
        if basis.rows() == 0 {
            return (0, Vec::new());
        }
        // express every relation row in basis coordinates
        let mut rel_coords: Vec<Vec<BigInt>> = Vec::new();
        for i in 0..self.relations.rows() {
            let row = self.relations.row_vec(i);
            let coeffs = solve_row(&basis, &row)
                .expect("relations must lie inside the subgroup lattice");
            rel_coords.push(coeffs);
        }
        let r = basis.rows();
        let c = if rel_coords.is_empty() {
            IntMatrix::zero(0, r)
        } else {
            IntMatrix::from_rows(rel_coords)
        };
        let (s, _, _) = smith_normal_form(&c);
        let k = s.rows().min(s.cols());
        let mut torsion = Vec::new();
        let mut rank = 0usize;
        for i in 0..k {
            let d = &s[(i, i)];
            if d.is_zero() {
                continue;
            }
            rank += 1;
            if !d.is_one() {
                torsion.push(d.clone());
            }
        }
        (r - rank, torsion)
    }
}
