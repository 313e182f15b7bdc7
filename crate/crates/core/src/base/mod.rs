//! The computable factor groups: free groups of finite rank and finitely
//! generated abelian groups, together with the subgroup operations the
//! product construction needs (membership, transversals, isolators, and the
//! cyclic-join lemma).

pub mod abelian;
pub mod freegroup;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::arith::{pi_part, PiSet};
use crate::error::GroupError;
pub use abelian::{AbelianGroup, AbelianSubgroup, Presentation};
pub use freegroup::{FreeCyclicSubgroup, FreeGroup, FreeWord};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BaseGroup {
    Free(FreeGroup),
    Abelian(AbelianGroup),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BaseElement {
    Word(FreeWord),
    Vector(Vec<BigInt>),
}

#[derive(Debug, Clone)]
pub enum BaseSubgroup {
    FreeCyclic(FreeCyclicSubgroup),
    Lattice(AbelianSubgroup),
}

impl PartialEq for BaseSubgroup {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            // ⟨r^m⟩ and ⟨r⁻ᵐ⟩ are the same subgroup
            (BaseSubgroup::FreeCyclic(a), BaseSubgroup::FreeCyclic(b)) => {
                a.mult() == b.mult() && (a.root() == b.root() || *a.root() == b.root().inverse())
            }
            (BaseSubgroup::Lattice(a), BaseSubgroup::Lattice(b)) => a == b,
            _ => false,
        }
    }
}
impl Eq for BaseSubgroup {}

/// Data returned by a successful subgroup membership test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MembershipWitness {
    /// `x = gen^e` in a cyclic subgroup.
    Exponent(BigInt),
    /// Integer combination of the stored lattice basis rows.
    Combination(Vec<BigInt>),
}

impl BaseGroup {
    pub fn free(letters: Vec<String>) -> Self {
        BaseGroup::Free(FreeGroup::new(letters))
    }

    pub fn abelian(free_rank: usize, moduli: Vec<BigInt>) -> Result<Self, GroupError> {
        Ok(BaseGroup::Abelian(AbelianGroup::new(free_rank, moduli)?))
    }

    pub fn validate(&self, x: &BaseElement) -> Result<(), GroupError> {
        match (self, x) {
            (BaseGroup::Free(g), BaseElement::Word(w)) => g.validate(w),
            (BaseGroup::Abelian(g), BaseElement::Vector(v)) => g.validate(v),
            _ => Err(GroupError::ParentMismatch("element kind does not match group kind".into())),
        }
    }

    pub fn identity(&self) -> BaseElement {
        match self {
            BaseGroup::Free(_) => BaseElement::Word(FreeWord::identity()),
            BaseGroup::Abelian(g) => BaseElement::Vector(g.identity()),
        }
    }

    pub fn is_identity(&self, x: &BaseElement) -> bool {
        match x {
            BaseElement::Word(w) => w.is_identity(),
            BaseElement::Vector(v) => v.iter().all(Zero::is_zero),
        }
    }

    pub fn mul(&self, a: &BaseElement, b: &BaseElement) -> Result<BaseElement, GroupError> {
        self.validate(a)?;
        self.validate(b)?;
        Ok(match (self, a, b) {
            (BaseGroup::Free(_), BaseElement::Word(x), BaseElement::Word(y)) => {
                BaseElement::Word(x.mul(y))
            }
            (BaseGroup::Abelian(g), BaseElement::Vector(x), BaseElement::Vector(y)) => {
                BaseElement::Vector(g.add(x, y))
            }
            _ => unreachable!(),
        })
    }

    pub fn inv(&self, a: &BaseElement) -> Result<BaseElement, GroupError> {
        self.validate(a)?;
        Ok(match (self, a) {
            (BaseGroup::Free(_), BaseElement::Word(x)) => BaseElement::Word(x.inverse()),
            (BaseGroup::Abelian(g), BaseElement::Vector(x)) => BaseElement::Vector(g.neg(x)),
            _ => unreachable!(),
        })
    }

    pub fn pow(&self, a: &BaseElement, n: &BigInt) -> Result<BaseElement, GroupError> {
        self.validate(a)?;
        Ok(match (self, a) {
            (BaseGroup::Free(_), BaseElement::Word(x)) => BaseElement::Word(x.pow(n)?),
            (BaseGroup::Abelian(g), BaseElement::Vector(x)) => BaseElement::Vector(g.scale(x, n)),
            _ => unreachable!(),
        })
    }

    /// Canonicalizes raw element data (reduces torsion coordinates).
    pub fn canonicalize(&self, a: BaseElement) -> Result<BaseElement, GroupError> {
        self.validate(&a)?;
        Ok(match (self, a) {
            (BaseGroup::Abelian(g), BaseElement::Vector(v)) => BaseElement::Vector(g.reduce(v)),
            (_, a) => a,
        })
    }

    pub fn format_element(&self, a: &BaseElement) -> String {
        match (self, a) {
            (BaseGroup::Free(g), BaseElement::Word(w)) => g.format_word(w),
            (_, BaseElement::Vector(v)) => {
                let coords: Vec<String> = v.iter().map(BigInt::to_string).collect();
                format!("({})", coords.join(", "))
            }
            _ => "<mismatched element>".into(),
        }
    }

    /// `w = r^m` with `r` not a proper power (free groups only).
    pub fn primitive_root(&self, a: &BaseElement) -> Result<(BaseElement, BigInt), GroupError> {
        self.validate(a)?;
        match a {
            BaseElement::Word(w) => {
                let (r, m) = w.primitive_root()?;
                Ok((BaseElement::Word(r), m))
            }
            BaseElement::Vector(_) => {
                Err(GroupError::UnsupportedShape("primitive roots live in free groups".into()))
            }
        }
    }

    /// Cyclic subgroup ⟨gen⟩; for abelian groups this is a rank-≤1 lattice.
    pub fn cyclic_subgroup(&self, gen: &BaseElement) -> Result<BaseSubgroup, GroupError> {
        self.validate(gen)?;
        match (self, gen) {
            (BaseGroup::Free(_), BaseElement::Word(w)) => {
                Ok(BaseSubgroup::FreeCyclic(FreeCyclicSubgroup::new(w.clone())?))
            }
            (BaseGroup::Abelian(g), BaseElement::Vector(v)) => {
                Ok(BaseSubgroup::Lattice(AbelianSubgroup::from_generators(g, &[v.clone()])))
            }
            _ => unreachable!(),
        }
    }

    pub fn subgroup_from_generators(
        &self,
        gens: &[BaseElement],
    ) -> Result<BaseSubgroup, GroupError> {
        match self {
            BaseGroup::Free(_) => {
                let nontrivial: Vec<&BaseElement> =
                    gens.iter().filter(|g| !self.is_identity(g)).collect();
                match nontrivial.as_slice() {
                    [single] => self.cyclic_subgroup(single),
                    _ => Err(GroupError::UnsupportedShape(
                        "free-factor subgroups must be cyclic".into(),
                    )),
                }
            }
            BaseGroup::Abelian(g) => {
                let mut vs = Vec::new();
                for gen in gens {
                    self.validate(gen)?;
                    let BaseElement::Vector(v) = gen else { unreachable!() };
                    vs.push(v.clone());
                }
                Ok(BaseSubgroup::Lattice(AbelianSubgroup::from_generators(g, &vs)))
            }
        }
    }

    pub fn subgroup_contains(&self, h: &BaseSubgroup, x: &BaseElement) -> bool {
        self.membership(h, x).is_some()
    }

    /// Factorization data for `x ∈ H`, when it exists.
    pub fn membership(&self, h: &BaseSubgroup, x: &BaseElement) -> Option<MembershipWitness> {
        match (h, x) {
            (BaseSubgroup::FreeCyclic(c), BaseElement::Word(w)) => {
                c.membership(w).map(MembershipWitness::Exponent)
            }
            (BaseSubgroup::Lattice(l), BaseElement::Vector(v)) => {
                l.membership_combination(v).map(MembershipWitness::Combination)
            }
            _ => None,
        }
    }

    /// Canonical representative of the right coset `H·x`.
    pub fn coset_rep(&self, h: &BaseSubgroup, x: &BaseElement) -> Result<BaseElement, GroupError> {
        self.validate(x)?;
        match (h, x) {
            (BaseSubgroup::FreeCyclic(c), BaseElement::Word(w)) => {
                Ok(BaseElement::Word(c.coset_rep(w)))
            }
            (BaseSubgroup::Lattice(l), BaseElement::Vector(v)) => {
                Ok(BaseElement::Vector(l.coset_rep(v)))
            }
            _ => Err(GroupError::UnsupportedShape("subgroup does not match the group".into())),
        }
    }

    /// The π'-isolator of ⟨c⟩: in a free group, with `c = r^m` this is
    /// `⟨r^q⟩` where `q` is the π-part of `m`; in an abelian group it is the
    /// π'-saturation of the lattice.
    pub fn isolator_cyclic(
        &self,
        c: &BaseElement,
        pi: &PiSet,
    ) -> Result<BaseSubgroup, GroupError> {
        self.validate(c)?;
        match (self, c) {
            (BaseGroup::Free(_), BaseElement::Word(w)) => {
                let (root, m) = w.primitive_root()?;
                let (q, _) = pi_part(&m, pi);
                Ok(BaseSubgroup::FreeCyclic(FreeCyclicSubgroup::new(root.pow(&q)?)?))
            }
            (BaseGroup::Abelian(g), BaseElement::Vector(v)) => {
                let pres = g.presentation();
                let sub = pres.sublattice(&[v.clone()]);
                let iso = pres.pi_prime_isolator(&sub, pi);
                Ok(BaseSubgroup::Lattice(AbelianSubgroup::from_lattice(g.dim(), iso)))
            }
            _ => unreachable!(),
        }
    }

    /// Identical to the π'-isolator for the group classes in scope, where the
    /// Ω_π-closure of a π'-isolated cyclic subgroup collapses onto it.
    pub fn separable_closure_cyclic(
        &self,
        c: &BaseElement,
        pi: &PiSet,
    ) -> Result<BaseSubgroup, GroupError> {
        self.isolator_cyclic(c, pi)
    }

    /// Whether `x^q ∈ H` for a π'-number `q` always forces `x ∈ H`.
    pub fn is_isolated_subgroup(&self, h: &BaseSubgroup, pi: &PiSet) -> Result<bool, GroupError> {
        match (self, h) {
            (BaseGroup::Free(_), BaseSubgroup::FreeCyclic(c)) => Ok(pi.is_pi_number(c.mult())),
            (BaseGroup::Abelian(g), BaseSubgroup::Lattice(l)) => {
                Ok(g.presentation().is_pi_prime_isolated(l.basis(), pi))
            }
            _ => Err(GroupError::UnsupportedShape("subgroup does not match the group".into())),
        }
    }

    /// True when the group has no element of π'-prime order.
    pub fn pi_prime_torsion_free(&self, pi: &PiSet) -> bool {
        match self {
            BaseGroup::Free(_) => true,
            BaseGroup::Abelian(g) => g.pi_prime_torsion_free(pi),
        }
    }

    /// Non-isolation witness for a cyclic subgroup ⟨c⟩, if one exists:
    /// `(x, q)` with `q` a π'-prime, `x^q ∈ ⟨c⟩`, `x ∉ ⟨c⟩`.
    pub fn non_isolation_witness(
        &self,
        c: &BaseElement,
        pi: &PiSet,
    ) -> Result<Option<(BaseElement, BigInt)>, GroupError> {
        if self.is_identity(c) {
            // ⟨1⟩: a witness is any π'-torsion element
            if let BaseGroup::Abelian(g) = self {
                for (i, m) in g.moduli().iter().enumerate() {
                    let (_, t) = pi_part(m, pi);
                    if !t.is_one() {
                        let q = smallest_prime_factor(&t);
                        let mut v = g.identity();
                        v[g.free_rank() + i] = m / &q;
                        return Ok(Some((BaseElement::Vector(v), q)));
                    }
                }
            }
            return Ok(None);
        }
        let sub = self.cyclic_subgroup(c)?;
        match (self, c, &sub) {
            (BaseGroup::Free(_), BaseElement::Word(_), BaseSubgroup::FreeCyclic(cy)) => {
                let (_, t) = pi_part(cy.mult(), pi);
                if t.is_one() {
                    return Ok(None);
                }
                // root^(m/p) escapes, where p is a π'-prime dividing m
                let p = smallest_prime_factor(&t);
                let e = cy.mult() / &p;
                let x = cy.root().pow(&e)?;
                Ok(Some((BaseElement::Word(x), p)))
            }
            (BaseGroup::Abelian(g), BaseElement::Vector(_), BaseSubgroup::Lattice(l)) => {
                let pres = g.presentation();
                let iso = pres.pi_prime_isolator(l.basis(), pi);
                let iso_sub = AbelianSubgroup::from_lattice(g.dim(), iso);
                if iso_sub == *l {
                    return Ok(None);
                }
                // pick an isolator basis element outside ⟨c⟩ and certify it
                for i in 0..iso_sub.basis().rows() {
                    let cand = g.reduce(iso_sub.basis().row_vec(i));
                    if l.contains(&cand) {
                        continue;
                    }
                    let mut q = BigInt::one();
                    loop {
                        q = next_pi_prime_number(&q, pi);
                        let power = g.scale(&cand, &q);
                        if l.contains(&power) {
                            return Ok(Some((BaseElement::Vector(cand), q)));
                        }
                        assert!(
                            q < BigInt::from(1_000_000u64),
                            "isolator element without a bounded π'-root exponent"
                        );
                    }
                }
                Ok(None)
            }
            _ => unreachable!(),
        }
    }

    /// The cyclic-join lemma: for commuting `x`, `y` with `y^q ∈ ⟨x⟩` and a
    /// π'-torsion-free ambient group, returns `t` with `⟨x, y⟩ = ⟨t⟩`.
    pub fn cyclic_join(
        &self,
        x: &BaseElement,
        y: &BaseElement,
        q: &BigInt,
    ) -> Result<BaseElement, GroupError> {
        self.validate(x)?;
        self.validate(y)?;
        if !q.is_positive() {
            return Err(GroupError::Precondition("q must be positive".into()));
        }
        let xy = self.mul(x, y)?;
        let yx = self.mul(y, x)?;
        if xy != yx {
            return Err(GroupError::Precondition("x and y must commute".into()));
        }
        self.cyclic_join_inner(x, y, q)
    }

    fn cyclic_join_inner(
        &self,
        x: &BaseElement,
        y: &BaseElement,
        q: &BigInt,
    ) -> Result<BaseElement, GroupError> {
        if q.is_one() {
            if self.cyclic_exponent_of(x, y).is_none() {
                return Err(GroupError::Precondition("y^q does not lie in ⟨x⟩".into()));
            }
            return Ok(x.clone());
        }
        let p = smallest_prime_factor(q);
        let rest = q / &p;
        let y_part = self.pow(y, &rest)?;
        let t = self.join_prime(x, &y_part, &p)?;
        self.cyclic_join_inner(&t, y, &rest)
    }

    /// One prime step of the lemma: `y^p = x^k`; either `p | k` (then
    /// `y = x^{k/p}`) or `ku + pv = 1` gives the generator `y^u x^v`.
    fn join_prime(
        &self,
        x: &BaseElement,
        y: &BaseElement,
        p: &BigInt,
    ) -> Result<BaseElement, GroupError> {
        let yp = self.pow(y, p)?;
        let k = self
            .cyclic_exponent_of(x, &yp)
            .ok_or_else(|| GroupError::Precondition("y^q does not lie in ⟨x⟩".into()))?;
        if (&k % p).is_zero() {
            let l = &k / p;
            let xl = self.pow(x, &l)?;
            if xl != *y {
                return Err(GroupError::Precondition(
                    "ambient group has π'-torsion: (y⁻¹xˡ)^q = 1 with y ≠ xˡ".into(),
                ));
            }
            Ok(x.clone())
        } else {
            let (_, u, v) = crate::arith::bezout(&k, p).expect("k, p not both zero");
            let yu = self.pow(y, &u)?;
            let xv = self.pow(x, &v)?;
            self.mul(&yu, &xv)
        }
    }

    /// Some `e` with `x^e = v`, when `v ∈ ⟨x⟩`.
    pub fn cyclic_exponent_of(&self, x: &BaseElement, v: &BaseElement) -> Option<BigInt> {
        match (self, x, v) {
            (BaseGroup::Free(_), BaseElement::Word(xw), BaseElement::Word(vw)) => {
                if xw.is_identity() {
                    return vw.is_identity().then(BigInt::zero);
                }
                FreeCyclicSubgroup::new(xw.clone()).ok()?.membership(vw)
            }
            (BaseGroup::Abelian(g), BaseElement::Vector(xv), BaseElement::Vector(vv)) => {
                g.cyclic_exponent(xv, vv)
            }
            _ => None,
        }
    }
}

fn smallest_prime_factor(n: &BigInt) -> BigInt {
    assert!(*n > BigInt::one());
    let mut d = BigInt::from(2);
    while &d * &d <= *n {
        if (n % &d).is_zero() {
            return d;
        }
        d += 1u32;
    }
    n.clone()
}

fn next_pi_prime_number(after: &BigInt, pi: &PiSet) -> BigInt {
    let mut q = after + 1u32;
    loop {
        if q > BigInt::one() && pi.is_pi_prime_number(&q) {
            return q;
        }
        q += 1u32;
    }
}
