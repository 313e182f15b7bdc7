//! Homomorphisms from `G` onto cataloged finite p-groups. A member of
//! `Ω_π(G)` is represented implicitly as the kernel of a commuting-compatible
//! pair of factor homomorphisms into a common finite target.

use num_bigint::BigInt;
use num_traits::Zero;
use std::sync::Arc;

use crate::arith::PiSet;
use crate::base::{BaseElement, BaseGroup};
use crate::commprod::{CommProdSpec, FactorTag, GNormalForm, GWord};
use crate::error::EnumError;
use crate::finite::{pgroup_catalog, FiniteGroup};

/// Homomorphism from a base group into a finite group, stored by generator
/// images (letter images for a free source; coordinate-generator images for
/// an abelian source).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaseHom {
    pub images: Vec<usize>,
}

impl BaseHom {
    /// Generator count of the source group as used by the image tuple.
    pub fn generator_count(group: &BaseGroup) -> usize {
        match group {
            BaseGroup::Free(f) => f.rank(),
            BaseGroup::Abelian(g) => g.dim(),
        }
    }

    /// Whether the image tuple defines a homomorphism: free sources are
    /// unrestricted; abelian sources need pairwise commuting images with
    /// orders dividing the torsion moduli.
    pub fn is_well_defined(group: &BaseGroup, target: &FiniteGroup, images: &[usize]) -> bool {
        if images.len() != Self::generator_count(group) {
            return false;
        }
        match group {
            BaseGroup::Free(_) => true,
            BaseGroup::Abelian(g) => {
                for (i, &x) in images.iter().enumerate() {
                    for &y in &images[i + 1..] {
                        if target.mul(x, y) != target.mul(y, x) {
                            return false;
                        }
                    }
                    if i >= g.free_rank() {
                        let m = &g.moduli()[i - g.free_rank()];
                        if !(m % BigInt::from(target.element_order(x))).is_zero() {
                            return false;
                        }
                    }
                }
                true
            }
        }
    }

    pub fn eval(&self, group: &BaseGroup, target: &FiniteGroup, x: &BaseElement) -> usize {
        match (group, x) {
            (BaseGroup::Free(_), BaseElement::Word(w)) => {
                w.runs().iter().fold(0usize, |acc, (letter, exp)| {
                    target.mul(acc, target.pow_big(self.images[*letter], exp))
                })
            }
            (BaseGroup::Abelian(_), BaseElement::Vector(v)) => {
                v.iter().enumerate().fold(0usize, |acc, (i, c)| {
                    target.mul(acc, target.pow_big(self.images[i], c))
                })
            }
            _ => panic!("element does not match the hom's source group"),
        }
    }
}

/// Complete list of homomorphisms `X → P`, in lexicographic image-tuple
/// order. Fails when the tuple space exceeds `budget`.
pub fn enumerate_base_homs(
    group: &BaseGroup,
    target: &FiniteGroup,
    budget: u128,
) -> Result<Vec<BaseHom>, EnumError> {
    let gens = BaseHom::generator_count(group);
    let space = (target.order() as u128).checked_pow(gens as u32).unwrap_or(u128::MAX);
    if space > budget {
        return Err(EnumError::Budget(space));
    }
    let mut out = Vec::new();
    let mut tuple = vec![0usize; gens];
    loop {
        if BaseHom::is_well_defined(group, target, &tuple) {
            out.push(BaseHom { images: tuple.clone() });
        }
        // odometer increment
        let mut i = gens;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            tuple[i] += 1;
            if tuple[i] < target.order() {
                break;
            }
            tuple[i] = 0;
        }
    }
}

/// `[φ_A(h), φ_B(k)] = 1` for every pair of subgroup generators; since the
/// commutant of a set equals that of the subgroup it generates, this settles
/// elementwise commutation of the images of `H` and `K`.
pub fn commuting_compatible(
    spec: &CommProdSpec,
    target: &FiniteGroup,
    phi_a: &BaseHom,
    phi_b: &BaseHom,
) -> bool {
    spec.subgroup_gens(FactorTag::A).iter().all(|hg| {
        let x = phi_a.eval(spec.factor(FactorTag::A), target, hg);
        spec.subgroup_gens(FactorTag::B).iter().all(|kg| {
            let y = phi_b.eval(spec.factor(FactorTag::B), target, kg);
            target.mul(x, y) == target.mul(y, x)
        })
    })
}

/// A homomorphism `G → P` given by a commuting-compatible pair.
#[derive(Debug, Clone)]
pub struct GHom {
    pub target: Arc<FiniteGroup>,
    pub phi_a: BaseHom,
    pub phi_b: BaseHom,
}

impl GHom {
    pub fn new(
        spec: &CommProdSpec,
        target: Arc<FiniteGroup>,
        phi_a: BaseHom,
        phi_b: BaseHom,
    ) -> Result<GHom, EnumError> {
        assert!(
            commuting_compatible(spec, &target, &phi_a, &phi_b),
            "image pair violates the commuting relation"
        );
        Ok(GHom { target, phi_a, phi_b })
    }

    pub fn apply_word(&self, spec: &CommProdSpec, w: &GWord) -> usize {
        w.letters().iter().fold(0usize, |acc, l| {
            let img = match l.tag {
                FactorTag::A => self.phi_a.eval(spec.factor(FactorTag::A), &self.target, &l.elt),
                FactorTag::B => self.phi_b.eval(spec.factor(FactorTag::B), &self.target, &l.elt),
            };
            self.target.mul(acc, img)
        })
    }

    /// Evaluation factors through normalization: `apply(w) = apply(NF(w))`.
    pub fn apply_nf(&self, spec: &CommProdSpec, nf: &GNormalForm) -> usize {
        self.apply_word(spec, &spec.to_word(nf))
    }
}

/// Catalog targets admitted for a prime set, ordered by (order, prime,
/// catalog position).
pub fn catalog_targets(pi: &PiSet, max_order: u64) -> Vec<FiniteGroup> {
    let primes: Vec<u64> = match pi {
        PiSet::SinglePrime(p) => vec![*p],
        PiSet::AllPrimes => {
            (2..=max_order).filter(|&n| crate::arith::is_prime_u64(n)).collect()
        }
    };
    let mut tagged: Vec<(usize, u64, usize, FiniteGroup)> = Vec::new();
    for p in primes {
        let mut cap = 1u64;
        for _ in 0..4 {
            if cap.saturating_mul(p) > max_order {
                break;
            }
            cap *= p;
        }
        if cap == 1 {
            continue;
        }
        let groups = pgroup_catalog(p, cap).expect("cap is a p-power");
        for (i, g) in groups.into_iter().enumerate() {
            tagged.push((g.order(), p, i, g));
        }
    }
    tagged.sort_by(|a, b| (a.0, a.1, a.2).cmp(&(b.0, b.1, b.2)));
    tagged.into_iter().map(|(_, _, _, g)| g).collect()
}

/// Deterministic stream of all commuting-compatible homomorphism pairs into
/// catalog targets of order ≤ max_order, ordered by target then by the two
/// image tuples.
pub struct GHomIter<'a> {
    spec: &'a CommProdSpec,
    targets: Vec<Arc<FiniteGroup>>,
    t_idx: usize,
    homs_a: Vec<BaseHom>,
    homs_b: Vec<BaseHom>,
    i: usize,
    j: usize,
    budget: u128,
}

impl<'a> GHomIter<'a> {
    pub fn new(
        spec: &'a CommProdSpec,
        pi: &PiSet,
        max_order: u64,
        budget: u128,
    ) -> Result<GHomIter<'a>, EnumError> {
        let targets: Vec<Arc<FiniteGroup>> =
            catalog_targets(pi, max_order).into_iter().map(Arc::new).collect();
        // fail early if any admitted target would blow the tuple budget
        for t in &targets {
            for tag in [FactorTag::A, FactorTag::B] {
                let gens = BaseHom::generator_count(spec.factor(tag));
                let space = (t.order() as u128).checked_pow(gens as u32).unwrap_or(u128::MAX);
                if space > budget {
                    return Err(EnumError::Budget(space));
                }
            }
        }
        Ok(GHomIter { spec, targets, t_idx: 0, homs_a: vec![], homs_b: vec![], i: 0, j: 0, budget })
    }

    fn load_target(&mut self) -> bool {
        while self.t_idx < self.targets.len() {
            let t = &self.targets[self.t_idx];
            self.homs_a =
                enumerate_base_homs(self.spec.factor(FactorTag::A), t, self.budget).expect("checked");
            self.homs_b =
                enumerate_base_homs(self.spec.factor(FactorTag::B), t, self.budget).expect("checked");
            self.i = 0;
            self.j = 0;
            if !self.homs_a.is_empty() && !self.homs_b.is_empty() {
                return true;
            }
            self.t_idx += 1;
        }
        false
    }
}

impl<'a> Iterator for GHomIter<'a> {
    type Item = GHom;

    fn next(&mut self) -> Option<GHom> {
        loop {
            if self.t_idx >= self.targets.len() {
                return None;
            }
            if self.homs_a.is_empty() {
                if !self.load_target() {
                    return None;
                }
            }
            while self.i < self.homs_a.len() {
                while self.j < self.homs_b.len() {
                    let target = self.targets[self.t_idx].clone();
                    let pa = &self.homs_a[self.i];
                    let pb = &self.homs_b[self.j];
                    self.j += 1;
                    if commuting_compatible(self.spec, &target, pa, pb) {
                        return Some(GHom {
                            target,
                            phi_a: pa.clone(),
                            phi_b: pb.clone(),
                        });
                    }
                }
                self.j = 0;
                self.i += 1;
            }
            self.t_idx += 1;
            self.homs_a.clear();
            self.homs_b.clear();
        }
    }
}
