//! The free product of two groups with commuting subgroups,
//! `G = ⟨A∗B; [H,K]=1⟩`, presented through its amalgam decomposition: with
//! `U = H×K`, `M = A ∗_H U` and `N = B ∗_K U`, the group is `M ∗_U N`.
//!
//! Elements are kept in a two-level canonical form. The global `U`-part
//! `(h, k)` sits on the left; the remaining blocks alternate between the two
//! sides, each block being a coset representative of `U` in `M` or `N`. A
//! block on the `A` side is an alternating sequence of nontrivial coset
//! representatives of `H` in `A` and nontrivial elements of `K`, starting
//! with a factor representative; `B`-side blocks are symmetric.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::arith::IntMatrix;
use crate::base::{AbelianGroup, BaseElement, BaseGroup, BaseSubgroup, Presentation};
use crate::error::{GroupError, SpecError};

/// Which free factor an object belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum FactorTag {
    A,
    B,
}

impl FactorTag {
    pub fn other(self) -> FactorTag {
        match self {
            FactorTag::A => FactorTag::B,
            FactorTag::B => FactorTag::A,
        }
    }
}

/// A letter of a raw word in `G`: an element of one of the factors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GLetter {
    pub tag: FactorTag,
    pub elt: BaseElement,
}

/// An unreduced word in `G`; identity letters are dropped on construction.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GWord {
    letters: Vec<GLetter>,
}

impl GWord {
    pub fn identity() -> Self {
        GWord::default()
    }

    pub fn new(spec: &CommProdSpec, letters: Vec<GLetter>) -> Result<Self, SpecError> {
        let mut out = Vec::new();
        for l in letters {
            let factor = spec.factor(l.tag);
            factor
                .validate(&l.elt)
                .map_err(|e| SpecError::ForeignLetter(e.to_string()))?;
            if !factor.is_identity(&l.elt) {
                out.push(l);
            }
        }
        Ok(GWord { letters: out })
    }

    pub fn letters(&self) -> &[GLetter] {
        &self.letters
    }

    pub fn concat(&self, other: &GWord) -> GWord {
        let mut letters = self.letters.clone();
        letters.extend(other.letters.iter().cloned());
        GWord { letters }
    }

    pub fn inverse(&self, spec: &CommProdSpec) -> GWord {
        GWord {
            letters: self
                .letters
                .iter()
                .rev()
                .map(|l| GLetter {
                    tag: l.tag,
                    elt: spec.factor(l.tag).inv(&l.elt).expect("validated letter"),
                })
                .collect(),
        }
    }
}

/// One syllable inside a block: either a coset representative in the block's
/// own factor, or an element of the opposite commuting subgroup (`K` inside
/// an `A`-side block, `H` inside a `B`-side block).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Syllable {
    Rep(BaseElement),
    Sub(BaseElement),
}

impl Syllable {
    fn is_rep(&self) -> bool {
        matches!(self, Syllable::Rep(_))
    }
}

/// A coset representative of `U` in `M` (side `A`) or `N` (side `B`):
/// alternating syllables starting with a factor representative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub side: FactorTag,
    pub syls: Vec<Syllable>,
}

/// The canonical form of an element of `G`: a global `U = H×K` part and a
/// strictly alternating block sequence. Two forms represent the same group
/// element iff they are field-wise identical.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GNormalForm {
    pub h: BaseElement,
    pub k: BaseElement,
    pub blocks: Vec<Block>,
}

/// Element of `U = H × K`, stored by its two components.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UElt {
    pub h: BaseElement,
    pub k: BaseElement,
}

/// The product specification: factors, commuting subgroups, and the cached
/// abstract presentation of `U = H×K`.
#[derive(Debug, Clone)]
pub struct CommProdSpec {
    a_name: String,
    b_name: String,
    a: BaseGroup,
    b: BaseGroup,
    h: BaseSubgroup,
    k: BaseSubgroup,
    h_gens: Vec<BaseElement>,
    k_gens: Vec<BaseElement>,
    u: UStructure,
}

impl CommProdSpec {
    pub fn build(
        a_name: &str,
        a: BaseGroup,
        h_gens: Vec<BaseElement>,
        b_name: &str,
        b: BaseGroup,
        k_gens: Vec<BaseElement>,
    ) -> Result<CommProdSpec, SpecError> {
        for g in &h_gens {
            a.validate(g).map_err(|e| SpecError::GeneratorOutsideFactor(e.to_string()))?;
        }
        for g in &k_gens {
            b.validate(g).map_err(|e| SpecError::GeneratorOutsideFactor(e.to_string()))?;
        }
        if let (BaseGroup::Free(fa), BaseGroup::Free(fb)) = (&a, &b) {
            for l in fa.letters() {
                if fb.letters().contains(l) {
                    return Err(SpecError::LetterClash(l.clone()));
                }
            }
        }
        let h = match &a {
            BaseGroup::Free(_) => {
                let nontrivial: Vec<BaseElement> =
                    h_gens.iter().filter(|g| !a.is_identity(g)).cloned().collect();
                match nontrivial.as_slice() {
                    [] => return Err(SpecError::IdentityGenerator),
                    [one] => a.cyclic_subgroup(one).map_err(SpecError::Group)?,
                    _ => return Err(SpecError::NonCyclicFreeSubgroup),
                }
            }
            BaseGroup::Abelian(_) => a.subgroup_from_generators(&h_gens)?,
        };
        let k = match &b {
            BaseGroup::Free(_) => {
                let nontrivial: Vec<BaseElement> =
                    k_gens.iter().filter(|g| !b.is_identity(g)).cloned().collect();
                match nontrivial.as_slice() {
                    [] => return Err(SpecError::IdentityGenerator),
                    [one] => b.cyclic_subgroup(one).map_err(SpecError::Group)?,
                    _ => return Err(SpecError::NonCyclicFreeSubgroup),
                }
            }
            BaseGroup::Abelian(_) => b.subgroup_from_generators(&k_gens)?,
        };
        let u = UStructure::build(&a, &h, &b, &k);
        Ok(CommProdSpec {
            a_name: a_name.to_string(),
            b_name: b_name.to_string(),
            a,
            b,
            h,
            k,
            h_gens,
            k_gens,
            u,
        })
    }

    pub fn factor(&self, tag: FactorTag) -> &BaseGroup {
        match tag {
            FactorTag::A => &self.a,
            FactorTag::B => &self.b,
        }
    }

    pub fn factor_name(&self, tag: FactorTag) -> &str {
        match tag {
            FactorTag::A => &self.a_name,
            FactorTag::B => &self.b_name,
        }
    }

    pub fn subgroup(&self, tag: FactorTag) -> &BaseSubgroup {
        match tag {
            FactorTag::A => &self.h,
            FactorTag::B => &self.k,
        }
    }

    pub fn subgroup_gens(&self, tag: FactorTag) -> &[BaseElement] {
        match tag {
            FactorTag::A => &self.h_gens,
            FactorTag::B => &self.k_gens,
        }
    }

    pub fn u_structure(&self) -> &UStructure {
        &self.u
    }

    pub fn u_identity(&self) -> UElt {
        UElt { h: self.a.identity(), k: self.b.identity() }
    }

    fn u_is_identity(&self, u: &UElt) -> bool {
        self.a.is_identity(&u.h) && self.b.is_identity(&u.k)
    }

    /// Component of `u` inside the amalgamated subgroup of `side` (`H` for
    /// side `A`), and the opposite component.
    fn u_own(&self, side: FactorTag, u: &UElt) -> BaseElement {
        match side {
            FactorTag::A => u.h.clone(),
            FactorTag::B => u.k.clone(),
        }
    }

    fn u_from_parts(&self, side: FactorTag, own: BaseElement, other: BaseElement) -> UElt {
        match side {
            FactorTag::A => UElt { h: own, k: other },
            FactorTag::B => UElt { h: other, k: own },
        }
    }

    pub fn identity_nf(&self) -> GNormalForm {
        GNormalForm { h: self.a.identity(), k: self.b.identity(), blocks: Vec::new() }
    }

    pub fn is_identity_nf(&self, nf: &GNormalForm) -> bool {
        nf.blocks.is_empty() && self.a.is_identity(&nf.h) && self.b.is_identity(&nf.k)
    }

    /// Canonical form of a raw word.
    pub fn normalize(&self, w: &GWord) -> GNormalForm {
        let mut nf = self.identity_nf();
        for l in &w.letters {
            self.push_letter(&mut nf, l.tag, l.elt.clone());
        }
        nf
    }

    /// Canonical form of `x·y`.
    pub fn mul(&self, x: &GNormalForm, y: &GNormalForm) -> GNormalForm {
        let mut nf = x.clone();
        for l in self.to_word(y).letters {
            self.push_letter(&mut nf, l.tag, l.elt);
        }
        nf
    }

    pub fn inv(&self, x: &GNormalForm) -> GNormalForm {
        self.normalize(&self.to_word(x).inverse(self))
    }

    /// Flattens a normal form back into a raw word; normalizing the result
    /// reproduces the form.
    pub fn to_word(&self, nf: &GNormalForm) -> GWord {
        let mut letters = Vec::new();
        if !self.a.is_identity(&nf.h) {
            letters.push(GLetter { tag: FactorTag::A, elt: nf.h.clone() });
        }
        if !self.b.is_identity(&nf.k) {
            letters.push(GLetter { tag: FactorTag::B, elt: nf.k.clone() });
        }
        for block in &nf.blocks {
            for syl in &block.syls {
                let (tag, elt) = match syl {
                    Syllable::Rep(e) => (block.side, e.clone()),
                    Syllable::Sub(e) => (block.side.other(), e.clone()),
                };
                letters.push(GLetter { tag, elt });
            }
        }
        GWord { letters }
    }

    /// Reduced syllable length: 0 for the identity, 1 for nontrivial
    /// elements of `U`, otherwise the number of blocks.
    pub fn syllable_length(&self, nf: &GNormalForm) -> usize {
        if nf.blocks.is_empty() {
            usize::from(!self.is_identity_nf(nf))
        } else {
            nf.blocks.len()
        }
    }

    /// Splits `nf = conj · core · conj⁻¹` with the core of length ≤ 1 or
    /// with first and last blocks on different sides.
    pub fn cyclically_reduce(&self, nf: &GNormalForm) -> (GNormalForm, GNormalForm) {
        let mut core = nf.clone();
        let mut conj = self.identity_nf();
        while core.blocks.len() >= 2
            && core.blocks.first().unwrap().side == core.blocks.last().unwrap().side
        {
            let before = core.blocks.len();
            let step = GNormalForm {
                h: core.h.clone(),
                k: core.k.clone(),
                blocks: vec![core.blocks[0].clone()],
            };
            core = self.mul(&self.mul(&self.inv(&step), &core), &step);
            conj = self.mul(&conj, &step);
            assert!(core.blocks.len() < before, "cyclic reduction must shorten");
        }
        (core, conj)
    }

    /// Group power in canonical form. Exponents are unrestricted on
    /// `U`-elements; elsewhere the block sequence must stay expandable.
    pub fn power(&self, nf: &GNormalForm, q: &BigInt) -> Result<GNormalForm, GroupError> {
        if nf.blocks.is_empty() {
            return Ok(GNormalForm {
                h: self.a.pow(&nf.h, q)?,
                k: self.b.pow(&nf.k, q)?,
                blocks: Vec::new(),
            });
        }
        let mut e = i64::try_from(q).map_err(|_| GroupError::ExponentOverflow)?;
        let mut base = if e < 0 {
            e = e.checked_neg().ok_or(GroupError::ExponentOverflow)?;
            self.inv(nf)
        } else {
            nf.clone()
        };
        let mut acc = self.identity_nf();
        let mut exp = e as u64;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            exp >>= 1;
            if exp > 0 {
                base = self.mul(&base, &base);
            }
        }
        Ok(acc)
    }

    /// Exponent `e` with `g = c^e`, if one exists. Powers of elements whose
    /// cyclically reduced core has length ≥ 2 are pinned by the length law;
    /// cores inside a factor or inside `U` reduce to base-group or lattice
    /// membership.
    pub fn cyclic_membership(&self, g: &GNormalForm, c: &GNormalForm) -> Option<BigInt> {
        if self.is_identity_nf(c) {
            return self.is_identity_nf(g).then(BigInt::zero);
        }
        let (core, conj) = self.cyclically_reduce(c);
        let g_t = self.mul(&self.mul(&self.inv(&conj), g), &conj);
        let n = self.syllable_length(&core);
        if core.blocks.len() >= 2 {
            let m = self.syllable_length(&g_t);
            if g_t.blocks.is_empty() {
                return self.is_identity_nf(&g_t).then(BigInt::zero);
            }
            if m % n != 0 {
                return None;
            }
            let e = BigInt::from((m / n) as u64);
            if self.power(&core, &e).ok()? == g_t {
                return Some(e);
            }
            if self.power(&core, &(-&e)).ok()? == g_t {
                return Some(-e);
            }
            return None;
        }
        if core.blocks.is_empty() {
            // core ∈ U: solve e·core = g in the abstract lattice of U
            if !g_t.blocks.is_empty() {
                return None;
            }
            let cu = UElt { h: core.h.clone(), k: core.k.clone() };
            let gu = UElt { h: g_t.h.clone(), k: g_t.k.clone() };
            let c_coords = self.u.from_u(self, &cu)?;
            let g_coords = self.u.from_u(self, &gu)?;
            return self.u.pres.cyclic_exponent(&c_coords, &g_coords);
        }
        // single block: descend into the inner amalgam of that side
        let side = core.blocks[0].side;
        let m_c = self.side_elt_of_nf(&core)?;
        let m_g = self.side_elt_of_nf_on(side, &g_t)?;
        let (w, c_red) = self.inner_cyclic_reduce(side, m_c);
        let w_inv = self.side_inv(side, &w);
        let g_red = self.side_mul(side, &self.side_mul(side, &w_inv, &m_g), &w);
        match self.side_place(side, &c_red) {
            SidePlace::InFactor(y) => {
                let g_f = self.side_to_factor(side, &g_red)?;
                self.factor(side).cyclic_exponent_of(&y, &g_f)
            }
            SidePlace::InU(u) => {
                let g_u = self.side_to_u(side, &g_red)?;
                let c_coords = self.u.from_u(self, &u)?;
                let g_coords = self.u.from_u(self, &g_u)?;
                self.u.pres.cyclic_exponent(&c_coords, &g_coords)
            }
            SidePlace::Mixed(len) => {
                let glen = g_red.syls.len();
                if glen == 0 {
                    return self.side_is_identity(side, &g_red).then(BigInt::zero);
                }
                if glen % len != 0 {
                    return None;
                }
                let e = (glen / len) as i64;
                if self.side_pow(side, &c_red, e) == g_red {
                    return Some(BigInt::from(e));
                }
                if self.side_pow(side, &c_red, -e) == g_red {
                    return Some(BigInt::from(-e));
                }
                None
            }
        }
    }

    // ---- block/letter machinery -------------------------------------------

    fn push_letter(&self, nf: &mut GNormalForm, tag: FactorTag, x: BaseElement) {
        if self.factor(tag).is_identity(&x) {
            return;
        }
        if nf.blocks.last().map(|b| b.side) == Some(tag) {
            let block = nf.blocks.pop().unwrap();
            let mut m = SideElt { amalg: self.factor(tag).identity(), syls: block.syls };
            self.side_push_factor(tag, &mut m, x);
            let (u1, rest) = self.side_u_decompose(tag, m);
            self.twist_in(nf, u1);
            if !rest.is_empty() {
                nf.blocks.push(Block { side: tag, syls: rest });
            }
            return;
        }
        // x enters fresh: split off its amalgamated part
        let (s, t) = self.decompose_factor(tag, &x);
        let other_id = self.factor(tag.other()).identity();
        let u1 = self.u_from_parts(tag, s, other_id);
        self.twist_in(nf, u1);
        if !self.factor(tag).is_identity(&t) {
            nf.blocks.push(Block { side: tag, syls: vec![Syllable::Rep(t)] });
        }
    }

    /// Pushes `u ∈ U` leftward through the block sequence into the global
    /// `U`-part. A block on side `A` absorbs the `K`-component and forwards a
    /// transformed `H`-component, so at most two blocks are touched.
    fn twist_in(&self, nf: &mut GNormalForm, mut u: UElt) {
        for block in nf.blocks.iter_mut().rev() {
            if self.u_is_identity(&u) {
                break;
            }
            let side = block.side;
            let mut m = SideElt {
                amalg: self.factor(side).identity(),
                syls: std::mem::take(&mut block.syls),
            };
            self.side_push_u(side, &mut m, &u);
            let (u_out, rest) = self.side_u_decompose(side, m);
            assert!(!rest.is_empty(), "a block cannot be absorbed into U");
            block.syls = rest;
            u = u_out;
        }
        nf.h = self.a.mul(&nf.h, &u.h).expect("validated");
        nf.k = self.b.mul(&nf.k, &u.k).expect("validated");
    }

    /// `x = s·t` with `s` in the amalgamated subgroup of the factor and `t`
    /// the canonical right-coset representative.
    fn decompose_factor(&self, tag: FactorTag, x: &BaseElement) -> (BaseElement, BaseElement) {
        let factor = self.factor(tag);
        let t = factor.coset_rep(self.subgroup(tag), x).expect("supported shapes");
        let s = factor.mul(x, &factor.inv(&t).expect("validated")).expect("validated");
        (s, t)
    }

    // ---- inner (one-sided) amalgam arithmetic ------------------------------

    /// Right-multiplies by a raw factor element.
    fn side_push_factor(&self, side: FactorTag, m: &mut SideElt, x: BaseElement) {
        let factor = self.factor(side);
        if factor.is_identity(&x) {
            return;
        }
        match m.syls.last() {
            Some(Syllable::Rep(_)) => {
                let Some(Syllable::Rep(t)) = m.syls.pop() else { unreachable!() };
                let tx = factor.mul(&t, &x).expect("validated");
                let (s, t2) = self.decompose_factor(side, &tx);
                self.side_carry(side, m, s);
                if !factor.is_identity(&t2) {
                    m.syls.push(Syllable::Rep(t2));
                }
            }
            _ => {
                let (s, t) = self.decompose_factor(side, &x);
                self.side_carry(side, m, s);
                if !factor.is_identity(&t) {
                    m.syls.push(Syllable::Rep(t));
                }
            }
        }
    }

    /// Right-multiplies by an element of the opposite commuting subgroup.
    fn side_push_sub(&self, side: FactorTag, m: &mut SideElt, y: BaseElement) {
        let other = self.factor(side.other());
        if other.is_identity(&y) {
            return;
        }
        match m.syls.last() {
            Some(Syllable::Sub(_)) => {
                let Some(Syllable::Sub(u)) = m.syls.pop() else { unreachable!() };
                let v = other.mul(&u, &y).expect("validated");
                if !other.is_identity(&v) {
                    m.syls.push(Syllable::Sub(v));
                }
            }
            _ => m.syls.push(Syllable::Sub(y)),
        }
    }

    /// Moves an amalgamated-subgroup element from the right end to the
    /// `amalg` slot. It commutes with `Sub` syllables and re-decomposes
    /// against `Rep` syllables, which stay nontrivial.
    pub(crate) fn side_carry(&self, side: FactorTag, m: &mut SideElt, mut c: BaseElement) {
        let factor = self.factor(side);
        if factor.is_identity(&c) {
            return;
        }
        for syl in m.syls.iter_mut().rev() {
            match syl {
                Syllable::Sub(_) => continue,
                Syllable::Rep(t) => {
                    let tc = factor.mul(t, &c).expect("validated");
                    let (s, t2) = self.decompose_factor(side, &tc);
                    assert!(!factor.is_identity(&t2), "carry annihilated a representative");
                    *t = t2;
                    c = s;
                    if factor.is_identity(&c) {
                        break;
                    }
                }
            }
        }
        m.amalg = factor.mul(&m.amalg, &c).expect("validated");
    }

    /// Right-multiplies by `u ∈ U`.
    fn side_push_u(&self, side: FactorTag, m: &mut SideElt, u: &UElt) {
        let own = self.u_own(side, u);
        let other = self.u_own(side.other(), u);
        self.side_carry(side, m, own);
        self.side_push_sub(side, m, other);
    }

    /// `(u, rest)` with the element equal to `u · rest` and `rest` the
    /// canonical coset representative of `U·m` (empty or starting with a
    /// factor representative).
    fn side_u_decompose(&self, side: FactorTag, mut m: SideElt) -> (UElt, Vec<Syllable>) {
        let other = if matches!(m.syls.first(), Some(Syllable::Sub(_))) {
            let Syllable::Sub(y) = m.syls.remove(0) else { unreachable!() };
            y
        } else {
            self.factor(side.other()).identity()
        };
        (self.u_from_parts(side, m.amalg, other), m.syls)
    }

    fn side_identity(&self, side: FactorTag) -> SideElt {
        SideElt { amalg: self.factor(side).identity(), syls: Vec::new() }
    }

    fn side_is_identity(&self, side: FactorTag, m: &SideElt) -> bool {
        m.syls.is_empty() && self.factor(side).is_identity(&m.amalg)
    }

    fn side_mul(&self, side: FactorTag, x: &SideElt, y: &SideElt) -> SideElt {
        let mut out = x.clone();
        self.side_carry(side, &mut out, y.amalg.clone());
        for syl in &y.syls {
            match syl {
                Syllable::Rep(t) => self.side_push_factor(side, &mut out, t.clone()),
                Syllable::Sub(s) => self.side_push_sub(side, &mut out, s.clone()),
            }
        }
        out
    }

    fn side_inv(&self, side: FactorTag, m: &SideElt) -> SideElt {
        let factor = self.factor(side);
        let other = self.factor(side.other());
        let mut out = self.side_identity(side);
        for syl in m.syls.iter().rev() {
            match syl {
                Syllable::Rep(t) => {
                    self.side_push_factor(side, &mut out, factor.inv(t).expect("validated"))
                }
                Syllable::Sub(s) => {
                    self.side_push_sub(side, &mut out, other.inv(s).expect("validated"))
                }
            }
        }
        self.side_carry(side, &mut out, factor.inv(&m.amalg).expect("validated"));
        out
    }

    pub(crate) fn side_pow(&self, side: FactorTag, m: &SideElt, e: i64) -> SideElt {
        let base = if e < 0 { self.side_inv(side, m) } else { m.clone() };
        let mut acc = self.side_identity(side);
        for _ in 0..e.unsigned_abs() {
            acc = self.side_mul(side, &acc, &base);
        }
        acc
    }

    /// Inner cyclic reduction in `M = A ∗_H U` (or the mirror):
    /// `m = w · reduced · w⁻¹`.
    pub(crate) fn inner_cyclic_reduce(&self, side: FactorTag, m: SideElt) -> (SideElt, SideElt) {
        let mut w = self.side_identity(side);
        let mut cur = m;
        while cur.syls.len() >= 2
            && cur.syls.first().unwrap().is_rep() == cur.syls.last().unwrap().is_rep()
        {
            let before = cur.syls.len();
            let step = SideElt { amalg: cur.amalg.clone(), syls: vec![cur.syls[0].clone()] };
            let step_inv = self.side_inv(side, &step);
            cur = self.side_mul(side, &self.side_mul(side, &step_inv, &cur), &step);
            w = self.side_mul(side, &w, &step);
            assert!(cur.syls.len() < before, "inner cyclic reduction must shorten");
        }
        (w, cur)
    }

    /// Where an inner-cyclically-reduced one-sided element lives.
    pub(crate) fn side_place(&self, side: FactorTag, m: &SideElt) -> SidePlace {
        match m.syls.as_slice() {
            [] => SidePlace::InU(self.u_from_parts(
                side,
                m.amalg.clone(),
                self.factor(side.other()).identity(),
            )),
            [Syllable::Rep(t)] => {
                SidePlace::InFactor(self.factor(side).mul(&m.amalg, t).expect("validated"))
            }
            [Syllable::Sub(y)] => {
                SidePlace::InU(self.u_from_parts(side, m.amalg.clone(), y.clone()))
            }
            s => SidePlace::Mixed(s.len()),
        }
    }

    fn side_to_factor(&self, side: FactorTag, m: &SideElt) -> Option<BaseElement> {
        match m.syls.as_slice() {
            [] => Some(m.amalg.clone()),
            [Syllable::Rep(t)] => Some(self.factor(side).mul(&m.amalg, t).expect("validated")),
            _ => None,
        }
    }

    fn side_to_u(&self, side: FactorTag, m: &SideElt) -> Option<UElt> {
        match m.syls.as_slice() {
            [] => Some(self.u_from_parts(
                side,
                m.amalg.clone(),
                self.factor(side.other()).identity(),
            )),
            [Syllable::Sub(y)] => Some(self.u_from_parts(side, m.amalg.clone(), y.clone())),
            _ => None,
        }
    }

    /// One-sided view of a normal form of length ≤ 1 whose block (if any)
    /// lies on `side`.
    pub(crate) fn side_elt_of_nf_on(&self, side: FactorTag, nf: &GNormalForm) -> Option<SideElt> {
        let u = UElt { h: nf.h.clone(), k: nf.k.clone() };
        let own = self.u_own(side, &u);
        let other = self.u_own(side.other(), &u);
        let mut syls = Vec::new();
        if !self.factor(side.other()).is_identity(&other) {
            syls.push(Syllable::Sub(other));
        }
        match nf.blocks.as_slice() {
            [] => {}
            [b] if b.side == side => syls.extend(b.syls.iter().cloned()),
            _ => return None,
        }
        Some(SideElt { amalg: own, syls })
    }

    fn side_elt_of_nf(&self, nf: &GNormalForm) -> Option<SideElt> {
        let side = nf.blocks.first()?.side;
        self.side_elt_of_nf_on(side, nf)
    }

    // ---- formatting ---------------------------------------------------------

    pub fn format_letter(&self, l: &GLetter) -> String {
        let factor = self.factor(l.tag);
        match factor {
            BaseGroup::Free(_) => factor.format_element(&l.elt),
            BaseGroup::Abelian(_) => {
                format!("{}{}", self.factor_name(l.tag), factor.format_element(&l.elt))
            }
        }
    }

    /// Canonical word serialization; parsing and normalizing it reproduces
    /// the normal form.
    pub fn format_nf(&self, nf: &GNormalForm) -> String {
        let w = self.to_word(nf);
        if w.letters.is_empty() {
            return "1".to_string();
        }
        w.letters.iter().map(|l| self.format_letter(l)).collect::<Vec<_>>().join(" ")
    }
}

/// Inner normal form of an element of `M = A ∗_H U` (side `A`) or
/// `N = B ∗_K U` (side `B`): an amalgamated-subgroup part on the left and
/// alternating syllables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct SideElt {
    pub amalg: BaseElement,
    pub syls: Vec<Syllable>,
}

pub(crate) enum SidePlace {
    InFactor(BaseElement),
    InU(UElt),
    Mixed(usize),
}

/// Abstract presentation of `U = H × K` with maps between coordinates and
/// subgroup elements.
#[derive(Debug, Clone)]
pub struct UStructure {
    pub pres: Presentation,
    pub n_h: usize,
    pub n_k: usize,
    h_map: CoordMap,
    k_map: CoordMap,
}

#[derive(Debug, Clone)]
enum CoordMap {
    /// `Z → ⟨gen⟩`, `e ↦ gen^e`.
    FreeCyclic { gen: BaseElement },
    /// `Z^rank → subgroup`, `x ↦ x · basis` in ambient coordinates.
    Lattice { basis: IntMatrix, group: AbelianGroup },
}

impl CoordMap {
    fn build(factor: &BaseGroup, sub: &BaseSubgroup) -> (CoordMap, usize, IntMatrix) {
        match (factor, sub) {
            (BaseGroup::Free(_), BaseSubgroup::FreeCyclic(c)) => (
                CoordMap::FreeCyclic { gen: BaseElement::Word(c.generator().clone()) },
                1,
                IntMatrix::zero(0, 1),
            ),
            (BaseGroup::Abelian(g), BaseSubgroup::Lattice(l)) => {
                let basis = l.basis().clone();
                let r = basis.rows();
                // ambient relations expressed in basis coordinates
                let rel = g.relation_rows();
                let mut rows = Vec::new();
                for i in 0..rel.rows() {
                    let coeffs = crate::arith::solve_row(&basis, &rel.row_vec(i))
                        .expect("relations lie in every subgroup lattice");
                    rows.push(coeffs);
                }
                let rel_in_basis = if rows.is_empty() {
                    IntMatrix::zero(0, r)
                } else {
                    IntMatrix::from_rows(rows)
                };
                (CoordMap::Lattice { basis, group: g.clone() }, r, rel_in_basis)
            }
            _ => unreachable!("subgroup kind matches factor kind"),
        }
    }

    fn to_element(&self, factor: &BaseGroup, coords: &[BigInt]) -> BaseElement {
        match self {
            CoordMap::FreeCyclic { gen } => {
                factor.pow(gen, &coords[0]).expect("small exponent")
            }
            CoordMap::Lattice { basis, group } => {
                let mut v = vec![BigInt::zero(); basis.cols()];
                for (i, c) in coords.iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    for (vj, bij) in v.iter_mut().zip(basis.row(i)) {
                        *vj += c * bij;
                    }
                }
                BaseElement::Vector(group.reduce(v))
            }
        }
    }

    fn from_element(&self, factor: &BaseGroup, x: &BaseElement) -> Option<Vec<BigInt>> {
        match (self, x) {
            (CoordMap::FreeCyclic { gen }, _) => {
                factor.cyclic_exponent_of(gen, x).map(|e| vec![e])
            }
            (CoordMap::Lattice { basis, .. }, BaseElement::Vector(v)) => {
                crate::arith::solve_row(basis, v)
            }
            _ => None,
        }
    }
}

impl UStructure {
    fn build(a: &BaseGroup, h: &BaseSubgroup, b: &BaseGroup, k: &BaseSubgroup) -> UStructure {
        let (h_map, n_h, rel_h) = CoordMap::build(a, h);
        let (k_map, n_k, rel_k) = CoordMap::build(b, k);
        let n = n_h + n_k;
        let mut rows = Vec::new();
        for i in 0..rel_h.rows() {
            let mut row = rel_h.row_vec(i);
            row.extend(vec![BigInt::zero(); n_k]);
            rows.push(row);
        }
        for i in 0..rel_k.rows() {
            let mut row = vec![BigInt::zero(); n_h];
            row.extend(rel_k.row_vec(i));
            rows.push(row);
        }
        let relations =
            if rows.is_empty() { IntMatrix::zero(0, n) } else { IntMatrix::from_rows(rows) };
        UStructure { pres: Presentation::new(n, relations), n_h, n_k, h_map, k_map }
    }

    /// Abstract coordinates of a `U`-element, if its parts lie in `H` and `K`.
    pub fn from_u(&self, spec: &CommProdSpec, u: &UElt) -> Option<Vec<BigInt>> {
        let mut coords = self.h_map.from_element(&spec.a, &u.h)?;
        coords.extend(self.k_map.from_element(&spec.b, &u.k)?);
        Some(coords)
    }

    pub fn to_u(&self, spec: &CommProdSpec, coords: &[BigInt]) -> UElt {
        UElt {
            h: self.h_map.to_element(&spec.a, &coords[..self.n_h]),
            k: self.k_map.to_element(&spec.b, &coords[self.n_h..]),
        }
    }

    /// H-side coordinates alone (zero-padded K side).
    pub fn embed_h(&self, coords: &[BigInt]) -> Vec<BigInt> {
        let mut v = coords.to_vec();
        v.extend(vec![BigInt::zero(); self.n_k]);
        v
    }

    pub fn embed_k(&self, coords: &[BigInt]) -> Vec<BigInt> {
        let mut v = vec![BigInt::zero(); self.n_h];
        v.extend(coords.to_vec());
        v
    }
}

impl Presentation {
    /// Some `e` with `e·x ≡ v` modulo the relation lattice.
    pub fn cyclic_exponent(&self, x: &[BigInt], v: &[BigInt]) -> Option<BigInt> {
        let mut rows = vec![x.to_vec()];
        for i in 0..self.relations.rows() {
            rows.push(self.relations.row_vec(i));
        }
        let m = IntMatrix::from_rows(rows);
        crate::arith::solve_row(&m, v).map(|coeffs| coeffs[0].clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::FreeWord;
    use crate::finite::FiniteGroup;
    use rand::{Rng, SeedableRng};

    fn bi(x: i64) -> BigInt {
        BigInt::from(x)
    }

    /// G_mn with free rank-1 factors ⟨a⟩, ⟨b⟩ and H = ⟨a^m⟩, K = ⟨b^n⟩.
    fn gmn(m: i64, n: i64) -> CommProdSpec {
        let a = BaseGroup::free(vec!["a".into()]);
        let b = BaseGroup::free(vec!["b".into()]);
        let h = BaseElement::Word(FreeWord::from_runs([(0usize, bi(m))]));
        let k = BaseElement::Word(FreeWord::from_runs([(0usize, bi(n))]));
        CommProdSpec::build("A", a, vec![h], "B", b, vec![k]).unwrap()
    }

    fn g22() -> CommProdSpec {
        gmn(2, 2)
    }

    fn aw(e: i64) -> GLetter {
        GLetter { tag: FactorTag::A, elt: BaseElement::Word(FreeWord::from_runs([(0, bi(e))])) }
    }

    fn bw(e: i64) -> GLetter {
        GLetter { tag: FactorTag::B, elt: BaseElement::Word(FreeWord::from_runs([(0, bi(e))])) }
    }

    fn word(spec: &CommProdSpec, letters: Vec<GLetter>) -> GWord {
        GWord::new(spec, letters).unwrap()
    }

    #[test]
    fn build_spec_examples() {
        // G_mn is valid
        let _ = gmn(3, 4);
        // a subgroup generated by xy inside F2 is valid
        let f2 = BaseGroup::free(vec!["x".into(), "y".into()]);
        let xy = BaseElement::Word(FreeWord::from_runs([(0, bi(1)), (1, bi(1))]));
        let b = BaseGroup::free(vec!["b".into()]);
        let kk = BaseElement::Word(FreeWord::from_runs([(0, bi(1))]));
        assert!(CommProdSpec::build("A", f2.clone(), vec![xy], "B", b.clone(), vec![kk.clone()])
            .is_ok());
        // two independent generators are rejected for a free factor
        let x = BaseElement::Word(FreeWord::from_runs([(0, bi(1))]));
        let y = BaseElement::Word(FreeWord::from_runs([(1, bi(1))]));
        assert!(matches!(
            CommProdSpec::build("A", f2, vec![x, y], "B", b, vec![kk]),
            Err(SpecError::NonCyclicFreeSubgroup)
        ));
    }

    #[test]
    fn normalize_defining_relation() {
        // b²a² = a²b² in G22: pure U-part
        let spec = g22();
        let nf = spec.normalize(&word(&spec, vec![bw(2), aw(2)]));
        assert_eq!(nf.blocks.len(), 0);
        assert_eq!(nf.h, BaseElement::Word(FreeWord::from_runs([(0, bi(2))])));
        assert_eq!(nf.k, BaseElement::Word(FreeWord::from_runs([(0, bi(2))])));
        let other = spec.normalize(&word(&spec, vec![aw(2), bw(2)]));
        assert_eq!(nf, other);
    }

    #[test]
    fn normalize_transversal_split() {
        // a³ = a²·a
        let spec = g22();
        let nf = spec.normalize(&word(&spec, vec![aw(3)]));
        assert_eq!(nf.h, BaseElement::Word(FreeWord::from_runs([(0, bi(2))])));
        assert!(spec.factor(FactorTag::B).is_identity(&nf.k));
        assert_eq!(nf.blocks.len(), 1);
        assert_eq!(
            nf.blocks[0].syls,
            vec![Syllable::Rep(BaseElement::Word(FreeWord::from_runs([(0, bi(1))])))]
        );
    }

    #[test]
    fn commutator_survives_with_four_blocks() {
        // aba⁻¹b⁻¹ ≠ 1: the defining relation only kills [a², b²]
        let spec = g22();
        let w = word(&spec, vec![aw(1), bw(1), aw(-1), bw(-1)]);
        let nf = spec.normalize(&w);
        assert_eq!(nf.blocks.len(), 4);
        assert!(!spec.is_identity_nf(&nf));

        // quotient oracle: map a -> r, b -> s into D4; [r², s²] = 1 holds, so
        // the map extends to G, and the image sr⁻¹s⁻¹... of the commutator
        // is r·s·r⁻¹·s⁻¹ ≠ 1
        let d4 = FiniteGroup::dihedral4();
        let r = (1..8).find(|&x| d4.element_order(x) == 4).unwrap();
        let s = (1..8)
            .find(|&x| d4.element_order(x) == 2 && d4.mul(x, r) != d4.mul(r, x))
            .unwrap();
        // commuting condition
        let r2 = d4.mul(r, r);
        let s2 = d4.mul(s, s);
        assert_eq!(d4.mul(r2, s2), d4.mul(s2, r2));
        let image = |w: &GWord| -> usize {
            w.letters().iter().fold(0, |acc, l| {
                let BaseElement::Word(fw) = &l.elt else { panic!() };
                let e = i64::try_from(&fw.runs()[0].1).unwrap();
                let g = match l.tag {
                    FactorTag::A => r,
                    FactorTag::B => s,
                };
                d4.mul(acc, d4.pow(g, e))
            })
        };
        assert_ne!(image(&w), 0);
        // soundness: the image agrees on the normal form's flattening
        assert_eq!(image(&w), image(&spec.to_word(&nf)));
    }

    #[test]
    fn syllable_length_examples() {
        let spec = g22();
        assert_eq!(spec.syllable_length(&spec.identity_nf()), 0);
        let a = spec.normalize(&word(&spec, vec![aw(1)]));
        assert_eq!(spec.syllable_length(&a), 1);
        let u = spec.normalize(&word(&spec, vec![aw(2)]));
        assert_eq!(spec.syllable_length(&u), 1);
        let ab = spec.normalize(&word(&spec, vec![aw(1), bw(1)]));
        assert_eq!(spec.syllable_length(&ab), 2);
    }

    #[test]
    fn mul_inv_round_trips() {
        let spec = g22();
        let ab = spec.normalize(&word(&spec, vec![aw(1), bw(1)]));
        let inv = spec.inv(&ab);
        assert!(spec.is_identity_nf(&spec.mul(&ab, &inv)));
        assert_eq!(spec.inv(&inv), ab);
        // (a·b)·(b⁻¹) = a
        let b_inv = spec.normalize(&word(&spec, vec![bw(-1)]));
        let a = spec.normalize(&word(&spec, vec![aw(1)]));
        assert_eq!(spec.mul(&ab, &b_inv), a);
    }

    #[test]
    fn normalize_is_idempotent_on_serialization() {
        let spec = g22();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        for _ in 0..300 {
            let w = crate::sampling::random_word(&spec, &mut rng, 8);
            let nf = spec.normalize(&w);
            let again = spec.normalize(&spec.to_word(&nf));
            assert_eq!(nf, again);
        }
    }

    #[test]
    fn cyclic_reduction_examples() {
        let spec = g22();
        // a·b·a⁻¹: conjugate of b
        let w = spec.normalize(&word(&spec, vec![aw(1), bw(1), aw(-1)]));
        let (core, conj) = spec.cyclically_reduce(&w);
        assert_eq!(spec.syllable_length(&core), 1);
        let recomposed = spec.mul(&spec.mul(&conj, &core), &spec.inv(&conj));
        assert_eq!(recomposed, w);
        // ab is already cyclically reduced
        let ab = spec.normalize(&word(&spec, vec![aw(1), bw(1)]));
        let (core, conj) = spec.cyclically_reduce(&ab);
        assert_eq!(core, ab);
        assert!(spec.is_identity_nf(&conj));
        let a = spec.normalize(&word(&spec, vec![aw(1)]));
        let (core, _) = spec.cyclically_reduce(&a);
        assert_eq!(core, a);
    }

    #[test]
    fn power_length_law() {
        let spec = g22();
        let ab = spec.normalize(&word(&spec, vec![aw(1), bw(1)]));
        let sq = spec.power(&ab, &bi(2)).unwrap();
        assert_eq!(spec.syllable_length(&sq), 4);
        let a2 = spec.normalize(&word(&spec, vec![aw(1)]));
        let asq = spec.power(&a2, &bi(2)).unwrap();
        assert_eq!(spec.syllable_length(&asq), 1);
        // U-part powers take arbitrary-precision exponents
        let u = spec.normalize(&word(&spec, vec![aw(2)]));
        let huge = BigInt::from(10u8).pow(25);
        let up = spec.power(&u, &huge).unwrap();
        assert!(up.blocks.is_empty());
    }

    #[test]
    fn prop_2_2_random_law() {
        let spec22 = g22();
        let spec24 = gmn(2, 4);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(37);
        for spec in [&spec22, &spec24] {
            let mut checked = 0;
            while checked < 100 {
                let w = crate::sampling::random_word(spec, &mut rng, 7);
                let (core, _) = spec.cyclically_reduce(&spec.normalize(&w));
                let l = spec.syllable_length(&core);
                if l < 2 {
                    continue;
                }
                checked += 1;
                for q in 1..=5i64 {
                    let p = spec.power(&core, &bi(q)).unwrap();
                    assert_eq!(spec.syllable_length(&p), l * q as usize);
                }
            }
        }
    }

    #[test]
    fn relator_insertion_invariance() {
        let spec = g22();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(41);
        for _ in 0..300 {
            let w = crate::sampling::random_word(&spec, &mut rng, 6);
            let nf = spec.normalize(&w);
            let rewritten = crate::sampling::random_rewrite(&spec, &w, &mut rng, 4);
            assert_eq!(spec.normalize(&rewritten), nf);
        }
    }

    #[test]
    fn cyclic_membership_examples() {
        let spec = g22();
        let ab = spec.normalize(&word(&spec, vec![aw(1), bw(1)]));
        let cube = spec.power(&ab, &bi(3)).unwrap();
        assert_eq!(spec.cyclic_membership(&cube, &ab), Some(bi(3)));
        // c = a², g = a⁵: odd power is not a multiple
        let a2 = spec.normalize(&word(&spec, vec![aw(2)]));
        let a5 = spec.normalize(&word(&spec, vec![aw(5)]));
        assert_eq!(spec.cyclic_membership(&a5, &a2), None);
        let a4 = spec.normalize(&word(&spec, vec![aw(4)]));
        assert_eq!(spec.cyclic_membership(&a4, &a2), Some(bi(2)));
        // ba is not a power of ab
        let ba = spec.normalize(&word(&spec, vec![bw(1), aw(1)]));
        assert_eq!(spec.cyclic_membership(&ba, &ab), None);
        // negative exponents are found
        let inv3 = spec.power(&ab, &bi(-3)).unwrap();
        assert_eq!(spec.cyclic_membership(&inv3, &ab), Some(bi(-3)));
        // single-block core: g = a ∈ ⟨a⟩-in-G via factor membership
        let a = spec.normalize(&word(&spec, vec![aw(1)]));
        let a7 = spec.normalize(&word(&spec, vec![aw(7)]));
        assert_eq!(spec.cyclic_membership(&a7, &a), Some(bi(7)));
        // mixed inner core: c = a·b² has inner length 2 on side A
        let c = spec.normalize(&word(&spec, vec![aw(1), bw(2)]));
        let csq = spec.power(&c, &bi(2)).unwrap();
        assert_eq!(spec.cyclic_membership(&csq, &c), Some(bi(2)));
        assert_eq!(spec.cyclic_membership(&a, &c), None);
    }

    #[test]
    fn associativity_against_word_concat() {
        let spec = g22();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(59);
        for _ in 0..200 {
            let w1 = crate::sampling::random_word(&spec, &mut rng, 5);
            let w2 = crate::sampling::random_word(&spec, &mut rng, 5);
            let w3 = crate::sampling::random_word(&spec, &mut rng, 5);
            let n1 = spec.normalize(&w1);
            let n2 = spec.normalize(&w2);
            let n3 = spec.normalize(&w3);
            let left = spec.mul(&spec.mul(&n1, &n2), &n3);
            let right = spec.mul(&n1, &spec.mul(&n2, &n3));
            assert_eq!(left, right);
            let direct = spec.normalize(&w1.concat(&w2).concat(&w3));
            assert_eq!(left, direct);
        }
    }

    #[test]
    fn abelian_factor_variant_agrees() {
        // the same group with Z-as-abelian factors: b²a² collapses into U
        let a = BaseGroup::abelian(1, vec![]).unwrap();
        let b = BaseGroup::abelian(1, vec![]).unwrap();
        let spec = CommProdSpec::build(
            "A",
            a,
            vec![BaseElement::Vector(vec![bi(2)])],
            "B",
            b,
            vec![BaseElement::Vector(vec![bi(2)])],
        )
        .unwrap();
        let av = |e: i64| GLetter { tag: FactorTag::A, elt: BaseElement::Vector(vec![bi(e)]) };
        let bv = |e: i64| GLetter { tag: FactorTag::B, elt: BaseElement::Vector(vec![bi(e)]) };
        let nf = spec.normalize(&word(&spec, vec![bv(2), av(2)]));
        assert!(nf.blocks.is_empty());
        let w = word(&spec, vec![av(1), bv(1), av(-1), bv(-1)]);
        assert_eq!(spec.normalize(&w).blocks.len(), 4);
        let ab = spec.normalize(&word(&spec, vec![av(1), bv(1)]));
        assert_eq!(spec.syllable_length(&spec.power(&ab, &bi(3)).unwrap()), 6);
    }

}
