//! Cayley-table finite groups: subgroup enumeration, normal subgroups of
//! π-index, normal cores, finite isolators, and the small p-group catalog
//! used as the quotient search space.

use num_bigint::BigInt;
use std::collections::BTreeSet;
use std::fmt;

use crate::arith::{is_prime_u64, PiSet};

/// A finite group as a multiplication table over indices `0..order`, with
/// the identity at index 0. The constructor checks the group axioms
/// (associativity by full triple scan for order ≤ 64).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    order: usize,
    table: Vec<usize>,
    inverse: Vec<usize>,
    name: String,
}

impl FiniteGroup {
    pub fn from_table(name: &str, order: usize, table: Vec<usize>) -> Result<Self, String> {
        if order == 0 || table.len() != order * order {
            return Err("table size does not match the order".into());
        }
        for &x in &table {
            if x >= order {
                return Err("table entry out of range".into());
            }
        }
        // Latin square
        for i in 0..order {
            let row: BTreeSet<usize> = (0..order).map(|j| table[i * order + j]).collect();
            let col: BTreeSet<usize> = (0..order).map(|j| table[j * order + i]).collect();
            if row.len() != order || col.len() != order {
                return Err("table is not a Latin square".into());
            }
        }
        // identity at 0
        for i in 0..order {
            if table[i] != i || table[i * order] != i {
                return Err("index 0 is not an identity".into());
            }
        }
        let mut inverse = vec![usize::MAX; order];
        for i in 0..order {
            for j in 0..order {
                if table[i * order + j] == 0 {
                    inverse[i] = j;
                }
            }
        }
        if inverse.iter().any(|&x| x == usize::MAX) {
            return Err("missing inverses".into());
        }
        let g = FiniteGroup { order, table, inverse, name: name.to_string() };
        if order <= 64 {
            for a in 0..order {
                for b in 0..order {
                    for c in 0..order {
                        if g.mul(g.mul(a, b), c) != g.mul(a, g.mul(b, c)) {
                            return Err(format!("associativity fails at ({a},{b},{c})"));
                        }
                    }
                }
            }
        }
        Ok(g)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn conj(&self, a: usize, by: usize) -> usize {
        self.mul(self.mul(self.inv(by), a), by)
    }

    pub fn pow(&self, a: usize, mut n: i64) -> usize {
        let mut base = if n < 0 {
            n = -n;
            self.inv(a)
        } else {
            a
        };
        let mut acc = 0usize;
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            n >>= 1;
        }
        acc
    }

    pub fn pow_big(&self, a: usize, n: &BigInt) -> usize {
        let ord = BigInt::from(self.element_order(a));
        let e_raw = num_integer::Integer::mod_floor(n, &ord);
        let e = i64::try_from(e_raw).expect("reduced exponent fits");
        self.pow(a, e)
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut n = 1;
        while x != 0 {
            x = self.mul(x, a);
            n += 1;
        }
        n
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (0..self.order).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Multiset of element orders plus abelianness: a cheap isomorphism screen.
    pub fn invariant_key(&self) -> (usize, bool, Vec<usize>) {
        let mut profile: Vec<usize> = (0..self.order).map(|a| self.element_order(a)).collect();
        profile.sort_unstable();
        (self.order, self.is_abelian(), profile)
    }

    pub fn cyclic(n: usize) -> FiniteGroup {
        let mut table = vec![0usize; n * n];
        for i in 0..n {
            for j in 0..n {
                table[i * n + j] = (i + j) % n;
            }
        }
        FiniteGroup::from_table(&format!("C{n}"), n, table).expect("cyclic group")
    }

    pub fn direct_product(a: &FiniteGroup, b: &FiniteGroup) -> FiniteGroup {
        let n = a.order * b.order;
        let idx = |x: usize, y: usize| x * b.order + y;
        let mut table = vec![0usize; n * n];
        for x1 in 0..a.order {
            for y1 in 0..b.order {
                for x2 in 0..a.order {
                    for y2 in 0..b.order {
                        table[idx(x1, y1) * n + idx(x2, y2)] =
                            idx(a.mul(x1, x2), b.mul(y1, y2));
                    }
                }
            }
        }
        FiniteGroup::from_table(&format!("{}x{}", a.name, b.name), n, table)
            .expect("direct product")
    }

    /// Closure of permutation generators on `0..degree` under composition;
    /// element 0 of the result is the identity permutation.
    pub fn from_permutations(name: &str, degree: usize, gens: &[Vec<usize>]) -> FiniteGroup {
        let id: Vec<usize> = (0..degree).collect();
        let mut elems: Vec<Vec<usize>> = vec![id.clone()];
        let mut seen: BTreeSet<Vec<usize>> = elems.iter().cloned().collect();
        let mut queue = vec![id];
        while let Some(p) = queue.pop() {
            for g in gens {
                let q: Vec<usize> = (0..degree).map(|i| g[p[i]]).collect();
                if seen.insert(q.clone()) {
                    elems.push(q.clone());
                    queue.push(q);
                }
            }
        }
        elems.sort();
        // keep identity at index 0
        let id_pos = elems.iter().position(|p| p.iter().enumerate().all(|(i, &x)| x == i));
        elems.swap(0, id_pos.unwrap());
        let n = elems.len();
        let mut table = vec![0usize; n * n];
        for (i, p) in elems.iter().enumerate() {
            for (j, q) in elems.iter().enumerate() {
                let comp: Vec<usize> = (0..degree).map(|x| q[p[x]]).collect();
                table[i * n + j] = elems.iter().position(|e| *e == comp).unwrap();
            }
        }
        FiniteGroup::from_table(name, n, table).expect("permutation group")
    }

    pub fn symmetric3() -> FiniteGroup {
        FiniteGroup::from_permutations("S3", 3, &[vec![1, 0, 2], vec![1, 2, 0]])
    }

    pub fn alternating4() -> FiniteGroup {
        FiniteGroup::from_permutations("A4", 4, &[vec![1, 0, 3, 2], vec![1, 2, 0, 3]])
    }

    pub fn dihedral4() -> FiniteGroup {
        // symmetries of the square: r = (0123), s = reflection
        FiniteGroup::from_permutations("D4", 4, &[vec![1, 2, 3, 0], vec![1, 0, 3, 2]])
    }

    pub fn quaternion8() -> FiniteGroup {
        // indices: 1, -1, i, -i, j, -j, k, -k
        let mul = |a: usize, b: usize| -> usize {
            let (sa, ua) = (a % 2 == 1, a / 2);
            let (sb, ub) = (b % 2 == 1, b / 2);
            // unit table over {1, i, j, k} with a sign
            let (s, u) = match (ua, ub) {
                (0, x) => (false, x),
                (x, 0) => (false, x),
                (1, 1) => (true, 0),
                (1, 2) => (false, 3),
                (1, 3) => (true, 2),
                (2, 1) => (true, 3),
                (2, 2) => (true, 0),
                (2, 3) => (false, 1),
                (3, 1) => (false, 2),
                (3, 2) => (true, 1),
                (3, 3) => (true, 0),
                _ => unreachable!(),
            };
            let sign = s ^ sa ^ sb;
            u * 2 + usize::from(sign)
        };
        let mut table = vec![0usize; 64];
        for a in 0..8 {
            for b in 0..8 {
                table[a * 8 + b] = mul(a, b);
            }
        }
        FiniteGroup::from_table("Q8", 8, table).expect("quaternion group")
    }

    /// Upper unitriangular 3×3 matrices over F_p (the Heisenberg group).
    pub fn heisenberg(p: usize) -> FiniteGroup {
        let n = p * p * p;
        let idx = |a: usize, b: usize, c: usize| (a * p + b) * p + c;
        let mut table = vec![0usize; n * n];
        for a1 in 0..p {
            for b1 in 0..p {
                for c1 in 0..p {
                    for a2 in 0..p {
                        for b2 in 0..p {
                            for c2 in 0..p {
                                let a = (a1 + a2) % p;
                                let b = (b1 + b2) % p;
                                let c = (c1 + c2 + a1 * b2) % p;
                                table[idx(a1, b1, c1) * n + idx(a2, b2, c2)] = idx(a, b, c);
                            }
                        }
                    }
                }
            }
        }
        FiniteGroup::from_table(&format!("Heis{p}"), n, table).expect("heisenberg group")
    }

    /// The nonabelian group ⟨a, b : a^{p²} = b^p = 1, b a b⁻¹ = a^{1+p}⟩ of
    /// order p³ and exponent p² (p odd).
    pub fn modular_p3(p: usize) -> FiniteGroup {
        let p2 = p * p;
        let n = p2 * p;
        let idx = |i: usize, j: usize| i * p + j;
        // (a^i b^j)(a^k b^l) = a^{i + k(1+p)^j} b^{j+l}
        let mut pow1p = vec![1usize; p];
        for j in 1..p {
            pow1p[j] = (pow1p[j - 1] * (1 + p)) % p2;
        }
        let mut table = vec![0usize; n * n];
        for i in 0..p2 {
            for j in 0..p {
                for k in 0..p2 {
                    for l in 0..p {
                        let a = (i + k * pow1p[j]) % p2;
                        let b = (j + l) % p;
                        table[idx(i, j) * n + idx(k, l)] = idx(a, b);
                    }
                }
            }
        }
        FiniteGroup::from_table(&format!("M{}", n), n, table).expect("modular p-group")
    }
}

impl fmt::Display for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (order {})", self.name, self.order)
    }
}

/// A subgroup as a sorted element-index set, closed under the operations.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct FiniteSubgroup {
    elements: Vec<usize>,
}

impl FiniteSubgroup {
    pub fn trivial() -> Self {
        FiniteSubgroup { elements: vec![0] }
    }

    pub fn full(g: &FiniteGroup) -> Self {
        FiniteSubgroup { elements: (0..g.order()).collect() }
    }

    pub fn from_elements(g: &FiniteGroup, elems: &[usize]) -> Self {
        let set: BTreeSet<usize> = elems.iter().copied().collect();
        let s = FiniteSubgroup { elements: set.into_iter().collect() };
        debug_assert!(s.is_subgroup(g));
        s
    }

    pub fn generate(g: &FiniteGroup, gens: &[usize]) -> Self {
        let mut set: BTreeSet<usize> = [0].into();
        let mut queue: Vec<usize> = vec![0];
        while let Some(x) = queue.pop() {
            for &h in gens {
                let y = g.mul(x, h);
                if set.insert(y) {
                    queue.push(y);
                }
            }
        }
        FiniteSubgroup { elements: set.into_iter().collect() }
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, x: usize) -> bool {
        self.elements.binary_search(&x).is_ok()
    }

    pub fn is_subgroup(&self, g: &FiniteGroup) -> bool {
        self.contains(0)
            && self.elements.iter().all(|&a| {
                self.contains(g.inv(a)) && self.elements.iter().all(|&b| self.contains(g.mul(a, b)))
            })
    }

    pub fn is_normal_in(&self, g: &FiniteGroup, over: &FiniteSubgroup) -> bool {
        over.elements.iter().all(|&x| self.elements.iter().all(|&a| self.contains(g.conj(a, x))))
    }

    pub fn is_subset_of(&self, other: &FiniteSubgroup) -> bool {
        self.elements.iter().all(|&x| other.contains(x))
    }

    /// The product set `self · other` (a subgroup when one side is normal).
    pub fn product_set(&self, g: &FiniteGroup, other: &FiniteSubgroup) -> Vec<usize> {
        let mut set = BTreeSet::new();
        for &a in &self.elements {
            for &b in &other.elements {
                set.insert(g.mul(a, b));
            }
        }
        set.into_iter().collect()
    }

    pub fn intersect(&self, other: &FiniteSubgroup) -> FiniteSubgroup {
        FiniteSubgroup {
            elements: self.elements.iter().copied().filter(|&x| other.contains(x)).collect(),
        }
    }

    /// Representatives of the right cosets `self·x`.
    pub fn right_coset_reps(&self, g: &FiniteGroup, over: &FiniteSubgroup) -> Vec<usize> {
        let mut reps = Vec::new();
        let mut covered = vec![false; g.order()];
        for &x in &over.elements {
            if covered[x] {
                continue;
            }
            reps.push(x);
            for &h in &self.elements {
                covered[g.mul(h, x)] = true;
            }
        }
        reps
    }
}

/// Cyclic subgroup generated by one element.
pub fn cyclic_closure(g: &FiniteGroup, x: usize) -> FiniteSubgroup {
    FiniteSubgroup::generate(g, &[x])
}

/// All subgroups, ordered by size and then by element set.
pub fn all_subgroups(g: &FiniteGroup) -> Vec<FiniteSubgroup> {
    let mut found: BTreeSet<Vec<usize>> = BTreeSet::new();
    found.insert(vec![0]);
    let mut queue: Vec<FiniteSubgroup> = vec![FiniteSubgroup::trivial()];
    while let Some(s) = queue.pop() {
        for x in 1..g.order() {
            if s.contains(x) {
                continue;
            }
            let mut gens: Vec<usize> = s.elements.clone();
            gens.push(x);
            let bigger = FiniteSubgroup::generate(g, &gens);
            if found.insert(bigger.elements.clone()) {
                queue.push(bigger);
            }
        }
    }
    let mut out: Vec<FiniteSubgroup> =
        found.into_iter().map(|elements| FiniteSubgroup { elements }).collect();
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.elements.cmp(&b.elements)));
    out
}

/// The largest subgroup of `m` normal in `over`, computed as the
/// intersection of the conjugates `m^x` over coset representatives.
pub fn normal_core(
    g: &FiniteGroup,
    m: &FiniteSubgroup,
    over: &FiniteSubgroup,
) -> Result<FiniteSubgroup, String> {
    if !m.is_subset_of(over) {
        return Err("core: m is not contained in `over`".into());
    }
    let mut core = m.clone();
    for x in m.right_coset_reps(g, over) {
        let conj = FiniteSubgroup {
            elements: {
                let mut v: Vec<usize> = m.elements.iter().map(|&a| g.conj(a, x)).collect();
                v.sort_unstable();
                v
            },
        };
        core = core.intersect(&conj);
    }
    Ok(core)
}

/// Normal subgroups of π-index, ordered by size then element set
/// (so the unit-index subgroup, the whole group, comes last).
pub fn omega_pi_finite(g: &FiniteGroup, pi: &PiSet) -> Vec<FiniteSubgroup> {
    let full = FiniteSubgroup::full(g);
    all_subgroups(g)
        .into_iter()
        .filter(|s| {
            s.is_normal_in(g, &full) && pi.is_pi_number(&BigInt::from(g.order() / s.len()))
        })
        .collect()
}

/// Literal evaluation of `⋂_{N ∈ Ω_π(G)} Y·N = Y`.
pub fn is_separable_in_finite(g: &FiniteGroup, y: &FiniteSubgroup, pi: &PiSet) -> bool {
    let mut inter: Vec<usize> = (0..g.order()).collect();
    for n in omega_pi_finite(g, pi) {
        let prod = y.product_set(g, &n);
        inter.retain(|x| prod.binary_search(x).is_ok());
    }
    inter == y.elements
}

/// Quasi-regularity: every `M ∈ Ω_π(Y)` traps the trace `N ∩ Y` of some
/// `N ∈ Ω_π(G)`.
pub fn quasi_regular_finite(g: &FiniteGroup, y: &FiniteSubgroup, pi: &PiSet) -> bool {
    let omega_g = omega_pi_finite(g, pi);
    for m in omega_pi_subgroups_of(g, y, pi) {
        let found = omega_g.iter().any(|n| n.intersect(y).is_subset_of(&m));
        if !found {
            return false;
        }
    }
    true
}

/// Subgroups of `y` (as a group in its own right) that are normal in `y`
/// with π-number index.
pub fn omega_pi_subgroups_of(
    g: &FiniteGroup,
    y: &FiniteSubgroup,
    pi: &PiSet,
) -> Vec<FiniteSubgroup> {
    let mut found: BTreeSet<Vec<usize>> = BTreeSet::new();
    found.insert(vec![0]);
    let mut queue: Vec<FiniteSubgroup> = vec![FiniteSubgroup::trivial()];
    while let Some(s) = queue.pop() {
        for &x in &y.elements {
            if s.contains(x) {
                continue;
            }
            let mut gens = s.elements.clone();
            gens.push(x);
            let bigger = FiniteSubgroup::generate(g, &gens);
            if bigger.is_subset_of(y) && found.insert(bigger.elements.clone()) {
                queue.push(bigger);
            }
        }
    }
    let mut out: Vec<FiniteSubgroup> = found
        .into_iter()
        .map(|elements| FiniteSubgroup { elements })
        .filter(|s| {
            s.is_normal_in(g, y) && pi.is_pi_number(&BigInt::from(y.len() / s.len()))
        })
        .collect();
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.elements.cmp(&b.elements)));
    out
}

/// Least π'-isolated subgroup containing `y`: alternately adjoin π'-roots
/// and close under generation until stable.
pub fn isolator_finite(g: &FiniteGroup, y: &FiniteSubgroup, pi: &PiSet) -> FiniteSubgroup {
    let mut current = y.clone();
    loop {
        let mut grew = false;
        let mut gens = current.elements.clone();
        for x in 0..g.order() {
            if current.contains(x) {
                continue;
            }
            let ord = g.element_order(x) as u64;
            let escapes = (1..=ord)
                .filter(|q| pi.is_pi_prime_number(&BigInt::from(*q)))
                .any(|q| current.contains(g.pow(x, q as i64)));
            if escapes {
                gens.push(x);
                grew = true;
            }
        }
        if !grew {
            return current;
        }
        current = FiniteSubgroup::generate(g, &gens);
    }
}

/// Complete-up-to-isomorphism catalog of p-groups: orders p, p², p³, and the
/// abelian groups of order p⁴. The order of the list is deterministic.
pub fn pgroup_catalog(p: u64, max_order: u64) -> Result<Vec<FiniteGroup>, String> {
    if !is_prime_u64(p) {
        return Err(format!("{p} is not a prime"));
    }
    let mut allowed = Vec::new();
    let mut o = 1u64;
    for _ in 0..4 {
        o = o.saturating_mul(p);
        allowed.push(o);
    }
    if !allowed.contains(&max_order) {
        return Err(format!("max order {max_order} is not a p-power ≤ p⁴ for p = {p}"));
    }
    let pu = p as usize;
    let mut out = Vec::new();
    if max_order >= p {
        out.push(FiniteGroup::cyclic(pu));
    }
    if max_order >= p * p {
        out.push(FiniteGroup::cyclic(pu * pu));
        let cp = FiniteGroup::cyclic(pu);
        out.push(FiniteGroup::direct_product(&cp, &cp));
    }
    if max_order >= p * p * p {
        let cp = FiniteGroup::cyclic(pu);
        let cp2 = FiniteGroup::cyclic(pu * pu);
        out.push(FiniteGroup::cyclic(pu * pu * pu));
        out.push(FiniteGroup::direct_product(&cp2, &cp));
        out.push(FiniteGroup::direct_product(&FiniteGroup::direct_product(&cp, &cp), &cp));
        if p == 2 {
            out.push(FiniteGroup::dihedral4());
            out.push(FiniteGroup::quaternion8());
        } else {
            out.push(FiniteGroup::heisenberg(pu));
            out.push(FiniteGroup::modular_p3(pu));
        }
    }
    if max_order >= p * p * p * p {
        let cp = FiniteGroup::cyclic(pu);
        let cp2 = FiniteGroup::cyclic(pu * pu);
        let cp3 = FiniteGroup::cyclic(pu * pu * pu);
        out.push(FiniteGroup::cyclic(pu * pu * pu * pu));
        out.push(FiniteGroup::direct_product(&cp3, &cp));
        out.push(FiniteGroup::direct_product(&cp2, &cp2));
        out.push(FiniteGroup::direct_product(&FiniteGroup::direct_product(&cp2, &cp), &cp));
        let cpcp = FiniteGroup::direct_product(&cp, &cp);
        out.push(FiniteGroup::direct_product(&FiniteGroup::direct_product(&cpcp, &cp), &cp));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pi2() -> PiSet {
        PiSet::single(2).unwrap()
    }

    fn pi3() -> PiSet {
        PiSet::single(3).unwrap()
    }

    #[test]
    fn cyclic_closure_examples() {
        let c4 = FiniteGroup::cyclic(4);
        assert_eq!(cyclic_closure(&c4, 0).elements(), &[0]);
        assert_eq!(cyclic_closure(&c4, 1).len(), 4);
        let d4 = FiniteGroup::dihedral4();
        let refl = (1..8).find(|&x| d4.element_order(x) == 2).unwrap();
        assert_eq!(cyclic_closure(&d4, refl).len(), 2);
    }

    #[test]
    fn normal_core_examples() {
        let s3 = FiniteGroup::symmetric3();
        let full = FiniteSubgroup::full(&s3);
        // A3 is the unique subgroup of order 3 and is normal
        let a3 = all_subgroups(&s3).into_iter().find(|s| s.len() == 3).unwrap();
        assert_eq!(normal_core(&s3, &a3, &full).unwrap(), a3);
        // a reflection subgroup has trivial core, checked against the
        // all-element conjugate intersection
        let m = all_subgroups(&s3).into_iter().find(|s| s.len() == 2).unwrap();
        let core = normal_core(&s3, &m, &full).unwrap();
        assert_eq!(core, FiniteSubgroup::trivial());
        let mut brute: Vec<usize> = m.elements().to_vec();
        for x in 0..s3.order() {
            brute.retain(|&a| m.contains(s3.conj(a, s3.inv(x))));
        }
        assert_eq!(core.elements(), &brute[..]);
        // containment violation is an error
        assert!(normal_core(&s3, &full, &a3).is_err());
    }

    #[test]
    fn omega_pi_examples() {
        let c6 = FiniteGroup::cyclic(6);
        let omega = omega_pi_finite(&c6, &pi2());
        // indices 2 and 1: the order-3 subgroup and C6 itself
        assert_eq!(omega.len(), 2);
        assert_eq!(omega[0].len(), 3);
        assert_eq!(omega[1].len(), 6);

        let v4 = FiniteGroup::direct_product(&FiniteGroup::cyclic(2), &FiniteGroup::cyclic(2));
        assert_eq!(omega_pi_finite(&v4, &pi2()).len(), 5);
        assert_eq!(omega_pi_finite(&c6, &PiSet::all()).len(), 4);
    }

    #[test]
    fn separability_examples() {
        let c6 = FiniteGroup::cyclic(6);
        // Y = ⟨g²⟩ ≅ C3: separable; Y = ⟨g³⟩ ≅ C2: not
        let y3 = cyclic_closure(&c6, 2);
        let y2 = cyclic_closure(&c6, 3);
        assert!(is_separable_in_finite(&c6, &y3, &pi2()));
        assert!(!is_separable_in_finite(&c6, &y2, &pi2()));
        // in a p-group with π = {p} every subgroup is separable
        let d4 = FiniteGroup::dihedral4();
        for y in all_subgroups(&d4) {
            assert!(is_separable_in_finite(&d4, &y, &pi2()));
        }
    }

    #[test]
    fn quasi_regular_examples() {
        let s3 = FiniteGroup::symmetric3();
        let a3 = all_subgroups(&s3).into_iter().find(|s| s.len() == 3).unwrap();
        assert!(!quasi_regular_finite(&s3, &a3, &pi3()));
        let c6 = FiniteGroup::cyclic(6);
        let y = cyclic_closure(&c6, 2);
        assert!(quasi_regular_finite(&c6, &y, &pi3()));
        assert!(quasi_regular_finite(&c6, &FiniteSubgroup::full(&c6), &pi2()));
    }

    #[test]
    fn isolator_examples() {
        let c6 = FiniteGroup::cyclic(6);
        let c3 = cyclic_closure(&c6, 2);
        let c2 = cyclic_closure(&c6, 3);
        assert_eq!(isolator_finite(&c6, &c3, &pi2()), c3);
        assert_eq!(isolator_finite(&c6, &c2, &pi2()), FiniteSubgroup::full(&c6));
        assert_eq!(isolator_finite(&c6, &c2, &PiSet::all()), c2);
    }

    #[test]
    fn catalog_counts_and_screening() {
        let cat8 = pgroup_catalog(2, 8).unwrap();
        assert_eq!(cat8.len(), 8);
        let cat27 = pgroup_catalog(3, 27).unwrap();
        assert_eq!(cat27.len(), 8);
        assert_eq!(pgroup_catalog(2, 2).unwrap().len(), 1);
        assert!(pgroup_catalog(2, 6).is_err());
        assert!(pgroup_catalog(4, 4).is_err());
        // pairwise non-isomorphic by the invariant screen
        for cat in [&cat8, &cat27] {
            let keys: Vec<_> = cat.iter().map(|g| g.invariant_key()).collect();
            for i in 0..keys.len() {
                for j in i + 1..keys.len() {
                    assert_ne!(keys[i], keys[j], "{} vs {}", cat[i], cat[j]);
                }
            }
        }
        let cat16 = pgroup_catalog(2, 16).unwrap();
        assert_eq!(cat16.len(), 13);
        let cat81 = pgroup_catalog(3, 81).unwrap();
        assert_eq!(cat81.len(), 13);
    }

    #[test]
    fn catalog_completeness_by_exhaustive_table_search() {
        // enumerate every group table on 8 labeled elements with identity 0
        // by backtracking; each must match a catalog invariant
        let n = 8usize;
        let catalog_keys: Vec<_> =
            pgroup_catalog(2, 8).unwrap().iter().map(|g| g.invariant_key()).collect();
        let catalog_keys: Vec<_> =
            catalog_keys.into_iter().filter(|k| k.0 == 8).collect();
        assert_eq!(catalog_keys.len(), 5);

        const NONE: usize = usize::MAX;
        let mut table = vec![NONE; n * n];
        for j in 0..n {
            table[j] = j;
            table[j * n] = j;
        }
        let mut seen_keys: BTreeSet<(usize, bool, Vec<usize>)> = BTreeSet::new();
        let mut count = 0usize;

        // sound (not necessarily complete) pruning: check associativity on
        // the triples touching the freshly placed product i·j = v
        fn new_cell_ok(t: &[usize], n: usize, i: usize, j: usize) -> bool {
            let at = |a: usize, b: usize| t[a * n + b];
            let v = at(i, j);
            for c in 0..n {
                // (i·j)·c vs i·(j·c)
                let jc = at(j, c);
                if jc != NONE {
                    let left = at(v, c);
                    let right = at(i, jc);
                    if left != NONE && right != NONE && left != right {
                        return false;
                    }
                }
                // (c·i)·j vs c·(i·j)
                let ci = at(c, i);
                if ci != NONE {
                    let left = at(ci, j);
                    let right = at(c, v);
                    if left != NONE && right != NONE && left != right {
                        return false;
                    }
                }
            }
            // products equal to i followed by j, and pairs producing j after i
            for a in 0..n {
                for b in 0..n {
                    let ab = at(a, b);
                    if ab == i {
                        let bj = at(b, j);
                        if bj != NONE {
                            let right = at(a, bj);
                            if right != NONE && right != v {
                                return false;
                            }
                        }
                    }
                    if ab == j {
                        let ia = at(i, a);
                        if ia != NONE {
                            let left = at(ia, b);
                            if left != NONE && left != v {
                                return false;
                            }
                        }
                    }
                }
            }
            true
        }

        fn search(
            t: &mut Vec<usize>,
            n: usize,
            cell: usize,
            count: &mut usize,
            keys: &mut BTreeSet<(usize, bool, Vec<usize>)>,
            catalog: &[(usize, bool, Vec<usize>)],
        ) {
            if cell == n * n {
                // the constructor re-checks associativity in full
                if let Ok(g) = FiniteGroup::from_table("search", n, t.clone()) {
                    *count += 1;
                    let key = g.invariant_key();
                    assert!(
                        catalog.contains(&key),
                        "table search found a group outside the catalog"
                    );
                    keys.insert(key);
                }
                return;
            }
            let (i, j) = (cell / n, cell % n);
            if t[cell] != NONE {
                search(t, n, cell + 1, count, keys, catalog);
                return;
            }
            for v in 0..n {
                if (0..n).any(|c| t[i * n + c] == v) || (0..n).any(|r| t[r * n + j] == v) {
                    continue;
                }
                t[cell] = v;
                if new_cell_ok(t, n, i, j) {
                    search(t, n, cell + 1, count, keys, catalog);
                }
                t[cell] = NONE;
            }
        }
        search(&mut table, n, 0, &mut count, &mut seen_keys, &catalog_keys);
        assert!(count > 0);
        // every isomorphism class of order 8 appears in the search
        assert_eq!(seen_keys.len(), 5);
    }

    #[test]
    fn prop_1_1_equivalence_on_corpus() {
        // for F_π-separable Y: quasi-regular ⟺ all of Ω_π(Y) separable
        for g in corpus() {
            for pi in [pi2(), pi3()] {
                for y in all_subgroups(&g) {
                    if !is_separable_in_finite(&g, &y, &pi) {
                        continue;
                    }
                    let qr = quasi_regular_finite(&g, &y, &pi);
                    let all_sep = omega_pi_subgroups_of(&g, &y, &pi)
                        .iter()
                        .all(|m| is_separable_in_finite(&g, m, &pi));
                    assert_eq!(qr, all_sep, "Prop 1.1 fails in {} for |Y|={}", g, y.len());
                }
            }
        }
    }

    #[test]
    fn prop_1_3_direction_on_corpus() {
        // separable ⇒ π'-isolated, by element scan
        for g in corpus() {
            for pi in [pi2(), pi3()] {
                for y in all_subgroups(&g) {
                    if !is_separable_in_finite(&g, &y, &pi) {
                        continue;
                    }
                    for x in 0..g.order() {
                        if y.contains(x) {
                            continue;
                        }
                        let ord = g.element_order(x) as u64;
                        for q in 1..=ord {
                            if pi.is_pi_prime_number(&BigInt::from(q)) {
                                assert!(
                                    !y.contains(g.pow(x, q as i64)),
                                    "separable but not isolated in {}",
                                    g
                                );
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn prop_1_2_core_chains_on_corpus() {
        // along any subnormal chain Y ⊴ … ⊴ G with π-power indices, iterated
        // cores land in Ω_π(G) inside each M ∈ Ω_π(Y)
        for g in corpus() {
            for pi in [pi2(), pi3()] {
                let subs = all_subgroups(&g);
                let full = FiniteSubgroup::full(&g);
                for y in &subs {
                    for chain in subnormal_pi_chains(&g, y, &full, &pi, &subs) {
                        for m in omega_pi_subgroups_of(&g, y, &pi) {
                            let mut n = m.clone();
                            for level in &chain {
                                n = normal_core(&g, &n, level).unwrap();
                                let idx = level.len() / n.len();
                                assert!(
                                    pi.is_pi_number(&BigInt::from(idx)),
                                    "core lost π-index in {}",
                                    g
                                );
                            }
                            assert!(n.is_normal_in(&g, &full));
                            assert!(n.is_subset_of(&m));
                            assert!(pi.is_pi_number(&BigInt::from(g.order() / n.len())));
                        }
                    }
                }
            }
        }
    }

    fn corpus() -> Vec<FiniteGroup> {
        vec![
            FiniteGroup::cyclic(6),
            FiniteGroup::cyclic(12),
            FiniteGroup::symmetric3(),
            FiniteGroup::dihedral4(),
            FiniteGroup::alternating4(),
        ]
    }

    /// All chains y ⊴ y₁ ⊴ … ⊴ full with π-power indices at each step.
    fn subnormal_pi_chains(
        g: &FiniteGroup,
        y: &FiniteSubgroup,
        full: &FiniteSubgroup,
        pi: &PiSet,
        subs: &[FiniteSubgroup],
    ) -> Vec<Vec<FiniteSubgroup>> {
        if y == full {
            return vec![vec![]];
        }
        let mut chains = Vec::new();
        for next in subs {
            if next.len() <= y.len() || !y.is_subset_of(next) {
                continue;
            }
            if !y.is_normal_in(g, next) {
                continue;
            }
            if !pi.is_pi_number(&BigInt::from(next.len() / y.len())) {
                continue;
            }
            for mut rest in subnormal_pi_chains(g, next, full, pi, subs) {
                let mut chain = vec![next.clone()];
                chain.append(&mut rest);
                chains.push(chain);
            }
        }
        chains
    }

    #[test]
    fn serialization_row_major() {
        let c2 = FiniteGroup::cyclic(2);
        assert_eq!(c2.table(), &[0, 1, 1, 0]);
    }
}
