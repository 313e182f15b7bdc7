//! Independent certificate checking. This module shares only the document
//! and word parser with the search path; the group-table checks, image
//! well-definedness, word evaluation and the escape test are all
//! re-implemented here on the raw serialized data.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use crate::cert::{CertificateFile, CLAIM};
use crate::dsl::{self, DeclExpr, SpecDocument, WordAtom};

#[derive(Debug, Clone, serde::Serialize)]
pub struct StepResult {
    pub step: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct VerifyReport {
    pub ok: bool,
    pub steps: Vec<StepResult>,
}

impl VerifyReport {
    fn fail(mut self, step: &'static str, detail: String) -> VerifyReport {
        self.steps.push(StepResult { step, passed: false, detail });
        self.ok = false;
        self
    }

    fn pass(&mut self, step: &'static str) {
        self.steps.push(StepResult { step, passed: true, detail: String::new() });
    }

    pub fn failed_step(&self) -> Option<&StepResult> {
        self.steps.iter().find(|s| !s.passed)
    }
}

enum VKind {
    Free { letters: Vec<String> },
    Abelian { rank: usize, moduli: Vec<BigInt> },
}

struct VFactor {
    name: String,
    kind: VKind,
}

impl VFactor {
    fn generator_count(&self) -> usize {
        match &self.kind {
            VKind::Free { letters } => letters.len(),
            VKind::Abelian { rank, moduli } => rank + moduli.len(),
        }
    }
}

/// Raw multiplication-table helpers, independent of the engine types.
struct Table<'a> {
    order: usize,
    entries: &'a [usize],
}

impl<'a> Table<'a> {
    fn mul(&self, a: usize, b: usize) -> usize {
        self.entries[a * self.order + b]
    }

    fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut n = 1usize;
        while x != 0 {
            x = self.mul(x, a);
            n += 1;
        }
        n
    }

    fn pow_big(&self, a: usize, e: &BigInt) -> usize {
        let ord = BigInt::from(self.element_order(a));
        let mut r = usize::try_from(e.mod_floor(&ord)).expect("reduced exponent fits");
        let mut acc = 0usize;
        while r > 0 {
            acc = self.mul(acc, a);
            r -= 1;
        }
        acc
    }

    fn cyclic_closure(&self, a: usize) -> Vec<bool> {
        let mut seen = vec![false; self.order];
        let mut x = 0usize;
        loop {
            if seen[x] {
                return seen;
            }
            seen[x] = true;
            x = self.mul(x, a);
        }
    }
}

/// Full re-check of a parsed certificate. `Err` means the serialized data is
/// malformed (as opposed to a failed check).
pub fn verify_certificate(cert: &CertificateFile) -> Result<VerifyReport, String> {
    if cert.claim != CLAIM {
        return Err(format!("unknown claim `{}`", cert.claim));
    }
    cert.pi.to_pi_set()?;
    let doc = dsl::parse_spec(&cert.spec).map_err(|e| format!("spec text: {e}"))?;
    let (fa, fb, h_gens, k_gens) = resolve_factors(&doc)?;

    let mut report = VerifyReport { ok: true, steps: Vec::new() };

    // (i) the table is a group
    let order = cert.group.order;
    if order == 0 || cert.group.table.len() != order * order {
        return Err("table size does not match the order".into());
    }
    if let Some(&bad) = cert.group.table.iter().find(|&&x| x >= order) {
        return Err(format!("table entry {bad} out of range"));
    }
    let t = Table { order, entries: &cert.group.table };
    if let Err(detail) = check_group_axioms(&t) {
        return Ok(report.fail("cayley-table", detail));
    }
    report.pass("cayley-table");

    // (ii) both image tuples define homomorphisms
    for (factor, images, side) in [(&fa, &cert.images.a, "A"), (&fb, &cert.images.b, "B")] {
        if images.len() != factor.generator_count() {
            return Ok(report.fail(
                "hom-well-defined",
                format!("side {side}: {} images for {} generators", images.len(),
                    factor.generator_count()),
            ));
        }
        if let Some(&bad) = images.iter().find(|&&x| x >= order) {
            return Ok(report.fail("hom-well-defined", format!("side {side}: image {bad} out of range")));
        }
        if let VKind::Abelian { rank, moduli } = &factor.kind {
            for (i, &x) in images.iter().enumerate() {
                for &y in &images[i + 1..] {
                    if t.mul(x, y) != t.mul(y, x) {
                        return Ok(report.fail(
                            "hom-well-defined",
                            format!("side {side}: images {x} and {y} do not commute"),
                        ));
                    }
                }
                if i >= *rank {
                    let m = &moduli[i - rank];
                    if !(m % BigInt::from(t.element_order(x))).is_zero() {
                        return Ok(report.fail(
                            "hom-well-defined",
                            format!("side {side}: image {x} has order not dividing {m}"),
                        ));
                    }
                }
            }
        }
    }
    report.pass("hom-well-defined");

    // (iii) commuting condition on the subgroup generator images
    for hg in &h_gens {
        let x = match eval_single_factor(&t, &fa, &cert.images.a, hg) {
            Ok(x) => x,
            Err(e) => return Ok(report.fail("commuting-condition", e)),
        };
        for kg in &k_gens {
            let y = match eval_single_factor(&t, &fb, &cert.images.b, kg) {
                Ok(y) => y,
                Err(e) => return Ok(report.fail("commuting-condition", e)),
            };
            if t.mul(x, y) != t.mul(y, x) {
                return Ok(report.fail(
                    "commuting-condition",
                    format!("images {x} and {y} of subgroup generators do not commute"),
                ));
            }
        }
    }
    report.pass("commuting-condition");

    // (iv) evaluate g and c
    let psi_g = match eval_product_word(&t, &fa, &fb, &cert.images, &cert.g) {
        Ok(v) => v,
        Err(e) => return Ok(report.fail("word-evaluation", format!("g: {e}"))),
    };
    let psi_c = match eval_product_word(&t, &fa, &fb, &cert.images, &cert.c) {
        Ok(v) => v,
        Err(e) => return Ok(report.fail("word-evaluation", format!("c: {e}"))),
    };
    report.pass("word-evaluation");

    // (v) ψ(g) escapes ⟨ψ(c)⟩
    let closure = t.cyclic_closure(psi_c);
    if closure[psi_g] {
        return Ok(report.fail(
            "escape",
            format!("ψ(g) = {psi_g} lies in the cyclic subgroup of ψ(c) = {psi_c}"),
        ));
    }
    report.pass("escape");
    Ok(report)
}

pub fn verify_json(text: &str) -> Result<VerifyReport, String> {
    verify_certificate(&CertificateFile::from_json(text)?)
}

fn check_group_axioms(t: &Table) -> Result<(), String> {
    let n = t.order;
    for i in 0..n {
        let mut row = vec![false; n];
        let mut col = vec![false; n];
        for j in 0..n {
            row[t.mul(i, j)] = true;
            col[t.mul(j, i)] = true;
        }
        if row.contains(&false) || col.contains(&false) {
            return Err(format!("row or column {i} is not a permutation"));
        }
    }
    for i in 0..n {
        if t.mul(0, i) != i || t.mul(i, 0) != i {
            return Err("index 0 is not an identity".into());
        }
    }
    for i in 0..n {
        if !(0..n).any(|j| t.mul(i, j) == 0) {
            return Err(format!("element {i} has no inverse"));
        }
    }
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                if t.mul(t.mul(a, b), c) != t.mul(a, t.mul(b, c)) {
                    return Err(format!("associativity fails at ({a},{b},{c})"));
                }
            }
        }
    }
    Ok(())
}

fn resolve_factors(
    doc: &SpecDocument,
) -> Result<(VFactor, VFactor, Vec<Vec<WordAtom>>, Vec<Vec<WordAtom>>), String> {
    let products: Vec<_> =
        doc.decls.iter().filter(|d| matches!(d.expr, DeclExpr::CommProd { .. })).collect();
    let [prod] = products.as_slice() else {
        return Err("spec must declare exactly one commprod".into());
    };
    let DeclExpr::CommProd { a, h, b, k } = &prod.expr else { unreachable!() };
    let factor = |name: &str| -> Result<VFactor, String> {
        let d = doc
            .decls
            .iter()
            .find(|d| &d.name == name)
            .ok_or_else(|| format!("`{name}` is not declared"))?;
        match &d.expr {
            DeclExpr::Free { letters } => {
                Ok(VFactor { name: name.into(), kind: VKind::Free { letters: letters.clone() } })
            }
            DeclExpr::Abelian { rank, torsion } => Ok(VFactor {
                name: name.into(),
                kind: VKind::Abelian { rank: *rank, moduli: torsion.clone() },
            }),
            _ => Err(format!("`{name}` is not a group declaration")),
        }
    };
    let subgroup_gens = |name: &str, of: &str| -> Result<Vec<Vec<WordAtom>>, String> {
        let d = doc
            .decls
            .iter()
            .find(|d| &d.name == name)
            .ok_or_else(|| format!("`{name}` is not declared"))?;
        match &d.expr {
            DeclExpr::Subgroup { of: owner, gens } if owner == of => Ok(gens.clone()),
            DeclExpr::Subgroup { of: owner, .. } => {
                Err(format!("subgroup `{name}` lives in `{owner}`, expected `{of}`"))
            }
            _ => Err(format!("`{name}` is not a subgroup declaration")),
        }
    };
    Ok((factor(a)?, factor(b)?, subgroup_gens(h, a)?, subgroup_gens(k, b)?))
}

/// Evaluates a one-factor word through an image tuple.
fn eval_single_factor(
    t: &Table,
    factor: &VFactor,
    images: &[usize],
    atoms: &[WordAtom],
) -> Result<usize, String> {
    let mut acc = 0usize;
    for atom in atoms {
        let img = eval_atom_in(t, factor, images, atom)?
            .ok_or_else(|| format!("atom does not belong to `{}`", factor.name))?;
        acc = t.mul(acc, img);
    }
    Ok(acc)
}

/// Evaluates one atom against a specific factor; `Ok(None)` when the atom
/// belongs to the other factor.
fn eval_atom_in(
    t: &Table,
    factor: &VFactor,
    images: &[usize],
    atom: &WordAtom,
) -> Result<Option<usize>, String> {
    match (&factor.kind, &atom.name, &atom.tuple) {
        (VKind::Free { letters }, Some(n), None) => {
            match letters.iter().position(|l| l == n) {
                Some(idx) => Ok(Some(t.pow_big(images[idx], &atom.exp))),
                None => Ok(None),
            }
        }
        (VKind::Abelian { rank, moduli }, name, Some(coords)) => {
            if let Some(n) = name {
                if n != &factor.name {
                    return Ok(None);
                }
            }
            if coords.len() != rank + moduli.len() {
                return Err(format!(
                    "tuple has {} coordinates, `{}` has {}",
                    coords.len(),
                    factor.name,
                    rank + moduli.len()
                ));
            }
            let mut acc = 0usize;
            for (i, c) in coords.iter().enumerate() {
                let e = c * &atom.exp;
                acc = t.mul(acc, t.pow_big(images[i], &e));
            }
            Ok(Some(acc))
        }
        _ => Ok(None),
    }
}

fn eval_product_word(
    t: &Table,
    fa: &VFactor,
    fb: &VFactor,
    images: &crate::cert::CertImages,
    text: &str,
) -> Result<usize, String> {
    let atoms = dsl::parse_word_atoms(text).map_err(|e| e.to_string())?;
    let mut acc = 0usize;
    for atom in &atoms {
        let img = match eval_atom_in(t, fa, &images.a, atom)? {
            Some(v) => v,
            None => eval_atom_in(t, fb, &images.b, atom)?
                .ok_or_else(|| format!("atom {atom:?} belongs to neither factor"))?,
        };
        acc = t.mul(acc, img);
    }
    Ok(acc)
}
