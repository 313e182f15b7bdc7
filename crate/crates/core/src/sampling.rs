//! Seeded random words and element-preserving rewrites, shared by the
//! property-test corpora and the CLI self-test runner.

use num_bigint::BigInt;
use rand::Rng;

use crate::base::{BaseElement, BaseGroup, FreeWord};
use crate::commprod::{CommProdSpec, FactorTag, GLetter, GWord};

pub fn random_base_element(group: &BaseGroup, rng: &mut impl Rng, spread: i64) -> BaseElement {
    match group {
        BaseGroup::Free(f) => {
            let runs = (0..rng.gen_range(0..3usize))
                .map(|_| (rng.gen_range(0..f.rank()), BigInt::from(rng.gen_range(-spread..=spread))));
            BaseElement::Word(FreeWord::from_runs(runs))
        }
        BaseGroup::Abelian(g) => BaseElement::Vector(
            g.reduce((0..g.dim()).map(|_| BigInt::from(rng.gen_range(-spread..=spread))).collect()),
        ),
    }
}

pub fn random_word(spec: &CommProdSpec, rng: &mut impl Rng, max_len: usize) -> GWord {
    let len = rng.gen_range(0..=max_len);
    let mut letters = Vec::new();
    for _ in 0..len {
        let tag = if rng.gen_bool(0.5) { FactorTag::A } else { FactorTag::B };
        let elt = random_base_element(spec.factor(tag), rng, 3);
        letters.push(GLetter { tag, elt });
    }
    GWord::new(spec, letters).expect("letters come from the factors")
}

/// Random element of a commuting subgroup: a small power combination of its
/// generators.
pub fn random_subgroup_element(
    spec: &CommProdSpec,
    tag: FactorTag,
    rng: &mut impl Rng,
) -> BaseElement {
    let factor = spec.factor(tag);
    let mut acc = factor.identity();
    for g in spec.subgroup_gens(tag) {
        let e = BigInt::from(rng.gen_range(-2..=2i64));
        let p = factor.pow(g, &e).expect("small exponent");
        acc = factor.mul(&acc, &p).expect("validated");
    }
    acc
}

/// Applies element-preserving rewrites to a word: insertion of a defining
/// commutator `[h, k]` with `h ∈ H`, `k ∈ K`, insertion of a cancelling
/// factor pair, and merging of adjacent same-factor letters.
pub fn random_rewrite(
    spec: &CommProdSpec,
    w: &GWord,
    rng: &mut impl Rng,
    steps: usize,
) -> GWord {
    let mut letters: Vec<GLetter> = w.letters().to_vec();
    for _ in 0..steps {
        let pos = rng.gen_range(0..=letters.len());
        match rng.gen_range(0..3) {
            0 => {
                let h = random_subgroup_element(spec, FactorTag::A, rng);
                let k = random_subgroup_element(spec, FactorTag::B, rng);
                let a = spec.factor(FactorTag::A);
                let b = spec.factor(FactorTag::B);
                let ins = vec![
                    GLetter { tag: FactorTag::A, elt: h.clone() },
                    GLetter { tag: FactorTag::B, elt: k.clone() },
                    GLetter { tag: FactorTag::A, elt: a.inv(&h).expect("validated") },
                    GLetter { tag: FactorTag::B, elt: b.inv(&k).expect("validated") },
                ];
                letters.splice(pos..pos, ins);
            }
            1 => {
                let tag = if rng.gen_bool(0.5) { FactorTag::A } else { FactorTag::B };
                let x = random_base_element(spec.factor(tag), rng, 2);
                let xi = spec.factor(tag).inv(&x).expect("validated");
                letters.splice(
                    pos..pos,
                    vec![GLetter { tag, elt: x }, GLetter { tag, elt: xi }],
                );
            }
            _ => {
                if let Some(i) = (0..letters.len().saturating_sub(1))
                    .find(|&i| letters[i].tag == letters[i + 1].tag)
                {
                    let tag = letters[i].tag;
                    let merged = spec
                        .factor(tag)
                        .mul(&letters[i].elt, &letters[i + 1].elt)
                        .expect("validated");
                    letters.splice(i..i + 2, Vec::new());
                    letters.insert(i, GLetter { tag, elt: merged });
                }
            }
        }
    }
    GWord::new(spec, letters).expect("letters come from the factors")
}
