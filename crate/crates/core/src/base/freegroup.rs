//! Free groups of finite rank: reduced words in run-length encoding with
//! arbitrary-precision exponents, primitive roots, and cyclic subgroups with
//! canonical coset representatives.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;

use crate::error::GroupError;

/// Expanding a multi-run word beyond this many letters is refused.
const EXPANSION_LIMIT: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FreeGroup {
    letters: Vec<String>,
}

impl FreeGroup {
    pub fn new(letters: Vec<String>) -> Self {
        assert!(!letters.is_empty(), "free group needs rank >= 1");
        FreeGroup { letters }
    }

    pub fn rank(&self) -> usize {
        self.letters.len()
    }

    pub fn letters(&self) -> &[String] {
        &self.letters
    }

    pub fn letter_index(&self, name: &str) -> Option<usize> {
        self.letters.iter().position(|l| l == name)
    }

    pub fn validate(&self, w: &FreeWord) -> Result<(), GroupError> {
        match w.runs.iter().map(|(l, _)| *l).max() {
            Some(max) if max >= self.rank() => Err(GroupError::LetterOutOfRange(max)),
            _ => Ok(()),
        }
    }

    pub fn format_word(&self, w: &FreeWord) -> String {
        if w.is_identity() {
            return "1".to_string();
        }
        w.runs
            .iter()
            .map(|(l, e)| {
                if e.is_one() {
                    self.letters[*l].clone()
                } else {
                    format!("{}^{}", self.letters[*l], e)
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// A reduced word: maximal runs `letter^exp` with nonzero exponents and
/// distinct adjacent letters. The empty word is the identity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct FreeWord {
    runs: Vec<(usize, BigInt)>,
}

impl FreeWord {
    pub fn identity() -> Self {
        FreeWord::default()
    }

    pub fn letter(idx: usize) -> Self {
        FreeWord { runs: vec![(idx, BigInt::one())] }
    }

    pub fn from_runs<I: IntoIterator<Item = (usize, BigInt)>>(runs: I) -> Self {
        let mut out: Vec<(usize, BigInt)> = Vec::new();
        for (l, e) in runs {
            push_run(&mut out, l, e);
        }
        FreeWord { runs: out }
    }

    pub fn runs(&self) -> &[(usize, BigInt)] {
        &self.runs
    }

    pub fn is_identity(&self) -> bool {
        self.runs.is_empty()
    }

    pub fn total_length(&self) -> BigInt {
        self.runs.iter().map(|(_, e)| e.abs()).sum()
    }

    pub fn mul(&self, other: &FreeWord) -> FreeWord {
        let mut out = self.runs.clone();
        for (l, e) in &other.runs {
            push_run(&mut out, *l, e.clone());
        }
        FreeWord { runs: out }
    }

    pub fn inverse(&self) -> FreeWord {
        FreeWord { runs: self.runs.iter().rev().map(|(l, e)| (*l, -e)).collect() }
    }

    pub fn pow(&self, n: &BigInt) -> Result<FreeWord, GroupError> {
        if n.is_zero() || self.is_identity() {
            return Ok(FreeWord::identity());
        }
        if n.is_negative() {
            return self.inverse().pow(&-n);
        }
        if self.runs.len() == 1 {
            let (l, e) = &self.runs[0];
            return Ok(FreeWord { runs: vec![(*l, e * n)] });
        }
        let (conj, core) = self.cyclic_decompose();
        if core.runs.len() == 1 {
            let (l, e) = &core.runs[0];
            let mid = FreeWord { runs: vec![(*l, e * n)] };
            return Ok(conj.mul(&mid).mul(&conj.inverse()));
        }
        let reps = u64::try_from(n).map_err(|_| GroupError::ExponentOverflow)?;
        if reps.saturating_mul(core.runs.len() as u64) > EXPANSION_LIMIT {
            return Err(GroupError::ExponentOverflow);
        }
        let mut mid = FreeWord::identity();
        for _ in 0..reps {
            mid = mid.mul(&core);
        }
        Ok(conj.mul(&mid).mul(&conj.inverse()))
    }

    /// Splits `w = c · v · c⁻¹` with `v` cyclically reduced.
    pub fn cyclic_decompose(&self) -> (FreeWord, FreeWord) {
        let mut conj: Vec<(usize, BigInt)> = Vec::new();
        let mut v = self.runs.clone();
        loop {
            if v.len() < 2 {
                break;
            }
            let (fl, fe) = v.first().unwrap().clone();
            let (ll, le) = v.last().unwrap().clone();
            if fl != ll || fe.sign() == le.sign() {
                break;
            }
            let m = fe.abs().min(le.abs());
            let step = if fe.is_positive() { m.clone() } else { -m.clone() };
            push_run(&mut conj, fl, step.clone());
            v[0].1 -= &step;
            let last = v.len() - 1;
            v[last].1 += &step;
            if v[last].1.is_zero() {
                v.pop();
            }
            if v[0].1.is_zero() {
                v.remove(0);
            }
            // removing both boundary runs may expose a mergeable seam
            if v.len() >= 2 && v.first().unwrap().0 == v.last().unwrap().0 {
                continue;
            }
        }
        (FreeWord { runs: conj }, FreeWord { runs: v })
    }

    /// True iff no cyclic conjugation shortens the word.
    pub fn is_cyclically_reduced(&self) -> bool {
        self.cyclic_decompose().0.is_identity()
    }

    /// Writes `w = r^m` with `r` not a proper power and `m >= 1`.
    /// Conjugates are handled via `root(c v c⁻¹) = c · root(v) · c⁻¹`.
    pub fn primitive_root(&self) -> Result<(FreeWord, BigInt), GroupError> {
        if self.is_identity() {
            return Err(GroupError::IdentityInput);
        }
        let (conj, core) = self.cyclic_decompose();
        let (root, mult) = core_primitive_root(&core)?;
        if conj.is_identity() {
            Ok((root, mult))
        } else {
            Ok((conj.mul(&root).mul(&conj.inverse()), mult))
        }
    }

    /// Total order by length first, then leftmost letter tokens with
    /// `x < x⁻¹ < y < y⁻¹ < …`.
    pub fn cmp_len_lex(&self, other: &FreeWord) -> Ordering {
        match self.total_length().cmp(&other.total_length()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        let mut ia = 0usize;
        let mut ib = 0usize;
        let mut rem_a = BigInt::zero();
        let mut rem_b = BigInt::zero();
        loop {
            if rem_a.is_zero() {
                if ia == self.runs.len() {
                    return Ordering::Equal;
                }
                rem_a = self.runs[ia].1.abs();
                ia += 1;
            }
            if rem_b.is_zero() {
                if ib == other.runs.len() {
                    return Ordering::Equal;
                }
                rem_b = other.runs[ib].1.abs();
                ib += 1;
            }
            let ta = (self.runs[ia - 1].0, self.runs[ia - 1].1.is_negative());
            let tb = (other.runs[ib - 1].0, other.runs[ib - 1].1.is_negative());
            match ta.cmp(&tb) {
                Ordering::Equal => {}
                ord => return ord,
            }
            let step = rem_a.clone().min(rem_b.clone());
            rem_a -= &step;
            rem_b -= &step;
        }
    }

    /// Letter-length prefix, splitting a run if needed.
    fn prefix_letters(&self, n: &BigInt) -> FreeWord {
        let mut left = n.clone();
        let mut out: Vec<(usize, BigInt)> = Vec::new();
        for (l, e) in &self.runs {
            if left.is_zero() {
                break;
            }
            let take = e.abs().min(left.clone());
            out.push((*l, if e.is_positive() { take.clone() } else { -take.clone() }));
            left -= &take;
        }
        assert!(left.is_zero(), "prefix longer than word");
        FreeWord { runs: out }
    }
}

fn push_run(runs: &mut Vec<(usize, BigInt)>, letter: usize, exp: BigInt) {
    if exp.is_zero() {
        return;
    }
    if let Some((l, e)) = runs.last_mut() {
        if *l == letter {
            *e += exp;
            if e.is_zero() {
                runs.pop();
            }
            return;
        }
    }
    runs.push((letter, exp));
}

/// Primitive root of a cyclically reduced nontrivial word.
fn core_primitive_root(core: &FreeWord) -> Result<(FreeWord, BigInt), GroupError> {
    if core.runs.len() == 1 {
        let (l, e) = &core.runs[0];
        let sign = if e.is_positive() { BigInt::one() } else { -BigInt::one() };
        return Ok((FreeWord { runs: vec![(*l, sign)] }, e.abs()));
    }
    // cyclic run sequence: merge the seam when first and last runs share a letter
    let runs = &core.runs;
    let cyc: Vec<(usize, BigInt)> = if runs.first().unwrap().0 == runs.last().unwrap().0 {
        let mut c = Vec::with_capacity(runs.len() - 1);
        c.push((runs[0].0, &runs[0].1 + &runs[runs.len() - 1].1));
        c.extend(runs[1..runs.len() - 1].iter().cloned());
        c
    } else {
        runs.clone()
    };
    let r = cyc.len();
    let total = core.total_length();
    for d in 1..=r {
        if r % d != 0 {
            continue;
        }
        let periodic = (0..r).all(|i| cyc[i] == cyc[(i + d) % r]);
        if !periodic {
            continue;
        }
        let m = BigInt::from((r / d) as u64);
        if m.is_one() {
            return Ok((core.clone(), BigInt::one()));
        }
        let (len, rem) = num_integer::Integer::div_rem(&total, &m);
        if !rem.is_zero() {
            continue;
        }
        let candidate = core.prefix_letters(&len);
        if candidate.pow(&m)? == *core {
            return Ok((candidate, m));
        }
    }
    Ok((core.clone(), BigInt::one()))
}

/// Cyclic subgroup ⟨gen⟩ of a free group with the cached primitive root
/// decomposition `gen = root^mult`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreeCyclicSubgroup {
    gen: FreeWord,
    root: FreeWord,
    mult: BigInt,
}

impl FreeCyclicSubgroup {
    pub fn new(gen: FreeWord) -> Result<Self, GroupError> {
        let (root, mult) = gen.primitive_root()?;
        Ok(FreeCyclicSubgroup { gen, root, mult })
    }

    pub fn generator(&self) -> &FreeWord {
        &self.gen
    }

    pub fn root(&self) -> &FreeWord {
        &self.root
    }

    pub fn mult(&self) -> &BigInt {
        &self.mult
    }

    /// Exponent `e` with `x = gen^e`, if any.
    pub fn membership(&self, x: &FreeWord) -> Option<BigInt> {
        if x.is_identity() {
            return Some(BigInt::zero());
        }
        let (rx, mx) = x.primitive_root().ok()?;
        if rx == self.root {
            let (e, rem) = num_integer::Integer::div_rem(&mx, &self.mult);
            if rem.is_zero() {
                return Some(e);
            }
        } else if rx == self.root.inverse() {
            let (e, rem) = num_integer::Integer::div_rem(&mx, &self.mult);
            if rem.is_zero() {
                return Some(-e);
            }
        }
        None
    }

    pub fn contains(&self, x: &FreeWord) -> bool {
        self.membership(x).is_some()
    }

    /// Canonical representative of the right coset `⟨gen⟩·x`: the
    /// (length, lex)-minimal element of `{gen^e · x}`.
    pub fn coset_rep(&self, x: &FreeWord) -> FreeWord {
        let (_, core) = self.gen.cyclic_decompose();
        let core_len = core.total_length();
        let conj_len = &self.gen.total_length() - &core_len;

        let mut best = x.clone();
        for dir in [1i64, -1] {
            let step = if dir > 0 { self.gen.clone() } else { self.gen.inverse() };
            let mut cand = x.clone();
            let mut e = BigInt::zero();
            loop {
                e += 1u32;
                cand = step.mul(&cand);
                if cand.cmp_len_lex(&best) == Ordering::Less {
                    best = cand.clone();
                }
                // |gen^e·x| >= |e|·core - |x| - 2·conj: beyond that bound no
                // further exponent can beat the current best
                let lower = &e * &core_len - x.total_length() - BigInt::from(2u32) * &conj_len;
                if lower > best.total_length() {
                    break;
                }
            }
        }
        best
    }
}
