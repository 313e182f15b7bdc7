//! The group-spec document language and word syntax.
//!
//! ```text
//! A = free(a)
//! H = subgroup(A; a^2)
//! B = abelian(1)
//! K = subgroup(B; (2))
//! G = commprod(A, H, B, K)
//! pi = 2
//! max_order = 16
//! ```
//!
//! Words over free factors use letters (`a^3 b^-2 a`); elements of abelian
//! factors are integer tuples prefixed by the factor name (`B(2, 1)`). `1`
//! denotes the identity.

use num_bigint::BigInt;
use num_traits::One;

use crate::arith::PiSet;
use crate::base::{BaseElement, BaseGroup, FreeWord};
use crate::commprod::{CommProdSpec, FactorTag, GLetter, GWord};
use crate::error::DslError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DeclExpr {
    Free { letters: Vec<String> },
    Abelian { rank: usize, torsion: Vec<BigInt> },
    Subgroup { of: String, gens: Vec<Vec<WordAtom>> },
    CommProd { a: String, h: String, b: String, k: String },
}

/// A named declaration plus the line it was made on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decl {
    pub name: String,
    pub line: usize,
    pub expr: DeclExpr,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SpecDocument {
    pub decls: Vec<Decl>,
    pub default_pi: Option<PiSet>,
    pub default_max_order: Option<u64>,
}

/// One atom of a word: a letter or a coordinate tuple, with an exponent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordAtom {
    pub name: Option<String>,
    pub tuple: Option<Vec<BigInt>>,
    pub exp: BigInt,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    col: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(BigInt),
    Sym(char),
    Eof,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src: src.as_bytes(), pos: 0, line: 1, col: 1 }
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.src.get(self.pos).copied()?;
        self.pos += 1;
        if c == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn tokens(mut self) -> Result<Vec<Spanned>, DslError> {
        let mut out = Vec::new();
        loop {
            while let Some(c) = self.peek() {
                if c == b'#' {
                    while let Some(c) = self.peek() {
                        if c == b'\n' {
                            break;
                        }
                        self.bump();
                    }
                } else if c.is_ascii_whitespace() {
                    self.bump();
                } else {
                    break;
                }
            }
            let (line, col) = (self.line, self.col);
            let Some(c) = self.peek() else {
                out.push(Spanned { tok: Tok::Eof, line, col });
                return Ok(out);
            };
            if c.is_ascii_alphabetic() || c == b'_' {
                let mut s = String::new();
                while let Some(c) = self.peek() {
                    if c.is_ascii_alphanumeric() || c == b'_' {
                        s.push(c as char);
                        self.bump();
                    } else {
                        break;
                    }
                }
                out.push(Spanned { tok: Tok::Ident(s), line, col });
            } else if c.is_ascii_digit() || c == b'-' || c == b'+' {
                let mut s = String::new();
                s.push(c as char);
                self.bump();
                while let Some(c) = self.peek() {
                    if c.is_ascii_digit() {
                        s.push(c as char);
                        self.bump();
                    } else {
                        break;
                    }
                }
                let v: BigInt = s.parse().map_err(|_| DslError::Syntax {
                    line,
                    col,
                    msg: format!("bad integer literal `{s}`"),
                })?;
                out.push(Spanned { tok: Tok::Int(v), line, col });
            } else if b"()[],;^=".contains(&c) {
                self.bump();
                out.push(Spanned { tok: Tok::Sym(c as char), line, col });
            } else {
                return Err(DslError::Syntax {
                    line,
                    col,
                    msg: format!("unexpected character `{}`", c as char),
                });
            }
        }
    }
}

struct Parser {
    toks: Vec<Spanned>,
    i: usize,
}

impl Parser {
    fn cur(&self) -> &Spanned {
        &self.toks[self.i]
    }

    fn advance(&mut self) -> Spanned {
        let t = self.toks[self.i].clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, DslError> {
        Err(DslError::Syntax { line: self.cur().line, col: self.cur().col, msg: msg.into() })
    }

    fn expect_sym(&mut self, c: char) -> Result<(), DslError> {
        match &self.cur().tok {
            Tok::Sym(s) if *s == c => {
                self.advance();
                Ok(())
            }
            other => self.err(format!("expected `{c}`, found {other:?}")),
        }
    }

    fn expect_ident(&mut self) -> Result<String, DslError> {
        match self.cur().tok.clone() {
            Tok::Ident(s) => {
                self.advance();
                Ok(s)
            }
            other => self.err(format!("expected a name, found {other:?}")),
        }
    }

    fn expect_int(&mut self) -> Result<BigInt, DslError> {
        match self.cur().tok.clone() {
            Tok::Int(v) => {
                self.advance();
                Ok(v)
            }
            other => self.err(format!("expected an integer, found {other:?}")),
        }
    }

    fn parse_document(&mut self) -> Result<SpecDocument, DslError> {
        let mut doc = SpecDocument::default();
        while !matches!(self.cur().tok, Tok::Eof) {
            let line = self.cur().line;
            let name = self.expect_ident()?;
            self.expect_sym('=')?;
            match name.as_str() {
                "pi" => {
                    doc.default_pi = Some(self.parse_pi()?);
                }
                "max_order" => {
                    let v = self.expect_int()?;
                    let v = u64::try_from(&v).map_err(|_| DslError::Syntax {
                        line,
                        col: 1,
                        msg: "max_order out of range".into(),
                    })?;
                    doc.default_max_order = Some(v);
                }
                _ => {
                    let expr = self.parse_expr()?;
                    doc.decls.push(Decl { name, line, expr });
                }
            }
        }
        Ok(doc)
    }

    fn parse_pi(&mut self) -> Result<PiSet, DslError> {
        let line = self.cur().line;
        let col = self.cur().col;
        match self.cur().tok.clone() {
            Tok::Ident(s) if s == "all" => {
                self.advance();
                Ok(PiSet::all())
            }
            Tok::Int(v) => {
                self.advance();
                let p = u64::try_from(&v)
                    .map_err(|_| DslError::Syntax { line, col, msg: "prime out of range".into() })?;
                PiSet::single(p)
                    .map_err(|e| DslError::Syntax { line, col, msg: e.to_string() })
            }
            other => self.err(format!("expected `all` or a prime, found {other:?}")),
        }
    }

    fn parse_expr(&mut self) -> Result<DeclExpr, DslError> {
        let head = self.expect_ident()?;
        match head.as_str() {
            "free" => {
                self.expect_sym('(')?;
                let mut letters = vec![self.expect_ident()?];
                while matches!(self.cur().tok, Tok::Sym(',')) {
                    self.advance();
                    letters.push(self.expect_ident()?);
                }
                self.expect_sym(')')?;
                Ok(DeclExpr::Free { letters })
            }
            "abelian" => {
                self.expect_sym('(')?;
                let rank_raw = self.expect_int()?;
                let rank = usize::try_from(&rank_raw).map_err(|_| DslError::Syntax {
                    line: self.cur().line,
                    col: self.cur().col,
                    msg: "rank out of range".into(),
                })?;
                let mut torsion = Vec::new();
                if matches!(self.cur().tok, Tok::Sym(',')) {
                    self.advance();
                    let kw = self.expect_ident()?;
                    if kw != "torsion" {
                        return self.err("expected `torsion`");
                    }
                    self.expect_sym('=')?;
                    self.expect_sym('[')?;
                    if !matches!(self.cur().tok, Tok::Sym(']')) {
                        torsion.push(self.expect_int()?);
                        while matches!(self.cur().tok, Tok::Sym(',')) {
                            self.advance();
                            torsion.push(self.expect_int()?);
                        }
                    }
                    self.expect_sym(']')?;
                }
                self.expect_sym(')')?;
                Ok(DeclExpr::Abelian { rank, torsion })
            }
            "subgroup" => {
                self.expect_sym('(')?;
                let of = self.expect_ident()?;
                self.expect_sym(';')?;
                let mut gens = vec![self.parse_word_until(&[',', ')'])?];
                while matches!(self.cur().tok, Tok::Sym(',')) {
                    self.advance();
                    gens.push(self.parse_word_until(&[',', ')'])?);
                }
                self.expect_sym(')')?;
                Ok(DeclExpr::Subgroup { of, gens })
            }
            "commprod" => {
                self.expect_sym('(')?;
                let a = self.expect_ident()?;
                self.expect_sym(',')?;
                let h = self.expect_ident()?;
                self.expect_sym(',')?;
                let b = self.expect_ident()?;
                self.expect_sym(',')?;
                let k = self.expect_ident()?;
                self.expect_sym(')')?;
                Ok(DeclExpr::CommProd { a, h, b, k })
            }
            other => self.err(format!("unknown constructor `{other}`")),
        }
    }

    /// Word atoms up to (not consuming) one of the stop symbols.
    fn parse_word_until(&mut self, stops: &[char]) -> Result<Vec<WordAtom>, DslError> {
        let mut atoms = Vec::new();
        loop {
            match self.cur().tok.clone() {
                Tok::Sym(c) if stops.contains(&c) => return Ok(atoms),
                Tok::Eof => return Ok(atoms),
                Tok::Ident(name) => {
                    self.advance();
                    let tuple = if matches!(self.cur().tok, Tok::Sym('(')) {
                        Some(self.parse_tuple()?)
                    } else {
                        None
                    };
                    let exp = self.parse_exponent()?;
                    atoms.push(WordAtom { name: Some(name), tuple, exp });
                }
                Tok::Sym('(') => {
                    let tuple = Some(self.parse_tuple()?);
                    let exp = self.parse_exponent()?;
                    atoms.push(WordAtom { name: None, tuple, exp });
                }
                Tok::Int(v) if v.is_one() => {
                    // the identity word
                    self.advance();
                }
                other => return self.err(format!("unexpected token in word: {other:?}")),
            }
        }
    }

    fn parse_tuple(&mut self) -> Result<Vec<BigInt>, DslError> {
        self.expect_sym('(')?;
        let mut v = Vec::new();
        if !matches!(self.cur().tok, Tok::Sym(')')) {
            v.push(self.expect_int()?);
            while matches!(self.cur().tok, Tok::Sym(',')) {
                self.advance();
                v.push(self.expect_int()?);
            }
        }
        self.expect_sym(')')?;
        Ok(v)
    }

    fn parse_exponent(&mut self) -> Result<BigInt, DslError> {
        if matches!(self.cur().tok, Tok::Sym('^')) {
            self.advance();
            self.expect_int()
        } else {
            Ok(BigInt::one())
        }
    }
}

/// Parses a standalone word into atoms (pure syntax, no resolution).
pub fn parse_word_atoms(text: &str) -> Result<Vec<WordAtom>, DslError> {
    let toks = Lexer::new(text).tokens()?;
    let mut p = Parser { toks, i: 0 };
    let atoms = p.parse_word_until(&[])?;
    if !matches!(p.cur().tok, Tok::Eof) {
        return Err(DslError::Syntax {
            line: p.cur().line,
            col: p.cur().col,
            msg: "trailing input after word".into(),
        });
    }
    Ok(atoms)
}

pub fn parse_spec(text: &str) -> Result<SpecDocument, DslError> {
    let toks = Lexer::new(text).tokens()?;
    let mut p = Parser { toks, i: 0 };
    let doc = p.parse_document()?;
    if doc.decls.is_empty() {
        return Err(DslError::Syntax { line: 1, col: 1, msg: "empty document".into() });
    }
    Ok(doc)
}

/// Canonical text of a document; parsing it back yields the same structure.
pub fn serialize_spec(doc: &SpecDocument) -> String {
    let mut out = String::new();
    for d in &doc.decls {
        match &d.expr {
            DeclExpr::Free { letters } => {
                out.push_str(&format!("{} = free({})\n", d.name, letters.join(", ")));
            }
            DeclExpr::Abelian { rank, torsion } => {
                if torsion.is_empty() {
                    out.push_str(&format!("{} = abelian({rank})\n", d.name));
                } else {
                    let t: Vec<String> = torsion.iter().map(BigInt::to_string).collect();
                    out.push_str(&format!(
                        "{} = abelian({rank}, torsion = [{}])\n",
                        d.name,
                        t.join(", ")
                    ));
                }
            }
            DeclExpr::Subgroup { of, gens } => {
                let ws: Vec<String> = gens.iter().map(|g| format_atoms(g)).collect();
                out.push_str(&format!("{} = subgroup({of}; {})\n", d.name, ws.join(", ")));
            }
            DeclExpr::CommProd { a, h, b, k } => {
                out.push_str(&format!("{} = commprod({a}, {h}, {b}, {k})\n", d.name));
            }
        }
    }
    if let Some(pi) = &doc.default_pi {
        out.push_str(&format!("pi = {pi}\n"));
    }
    if let Some(m) = doc.default_max_order {
        out.push_str(&format!("max_order = {m}\n"));
    }
    out
}

fn format_atoms(atoms: &[WordAtom]) -> String {
    if atoms.is_empty() {
        return "1".to_string();
    }
    atoms
        .iter()
        .map(|a| {
            let mut s = String::new();
            if let Some(n) = &a.name {
                s.push_str(n);
            }
            if let Some(t) = &a.tuple {
                let cs: Vec<String> = t.iter().map(BigInt::to_string).collect();
                s.push_str(&format!("({})", cs.join(", ")));
            }
            if !a.exp.is_one() {
                s.push_str(&format!("^{}", a.exp));
            }
            s
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Resolved document: the product spec plus the names it was built from.
#[derive(Debug)]
pub struct ResolvedSpec {
    pub spec: CommProdSpec,
    pub doc: SpecDocument,
}

pub fn build_product(doc: &SpecDocument) -> Result<ResolvedSpec, DslError> {
    let find = |name: &str, before: usize| -> Result<&Decl, DslError> {
        doc.decls
            .iter()
            .find(|d| d.name == name && d.line <= before)
            .ok_or_else(|| DslError::Semantic {
                line: before,
                msg: format!("`{name}` is not declared before use"),
            })
    };
    let products: Vec<&Decl> =
        doc.decls.iter().filter(|d| matches!(d.expr, DeclExpr::CommProd { .. })).collect();
    let [prod] = products.as_slice() else {
        return Err(DslError::Semantic {
            line: doc.decls.last().map_or(1, |d| d.line),
            msg: "document must declare exactly one commprod".into(),
        });
    };
    let DeclExpr::CommProd { a, h, b, k } = &prod.expr else { unreachable!() };

    let build_group = |decl: &Decl| -> Result<BaseGroup, DslError> {
        match &decl.expr {
            DeclExpr::Free { letters } => Ok(BaseGroup::free(letters.clone())),
            DeclExpr::Abelian { rank, torsion } => BaseGroup::abelian(*rank, torsion.clone())
                .map_err(|e| DslError::Semantic { line: decl.line, msg: e.to_string() }),
            _ => Err(DslError::Semantic {
                line: decl.line,
                msg: format!("`{}` is not a group declaration", decl.name),
            }),
        }
    };

    let a_decl = find(a, prod.line)?;
    let b_decl = find(b, prod.line)?;
    let ga = build_group(a_decl)?;
    let gb = build_group(b_decl)?;

    let build_gens = |decl: &Decl, of_name: &str, group: &BaseGroup| -> Result<Vec<BaseElement>, DslError> {
        let DeclExpr::Subgroup { of, gens } = &decl.expr else {
            return Err(DslError::Semantic {
                line: decl.line,
                msg: format!("`{}` is not a subgroup declaration", decl.name),
            });
        };
        if of != of_name {
            return Err(DslError::Semantic {
                line: decl.line,
                msg: format!("subgroup `{}` lives in `{of}`, expected `{of_name}`", decl.name),
            });
        }
        gens.iter()
            .map(|atoms| atoms_to_base_element(group, of_name, atoms, decl.line))
            .collect()
    };

    let h_decl = find(h, prod.line)?;
    let k_decl = find(k, prod.line)?;
    let h_gens = build_gens(h_decl, a, &ga)?;
    let k_gens = build_gens(k_decl, b, &gb)?;

    let spec = CommProdSpec::build(a, ga, h_gens, b, gb, k_gens)
        .map_err(|e| DslError::Semantic { line: prod.line, msg: e.to_string() })?;
    Ok(ResolvedSpec { spec, doc: doc.clone() })
}

/// Resolves a one-factor word (subgroup generators).
fn atoms_to_base_element(
    group: &BaseGroup,
    group_name: &str,
    atoms: &[WordAtom],
    line: usize,
) -> Result<BaseElement, DslError> {
    let mut acc = group.identity();
    for atom in atoms {
        let elt = match (group, &atom.name, &atom.tuple) {
            (BaseGroup::Free(f), Some(n), None) => {
                let Some(idx) = f.letter_index(n) else {
                    return Err(DslError::Semantic {
                        line,
                        msg: format!("`{n}` is not a letter of `{group_name}`"),
                    });
                };
                BaseElement::Word(FreeWord::from_runs([(idx, atom.exp.clone())]))
            }
            (BaseGroup::Abelian(g), name, Some(t)) => {
                if let Some(n) = name {
                    if n != group_name {
                        return Err(DslError::Semantic {
                            line,
                            msg: format!("tuple is tagged `{n}`, expected `{group_name}`"),
                        });
                    }
                }
                if t.len() != g.dim() {
                    return Err(DslError::Semantic {
                        line,
                        msg: format!(
                            "tuple has {} coordinates, `{group_name}` has {}",
                            t.len(),
                            g.dim()
                        ),
                    });
                }
                BaseElement::Vector(g.reduce(t.iter().map(|c| c * &atom.exp).collect()))
            }
            _ => {
                return Err(DslError::Semantic {
                    line,
                    msg: format!("atom does not fit the shape of `{group_name}`"),
                })
            }
        };
        acc = group.mul(&acc, &elt).map_err(|e| DslError::Semantic { line, msg: e.to_string() })?;
    }
    Ok(acc)
}

/// Parses a word of `G`: letters resolve through the free factors, tuples
/// through the factor they are tagged with.
pub fn parse_word(spec: &CommProdSpec, text: &str) -> Result<GWord, DslError> {
    atoms_to_gword(spec, &parse_word_atoms(text)?)
}

pub fn atoms_to_gword(spec: &CommProdSpec, atoms: &[WordAtom]) -> Result<GWord, DslError> {
    let mut letters = Vec::new();
    for atom in atoms {
        let (tag, elt) = resolve_atom(spec, atom)?;
        letters.push(GLetter { tag, elt });
    }
    GWord::new(spec, letters).map_err(|e| DslError::Semantic { line: 1, msg: e.to_string() })
}

fn resolve_atom(spec: &CommProdSpec, atom: &WordAtom) -> Result<(FactorTag, BaseElement), DslError> {
    let err = |msg: String| DslError::Semantic { line: 1, msg };
    match (&atom.name, &atom.tuple) {
        (Some(n), None) => {
            for tag in [FactorTag::A, FactorTag::B] {
                if let BaseGroup::Free(f) = spec.factor(tag) {
                    if let Some(idx) = f.letter_index(n) {
                        return Ok((
                            tag,
                            BaseElement::Word(FreeWord::from_runs([(idx, atom.exp.clone())])),
                        ));
                    }
                }
            }
            Err(err(format!("`{n}` is not a letter of either factor")))
        }
        (Some(n), Some(t)) => {
            for tag in [FactorTag::A, FactorTag::B] {
                if spec.factor_name(tag) == n {
                    let BaseGroup::Abelian(g) = spec.factor(tag) else {
                        return Err(err(format!("`{n}` is not an abelian factor")));
                    };
                    if t.len() != g.dim() {
                        return Err(err(format!(
                            "tuple has {} coordinates, `{n}` has {}",
                            t.len(),
                            g.dim()
                        )));
                    }
                    let v = g.reduce(t.iter().map(|c| c * &atom.exp).collect());
                    return Ok((tag, BaseElement::Vector(v)));
                }
            }
            Err(err(format!("`{n}` names neither factor")))
        }
        (None, Some(_)) => Err(err("bare tuples need a factor name in product words".into())),
        (None, None) => Err(err("empty word atom".into())),
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) const G22_DOC: &str = "\
A = free(a)
H = subgroup(A; a^2)
B = free(b)
K = subgroup(B; b^2)
G = commprod(A, H, B, K)
pi = 2
max_order = 16
";

    #[test]
    fn parse_and_build_g22() {
        let doc = parse_spec(G22_DOC).unwrap();
        assert_eq!(doc.default_pi, Some(PiSet::single(2).unwrap()));
        assert_eq!(doc.default_max_order, Some(16));
        let resolved = build_product(&doc).unwrap();
        let w = parse_word(&resolved.spec, "a b^2 a^-1").unwrap();
        assert_eq!(w.letters().len(), 3);
        let nf = resolved.spec.normalize(&w);
        assert_eq!(resolved.spec.syllable_length(&nf), 1);
    }

    #[test]
    fn round_trip_serialization() {
        let doc = parse_spec(G22_DOC).unwrap();
        let text = serialize_spec(&doc);
        let doc2 = parse_spec(&text).unwrap();
        assert_eq!(doc.decls.len(), doc2.decls.len());
        for (a, b) in doc.decls.iter().zip(&doc2.decls) {
            assert_eq!(a.name, b.name);
            assert_eq!(a.expr, b.expr);
        }
        assert_eq!(doc.default_pi, doc2.default_pi);
        assert_eq!(doc.default_max_order, doc2.default_max_order);
        // a second round trip is literally identical text
        assert_eq!(text, serialize_spec(&doc2));
    }

    #[test]
    fn abelian_document() {
        let text = "\
A = abelian(1)
H = subgroup(A; (2))
B = abelian(1, torsion = [3])
K = subgroup(B; (1, 0))
G = commprod(A, H, B, K)
";
        let resolved = build_product(&parse_spec(text).unwrap()).unwrap();
        let w = parse_word(&resolved.spec, "A(1) B(0, 2)").unwrap();
        assert_eq!(w.letters().len(), 2);
        // torsion coordinates reduce
        let w2 = parse_word(&resolved.spec, "B(0, 5)").unwrap();
        assert_eq!(w.letters()[1], w2.letters()[0]);
    }

    #[test]
    fn syntax_error_has_position() {
        let err = parse_spec("A = free(").unwrap_err();
        match err {
            DslError::Syntax { line, col, .. } => {
                assert_eq!(line, 1);
                assert!(col >= 9);
            }
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn semantic_errors() {
        // misspelled name
        let text = "\
A = free(a)
H = subgroup(A; a^2)
B = free(b)
K = subgroup(Bb; b^2)
G = commprod(A, H, B, K)
";
        let doc = parse_spec(text).unwrap();
        assert!(matches!(build_product(&doc), Err(DslError::Semantic { .. })));
        // two-generator subgroup of a free factor is out of scope
        let text = "\
A = free(x, y)
H = subgroup(A; x, y)
B = free(b)
K = subgroup(B; b)
G = commprod(A, H, B, K)
";
        let doc = parse_spec(text).unwrap();
        let err = build_product(&doc).unwrap_err();
        assert!(matches!(err, DslError::Semantic { .. }));
        assert!(err.to_string().contains("cyclic"));
    }

    #[test]
    fn word_round_trip_through_normalize() {
        let resolved = build_product(&parse_spec(G22_DOC).unwrap()).unwrap();
        let spec = &resolved.spec;
        for text in ["a b", "a^3", "b^2 a^2", "a b a^-1 b^-1", "1"] {
            let nf = spec.normalize(&parse_word(spec, text).unwrap());
            let serialized = spec.format_nf(&nf);
            let nf2 = spec.normalize(&parse_word(spec, &serialized).unwrap());
            assert_eq!(nf, nf2, "round trip failed for `{text}` via `{serialized}`");
        }
    }
}
