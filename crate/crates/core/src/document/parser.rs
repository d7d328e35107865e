use num_bigint::BigInt;
use num_traits::Zero;

use super::lexer::{tokenize, LineMap, Spanned, Tok};
use super::{DiffeoDecl, DocOptions, Expectation, GermDocument, UnfoldingDecl};
use crate::algebra::{default_names, Polynomial, Rational};
use crate::error::{Error, Result};
use crate::germs::{Branch, MultiGerm, VectorFieldGerm};

/// A parenthesised tuple whose polynomials are parsed once the variable names are known.
#[derive(Clone, Copy)]
struct Deferred {
    start: usize,
    end: usize,
}

struct RawBranch {
    label: String,
    vars: Vec<String>,
    comps: Vec<Polynomial>,
    at: usize,
}

#[derive(Default)]
struct RawUnfolding {
    target: Option<Vec<String>>,
    parameter: Option<(String, String, usize)>,
    branches: Vec<RawBranch>,
    lift: Vec<Deferred>,
    at: usize,
}

#[derive(Default)]
struct RawDiffeo {
    forward: Option<Deferred>,
    inverse: Option<Deferred>,
    cert: Option<u32>,
    references: Vec<Deferred>,
    at: usize,
}

struct Parser<'a> {
    toks: Vec<Spanned>,
    pos: usize,
    map: LineMap<'a>,
    eof: usize,
}

type PResult<T> = std::result::Result<T, Error>;

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|t| t.start).unwrap_or(self.eof)
    }

    fn err<T>(&self, msg: impl Into<String>) -> PResult<T> {
        Err(self.map.error(self.offset(), msg))
    }

    fn unexpected<T>(&self, wanted: &str) -> PResult<T> {
        match self.peek() {
            Some(t) => self.err(format!("expected {wanted}, found {}", t.describe())),
            None => self.err(format!("expected {wanted}, found end of input")),
        }
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.tok.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, tok: Tok) -> PResult<()> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            self.unexpected(&tok.describe())
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.unexpected("identifier"),
        }
    }

    fn uint(&mut self) -> PResult<u32> {
        match self.peek() {
            Some(Tok::Int(s)) => {
                let v = s.parse::<u32>().map_err(|_| self.map.error(self.offset(), "integer out of range"))?;
                self.pos += 1;
                Ok(v)
            }
            _ => self.unexpected("non-negative integer"),
        }
    }

    /// Identifiers and integers joined by `-` with no whitespace: `cusp-pair`, `s67-k1`.
    fn name(&mut self) -> PResult<String> {
        let mut out = self.ident()?;
        loop {
            if let Some(t) = self.toks.get(self.pos) {
                if let (Tok::Ident(s) | Tok::Int(s), true) = (&t.tok, t.start == self.toks[self.pos - 1].end) {
                    out.push_str(s);
                    self.pos += 1;
                    continue;
                }
            }
            let (Some(dash), Some(word)) = (self.toks.get(self.pos), self.toks.get(self.pos + 1)) else { break };
            let prev_end = self.toks[self.pos - 1].end;
            if dash.tok != Tok::Minus || dash.start != prev_end || word.start != dash.end {
                break;
            }
            match &word.tok {
                Tok::Ident(s) | Tok::Int(s) => {
                    out.push('-');
                    out.push_str(s);
                    self.pos += 2;
                }
                _ => break,
            }
        }
        Ok(out)
    }

    fn ident_list(&mut self) -> PResult<Vec<String>> {
        self.expect(Tok::LParen)?;
        let mut out = vec![self.ident()?];
        while self.peek() == Some(&Tok::Comma) {
            self.pos += 1;
            out.push(self.ident()?);
        }
        self.expect(Tok::RParen)?;
        let mut seen = std::collections::HashSet::new();
        if let Some(d) = out.iter().find(|v| !seen.insert(v.as_str())) {
            return self.err(format!("variable `{d}` declared twice"));
        }
        Ok(out)
    }

    /// Skips a balanced `( ... )` and records its token range.
    fn deferred_tuple(&mut self) -> PResult<Deferred> {
        if self.peek() != Some(&Tok::LParen) {
            return self.unexpected("`(`");
        }
        let start = self.pos;
        let mut depth = 0usize;
        loop {
            match self.next() {
                Some(Tok::LParen) => depth += 1,
                Some(Tok::RParen) => {
                    depth -= 1;
                    if depth == 0 {
                        break;
                    }
                }
                Some(_) => {}
                None => {
                    self.pos -= 1;
                    return self.err("unbalanced parentheses");
                }
            }
        }
        Ok(Deferred { start, end: self.pos })
    }

    fn tuple(&mut self, d: Deferred, names: &[String]) -> PResult<Vec<Polynomial>> {
        let saved = self.pos;
        self.pos = d.start;
        self.expect(Tok::LParen)?;
        let mut out = vec![self.poly(names)?];
        while self.peek() == Some(&Tok::Comma) {
            self.pos += 1;
            out.push(self.poly(names)?);
        }
        self.expect(Tok::RParen)?;
        debug_assert_eq!(self.pos, d.end);
        self.pos = saved;
        Ok(out)
    }

    fn poly(&mut self, names: &[String]) -> PResult<Polynomial> {
        let mut acc = self.term(names)?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    acc = &acc + &self.term(names)?;
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    acc = &acc - &self.term(names)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self, names: &[String]) -> PResult<Polynomial> {
        let mut acc = self.unary(names)?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    acc = &acc * &self.unary(names)?;
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    let at = self.offset();
                    let d = self.unary(names)?;
                    if d.degree() != Some(0) {
                        return Err(self.map.error(at, "division is only allowed by a nonzero constant"));
                    }
                    acc = acc.scale(&(Rational::from_integer(1.into()) / d.constant_term()));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self, names: &[String]) -> PResult<Polynomial> {
        if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            let p = self.unary(names)?;
            return Ok(p.scale(&Rational::from_integer((-1).into())));
        }
        if self.peek() == Some(&Tok::Plus) {
            self.pos += 1;
            return self.unary(names);
        }
        self.power(names)
    }

    fn power(&mut self, names: &[String]) -> PResult<Polynomial> {
        let base = self.atom(names)?;
        if self.peek() == Some(&Tok::Caret) {
            self.pos += 1;
            let e = self.uint()?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn atom(&mut self, names: &[String]) -> PResult<Polynomial> {
        let n = names.len();
        match self.peek().cloned() {
            Some(Tok::Int(s)) => {
                self.pos += 1;
                let v: BigInt = s.parse().expect("lexer guarantees digits");
                Ok(Polynomial::constant(n, Rational::from_integer(v)))
            }
            Some(Tok::Ident(s)) => match names.iter().position(|v| *v == s) {
                Some(i) => {
                    self.pos += 1;
                    Ok(Polynomial::var(n, i))
                }
                None => self.err(format!("unknown variable `{s}` (in scope: {})", names.join(", "))),
            },
            Some(Tok::LParen) => {
                self.pos += 1;
                let p = self.poly(names)?;
                self.expect(Tok::RParen)?;
                Ok(p)
            }
            _ => self.unexpected("polynomial"),
        }
    }

    fn branch(&mut self) -> PResult<RawBranch> {
        let at = self.offset();
        let label = self.name()?;
        let vars = self.ident_list()?;
        self.expect(Tok::Eq)?;
        let d = self.deferred_tuple()?;
        let comps = self.tuple(d, &vars)?;
        self.expect(Tok::Semi)?;
        Ok(RawBranch { label, vars, comps, at })
    }

    fn expectation(&mut self) -> PResult<Expectation> {
        let neg = self.peek() == Some(&Tok::Minus);
        if neg {
            self.pos += 1;
        }
        match self.next() {
            Some(Tok::Int(s)) => {
                let v: i64 = s.parse().map_err(|_| self.map.error(self.offset(), "integer out of range"))?;
                Ok(Expectation::Int(if neg { -v } else { v }))
            }
            Some(Tok::Ident(s)) if s == "inf" => Ok(if neg { Expectation::NegInf } else { Expectation::PosInf }),
            Some(Tok::Ident(s)) if !neg && s == "true" => Ok(Expectation::Bool(true)),
            Some(Tok::Ident(s)) if !neg && s == "false" => Ok(Expectation::Bool(false)),
            _ => {
                self.pos -= 1;
                self.unexpected("integer, `inf`, `-inf`, `true` or `false`")
            }
        }
    }

    fn unfolding(&mut self) -> PResult<RawUnfolding> {
        let mut u = RawUnfolding { at: self.offset(), ..Default::default() };
        self.expect(Tok::LBrace)?;
        while self.peek() != Some(&Tok::RBrace) {
            let kw = self.ident()?;
            match kw.as_str() {
                "target" => {
                    u.target = Some(self.ident_list()?);
                    self.expect(Tok::Semi)?;
                }
                "parameter" => {
                    let at = self.offset();
                    let t = self.ident()?;
                    self.expect(Tok::Eq)?;
                    let s = self.ident()?;
                    self.expect(Tok::Semi)?;
                    u.parameter = Some((t, s, at));
                }
                "branch" => u.branches.push(self.branch()?),
                "lift" => {
                    u.lift.push(self.deferred_tuple()?);
                    self.expect(Tok::Semi)?;
                }
                other => {
                    self.pos -= 1;
                    return self.err(format!("unknown unfolding statement `{other}`"));
                }
            }
        }
        self.expect(Tok::RBrace)?;
        Ok(u)
    }

    fn diffeo(&mut self) -> PResult<RawDiffeo> {
        let mut d = RawDiffeo { at: self.offset(), ..Default::default() };
        self.expect(Tok::LBrace)?;
        while self.peek() != Some(&Tok::RBrace) {
            let kw = self.ident()?;
            match kw.as_str() {
                "H" | "H_inv" => {
                    self.expect(Tok::Eq)?;
                    let t = self.deferred_tuple()?;
                    if kw == "H" { d.forward = Some(t) } else { d.inverse = Some(t) }
                }
                "cert" => {
                    self.expect(Tok::Eq)?;
                    d.cert = Some(self.uint()?);
                }
                "reference" => d.references.push(self.deferred_tuple()?),
                other => {
                    self.pos -= 1;
                    return self.err(format!("unknown diffeo statement `{other}`"));
                }
            }
            self.expect(Tok::Semi)?;
        }
        self.expect(Tok::RBrace)?;
        Ok(d)
    }

    fn options(&mut self, o: &mut DocOptions) -> PResult<()> {
        self.expect(Tok::LBrace)?;
        while self.peek() != Some(&Tok::RBrace) {
            let at = self.offset();
            let key = self.ident()?;
            self.expect(Tok::Eq)?;
            let v = self.uint()?;
            self.expect(Tok::Semi)?;
            let slot = match key.as_str() {
                "max_i" => &mut o.max_i,
                "max_degree" => &mut o.max_degree,
                "cert_order" => &mut o.cert_order,
                "multiplicity_cap" => &mut o.multiplicity_cap,
                "unfold_degree" => &mut o.unfold_degree,
                _ => return Err(self.map.error(at, format!("unknown option `{key}`"))),
            };
            *slot = Some(v);
        }
        self.expect(Tok::RBrace)
    }
}

fn field(comps: Vec<Polynomial>, names: &[String], what: &str) -> Result<VectorFieldGerm> {
    if comps.len() != names.len() {
        return Err(Error::Semantic(format!("{what}: {} components, expected {}", comps.len(), names.len())));
    }
    VectorFieldGerm::new(comps)
}

fn build_branches(raw: Vec<RawBranch>, n: usize, p: usize, map: &LineMap<'_>) -> Result<Vec<Branch>> {
    raw.into_iter()
        .map(|b| {
            let (line, _) = map.locate(b.at);
            let ctx = |m: String| Error::Semantic(format!("line {line}: branch {}: {m}", b.label));
            if b.vars.len() != n {
                return Err(ctx(format!("{} source variables, expected n = {n}", b.vars.len())));
            }
            if b.comps.len() != p {
                return Err(ctx(format!("{} components, expected p = {p}", b.comps.len())));
            }
            if let Some(q) = b.comps.iter().position(|c| !c.constant_term().is_zero()) {
                return Err(ctx(format!("component {} has a nonzero constant term", q + 1)));
            }
            Branch::new(b.label.clone(), b.vars, b.comps)
        })
        .collect()
}

pub fn parse(text: &str) -> Result<GermDocument> {
    let toks = tokenize(text)?;
    let mut ps = Parser { toks, pos: 0, map: LineMap::new(text), eof: text.len() };
    match ps.peek() {
        Some(Tok::Ident(s)) if s == "germ" => ps.pos += 1,
        _ => return ps.unexpected("`germ`"),
    }
    let name = ps.name()?;
    ps.expect(Tok::LBrace)?;
    let (mut n, mut p, mut title, mut target) = (None, None, None, None);
    let mut branches = Vec::new();
    let mut references = Vec::new();
    let mut expect = Vec::new();
    let mut unfolding = None;
    let mut diffeo = None;
    let mut options = DocOptions::default();
    while ps.peek() != Some(&Tok::RBrace) {
        if ps.peek().is_none() {
            return ps.unexpected("`}`");
        }
        let at = ps.offset();
        let kw = ps.ident()?;
        match kw.as_str() {
            "n" | "p" => {
                ps.expect(Tok::Eq)?;
                let v = ps.uint()? as usize;
                ps.expect(Tok::Semi)?;
                let slot = if kw == "n" { &mut n } else { &mut p };
                if slot.replace(v).is_some() {
                    return Err(ps.map.error(at, format!("`{kw}` declared twice")));
                }
            }
            "title" => {
                match ps.next() {
                    Some(Tok::Str(s)) => title = Some(s),
                    _ => {
                        ps.pos -= 1;
                        return ps.unexpected("string");
                    }
                }
                ps.expect(Tok::Semi)?;
            }
            "target" => {
                target = Some(ps.ident_list()?);
                ps.expect(Tok::Semi)?;
            }
            "branch" => branches.push(ps.branch()?),
            "reference" => {
                references.push(ps.deferred_tuple()?);
                ps.expect(Tok::Semi)?;
            }
            "expect" => {
                let key = ps.ident()?;
                ps.expect(Tok::Eq)?;
                let v = ps.expectation()?;
                ps.expect(Tok::Semi)?;
                expect.push((key, v));
            }
            "unfolding" if unfolding.is_none() => unfolding = Some(ps.unfolding()?),
            "diffeo" if diffeo.is_none() => diffeo = Some(ps.diffeo()?),
            "options" => ps.options(&mut options)?,
            "unfolding" | "diffeo" => return Err(ps.map.error(at, format!("second `{kw}` block"))),
            other => return Err(ps.map.error(at, format!("unknown statement `{other}`"))),
        }
    }
    ps.expect(Tok::RBrace)?;
    if ps.peek().is_some() {
        return ps.unexpected("end of input");
    }

    let n = n.ok_or_else(|| Error::Semantic("missing `n = ...;`".into()))?;
    let p = p.ok_or_else(|| Error::Semantic("missing `p = ...;`".into()))?;
    if branches.is_empty() {
        return Err(Error::Semantic("no branches".into()));
    }
    let target = target.unwrap_or_else(|| default_names("X", p));
    if target.len() != p {
        return Err(Error::Semantic(format!("target declares {} variables, expected p = {p}", target.len())));
    }
    let labels: Vec<String> = branches.iter().map(|b| b.label.clone()).collect();
    let germ = MultiGerm::new(target.clone(), build_branches(branches, n, p, &ps.map)?).map_err(|e| Error::Semantic(e.to_string()))?;
    let references = references
        .into_iter()
        .enumerate()
        .map(|(k, d)| field(ps.tuple(d, &target)?, &target, &format!("reference {}", k + 1)))
        .collect::<Result<Vec<_>>>()?;

    let unfolding = match unfolding {
        None => None,
        Some(u) => {
            let (line, _) = ps.map.locate(u.at);
            let ctx = |m: String| Error::Semantic(format!("line {line}: unfolding: {m}"));
            let ut = u.target.ok_or_else(|| ctx("missing `target (...)`".into()))?;
            if ut.len() != p + 1 {
                return Err(ctx(format!("target declares {} variables, expected {}", ut.len(), p + 1)));
            }
            let (pt, psrc, _) = u.parameter.ok_or_else(|| ctx("missing `parameter T = s;`".into()))?;
            if !ut.contains(&pt) {
                return Err(ctx(format!("parameter `{pt}` is not a target variable")));
            }
            let ulabels: Vec<String> = u.branches.iter().map(|b| b.label.clone()).collect();
            if ulabels != labels {
                return Err(ctx("branch labels must match the germ's, in order".into()));
            }
            for b in &u.branches {
                if !b.vars.contains(&psrc) {
                    return Err(ctx(format!("branch {} does not declare the parameter `{psrc}`", b.label)));
                }
            }
            let positions: Vec<usize> = u.branches.iter().map(|b| b.vars.iter().position(|v| *v == psrc).unwrap_or(0)).collect();
            if positions.windows(2).any(|w| w[0] != w[1]) {
                return Err(ctx(format!("parameter `{psrc}` must sit at the same position in every branch")));
            }
            let ugerm = MultiGerm::new(ut.clone(), build_branches(u.branches, n + 1, p + 1, &ps.map)?).map_err(|e| ctx(e.to_string()))?;
            let lift = u
                .lift
                .into_iter()
                .enumerate()
                .map(|(k, d)| field(ps.tuple(d, &ut)?, &ut, &format!("unfolding lift {}", k + 1)))
                .collect::<Result<Vec<_>>>()?;
            Some(UnfoldingDecl { germ: ugerm, parameter_target: pt, parameter_source: psrc, lift })
        }
    };

    let diffeo = match diffeo {
        None => None,
        Some(d) => {
            let (line, _) = ps.map.locate(d.at);
            let ctx = |m: &str| Error::Semantic(format!("line {line}: diffeo: {m}"));
            let forward = ps.tuple(d.forward.ok_or_else(|| ctx("missing `H = (...)`"))?, &target)?;
            let inverse = ps.tuple(d.inverse.ok_or_else(|| ctx("missing `H_inv = (...)`"))?, &target)?;
            if forward.len() != p || inverse.len() != p {
                return Err(ctx("H and H_inv need p components"));
            }
            let references = d
                .references
                .into_iter()
                .enumerate()
                .map(|(k, r)| field(ps.tuple(r, &target)?, &target, &format!("diffeo reference {}", k + 1)))
                .collect::<Result<Vec<_>>>()?;
            Some(DiffeoDecl { forward, inverse, cert: d.cert, references })
        }
    };

    Ok(GermDocument { name, title, germ, references, expect, unfolding, diffeo, options })
}

/// A list of field tuples in the target variables, separated by optional `;`.
pub fn parse_fields(text: &str, names: &[String]) -> Result<Vec<VectorFieldGerm>> {
    let toks = tokenize(text)?;
    let mut ps = Parser { toks, pos: 0, map: LineMap::new(text), eof: text.len() };
    let mut out = Vec::new();
    while ps.peek().is_some() {
        let d = ps.deferred_tuple()?;
        out.push(field(ps.tuple(d, names)?, names, &format!("field {}", out.len() + 1))?);
        if ps.peek() == Some(&Tok::Semi) {
            ps.pos += 1;
        }
    }
    if out.is_empty() {
        return Err(Error::Semantic("no fields given".into()));
    }
    Ok(out)
}
