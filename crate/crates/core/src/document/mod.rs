//! The germ description language and the built-in catalog.
//!
//! ```text
//! germ cusp-pair {
//!   title "two transverse cusps";
//!   n = 1;
//!   p = 2;
//!   target (X, Y);
//!   branch a(x) = (x^2, x^3);
//!   branch b(x) = (x^3, x^2);
//!   reference (6*X*Y - 6*X^2*Y^2, 4*Y^2 + 5*X^3 - 9*X*Y^3);
//!   expect min_gens = 2;
//! }
//! ```
//!
//! Optional blocks: `unfolding { target (...); parameter T = s; branch ...; lift (...); }`,
//! `diffeo { H = (...); H_inv = (...); cert = k; reference (...); }` and
//! `options { max_i = 6; max_degree = 12; cert_order = 24; multiplicity_cap = 32; unfold_degree = 2; }`.
//! `#` starts a comment. Polynomials use `+ - * /` (division by constants only), `^` with
//! non-negative integer exponents, and parentheses.

pub mod catalog;
pub mod run;
mod lexer;
mod parser;

use std::fmt::Write as _;

use crate::algebra::Polynomial;
use crate::error::{Error, Result};
use crate::germs::{MultiGerm, UnfoldingMode, VectorFieldGerm};
use crate::lift::DiffeoPair;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expectation {
    Int(i64),
    NegInf,
    PosInf,
    Bool(bool),
}

impl std::fmt::Display for Expectation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Expectation::Int(v) => write!(f, "{v}"),
            Expectation::NegInf => write!(f, "-inf"),
            Expectation::PosInf => write!(f, "inf"),
            Expectation::Bool(b) => write!(f, "{b}"),
        }
    }
}

/// A one-parameter unfolding; the parameter sits at the same source position in every branch.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnfoldingDecl {
    pub germ: MultiGerm,
    pub parameter_target: String,
    pub parameter_source: String,
    /// Supplied generators of the unfolding's liftable fields, possibly empty.
    pub lift: Vec<VectorFieldGerm>,
}

impl UnfoldingDecl {
    pub fn parameter_index(&self) -> usize {
        self.germ.target_vars().iter().position(|v| *v == self.parameter_target).expect("validated at parse time")
    }

    pub fn source_parameter(&self) -> usize {
        self.germ.branches()[0].source_vars().iter().position(|v| *v == self.parameter_source).expect("validated at parse time")
    }

    pub fn mode(&self) -> UnfoldingMode {
        UnfoldingMode::User {
            unfolding: self.germ.clone(),
            parameter_index: self.parameter_index(),
            source_parameter: self.source_parameter(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiffeoDecl {
    pub forward: Vec<Polynomial>,
    pub inverse: Vec<Polynomial>,
    pub cert: Option<u32>,
    /// Expected transported generators.
    pub references: Vec<VectorFieldGerm>,
}

impl DiffeoDecl {
    pub fn pair(&self, default_cert: u32) -> Result<DiffeoPair> {
        DiffeoPair::new(self.forward.clone(), self.inverse.clone(), self.cert.unwrap_or(default_cert))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DocOptions {
    pub max_i: Option<u32>,
    pub max_degree: Option<u32>,
    pub cert_order: Option<u32>,
    pub multiplicity_cap: Option<u32>,
    pub unfold_degree: Option<u32>,
}

/// A parsed and validated germ document.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GermDocument {
    pub name: String,
    pub title: Option<String>,
    pub germ: MultiGerm,
    /// Expected generators of the liftable fields of `germ`.
    pub references: Vec<VectorFieldGerm>,
    pub expect: Vec<(String, Expectation)>,
    pub unfolding: Option<UnfoldingDecl>,
    pub diffeo: Option<DiffeoDecl>,
    pub options: DocOptions,
}

fn tuple(ps: &[Polynomial], names: &[String]) -> String {
    let parts: Vec<String> = ps.iter().map(|p| p.render(names)).collect();
    format!("({})", parts.join(", "))
}

fn write_branches(out: &mut String, indent: &str, g: &MultiGerm) {
    for b in g.branches() {
        let _ = writeln!(out, "{indent}branch {}({}) = {};", b.label(), b.source_vars().join(", "), tuple(b.components(), b.source_vars()));
    }
}

impl GermDocument {
    pub fn parse(text: &str) -> Result<Self> {
        parser::parse(text)
    }

    /// Field tuples such as `(X, 0); (Y^2, X)` in this document's target variables.
    pub fn parse_fields(&self, text: &str) -> Result<Vec<VectorFieldGerm>> {
        parser::parse_fields(text, self.target_vars())
    }

    pub fn expectation(&self, key: &str) -> Option<&Expectation> {
        self.expect.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    pub fn expected_int(&self, key: &str) -> Option<i64> {
        match self.expectation(key) {
            Some(Expectation::Int(v)) => Some(*v),
            _ => None,
        }
    }

    pub fn target_vars(&self) -> &[String] {
        self.germ.target_vars()
    }

    /// Canonical text; `parse(render(d)) == d`.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let t = self.germ.target_vars();
        let _ = writeln!(out, "germ {} {{", self.name);
        if let Some(title) = &self.title {
            let _ = writeln!(out, "  title \"{title}\";");
        }
        let _ = writeln!(out, "  n = {};\n  p = {};", self.germ.n(), self.germ.p());
        let _ = writeln!(out, "  target ({});", t.join(", "));
        write_branches(&mut out, "  ", &self.germ);
        for r in &self.references {
            let _ = writeln!(out, "  reference {};", r.render_tuple(t));
        }
        for (k, v) in &self.expect {
            let _ = writeln!(out, "  expect {k} = {v};");
        }
        if let Some(u) = &self.unfolding {
            let ut = u.germ.target_vars();
            let _ = writeln!(out, "  unfolding {{\n    target ({});", ut.join(", "));
            let _ = writeln!(out, "    parameter {} = {};", u.parameter_target, u.parameter_source);
            write_branches(&mut out, "    ", &u.germ);
            for l in &u.lift {
                let _ = writeln!(out, "    lift {};", l.render_tuple(ut));
            }
            out.push_str("  }\n");
        }
        if let Some(d) = &self.diffeo {
            let _ = writeln!(out, "  diffeo {{\n    H = {};\n    H_inv = {};", tuple(&d.forward, t), tuple(&d.inverse, t));
            if let Some(c) = d.cert {
                let _ = writeln!(out, "    cert = {c};");
            }
            for r in &d.references {
                let _ = writeln!(out, "    reference {};", r.render_tuple(t));
            }
            out.push_str("  }\n");
        }
        let o = &self.options;
        let opts: Vec<(&str, u32)> = [
            ("max_i", o.max_i),
            ("max_degree", o.max_degree),
            ("cert_order", o.cert_order),
            ("multiplicity_cap", o.multiplicity_cap),
            ("unfold_degree", o.unfold_degree),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.map(|v| (k, v)))
        .collect();
        if !opts.is_empty() {
            out.push_str("  options {\n");
            for (k, v) in opts {
                let _ = writeln!(out, "    {k} = {v};");
            }
            out.push_str("  }\n");
        }
        out.push_str("}\n");
        out
    }
}

impl std::str::FromStr for GermDocument {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}
