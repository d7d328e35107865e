//! The report every command produces, as JSON or as text.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use liftable_core::document::run::Route;
use liftable_core::germs::{GermInvariants, InvariantMode, MultiGerm};
use liftable_core::ks_maps::{GeneratorCount, KSLevel, KSReport, Stability};
use liftable_core::lift::{GeneratorSummary, LiftModule, ModuleComparison, Provenance};
use liftable_core::{Error, ErrorKind};
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct Tool {
    pub name: &'static str,
    pub version: &'static str,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConfigEcho {
    pub max_i: usize,
    pub max_degree: Option<u32>,
    pub cert_order: Option<u32>,
    pub mode: InvariantMode,
    pub route: Option<String>,
    pub level: Option<usize>,
    pub search_degree: Option<u32>,
    pub workdir: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct GermInfo {
    pub name: String,
    pub title: Option<String>,
    pub n: usize,
    pub p: usize,
    pub target: Vec<String>,
    pub branches: Vec<String>,
}

impl GermInfo {
    pub fn new(name: &str, title: Option<&str>, f: &MultiGerm) -> Self {
        GermInfo {
            name: name.to_string(),
            title: title.map(str::to_string),
            n: f.n(),
            p: f.p(),
            target: f.target_vars().to_vec(),
            branches: f
                .branches()
                .iter()
                .map(|b| {
                    let comps: Vec<String> = b.components().iter().map(|c| c.render(b.source_vars())).collect();
                    format!("{}({}) = ({})", b.label(), b.source_vars().join(", "), comps.join(", "))
                })
                .collect(),
        }
    }
}

/// Level data comes from elimination in the truncated models.
#[derive(Clone, Debug, Serialize)]
pub struct KsSection {
    pub mode: InvariantMode,
    pub levels: Vec<KSLevel>,
    pub i1: String,
    pub i2: String,
    pub balanced_level: Option<usize>,
}

impl From<&KSReport> for KsSection {
    fn from(r: &KSReport) -> Self {
        KsSection {
            mode: InvariantMode::Bruteforce,
            levels: r.levels.clone(),
            i1: r.i1.to_string(),
            i2: r.i2.to_string(),
            balanced_level: r.balanced_level(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct KernelSection {
    pub level: usize,
    pub dim: usize,
    pub mode: InvariantMode,
    /// Closed-form kernel dimension, available when the level is surjective and positive.
    pub formula: Option<i64>,
    pub basis: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LiftSection {
    pub route: Option<Route>,
    pub provenance: Provenance,
    pub generators: Vec<GeneratorSummary>,
    pub certification_order: u32,
    pub exact: bool,
    /// Nakayama count of the generators, by elimination in a jet space.
    pub count: usize,
    pub count_mode: InvariantMode,
    pub count_expected: Option<usize>,
    pub reverified: Vec<bool>,
    pub comparison: Option<ModuleComparison>,
}

impl LiftSection {
    pub fn new(route: Option<Route>, m: &LiftModule, names: &[String], count: usize, reverified: Vec<bool>, comparison: Option<ModuleComparison>) -> Self {
        let s = m.summary(names);
        LiftSection {
            route,
            provenance: s.provenance,
            generators: s.generators,
            certification_order: s.certification_order,
            exact: m.exact(),
            count,
            count_mode: InvariantMode::Bruteforce,
            count_expected: s.count_expected,
            reverified,
            comparison,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckedField {
    pub field: String,
    pub liftable: bool,
    pub obstruction: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckSection {
    pub cert: u32,
    pub fields: Vec<CheckedField>,
    pub comparison: Option<ModuleComparison>,
    pub nakayama_count: usize,
    pub count_mode: InvariantMode,
    pub expected_count: Option<usize>,
    pub ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct TransportSection {
    pub target: GermInfo,
    pub lift: LiftSection,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReductionSection {
    pub removed_variables: usize,
    /// Per branch, the coefficients of the removed squares.
    pub quadratic: Vec<Vec<String>>,
    pub core: GermInfo,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExpectationCheck {
    pub key: String,
    pub expected: String,
    pub computed: String,
    pub ok: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EntryStatus {
    /// Listed without running.
    Listed,
    Ok,
    /// Invariants computed; the construction hit a resource cap.
    CountOnly,
    Failed,
}

#[derive(Clone, Debug, Serialize)]
pub struct CatalogEntry {
    pub name: String,
    pub title: Option<String>,
    pub status: EntryStatus,
    pub min_gens: Option<usize>,
    pub route: Option<Route>,
    pub count: Option<usize>,
    pub expectations: Vec<ExpectationCheck>,
    pub error: Option<ErrorInfo>,
    pub seconds: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorClass {
    Hypothesis,
    ResourceCap,
    Input,
    Consistency,
}

impl ErrorClass {
    pub fn exit_code(self) -> u8 {
        match self {
            ErrorClass::Hypothesis => 1,
            ErrorClass::ResourceCap => 2,
            ErrorClass::Input => 3,
            ErrorClass::Consistency => 4,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ErrorInfo {
    pub kind: ErrorClass,
    pub message: String,
    pub exit_code: u8,
}

impl From<&Error> for ErrorInfo {
    fn from(e: &Error) -> Self {
        let kind = match e.kind() {
            ErrorKind::Hypothesis => ErrorClass::Hypothesis,
            ErrorKind::ResourceCap => ErrorClass::ResourceCap,
            ErrorKind::Input => ErrorClass::Input,
            ErrorKind::Internal => ErrorClass::Consistency,
        };
        ErrorInfo { kind, message: e.to_string(), exit_code: kind.exit_code() }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub tool: Tool,
    pub command: String,
    pub config: ConfigEcho,
    pub germ: Option<GermInfo>,
    pub invariants: Option<GermInvariants>,
    pub stability: Option<Stability>,
    pub ks: Option<KsSection>,
    pub min_generators: Option<GeneratorCount>,
    pub kernel: Option<KernelSection>,
    pub lift: Option<LiftSection>,
    pub check: Option<CheckSection>,
    pub transport: Option<TransportSection>,
    pub reduction: Option<ReductionSection>,
    /// The stable unfolding whose restriction gave the liftable fields.
    pub unfolding: Option<GermInfo>,
    /// Text of a catalog entry.
    pub document: Option<String>,
    pub catalog: Option<Vec<CatalogEntry>>,
    pub expectations: Vec<ExpectationCheck>,
    pub warnings: Vec<String>,
    /// Seconds per phase.
    pub timings: BTreeMap<String, f64>,
    pub error: Option<ErrorInfo>,
}

impl Report {
    pub fn new(command: &str, config: ConfigEcho) -> Self {
        Report {
            tool: Tool { name: "liftable", version: env!("CARGO_PKG_VERSION") },
            command: command.to_string(),
            config,
            germ: None,
            invariants: None,
            stability: None,
            ks: None,
            min_generators: None,
            kernel: None,
            lift: None,
            check: None,
            transport: None,
            reduction: None,
            unfolding: None,
            document: None,
            catalog: None,
            expectations: Vec::new(),
            warnings: Vec::new(),
            timings: BTreeMap::new(),
            error: None,
        }
    }

    pub fn exit_code(&self) -> u8 {
        self.error.as_ref().map_or(0, |e| e.exit_code)
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        if let Some(g) = &self.germ {
            let _ = write!(out, "germ {} (n = {}, p = {}, target {})", g.name, g.n, g.p, g.target.join(", "));
            if let Some(t) = &g.title {
                let _ = write!(out, ": {t}");
            }
            out.push('\n');
            for b in &g.branches {
                let _ = writeln!(out, "  branch {b}");
            }
        }
        if let Some(r) = &self.reduction {
            let _ = writeln!(out, "reduction: removed {} variables, core germ:", r.removed_variables);
            for b in &r.core.branches {
                let _ = writeln!(out, "  branch {b}");
            }
        }
        if let Some(inv) = &self.invariants {
            let _ = writeln!(out, "delta = {}, gamma = {}, corank = {}, branches = {}", inv.delta, inv.gamma, inv.corank, inv.branch_count);
            let levels: Vec<String> = inv.i_delta.iter().map(|(i, d)| format!("{i}:({d}, {})", inv.i_gamma[i])).collect();
            let _ = writeln!(out, "level (delta, gamma): {}", levels.join(" "));
        }
        if let Some(s) = &self.stability {
            let _ = writeln!(out, "stable = {}, isolated = {}", s.stable, s.isolated);
        }
        if let Some(ks) = &self.ks {
            let _ = writeln!(out, "i1 = {}, i2 = {}", ks.i1, ks.i2);
            for l in &ks.levels {
                let _ = writeln!(
                    out,
                    "  level {}: {} -> {}, rank {}, kernel {}, cokernel {}",
                    l.i, l.domain_dim, l.target_dim, l.rank, l.ker_dim, l.coker_dim
                );
            }
        }
        if let Some(c) = &self.min_generators {
            let _ = writeln!(out, "minimal generators = {} (level {}, formula {}, elimination {})", c.count, c.level, c.formula, c.bruteforce);
        }
        if let Some(k) = &self.kernel {
            let _ = write!(out, "kernel at level {}: dimension {}", k.level, k.dim);
            if let Some(f) = k.formula {
                let _ = write!(out, " (formula {f})");
            }
            out.push('\n');
            for b in &k.basis {
                let _ = writeln!(out, "  {b}");
            }
        }
        if let Some(l) = &self.lift {
            render_lift(&mut out, l);
        }
        if let Some(t) = &self.transport {
            let _ = writeln!(out, "transported germ:");
            for b in &t.target.branches {
                let _ = writeln!(out, "  branch {b}");
            }
            render_lift(&mut out, &t.lift);
        }
        if let Some(c) = &self.check {
            let _ = writeln!(out, "check at order {}: {}", c.cert, if c.ok { "ok" } else { "failed" });
            for f in &c.fields {
                match &f.obstruction {
                    None => {
                        let _ = writeln!(out, "  lifts  {}", f.field);
                    }
                    Some(o) => {
                        let _ = writeln!(out, "  fails  {}: {o}", f.field);
                    }
                }
            }
            let _ = write!(out, "nakayama count = {}", c.nakayama_count);
            if let Some(e) = c.expected_count {
                let _ = write!(out, " (expected {e})");
            }
            out.push('\n');
            if let Some(cmp) = &c.comparison {
                let _ = writeln!(out, "{}", comparison_line(cmp));
            }
        }
        if let Some(entries) = &self.catalog {
            for e in entries {
                let status = match e.status {
                    EntryStatus::Listed => "",
                    EntryStatus::Ok => "ok",
                    EntryStatus::CountOnly => "count-only",
                    EntryStatus::Failed => "FAILED",
                };
                let num = |v: Option<usize>| v.map_or("-".to_string(), |v| v.to_string());
                let mismatched: Vec<&str> = e.expectations.iter().filter(|x| !x.ok).map(|x| x.key.as_str()).collect();
                let _ = write!(out, "{:<14} {:<10} min_gens {:>2}  count {:>2}  {:>7.2}s", e.name, status, num(e.min_gens), num(e.count), e.seconds);
                if !mismatched.is_empty() {
                    let _ = write!(out, "  unexpected {}", mismatched.join(", "));
                }
                if let Some(err) = &e.error {
                    let _ = write!(out, "  {}", err.message);
                }
                out.push('\n');
            }
        }
        for x in &self.expectations {
            let _ = writeln!(out, "expect {} = {}: computed {} [{}]", x.key, x.expected, x.computed, if x.ok { "ok" } else { "MISMATCH" });
        }
        for w in &self.warnings {
            let _ = writeln!(out, "warning: {w}");
        }
        out
    }
}

fn comparison_line(cmp: &ModuleComparison) -> String {
    let mut s = format!("module equality with the references at order {}: {}", cmp.cert, if cmp.equal() { "equal" } else { "different" });
    if let Some(f) = &cmp.reference_not_in_candidate {
        let _ = write!(s, "; reference {} is missing ({})", f.index + 1, f.witness);
    }
    if let Some(f) = &cmp.candidate_not_in_reference {
        let _ = write!(s, "; generator {} is extra ({})", f.index + 1, f.witness);
    }
    s
}

fn render_lift(out: &mut String, l: &LiftSection) {
    let route = l.route.map(|r| format!("{r:?}")).unwrap_or_else(|| format!("{:?}", l.provenance));
    let _ = writeln!(
        out,
        "liftable fields ({route}, certified to order {}, {}):",
        l.certification_order,
        if l.exact { "exact" } else { "truncated" }
    );
    for (g, ok) in l.generators.iter().zip(&l.reverified) {
        let _ = writeln!(out, "  {}{}", g.field, if *ok { "" } else { "  [re-verification FAILED]" });
    }
    let _ = write!(out, "nakayama count = {}", l.count);
    if let Some(e) = l.count_expected {
        let _ = write!(out, " (expected {e})");
    }
    out.push('\n');
    if let Some(cmp) = &l.comparison {
        let _ = writeln!(out, "{}", comparison_line(cmp));
    }
}
