//! Flat sectioned key/value config with expression strings in the prefix
//! grammar. Every ingested invariant is validated here, before any
//! computation starts; errors carry the offending line.
//!
//! ```text
//! [family]
//! preset = grushin(1, 1, 1)      # or: dim = 2 plus repeated `field = (vec ...)`
//! [dilation]
//! sigma = 1 2                    # optional when the family preset fixes it
//! [functional]
//! preset = dirichlet-k-laplacian(k=2, s=4)   # or: expr = (...)
//! [function]
//! u = (+ (^ x1 2) x2)
//! [domain]
//! preset = disk(0, 0, 1)
//! [quadrature]
//! level = 3
//! tolerance = 1e-6
//! [checks]
//! check = h1                     # h2, star-shaped, poho1, poho-pde, poho2,
//! check = poho1                  # boundary-id2, audit1, audit2
//! ```
//!
//! Optional sections `[poho-pde]` (`a`, `dirichlet`), `[star-shaped]`
//! (`samples`) and `[audit]` (`z-max`, `p-max`, `r-max`, `points-per-axis`,
//! `a0`, `boundary-samples`, `interior-samples`) tune individual checks.

use std::fmt;

use hk_core::calculus::{Functional1, Functional2};
use hk_core::expr::{parse_expr, parse_vector, Expr, Var};
use hk_core::fields::{DilationFamily, VectorField};
use hk_core::geometry::Domain;
use hk_core::identities::AuditSampler;

use crate::presets;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub line: usize,
    pub key: Option<String>,
    pub msg: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.key {
            Some(k) => write!(
                f,
                "config error at line {} (key `{k}`): {}",
                self.line, self.msg
            ),
            None => write!(f, "config error at line {}: {}", self.line, self.msg),
        }
    }
}

impl std::error::Error for ConfigError {}

fn err<T>(line: usize, key: Option<&str>, msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError {
        line,
        key: key.map(str::to_string),
        msg: msg.into(),
    })
}

#[derive(Debug, Clone)]
struct Entry {
    key: String,
    value: String,
    line: usize,
}

#[derive(Debug, Clone)]
struct Section {
    name: String,
    line: usize,
    entries: Vec<Entry>,
}

/// Line-oriented raw parse: sections, `key = value` pairs, `#` comments.
fn parse_raw(src: &str) -> Result<Vec<Section>, ConfigError> {
    if src.len() > 1 << 20 {
        return err(0, None, "config too large");
    }
    let mut sections: Vec<Section> = Vec::new();
    for (idx, raw_line) in src.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw_line.split_once('#') {
            Some((before, _)) => before.trim(),
            None => raw_line.trim(),
        };
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let Some(name) = name.strip_suffix(']') else {
                return err(line_no, None, "malformed section header");
            };
            let name = name.trim().to_string();
            if name.is_empty() {
                return err(line_no, None, "empty section name");
            }
            if sections.iter().any(|s| s.name == name) {
                return err(line_no, None, format!("duplicate section [{name}]"));
            }
            sections.push(Section {
                name,
                line: line_no,
                entries: Vec::new(),
            });
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return err(line_no, None, "expected `key = value` or `[section]`");
        };
        let Some(section) = sections.last_mut() else {
            return err(line_no, None, "key outside any section");
        };
        section.entries.push(Entry {
            key: key.trim().to_string(),
            value: value.trim().to_string(),
            line: line_no,
        });
    }
    Ok(sections)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckKind {
    H1,
    H2,
    StarShaped,
    Poho1,
    PohoPde,
    Poho2,
    BoundaryId2,
    Audit1,
    Audit2,
}

impl CheckKind {
    pub fn name(&self) -> &'static str {
        match self {
            CheckKind::H1 => "h1",
            CheckKind::H2 => "h2",
            CheckKind::StarShaped => "star-shaped",
            CheckKind::Poho1 => "poho1",
            CheckKind::PohoPde => "poho-pde",
            CheckKind::Poho2 => "poho2",
            CheckKind::BoundaryId2 => "boundary-id2",
            CheckKind::Audit1 => "audit1",
            CheckKind::Audit2 => "audit2",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "h1" => CheckKind::H1,
            "h2" => CheckKind::H2,
            "star-shaped" => CheckKind::StarShaped,
            "poho1" => CheckKind::Poho1,
            "poho-pde" => CheckKind::PohoPde,
            "poho2" => CheckKind::Poho2,
            "boundary-id2" => CheckKind::BoundaryId2,
            "audit1" => CheckKind::Audit1,
            "audit2" => CheckKind::Audit2,
            _ => return None,
        })
    }

    pub const ALL: [CheckKind; 9] = [
        CheckKind::H1,
        CheckKind::H2,
        CheckKind::StarShaped,
        CheckKind::Poho1,
        CheckKind::PohoPde,
        CheckKind::Poho2,
        CheckKind::BoundaryId2,
        CheckKind::Audit1,
        CheckKind::Audit2,
    ];
}

#[derive(Debug)]
pub enum FunctionalSpec {
    None,
    Order1(Functional1),
    Order2(Functional2),
}

/// Fully validated run description: every object is constructed (and its
/// invariants checked) before any check executes.
pub struct RunConfig {
    pub family: Vec<VectorField>,
    pub dilation: DilationFamily,
    pub functional: FunctionalSpec,
    pub u: Option<Expr>,
    pub domain: Option<Domain>,
    pub level: u32,
    pub tolerance: f64,
    pub checks: Vec<CheckKind>,
    pub pde_a: Vec<f64>,
    pub pde_dirichlet: bool,
    pub star_samples: usize,
    pub sampler: AuditSampler,
}

struct SectionView<'a> {
    section: Option<&'a Section>,
    allowed: &'static [&'static str],
}

impl<'a> SectionView<'a> {
    fn check_keys(&self) -> Result<(), ConfigError> {
        if let Some(s) = self.section {
            for e in &s.entries {
                if !self.allowed.contains(&e.key.as_str()) {
                    return err(e.line, Some(&e.key), format!("unknown key in [{}]", s.name));
                }
            }
        }
        Ok(())
    }

    fn one(&self, key: &str) -> Result<Option<&'a Entry>, ConfigError> {
        let Some(s) = self.section else {
            return Ok(None);
        };
        let hits: Vec<&Entry> = s.entries.iter().filter(|e| e.key == key).collect();
        match hits.len() {
            0 => Ok(None),
            1 => Ok(Some(hits[0])),
            _ => err(hits[1].line, Some(key), "key given more than once"),
        }
    }

    fn many(&self, key: &str) -> Vec<&'a Entry> {
        match self.section {
            None => Vec::new(),
            Some(s) => s.entries.iter().filter(|e| e.key == key).collect(),
        }
    }
}

fn parse_list_f64(e: &Entry) -> Result<Vec<f64>, ConfigError> {
    e.value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            presets::parse_f64(s).map_err(|msg| ConfigError {
                line: e.line,
                key: Some(e.key.clone()),
                msg,
            })
        })
        .collect()
}

fn parse_scalar<T: std::str::FromStr>(e: &Entry, what: &str) -> Result<T, ConfigError> {
    e.value.trim().parse().map_err(|_| ConfigError {
        line: e.line,
        key: Some(e.key.clone()),
        msg: format!("expected {what}, got `{}`", e.value),
    })
}

impl RunConfig {
    pub fn parse(src: &str) -> Result<RunConfig, ConfigError> {
        let sections = parse_raw(src)?;
        const KNOWN: [(&str, &[&str]); 9] = [
            ("family", &["preset", "dim", "field"]),
            ("dilation", &["sigma"]),
            ("functional", &["preset", "expr", "order"]),
            ("function", &["u"]),
            ("domain", &["preset"]),
            ("quadrature", &["level", "tolerance"]),
            ("checks", &["check"]),
            ("poho-pde", &["a", "dirichlet"]),
            ("star-shaped", &["samples"]),
        ];
        // [audit] handled with the same machinery below.
        let audit_keys: &[&str] = &[
            "z-max",
            "p-max",
            "r-max",
            "points-per-axis",
            "a0",
            "boundary-samples",
            "interior-samples",
        ];
        for s in &sections {
            let known = KNOWN.iter().any(|(n, _)| *n == s.name) || s.name == "audit";
            if !known {
                return err(s.line, None, format!("unknown section [{}]", s.name));
            }
        }
        let view = |name: &str| -> SectionView<'_> {
            let allowed = if name == "audit" {
                audit_keys
            } else {
                KNOWN
                    .iter()
                    .find(|(n, _)| *n == name)
                    .map(|(_, k)| *k)
                    .unwrap_or(&[])
            };
            SectionView {
                section: sections.iter().find(|s| s.name == name),
                allowed,
            }
        };
        for name in [
            "family",
            "dilation",
            "functional",
            "function",
            "domain",
            "quadrature",
            "checks",
            "poho-pde",
            "star-shaped",
            "audit",
        ] {
            view(name).check_keys()?;
        }

        // Family: preset or explicit coefficient lists.
        let fam_view = view("family");
        let fam_section_line = fam_view.section.map(|s| s.line).unwrap_or(0);
        let preset_entry = fam_view.one("preset")?;
        let dim_entry = fam_view.one("dim")?;
        let field_entries = fam_view.many("field");
        let (family, preset_dilation) = match (preset_entry, dim_entry) {
            (Some(p), None) => {
                if !field_entries.is_empty() {
                    return err(
                        field_entries[0].line,
                        Some("field"),
                        "give either preset or explicit fields, not both",
                    );
                }
                let (f, d) = presets::family_preset(&p.value).map_err(|msg| ConfigError {
                    line: p.line,
                    key: Some("preset".into()),
                    msg,
                })?;
                (f, Some(d))
            }
            (None, Some(dim_e)) => {
                let dim: usize = parse_scalar(dim_e, "a dimension")?;
                if !(1..=6).contains(&dim) {
                    return err(dim_e.line, Some("dim"), "dim must be in 1..=6");
                }
                if field_entries.is_empty() {
                    return err(
                        dim_e.line,
                        Some("field"),
                        "explicit family needs field lines",
                    );
                }
                let mut fields = Vec::new();
                for fe in &field_entries {
                    let coeffs = parse_vector(&fe.value).map_err(|e| ConfigError {
                        line: fe.line,
                        key: Some("field".into()),
                        msg: e.to_string(),
                    })?;
                    if coeffs.len() != dim {
                        return err(
                            fe.line,
                            Some("field"),
                            format!("field has {} components, dim is {dim}", coeffs.len()),
                        );
                    }
                    let vf = VectorField::new(coeffs).map_err(|e| ConfigError {
                        line: fe.line,
                        key: Some("field".into()),
                        msg: e.to_string(),
                    })?;
                    fields.push(vf);
                }
                (fields, None)
            }
            (Some(p), Some(_)) => {
                return err(
                    p.line,
                    Some("preset"),
                    "give either preset or dim/field, not both",
                )
            }
            (None, None) => {
                return err(
                    fam_section_line,
                    None,
                    "a [family] section with preset or dim/field is required",
                )
            }
        };

        // Dilation: required for explicit families; optional override for
        // presets (a deliberately mismatched sigma is a valid experiment —
        // the H1 check will fail at run time, not at parse time).
        let dil_view = view("dilation");
        let dilation = match dil_view.one("sigma")? {
            Some(e) => {
                let parts: Result<Vec<u32>, _> = e
                    .value
                    .split([' ', ','])
                    .filter(|s| !s.trim().is_empty())
                    .map(|s| s.trim().parse::<u32>())
                    .collect();
                let sigma = parts.map_err(|_| ConfigError {
                    line: e.line,
                    key: Some("sigma".into()),
                    msg: format!("sigma must be positive integers, got `{}`", e.value),
                })?;
                DilationFamily::new(sigma).map_err(|er| ConfigError {
                    line: e.line,
                    key: Some("sigma".into()),
                    msg: er.to_string(),
                })?
            }
            None => match preset_dilation {
                Some(d) => d,
                None => {
                    return err(
                        0,
                        Some("sigma"),
                        "explicit families require [dilation] sigma",
                    )
                }
            },
        };
        let n = dilation.n();
        if family.iter().any(|f| f.dim() != n) {
            return err(
                fam_section_line,
                None,
                format!("family dimension does not match sigma length {n}"),
            );
        }
        let m = family.len();

        // Functional.
        let fview = view("functional");
        let functional = match (fview.one("preset")?, fview.one("expr")?) {
            (Some(_), Some(e)) => {
                return err(e.line, Some("expr"), "give either preset or expr, not both")
            }
            (Some(p), None) => match presets::functional_preset(&p.value, n, m) {
                Ok(presets::FunctionalPreset::Order1(f)) => FunctionalSpec::Order1(f),
                Ok(presets::FunctionalPreset::Order2(f)) => FunctionalSpec::Order2(f),
                Err(msg) => return err(p.line, Some("preset"), msg),
            },
            (None, Some(e)) => {
                let expr = parse_expr(&e.value).map_err(|pe| ConfigError {
                    line: e.line,
                    key: Some("expr".into()),
                    msg: pe.to_string(),
                })?;
                let uses_r = expr.free_vars().iter().any(|v| matches!(v, Var::R(_, _)));
                let order = match fview.one("order")? {
                    None => {
                        if uses_r {
                            2
                        } else {
                            1
                        }
                    }
                    Some(oe) => {
                        let o: u32 = parse_scalar(oe, "1 or 2")?;
                        if o != 1 && o != 2 {
                            return err(oe.line, Some("order"), "order must be 1 or 2");
                        }
                        if o == 1 && uses_r {
                            return err(
                                oe.line,
                                Some("order"),
                                "expression uses r slots but order = 1",
                            );
                        }
                        o
                    }
                };
                if order == 1 {
                    FunctionalSpec::Order1(Functional1::new(n, m, expr).map_err(|ce| {
                        ConfigError {
                            line: e.line,
                            key: Some("expr".into()),
                            msg: ce.to_string(),
                        }
                    })?)
                } else {
                    FunctionalSpec::Order2(Functional2::new(n, m, expr).map_err(|ce| {
                        ConfigError {
                            line: e.line,
                            key: Some("expr".into()),
                            msg: ce.to_string(),
                        }
                    })?)
                }
            }
            (None, None) => FunctionalSpec::None,
        };

        // Function u.
        let uview = view("function");
        let u = match uview.one("u")? {
            None => None,
            Some(e) => {
                let expr = parse_expr(&e.value).map_err(|pe| ConfigError {
                    line: e.line,
                    key: Some("u".into()),
                    msg: pe.to_string(),
                })?;
                for v in expr.free_vars() {
                    match v {
                        Var::X(i) if (i as usize) <= n => {}
                        other => {
                            return err(
                                e.line,
                                Some("u"),
                                format!("u may only use x1..x{n}, found {}", other.name()),
                            )
                        }
                    }
                }
                Some(expr)
            }
        };

        // Domain.
        let dview = view("domain");
        let domain = match dview.one("preset")? {
            None => None,
            Some(e) => {
                let d = presets::domain_preset(&e.value).map_err(|msg| ConfigError {
                    line: e.line,
                    key: Some("preset".into()),
                    msg,
                })?;
                if d.dim() != n {
                    return err(
                        e.line,
                        Some("preset"),
                        format!("domain dimension {} does not match n = {n}", d.dim()),
                    );
                }
                Some(d)
            }
        };

        // Quadrature.
        let qview = view("quadrature");
        let level = match qview.one("level")? {
            None => 3,
            Some(e) => {
                let l: u32 = parse_scalar(e, "a level in 1..=8")?;
                if !(1..=8).contains(&l) {
                    return err(e.line, Some("level"), "level must be in 1..=8");
                }
                l
            }
        };
        let tolerance = match qview.one("tolerance")? {
            None => hk_core::identities::DEFAULT_IDENTITY_TOLERANCE,
            Some(e) => {
                let t: f64 = parse_scalar(e, "a positive tolerance")?;
                if !(t.is_finite() && t > 0.0) {
                    return err(e.line, Some("tolerance"), "tolerance must be positive");
                }
                t
            }
        };

        // Checks.
        let cview = view("checks");
        let mut checks = Vec::new();
        for e in cview.many("check") {
            let Some(kind) = CheckKind::parse(e.value.trim()) else {
                return err(
                    e.line,
                    Some("check"),
                    format!(
                        "unknown check `{}` (known: {})",
                        e.value,
                        CheckKind::ALL.map(|c| c.name()).join(", ")
                    ),
                );
            };
            checks.push((kind, e.line));
        }

        // poho-pde options.
        let pview = view("poho-pde");
        let pde_a = match pview.one("a")? {
            None => vec![0.0],
            Some(e) => parse_list_f64(e)?,
        };
        let pde_dirichlet = match pview.one("dirichlet")? {
            None => false,
            Some(e) => match e.value.trim() {
                "true" => true,
                "false" => false,
                other => {
                    return err(
                        e.line,
                        Some("dirichlet"),
                        format!("expected true/false, got `{other}`"),
                    )
                }
            },
        };

        // star-shaped options.
        let sview = view("star-shaped");
        let star_samples = match sview.one("samples")? {
            None => 2048,
            Some(e) => {
                let s: usize = parse_scalar(e, "a sample count")?;
                if !(16..=1_000_000).contains(&s) {
                    return err(e.line, Some("samples"), "samples must be in 16..=1000000");
                }
                s
            }
        };

        // audit options.
        let aview = view("audit");
        let mut sampler = AuditSampler::default();
        let positive = |e: &Entry| -> Result<f64, ConfigError> {
            let v: f64 = parse_scalar(e, "a positive number")?;
            if !(v.is_finite() && v > 0.0) {
                return err(e.line, Some(&e.key), "must be positive");
            }
            Ok(v)
        };
        if let Some(e) = aview.one("z-max")? {
            sampler.z_max = positive(e)?;
        }
        if let Some(e) = aview.one("p-max")? {
            sampler.p_max = positive(e)?;
        }
        if let Some(e) = aview.one("r-max")? {
            sampler.r_max = positive(e)?;
        }
        if let Some(e) = aview.one("points-per-axis")? {
            let v: usize = parse_scalar(e, "an odd count in 3..=65")?;
            if !(3..=65).contains(&v) {
                return err(e.line, Some("points-per-axis"), "must be in 3..=65");
            }
            sampler.points_per_axis = v;
        }
        if let Some(e) = aview.one("a0")? {
            sampler.a0_candidates = parse_list_f64(e)?;
        }
        if let Some(e) = aview.one("boundary-samples")? {
            sampler.boundary_samples = parse_scalar(e, "a count")?;
        }
        if let Some(e) = aview.one("interior-samples")? {
            sampler.interior_samples = parse_scalar(e, "a count")?;
        }

        // Cross-check check requirements now, so nothing fails mid-run.
        for (kind, line) in &checks {
            let need = |cond: bool, what: &str| -> Result<(), ConfigError> {
                if cond {
                    Ok(())
                } else {
                    err(
                        *line,
                        Some("check"),
                        format!("{} requires {what}", kind.name()),
                    )
                }
            };
            match kind {
                CheckKind::H1 | CheckKind::H2 => need(!family.is_empty(), "a family")?,
                CheckKind::StarShaped => need(domain.is_some(), "a domain")?,
                CheckKind::Poho1 | CheckKind::PohoPde => {
                    need(
                        matches!(functional, FunctionalSpec::Order1(_)),
                        "an order-1 functional",
                    )?;
                    need(u.is_some(), "a function u")?;
                    need(domain.is_some(), "a domain")?;
                }
                CheckKind::Poho2 => {
                    need(
                        matches!(functional, FunctionalSpec::Order2(_)),
                        "an order-2 functional",
                    )?;
                    need(u.is_some(), "a function u")?;
                    need(domain.is_some(), "a domain")?;
                }
                CheckKind::BoundaryId2 => {
                    need(u.is_some(), "a function u")?;
                    need(domain.is_some(), "a domain")?;
                }
                CheckKind::Audit1 => {
                    need(
                        matches!(functional, FunctionalSpec::Order1(_)),
                        "an order-1 functional",
                    )?;
                    need(domain.is_some(), "a domain")?;
                }
                CheckKind::Audit2 => {
                    need(
                        matches!(functional, FunctionalSpec::Order2(_)),
                        "an order-2 functional",
                    )?;
                    need(domain.is_some(), "a domain")?;
                }
            }
        }

        Ok(RunConfig {
            family,
            dilation,
            functional,
            u,
            domain,
            level,
            tolerance,
            checks: checks.into_iter().map(|(k, _)| k).collect(),
            pde_a,
            pde_dirichlet,
            star_samples,
            sampler,
        })
    }
}
