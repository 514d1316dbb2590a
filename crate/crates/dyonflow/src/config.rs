//! Sectioned key-value run configuration.
//!
//! The format is deliberately primitive — `[section]` headers, `key = value`
//! lines, `#` comments, bracketed comma lists — so fixtures stay readable
//! and diffable:
//!
//! ```text
//! [kahler]
//! family = flat
//! n_fields = 1
//!
//! [superpotential]
//! terms = [[0, 0.1, 0]]        # one term: exponents..., re, im
//! ```
//!
//! Polynomial-valued keys hold nested lists, one inner list per term with
//! the per-field exponents followed by the real and imaginary parts of the
//! coefficient. `serialize_config` writes every field back out explicitly
//! (defaults included), and `parse(serialize(c)) == c` exactly.

use std::collections::HashSet;
use std::path::Path;

use num_complex::Complex64;

use crate::background::Background;
use crate::error::{Error, Result};
use crate::flow::SolverConfig;
use crate::kahler::{GrowthBounds, KahlerFamily, KahlerModel};
use crate::model::ModelSpec;
use crate::poly::{Poly, Term};
use crate::potentials::{Charges, GaugeCouplings, Superpotential};

/// Background description as configured (built into a `Background` on use).
#[derive(Debug, Clone, PartialEq)]
pub enum BackgroundConfig {
    Asymptotic {
        eta: f64,
        vbh0: f64,
        v0: f64,
        r_lo: f64,
        r_hi: f64,
    },
    NearHorizon {
        r_h: f64,
        ell_inv: f64,
        v2: f64,
        r_lo: f64,
        r_hi: f64,
    },
    Tabulated {
        /// Path to a metric table, relative to the config file.
        path: String,
    },
}

impl BackgroundConfig {
    /// Construct the background, resolving table paths against `base_dir`.
    pub fn build(&self, base_dir: &Path) -> Result<Background> {
        match self {
            BackgroundConfig::Asymptotic {
                eta,
                vbh0,
                v0,
                r_lo,
                r_hi,
            } => Background::asymptotic(*eta, *vbh0, *v0, *r_lo, *r_hi),
            BackgroundConfig::NearHorizon {
                r_h,
                ell_inv,
                v2,
                r_lo,
                r_hi,
            } => Background::near_horizon(*r_h, *ell_inv, *v2, *r_lo, *r_hi),
            BackgroundConfig::Tabulated { path } => {
                Background::from_table_file(&base_dir.join(path))
            }
        }
    }
}

/// Initial data and matching windows for the flow commands.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowConfig {
    pub r_start: f64,
    /// End of the long-range integration; defaults to the background's
    /// upper domain edge when absent.
    pub r_end: Option<f64>,
    pub phi: Vec<Complex64>,
    pub pi: Vec<Complex64>,
    /// Matching radius between finite part and tail of the energy.
    pub l_split: f64,
    pub match_lo: f64,
    pub match_hi: f64,
    pub match_samples: usize,
}

/// Inputs of the near-horizon commands.
#[derive(Debug, Clone, PartialEq)]
pub struct HorizonConfig {
    pub guess: Vec<Complex64>,
    pub r_h: f64,
    pub span: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputConfig {
    pub dir: String,
    pub json: bool,
    pub csv: bool,
    pub workers: usize,
}

/// Per-vector candidate charge lists; the scan runs the cartesian product.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanConfig {
    pub magnetic: Vec<Vec<f64>>,
    pub electric: Vec<Vec<f64>>,
}

/// Complete, validated run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: ModelSpec,
    pub background: BackgroundConfig,
    pub solver: SolverConfig,
    pub flow: FlowConfig,
    pub horizon: HorizonConfig,
    pub output: OutputConfig,
    pub scan: Option<ScanConfig>,
}

// ---------------------------------------------------------------------------
// Raw parsing layer
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
enum RawValue {
    Scalar(String),
    List(Vec<String>),
    Nested(Vec<Vec<String>>),
}

#[derive(Debug)]
struct RawSection {
    name: String,
    entries: Vec<(String, RawValue, usize)>,
}

fn parse_raw(text: &str) -> Result<Vec<RawSection>> {
    let mut sections: Vec<RawSection> = Vec::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw_line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(stripped) = line.strip_prefix('[') {
            let name = stripped.strip_suffix(']').ok_or(Error::ParseError {
                line: line_no,
                msg: "section header missing closing bracket".into(),
            })?;
            if name.is_empty() || name.contains([' ', '\t']) {
                return Err(Error::ParseError {
                    line: line_no,
                    msg: format!("invalid section name {name:?}"),
                });
            }
            sections.push(RawSection {
                name: name.to_string(),
                entries: Vec::new(),
            });
            continue;
        }
        let (key, value) = line.split_once('=').ok_or(Error::ParseError {
            line: line_no,
            msg: "expected `key = value`".into(),
        })?;
        let key = key.trim();
        if key.is_empty() {
            return Err(Error::ParseError {
                line: line_no,
                msg: "empty key".into(),
            });
        }
        let section = sections.last_mut().ok_or(Error::ParseError {
            line: line_no,
            msg: "key before any [section] header".into(),
        })?;
        // Strip trailing comments outside brackets.
        let value = strip_comment(value).trim();
        let raw = parse_value(value, line_no)?;
        section
            .entries
            .push((key.to_string(), raw, line_no));
    }
    Ok(sections)
}

fn strip_comment(s: &str) -> &str {
    let mut depth = 0usize;
    for (i, ch) in s.char_indices() {
        match ch {
            '[' => depth += 1,
            ']' => depth = depth.saturating_sub(1),
            '#' if depth == 0 => return &s[..i],
            _ => {}
        }
    }
    s
}

fn parse_value(value: &str, line: usize) -> Result<RawValue> {
    if !value.starts_with('[') {
        if value.is_empty() {
            return Err(Error::ParseError {
                line,
                msg: "empty value".into(),
            });
        }
        return Ok(RawValue::Scalar(value.to_string()));
    }
    let inner = value
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or(Error::ParseError {
            line,
            msg: "unbalanced brackets".into(),
        })?
        .trim();
    if inner.is_empty() {
        return Ok(RawValue::List(Vec::new()));
    }
    if inner.starts_with('[') {
        // Nested list: split on top-level commas.
        let mut rows = Vec::new();
        let mut depth = 0usize;
        let mut start = 0usize;
        for (i, ch) in inner.char_indices() {
            match ch {
                '[' => depth += 1,
                ']' => {
                    depth = depth.checked_sub(1).ok_or(Error::ParseError {
                        line,
                        msg: "unbalanced brackets".into(),
                    })?
                }
                ',' if depth == 0 => {
                    rows.push(inner[start..i].trim());
                    start = i + 1;
                }
                _ => {}
            }
        }
        if depth != 0 {
            return Err(Error::ParseError {
                line,
                msg: "unbalanced brackets".into(),
            });
        }
        rows.push(inner[start..].trim());
        let mut out = Vec::new();
        for row in rows {
            let row_inner = row
                .strip_prefix('[')
                .and_then(|s| s.strip_suffix(']'))
                .ok_or(Error::ParseError {
                    line,
                    msg: format!("expected inner list, found {row:?}"),
                })?;
            out.push(
                row_inner
                    .split(',')
                    .map(|t| t.trim().to_string())
                    .filter(|t| !t.is_empty())
                    .collect(),
            );
        }
        return Ok(RawValue::Nested(out));
    }
    Ok(RawValue::List(
        inner.split(',').map(|t| t.trim().to_string()).collect(),
    ))
}

/// Typed accessor over one section, tracking which keys were consumed so
/// that typos can be reported.
struct Section<'a> {
    raw: &'a RawSection,
    used: HashSet<String>,
}

impl<'a> Section<'a> {
    fn new(raw: &'a RawSection) -> Self {
        Section {
            raw,
            used: HashSet::new(),
        }
    }

    fn find(&mut self, key: &str) -> Option<(&'a RawValue, usize)> {
        self.used.insert(key.to_string());
        self.raw
            .entries
            .iter()
            .rev()
            .find(|(k, _, _)| k == key)
            .map(|(_, v, l)| (v, *l))
    }

    fn err(&self, key: &str, msg: impl Into<String>) -> Error {
        Error::ValidationError {
            section: self.raw.name.clone(),
            key: key.to_string(),
            msg: msg.into(),
        }
    }

    fn scalar(&mut self, key: &str) -> Result<&'a str> {
        match self.find(key) {
            Some((RawValue::Scalar(s), _)) => Ok(s),
            Some(_) => Err(self.err(key, "expected a scalar value")),
            None => Err(self.err(key, "missing required key")),
        }
    }

    fn f64(&mut self, key: &str) -> Result<f64> {
        let s = self.scalar(key)?;
        parse_f64(s).ok_or_else(|| self.err(key, format!("not a finite number: {s:?}")))
    }

    fn f64_or(&mut self, key: &str, default: f64) -> Result<f64> {
        match self.find(key) {
            None => Ok(default),
            Some((RawValue::Scalar(s), _)) => {
                parse_f64(s).ok_or_else(|| self.err(key, format!("not a finite number: {s:?}")))
            }
            Some(_) => Err(self.err(key, "expected a scalar value")),
        }
    }

    fn usize_or(&mut self, key: &str, default: usize) -> Result<usize> {
        match self.find(key) {
            None => Ok(default),
            Some((RawValue::Scalar(s), _)) => s
                .parse::<usize>()
                .map_err(|_| self.err(key, format!("not a non-negative integer: {s:?}"))),
            Some(_) => Err(self.err(key, "expected a scalar value")),
        }
    }

    fn u64_or(&mut self, key: &str, default: u64) -> Result<u64> {
        match self.find(key) {
            None => Ok(default),
            Some((RawValue::Scalar(s), _)) => s
                .parse::<u64>()
                .map_err(|_| self.err(key, format!("not a non-negative integer: {s:?}"))),
            Some(_) => Err(self.err(key, "expected a scalar value")),
        }
    }

    fn usize_req(&mut self, key: &str) -> Result<usize> {
        let s = self.scalar(key)?;
        s.parse::<usize>()
            .map_err(|_| self.err(key, format!("not a non-negative integer: {s:?}")))
    }

    fn bool_or(&mut self, key: &str, default: bool) -> Result<bool> {
        match self.find(key) {
            None => Ok(default),
            Some((RawValue::Scalar(s), _)) => match s.as_str() {
                "true" => Ok(true),
                "false" => Ok(false),
                other => Err(self.err(key, format!("expected true or false, found {other:?}"))),
            },
            Some(_) => Err(self.err(key, "expected a scalar value")),
        }
    }

    fn string_or(&mut self, key: &str, default: &str) -> Result<String> {
        match self.find(key) {
            None => Ok(default.to_string()),
            Some((RawValue::Scalar(s), _)) => Ok(s.clone()),
            Some(_) => Err(self.err(key, "expected a scalar value")),
        }
    }

    fn f64_list(&mut self, key: &str) -> Result<Vec<f64>> {
        match self.find(key) {
            Some((RawValue::List(items), _)) => items
                .iter()
                .map(|s| {
                    parse_f64(s)
                        .ok_or_else(|| self.err(key, format!("not a finite number: {s:?}")))
                })
                .collect(),
            Some(_) => Err(self.err(key, "expected a bracketed list")),
            None => Err(self.err(key, "missing required key")),
        }
    }

    fn f64_list_opt(&mut self, key: &str) -> Result<Option<Vec<f64>>> {
        if self.find(key).is_none() {
            return Ok(None);
        }
        self.f64_list(key).map(Some)
    }

    /// Polynomial terms: inner lists of n exponents followed by re, im.
    fn terms(&mut self, key: &str, n_fields: usize) -> Result<Vec<Term>> {
        let rows = match self.find(key) {
            Some((RawValue::Nested(rows), _)) => rows.clone(),
            Some((RawValue::List(items), _)) if items.is_empty() => Vec::new(),
            Some(_) => return Err(self.err(key, "expected a list of term lists")),
            None => return Err(self.err(key, "missing required key")),
        };
        let mut out = Vec::with_capacity(rows.len());
        for row in &rows {
            if row.len() != n_fields + 2 {
                return Err(self.err(
                    key,
                    format!(
                        "each term needs {} exponents plus re, im; found {} entries",
                        n_fields,
                        row.len()
                    ),
                ));
            }
            let mut exps = Vec::with_capacity(n_fields);
            for e in &row[..n_fields] {
                exps.push(e.parse::<u32>().map_err(|_| {
                    self.err(key, format!("exponent is not a non-negative integer: {e:?}"))
                })?);
            }
            let re = parse_f64(&row[n_fields])
                .ok_or_else(|| self.err(key, format!("not a finite number: {:?}", row[n_fields])))?;
            let im = parse_f64(&row[n_fields + 1]).ok_or_else(|| {
                self.err(key, format!("not a finite number: {:?}", row[n_fields + 1]))
            })?;
            out.push(Term {
                exponents: exps,
                coeff: Complex64::new(re, im),
            });
        }
        Ok(out)
    }

    fn reject_unknown_keys(&self) -> Result<()> {
        for (key, _, line) in &self.raw.entries {
            if !self.used.contains(key) {
                return Err(Error::ValidationError {
                    section: self.raw.name.clone(),
                    key: key.clone(),
                    msg: format!("unknown key (line {line})"),
                });
            }
        }
        Ok(())
    }
}

fn parse_f64(s: &str) -> Option<f64> {
    s.parse::<f64>().ok().filter(|v| v.is_finite())
}

fn complex_pair(
    sec: &mut Section,
    re_key: &str,
    im_key: &str,
    n: usize,
    default_zero: bool,
) -> Result<Vec<Complex64>> {
    let re = sec.f64_list_opt(re_key)?;
    let im = sec.f64_list_opt(im_key)?;
    let (re, im) = match (re, im) {
        (None, None) if default_zero => (vec![0.0; n], vec![0.0; n]),
        (re, im) => (
            re.unwrap_or_else(|| vec![0.0; n]),
            im.unwrap_or_else(|| vec![0.0; n]),
        ),
    };
    if re.len() != n || im.len() != n {
        return Err(sec.err(
            re_key,
            format!("expected {n} entries to match the field count"),
        ));
    }
    Ok(re
        .into_iter()
        .zip(im)
        .map(|(r, i)| Complex64::new(r, i))
        .collect())
}

// ---------------------------------------------------------------------------
// Config assembly
// ---------------------------------------------------------------------------

/// Parse and validate a configuration from text.
pub fn parse_config_str(text: &str) -> Result<RunConfig> {
    let raw = parse_raw(text)?;
    let get = |name: &str| -> Result<&RawSection> {
        raw.iter()
            .find(|s| s.name == name)
            .ok_or_else(|| Error::ValidationError {
                section: name.to_string(),
                key: String::new(),
                msg: "missing required section".into(),
            })
    };

    // [kahler]
    let mut sec = Section::new(get("kahler")?);
    let n_fields = sec.usize_req("n_fields")?;
    if n_fields == 0 {
        return Err(sec.err("n_fields", "need at least one field"));
    }
    let family = match sec.scalar("family")? {
        "flat" => KahlerFamily::Flat,
        "radial_series" => {
            let coeffs = sec.f64_list("coeffs")?;
            if coeffs.len() < 2 {
                return Err(sec.err("coeffs", "radial series needs at least two coefficients"));
            }
            KahlerFamily::RadialSeries { coeffs }
        }
        other => {
            return Err(sec.err(
                "family",
                format!("unknown family {other:?} (expected flat or radial_series)"),
            ))
        }
    };
    let bounds = GrowthBounds {
        epsilon: sec.f64_or("epsilon", 0.0)?,
        c1: sec.f64_or("c1", 1.0)?,
        c2: sec.f64_or("c2", 1.0)?,
        c3: sec.f64_or("c3", 0.0)?,
    };
    sec.reject_unknown_keys()?;
    let kahler = KahlerModel {
        n_fields,
        family,
        bounds,
    };

    // [superpotential]
    let mut sec = Section::new(get("superpotential")?);
    let w_terms = sec.terms("terms", n_fields)?;
    sec.reject_unknown_keys()?;
    let superpotential = if w_terms.is_empty() {
        Superpotential::zero(n_fields)
    } else {
        Superpotential::new(Poly::new(n_fields, w_terms))
    };

    // [couplings]
    let mut sec = Section::new(get("couplings")?);
    let n_vectors = sec.usize_req("n_vectors")?;
    if n_vectors == 0 {
        return Err(sec.err("n_vectors", "need at least one vector"));
    }
    let mut entries = Vec::with_capacity(n_vectors * (n_vectors + 1) / 2);
    for a in 0..n_vectors {
        for b in a..n_vectors {
            let key = format!("f_{a}_{b}");
            let terms = sec.terms(&key, n_fields)?;
            if terms.is_empty() {
                return Err(sec.err(&key, "coupling polynomial needs at least one term"));
            }
            entries.push(Poly::new(n_fields, terms));
        }
    }
    sec.reject_unknown_keys()?;
    let couplings = GaugeCouplings::new(n_vectors, entries);

    // [charges]
    let mut sec = Section::new(get("charges")?);
    let magnetic = sec.f64_list("magnetic")?;
    let electric = sec.f64_list("electric")?;
    if magnetic.len() != electric.len() {
        return Err(sec.err(
            "charges",
            format!(
                "magnetic and electric lists have lengths {} and {}",
                magnetic.len(),
                electric.len()
            ),
        ));
    }
    sec.reject_unknown_keys()?;
    let charges = Charges::new(magnetic, electric);

    let model = ModelSpec {
        kahler,
        superpotential,
        couplings,
        charges,
    };
    model.validate()?;

    // [background]
    let mut sec = Section::new(get("background")?);
    let background = match sec.scalar("variant")? {
        "asymptotic" => BackgroundConfig::Asymptotic {
            eta: sec.f64_or("eta", 0.0)?,
            vbh0: sec.f64_or("vbh0", 0.0)?,
            v0: sec.f64_or("v0", 0.0)?,
            r_lo: sec.f64("r_lo")?,
            r_hi: sec.f64("r_hi")?,
        },
        "near_horizon" => BackgroundConfig::NearHorizon {
            r_h: sec.f64("r_h")?,
            ell_inv: sec.f64("ell_inv")?,
            v2: sec.f64("v2")?,
            r_lo: sec.f64("r_lo")?,
            r_hi: sec.f64("r_hi")?,
        },
        "tabulated" => BackgroundConfig::Tabulated {
            path: sec.scalar("path")?.to_string(),
        },
        other => {
            return Err(sec.err(
                "variant",
                format!(
                    "unknown variant {other:?} (expected asymptotic, near_horizon, or tabulated)"
                ),
            ))
        }
    };
    sec.reject_unknown_keys()?;

    // [solver] (optional, all defaulted)
    let defaults = SolverConfig::default();
    let empty = RawSection {
        name: "solver".into(),
        entries: Vec::new(),
    };
    let raw_solver = raw.iter().find(|s| s.name == "solver").unwrap_or(&empty);
    let mut sec = Section::new(raw_solver);
    let solver = SolverConfig {
        ball_radius: sec.f64_or("ball_radius", defaults.ball_radius)?,
        fixpoint_tol: sec.f64_or("fixpoint_tol", defaults.fixpoint_tol)?,
        max_picard_iters: sec.usize_or("max_picard_iters", defaults.max_picard_iters)?,
        quadrature_panels: sec.usize_or("quadrature_panels", defaults.quadrature_panels)?,
        quadrature_order: sec.usize_or("quadrature_order", defaults.quadrature_order)?,
        rk_rel_tol: sec.f64_or("rk_rel_tol", defaults.rk_rel_tol)?,
        rk_abs_tol: sec.f64_or("rk_abs_tol", defaults.rk_abs_tol)?,
        horizon_offset: sec.f64_or("horizon_offset", defaults.horizon_offset)?,
        lipschitz_samples: sec.usize_or("lipschitz_samples", defaults.lipschitz_samples)?,
        lipschitz_seed: sec.u64_or("lipschitz_seed", defaults.lipschitz_seed)?,
    };
    sec.reject_unknown_keys()?;
    solver.validate()?;

    // [flow]
    let mut sec = Section::new(get("flow")?);
    let r_start = sec.f64("r_start")?;
    let r_end = match sec.find("r_end") {
        None => None,
        Some(_) => Some(sec.f64("r_end")?),
    };
    let phi = complex_pair(&mut sec, "phi_re", "phi_im", n_fields, true)?;
    let pi = complex_pair(&mut sec, "pi_re", "pi_im", n_fields, true)?;
    let l_split = sec.f64("l_split")?;
    let match_lo = sec.f64("match_lo")?;
    let match_hi = sec.f64("match_hi")?;
    let match_samples = sec.usize_or("match_samples", 40)?;
    if match_samples < 6 {
        return Err(sec.err("match_samples", "need at least 6 samples for the tail fit"));
    }
    if !(match_lo < match_hi) {
        return Err(sec.err("match_lo", "matching window must satisfy match_lo < match_hi"));
    }
    sec.reject_unknown_keys()?;
    let flow = FlowConfig {
        r_start,
        r_end,
        phi,
        pi,
        l_split,
        match_lo,
        match_hi,
        match_samples,
    };

    // [horizon]
    let mut sec = Section::new(get("horizon")?);
    let guess = complex_pair(&mut sec, "guess_re", "guess_im", n_fields, true)?;
    let r_h = sec.f64_or("r_h", 1.0)?;
    let span = sec.f64_or("span", 0.5 * r_h)?;
    if !(r_h > 0.0) {
        return Err(sec.err("r_h", "horizon radius must be positive"));
    }
    if !(span > 0.0) {
        return Err(sec.err("span", "span must be positive"));
    }
    sec.reject_unknown_keys()?;
    let horizon = HorizonConfig { guess, r_h, span };

    // [output] (optional)
    let empty_out = RawSection {
        name: "output".into(),
        entries: Vec::new(),
    };
    let raw_out = raw.iter().find(|s| s.name == "output").unwrap_or(&empty_out);
    let mut sec = Section::new(raw_out);
    let output = OutputConfig {
        dir: sec.string_or("dir", "out")?,
        json: sec.bool_or("json", true)?,
        csv: sec.bool_or("csv", true)?,
        workers: sec.usize_or("workers", 1)?.max(1),
    };
    sec.reject_unknown_keys()?;

    // [scan] (optional)
    let scan = match raw.iter().find(|s| s.name == "scan") {
        None => None,
        Some(raw_scan) => {
            let mut sec = Section::new(raw_scan);
            let mut magnetic = Vec::with_capacity(n_vectors);
            let mut electric = Vec::with_capacity(n_vectors);
            for a in 0..n_vectors {
                let mag = sec.f64_list_opt(&format!("magnetic_{a}"))?;
                let ele = sec.f64_list_opt(&format!("electric_{a}"))?;
                magnetic.push(mag.unwrap_or_else(|| vec![model.charges.magnetic[a]]));
                electric.push(ele.unwrap_or_else(|| vec![model.charges.electric[a]]));
            }
            for (a, lists) in magnetic.iter().zip(&electric).enumerate() {
                if lists.0.is_empty() || lists.1.is_empty() {
                    return Err(sec.err(
                        &format!("magnetic_{a}"),
                        "scan lists must be non-empty",
                    ));
                }
            }
            sec.reject_unknown_keys()?;
            Some(ScanConfig { magnetic, electric })
        }
    };

    // Unknown sections are typos too.
    const KNOWN: [&str; 9] = [
        "kahler",
        "superpotential",
        "couplings",
        "charges",
        "background",
        "solver",
        "flow",
        "horizon",
        "output",
    ];
    for s in &raw {
        if !KNOWN.contains(&s.name.as_str()) && s.name != "scan" {
            return Err(Error::ValidationError {
                section: s.name.clone(),
                key: String::new(),
                msg: "unknown section".into(),
            });
        }
    }

    Ok(RunConfig {
        model,
        background,
        solver,
        flow,
        horizon,
        output,
        scan,
    })
}

/// Parse a configuration file.
pub fn parse_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::io(path.display().to_string(), e))?;
    parse_config_str(&text)
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

fn fmt_f64(v: f64) -> String {
    // Display prints the shortest digit string that round-trips exactly.
    format!("{v}")
}

fn fmt_list(vs: &[f64]) -> String {
    let items: Vec<String> = vs.iter().map(|v| fmt_f64(*v)).collect();
    format!("[{}]", items.join(", "))
}

fn fmt_terms(poly: &Poly) -> String {
    let rows: Vec<String> = poly
        .terms()
        .iter()
        .map(|t| {
            let mut parts: Vec<String> =
                t.exponents.iter().map(|e| e.to_string()).collect();
            parts.push(fmt_f64(t.coeff.re));
            parts.push(fmt_f64(t.coeff.im));
            format!("[{}]", parts.join(", "))
        })
        .collect();
    format!("[{}]", rows.join(", "))
}

/// Serialize a configuration with every field written explicitly; parsing
/// the output reproduces the input exactly.
pub fn serialize_config(config: &RunConfig) -> String {
    let mut out = String::new();
    let model = &config.model;
    let n = model.n_fields();

    out.push_str("[kahler]\n");
    match model.kahler.family {
        KahlerFamily::Flat => out.push_str("family = flat\n"),
        KahlerFamily::RadialSeries { ref coeffs } => {
            out.push_str("family = radial_series\n");
            out.push_str(&format!("coeffs = {}\n", fmt_list(coeffs)));
        }
    }
    out.push_str(&format!("n_fields = {n}\n"));
    let b = &model.kahler.bounds;
    out.push_str(&format!("epsilon = {}\n", fmt_f64(b.epsilon)));
    out.push_str(&format!("c1 = {}\n", fmt_f64(b.c1)));
    out.push_str(&format!("c2 = {}\n", fmt_f64(b.c2)));
    out.push_str(&format!("c3 = {}\n", fmt_f64(b.c3)));

    out.push_str("\n[superpotential]\n");
    out.push_str(&format!("terms = {}\n", fmt_terms(model.superpotential.poly())));

    out.push_str("\n[couplings]\n");
    let n_v = model.n_vectors();
    out.push_str(&format!("n_vectors = {n_v}\n"));
    for a in 0..n_v {
        for bb in a..n_v {
            out.push_str(&format!(
                "f_{a}_{bb} = {}\n",
                fmt_terms(model.couplings.entry(a, bb))
            ));
        }
    }

    out.push_str("\n[charges]\n");
    out.push_str(&format!("magnetic = {}\n", fmt_list(&model.charges.magnetic)));
    out.push_str(&format!("electric = {}\n", fmt_list(&model.charges.electric)));

    out.push_str("\n[background]\n");
    match &config.background {
        BackgroundConfig::Asymptotic {
            eta,
            vbh0,
            v0,
            r_lo,
            r_hi,
        } => {
            out.push_str("variant = asymptotic\n");
            out.push_str(&format!("eta = {}\n", fmt_f64(*eta)));
            out.push_str(&format!("vbh0 = {}\n", fmt_f64(*vbh0)));
            out.push_str(&format!("v0 = {}\n", fmt_f64(*v0)));
            out.push_str(&format!("r_lo = {}\n", fmt_f64(*r_lo)));
            out.push_str(&format!("r_hi = {}\n", fmt_f64(*r_hi)));
        }
        BackgroundConfig::NearHorizon {
            r_h,
            ell_inv,
            v2,
            r_lo,
            r_hi,
        } => {
            out.push_str("variant = near_horizon\n");
            out.push_str(&format!("r_h = {}\n", fmt_f64(*r_h)));
            out.push_str(&format!("ell_inv = {}\n", fmt_f64(*ell_inv)));
            out.push_str(&format!("v2 = {}\n", fmt_f64(*v2)));
            out.push_str(&format!("r_lo = {}\n", fmt_f64(*r_lo)));
            out.push_str(&format!("r_hi = {}\n", fmt_f64(*r_hi)));
        }
        BackgroundConfig::Tabulated { path } => {
            out.push_str("variant = tabulated\n");
            out.push_str(&format!("path = {path}\n"));
        }
    }

    let s = &config.solver;
    out.push_str("\n[solver]\n");
    out.push_str(&format!("ball_radius = {}\n", fmt_f64(s.ball_radius)));
    out.push_str(&format!("fixpoint_tol = {}\n", fmt_f64(s.fixpoint_tol)));
    out.push_str(&format!("max_picard_iters = {}\n", s.max_picard_iters));
    out.push_str(&format!("quadrature_panels = {}\n", s.quadrature_panels));
    out.push_str(&format!("quadrature_order = {}\n", s.quadrature_order));
    out.push_str(&format!("rk_rel_tol = {}\n", fmt_f64(s.rk_rel_tol)));
    out.push_str(&format!("rk_abs_tol = {}\n", fmt_f64(s.rk_abs_tol)));
    out.push_str(&format!("horizon_offset = {}\n", fmt_f64(s.horizon_offset)));
    out.push_str(&format!("lipschitz_samples = {}\n", s.lipschitz_samples));
    out.push_str(&format!("lipschitz_seed = {}\n", s.lipschitz_seed));

    let f = &config.flow;
    out.push_str("\n[flow]\n");
    out.push_str(&format!("r_start = {}\n", fmt_f64(f.r_start)));
    if let Some(r_end) = f.r_end {
        out.push_str(&format!("r_end = {}\n", fmt_f64(r_end)));
    }
    out.push_str(&format!(
        "phi_re = {}\n",
        fmt_list(&f.phi.iter().map(|z| z.re).collect::<Vec<_>>())
    ));
    out.push_str(&format!(
        "phi_im = {}\n",
        fmt_list(&f.phi.iter().map(|z| z.im).collect::<Vec<_>>())
    ));
    out.push_str(&format!(
        "pi_re = {}\n",
        fmt_list(&f.pi.iter().map(|z| z.re).collect::<Vec<_>>())
    ));
    out.push_str(&format!(
        "pi_im = {}\n",
        fmt_list(&f.pi.iter().map(|z| z.im).collect::<Vec<_>>())
    ));
    out.push_str(&format!("l_split = {}\n", fmt_f64(f.l_split)));
    out.push_str(&format!("match_lo = {}\n", fmt_f64(f.match_lo)));
    out.push_str(&format!("match_hi = {}\n", fmt_f64(f.match_hi)));
    out.push_str(&format!("match_samples = {}\n", f.match_samples));

    let h = &config.horizon;
    out.push_str("\n[horizon]\n");
    out.push_str(&format!(
        "guess_re = {}\n",
        fmt_list(&h.guess.iter().map(|z| z.re).collect::<Vec<_>>())
    ));
    out.push_str(&format!(
        "guess_im = {}\n",
        fmt_list(&h.guess.iter().map(|z| z.im).collect::<Vec<_>>())
    ));
    out.push_str(&format!("r_h = {}\n", fmt_f64(h.r_h)));
    out.push_str(&format!("span = {}\n", fmt_f64(h.span)));

    let o = &config.output;
    out.push_str("\n[output]\n");
    out.push_str(&format!("dir = {}\n", o.dir));
    out.push_str(&format!("json = {}\n", o.json));
    out.push_str(&format!("csv = {}\n", o.csv));
    out.push_str(&format!("workers = {}\n", o.workers));

    if let Some(scan) = &config.scan {
        out.push_str("\n[scan]\n");
        for (a, list) in scan.magnetic.iter().enumerate() {
            out.push_str(&format!("magnetic_{a} = {}\n", fmt_list(list)));
        }
        for (a, list) in scan.electric.iter().enumerate() {
            out.push_str(&format!("electric_{a} = {}\n", fmt_list(list)));
        }
    }

    out
}
