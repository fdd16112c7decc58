//! Integer-valued probability mass functions.
//!
//! A [`Pmf`] stores raw masses on `0..=support_max` together with the mass lost
//! to truncation. Masses are never renormalized after truncation; the defect is
//! carried along so that downstream results can report an explicit error bound.

use std::path::Path;

use crate::error::{Error, Result};

/// Default truncation tolerance for infinite-support distributions.
pub const DEFAULT_TAIL_TOL: f64 = 1e-12;

/// Largest accepted truncation tolerance.
pub const MAX_TAIL_TOL: f64 = 1e-6;

/// Tolerance on the total mass of explicitly listed distributions.
pub const LIST_SUM_TOL: f64 = 1e-9;

/// A finitely supported, possibly defective, probability mass function on the
/// nonnegative integers.
#[derive(Debug, Clone, PartialEq)]
pub struct Pmf {
    probs: Vec<f64>,
    cdf: Vec<f64>,
    mass_defect: f64,
    tail_mean_bound: f64,
}

/// Moments and cumulative summaries of a [`Pmf`].
#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    /// `Σ u·p[u]` over the retained atoms.
    pub mean: f64,
    /// Upper bound on the mean contribution of the truncated tail.
    pub mean_tail_bound: f64,
    /// `cdf[u] = Σ_{i≤u} p[i]`.
    pub cdf: Vec<f64>,
    /// `tail[u] = 1 - cdf[u]`, which includes the mass defect.
    pub tail: Vec<f64>,
}

impl Pmf {
    fn assemble(mut probs: Vec<f64>, mass_defect: f64, tail_mean_bound: f64) -> Self {
        while probs.len() > 1 && probs.last() == Some(&0.0) {
            probs.pop();
        }
        if probs.is_empty() {
            probs.push(0.0);
        }
        let mut acc = 0.0;
        let cdf = probs
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        Pmf {
            probs,
            cdf,
            mass_defect,
            tail_mean_bound,
        }
    }

    /// Builds a proper distribution from an explicit list of masses.
    ///
    /// The list has to sum to one within [`LIST_SUM_TOL`]; it is rescaled to
    /// sum to one exactly (up to rounding) so the stored defect is zero.
    pub fn from_masses(masses: &[f64]) -> Result<Self> {
        if masses.is_empty() {
            return Err(Error::Validation("empty probability list".into()));
        }
        for (i, &p) in masses.iter().enumerate() {
            if !p.is_finite() || p < 0.0 {
                return Err(Error::Validation(format!(
                    "probability at atom {i} is {p}; masses must be finite and nonnegative"
                )));
            }
        }
        let total: f64 = masses.iter().sum();
        if (total - 1.0).abs() > LIST_SUM_TOL {
            return Err(Error::Validation(format!(
                "probabilities sum to {total}, not 1 (tolerance {LIST_SUM_TOL:e})"
            )));
        }
        let probs = if total == 1.0 {
            masses.to_vec()
        } else {
            masses.iter().map(|p| p / total).collect()
        };
        Ok(Self::assemble(probs, 0.0, 0.0))
    }

    /// Unit mass at `atom`.
    pub fn point_mass(atom: usize) -> Self {
        let mut probs = vec![0.0; atom + 1];
        probs[atom] = 1.0;
        Self::assemble(probs, 0.0, 0.0)
    }

    /// Mass at `u`, zero outside the retained support.
    pub fn prob(&self, u: usize) -> f64 {
        self.probs.get(u).copied().unwrap_or(0.0)
    }

    /// `P(Z ≤ u)` over the retained masses.
    pub fn cdf(&self, u: usize) -> f64 {
        match self.cdf.get(u) {
            Some(&c) => c,
            None => *self.cdf.last().expect("non-empty support"),
        }
    }

    /// `1 - P(Z ≤ u)`; includes the mass defect.
    pub fn tail(&self, u: usize) -> f64 {
        1.0 - self.cdf(u)
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn cdf_values(&self) -> &[f64] {
        &self.cdf
    }

    pub fn support_max(&self) -> usize {
        self.probs.len() - 1
    }

    pub fn mass_defect(&self) -> f64 {
        self.mass_defect
    }

    /// Total retained mass.
    pub fn total_mass(&self) -> f64 {
        *self.cdf.last().expect("non-empty support")
    }

    /// Smallest atom with positive mass, if any.
    pub fn min_atom(&self) -> Option<usize> {
        self.probs.iter().position(|&p| p > 0.0)
    }

    /// `Σ u·p[u]` over the retained atoms.
    pub fn mean(&self) -> f64 {
        self.probs
            .iter()
            .enumerate()
            .map(|(u, p)| u as f64 * p)
            .sum()
    }

    /// Upper bound on `E[Z; Z truncated]`, the mean mass lost to truncation.
    pub fn mean_tail_bound(&self) -> f64 {
        self.tail_mean_bound
    }

    pub fn summarize(&self) -> Summary {
        summarize(self)
    }
}

/// Displaced Poisson distribution `P(Z = shift + j) = e^{-λ} λ^j / j!`,
/// truncated at the first `j` where the remaining tail mass is at most
/// `tail_tol`.
pub fn make_displaced_poisson(lambda: f64, shift: usize, tail_tol: f64) -> Result<Pmf> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "Poisson rate must be positive and finite, got {lambda}"
        )));
    }
    if !(tail_tol > 0.0 && tail_tol <= MAX_TAIL_TOL) {
        return Err(Error::InvalidParameter(format!(
            "tail_tol must lie in (0, {MAX_TAIL_TOL:e}], got {tail_tol}"
        )));
    }
    let p0 = (-lambda).exp();
    if p0 == 0.0 {
        return Err(Error::InvalidParameter(format!(
            "Poisson rate {lambda} underflows e^(-lambda)"
        )));
    }
    let mut probs = vec![0.0; shift];
    let mut term = p0;
    let mut total = 0.0;
    let mut j = 0usize;
    loop {
        probs.push(term);
        total += term;
        let defect = 1.0 - total;
        if defect <= tail_tol || term == 0.0 && j as f64 > lambda {
            break;
        }
        j += 1;
        term *= lambda / j as f64;
    }
    let defect = (1.0 - total).max(0.0);
    // E[Z; j > J] = shift·d + λ·(d + p_J) since j·p_j = λ·p_{j-1}.
    let last = *probs.last().expect("at least one term");
    let tail_mean = (shift as f64 * defect + lambda * (defect + last)) * (1.0 + 1e-9);
    Ok(Pmf::assemble(probs, defect, tail_mean))
}

/// Distribution of the sum of two independent variables.
pub fn convolve(a: &Pmf, b: &Pmf) -> Pmf {
    let n = a.probs.len() + b.probs.len() - 1;
    let mut out = vec![0.0; n];
    for (u, slot) in out.iter_mut().enumerate() {
        let lo = u.saturating_sub(b.support_max());
        let hi = u.min(a.support_max());
        let mut acc = 0.0;
        for k in lo..=hi {
            acc += a.probs[k] * b.probs[u - k];
        }
        *slot = acc;
    }
    let defect = a.mass_defect + b.mass_defect - a.mass_defect * b.mass_defect;
    // Lost mean: E[(A+B); A or B truncated] ≤ tA + dA·E B + tB + dB·E A.
    let full_a = a.mean() + a.tail_mean_bound;
    let full_b = b.mean() + b.tail_mean_bound;
    let tail_mean =
        a.tail_mean_bound + a.mass_defect * full_b + b.tail_mean_bound + b.mass_defect * full_a;
    Pmf::assemble(out, defect, tail_mean)
}

pub fn summarize(p: &Pmf) -> Summary {
    Summary {
        mean: p.mean(),
        mean_tail_bound: p.tail_mean_bound,
        cdf: p.cdf.clone(),
        tail: p.cdf.iter().map(|c| 1.0 - c).collect(),
    }
}

/// Parses a distribution spec.
///
/// Accepted forms: `dpois:<lambda>,<shift>`, `pmf:<p0>,<p1>,...` and
/// `@<path>` (one probability per line, line index is the atom). Real numbers
/// may be written as decimals or as `p/q` fractions.
pub fn parse_pmf_spec(text: &str, tail_tol: f64) -> Result<Pmf> {
    let text = text.trim();
    if let Some(path) = text.strip_prefix('@') {
        return read_pmf_file(Path::new(path));
    }
    let Some((kind, body)) = text.split_once(':') else {
        return Err(Error::parse(
            0,
            text,
            "expected `dpois:<lambda>,<shift>`, `pmf:<p0>,...` or `@<path>`",
        ));
    };
    let offset = kind.len() + 1;
    let fields = split_fields(body, offset);
    match kind {
        "dpois" => {
            if fields.len() != 2 {
                return Err(Error::parse(
                    offset,
                    body,
                    format!("dpois takes 2 fields (lambda, shift), found {}", fields.len()),
                ));
            }
            let (pos, tok) = fields[0];
            let lambda = parse_real(tok).ok_or_else(|| Error::parse(pos, tok, "not a number"))?;
            let (pos, tok) = fields[1];
            let shift: usize = tok
                .parse()
                .map_err(|_| Error::parse(pos, tok, "shift must be a nonnegative integer"))?;
            make_displaced_poisson(lambda, shift, tail_tol)
        }
        "pmf" => {
            let mut masses = Vec::with_capacity(fields.len());
            for (pos, tok) in fields {
                masses.push(parse_real(tok).ok_or_else(|| Error::parse(pos, tok, "not a number"))?);
            }
            Pmf::from_masses(&masses)
        }
        other => Err(Error::parse(0, other, "unknown distribution kind")),
    }
}

fn read_pmf_file(path: &Path) -> Result<Pmf> {
    let content = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let mut masses = Vec::new();
    for (line_no, line) in content.lines().enumerate() {
        let tok = line.trim();
        if tok.is_empty() || tok.starts_with('#') {
            continue;
        }
        let p = parse_real(tok).ok_or_else(|| {
            Error::parse(line_no + 1, tok, format!("line {} is not a number", line_no + 1))
        })?;
        masses.push(p);
    }
    Pmf::from_masses(&masses)
}

fn split_fields(body: &str, offset: usize) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = 0;
    for piece in body.split(',') {
        let lead = piece.len() - piece.trim_start().len();
        out.push((offset + start + lead, piece.trim()));
        start += piece.len() + 1;
    }
    out
}

fn parse_real(tok: &str) -> Option<f64> {
    let v = match tok.split_once('/') {
        Some((num, den)) => {
            let n: f64 = num.trim().parse().ok()?;
            let d: f64 = den.trim().parse().ok()?;
            if d == 0.0 {
                return None;
            }
            n / d
        }
        None => tok.parse().ok()?,
    };
    v.is_finite().then_some(v)
}
