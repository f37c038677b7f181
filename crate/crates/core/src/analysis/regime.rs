use std::fmt;

use serde::{Deserialize, Serialize};

use crate::constitutive::{ModeCategory, ModeTag};
use crate::error::{param, Result};

/// Subcritical threshold `α₀(d) = 1 + (d−1)/3`.
pub fn alpha0(d: usize) -> Result<f64> {
    if d < 1 {
        return param("dimension d must be at least 1");
    }
    // Same value as 1 + (d−1)/3, but rounds to the nearest double of 4/3
    // and 5/3.
    Ok((d as f64 + 2.0) / 3.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegimeQuery {
    pub d: usize,
    pub alpha: f64,
    pub mode: ModeTag,
    pub q: f64,
    /// Initial-data integrability, `∞` allowed.
    pub q0: f64,
    pub p: f64,
    pub delta: f64,
}

impl RegimeQuery {
    pub fn new(d: usize, alpha: f64, mode: ModeTag, q: f64, q0: f64) -> Self {
        RegimeQuery { d, alpha, mode, q, q0, p: 2.0, delta: 0.0 }
    }

    pub fn with_p(mut self, p: f64) -> Self {
        self.p = p;
        self
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    /// Conjugate exponent `q* = q/(q−1)`.
    pub fn q_star(&self) -> f64 {
        self.q / (self.q - 1.0)
    }

    /// Structural checks only; regime conditions are the oracle's business.
    pub fn validate(&self) -> Result<()> {
        let mut bad = Vec::new();
        if self.d < 1 {
            bad.push("d ≥ 1".to_string());
        }
        if !self.alpha.is_finite() {
            bad.push("finite α".to_string());
        }
        if !(self.q >= 2.0 && self.q.is_finite()) {
            bad.push("finite q ≥ 2".to_string());
        }
        if !(self.q0 >= 2.0) {
            bad.push("q₀ ≥ 2".to_string());
        }
        if !(self.q <= self.q0) {
            bad.push("q ≤ q₀".to_string());
        }
        if !(self.p >= 2.0 && self.p.is_finite()) {
            bad.push("finite p ≥ 2".to_string());
        }
        if !(self.delta >= 0.0 && self.delta.is_finite()) {
            bad.push("finite δ ≥ 0".to_string());
        }
        if bad.is_empty() {
            Ok(())
        } else {
            param(format!("invalid regime query, needs {}", bad.join(", ")))
        }
    }
}

/// The clause a verdict rests on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Clause {
    /// Free divergence, subcritical, `d = 1`.
    Clause1,
    /// Free divergence, subcritical, `d ∈ {2, 3}`, `d/(α−1) < q ≤ 3d/(d−1)`.
    Clause2,
    /// `3d/(d−1) ≤ q ≤ min{q₀, 2d/(d−α)}`, `d − 2d/q < α ≤ 2`.
    Case1,
    /// `d/(α−1) < q ≤ q₀ ≤ 3d/(d−1)`, `1 + d/q < α ≤ 2`.
    Case2,
    /// General mode, subcritical: local mild solution.
    LocalSubcritical,
    /// Free divergence, any `α ∈ (0, 2]`: martingale solution.
    Martingale,
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Clause::Clause1 => "free-divergence subcritical clause (1)",
            Clause::Clause2 => "free-divergence subcritical clause (2)",
            Clause::Case1 => "free-divergence subcritical case 1",
            Clause::Case2 => "free-divergence subcritical case 2",
            Clause::LocalSubcritical => "general-mode subcritical local existence",
            Clause::Martingale => "free-divergence general-regime martingale existence",
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub granted: bool,
    pub clause: Option<Clause>,
}

impl Verdict {
    fn grant(clause: Clause) -> Self {
        Verdict { granted: true, clause: Some(clause) }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Verdicts {
    pub global_mild: Verdict,
    pub local_mild: Verdict,
    pub martingale: Verdict,
}

/// Exponent formulas evaluated at a query; `delta1_max` is absent when
/// `α − 1 − d/q < 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentRecord {
    /// `α/2 − d/2 + d/q`.
    pub beta_max: f64,
    /// `min{δ, α − 1 − d/q}`.
    pub delta1_max: Option<f64>,
    /// `max{α, 1 + d/q*}`.
    pub delta_prime_min: f64,
    /// `max{1 + d/q, α/2 − d/2 + d/q*}`.
    pub eta_min: f64,
    /// `α + 1 + d/q − δ`.
    pub delta_second_min: f64,
}

pub fn admissible_exponents(qr: &RegimeQuery) -> ExponentRecord {
    let d = qr.d as f64;
    let (a, q, qs) = (qr.alpha, qr.q, qr.q_star());
    let gap = a - 1.0 - d / q;
    ExponentRecord {
        beta_max: a / 2.0 - d / 2.0 + d / q,
        delta1_max: (gap >= 0.0).then(|| qr.delta.min(gap)),
        delta_prime_min: a.max(1.0 + d / qs),
        eta_min: (1.0 + d / q).max(a / 2.0 - d / 2.0 + d / qs),
        delta_second_min: a + 1.0 + d / q - qr.delta,
    }
}

/// Exponents attached to a certificate; each is present only when a granted
/// verdict's clause defines it.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CertificateExponents {
    pub beta_max: Option<f64>,
    /// Integrability index the `β` bound refers to (the query's `q`, or 2 for
    /// a martingale verdict without the extended range).
    pub beta_q: Option<f64>,
    /// Set when the reported `β_max ≤ 0`: the regularity statement then
    /// carries no positive smoothness.
    pub beta_nonpositive: bool,
    pub delta1_max: Option<f64>,
    pub delta_prime_min: Option<f64>,
    pub delta_second_min: Option<f64>,
    pub eta_min: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegimeCertificate {
    pub query: RegimeQuery,
    pub verdicts: Verdicts,
    pub exponents: CertificateExponents,
    /// Martingale regularity holds at the query's `q`, not only at `q = 2`.
    pub martingale_extended_q: bool,
    pub notes: Vec<String>,
}

// The printed inequalities are evaluated with a relative slack of 1e-12 so
// that boundary cases such as 1/(1.2 − 1) = 5.000000000000001 ≤ 5 count as
// equalities. Strict inequalities need a margin beyond that slack.
const SLACK: f64 = 1e-12;

fn le(a: f64, b: f64) -> bool {
    if a.is_infinite() || b.is_infinite() {
        return a <= b;
    }
    a <= b + SLACK * a.abs().max(b.abs()).max(1.0)
}

fn lt(a: f64, b: f64) -> bool {
    if a.is_infinite() || b.is_infinite() {
        return a < b;
    }
    a < b - SLACK * a.abs().max(b.abs()).max(1.0)
}

fn fmt_num(x: f64) -> String {
    if x.is_infinite() {
        "∞".into()
    } else {
        let s = format!("{x:.6}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        s.to_string()
    }
}

struct Check<'a> {
    notes: &'a mut Vec<String>,
    prefix: &'static str,
    ok: bool,
}

impl Check<'_> {
    fn require(&mut self, cond: bool, failure: impl FnOnce() -> String) {
        if !cond {
            self.ok = false;
            let msg = failure();
            self.notes.push(format!("{}: {msg}", self.prefix));
        }
    }
}

/// Classifies a query against the free-divergence global, general-mode
/// local and martingale existence results. Never fails: unmet conditions
/// are listed in the notes and the corresponding verdicts denied.
pub fn regime_classify(qr: &RegimeQuery) -> RegimeCertificate {
    let mut notes = Vec::new();
    let mut verdicts = Verdicts::default();
    let mut exps = CertificateExponents::default();
    let mut extended = false;

    if let Err(e) = qr.validate() {
        notes.push(e.to_string());
        return RegimeCertificate { query: *qr, verdicts, exponents: exps, martingale_extended_q: false, notes };
    }

    let d = qr.d as f64;
    let (a, q, q0) = (qr.alpha, qr.q, qr.q0);
    let a0 = (d + 2.0) / 3.0;
    let ca = qr.mode == ModeTag::Ca;
    let cat = ModeCategory::new(qr.mode);

    let (floor, strict) = cat.delta_floor();
    let delta_ok = cat.admits_delta(qr.delta);
    if !delta_ok {
        let rel = if strict { ">" } else { "≥" };
        notes.push(format!(
            "initial data: mode {} needs δ {rel} {} but δ = {}",
            qr.mode,
            fmt_num(floor),
            fmt_num(qr.delta)
        ));
    }
    if !(le(0.0, a) && a > 0.0 && le(a, 2.0)) {
        notes.push(format!("α = {} lies outside (0, 2]", fmt_num(a)));
    }
    let alpha_in_range = a > 0.0 && le(a, 2.0);

    // Global mild solution.
    {
        let mut c = Check { notes: &mut notes, prefix: "global_mild", ok: delta_ok && alpha_in_range };
        c.require(ca, || format!("mode {} is not free-divergence C_a", qr.mode));
        c.require((1..=3).contains(&qr.d), || format!("d = {} ∉ {{1, 2, 3}}", qr.d));
        c.require(lt(a0, a), || format!("α ≤ α₀({}) = {}", qr.d, fmt_num(a0)));
        if c.ok {
            let lower = 2f64.max(d / (a - 1.0));
            c.require(le(lower, q0), || format!("q₀ = {} < max{{2, d/(α−1)}} = {}", fmt_num(q0), fmt_num(lower)));
        }
        if c.ok {
            let mut clause = None;
            let mut reasons = Vec::new();
            if qr.d == 1 {
                let lower = 2f64.max(1.0 / (a - 1.0));
                if le(lower, q) && le(q, q0) {
                    clause = Some(Clause::Clause1);
                } else {
                    reasons.push(format!(
                        "clause (1) needs max{{2, 1/(α−1)}} = {} ≤ q = {} ≤ q₀ = {}",
                        fmt_num(lower),
                        fmt_num(q),
                        fmt_num(q0)
                    ));
                }
            } else {
                let crit = 3.0 * d / (d - 1.0);
                let lower = d / (a - 1.0);
                if lt(lower, q) && le(q, crit) && le(crit, q0) {
                    clause = Some(Clause::Clause2);
                } else {
                    reasons.push(format!(
                        "clause (2) needs d/(α−1) = {} < q = {} ≤ 3d/(d−1) = {} ≤ q₀ = {}",
                        fmt_num(lower),
                        fmt_num(q),
                        fmt_num(crit),
                        fmt_num(q0)
                    ));
                }
                if clause.is_none() {
                    let cap = if lt(a, d) { 2.0 * d / (d - a) } else { f64::INFINITY };
                    if le(crit, q) && le(q, q0.min(cap)) && lt(d - 2.0 * d / q, a) {
                        clause = Some(Clause::Case1);
                    } else {
                        reasons.push(format!(
                            "case 1 needs 3d/(d−1) = {} ≤ q ≤ min{{q₀, 2d/(d−α)}} = {} and d − 2d/q = {} < α",
                            fmt_num(crit),
                            fmt_num(q0.min(cap)),
                            fmt_num(d - 2.0 * d / q)
                        ));
                    }
                }
                if clause.is_none() {
                    if lt(lower, q) && le(q, q0) && le(q0, crit) && lt(1.0 + d / q, a) {
                        clause = Some(Clause::Case2);
                    } else {
                        reasons.push(format!(
                            "case 2 needs d/(α−1) = {} < q ≤ q₀ ≤ 3d/(d−1) = {} and 1 + d/q = {} < α",
                            fmt_num(lower),
                            fmt_num(crit),
                            fmt_num(1.0 + d / q)
                        ));
                    }
                }
            }
            match clause {
                Some(cl) => verdicts.global_mild = Verdict::grant(cl),
                None => {
                    for r in reasons {
                        notes.push(format!("global_mild: {r}"));
                    }
                }
            }
        }
    }

    // Local mild solution, any mode.
    {
        let mut c = Check { notes: &mut notes, prefix: "local_mild", ok: delta_ok && alpha_in_range };
        c.require(lt(1.0 + d / q, a), || format!("α ≤ 1+d/q = {}", fmt_num(1.0 + d / q)));
        if c.ok {
            let lower = 2f64.max(d / (a - 1.0));
            c.require(le(lower, q0), || format!("q₀ = {} < max{{2, d/(α−1)}} = {}", fmt_num(q0), fmt_num(lower)));
            c.require(le(lower, q) && le(q, q0), || {
                format!("needs max{{2, d/(α−1)}} = {} ≤ q = {} ≤ q₀ = {}", fmt_num(lower), fmt_num(q), fmt_num(q0))
            });
        }
        if c.ok {
            verdicts.local_mild = Verdict::grant(Clause::LocalSubcritical);
        }
    }

    // Martingale solution.
    {
        let mut c = Check { notes: &mut notes, prefix: "martingale", ok: delta_ok && alpha_in_range };
        c.require(ca, || format!("mode {} is not free-divergence C_a", qr.mode));
        if c.ok {
            verdicts.martingale = Verdict::grant(Clause::Martingale);
            let cap = if le(d, a) { q0 } else { q0.min(2.0 * d / (d - a)) };
            extended = le(d * (1.0 - 2.0 / q), a) && le(2.0, q) && le(q, cap);
            if !extended {
                notes.push(format!(
                    "martingale: regularity only at q = 2; the extended range needs d(1−2/q) = {} ≤ α and q ≤ {}",
                    fmt_num(d * (1.0 - 2.0 / q)),
                    fmt_num(cap)
                ));
            }
        }
    }

    let full = admissible_exponents(qr);
    let g = verdicts.global_mild.granted;
    let l = verdicts.local_mild.granted;
    let m = verdicts.martingale.granted;
    if g || (m && extended) {
        exps.beta_max = Some(full.beta_max);
        exps.beta_q = Some(q);
    } else if m {
        let at2 = RegimeQuery { q: 2.0, ..*qr };
        exps.beta_max = Some(admissible_exponents(&at2).beta_max);
        exps.beta_q = Some(2.0);
    }
    exps.beta_nonpositive = exps.beta_max.is_some_and(|b| b <= 0.0);
    if g || l {
        // δ = 0 data give δ₁ = 0 whenever the bound exists.
        exps.delta1_max = full.delta1_max;
    }
    if g || m {
        exps.delta_prime_min = Some(full.delta_prime_min);
    }
    if m {
        exps.eta_min = Some(full.eta_min);
    }
    if l {
        exps.delta_second_min = Some(full.delta_second_min);
    }

    RegimeCertificate { query: *qr, verdicts, exponents: exps, martingale_extended_q: extended, notes }
}

impl fmt::Display for RegimeCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let qr = &self.query;
        writeln!(
            f,
            "query: d={} alpha={} mode={} q={} q0={} p={} delta={}",
            qr.d,
            fmt_num(qr.alpha),
            qr.mode,
            fmt_num(qr.q),
            fmt_num(qr.q0),
            fmt_num(qr.p),
            fmt_num(qr.delta)
        )?;
        for (name, v) in [
            ("global_mild", self.verdicts.global_mild),
            ("local_mild", self.verdicts.local_mild),
            ("martingale", self.verdicts.martingale),
        ] {
            match v.clause {
                Some(c) if v.granted => writeln!(f, "{name}: granted ({c})")?,
                _ => writeln!(f, "{name}: denied")?,
            }
        }
        let e = &self.exponents;
        let opt = |x: Option<f64>| x.map_or("-".to_string(), fmt_num);
        writeln!(
            f,
            "exponents: beta_max={}{} delta1_max={} delta_prime_min={} delta_second_min={} eta_min={}",
            opt(e.beta_max),
            e.beta_q.map_or(String::new(), |q| format!(" (q={})", fmt_num(q))),
            opt(e.delta1_max),
            opt(e.delta_prime_min),
            opt(e.delta_second_min),
            opt(e.eta_min)
        )?;
        if e.beta_nonpositive {
            writeln!(f, "warning: beta_max <= 0")?;
        }
        for n in &self.notes {
            writeln!(f, "note: {n}")?;
        }
        Ok(())
    }
}
