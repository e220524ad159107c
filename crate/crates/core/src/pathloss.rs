//! Path-loss functions and the quantities derived from them: the SNR
//! radius, the shifted path loss used for block interference bounds, and the
//! lattice-sum constant `K0`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Bounded, radially decreasing path loss.
///
/// Both variants equal `min(cap, r^-exponent)`; the compact one is zero for
/// `r >= cutoff`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PathLoss {
    TruncatedPower { cap: f64, exponent: f64 },
    CompactPower { cap: f64, exponent: f64, cutoff: f64 },
}

impl PathLoss {
    pub fn truncated(cap: f64, exponent: f64) -> Result<Self> {
        let l = PathLoss::TruncatedPower { cap, exponent };
        l.check()?;
        Ok(l)
    }

    pub fn compact(cap: f64, exponent: f64, cutoff: f64) -> Result<Self> {
        let l = PathLoss::CompactPower {
            cap,
            exponent,
            cutoff,
        };
        l.check()?;
        Ok(l)
    }

    /// The Hertzian example `min(1, r^-alpha)`.
    pub fn hertzian(exponent: f64) -> Self {
        PathLoss::TruncatedPower { cap: 1.0, exponent }
    }

    pub fn check(&self) -> Result<()> {
        let (cap, exponent) = (self.cap(), self.exponent());
        if !(cap > 0.0 && cap.is_finite()) {
            return Err(Error::InvalidParameter(format!("path-loss cap {cap} must be positive")));
        }
        if !(exponent > 0.0 && exponent.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "path-loss exponent {exponent} must be positive"
            )));
        }
        if let PathLoss::CompactPower { cutoff, .. } = self {
            if !(*cutoff > 0.0) {
                return Err(Error::InvalidParameter(format!("cutoff {cutoff} must be positive")));
            }
        }
        Ok(())
    }

    pub fn cap(&self) -> f64 {
        match *self {
            PathLoss::TruncatedPower { cap, .. } | PathLoss::CompactPower { cap, .. } => cap,
        }
    }

    pub fn exponent(&self) -> f64 {
        match *self {
            PathLoss::TruncatedPower { exponent, .. } | PathLoss::CompactPower { exponent, .. } => {
                exponent
            }
        }
    }

    /// End of the constant plateau, `cap^(-1/exponent)`.
    pub fn plateau_end(&self) -> f64 {
        self.cap().powf(-1.0 / self.exponent())
    }

    /// `sup supp(l)`, if finite.
    pub fn support_end(&self) -> Option<f64> {
        match *self {
            PathLoss::TruncatedPower { .. } => None,
            PathLoss::CompactPower { cutoff, .. } => Some(cutoff),
        }
    }

    #[inline]
    fn power(&self, r: f64) -> f64 {
        let a = self.exponent();
        if a.fract() == 0.0 && a <= 64.0 {
            1.0 / r.powi(a as i32)
        } else {
            r.powf(-a)
        }
    }

    /// Unchecked evaluation for `r >= 0`.
    #[inline]
    pub fn value(&self, r: f64) -> f64 {
        if let PathLoss::CompactPower { cutoff, .. } = *self {
            if r >= cutoff {
                return 0.0;
            }
        }
        let cap = self.cap();
        if r <= 0.0 {
            return cap;
        }
        cap.min(self.power(r))
    }

    /// Smallest `R` such that `l(r) > v` implies `r < R`; zero when no
    /// distance beats `v`.
    pub fn reach(&self, v: f64) -> f64 {
        if v >= self.cap() {
            return 0.0;
        }
        let r = if v > 0.0 {
            v.powf(-1.0 / self.exponent())
        } else {
            f64::INFINITY
        };
        match self.support_end() {
            Some(end) => r.min(end),
            None => r,
        }
    }

    pub fn eval(&self, r: f64) -> Result<f64> {
        if !(r >= 0.0) {
            return Err(Error::InvalidParameter(format!("negative distance {r}")));
        }
        Ok(self.value(r))
    }

    /// The shifted path loss `l_a`: equal to `l(0)` within `a*sqrt(d)/2` and
    /// `l(r - a*sqrt(d)/2)` beyond.
    #[inline]
    pub fn shifted_value(&self, a: f64, d: usize, r: f64) -> f64 {
        let shift = a * (d as f64).sqrt() / 2.0;
        if r < shift {
            self.cap()
        } else {
            self.value(r - shift)
        }
    }

    pub fn shifted_eval(&self, a: f64, d: usize, r: f64) -> Result<f64> {
        if !(a >= 0.0) || !(r >= 0.0) {
            return Err(Error::InvalidParameter(format!("shift {a} and radius {r} must be >= 0")));
        }
        Ok(self.shifted_value(a, d, r))
    }

    /// Whether `int_{R^d} l(|x|) dx` is finite.
    pub fn integrable(&self, d: usize) -> bool {
        match self {
            PathLoss::TruncatedPower { exponent, .. } => *exponent > d as f64,
            PathLoss::CompactPower { .. } => true,
        }
    }

    /// `int_{R^d} l(|x|) dx` in closed form (infinite when not integrable).
    pub fn integral(&self, d: usize) -> f64 {
        if !self.integrable(d) {
            return f64::INFINITY;
        }
        let surface = match d {
            2 => 2.0 * std::f64::consts::PI,
            3 => 4.0 * std::f64::consts::PI,
            _ => 2.0,
        };
        let df = d as f64;
        let a = self.exponent();
        let v0 = self.plateau_end();
        let cap = self.cap();
        let end = self.support_end().unwrap_or(f64::INFINITY);
        if end <= v0 {
            return cap * surface * end.powf(df) / df;
        }
        let plateau = cap * surface * v0.powf(df) / df;
        // int_{v0}^{end} r^{d-1-a} dr
        let k = df - a;
        let tail = if end.is_infinite() {
            -v0.powf(k) / k
        } else if k.abs() < 1e-15 {
            (end / v0).ln()
        } else {
            (end.powf(k) - v0.powf(k)) / k
        };
        plateau + surface * tail
    }
}

/// SINR parameters: noise `N0`, threshold `tau`, interference factor `gamma`.
/// Transmit power is fixed to one.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SinrParams {
    pub noise: f64,
    pub tau: f64,
    pub gamma: f64,
}

impl SinrParams {
    pub fn new(noise: f64, tau: f64, gamma: f64) -> Result<Self> {
        let p = SinrParams { noise, tau, gamma };
        p.check()?;
        Ok(p)
    }

    pub fn check(&self) -> Result<()> {
        if !(self.noise >= 0.0) || !self.noise.is_finite() {
            return Err(Error::InvalidParameter(format!("noise {} must be >= 0", self.noise)));
        }
        if !(self.tau > 0.0) || !self.tau.is_finite() {
            return Err(Error::InvalidParameter(format!("tau {} must be > 0", self.tau)));
        }
        if !(self.gamma >= 0.0) || !self.gamma.is_finite() {
            return Err(Error::InvalidParameter(format!("gamma {} must be >= 0", self.gamma)));
        }
        if self.gamma == 0.0 && self.noise == 0.0 {
            return Err(Error::InvalidParameter(
                "gamma = N0 = 0 is degenerate".into(),
            ));
        }
        Ok(())
    }

    pub fn with_gamma(&self, gamma: f64) -> Self {
        SinrParams { gamma, ..*self }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", content = "detail", rename_all = "snake_case")]
pub enum Status {
    Pass,
    Warn(String),
    Fail(String),
}

impl Status {
    pub fn is_pass(&self) -> bool {
        matches!(self, Status::Pass)
    }

    pub fn label(&self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Warn(_) => "WARN",
            Status::Fail(_) => "FAIL",
        }
    }
}

/// Outcome of checking the standing assumptions on the path loss. Nothing
/// here is fatal; callers record it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    /// Continuous, constant up to the plateau end, strictly decreasing after.
    pub shape: Status,
    /// `1 >= l(0) > tau * N0`.
    pub cap_vs_noise: Status,
    /// `int l(|x|) dx < infinity`.
    pub integrability: Status,
}

impl ValidationReport {
    pub fn all_pass(&self) -> bool {
        self.shape.is_pass() && self.cap_vs_noise.is_pass() && self.integrability.is_pass()
    }

    pub fn lines(&self) -> Vec<String> {
        let fmt = |name: &str, s: &Status| match s {
            Status::Pass => format!("{name}: PASS"),
            Status::Warn(m) => format!("{name}: WARN ({m})"),
            Status::Fail(m) => format!("{name}: FAIL ({m})"),
        };
        vec![
            fmt("shape", &self.shape),
            fmt("cap_vs_noise", &self.cap_vs_noise),
            fmt("integrability", &self.integrability),
        ]
    }
}

pub fn validate(l: &PathLoss, p: &SinrParams, d: usize) -> ValidationReport {
    let shape = match *l {
        PathLoss::TruncatedPower { .. } => Status::Pass,
        PathLoss::CompactPower { cutoff, .. } => {
            if l.value(cutoff * (1.0 - 1e-12)) > 0.0 {
                Status::Warn(format!("jumps to zero at cutoff {cutoff}"))
            } else {
                Status::Pass
            }
        }
    };
    let cap = l.cap();
    let t = p.tau * p.noise;
    let cap_vs_noise = if !(cap > t) {
        Status::Fail(format!("l(0) = {cap} does not exceed tau*N0 = {t}"))
    } else if cap > 1.0 {
        Status::Warn(format!("l(0) = {cap} exceeds 1 (l(0) > tau*N0 holds)"))
    } else {
        Status::Pass
    };
    let integrability = if l.integrable(d) {
        Status::Pass
    } else {
        Status::Fail(format!(
            "exponent {} <= dimension {d}: tail not integrable",
            l.exponent()
        ))
    };
    ValidationReport {
        shape,
        cap_vs_noise,
        integrability,
    }
}

/// The SNR radius `r_B = l^{-1}(tau N0)`: links at distance `< r_B` pass the
/// noise-only test.
pub fn snr_radius(l: &PathLoss, p: &SinrParams) -> Result<f64> {
    if p.noise == 0.0 {
        return Err(Error::UndefinedRadius);
    }
    let t = p.tau * p.noise;
    let cap = l.cap();
    if !(t < cap) {
        return Err(Error::NoSolution { threshold: t, cap });
    }
    let r = t.powf(-1.0 / l.exponent());
    Ok(match l.support_end() {
        Some(end) if r > end => end,
        _ => r,
    })
}

/// Right-hand side of the lattice-sum bound for `l_{6n}`. Terms are added
/// until a closed-form bound on the remaining tail falls below `rel_tol`
/// times the partial sum (or after `2^20` rings); the tail bound is then
/// added, so the result never underestimates the series.
pub fn k0_bound_with_tol(l: &PathLoss, d: usize, rel_tol: f64) -> Result<f64> {
    if !l.integrable(d) {
        return Err(Error::Divergent(d));
    }
    let di = d as i32;
    let df = d as f64;
    let a = l.exponent();
    let ring = |i: f64| (2.0 * i + 2.0).powi(di) - (2.0 * i).powi(di);
    let shift = 6.0 * df.sqrt() / 2.0;
    let m = shift.ceil() as u64;
    let mut sum = 2f64.powi(di);
    for i in 0..=m {
        sum += l.cap() * ring(i as f64);
    }
    let mut i = m;
    loop {
        let term = ring(i as f64) * l.value(i as f64 - shift);
        sum += term;
        if term == 0.0 && l.support_end().is_some() {
            return Ok(sum);
        }
        let u = i as f64 - shift;
        if u > 0.0 && u >= l.plateau_end() {
            // for j > i: ring(j) <= d 2^d (j+1)^(d-1), (j+1)/(j-shift) <= (i+1)/u,
            // and the sum of (j-shift)^(d-1-a) is below its integral from u
            let tail = df * 2f64.powi(di) * ((i as f64 + 1.0) / u).powi(di - 1) * u.powf(df - a) / (a - df);
            if tail < rel_tol * sum || i >= 1 << 20 {
                return Ok(sum + tail);
            }
        }
        i += 1;
    }
}

pub fn k0_bound(l: &PathLoss, d: usize) -> Result<f64> {
    k0_bound_with_tol(l, d, 1e-12)
}
