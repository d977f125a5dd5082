//! Pulse envelopes: constant holonomic pulses, invariant-based pulses built
//! from a set of angle functions, and the zero-systematic-error-sensitivity
//! (ZSS) family.
//!
//! Every pulse is described by its complex envelope `E(t) = Ω_R − iΩ_I`, which
//! is the Rabi frequency (with phase) of a two-level transition `|b⟩ ↔ |e⟩`
//! driven by `½E|b⟩⟨e| + h.c.`. For the ensemble, `E` is the effective
//! two-photon Rabi frequency `Ω_eff e^{iφ_B}`; the laser amplitudes follow from
//! [`DriveGeometry`].

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64 as C64;

use crate::dynamics::{Drive, GateSchedule, Segment};
use crate::error::{invalid, Error, Result};
use crate::operators::{phase, Operator, StateVector, I};

/// Angle functions on the first half of the cycle, as functions of `Θ`:
/// `γ = g(Θ)`, `α = a(Θ)`, returning `(g, g′, a, a′)`.
pub type AngleFn = Arc<dyn Fn(f64) -> (f64, f64, f64, f64) + Send + Sync>;

/// Choice of `γ(Θ)` and `α(Θ)`; `α′ = −cos Θ · γ′` must hold.
#[derive(Clone)]
pub enum AngleFamily {
    /// `γ = 2Θ`, `α = −2 sin Θ`.
    Linear,
    /// `γ = n(2Θ − sin 2Θ)`, `α = −(4n/3) sin³Θ`.
    Zss { n: f64 },
    Custom(AngleFn),
}

impl fmt::Debug for AngleFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Linear => write!(f, "Linear"),
            Self::Zss { n } => write!(f, "Zss {{ n: {n} }}"),
            Self::Custom(_) => write!(f, "Custom"),
        }
    }
}

impl AngleFamily {
    fn eval(&self, th: f64) -> (f64, f64, f64, f64) {
        match self {
            Self::Linear => (2.0 * th, 2.0, -2.0 * th.sin(), -2.0 * th.cos()),
            Self::Zss { n } => {
                let s = th.sin();
                (
                    n * (2.0 * th - (2.0 * th).sin()),
                    4.0 * n * s * s,
                    -4.0 * n * s.powi(3) / 3.0,
                    -4.0 * n * s * s * th.cos(),
                )
            }
            Self::Custom(f) => f(th),
        }
    }
}

/// Angles and their time derivatives at one instant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Angles {
    pub theta: f64,
    pub theta_dot: f64,
    pub gamma: f64,
    pub gamma_dot: f64,
    pub alpha: f64,
    pub alpha_dot: f64,
}

/// Invariant-based pulse over one cycle `[0, τ]`.
///
/// `Θ` runs linearly from 0 through `theta_half` at `τ/2` (which must be `π`
/// for a valid cycle). On the second half `γ̇` and `α` change sign, so `γ`
/// returns to zero at `τ`; `second_half_scale` multiplies that return leg and
/// is 1 for a proper cycle.
#[derive(Clone, Debug)]
pub struct InvariantParams {
    pub tau: f64,
    pub mu: f64,
    pub family: AngleFamily,
    pub theta_half: f64,
    pub second_half_scale: f64,
}

impl InvariantParams {
    pub fn new(family: AngleFamily, tau: f64) -> Self {
        Self { tau, mu: 1.0, family, theta_half: PI, second_half_scale: 1.0 }
    }

    pub fn zss(n: f64, tau: f64) -> Self {
        Self::new(AngleFamily::Zss { n }, tau)
    }

    pub fn linear(tau: f64) -> Self {
        Self::new(AngleFamily::Linear, tau)
    }

    /// Solution angles at `t`.
    pub fn angles(&self, t: f64) -> Angles {
        let theta_dot = 2.0 * self.theta_half / self.tau;
        let theta = theta_dot * t;
        let (g, dg, a, da) = self.family.eval(theta);
        if t <= 0.5 * self.tau {
            Angles { theta, theta_dot, gamma: g, gamma_dot: dg * theta_dot, alpha: a, alpha_dot: da * theta_dot }
        } else {
            let s = self.second_half_scale;
            let (g_half, ..) = self.family.eval(self.theta_half);
            Angles {
                theta,
                theta_dot,
                gamma: g_half + s * (g_half - g),
                gamma_dot: -s * dg * theta_dot,
                alpha: -s * a,
                alpha_dot: -s * da * theta_dot,
            }
        }
    }

    fn check_boundaries(&self) -> Result<()> {
        let a0 = self.angles(0.0).theta;
        let ah = self.angles(0.5 * self.tau).theta;
        if a0.abs() > 1e-9 || (ah - PI).abs() > 1e-9 {
            return Err(Error::BoundaryViolation(format!(
                "need Θ(0) = 0 and Θ(τ/2) = π, got {a0} and {ah}"
            )));
        }
        Ok(())
    }

    /// Upper eigenvector `|φ₊⟩ = (cos(Θ/2)e^{−iα/2}, sin(Θ/2)e^{iα/2})` of the invariant.
    pub fn eigenvector(&self, t: f64) -> StateVector {
        let a = self.angles(t);
        StateVector::from_vec(vec![
            (a.theta / 2.0).cos() * phase(-a.alpha / 2.0),
            (a.theta / 2.0).sin() * phase(a.alpha / 2.0),
        ])
    }

    /// Dynamical invariant `(μ/2)[[cos Θ, e^{−iα} sin Θ], [e^{iα} sin Θ, −cos Θ]]`.
    pub fn invariant(&self, t: f64) -> Operator {
        let a = self.angles(t);
        let h = 0.5 * self.mu;
        let (c, s) = (a.theta.cos(), a.theta.sin());
        Operator::from_rows(&[
            vec![C64::from(h * c), h * s * phase(-a.alpha)],
            vec![h * s * phase(a.alpha), C64::from(-h * c)],
        ])
    }
}

/// Shape of a pulse envelope.
#[derive(Clone, Debug)]
pub enum PulseShape {
    /// `Ω e^{iφ}`.
    Constant { omega: f64, phase: f64 },
    /// Envelope reverse-engineered from invariant angles.
    Invariant(InvariantParams),
    /// `(2·area/T) sin²(πt/T) e^{iφ}`.
    SineSquared { area: f64, phase: f64 },
}

/// A pulse with its duration and modifiers.
#[derive(Clone, Debug)]
pub struct PulseSet {
    pub shape: PulseShape,
    pub duration: f64,
    /// Systematic amplitude factor `1 + ε`.
    pub scale: f64,
    /// Extra laser phase.
    pub phase_offset: f64,
    /// The envelope is evaluated at `t + time_offset`.
    pub time_offset: f64,
}

/// Maps an effective envelope onto the two ground-state lasers.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DriveGeometry {
    pub vartheta: f64,
    pub phi: f64,
    /// `Ω′/Ω_eff`; `2Δ/Ω_C` for the ladder, 1 when the envelope is already two-photon.
    pub gain: f64,
}

impl PulseSet {
    pub fn new(shape: PulseShape, duration: f64) -> Self {
        Self { shape, duration, scale: 1.0, phase_offset: 0.0, time_offset: 0.0 }
    }

    pub fn with_phase_offset(mut self, phi: f64) -> Self {
        self.phase_offset += phi;
        self
    }

    pub fn with_time_offset(mut self, t0: f64) -> Self {
        self.time_offset += t0;
        self
    }

    /// Complex envelope `E(t) = Ω_R − iΩ_I`.
    pub fn envelope(&self, t: f64) -> C64 {
        let t = t + self.time_offset;
        let raw = match &self.shape {
            PulseShape::Constant { omega, phase: ph } => omega * phase(*ph),
            PulseShape::Invariant(p) => {
                let a = p.angles(t);
                let (ca, sa) = (a.alpha.cos(), a.alpha.sin());
                let st = a.theta.sin();
                let wr = ca * st * a.gamma_dot - sa * a.theta_dot;
                let wi = sa * st * a.gamma_dot + ca * a.theta_dot;
                C64::new(wr, -wi)
            }
            PulseShape::SineSquared { area, phase: ph } => {
                let s = (PI * t / self.duration).sin();
                2.0 * area / self.duration * s * s * phase(*ph)
            }
        };
        raw * self.scale * phase(self.phase_offset)
    }

    pub fn omega_r(&self, t: f64) -> f64 {
        self.envelope(t).re
    }

    pub fn omega_i(&self, t: f64) -> f64 {
        -self.envelope(t).im
    }

    /// `Ω_eff = sqrt(Ω_R² + Ω_I²)`.
    pub fn omega_eff(&self, t: f64) -> f64 {
        self.envelope(t).norm()
    }

    /// `φ_B = arg(Ω_R − iΩ_I)`.
    pub fn phase(&self, t: f64) -> f64 {
        self.envelope(t).arg()
    }

    /// `(Ω_A, Ω_B, φ_A, φ_B)` at `t`.
    pub fn components(&self, t: f64, g: &DriveGeometry) -> (f64, f64, f64, f64) {
        let w = g.gain * self.omega_eff(t);
        let pb = self.phase(t);
        (w * (g.vartheta / 2.0).sin(), w * (g.vartheta / 2.0).cos(), pb + g.phi, pb)
    }

    /// Largest `|E(t)|` on `[0, duration]`.
    pub fn peak(&self) -> f64 {
        peak_modulus(|t| self.envelope(t), self.duration)
    }

    /// `∫|E| dt` over the pulse.
    pub fn area(&self) -> f64 {
        simpson(|t| C64::from(self.omega_eff(t)), 0.0, self.duration, 4000).re
    }
}

fn peak_modulus(f: impl Fn(f64) -> C64, duration: f64) -> f64 {
    let n = 4000;
    let h = duration / n as f64;
    let (mut best, mut tb) = (0.0, 0.0);
    for k in 0..=n {
        let t = k as f64 * h;
        let v = f(t).norm();
        if v > best {
            best = v;
            tb = t;
        }
    }
    // golden-section refinement around the best sample
    let (mut a, mut b) = ((tb - h).max(0.0), (tb + h).min(duration));
    let r = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..60 {
        let (x1, x2) = (b - r * (b - a), a + r * (b - a));
        if f(x1).norm() > f(x2).norm() {
            b = x2;
        } else {
            a = x1;
        }
    }
    best.max(f(0.5 * (a + b)).norm())
}

/// Composite Simpson rule with `n` (rounded up to even) intervals.
pub fn simpson(f: impl Fn(f64) -> C64, a: f64, b: f64, n: usize) -> C64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + k as f64 * h);
    }
    s * h / 3.0
}

/// Constant pulse of Rabi frequency `omega` with area `2π`; returns it with its duration `2π/Ω`.
pub fn nhqc_constant_pulse(omega: f64) -> Result<(PulseSet, f64)> {
    if omega <= 0.0 || !omega.is_finite() {
        return invalid(format!("Rabi frequency must be positive, got {omega}"));
    }
    let t = TAU / omega;
    Ok((PulseSet::new(PulseShape::Constant { omega, phase: 0.0 }, t), t))
}

/// Constant pulse of area `π` (a population transfer).
pub fn pi_pulse(omega: f64) -> Result<PulseSet> {
    let (mut p, t) = nhqc_constant_pulse(omega)?;
    p.duration = 0.5 * t;
    Ok(p)
}

/// Pulse `Ω_R`, `Ω_I` generated by the given invariant angles.
pub fn lr_pulse_from_angles(params: &InvariantParams) -> PulseSet {
    PulseSet::new(PulseShape::Invariant(params.clone()), params.tau)
}

/// ZSS pulse of cycle time `tau`.
pub fn zss_pulse(n: f64, tau: f64) -> Result<PulseSet> {
    if !(0.0..=10.0).contains(&n) || tau <= 0.0 {
        return invalid(format!("need 0 ≤ n ≤ 10 and τ > 0, got n = {n}, τ = {tau}"));
    }
    Ok(lr_pulse_from_angles(&InvariantParams::zss(n, tau)))
}

/// Cycle time at which the family's peak `|E|` equals `cap`.
///
/// Every family here is a function of `Θ = 2πt/τ` times `Θ̇`, so the peak
/// scales as `1/τ` and one measurement at `τ = 1` fixes it.
pub fn duration_for_cap(family: &AngleFamily, cap: f64) -> Result<f64> {
    if cap <= 0.0 {
        return invalid(format!("amplitude cap must be positive, got {cap}"));
    }
    let unit = lr_pulse_from_angles(&InvariantParams::new(family.clone(), 1.0));
    Ok(unit.peak() / cap)
}

/// Closed-form peak of the ZSS envelope, `(2π/τ) sqrt(1 + 16n²)`.
pub fn zss_peak(n: f64, tau: f64) -> f64 {
    TAU / tau * (1.0 + 16.0 * n * n).sqrt()
}

/// Rescales every amplitude by `1 + ε`.
pub fn inject_systematic_error(p: &PulseSet, eps: f64) -> PulseSet {
    let mut q = p.clone();
    q.scale *= 1.0 + eps;
    q
}

/// Second-order sensitivity `q_s = |∫₀^{τ/2} e^{−iγ} Θ̇ sin²Θ dt|²`.
pub fn qs_sensitivity(params: &InvariantParams) -> Result<f64> {
    params.check_boundaries()?;
    let z = simpson(
        |t| {
            let a = params.angles(t);
            (-I * a.gamma).exp() * a.theta_dot * a.theta.sin().powi(2)
        },
        0.0,
        0.5 * params.tau,
        8000,
    );
    Ok(z.norm_sqr())
}

/// Closed form of [`qs_sensitivity`] for the ZSS family, `sin²(nπ)/(4n²)`.
pub fn zss_qs(n: f64) -> f64 {
    if n.abs() < 1e-12 {
        PI * PI / 4.0
    } else {
        (n * PI).sin().powi(2) / (4.0 * n * n)
    }
}

/// Running dynamical phase `∫⟨φ₊|H|φ₊⟩ dt`.
#[derive(Clone, Debug)]
pub struct DynamicalPhase {
    pub total: f64,
    pub half: f64,
    /// `(t, accumulated phase)` samples.
    pub trace: Vec<(f64, f64)>,
}

/// `⟨φ₊|H|φ₊⟩ = ½ sin Θ (Ω_R cos α + Ω_I sin α)`.
fn phase_rate(pulse: &PulseSet, params: &InvariantParams, t: f64) -> f64 {
    let a = params.angles(t);
    0.5 * a.theta.sin() * (pulse.omega_r(t) * a.alpha.cos() + pulse.omega_i(t) * a.alpha.sin())
}

/// Dynamical phase accumulated by `|φ₊⟩` under `pulse`.
pub fn dynamical_phase(pulse: &PulseSet, params: &InvariantParams) -> Result<DynamicalPhase> {
    params.check_boundaries()?;
    let per_half = 2000;
    let half_t = 0.5 * params.tau;
    let h = half_t / per_half as f64;
    let mut trace = vec![(0.0, 0.0)];
    let mut acc = 0.0;
    for seg in 0..2 {
        let t0 = seg as f64 * half_t;
        // Simpson over consecutive pairs of intervals, staying inside one half
        for k in (0..per_half).step_by(2) {
            let (a, m, b) = (t0 + k as f64 * h, t0 + (k + 1) as f64 * h, t0 + (k + 2) as f64 * h);
            let fa = phase_rate(pulse, params, a);
            let fm = phase_rate(pulse, params, m);
            let fb = phase_rate(pulse, params, b.min(t0 + half_t));
            acc += (fa + 4.0 * fm + fb) * h / 3.0;
            trace.push((b, acc));
        }
    }
    let half = trace[per_half / 2].1;
    Ok(DynamicalPhase { total: acc, half, trace })
}

/// Outcome of the three cyclic-evolution conditions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConditionReport {
    /// `|⟨φ₊(0)|φ₊(τ)⟩|`, 1 for a cyclic evolution.
    pub cyclic_overlap: f64,
    /// Largest `‖Ṗ + i[H, P]‖_max` of the projector `P = |φ₊⟩⟨φ₊|`.
    pub von_neumann_residual: f64,
    /// Dynamical phase accumulated over the cycle.
    pub dynamical_phase: f64,
    pub cyclic: bool,
    pub follows: bool,
    pub phase_free: bool,
}

impl ConditionReport {
    pub fn passed(&self) -> bool {
        self.cyclic && self.follows && self.phase_free
    }
}

/// Checks cyclicity, von Neumann evolution of the eigenprojector and a
/// vanishing dynamical phase for `pulse` against the angles in `params`.
pub fn verify_nhqc_plus_conditions(pulse: &PulseSet, params: &InvariantParams) -> Result<ConditionReport> {
    params.check_boundaries()?;
    let v0 = params.eigenvector(0.0);
    let v1 = params.eigenvector(params.tau);
    let cyclic_overlap = v0.inner(&v1).norm();

    let mut residual: f64 = 0.0;
    let n = 2000;
    for k in 0..=n {
        let t = params.tau * k as f64 / n as f64;
        let a = params.angles(t);
        let e = pulse.envelope(t);
        let h = Operator::from_rows(&[vec![C64::from(0.0), 0.5 * e], vec![0.5 * e.conj(), C64::from(0.0)]]);
        let v = params.eigenvector(t);
        let p = Operator::projector(&v);
        let (c, s) = (a.theta.cos(), a.theta.sin());
        let off = 0.5 * (c * a.theta_dot - I * s * a.alpha_dot) * phase(-a.alpha);
        let dp = Operator::from_rows(&[
            vec![C64::from(-0.5 * s * a.theta_dot), off],
            vec![off.conj(), C64::from(0.5 * s * a.theta_dot)],
        ]);
        let r = &dp + &h.commutator(&p).scale(I);
        residual = residual.max(r.max_abs());
    }
    let dp = dynamical_phase(pulse, params)?.total;
    Ok(ConditionReport {
        cyclic_overlap,
        von_neumann_residual: residual,
        dynamical_phase: dp,
        cyclic: (cyclic_overlap - 1.0).abs() < 1e-9,
        follows: residual < 1e-6,
        phase_free: dp.abs() < 1e-6,
    })
}

/// Controlled gate built from ZSS pulses: the control atom runs the first half
/// of its cycle (`|1⟩ → |r⟩`), the ensemble runs a full cycle with bright-state
/// angles `(ϑ, φ)`, and the control atom finishes its cycle with an extra π
/// laser phase so `|1⟩` returns without a sign.
pub fn two_qubit_schedule(
    n: f64,
    tau_c: f64,
    tau_t: f64,
    vartheta: f64,
    phi: f64,
    system: crate::model::System,
) -> Result<GateSchedule> {
    let control = zss_pulse(n, tau_c)?;
    let target = zss_pulse(n, tau_t)?;
    Ok(controlled_schedule(control, target, vartheta, phi, system))
}

/// Control pulse split around a full target pulse.
pub fn controlled_schedule(
    control: PulseSet,
    target: PulseSet,
    vartheta: f64,
    phi: f64,
    system: crate::model::System,
) -> GateSchedule {
    let half = 0.5 * control.duration;
    let mut first = control.clone();
    first.duration = half;
    let second = control.with_time_offset(half).with_phase_offset(PI);
    let mut second = second;
    second.duration = half;
    let tt = target.duration;
    GateSchedule::new(
        system,
        vec![
            Segment::new("control excite", half, vec![Drive::control(0, first, 0.0, 0.0)]),
            Segment::new("target cycle", tt, vec![Drive::ensemble(target, vartheta, phi)]),
            Segment::new("control return", half, vec![Drive::control(0, second, 0.0, 0.0)]),
        ],
    )
}
