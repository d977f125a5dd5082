//! Lindblad master equation and gate schedules.
//!
//! ```text
//! ρ̇ = −i[H(t), ρ] + Σ_k (L_k ρ L_k† − ½{L_k†L_k, ρ})
//! ```
//!
//! is integrated with fixed-step fourth-order Runge–Kutta. `H(t)` is a sum of
//! constant sparse operators times scalar coefficient functions; the jump
//! operators are constant. The right-hand side is evaluated through the
//! effective non-Hermitian Hamiltonian `H − (i/2)Σ L†L`, so one sparse-dense
//! product per call suffices for Hermitian inputs.

use std::sync::Arc;
use std::time::{Duration, Instant};

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::model::System;
use crate::operators::{Operator, SparseOperator, I, ZERO};
use crate::pulses::{inject_systematic_error, PulseSet};

/// Scalar coefficient of a Hamiltonian term.
pub type Coefficient = Arc<dyn Fn(f64) -> C64 + Send + Sync>;

#[derive(Clone)]
struct Term {
    op: SparseOperator,
    coeff: Option<Coefficient>,
}

/// `H(t) = Σ_k c_k(t) O_k`; terms without a coefficient are constant.
#[derive(Clone)]
pub struct TimeDependentHamiltonian {
    dim: usize,
    terms: Vec<Term>,
}

impl TimeDependentHamiltonian {
    pub fn new(dim: usize) -> Self {
        Self { dim, terms: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn check(&self, op: &Operator) -> Result<()> {
        if op.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: op.dim() });
        }
        Ok(())
    }

    pub fn add_constant(&mut self, op: &Operator) -> Result<()> {
        self.check(op)?;
        let s = SparseOperator::from_dense(op, 0.0);
        if s.nnz() > 0 {
            self.terms.push(Term { op: s, coeff: None });
        }
        Ok(())
    }

    pub fn add(&mut self, op: &Operator, coeff: Coefficient) -> Result<()> {
        self.check(op)?;
        let s = SparseOperator::from_dense(op, 0.0);
        if s.nnz() > 0 {
            self.terms.push(Term { op: s, coeff: Some(coeff) });
        }
        Ok(())
    }

    /// Adds `c(t)·O + c(t)*·O†`.
    pub fn add_with_hc(&mut self, op: &Operator, coeff: Coefficient) -> Result<()> {
        let c2 = coeff.clone();
        self.add(op, coeff)?;
        self.add(&op.dagger(), Arc::new(move |t| c2(t).conj()))
    }

    /// Dense `H(t)`.
    pub fn at(&self, t: f64) -> Operator {
        let mut h = Operator::zeros(self.dim);
        for term in &self.terms {
            let c = term.coeff.as_ref().map_or(C64::from(1.0), |f| f(t));
            for &(i, j, z) in &term.op.entries {
                h.set(i, j, h.get(i, j) + c * z);
            }
        }
        h
    }

    /// Largest Rabi frequency `2|H_ij|` (i ≠ j) and largest `|H_ii|`, sampled on `[0, t_total]`.
    pub fn rate_bounds(&self, t_total: f64) -> (f64, f64) {
        let (mut w, mut d) = (0.0f64, 0.0f64);
        let n = 256;
        for k in 0..=n {
            let h = self.at(t_total * k as f64 / n as f64);
            for i in 0..self.dim {
                for j in 0..self.dim {
                    let z = h.get(i, j).norm();
                    if i == j {
                        d = d.max(z);
                    } else {
                        w = w.max(2.0 * z);
                    }
                }
            }
        }
        (w, d)
    }
}

/// Step-size rule `dt = min(coupling/Ω_max, diagonal/Δ_max)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DtRule {
    pub coupling: f64,
    pub diagonal: f64,
}

impl Default for DtRule {
    fn default() -> Self {
        Self { coupling: 0.02, diagonal: 0.05 }
    }
}

impl DtRule {
    pub fn dt(&self, h: &TimeDependentHamiltonian, t_total: f64) -> f64 {
        let (w, d) = h.rate_bounds(t_total);
        let a = if w > 0.0 { self.coupling / w } else { f64::INFINITY };
        let b = if d > 0.0 { self.diagonal / d } else { f64::INFINITY };
        let dt = a.min(b);
        if dt.is_finite() {
            dt.min(t_total)
        } else {
            t_total / 100.0
        }
    }
}

/// Compiled right-hand side in CSR form.
struct Kernel {
    n: usize,
    row_ptr: Vec<usize>,
    col: Vec<usize>,
    base: Vec<C64>,
    timed: Vec<(Coefficient, Vec<(usize, C64)>)>,
    jumps: Vec<Vec<(usize, usize, C64)>>,
}

impl Kernel {
    fn new(h: &TimeDependentHamiltonian, jumps: &[Operator]) -> Result<Self> {
        let n = h.dim;
        let mut k_op = Operator::zeros(n);
        let mut jl = Vec::new();
        for l in jumps {
            if l.dim() != n {
                return Err(Error::DimensionMismatch { expected: n, got: l.dim() });
            }
            k_op += &l.dagger().dot(l);
            let s = SparseOperator::from_dense(l, 0.0);
            if s.nnz() > 0 {
                jl.push(s.entries);
            }
        }
        let anti = SparseOperator::from_dense(&k_op.scale(C64::new(0.0, -0.5)), 0.0);

        let mut pattern: Vec<(usize, usize)> = h
            .terms
            .iter()
            .flat_map(|t| t.op.entries.iter().map(|&(i, j, _)| (i, j)))
            .chain(anti.entries.iter().map(|&(i, j, _)| (i, j)))
            .collect();
        pattern.sort_unstable();
        pattern.dedup();
        let slot = |i: usize, j: usize| pattern.binary_search(&(i, j)).expect("entry in pattern");

        let mut base = vec![ZERO; pattern.len()];
        let mut timed = Vec::new();
        for term in &h.terms {
            match &term.coeff {
                None => {
                    for &(i, j, z) in &term.op.entries {
                        base[slot(i, j)] += z;
                    }
                }
                Some(c) => {
                    let e = term.op.entries.iter().map(|&(i, j, z)| (slot(i, j), z)).collect();
                    timed.push((c.clone(), e));
                }
            }
        }
        for &(i, j, z) in &anti.entries {
            base[slot(i, j)] += z;
        }
        let mut row_ptr = vec![0; n + 1];
        for &(i, _) in &pattern {
            row_ptr[i + 1] += 1;
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        let col = pattern.iter().map(|&(_, j)| j).collect();
        Ok(Self { n, row_ptr, col, base, timed, jumps: jl })
    }

    fn values(&self, t: f64, out: &mut [C64]) {
        out.copy_from_slice(&self.base);
        for (c, entries) in &self.timed {
            let z = c(t);
            if z == ZERO {
                continue;
            }
            for &(s, v) in entries {
                out[s] += z * v;
            }
        }
    }

    /// `out = H_nh · x`.
    fn apply(&self, vals: &[C64], x: &[C64], out: &mut [C64]) {
        let n = self.n;
        out.fill(ZERO);
        for i in 0..n {
            let dst = &mut out[i * n..(i + 1) * n];
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                let h = vals[k];
                let src = &x[self.col[k] * n..(self.col[k] + 1) * n];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += h * s;
                }
            }
        }
    }

    fn rhs(&self, vals: &[C64], rho: &[C64], out: &mut [C64], s1: &mut [C64], s2: &mut [C64], hermitian: bool) {
        let n = self.n;
        self.apply(vals, rho, s1);
        if hermitian {
            for i in 0..n {
                for j in 0..n {
                    out[i * n + j] = -I * (s1[i * n + j] - s1[j * n + i].conj());
                }
            }
        } else {
            // ρ H_nh† = (H_nh ρ†)†
            for i in 0..n {
                for j in 0..n {
                    s2[i * n + j] = rho[j * n + i].conj();
                }
            }
            let mut tmp = vec![ZERO; n * n];
            self.apply(vals, s2, &mut tmp);
            for i in 0..n {
                for j in 0..n {
                    out[i * n + j] = -I * (s1[i * n + j] - tmp[j * n + i].conj());
                }
            }
        }
        for l in &self.jumps {
            for &(a, i, v) in l {
                for &(b, j, w) in l {
                    out[a * n + b] += v * rho[i * n + j] * w.conj();
                }
            }
        }
    }
}

fn trace(x: &[C64], n: usize) -> C64 {
    (0..n).map(|i| x[i * n + i]).sum()
}

/// Integration statistics.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct EvolveStats {
    pub steps: usize,
    pub dt: f64,
    pub max_trace_drift: f64,
}

/// Propagates every operator in `states` over `[0, t_total]` in place.
///
/// `on_sample(t, states)` is called at up to `samples` uniformly spaced times,
/// including both ends. Fails when the trace of any operator drifts by more
/// than `1e-5` or becomes non-finite.
pub fn evolve_batch(
    states: &mut [Operator],
    h: &TimeDependentHamiltonian,
    jumps: &[Operator],
    t_total: f64,
    dt: f64,
    samples: usize,
    mut on_sample: impl FnMut(f64, &[Operator]),
) -> Result<EvolveStats> {
    if dt.is_nan() || dt <= 0.0 || t_total.is_nan() || t_total < 0.0 {
        return invalid(format!("need dt > 0 and T ≥ 0, got dt = {dt}, T = {t_total}"));
    }
    let n = h.dim;
    for s in states.iter() {
        if s.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, got: s.dim() });
        }
    }
    let kernel = Kernel::new(h, jumps)?;
    let full = (t_total / dt).floor() as usize;
    let rem = t_total - full as f64 * dt;
    let steps = if rem > 1e-12 * t_total.max(1e-300) { full + 1 } else { full };
    let stride = if samples > 1 { steps.div_ceil(samples - 1).max(1) } else { usize::MAX };

    let hermitian: Vec<bool> = states
        .iter()
        .map(|s| s.is_hermitian(1e-13 * s.max_abs().max(1.0)))
        .collect();
    let tr0: Vec<C64> = states.iter().map(|s| s.trace()).collect();

    let m = kernel.base.len();
    let (mut v0, mut v1, mut v2) = (vec![ZERO; m], vec![ZERO; m], vec![ZERO; m]);
    let nn = n * n;
    let mut k = vec![vec![ZERO; nn]; 4];
    let mut y = vec![ZERO; nn];
    let mut s1 = vec![ZERO; nn];
    let mut s2 = vec![ZERO; nn];
    let mut max_drift: f64 = 0.0;

    if samples > 0 {
        on_sample(0.0, states);
    }
    let mut t = 0.0;
    for step in 0..steps {
        let h_step = if step == full { rem } else { dt };
        kernel.values(t, &mut v0);
        kernel.values(t + 0.5 * h_step, &mut v1);
        kernel.values(t + h_step, &mut v2);
        for (st, &herm) in states.iter_mut().zip(&hermitian) {
            let rho = st.as_slice_mut();
            kernel.rhs(&v0, rho, &mut k[0], &mut s1, &mut s2, herm);
            for q in 0..nn {
                y[q] = rho[q] + 0.5 * h_step * k[0][q];
            }
            kernel.rhs(&v1, &y, &mut k[1], &mut s1, &mut s2, herm);
            for q in 0..nn {
                y[q] = rho[q] + 0.5 * h_step * k[1][q];
            }
            kernel.rhs(&v1, &y, &mut k[2], &mut s1, &mut s2, herm);
            for q in 0..nn {
                y[q] = rho[q] + h_step * k[2][q];
            }
            kernel.rhs(&v2, &y, &mut k[3], &mut s1, &mut s2, herm);
            let w = h_step / 6.0;
            for q in 0..nn {
                rho[q] += w * (k[0][q] + 2.0 * (k[1][q] + k[2][q]) + k[3][q]);
            }
        }
        t += h_step;
        if step % 64 == 63 || step + 1 == steps {
            for (st, t0) in states.iter().zip(&tr0) {
                let d = (trace(st.as_slice(), n) - t0).norm();
                if !d.is_finite() || d > 1e-5 {
                    return Err(Error::Integration {
                        t,
                        reason: format!("trace drifted by {d:e}; reduce dt (currently {dt:e})"),
                    });
                }
                max_drift = max_drift.max(d);
            }
        }
        if samples > 0 && ((step + 1) % stride == 0 || step + 1 == steps) {
            on_sample(t, states);
        }
    }
    Ok(EvolveStats { steps, dt, max_trace_drift: max_drift })
}

/// Final state plus populations sampled along the way.
#[derive(Clone, Debug)]
pub struct EvolutionResult {
    pub final_state: Operator,
    /// `(t, diagonal of ρ(t))`, at most 2000 samples.
    pub samples: Vec<(f64, Vec<f64>)>,
    pub stats: EvolveStats,
    pub wall_time: Duration,
}

/// Integrates the master equation from `rho0` over `[0, t_total]` with step `dt`.
pub fn evolve_master(
    rho0: &Operator,
    h: &TimeDependentHamiltonian,
    jumps: &[Operator],
    t_total: f64,
    dt: f64,
) -> Result<EvolutionResult> {
    let start = Instant::now();
    let mut st = [rho0.clone()];
    let mut samples = Vec::new();
    let stats = evolve_batch(&mut st, h, jumps, t_total, dt, 2000, |t, s| {
        samples.push((t, (0..s[0].dim()).map(|i| s[0].get(i, i).re).collect()));
    })?;
    let [final_state] = st;
    Ok(EvolutionResult { final_state, samples, stats, wall_time: start.elapsed() })
}

/// A laser acting during a segment.
#[derive(Clone, Debug)]
pub enum Drive {
    /// `½E(t)|b⟩⟨r| + h.c.` on control atom `atom`, `|b⟩ = sin(θ/2)e^{iφ}|0⟩ + cos(θ/2)|1⟩`.
    Control { atom: usize, pulse: PulseSet, theta: f64, phi: f64 },
    /// Ensemble lasers with effective envelope `E(t)` and bright-state angles `(ϑ, φ)`.
    Ensemble { pulse: PulseSet, vartheta: f64, phi: f64 },
}

impl Drive {
    pub fn control(atom: usize, pulse: PulseSet, theta: f64, phi: f64) -> Self {
        Self::Control { atom, pulse, theta, phi }
    }

    pub fn ensemble(pulse: PulseSet, vartheta: f64, phi: f64) -> Self {
        Self::Ensemble { pulse, vartheta, phi }
    }
}

/// A time slice during which a fixed set of drives is on.
#[derive(Clone, Debug)]
pub struct Segment {
    pub label: String,
    pub duration: f64,
    pub drives: Vec<Drive>,
}

impl Segment {
    pub fn new(label: &str, duration: f64, drives: Vec<Drive>) -> Self {
        Self { label: label.into(), duration, drives }
    }
}

/// Systematic amplitude errors `Ω → (1 + ε)Ω` of the control and target lasers.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ErrorModel {
    pub epsilon_control: f64,
    pub epsilon_target: f64,
}

impl ErrorModel {
    pub fn uniform(eps: f64) -> Self {
        Self { epsilon_control: eps, epsilon_target: eps }
    }
}

/// Ordered segments on a physical system.
#[derive(Clone, Debug)]
pub struct GateSchedule {
    pub system: System,
    pub segments: Vec<Segment>,
    pub error: ErrorModel,
    /// Fixed step; `None` applies `dt_rule` per segment.
    pub dt: Option<f64>,
    pub dt_rule: DtRule,
}

impl GateSchedule {
    pub fn new(system: System, segments: Vec<Segment>) -> Self {
        Self { system, segments, error: ErrorModel::default(), dt: None, dt_rule: DtRule::default() }
    }

    pub fn with_error(mut self, error: ErrorModel) -> Self {
        self.error = error;
        self
    }

    pub fn duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }

    /// Hamiltonian of one segment, in segment-local time.
    pub fn segment_hamiltonian(&self, seg: &Segment) -> Result<TimeDependentHamiltonian> {
        self.segment_hamiltonian_with(seg, &self.system.static_hamiltonian()?)
    }

    fn segment_hamiltonian_with(&self, seg: &Segment, stat: &Operator) -> Result<TimeDependentHamiltonian> {
        let dim = self.system.dim()?;
        let mut h = TimeDependentHamiltonian::new(dim);
        h.add_constant(stat)?;
        for d in &seg.drives {
            match d {
                Drive::Control { atom, pulse, theta, phi } => {
                    if *atom >= self.system.controls.len() {
                        return invalid(format!("no control atom {atom}"));
                    }
                    let p = inject_systematic_error(pulse, self.error.epsilon_control);
                    let x = self.system.control_drive_operator(*atom, *theta, *phi)?;
                    h.add_with_hc(&x, Arc::new(move |t| 0.5 * p.envelope(t)))?;
                }
                Drive::Ensemble { pulse, vartheta, phi } => {
                    let p = inject_systematic_error(pulse, self.error.epsilon_target);
                    let ops = self.system.ensemble_drive_operators(*vartheta, *phi)?;
                    let g = ops.coupling_scale;
                    let pc = p.clone();
                    h.add_with_hc(&ops.coupling, Arc::new(move |t| g * pc.envelope(t)))?;
                    h.add_constant(&ops.constant)?;
                    if let Some((op, f)) = ops.stark {
                        h.add(&op, Arc::new(move |t| C64::from(f * p.envelope(t).norm_sqr())))?;
                    }
                }
            }
        }
        Ok(h)
    }

    /// Propagates `ops` through every segment in place.
    pub fn propagate(&self, ops: &mut [Operator]) -> Result<EvolveStats> {
        let stat = self.system.static_hamiltonian()?;
        let jumps = self.system.jumps()?;
        let mut total = EvolveStats::default();
        for seg in &self.segments {
            if seg.duration <= 0.0 {
                continue;
            }
            let h = self.segment_hamiltonian_with(seg, &stat)?;
            let dt = self.dt.unwrap_or_else(|| self.dt_rule.dt(&h, seg.duration));
            let threads = rayon::current_num_threads().max(1);
            let stats = if threads > 1 && ops.len() > 1 {
                let chunk = ops.len().div_ceil(threads);
                let parts: Vec<EvolveStats> = ops
                    .par_chunks_mut(chunk)
                    .map(|c| evolve_batch(c, &h, &jumps, seg.duration, dt, 0, |_, _| {}))
                    .collect::<Result<_>>()?;
                parts.into_iter().fold(EvolveStats::default(), |a, b| EvolveStats {
                    steps: b.steps,
                    dt: b.dt,
                    max_trace_drift: a.max_trace_drift.max(b.max_trace_drift),
                })
            } else {
                evolve_batch(ops, &h, &jumps, seg.duration, dt, 0, |_, _| {})?
            };
            total.steps += stats.steps;
            total.dt = if total.dt == 0.0 { stats.dt } else { total.dt.min(stats.dt) };
            total.max_trace_drift = total.max_trace_drift.max(stats.max_trace_drift);
        }
        Ok(total)
    }
}

/// Runs a schedule from `rho0`, sampling populations in every segment.
pub fn run_schedule(s: &GateSchedule, rho0: &Operator) -> Result<EvolutionResult> {
    let start = Instant::now();
    let stat = s.system.static_hamiltonian()?;
    let jumps = s.system.jumps()?;
    let total = s.duration();
    let mut st = [rho0.clone()];
    let mut samples: Vec<(f64, Vec<f64>)> = Vec::new();
    let mut stats = EvolveStats::default();
    let mut t0 = 0.0;
    for seg in &s.segments {
        if seg.duration <= 0.0 {
            continue;
        }
        let h = s.segment_hamiltonian_with(seg, &stat)?;
        let dt = s.dt.unwrap_or_else(|| s.dt_rule.dt(&h, seg.duration));
        let quota = ((2000.0 * seg.duration / total).floor() as usize).max(2);
        let st_stats = evolve_batch(&mut st, &h, &jumps, seg.duration, dt, quota, |t, x| {
            if samples.len() < 2000 {
                samples.push((t0 + t, (0..x[0].dim()).map(|i| x[0].get(i, i).re).collect()));
            }
        })?;
        stats.steps += st_stats.steps;
        stats.dt = if stats.dt == 0.0 { dt } else { stats.dt.min(dt) };
        stats.max_trace_drift = stats.max_trace_drift.max(st_stats.max_trace_drift);
        t0 += seg.duration;
    }
    let [final_state] = st;
    Ok(EvolutionResult { final_state, samples, stats, wall_time: start.elapsed() })
}
