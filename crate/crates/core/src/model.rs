//! Hilbert spaces, Hamiltonians and dissipators for a single control atom and
//! a mesoscopic Rydberg ensemble.
//!
//! The control atom has levels `|0⟩, |1⟩, |r⟩` (plus an auxiliary `|R⟩` in the
//! dark-state variant). Each ensemble atom has a ground level `|a⟩`, two qubit
//! levels `|A⟩, |B⟩`, an intermediate `|p⟩` and a Rydberg level `|R⟩`. The
//! ensemble is truncated to at most one excitation out of `|a⟩`, which gives
//! `1 + 4N` states in the per-atom basis.
//!
//! With identical couplings the dynamics never leaves the subspace spanned by
//! the collective states and by the uniform mixture over the orthogonal
//! "which-atom" complement, so the ensemble can also be represented with a
//! fixed nine states whatever `N` is ([`Representation::Symmetric`]).

use std::collections::HashMap;
use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::operators::{kron_all, phase, Operator, StateVector, ONE, ZERO};

/// Ordered, labelled orthonormal basis.
#[derive(Clone, Debug, PartialEq)]
pub struct HilbertSpace {
    labels: Vec<String>,
    index: HashMap<String, usize>,
}

impl HilbertSpace {
    pub fn new(labels: Vec<String>) -> Self {
        let index = labels.iter().enumerate().map(|(k, l)| (l.clone(), k)).collect();
        Self { labels, index }
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.index.get(label).copied().ok_or_else(|| Error::UnknownLabel(label.into()))
    }

    pub fn ket(&self, label: &str) -> Result<StateVector> {
        Ok(StateVector::basis(self.dim(), self.index_of(label)?))
    }

    /// Tensor product; labels are joined with a comma.
    pub fn product(&self, other: &Self) -> Self {
        let labels = self
            .labels
            .iter()
            .flat_map(|a| other.labels.iter().map(move |b| format!("{a},{b}")))
            .collect();
        Self::new(labels)
    }
}

/// Levels of a control atom.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ControlLevel {
    Zero,
    One,
    Rydberg,
    /// Second Rydberg level used by the dark-state exchange variant.
    AuxRydberg,
}

impl ControlLevel {
    pub fn label(self) -> &'static str {
        match self {
            Self::Zero => "0",
            Self::One => "1",
            Self::Rydberg => "r",
            Self::AuxRydberg => "R",
        }
    }
}

/// `{|0⟩, |1⟩, |r⟩}` or `{|0⟩, |1⟩, |r⟩, |R⟩}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ControlSpace {
    pub aux_rydberg: bool,
}

impl ControlSpace {
    pub fn standard() -> Self {
        Self { aux_rydberg: false }
    }

    pub fn extended() -> Self {
        Self { aux_rydberg: true }
    }

    pub fn dim(&self) -> usize {
        if self.aux_rydberg {
            4
        } else {
            3
        }
    }

    pub fn levels(&self) -> Vec<ControlLevel> {
        let mut l = vec![ControlLevel::Zero, ControlLevel::One, ControlLevel::Rydberg];
        if self.aux_rydberg {
            l.push(ControlLevel::AuxRydberg);
        }
        l
    }

    pub fn index(&self, level: ControlLevel) -> Result<usize> {
        self.levels()
            .iter()
            .position(|&l| l == level)
            .ok_or_else(|| Error::UnknownLabel(level.label().into()))
    }

    pub fn ket(&self, level: ControlLevel) -> Result<StateVector> {
        Ok(StateVector::basis(self.dim(), self.index(level)?))
    }

    /// `|x⟩⟨y|`.
    pub fn unit(&self, x: ControlLevel, y: ControlLevel) -> Result<Operator> {
        Ok(Operator::unit(self.dim(), self.index(x)?, self.index(y)?))
    }

    pub fn hilbert_space(&self) -> HilbertSpace {
        HilbertSpace::new(self.levels().iter().map(|l| l.label().to_string()).collect())
    }
}

/// The control-atom basis `[|0⟩, |1⟩, |r⟩]`.
pub fn control_space() -> HilbertSpace {
    ControlSpace::standard().hilbert_space()
}

/// Singly excited levels of an ensemble atom.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Level {
    A,
    B,
    P,
    R,
    /// Second ensemble Rydberg level of the dark-state exchange variant.
    Rr,
}

impl Level {
    pub fn label(self) -> &'static str {
        match self {
            Self::A => "A",
            Self::B => "B",
            Self::P => "p",
            Self::R => "R",
            Self::Rr => "r",
        }
    }
}

/// How the ensemble is represented.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Representation {
    /// Every atom carries its own levels; `1 + L·N` states.
    PerAtom,
    /// Collective states plus one mixed "orthogonal" copy of each level;
    /// `1 + 2L` states (`1 + L` for a single atom). Exact only for identical
    /// couplings.
    Symmetric,
}

/// Single-excitation space of an `N`-atom ensemble.
#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleSpace {
    pub n_atoms: usize,
    pub levels: Vec<Level>,
    pub repr: Representation,
}

impl EnsembleSpace {
    pub fn new(n_atoms: usize, levels: Vec<Level>, repr: Representation) -> Result<Self> {
        if n_atoms == 0 {
            return invalid("ensemble needs at least one atom");
        }
        Ok(Self { n_atoms, levels, repr })
    }

    /// Ladder `A, B, p, R` in the per-atom basis.
    pub fn per_atom(n_atoms: usize) -> Result<Self> {
        Self::new(n_atoms, vec![Level::A, Level::B, Level::P, Level::R], Representation::PerAtom)
    }

    fn n_levels(&self) -> usize {
        self.levels.len()
    }

    fn has_perp(&self) -> bool {
        self.repr == Representation::Symmetric && self.n_atoms > 1
    }

    pub fn dim(&self) -> usize {
        let l = self.n_levels();
        match self.repr {
            Representation::PerAtom => 1 + l * self.n_atoms,
            Representation::Symmetric if self.has_perp() => 1 + 2 * l,
            Representation::Symmetric => 1 + l,
        }
    }

    fn level_index(&self, level: Level) -> Result<usize> {
        self.levels
            .iter()
            .position(|&l| l == level)
            .ok_or_else(|| Error::UnknownLabel(level.label().into()))
    }

    /// Index of `|x_l⟩` (per-atom basis only).
    pub fn atom_index(&self, level: Level, atom: usize) -> Result<usize> {
        if self.repr != Representation::PerAtom {
            return invalid("atom-resolved index needs the per-atom representation");
        }
        Ok(1 + self.level_index(level)? * self.n_atoms + atom)
    }

    fn sym_index(&self, level: Level) -> Result<usize> {
        Ok(1 + self.level_index(level)?)
    }

    fn perp_index(&self, level: Level) -> Result<usize> {
        Ok(1 + self.n_levels() + self.level_index(level)?)
    }

    pub fn hilbert_space(&self) -> HilbertSpace {
        let mut labels = vec!["a".to_string()];
        match self.repr {
            Representation::PerAtom => {
                for l in &self.levels {
                    for k in 0..self.n_atoms {
                        labels.push(format!("{}{}", l.label(), k + 1));
                    }
                }
            }
            Representation::Symmetric => {
                labels.extend(self.levels.iter().map(|l| l.label().to_string()));
                if self.has_perp() {
                    labels.extend(self.levels.iter().map(|l| format!("{}'", l.label())));
                }
            }
        }
        HilbertSpace::new(labels)
    }

    /// `|ā⟩`, every atom in the reservoir level.
    pub fn ground(&self) -> StateVector {
        StateVector::basis(self.dim(), 0)
    }

    /// `|x̄⟩ = N^{-1/2} Σ_l |x_l⟩`.
    pub fn collective_state(&self, level: Level) -> Result<StateVector> {
        self.collective(&[(level, ONE)])
    }

    /// `Σ_k c_k |x̄_k⟩` for collective levels `x_k`.
    pub fn collective(&self, amps: &[(Level, C64)]) -> Result<StateVector> {
        let mut v = StateVector::zeros(self.dim());
        for &(level, c) in amps {
            match self.repr {
                Representation::PerAtom => {
                    let w = c / (self.n_atoms as f64).sqrt();
                    for k in 0..self.n_atoms {
                        let i = self.atom_index(level, k)?;
                        v.set(i, v.get(i) + w);
                    }
                }
                Representation::Symmetric => {
                    let i = self.sym_index(level)?;
                    v.set(i, v.get(i) + c);
                }
            }
        }
        Ok(v)
    }

    /// `Σ_l Σ_{xy} c_xy |x_l⟩⟨y_l|`, the same single-atom operator on every atom.
    pub fn lift(&self, elements: &[(Level, Level, C64)]) -> Result<Operator> {
        let mut m = Operator::zeros(self.dim());
        for &(x, y, c) in elements {
            match self.repr {
                Representation::PerAtom => {
                    for k in 0..self.n_atoms {
                        let (i, j) = (self.atom_index(x, k)?, self.atom_index(y, k)?);
                        m.set(i, j, m.get(i, j) + c);
                    }
                }
                Representation::Symmetric => {
                    let (i, j) = (self.sym_index(x)?, self.sym_index(y)?);
                    m.set(i, j, m.get(i, j) + c);
                    if self.has_perp() {
                        let (i, j) = (self.perp_index(x)?, self.perp_index(y)?);
                        m.set(i, j, m.get(i, j) + c);
                    }
                }
            }
        }
        Ok(m)
    }

    /// `Σ_l w_l |x_l⟩⟨x_l|`. The symmetric representation needs uniform weights.
    pub fn weighted_projector(&self, level: Level, weights: &[f64]) -> Result<Operator> {
        if weights.len() != self.n_atoms {
            return Err(Error::DimensionMismatch { expected: self.n_atoms, got: weights.len() });
        }
        match self.repr {
            Representation::PerAtom => {
                let mut m = Operator::zeros(self.dim());
                for (k, &w) in weights.iter().enumerate() {
                    let i = self.atom_index(level, k)?;
                    m.set(i, i, C64::from(w));
                }
                Ok(m)
            }
            Representation::Symmetric => {
                let w = weights[0];
                if weights.iter().any(|&x| (x - w).abs() > 1e-12 * w.abs().max(1.0)) {
                    return invalid("non-uniform per-atom shifts need the per-atom representation");
                }
                Ok(&self.lift(&[(level, level, ONE)])? * w)
            }
        }
    }

    /// `|x̄⟩⟨x̄|`.
    pub fn collective_projector(&self, level: Level) -> Result<Operator> {
        Ok(Operator::projector(&self.collective_state(level)?))
    }

    /// Spontaneous decay of `from` into each of `into` (`None` is `|a⟩`), every
    /// channel with rate `rate`.
    pub fn decay_operators(&self, from: Level, into: &[Option<Level>], rate: f64) -> Result<Vec<Operator>> {
        let mut out = Vec::new();
        if rate <= 0.0 {
            return Ok(out);
        }
        let dim = self.dim();
        let n = self.n_atoms as f64;
        for &to in into {
            match self.repr {
                Representation::PerAtom => {
                    for k in 0..self.n_atoms {
                        let j = self.atom_index(from, k)?;
                        let i = match to {
                            Some(g) => self.atom_index(g, k)?,
                            None => 0,
                        };
                        out.push(&Operator::unit(dim, i, j) * rate.sqrt());
                    }
                }
                Representation::Symmetric => {
                    let mut sources = vec![self.sym_index(from)?];
                    if self.has_perp() {
                        sources.push(self.perp_index(from)?);
                    }
                    for &j in &sources {
                        match to {
                            None => out.push(&Operator::unit(dim, 0, j) * rate.sqrt()),
                            Some(g) => {
                                // a decayed atom lands in the collective state with weight 1/N
                                out.push(&Operator::unit(dim, self.sym_index(g)?, j) * (rate / n).sqrt());
                                if self.has_perp() {
                                    out.push(
                                        &Operator::unit(dim, self.perp_index(g)?, j) * (rate * (n - 1.0) / n).sqrt(),
                                    );
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(out)
    }
}

/// The per-atom ensemble basis `[ā, A_1..A_N, B_1..B_N, p_1..p_N, R_1..R_N]`.
pub fn ensemble_space(n_atoms: usize) -> Result<HilbertSpace> {
    Ok(EnsembleSpace::per_atom(n_atoms)?.hilbert_space())
}

/// Collective state `|x̄⟩` in the per-atom ladder basis.
pub fn collective_state(space: &EnsembleSpace, level: Level) -> Result<StateVector> {
    space.collective_state(level)
}

/// Drive parameters of the control atom.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ControlAtomParams {
    pub omega0: f64,
    pub omega1: f64,
    pub phi0: f64,
    pub phi1: f64,
    pub gamma_r: f64,
}

impl ControlAtomParams {
    /// `θ` with `tan(θ/2) = Ω₀/Ω₁`.
    pub fn theta(&self) -> f64 {
        2.0 * self.omega0.atan2(self.omega1)
    }

    /// Amplitudes with total Rabi frequency `omega`, mixing angle `theta`
    /// and relative phase `phi = φ₀ − φ₁`.
    pub fn from_angles(omega: f64, theta: f64, phi: f64, gamma_r: f64) -> Self {
        Self {
            omega0: omega * (theta / 2.0).sin(),
            omega1: omega * (theta / 2.0).cos(),
            phi0: phi,
            phi1: 0.0,
            gamma_r,
        }
    }
}

/// Instantaneous laser parameters and rates of the ensemble.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleParams {
    pub n_atoms: usize,
    pub omega_a: f64,
    pub omega_b: f64,
    pub omega_c: f64,
    pub phi_a: f64,
    pub phi_b: f64,
    /// One-photon detuning of the intermediate level.
    pub delta: f64,
    /// Two-photon detuning, zero outside the dispersive regime.
    pub delta_prime: f64,
    pub gamma_p: f64,
    /// Decay rate of the ensemble Rydberg level.
    pub gamma_rydberg: f64,
    pub gamma_phi: f64,
}

impl EnsembleParams {
    /// `Ω′ = sqrt(Ω_A² + Ω_B²)`.
    pub fn omega_prime(&self) -> f64 {
        self.omega_a.hypot(self.omega_b)
    }

    /// `ϑ` with `tan(ϑ/2) = Ω_A/Ω_B`.
    pub fn vartheta(&self) -> f64 {
        2.0 * self.omega_a.atan2(self.omega_b)
    }

    /// `φ = φ_A − φ_B`.
    pub fn phi(&self) -> f64 {
        self.phi_a - self.phi_b
    }

    /// Two-photon Rabi frequency `Ω′Ω_C/(2Δ)`.
    pub fn omega_eff(&self) -> f64 {
        self.omega_prime() * self.omega_c / (2.0 * self.delta)
    }
}

/// Couplings between the control atom and the ensemble.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InteractionParams {
    /// Blockade shift `V` of `|r⟩ ⊗ |R_l⟩`, one entry per atom.
    pub v: Vec<f64>,
    /// Exchange strength `V′` of the dark-state variant.
    pub v_prime: f64,
}

impl InteractionParams {
    pub fn uniform(n_atoms: usize, v: f64) -> Self {
        Self { v: vec![v; n_atoms], v_prime: 0.0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum InteractionKind {
    /// `V |r⟩⟨r| ⊗ Σ_l |R_l⟩⟨R_l|`.
    Blockade,
    /// `V′ |r⟩⟨R| ⊗ Σ_l |R_l⟩⟨r_l| + h.c.`
    DarkStateExchange,
}

/// Reference frame of the ensemble ladder.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Frame {
    /// Couplings carry `e^{iΔt}` and `e^{i(Δ+shift)t}`; no diagonal.
    PhaseRotating,
    /// Time-independent couplings; `−Δ` on `|p_l⟩` and `+shift` on `|R_l⟩`.
    DiagonalDetuning,
}

/// Control-atom Hamiltonian `½[Ω₀e^{iφ₀}|0⟩⟨r| + Ω₁e^{iφ₁}|1⟩⟨r|] + h.c.` on `[0, 1, r]`.
pub fn control_hamiltonian(p: &ControlAtomParams) -> Operator {
    let mut h = Operator::zeros(3);
    let c0 = 0.5 * p.omega0 * phase(p.phi0);
    let c1 = 0.5 * p.omega1 * phase(p.phi1);
    h.set(0, 2, c0);
    h.set(2, 0, c0.conj());
    h.set(1, 2, c1);
    h.set(2, 1, c1.conj());
    h
}

/// Single-atom operator elements `(x, y, c)` of the two-photon ladder couplings,
/// upper triangle only.
fn ladder_elements(p: &EnsembleParams, rot: f64, rot_r: f64) -> Vec<(Level, Level, C64)> {
    vec![
        (Level::A, Level::P, 0.5 * p.omega_a * phase(p.phi_a + rot)),
        (Level::B, Level::P, 0.5 * p.omega_b * phase(p.phi_b + rot)),
        (Level::R, Level::P, 0.5 * p.omega_c * phase(rot_r)),
    ]
}

fn with_hc(elements: Vec<(Level, Level, C64)>) -> Vec<(Level, Level, C64)> {
    let mut out = elements.clone();
    out.extend(elements.into_iter().map(|(x, y, c)| (y, x, c.conj())));
    out
}

/// Full ladder Hamiltonian of the ensemble on `space` at time `t`.
///
/// `blockade_shift` is the extra two-photon detuning of `|R_l⟩`: zero for a
/// free ensemble, `V` when the control atom sits in `|r⟩`, `Δ′` in the
/// dispersive regime.
pub fn ensemble_hamiltonian_on(
    space: &EnsembleSpace,
    p: &EnsembleParams,
    frame: Frame,
    blockade_shift: f64,
    t: f64,
) -> Result<Operator> {
    let h = match frame {
        Frame::PhaseRotating => {
            let el = ladder_elements(p, p.delta * t, (p.delta + blockade_shift) * t);
            space.lift(&with_hc(el))?
        }
        Frame::DiagonalDetuning => {
            let mut el = with_hc(ladder_elements(p, 0.0, 0.0));
            el.push((Level::P, Level::P, C64::from(-p.delta)));
            el.push((Level::R, Level::R, C64::from(blockade_shift)));
            space.lift(&el)?
        }
    };
    Ok(h)
}

/// Full ladder Hamiltonian in the per-atom basis of [`ensemble_space`].
pub fn ensemble_hamiltonian_full(p: &EnsembleParams, frame: Frame, blockade_shift: f64, t: f64) -> Result<Operator> {
    ensemble_hamiltonian_on(&EnsembleSpace::per_atom(p.n_atoms)?, p, frame, blockade_shift, t)
}

/// Second-order light shifts of the ladder, with opposite sign, so that adding
/// this operator cancels them: `−Ω′²/(4Δ) Σ|𝓑_l⟩⟨𝓑_l| − Ω_C²/(4Δ) Σ|R_l⟩⟨R_l|`.
pub fn stark_compensation(space: &EnsembleSpace, p: &EnsembleParams) -> Result<Operator> {
    let cb = 0.5 * p.omega_a * phase(p.phi_a);
    let cbb = 0.5 * p.omega_b * phase(p.phi_b);
    // |c⟩⟨c|/Δ with c = (Ω_A e^{iφ_A}|A⟩ + Ω_B e^{iφ_B}|B⟩)/2
    let k = -1.0 / p.delta;
    space.lift(&[
        (Level::A, Level::A, k * cb * cb.conj()),
        (Level::A, Level::B, k * cb * cbb.conj()),
        (Level::B, Level::A, k * cbb * cb.conj()),
        (Level::B, Level::B, k * cbb * cbb.conj()),
        (Level::R, Level::R, C64::from(-p.omega_c * p.omega_c / (4.0 * p.delta))),
    ])
}

/// Bright state `sin(ϑ/2)e^{iφ}|Ā⟩ + cos(ϑ/2)|B̄⟩`.
pub fn bright_state(space: &EnsembleSpace, vartheta: f64, phi: f64) -> Result<StateVector> {
    space.collective(&[
        (Level::A, (vartheta / 2.0).sin() * phase(phi)),
        (Level::B, C64::from((vartheta / 2.0).cos())),
    ])
}

/// Dark state `cos(ϑ/2)|Ā⟩ − sin(ϑ/2)e^{−iφ}|B̄⟩`.
pub fn dark_state(space: &EnsembleSpace, vartheta: f64, phi: f64) -> Result<StateVector> {
    space.collective(&[
        (Level::A, C64::from((vartheta / 2.0).cos())),
        (Level::B, -(vartheta / 2.0).sin() * phase(-phi)),
    ])
}

/// Basis `[Ā, B̄, R̄]` of the effective three-level ensemble.
pub fn effective_space() -> HilbertSpace {
    HilbertSpace::new(vec!["A".into(), "B".into(), "R".into()])
}

fn effective_bright(vartheta: f64, phi: f64) -> StateVector {
    StateVector::from_vec(vec![(vartheta / 2.0).sin() * phase(phi), C64::from((vartheta / 2.0).cos()), ZERO])
}

/// Effective ensemble Hamiltonian `(Ω′Ω_C e^{iφ_B}/4Δ)|𝓑̄⟩⟨R̄| + h.c.` on `[Ā, B̄, R̄]`.
pub fn ensemble_hamiltonian_effective(p: &EnsembleParams) -> Operator {
    let b = effective_bright(p.vartheta(), p.phi());
    let r = StateVector::basis(3, 2);
    let x = &Operator::outer(&b, &r) * (0.5 * p.omega_eff() * phase(p.phi_b));
    &x + &x.dagger()
}

/// Dispersive light shift `−Ω″²/(4Δ′) |𝓑̄⟩⟨𝓑̄|` on `[Ā, B̄, R̄]`, where
/// `Ω″` is the two-photon Rabi frequency.
pub fn dispersive_effective_hamiltonian(p: &EnsembleParams) -> Result<Operator> {
    let scale = p.omega_c / (2.0 * p.delta);
    let (wa, wb) = ((p.omega_a * scale).abs(), (p.omega_b * scale).abs());
    if p.delta_prime.abs() < 5.0 * wa.max(wb) {
        return invalid(format!(
            "dispersive regime needs |Δ′| ≥ 5·max(Ω′_A, Ω′_B); got Δ′ = {}, max = {}",
            p.delta_prime,
            wa.max(wb)
        ));
    }
    let w2 = p.omega_eff().powi(2);
    let b = effective_bright(p.vartheta(), p.phi());
    Ok(&Operator::projector(&b) * (-w2 / (4.0 * p.delta_prime)))
}

/// Control–ensemble coupling on `control ⊗ ensemble`.
pub fn interaction_hamiltonian(
    ip: &InteractionParams,
    kind: InteractionKind,
    control: &ControlSpace,
    ensemble: &EnsembleSpace,
) -> Result<Operator> {
    match kind {
        InteractionKind::Blockade => {
            let rr = control.unit(ControlLevel::Rydberg, ControlLevel::Rydberg)?;
            Ok(rr.kron(&ensemble.weighted_projector(Level::R, &ip.v)?))
        }
        InteractionKind::DarkStateExchange => {
            let c = control.unit(ControlLevel::Rydberg, ControlLevel::AuxRydberg)?;
            let e = ensemble.lift(&[(Level::R, Level::Rr, C64::from(ip.v_prime))])?;
            let x = c.kron(&e);
            Ok(&x + &x.dagger())
        }
    }
}

/// Jump operators acting on the control atom and on the ensemble.
#[derive(Clone, Debug, Default)]
pub struct JumpOperators {
    pub control: Vec<Operator>,
    pub ensemble: Vec<Operator>,
}

/// Control atom: `|r⟩ → |0⟩, |1⟩` at `γ_r/2` each.
pub fn control_decay(space: &ControlSpace, gamma_r: f64) -> Result<Vec<Operator>> {
    let mut out = Vec::new();
    if gamma_r <= 0.0 {
        return Ok(out);
    }
    let mut sources = vec![ControlLevel::Rydberg];
    if space.aux_rydberg {
        sources.push(ControlLevel::AuxRydberg);
    }
    for &e in &sources {
        for g in [ControlLevel::Zero, ControlLevel::One] {
            out.push(&space.unit(g, e)? * (gamma_r / 2.0).sqrt());
        }
    }
    Ok(out)
}

/// Ensemble: `|p_l⟩` and the Rydberg levels decay to `|A_l⟩, |B_l⟩, |a⟩` at a
/// third of their rate each; `γ_φ` dephases `|R̄⟩` through `sqrt(γ_φ)(I − 2|R̄⟩⟨R̄|)`.
pub fn ensemble_decay(space: &EnsembleSpace, gamma_p: f64, gamma_rydberg: f64, gamma_phi: f64) -> Result<Vec<Operator>> {
    let into = [Some(Level::A), Some(Level::B), None];
    let mut out = Vec::new();
    for &l in &space.levels {
        let rate = match l {
            Level::P => gamma_p,
            Level::R | Level::Rr => gamma_rydberg,
            _ => continue,
        };
        out.extend(space.decay_operators(l, &into, rate / 3.0)?);
    }
    if gamma_phi > 0.0 {
        let p = space.collective_projector(Level::R)?;
        let l = &Operator::identity(space.dim()) - &(&p * 2.0);
        out.push(&l * gamma_phi.sqrt());
    }
    Ok(out)
}

/// All jump operators for a control atom and the per-atom ladder ensemble.
pub fn lindblad_ops(cp: &ControlAtomParams, ep: &EnsembleParams, space: &EnsembleSpace) -> Result<JumpOperators> {
    Ok(JumpOperators {
        control: control_decay(&ControlSpace::standard(), cp.gamma_r)?,
        ensemble: ensemble_decay(space, ep.gamma_p, ep.gamma_rydberg, ep.gamma_phi)?,
    })
}

/// `U(θ, φ) = I − 2|b⟩⟨b|` with `|b⟩ = sin(θ/2)e^{iφ}|0⟩ + cos(θ/2)|1⟩`, i.e.
/// `[[cos θ, −sin θ e^{iφ}], [−sin θ e^{−iφ}, −cos θ]]`.
pub fn holonomic_gate(theta: f64, phi: f64) -> Operator {
    let b = StateVector::from_vec(vec![(theta / 2.0).sin() * phase(phi), C64::from((theta / 2.0).cos())]);
    &Operator::identity(2) - &(&Operator::projector(&b) * 2.0)
}

/// `|0⟩⟨0| ⊗ U + |1⟩⟨1| ⊗ I`: the target gate applies when the control is in `|0⟩`.
pub fn controlled_on_zero(u: &Operator) -> Operator {
    let p0 = Operator::unit(2, 0, 0);
    let p1 = Operator::unit(2, 1, 1);
    &p0.kron(u) + &p1.kron(&Operator::identity(u.dim()))
}

/// Gate angles of the named single-qubit gates.
pub fn named_gate(name: &str) -> Result<(f64, f64)> {
    match name {
        "not" | "x" => Ok((-PI / 2.0, 0.0)),
        "hadamard" | "h" => Ok((-PI / 4.0, 0.0)),
        "phase" | "z" => Ok((0.0, 0.0)),
        _ => invalid(format!("unknown gate '{name}' (expected not, hadamard or phase)")),
    }
}

/// How the two-photon ensemble transition is modelled.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum EnsembleCoupling {
    /// Explicit intermediate level detuned by `delta`, coupled to `|R⟩` by `omega_c`.
    Ladder { omega_c: f64, delta: f64, stark_compensation: bool },
    /// Intermediate level eliminated; `|𝓑⟩ ↔ |R⟩` directly, `|R⟩` detuned by `delta_prime`.
    Effective { delta_prime: f64 },
    /// Effective coupling plus a second Rydberg level exchanged with the control atom.
    DarkState,
}

/// Ensemble configuration inside a [`System`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ensemble {
    pub n_atoms: usize,
    pub repr: Representation,
    pub coupling: EnsembleCoupling,
    pub gamma_p: f64,
    pub gamma_rydberg: f64,
    pub gamma_phi: f64,
}

impl Ensemble {
    pub fn levels(&self) -> Vec<Level> {
        match self.coupling {
            EnsembleCoupling::Ladder { .. } => vec![Level::A, Level::B, Level::P, Level::R],
            EnsembleCoupling::Effective { .. } => vec![Level::A, Level::B, Level::R],
            EnsembleCoupling::DarkState => vec![Level::A, Level::B, Level::R, Level::Rr],
        }
    }

    pub fn space(&self) -> Result<EnsembleSpace> {
        EnsembleSpace::new(self.n_atoms, self.levels(), self.repr)
    }
}

/// Control atoms, optional ensemble and their mutual couplings, laid out as
/// `control_1 ⊗ … ⊗ control_k ⊗ ensemble`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct System {
    /// Decay rate of each control atom's Rydberg level(s).
    pub controls: Vec<f64>,
    /// Whether the control atoms carry the auxiliary Rydberg level.
    pub aux_rydberg: bool,
    pub ensemble: Option<Ensemble>,
    /// Blockade shift between each control atom and each ensemble atom.
    pub blockade: Vec<f64>,
    /// Blockade shift between control atoms in `|r⟩`.
    pub control_control: f64,
    /// Dark-state exchange strength `V′`.
    pub exchange: f64,
}

impl System {
    pub fn control_space(&self) -> ControlSpace {
        ControlSpace { aux_rydberg: self.aux_rydberg }
    }

    /// Dimensions of the tensor factors.
    pub fn dims(&self) -> Result<Vec<usize>> {
        let mut d: Vec<usize> = self.controls.iter().map(|_| self.control_space().dim()).collect();
        if let Some(e) = &self.ensemble {
            d.push(e.space()?.dim());
        }
        Ok(d)
    }

    pub fn dim(&self) -> Result<usize> {
        Ok(self.dims()?.iter().product())
    }

    pub fn ensemble_space(&self) -> Result<EnsembleSpace> {
        match &self.ensemble {
            Some(e) => e.space(),
            None => invalid("system has no ensemble"),
        }
    }

    pub fn hilbert_space(&self) -> Result<HilbertSpace> {
        let mut spaces: Vec<HilbertSpace> = self.controls.iter().map(|_| self.control_space().hilbert_space()).collect();
        if let Some(e) = &self.ensemble {
            spaces.push(e.space()?.hilbert_space());
        }
        let mut it = spaces.into_iter();
        let first = it.next().ok_or_else(|| Error::InvalidParameter("empty system".into()))?;
        Ok(it.fold(first, |acc, s| acc.product(&s)))
    }

    /// Lifts `op` on factor `k` to the whole system.
    pub fn embed(&self, k: usize, op: &Operator) -> Result<Operator> {
        let dims = self.dims()?;
        if op.dim() != dims[k] {
            return Err(Error::DimensionMismatch { expected: dims[k], got: op.dim() });
        }
        let ids: Vec<Operator> = dims.iter().map(|&d| Operator::identity(d)).collect();
        let factors: Vec<&Operator> = (0..dims.len()).map(|j| if j == k { op } else { &ids[j] }).collect();
        Ok(kron_all(&factors))
    }

    /// Lifts a product of per-factor operators.
    pub fn embed_product(&self, ops: &[(usize, Operator)]) -> Result<Operator> {
        let dims = self.dims()?;
        let mut factors: Vec<Operator> = dims.iter().map(|&d| Operator::identity(d)).collect();
        for (k, op) in ops {
            factors[*k] = op.clone();
        }
        let refs: Vec<&Operator> = factors.iter().collect();
        Ok(kron_all(&refs))
    }

    pub fn ensemble_factor(&self) -> usize {
        self.controls.len()
    }

    /// Product state from one vector per factor.
    pub fn product_state(&self, factors: &[StateVector]) -> StateVector {
        let mut it = factors.iter();
        let first = it.next().expect("at least one factor").clone();
        it.fold(first, |acc, f| acc.kron(f))
    }

    /// Time-independent part: detunings, blockade, exchange.
    pub fn static_hamiltonian(&self) -> Result<Operator> {
        let dim = self.dim()?;
        let mut h = Operator::zeros(dim);
        let cs = self.control_space();
        if let Some(e) = &self.ensemble {
            let es = e.space()?;
            let k = self.ensemble_factor();
            match e.coupling {
                EnsembleCoupling::Ladder { delta, .. } => {
                    h += &self.embed(k, &es.lift(&[(Level::P, Level::P, C64::from(-delta))])?)?;
                }
                EnsembleCoupling::Effective { delta_prime } => {
                    if delta_prime != 0.0 {
                        h += &self.embed(k, &es.lift(&[(Level::R, Level::R, C64::from(delta_prime))])?)?;
                    }
                }
                EnsembleCoupling::DarkState => {}
            }
            if self.blockade.len() != e.n_atoms {
                return Err(Error::DimensionMismatch { expected: e.n_atoms, got: self.blockade.len() });
            }
            let rr = cs.unit(ControlLevel::Rydberg, ControlLevel::Rydberg)?;
            if self.blockade.iter().any(|&v| v != 0.0) {
                let shift = es.weighted_projector(Level::R, &self.blockade)?;
                for c in 0..self.controls.len() {
                    h += &self.embed_product(&[(c, rr.clone()), (k, shift.clone())])?;
                }
            }
            if self.exchange != 0.0 {
                let x = cs.unit(ControlLevel::Rydberg, ControlLevel::AuxRydberg)?;
                let y = es.lift(&[(Level::R, Level::Rr, C64::from(self.exchange))])?;
                for c in 0..self.controls.len() {
                    let t = self.embed_product(&[(c, x.clone()), (k, y.clone())])?;
                    h += &(&t + &t.dagger());
                }
            }
        }
        if self.controls.len() > 1 && self.control_control != 0.0 {
            let rr = cs.unit(ControlLevel::Rydberg, ControlLevel::Rydberg)?;
            for a in 0..self.controls.len() {
                for b in a + 1..self.controls.len() {
                    h += &(&self.embed_product(&[(a, rr.clone()), (b, rr.clone())])? * self.control_control);
                }
            }
        }
        Ok(h)
    }

    /// `|b⟩⟨r|` on control `atom`, with `|b⟩ = sin(θ/2)e^{iφ}|0⟩ + cos(θ/2)|1⟩`.
    /// The drive is `(E(t)/2)·X + h.c.`.
    pub fn control_drive_operator(&self, atom: usize, theta: f64, phi: f64) -> Result<Operator> {
        let cs = self.control_space();
        let b = &cs.unit(ControlLevel::Zero, ControlLevel::Rydberg)?.scale((theta / 2.0).sin() * phase(phi))
            + &(&cs.unit(ControlLevel::One, ControlLevel::Rydberg)? * (theta / 2.0).cos());
        self.embed(atom, &b)
    }

    /// Operators of an ensemble drive with effective envelope `E(t) = Ω_eff e^{iφ_B}`.
    pub fn ensemble_drive_operators(&self, vartheta: f64, phi: f64) -> Result<EnsembleDriveOperators> {
        let e = self.ensemble.as_ref().ok_or_else(|| Error::InvalidParameter("system has no ensemble".into()))?;
        let es = e.space()?;
        let k = self.ensemble_factor();
        let (s, c) = ((vartheta / 2.0).sin() * phase(phi), C64::from((vartheta / 2.0).cos()));
        match e.coupling {
            EnsembleCoupling::Ladder { omega_c, delta, stark_compensation } => {
                // Ω_A e^{iφ_A}/2 = (Δ/Ω_C) sin(ϑ/2) e^{iφ} E
                let g = delta / omega_c;
                let coupling = self.embed(k, &es.lift(&[(Level::A, Level::P, s * g), (Level::B, Level::P, c * g)])?)?;
                let cr = es.lift(&[(Level::R, Level::P, C64::from(omega_c / 2.0))])?;
                let mut constant = &cr + &cr.dagger();
                let mut stark = None;
                if stark_compensation {
                    constant += &es.lift(&[(Level::R, Level::R, C64::from(-omega_c * omega_c / (4.0 * delta)))])?;
                    // Ω′²/(4Δ) = Δ |E|² / Ω_C²
                    let pb = es.lift(&[
                        (Level::A, Level::A, s * s.conj()),
                        (Level::A, Level::B, s * c.conj()),
                        (Level::B, Level::A, c * s.conj()),
                        (Level::B, Level::B, c * c.conj()),
                    ])?;
                    stark = Some((self.embed(k, &pb)?, -delta / (omega_c * omega_c)));
                }
                Ok(EnsembleDriveOperators {
                    coupling,
                    coupling_scale: 1.0,
                    constant: self.embed(k, &constant)?,
                    stark,
                })
            }
            EnsembleCoupling::Effective { .. } | EnsembleCoupling::DarkState => {
                let coupling = self.embed(k, &es.lift(&[(Level::A, Level::R, s), (Level::B, Level::R, c)])?)?;
                Ok(EnsembleDriveOperators {
                    coupling,
                    coupling_scale: 0.5,
                    constant: Operator::zeros(self.dim()?),
                    stark: None,
                })
            }
        }
    }

    /// Every jump operator of the system.
    pub fn jumps(&self) -> Result<Vec<Operator>> {
        let cs = self.control_space();
        let mut out = Vec::new();
        for (a, &g) in self.controls.iter().enumerate() {
            for l in control_decay(&cs, g)? {
                out.push(self.embed(a, &l)?);
            }
        }
        if let Some(e) = &self.ensemble {
            let k = self.ensemble_factor();
            for l in ensemble_decay(&e.space()?, e.gamma_p, e.gamma_rydberg, e.gamma_phi)? {
                out.push(self.embed(k, &l)?);
            }
        }
        Ok(out)
    }
}

/// Ensemble drive `coupling_scale·E(t)·coupling + h.c. + constant + stark.1·|E(t)|²·stark.0`.
#[derive(Clone, Debug)]
pub struct EnsembleDriveOperators {
    pub coupling: Operator,
    pub coupling_scale: f64,
    pub constant: Operator,
    pub stark: Option<(Operator, f64)>,
}
