//! Phase-gate certification, CCNOT composition and the EPR jump protocol.

use std::f64::consts::{PI, SQRT_2};

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{CpsError, Result};
use crate::fock::{AtomLevel, FockSpace, QUBIT_DIM};
use crate::model::PhysParams;
use crate::propagator::{Evolution, FieldOperator, DEFAULT_TOL};
use crate::C64;

/// Target diagonal of the three-qubit phase gate.
pub const CPS_TARGET: [f64; 8] = [1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, -1.0];

/// Density matrix of the three-mode field restricted to the qubit space.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldDensity(DMatrix<C64>);

impl FieldDensity {
    pub fn new(rho: DMatrix<C64>) -> Result<Self> {
        if rho.shape() != (QUBIT_DIM, QUBIT_DIM) {
            return Err(CpsError::Domain(format!(
                "field density must be {QUBIT_DIM}×{QUBIT_DIM}, got {:?}",
                rho.shape()
            )));
        }
        let herm = crate::max_abs(&(&rho - rho.adjoint()));
        if herm > 1e-12 {
            return Err(CpsError::Domain(format!("density not Hermitian ({herm:.2e})")));
        }
        let tr = rho.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > 1e-12 {
            return Err(CpsError::Domain(format!("density trace {tr} ≠ 1")));
        }
        let min_eig = SymmetricEigen::new(rho.clone())
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if min_eig < -1e-10 {
            return Err(CpsError::Domain(format!("density has eigenvalue {min_eig:.3e}")));
        }
        Ok(FieldDensity(rho))
    }

    /// `|ψ⟩⟨ψ|` after normalising `psi`.
    pub fn pure(psi: &DVector<C64>) -> Result<Self> {
        let norm = psi.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(CpsError::Domain("state vector has zero or invalid norm".into()));
        }
        let psi = psi / C64::new(norm, 0.0);
        let mut rho = &psi * psi.adjoint();
        // exact Hermitian symmetrisation of rounding noise
        rho = (&rho + rho.adjoint()) * C64::new(0.5, 0.0);
        Self::new(rho)
    }

    pub fn basis(s: usize) -> Result<Self> {
        if s >= QUBIT_DIM {
            return Err(CpsError::Domain(format!("basis index {s} outside 0..8")));
        }
        let mut psi = DVector::zeros(QUBIT_DIM);
        psi[s] = C64::new(1.0, 0.0);
        Self::pure(&psi)
    }

    /// `|1⟩_a (|00⟩ + |01⟩ + |10⟩ + |11⟩)_bc / 2`
    pub fn xi() -> Self {
        Self::pure(&xi_state()).expect("static state")
    }

    /// `(i/2)(|100⟩ + |101⟩ + |110⟩ + |111⟩)`
    pub fn phi() -> Self {
        Self::pure(&phi_state()).expect("static state")
    }

    /// Equal superposition of all eight qubit basis states.
    pub fn uniform() -> Self {
        Self::pure(&DVector::from_element(QUBIT_DIM, C64::new(1.0, 0.0))).expect("static state")
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn population(&self, s: usize) -> f64 {
        self.0[(s, s)].re
    }

    /// `Tr(ρ²)`
    pub fn purity(&self) -> f64 {
        (&self.0 * &self.0).trace().re
    }
}

pub fn xi_state() -> DVector<C64> {
    let mut psi = DVector::zeros(QUBIT_DIM);
    for s in 4..8 {
        psi[s] = C64::new(0.5, 0.0);
    }
    psi
}

pub fn phi_state() -> DVector<C64> {
    let mut psi = DVector::zeros(QUBIT_DIM);
    for s in 4..8 {
        psi[s] = C64::new(0.0, 0.5);
    }
    psi
}

/// `(|010⟩ + |001⟩)/√2`
pub fn epr_target() -> DVector<C64> {
    let mut psi = DVector::zeros(QUBIT_DIM);
    psi[1] = C64::new(1.0 / SQRT_2, 0.0);
    psi[2] = C64::new(1.0 / SQRT_2, 0.0);
    psi
}

/// Ideal `n`-qubit conditional phase shift, `diag(1, …, 1, −1)`.
pub fn q_pi_ideal(n: usize) -> Result<FieldOperator> {
    if !(2..=3).contains(&n) {
        return Err(CpsError::Domain(format!("phase gate defined for 2 or 3 qubits, got {n}")));
    }
    let dim = 1 << n;
    let mut q = DMatrix::identity(dim, dim);
    q[(dim - 1, dim - 1)] = C64::new(-1.0, 0.0);
    Ok(q)
}

pub fn hadamard() -> DMatrix<C64> {
    let h = 1.0 / SQRT_2;
    DMatrix::from_row_slice(2, 2, &[h, h, h, -h]).map(|x| C64::new(x, 0.0))
}

/// `I ⊗ … ⊗ I ⊗ H` acting on the last (target) qubit of `n`.
fn target_hadamard(n: usize) -> DMatrix<C64> {
    DMatrix::<C64>::identity(1 << (n - 1), 1 << (n - 1)).kronecker(&hadamard())
}

fn conjugate_by_target_hadamard(q: &FieldOperator, n: usize) -> Result<FieldOperator> {
    let dim = 1 << n;
    if q.shape() != (dim, dim) {
        return Err(CpsError::Domain(format!("expected {dim}×{dim} operator, got {:?}", q.shape())));
    }
    let h = target_hadamard(n);
    Ok(&h * q * &h)
}

/// `(I ⊗ I ⊗ H) · q · (I ⊗ I ⊗ H)`
pub fn ccnot_compose(q: &FieldOperator) -> Result<FieldOperator> {
    conjugate_by_target_hadamard(q, 3)
}

/// `(I ⊗ H) · q · (I ⊗ H)`
pub fn cnot_compose(q: &FieldOperator) -> Result<FieldOperator> {
    conjugate_by_target_hadamard(q, 2)
}

/// Toffoli permutation: swaps `|110⟩ ↔ |111⟩`.
pub fn toffoli() -> FieldOperator {
    let mut t = DMatrix::identity(8, 8);
    t[(6, 6)] = C64::new(0.0, 0.0);
    t[(7, 7)] = C64::new(0.0, 0.0);
    t[(6, 7)] = C64::new(1.0, 0.0);
    t[(7, 6)] = C64::new(1.0, 0.0);
    t
}

/// `t_int = √2·π·|Ω|/|g|²·(1 + 2k)`: the slow phase of `|111⟩` reaches π.
pub fn cps_interaction_time(params: &PhysParams, k: u32) -> Result<f64> {
    let (g, omega) = params.gate_regime()?;
    if g == 0.0 {
        return Err(CpsError::Domain("interaction time is infinite for |g| = 0".into()));
    }
    Ok(SQRT_2 * PI * omega / (g * g) * (1 + 2 * k) as f64)
}

/// Period `2π/(√2|Ω|)` of the fast oscillation in the gate regime.
pub fn fast_period(params: &PhysParams) -> Result<f64> {
    let (_, omega) = params.gate_regime()?;
    if omega == 0.0 {
        return Err(CpsError::Domain("no fast oscillation for |Ω| = 0".into()));
    }
    Ok(2.0 * PI / (SQRT_2 * omega))
}

/// Averaged estimate `2|g|²/|Ω|² · Σ_{s=4..7} ρ_ss` of `1 − P(t_int)`.
pub fn probability_deficit_estimate(params: &PhysParams, rho0: &FieldDensity) -> Result<f64> {
    let (g, omega) = params.gate_regime()?;
    if omega == 0.0 {
        return Err(CpsError::Domain("estimate needs |Ω| > 0".into()));
    }
    let weight: f64 = (4..8).map(|s| rho0.population(s)).sum();
    Ok(2.0 * g * g / (omega * omega) * weight)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateReport {
    pub deviation_diag: f64,
    pub deviation_offdiag: f64,
    pub probability: f64,
    /// `None` when the outcome has zero probability.
    pub fidelity: Option<f64>,
    pub t_int: f64,
}

/// Compare a conditional operator against the ideal phase gate for `rho0`.
pub fn gate_report(k1: &FieldOperator, rho0: &FieldDensity, t_int: f64) -> Result<GateReport> {
    if k1.shape() != (QUBIT_DIM, QUBIT_DIM) {
        return Err(CpsError::Domain(format!("expected 8×8 operator, got {:?}", k1.shape())));
    }
    let mut deviation_diag: f64 = 0.0;
    let mut deviation_offdiag: f64 = 0.0;
    for i in 0..QUBIT_DIM {
        for j in 0..QUBIT_DIM {
            if i == j {
                deviation_diag = deviation_diag.max((k1[(i, i)] - CPS_TARGET[i]).norm());
            } else {
                deviation_offdiag = deviation_offdiag.max(k1[(i, j)].norm());
            }
        }
    }

    let rho = rho0.matrix();
    let branch = k1 * rho * k1.adjoint();
    let probability = branch.trace().re;
    let fidelity = if probability > 0.0 {
        let q = q_pi_ideal(3)?;
        let rho_q = &q * rho * q.adjoint();
        let rho_c = branch / C64::new(probability, 0.0);
        let overlap = (rho_q * rho_c).trace().re;
        Some(overlap.clamp(0.0, 1.0).sqrt())
    } else {
        None
    };

    Ok(GateReport {
        deviation_diag,
        deviation_offdiag,
        probability: probability.clamp(0.0, 1.0),
        fidelity,
        t_int,
    })
}

/// Numerical gate simulation for one parameter set, reusable across times.
#[derive(Debug, Clone)]
pub struct CpsSimulation {
    params: PhysParams,
    space: FockSpace,
    evolution: Evolution,
}

impl CpsSimulation {
    pub fn new(params: &PhysParams) -> Result<Self> {
        let space = params.space()?;
        if space.n_max() != 1 {
            return Err(CpsError::Domain("gate simulation runs on the qubit truncation".into()));
        }
        Ok(CpsSimulation {
            params: *params,
            space,
            evolution: Evolution::for_params(params, DEFAULT_TOL)?,
        })
    }

    pub fn params(&self) -> &PhysParams {
        &self.params
    }

    pub fn k1(&self, t: f64) -> Result<FieldOperator> {
        Ok(self.evolution.kraus(self.space, AtomLevel::GROUND, t)?.k1().clone())
    }

    pub fn k2(&self, t: f64) -> Result<FieldOperator> {
        Ok(self.evolution.kraus(self.space, AtomLevel::GROUND, t)?.k2().clone())
    }

    pub fn report(&self, t: f64, rho0: &FieldDensity, t_int: f64) -> Result<GateReport> {
        gate_report(&self.k1(t)?, rho0, t_int)
    }

    /// Mean of `1 − P(t)` over `[center − period/2, center + period/2]`,
    /// sampled at `samples` midpoints.
    pub fn mean_deficit(
        &self,
        rho0: &FieldDensity,
        center: f64,
        period: f64,
        samples: usize,
    ) -> Result<f64> {
        let samples = samples.max(1);
        let mut acc = 0.0;
        for i in 0..samples {
            let t = center - period / 2.0 + period * (i as f64 + 0.5) / samples as f64;
            acc += 1.0 - self.report(t, rho0, center)?.probability;
        }
        Ok(acc / samples as f64)
    }

    pub fn epr_at(&self, t: f64) -> Result<EprOutcome> {
        epr_from_jump(&self.k2(t)?, t)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EprOutcome {
    pub t_int: f64,
    pub probability: f64,
    pub fidelity: f64,
    pub state: FieldDensity,
    /// Concurrence of the state reduced to modes `b`, `c`.
    pub concurrence: f64,
    pub jump: FieldOperator,
}

/// EPR generation time `6π/(√3|g|)`.
pub fn epr_interaction_time(params: &PhysParams) -> Result<f64> {
    let g = params.all_equal_regime()?;
    if g == 0.0 {
        return Err(CpsError::Domain("interaction time is infinite for |g| = 0".into()));
    }
    Ok(6.0 * PI / (3f64.sqrt() * g))
}

fn epr_from_jump(k2: &FieldOperator, t: f64) -> Result<EprOutcome> {
    let out = k2 * phi_state();
    let probability = out.norm_squared();
    if !(probability > 0.0) {
        return Err(CpsError::ZeroProbability);
    }
    let state = FieldDensity::pure(&out)?;
    let psi = out / C64::new(probability.sqrt(), 0.0);
    let fidelity = epr_target().dotc(&psi).norm();
    let concurrence = concurrence(&reduce_to_bc(state.matrix()));
    Ok(EprOutcome {
        t_int: t,
        probability,
        fidelity,
        state,
        concurrence,
        jump: k2.clone(),
    })
}

/// Evolve `|φ⟩` under the jump branch at `6π/(√3|g|)`.
pub fn epr_protocol(params: &PhysParams) -> Result<EprOutcome> {
    let t = epr_interaction_time(params)?;
    CpsSimulation::new(params)?.epr_at(t)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EprScanPoint {
    pub t: f64,
    pub probability: f64,
    pub fidelity: f64,
}

impl EprScanPoint {
    pub fn merit(&self) -> f64 {
        self.probability * self.fidelity
    }
}

/// Sample the EPR branch over `[0, t_max]` (`steps` intervals).
pub fn epr_scan(params: &PhysParams, t_max: f64, steps: usize) -> Result<Vec<EprScanPoint>> {
    params.all_equal_regime()?;
    let sim = CpsSimulation::new(params)?;
    (0..=steps)
        .map(|i| t_max * i as f64 / steps.max(1) as f64)
        .map(|t| match sim.epr_at(t) {
            Ok(o) => Ok(EprScanPoint { t, probability: o.probability, fidelity: o.fidelity }),
            Err(CpsError::ZeroProbability) => Ok(EprScanPoint { t, probability: 0.0, fidelity: 0.0 }),
            Err(e) => Err(e),
        })
        .collect()
}

/// Local maxima of `P·F` in a scan, best first.
pub fn epr_candidates(scan: &[EprScanPoint]) -> Vec<EprScanPoint> {
    let mut peaks: Vec<EprScanPoint> = scan
        .windows(3)
        .filter(|w| w[1].merit() > w[0].merit() && w[1].merit() >= w[2].merit())
        .map(|w| w[1])
        .collect();
    peaks.sort_by(|a, b| b.merit().partial_cmp(&a.merit()).unwrap_or(std::cmp::Ordering::Equal));
    peaks
}

/// Trace out mode `a` of an 8×8 qubit-space density.
pub fn reduce_to_bc(rho: &DMatrix<C64>) -> DMatrix<C64> {
    DMatrix::from_fn(4, 4, |i, j| rho[(i, j)] + rho[(4 + i, 4 + j)])
}

/// Wootters concurrence of a two-qubit density matrix.
pub fn concurrence(rho: &DMatrix<C64>) -> f64 {
    assert_eq!(rho.shape(), (4, 4), "concurrence needs a two-qubit density");
    let sy = DMatrix::from_row_slice(2, 2, &[C64::new(0.0, 0.0), C64::new(0.0, -1.0), C64::new(0.0, 1.0), C64::new(0.0, 0.0)]);
    let yy = sy.kronecker(&sy);
    let flipped = &yy * rho.conjugate() * &yy;
    let sqrt_rho = hermitian_sqrt(rho);
    let r = &sqrt_rho * flipped * &sqrt_rho;
    let r = (&r + r.adjoint()) * C64::new(0.5, 0.0);
    let mut l: Vec<f64> = SymmetricEigen::new(r)
        .eigenvalues
        .iter()
        .map(|&e| e.max(0.0).sqrt())
        .collect();
    l.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    (l[0] - l[1] - l[2] - l[3]).max(0.0)
}

fn hermitian_sqrt(m: &DMatrix<C64>) -> DMatrix<C64> {
    let eig = SymmetricEigen::new(m.clone());
    let d = DVector::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues.iter().map(|&e| C64::new(e.max(0.0).sqrt(), 0.0)),
    );
    &eig.eigenvectors * DMatrix::from_diagonal(&d) * eig.eigenvectors.adjoint()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn ideal_phase_gates() {
        let q3 = q_pi_ideal(3).unwrap();
        let mut e7 = DVector::zeros(8);
        e7[7] = c(1.0);
        assert_eq!(&q3 * &e7, -&e7);
        let mut e0 = DVector::zeros(8);
        e0[0] = c(1.0);
        assert_eq!(&q3 * &e0, e0);
        let q2 = q_pi_ideal(2).unwrap();
        assert_eq!(q2, DMatrix::from_diagonal(&DVector::from_vec(vec![c(1.0), c(1.0), c(1.0), c(-1.0)])));
        assert!(q_pi_ideal(4).is_err());
        assert!(q_pi_ideal(1).is_err());
    }

    #[test]
    fn toffoli_from_ideal_phase_gate() {
        let ccnot = ccnot_compose(&q_pi_ideal(3).unwrap()).unwrap();
        assert!(crate::max_abs(&(&ccnot - toffoli())) < 1e-15);
        let basis = |s: usize| {
            let mut v = DVector::zeros(8);
            v[s] = c(1.0);
            v
        };
        assert!(crate::max_abs(&(&ccnot * basis(6) - basis(7))) < 1e-15);
        assert!(crate::max_abs(&(&ccnot * basis(7) - basis(6))) < 1e-15);
        assert!(crate::max_abs(&(&ccnot * basis(2) - basis(2))) < 1e-15);
    }

    #[test]
    fn cnot_from_cz() {
        let cnot = cnot_compose(&q_pi_ideal(2).unwrap()).unwrap();
        let expect = DMatrix::from_row_slice(4, 4, &[
            1.0, 0.0, 0.0, 0.0,
            0.0, 1.0, 0.0, 0.0,
            0.0, 0.0, 0.0, 1.0,
            0.0, 0.0, 1.0, 0.0,
        ]).map(c);
        assert!(crate::max_abs(&(cnot - expect)) < 1e-15);
        assert!(ccnot_compose(&DMatrix::identity(4, 4)).is_err());
    }

    #[test]
    fn interaction_time() {
        let p = PhysParams::equal(1.0, 10.0);
        let t0 = cps_interaction_time(&p, 0).unwrap();
        assert!((t0 - 44.42882938158366).abs() < 1e-12);
        assert!((cps_interaction_time(&p, 1).unwrap() - 3.0 * t0).abs() < 1e-12);
        assert!(cps_interaction_time(&PhysParams::equal(0.0, 10.0), 0).is_err());
        let unequal = PhysParams::resonant([c(1.0), c(2.0), c(1.0)], [c(10.0); 2], 1);
        assert!(matches!(cps_interaction_time(&unequal, 0), Err(CpsError::Regime(_))));
    }

    #[test]
    fn deficit_estimates() {
        let p = PhysParams::equal(1.0, 10.0);
        assert!((probability_deficit_estimate(&p, &FieldDensity::xi()).unwrap() - 0.02).abs() < 1e-15);
        assert!((probability_deficit_estimate(&p, &FieldDensity::uniform()).unwrap() - 0.01).abs() < 1e-15);
        assert_eq!(probability_deficit_estimate(&p, &FieldDensity::basis(3).unwrap()).unwrap(), 0.0);
    }

    #[test]
    fn ideal_report() {
        let q = q_pi_ideal(3).unwrap();
        for rho in [FieldDensity::xi(), FieldDensity::uniform(), FieldDensity::basis(7).unwrap()] {
            let r = gate_report(&q, &rho, 1.0).unwrap();
            assert_eq!(r.deviation_diag, 0.0);
            assert_eq!(r.deviation_offdiag, 0.0);
            assert!((r.probability - 1.0).abs() < 1e-14);
            assert!((r.fidelity.unwrap() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_probability_reported() {
        let k = DMatrix::zeros(8, 8);
        let r = gate_report(&k, &FieldDensity::xi(), 0.0).unwrap();
        assert_eq!(r.probability, 0.0);
        assert_eq!(r.fidelity, None);
    }

    #[test]
    fn identity_operator_fidelity() {
        // K = I leaves |ξ⟩ unchanged; ideal gate flips the |111⟩ amplitude:
        // overlap (1/4)(1+1+1−1) = 1/2, so F = √(1/4).
        let k = DMatrix::identity(8, 8);
        let r = gate_report(&k, &FieldDensity::xi(), 0.0).unwrap();
        assert!((r.fidelity.unwrap() - 0.5).abs() < 1e-14);
        assert!((r.deviation_diag - 2.0).abs() < 1e-14);
    }

    #[test]
    fn density_validation() {
        assert!(FieldDensity::new(DMatrix::identity(8, 8)).is_err());
        assert!(FieldDensity::new(DMatrix::identity(8, 8) / c(8.0)).is_ok());
        let mut bad = DMatrix::zeros(8, 8);
        bad[(0, 0)] = c(1.5);
        bad[(1, 1)] = c(-0.5);
        assert!(FieldDensity::new(bad).is_err());
        assert!(FieldDensity::basis(8).is_err());
        assert!(FieldDensity::pure(&DVector::zeros(8)).is_err());
        assert!((FieldDensity::phi().purity() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn concurrence_known_states() {
        let bell = {
            let mut v = DVector::zeros(4);
            v[1] = c(1.0 / SQRT_2);
            v[2] = c(1.0 / SQRT_2);
            &v * v.adjoint()
        };
        assert!((concurrence(&bell) - 1.0).abs() < 1e-10);
        let product = {
            let mut v = DVector::zeros(4);
            v[0] = c(1.0);
            &v * v.adjoint()
        };
        assert!(concurrence(&product) < 1e-10);
        let mixed = DMatrix::identity(4, 4) / c(4.0);
        assert!(concurrence(&mixed) < 1e-10);
    }

    #[test]
    fn epr_target_reduction_is_maximally_entangled() {
        let t = epr_target();
        let rho = &t * t.adjoint();
        assert!((concurrence(&reduce_to_bc(&rho)) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn epr_requires_equal_regime() {
        assert!(matches!(
            epr_protocol(&PhysParams::equal(1.0, 10.0)),
            Err(CpsError::Regime(_))
        ));
    }

    #[test]
    fn epr_scan_finds_peaks() {
        let p = PhysParams::equal(1.0, 1.0);
        let scan = epr_scan(&p, 10.0 * PI, 400).unwrap();
        assert_eq!(scan.len(), 401);
        assert!(scan[0].probability < 1e-20);
        let peaks = epr_candidates(&scan);
        assert!(!peaks.is_empty());
        assert!(peaks.windows(2).all(|w| w[0].merit() >= w[1].merit()));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn cplx() -> impl Strategy<Value = C64> {
            (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| C64::new(re, im))
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(48))]
            #[test]
            fn fidelity_in_unit_interval(amps in proptest::collection::vec(cplx(), 8),
                                         t in 0.0f64..60.0) {
                let psi = DVector::from_vec(amps);
                prop_assume!(psi.norm() > 1e-3);
                let rho = FieldDensity::pure(&psi).unwrap();
                let sim = CpsSimulation::new(&PhysParams::equal(1.0, 3.0)).unwrap();
                let r = sim.report(t, &rho, 0.0).unwrap();
                prop_assert!((0.0..=1.0).contains(&r.probability));
                if let Some(f) = r.fidelity {
                    prop_assert!((0.0..=1.0 + 1e-12).contains(&f));
                }
            }

            #[test]
            fn fidelity_one_for_ideal_output(amps in proptest::collection::vec(cplx(), 8),
                                             phase in 0.0f64..6.3) {
                // any global phase on the ideal gate is still fidelity 1
                let psi = DVector::from_vec(amps);
                prop_assume!(psi.norm() > 1e-3);
                let rho = FieldDensity::pure(&psi).unwrap();
                let k = q_pi_ideal(3).unwrap() * C64::from_polar(1.0, phase);
                let r = gate_report(&k, &rho, 0.0).unwrap();
                prop_assert!((r.fidelity.unwrap() - 1.0).abs() < 1e-12);
            }
        }
    }
}
