//! Physical parameters and the rotating-frame Hamiltonian.
//!
//! ```text
//! H = Σ_k Δ_k σ_kk − (g_a σ_21 a_a + g_b σ_43 a_b + g_c σ_65 a_c + h.c.)
//!                  − (Ω_1 σ_23 + Ω_2 σ_25 + h.c.)
//! ```
//!
//! with `ħ = 1`. Every quantity is an angular frequency; by convention the
//! CLI measures them in units of `|g|`.

use nalgebra::DMatrix;

use crate::error::{CpsError, Result};
use crate::fock::{AtomLevel, FockSpace, ModeId};
use crate::C64;

/// Dense operator on the joint atom ⊗ field space.
pub type JointOperator = DMatrix<C64>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysParams {
    pub g_a: C64,
    pub g_b: C64,
    pub g_c: C64,
    pub omega_1: C64,
    pub omega_2: C64,
    /// `Δ_1 … Δ_6`
    pub detunings: [f64; 6],
    pub n_max: usize,
}

impl PhysParams {
    /// Resonant parameters with arbitrary complex couplings.
    pub fn resonant(g: [C64; 3], omega: [C64; 2], n_max: usize) -> Self {
        PhysParams {
            g_a: g[0],
            g_b: g[1],
            g_c: g[2],
            omega_1: omega[0],
            omega_2: omega[1],
            detunings: [0.0; 6],
            n_max,
        }
    }

    /// Resonant, real, `g_a = g_b = g_c = g` and `Ω_1 = Ω_2 = Ω`, qubit truncation.
    pub fn equal(g: f64, omega: f64) -> Self {
        let g = C64::new(g, 0.0);
        let o = C64::new(omega, 0.0);
        Self::resonant([g, g, g], [o, o], 1)
    }

    pub fn with_n_max(mut self, n_max: usize) -> Self {
        self.n_max = n_max;
        self
    }

    pub fn with_detunings(mut self, detunings: [f64; 6]) -> Self {
        self.detunings = detunings;
        self
    }

    pub fn coupling(&self, mode: ModeId) -> C64 {
        match mode {
            ModeId::A => self.g_a,
            ModeId::B => self.g_b,
            ModeId::C => self.g_c,
        }
    }

    pub fn space(&self) -> Result<FockSpace> {
        FockSpace::new(self.n_max)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_max < 1 {
            return Err(CpsError::Domain("truncation order must be ≥ 1".into()));
        }
        let finite = [self.g_a, self.g_b, self.g_c, self.omega_1, self.omega_2]
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
            && self.detunings.iter().all(|d| d.is_finite());
        if !finite {
            return Err(CpsError::Domain("parameters must be finite".into()));
        }
        Ok(())
    }

    pub fn is_resonant(&self) -> bool {
        self.detunings.iter().all(|&d| d == 0.0)
    }

    pub fn require_resonant(&self) -> Result<()> {
        if self.is_resonant() {
            Ok(())
        } else {
            Err(CpsError::Regime(
                "closed forms need resonance (all detunings zero)".into(),
            ))
        }
    }

    /// Common `|g|` if the three coupling magnitudes agree within `rel_tol`.
    pub fn equal_coupling_magnitude(&self, rel_tol: f64) -> Option<f64> {
        common_magnitude(&[self.g_a.norm(), self.g_b.norm(), self.g_c.norm()], rel_tol)
    }

    /// Common `|Ω|` if both Rabi magnitudes agree within `rel_tol`.
    pub fn equal_rabi_magnitude(&self, rel_tol: f64) -> Option<f64> {
        common_magnitude(&[self.omega_1.norm(), self.omega_2.norm()], rel_tol)
    }

    /// `(|g|, |Ω|)` for the strong-drive gate regime: resonance, equal
    /// couplings, equal Rabi magnitudes.
    pub fn gate_regime(&self) -> Result<(f64, f64)> {
        self.require_resonant()?;
        let g = self.equal_coupling_magnitude(1e-12).ok_or_else(|| {
            CpsError::Regime("gate regime needs |g_a| = |g_b| = |g_c|".into())
        })?;
        let omega = self.equal_rabi_magnitude(1e-12).ok_or_else(|| {
            CpsError::Regime("gate regime needs |Ω_1| = |Ω_2|".into())
        })?;
        Ok((g, omega))
    }

    /// `|g|` for the equal-magnitude regime `|Ω_1| = |Ω_2| = |g_a| = |g_b| = |g_c|`.
    pub fn all_equal_regime(&self) -> Result<f64> {
        let (g, omega) = self.gate_regime()?;
        if (g - omega).abs() > 1e-12 * g.max(omega).max(1.0) {
            return Err(CpsError::Regime(
                "needs |Ω_1| = |Ω_2| = |g_a| = |g_b| = |g_c|".into(),
            ));
        }
        Ok(g)
    }
}

fn common_magnitude(values: &[f64], rel_tol: f64) -> Option<f64> {
    let max = values.iter().copied().fold(0.0, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    (max - min <= rel_tol * max.max(f64::MIN_POSITIVE)).then_some(max)
}

/// Detunings `Δ_1 … Δ_6` from single-photon detunings `ε_1 … ε_6`.
///
/// `Δ_6` continues the pattern of the `c`-branch: `ε_1 − ε_4 + ε_5 − ε_6`.
pub fn detunings_from_single_photon(eps: [f64; 6]) -> [f64; 6] {
    let [e1, e2, e3, e4, e5, e6] = eps;
    [
        e1,
        e1 - e2,
        e1 - e2 + e3,
        e1 - e4,
        e1 - e4 + e5,
        e1 - e4 + e5 - e6,
    ]
}

/// Assemble `H` over the joint space, ordered as [`FockSpace::joint_index`].
pub fn build_hamiltonian(params: &PhysParams) -> Result<JointOperator> {
    params.validate()?;
    let space = params.space()?;
    let dim = space.joint_dim();
    let mut h = JointOperator::zeros(dim, dim);

    for level in AtomLevel::all() {
        let delta = params.detunings[level.offset()];
        for s in 0..space.field_dim() {
            let j = space.joint_index(level, s);
            h[(j, j)] = C64::new(delta, 0.0);
        }
    }

    let lvl = |k: usize| AtomLevel::new(k).expect("static level");
    // (lower level, upper level, mode): σ_upper,lower a_mode
    let quantum = [(1, 2, ModeId::A), (3, 4, ModeId::B), (5, 6, ModeId::C)];
    for (lo, hi, mode) in quantum {
        let g = params.coupling(mode);
        for label in space.labels() {
            let Some(lowered) = label.lowered(mode) else { continue };
            let amp = (label.get(mode) as f64).sqrt();
            let from = space.joint_index(lvl(lo), space.index(label)?);
            let to = space.joint_index(lvl(hi), space.index(lowered)?);
            h[(to, from)] -= g * amp;
            h[(from, to)] -= g.conj() * amp;
        }
    }

    // σ_23, σ_25: the classical fields leave the photon numbers alone.
    let classical = [(3, params.omega_1), (5, params.omega_2)];
    for (k, omega) in classical {
        for s in 0..space.field_dim() {
            let two = space.joint_index(lvl(2), s);
            let other = space.joint_index(lvl(k), s);
            h[(two, other)] -= omega;
            h[(other, two)] -= omega.conj();
        }
    }

    Ok(h)
}

/// `max |H − H†|`
pub fn hermiticity_residual(h: &JointOperator) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..h.nrows() {
        for j in 0..h.ncols() {
            worst = worst.max((h[(i, j)] - h[(j, i)].conj()).norm());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::FockLabel;
    use nalgebra::SymmetricEigen;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn detuning_map() {
        assert_eq!(detunings_from_single_photon([0.0; 6]), [0.0; 6]);
        assert_eq!(
            detunings_from_single_photon([1.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
            [1.0; 6]
        );
        assert_eq!(
            detunings_from_single_photon([0.0, 1.0, 0.0, 0.0, 0.0, 0.0]),
            [0.0, -1.0, -1.0, 0.0, 0.0, 0.0]
        );
    }

    #[test]
    fn zero_parameters_give_zero_matrix() {
        let p = PhysParams::resonant([c(0.0); 3], [c(0.0); 2], 1);
        let h = build_hamiltonian(&p).unwrap();
        assert_eq!(h.shape(), (48, 48));
        assert!(h.iter().all(|z| *z == C64::new(0.0, 0.0)));
    }

    #[test]
    fn absorption_matrix_element() {
        let ga = C64::new(0.7, 0.2);
        let p = PhysParams::resonant([ga, c(0.3), c(0.4)], [c(1.0), c(2.0)], 2);
        let h = build_hamiltonian(&p).unwrap();
        let space = p.space().unwrap();
        let lvl = |k| AtomLevel::new(k).unwrap();
        for (nb, nc) in [(0, 0), (1, 0), (2, 1)] {
            let up = space.joint_index(lvl(2), space.index(FockLabel::new(0, nb, nc)).unwrap());
            let down = space.joint_index(lvl(1), space.index(FockLabel::new(1, nb, nc)).unwrap());
            assert_eq!(h[(up, down)], -ga);
            assert_eq!(h[(down, up)], -ga.conj());
        }
        // two photons: √2 enhancement
        let up = space.joint_index(lvl(2), space.index(FockLabel::new(1, 0, 0)).unwrap());
        let down = space.joint_index(lvl(1), space.index(FockLabel::new(2, 0, 0)).unwrap());
        assert!((h[(up, down)] + ga * 2f64.sqrt()).norm() < 1e-15);
    }

    #[test]
    fn single_rabi_spectrum() {
        // Brute-force diagonalisation: each field sector contributes a 6×6
        // block with spectrum {0,0,0,0,±|Ω_1|}.
        let o1 = C64::new(1.5, -0.8);
        let p = PhysParams::resonant([c(0.0); 3], [o1, c(0.0)], 1);
        let h = build_hamiltonian(&p).unwrap();
        let eig = SymmetricEigen::new(h).eigenvalues;
        let mut vals: Vec<f64> = eig.iter().copied().collect();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let w = o1.norm();
        for (i, v) in vals.iter().enumerate() {
            let expect = if i < 8 {
                -w
            } else if i >= 40 {
                w
            } else {
                0.0
            };
            assert!((v - expect).abs() < 1e-12, "{i}: {v} vs {expect}");
        }
    }

    #[test]
    fn detunings_on_diagonal() {
        let d = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6];
        let p = PhysParams::equal(1.0, 2.0).with_detunings(d);
        let h = build_hamiltonian(&p).unwrap();
        let space = p.space().unwrap();
        for level in AtomLevel::all() {
            let j = space.joint_index(level, 3);
            assert_eq!(h[(j, j)].re, d[level.offset()]);
        }
    }

    #[test]
    fn linear_in_each_coupling() {
        let base = PhysParams::resonant(
            [C64::new(0.3, 0.1), c(0.5), c(0.7)],
            [c(2.0), C64::new(0.0, 1.0)],
            2,
        );
        let ga = base.g_a;
        let h0 = build_hamiltonian(&PhysParams { g_a: c(0.0), ..base }).unwrap();
        let h1 = build_hamiltonian(&base).unwrap();
        let h2 = build_hamiltonian(&PhysParams { g_a: ga * 2.0, ..base }).unwrap();
        let diff = (&h2 - &h1) - (&h1 - &h0);
        assert!(diff.iter().all(|z| z.norm() < 1e-15));
    }

    #[test]
    fn regimes() {
        assert_eq!(PhysParams::equal(1.0, 10.0).gate_regime().unwrap(), (1.0, 10.0));
        assert!(PhysParams::equal(1.0, 10.0).all_equal_regime().is_err());
        assert_eq!(PhysParams::equal(2.0, 2.0).all_equal_regime().unwrap(), 2.0);
        let detuned = PhysParams::equal(1.0, 10.0).with_detunings([0.1, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert!(matches!(detuned.gate_regime(), Err(CpsError::Regime(_))));
        let unequal = PhysParams::resonant([c(1.0), c(1.0), c(2.0)], [c(1.0); 2], 1);
        assert!(unequal.gate_regime().is_err());
    }

    #[test]
    fn rejects_bad_params() {
        let mut p = PhysParams::equal(1.0, 1.0);
        p.g_b = C64::new(f64::NAN, 0.0);
        assert!(build_hamiltonian(&p).is_err());
        assert!(build_hamiltonian(&PhysParams::equal(1.0, 1.0).with_n_max(0)).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn cplx() -> impl Strategy<Value = C64> {
            (-5.0f64..5.0, -5.0f64..5.0).prop_map(|(re, im)| C64::new(re, im))
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(32))]
            #[test]
            fn hermitian(g in proptest::array::uniform3(cplx()),
                         o in proptest::array::uniform2(cplx()),
                         d in proptest::array::uniform6(-3.0f64..3.0),
                         n_max in 1usize..3) {
                let p = PhysParams::resonant(g, o, n_max).with_detunings(d);
                let h = build_hamiltonian(&p).unwrap();
                prop_assert!(hermiticity_residual(&h) < 1e-12);
            }
        }
    }
}
