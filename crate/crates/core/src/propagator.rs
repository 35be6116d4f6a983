//! Numerical evolution `U(t) = exp(−iHt)` and extraction of the conditional
//! Kraus field operators `K_j(t) = ⟨j|_A U(t) |1⟩_A`.
//!
//! `H` is diagonalised once; any number of times can then be evaluated from
//! the spectral decomposition. This is the reference route the closed forms
//! in [`crate::analytic`] are checked against.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{CpsError, Result};
use crate::fock::{AtomLevel, FockSpace, NUM_LEVELS};
use crate::model::{build_hamiltonian, hermiticity_residual, JointOperator, PhysParams};
use crate::C64;

/// Dense operator on the truncated field space.
pub type FieldOperator = DMatrix<C64>;

/// Default accuracy contract for unitarity and Kraus completeness.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Spectral decomposition of a Hermitian Hamiltonian.
#[derive(Debug, Clone)]
pub struct Evolution {
    energies: Vec<f64>,
    vectors: DMatrix<C64>,
    vectors_adj: DMatrix<C64>,
    tol: f64,
}

impl Evolution {
    pub fn new(h: &JointOperator, tol: f64) -> Result<Self> {
        if !(tol > 0.0) {
            return Err(CpsError::Domain("tolerance must be positive".into()));
        }
        if !h.is_square() {
            return Err(CpsError::Domain("Hamiltonian must be square".into()));
        }
        let herm = hermiticity_residual(h);
        if herm > tol {
            return Err(CpsError::Numerical {
                what: "Hamiltonian is not Hermitian".into(),
                residual: herm,
            });
        }
        let eig = SymmetricEigen::new(h.clone());
        let vectors = eig.eigenvectors;
        let vectors_adj = vectors.adjoint();
        let orth = max_identity_residual(&(&vectors_adj * &vectors));
        if orth > tol {
            return Err(CpsError::Numerical {
                what: "eigenbasis not orthonormal".into(),
                residual: orth,
            });
        }
        Ok(Evolution {
            energies: eig.eigenvalues.iter().copied().collect(),
            vectors,
            vectors_adj,
            tol,
        })
    }

    pub fn for_params(params: &PhysParams, tol: f64) -> Result<Self> {
        Self::new(&build_hamiltonian(params)?, tol)
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    /// Columns `start..start+len` of `U(t)`.
    pub fn unitary_columns(&self, t: f64, start: usize, len: usize) -> DMatrix<C64> {
        let mut right = self.vectors_adj.columns(start, len).into_owned();
        for (i, &e) in self.energies.iter().enumerate() {
            let mut row = right.row_mut(i);
            row *= C64::new(0.0, -e * t).exp();
        }
        &self.vectors * right
    }

    pub fn unitary(&self, t: f64) -> JointOperator {
        self.unitary_columns(t, 0, self.dim())
    }

    /// Kraus set for an atom prepared in `initial`.
    pub fn kraus(&self, space: FockSpace, initial: AtomLevel, t: f64) -> Result<KrausSet> {
        if space.joint_dim() != self.dim() {
            return Err(CpsError::Domain("Fock space does not match Hamiltonian".into()));
        }
        let d = space.field_dim();
        let block = self.unitary_columns(t, initial.offset() * d, d);
        let ops = (0..NUM_LEVELS)
            .map(|j| block.rows(j * d, d).into_owned())
            .collect();
        KrausSet::new(t, initial, space, ops, self.tol)
    }
}

/// `max |A − I|`
pub fn max_identity_residual(a: &DMatrix<C64>) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            let target = if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
            worst = worst.max((a[(i, j)] - target).norm());
        }
    }
    worst
}

/// `U(t) = exp(−iHt)` with `max |U†U − I| < tol` enforced.
pub fn propagate(h: &JointOperator, t: f64, tol: f64) -> Result<JointOperator> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(CpsError::Domain(format!("time must be finite and ≥ 0, got {t}")));
    }
    let u = Evolution::new(h, tol)?.unitary(t);
    let res = max_identity_residual(&(u.adjoint() * &u));
    if res >= tol {
        return Err(CpsError::Numerical {
            what: "propagator is not unitary".into(),
            residual: res,
        });
    }
    Ok(u)
}

/// The six conditional field operators for one preparation level and time.
#[derive(Debug, Clone)]
pub struct KrausSet {
    pub time: f64,
    pub initial: AtomLevel,
    pub space: FockSpace,
    ops: Vec<FieldOperator>,
}

impl KrausSet {
    fn new(
        time: f64,
        initial: AtomLevel,
        space: FockSpace,
        ops: Vec<FieldOperator>,
        tol: f64,
    ) -> Result<Self> {
        let set = KrausSet { time, initial, space, ops };
        let res = set.completeness_residual();
        if res >= tol {
            return Err(CpsError::Numerical {
                what: "Kraus completeness violated".into(),
                residual: res,
            });
        }
        Ok(set)
    }

    /// `K_j` for detected level `j`.
    pub fn get(&self, level: AtomLevel) -> &FieldOperator {
        &self.ops[level.offset()]
    }

    pub fn k1(&self) -> &FieldOperator {
        &self.ops[0]
    }

    pub fn k2(&self) -> &FieldOperator {
        &self.ops[1]
    }

    pub fn iter(&self) -> impl Iterator<Item = (AtomLevel, &FieldOperator)> {
        AtomLevel::all().zip(self.ops.iter())
    }

    /// `max |Σ_j K_j†K_j − I|`
    pub fn completeness_residual(&self) -> f64 {
        let d = self.space.field_dim();
        let sum = self
            .ops
            .iter()
            .fold(DMatrix::<C64>::zeros(d, d), |acc, k| acc + k.adjoint() * k);
        max_identity_residual(&sum)
    }

    /// Outcome probabilities `Tr(K_j ρ K_j†)` for a field density `ρ`.
    pub fn probabilities(&self, rho: &DMatrix<C64>) -> [f64; NUM_LEVELS] {
        let mut out = [0.0; NUM_LEVELS];
        for (p, k) in out.iter_mut().zip(&self.ops) {
            *p = (k * rho * k.adjoint()).trace().re;
        }
        out
    }

    /// Same operators expressed in the atomic basis where the even levels
    /// `|2⟩, |4⟩, |6⟩` carry an extra factor −1, i.e. `K_j → (−1)^(j−1) K_j`.
    ///
    /// In that basis the couplings enter the Kraus equations of motion with
    /// positive sign, which is the convention of the closed-form jump operator
    /// in [`crate::analytic::k2_analytic`].
    pub fn alternating_phase(&self) -> KrausSet {
        let ops = self
            .ops
            .iter()
            .enumerate()
            .map(|(j, k)| if j % 2 == 1 { -k } else { k.clone() })
            .collect();
        KrausSet { ops, ..self.clone() }
    }
}

/// `K_j[s', s] = ⟨j, s'| U |initial, s⟩`.
pub fn extract_kraus(
    u: &JointOperator,
    space: FockSpace,
    initial: AtomLevel,
    time: f64,
) -> Result<KrausSet> {
    if u.nrows() != space.joint_dim() || u.ncols() != space.joint_dim() {
        return Err(CpsError::Domain("propagator dimension does not match Fock space".into()));
    }
    let d = space.field_dim();
    let col = initial.offset() * d;
    let ops = (0..NUM_LEVELS)
        .map(|j| u.view((j * d, col), (d, d)).into_owned())
        .collect();
    KrausSet::new(time, initial, space, ops, DEFAULT_TOL)
}

/// Kraus set at time `t` for an atom prepared in the ground level.
pub fn kraus_at(params: &PhysParams, t: f64) -> Result<KrausSet> {
    Evolution::for_params(params, DEFAULT_TOL)?.kraus(params.space()?, AtomLevel::GROUND, t)
}

/// Largest population found in any Fock label with an occupation ≥ 2, over
/// the eight qubit-sector initial states `|1⟩_A|s⟩` and all grid times.
pub fn leakage_check(params: &PhysParams, t_grid: &[f64]) -> Result<f64> {
    let space = params.space()?;
    if space.n_max() < 2 {
        return Err(CpsError::Domain(
            "leakage check needs truncation order ≥ 2".into(),
        ));
    }
    let evo = Evolution::for_params(params, DEFAULT_TOL)?;
    let d = space.field_dim();
    let outside: Vec<bool> = space.labels().map(|l| l.max_occupation() >= 2).collect();
    let starts: Vec<usize> = (0..8)
        .map(|code| space.qubit_state_index(code))
        .collect::<Result<_>>()?;

    let mut worst: f64 = 0.0;
    for &t in t_grid {
        let u = evo.unitary_columns(t, 0, d);
        for &s in &starts {
            let column = u.column(s);
            let leaked: f64 = column
                .iter()
                .enumerate()
                .filter(|(j, _)| outside[j % d])
                .map(|(_, a)| a.norm_sqr())
                .sum();
            worst = worst.max(leaked);
        }
    }
    Ok(worst)
}
