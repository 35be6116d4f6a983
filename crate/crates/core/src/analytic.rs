//! Closed-form conditional operators at resonance.
//!
//! With every detuning zero, `K_1(t)` is diagonal in the Fock basis and each
//! diagonal entry (a *sector*) obeys a sixth-order ODE whose characteristic
//! polynomial is a cubic in `x = Λ²`:
//!
//! ```text
//! x³ − p x² + q x − r = 0
//! p = |g_a|² n_a + |g_b|² n_b + |g_c|² n_c + |Ω_1|² + |Ω_2|²
//! q = |g_b|²(|Ω_2|² + |g_a|² n_a) n_b + |g_c|²(|Ω_1|² + |g_a|² n_a) n_c + |g_b|²|g_c|² n_b n_c
//! r = |g_a|²|g_b|²|g_c|² n_a n_b n_c
//! ```
//!
//! The sector value is `Σ_j B_j cos(Λ_j t)`, where the weights solve the
//! moment system `Σ B_j Λ_j^{2m} = μ_m` for `m = 0, 1, 2` with
//! `μ = (1, |g_a|² n_a, |g_a|² n_a (|g_a|² n_a + |Ω_1|² + |Ω_2|²))`.
//!
//! The jump operator follows from `K_2 = i a_a K̇_1 / (g_a* a_a a_a†)`. That
//! relation holds in the atomic basis where `|2⟩, |4⟩, |6⟩` are negated
//! relative to [`crate::model::build_hamiltonian`]; compare against
//! [`crate::propagator::KrausSet::alternating_phase`].

use std::f64::consts::SQRT_2;

use nalgebra::DMatrix;

use crate::error::{CpsError, Result};
use crate::fock::{FockLabel, FockSpace, ModeId};
use crate::model::PhysParams;
use crate::propagator::FieldOperator;
use crate::C64;

/// Relative separation below which two `Λ²` values are treated as one.
pub const DEGENERACY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorCoefficients {
    pub p: f64,
    pub q: f64,
    pub r: f64,
}

impl SectorCoefficients {
    /// `Λ⁶ − pΛ⁴ + qΛ² − r`
    pub fn residual(&self, lambda: f64) -> f64 {
        let x = lambda * lambda;
        cubic(self, x)
    }
}

fn cubic(c: &SectorCoefficients, x: f64) -> f64 {
    ((x - c.p) * x + c.q) * x - c.r
}

fn cubic_derivative(c: &SectorCoefficients, x: f64) -> f64 {
    (3.0 * x - 2.0 * c.p) * x + c.q
}

/// Three non-negative characteristic frequencies, sorted descending.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorRoots {
    pub lambda: [f64; 3],
    /// Set when two `Λ²` coincide within [`DEGENERACY_TOL`].
    pub degenerate: bool,
    scale: f64,
}

impl SectorRoots {
    pub fn squares(&self) -> [f64; 3] {
        self.lambda.map(|l| l * l)
    }
}

/// Weights `B_1, B_2, B_3`, aligned with [`SectorRoots::lambda`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BCoefficients {
    pub b: [f64; 3],
}

impl BCoefficients {
    pub fn sum(&self) -> f64 {
        self.b.iter().sum()
    }
}

fn require_resonance(params: &PhysParams) -> Result<()> {
    params.require_resonant()?;
    params.validate()
}

pub fn sector_coefficients(params: &PhysParams, occ: FockLabel) -> Result<SectorCoefficients> {
    require_resonance(params)?;
    let ga = params.g_a.norm_sqr();
    let gb = params.g_b.norm_sqr();
    let gc = params.g_c.norm_sqr();
    let o1 = params.omega_1.norm_sqr();
    let o2 = params.omega_2.norm_sqr();
    let [na, nb, nc] = occ.occ.map(|n| n as f64);
    Ok(SectorCoefficients {
        p: ga * na + gb * nb + gc * nc + o1 + o2,
        q: gb * (o2 + ga * na) * nb + gc * (o1 + ga * na) * nc + gb * gc * nb * nc,
        r: ga * gb * gc * na * nb * nc,
    })
}

/// Roots of the characteristic cubic in `x = Λ²`, returned as `Λ ≥ 0`.
pub fn characteristic_roots(c: &SectorCoefficients) -> Result<SectorRoots> {
    let SectorCoefficients { p, q, r } = *c;
    if ![p, q, r].iter().all(|v| v.is_finite()) {
        return Err(CpsError::Domain("non-finite cubic coefficients".into()));
    }
    let scale = p.abs().max(q.abs().sqrt()).max(r.abs().cbrt()).max(1.0);

    let mut xs = if r == 0.0 {
        // x = 0 is exact; the rest solves x² − p x + q = 0.
        let (hi, lo) = quadratic_pair(p, q)?;
        [hi, lo, 0.0]
    } else {
        let largest = polish(c, largest_root(c, scale)?);
        let (hi, lo) = quadratic_pair(p - largest, r / largest)?;
        [largest, hi, lo]
    };
    xs.sort_by(|u, v| v.partial_cmp(u).unwrap_or(std::cmp::Ordering::Equal));

    let neg_tol = 1e-12 * scale;
    let mut lambda = [0.0; 3];
    for (l, &x) in lambda.iter_mut().zip(&xs) {
        if x < -neg_tol {
            return Err(CpsError::Numerical {
                what: "negative squared frequency".into(),
                residual: -x,
            });
        }
        *l = x.max(0.0).sqrt();
    }

    let bound = 1e-9 * p.abs().powi(3).max(1.0);
    for &l in &lambda {
        let res = c.residual(l).abs();
        if res >= bound {
            return Err(CpsError::Numerical {
                what: "characteristic root residual".into(),
                residual: res,
            });
        }
    }

    let sq = lambda.map(|l| l * l);
    let gap = DEGENERACY_TOL * p.abs().max(1.0);
    let degenerate = (sq[0] - sq[1]).abs() < gap || (sq[1] - sq[2]).abs() < gap;
    Ok(SectorRoots { lambda, degenerate, scale: p.abs().max(1.0) })
}

/// Largest real root via the trigonometric form of the depressed cubic.
fn largest_root(c: &SectorCoefficients, scale: f64) -> Result<f64> {
    let SectorCoefficients { p, q, r } = *c;
    // y³ + a y + b = 0 with x = y + p/3
    let shift = p / 3.0;
    let a = q - p * p / 3.0;
    let b = -2.0 * p * p * p / 27.0 + p * q / 3.0 - r;
    if a.abs() <= 1e-12 * scale * scale {
        if b.abs() <= 1e-12 * scale.powi(3) {
            // triple root
            return Ok(shift);
        }
        return Ok(shift + (-b).cbrt());
    }
    if a > 0.0 {
        return Err(CpsError::Numerical {
            what: "characteristic cubic has complex roots".into(),
            residual: a / (scale * scale),
        });
    }
    let m = 2.0 * (-a / 3.0).sqrt();
    let arg = 3.0 * b / (a * m);
    let excess = arg.abs() - 1.0;
    if excess > 1e-6 {
        return Err(CpsError::Numerical {
            what: "characteristic cubic has complex roots".into(),
            residual: excess,
        });
    }
    Ok(shift + m * (arg.clamp(-1.0, 1.0).acos() / 3.0).cos())
}

/// Roots of `x² − s x + prod = 0`, larger first. A slightly negative
/// discriminant (double root under rounding) is clamped to zero.
fn quadratic_pair(s: f64, prod: f64) -> Result<(f64, f64)> {
    let disc = s * s - 4.0 * prod;
    let tol = 1e-9 * (s * s + 4.0 * prod.abs());
    if disc < -tol {
        return Err(CpsError::Numerical {
            what: "characteristic cubic has complex roots".into(),
            residual: -disc,
        });
    }
    let root = disc.max(0.0).sqrt();
    let hi = 0.5 * (s + root);
    let lo = if hi != 0.0 { prod / hi } else { 0.5 * (s - root) };
    Ok((hi, lo))
}

fn polish(c: &SectorCoefficients, mut x: f64) -> f64 {
    let mut fx = cubic(c, x).abs();
    for _ in 0..8 {
        let d = cubic_derivative(c, x);
        if d == 0.0 {
            break;
        }
        let next = x - cubic(c, x) / d;
        let fn_ = cubic(c, next).abs();
        if !(fn_ < fx) {
            break;
        }
        x = next;
        fx = fn_;
    }
    x
}

fn moments(params: &PhysParams, occ: FockLabel) -> [f64; 3] {
    let ga = params.g_a.norm_sqr() * occ.n_a() as f64;
    let drive = params.omega_1.norm_sqr() + params.omega_2.norm_sqr();
    [1.0, ga, ga * (ga + drive)]
}

/// Solve the 3×3 moment (Vandermonde) system for distinct roots.
pub fn b_coefficients(
    roots: &SectorRoots,
    params: &PhysParams,
    occ: FockLabel,
) -> Result<BCoefficients> {
    if roots.degenerate {
        return Err(CpsError::DegenerateSector(roots.squares()));
    }
    let [m0, m1, m2] = moments(params, occ);
    let x = roots.squares();
    let mut b = [0.0; 3];
    for j in 0..3 {
        let (k, l) = ((j + 1) % 3, (j + 2) % 3);
        // Lagrange form of the inverse Vandermonde.
        b[j] = (m2 - (x[k] + x[l]) * m1 + x[k] * x[l] * m0) / ((x[j] - x[k]) * (x[j] - x[l]));
    }
    Ok(BCoefficients { b })
}

/// Confluent fallback: coincident `Λ²` are merged into one node and the
/// reduced moment system is solved. Merged-away slots get weight 0.
pub fn b_coefficients_merged(
    roots: &SectorRoots,
    params: &PhysParams,
    occ: FockLabel,
) -> (SectorRoots, BCoefficients) {
    let [m0, m1, _] = moments(params, occ);
    let x = roots.squares();
    let gap = DEGENERACY_TOL * roots.scale;
    let mut nodes: Vec<(f64, usize)> = Vec::new();
    for &xi in &x {
        match nodes.iter_mut().find(|(n, _)| (n - xi).abs() < gap) {
            Some((n, count)) => {
                *n = (*n * *count as f64 + xi) / (*count as f64 + 1.0);
                *count += 1;
            }
            None => nodes.push((xi, 1)),
        }
    }
    let mut lambda = [0.0; 3];
    let mut b = [0.0; 3];
    match nodes.as_slice() {
        [(n, _)] => {
            lambda[0] = n.max(0.0).sqrt();
            b[0] = m0;
        }
        [(n0, _), (n1, _)] => {
            lambda[0] = n0.max(0.0).sqrt();
            lambda[1] = n1.max(0.0).sqrt();
            b[0] = (m1 - n1 * m0) / (n0 - n1);
            b[1] = (m1 - n0 * m0) / (n1 - n0);
        }
        _ => {
            let full = SectorRoots { degenerate: false, ..*roots };
            let coeffs = b_coefficients(&full, params, occ).expect("distinct nodes");
            return (full, coeffs);
        }
    }
    let merged = SectorRoots { lambda, degenerate: true, scale: roots.scale };
    (merged, BCoefficients { b })
}

/// One diagonal sector of `K_1`: `Σ B_j cos(Λ_j t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorSolution {
    pub label: FockLabel,
    pub coefficients: SectorCoefficients,
    pub roots: SectorRoots,
    pub b: BCoefficients,
}

impl SectorSolution {
    pub fn new(params: &PhysParams, label: FockLabel) -> Result<Self> {
        let coefficients = sector_coefficients(params, label)?;
        let roots = characteristic_roots(&coefficients)?;
        let (roots, b) = match b_coefficients(&roots, params, label) {
            Ok(b) => (roots, b),
            Err(CpsError::DegenerateSector(sq)) => {
                log::debug!("degenerate sector {label}: Λ² = {sq:?}, merging nodes");
                b_coefficients_merged(&roots, params, label)
            }
            Err(e) => return Err(e),
        };
        Ok(SectorSolution { label, coefficients, roots, b })
    }

    pub fn value(&self, t: f64) -> f64 {
        self.b
            .b
            .iter()
            .zip(&self.roots.lambda)
            .map(|(b, l)| b * (l * t).cos())
            .sum()
    }

    pub fn derivative(&self, t: f64) -> f64 {
        -self
            .b
            .b
            .iter()
            .zip(&self.roots.lambda)
            .map(|(b, l)| b * l * (l * t).sin())
            .sum::<f64>()
    }
}

/// All sector solutions for a parameter set, reusable across times.
#[derive(Debug, Clone)]
pub struct AnalyticKraus {
    params: PhysParams,
    space: FockSpace,
    sectors: Vec<SectorSolution>,
}

impl AnalyticKraus {
    pub fn new(params: &PhysParams) -> Result<Self> {
        require_resonance(params)?;
        let space = params.space()?;
        let sectors = space
            .labels()
            .map(|l| SectorSolution::new(params, l))
            .collect::<Result<_>>()?;
        Ok(AnalyticKraus { params: *params, space, sectors })
    }

    pub fn sectors(&self) -> &[SectorSolution] {
        &self.sectors
    }

    pub fn k1(&self, t: f64) -> FieldOperator {
        let diag = nalgebra::DVector::from_iterator(
            self.sectors.len(),
            self.sectors.iter().map(|s| C64::new(s.value(t), 0.0)),
        );
        DMatrix::from_diagonal(&diag)
    }

    pub fn k2(&self, t: f64) -> FieldOperator {
        let d = self.space.field_dim();
        let mut k2 = DMatrix::zeros(d, d);
        let ga = self.params.g_a;
        if ga.norm() == 0.0 {
            return k2;
        }
        for (s, sector) in self.sectors.iter().enumerate() {
            let Some(lowered) = sector.label.lowered(ModeId::A) else { continue };
            let target = self.space.index(lowered).expect("lowered label in range");
            // a_a contributes √n_a; (a_a a_a†) on the lowered state is n_a.
            let n_a = sector.label.n_a() as f64;
            k2[(target, s)] = C64::i() * sector.derivative(t) / (ga.conj() * n_a.sqrt());
        }
        k2
    }
}

/// Diagonal `K_1(t)` from the sector solutions.
pub fn k1_analytic(params: &PhysParams, t: f64) -> Result<FieldOperator> {
    Ok(AnalyticKraus::new(params)?.k1(t))
}

/// Jump operator `K_2(t)` obtained from the time derivative of `K_1`.
pub fn k2_analytic(params: &PhysParams, t: f64) -> Result<FieldOperator> {
    Ok(AnalyticKraus::new(params)?.k2(t))
}

/// Strong-drive approximation of `K_1(t)` on the qubit space, valid for
/// `|Ω| ≫ |g|` with equal couplings and equal Rabi magnitudes.
pub fn k1_approx(params: &PhysParams, t: f64) -> Result<FieldOperator> {
    let (g, omega) = params.gate_regime()?;
    if omega == 0.0 {
        return Err(CpsError::Regime("strong-drive form needs |Ω| > 0".into()));
    }
    let eps = g * g / (2.0 * omega * omega);
    let fast = (SQRT_2 * omega * t).cos();
    let slow = (g * t / SQRT_2).cos();
    let slowest = (g * g * t / (SQRT_2 * omega)).cos();

    let lam = (2.0 * omega * omega + g * g).sqrt();
    let w = g * g / (lam * lam);
    let one_photon_a = 1.0 - w + w * (lam * t).cos();
    let two_photon = 1.0 + eps * (fast + slow - 2.0);
    let three_photon = slowest + eps * (fast - slowest);

    let diag = [1.0, 1.0, 1.0, 1.0, one_photon_a, two_photon, two_photon, three_photon];
    let diag = nalgebra::DVector::from_iterator(8, diag.iter().map(|&v| C64::new(v, 0.0)));
    Ok(DMatrix::from_diagonal(&diag))
}

/// Closed-form non-zero entries of `K_2(t)` on the qubit space when
/// `|Ω_1| = |Ω_2| = |g_a| = |g_b| = |g_c| = |g|` (real positive couplings).
pub fn k2_equal_coupling(g: f64, t: f64) -> FieldOperator {
    let i = C64::i();
    let s3 = 3f64.sqrt();
    let up = (2.0 + SQRT_2).sqrt();
    let dn = (2.0 - SQRT_2).sqrt();
    let e15 = -i / s3 * (s3 * g * t).sin();
    let e26 = -i / 4.0 * (up * (up * g * t).sin() + dn * (dn * g * t).sin());
    let e48 = -i * SQRT_2 / s3 * (s3 * g * t / SQRT_2).sin() * (g * t / SQRT_2).cos();
    let mut k2 = DMatrix::zeros(8, 8);
    k2[(0, 4)] = e15;
    k2[(1, 5)] = e26;
    k2[(2, 6)] = e26;
    k2[(3, 7)] = e48;
    k2
}
