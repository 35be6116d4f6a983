//! Truncated three-mode Fock space, atomic levels and joint-space indexing.
//!
//! Field states are ordered in mixed radix with mode `a` most significant:
//! `s = n_a·(N+1)² + n_b·(N+1) + n_c`, where `N` is the truncation order.
//! For the qubit space (`N = 1`) this is the binary reading of `|n_a n_b n_c⟩`,
//! so `|111⟩` is `s = 7`. All indices are 0-based.
//!
//! The joint atom ⊗ field index is `(level − 1)·D_F + s` with `D_F = (N+1)³`.

use std::fmt;

use crate::error::{CpsError, Result};

/// Number of atomic levels in the model.
pub const NUM_LEVELS: usize = 6;

/// Dimension of the three-qubit field space.
pub const QUBIT_DIM: usize = 8;

/// Cavity mode. The order `A < B < C` fixes the tensor-product order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ModeId {
    A,
    B,
    C,
}

impl ModeId {
    pub const ALL: [ModeId; 3] = [ModeId::A, ModeId::B, ModeId::C];

    /// Position in the occupation triple.
    pub fn slot(self) -> usize {
        match self {
            ModeId::A => 0,
            ModeId::B => 1,
            ModeId::C => 2,
        }
    }
}

/// Atomic level `|k⟩_A`, `k ∈ {1,…,6}`. Level 1 is the initial level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AtomLevel(u8);

impl AtomLevel {
    pub const GROUND: AtomLevel = AtomLevel(1);

    pub fn new(level: usize) -> Result<Self> {
        if (1..=NUM_LEVELS).contains(&level) {
            Ok(AtomLevel(level as u8))
        } else {
            Err(CpsError::Domain(format!(
                "atomic level {level} outside 1..={NUM_LEVELS}"
            )))
        }
    }

    /// 1-based level number.
    pub fn number(self) -> usize {
        self.0 as usize
    }

    /// 0-based position.
    pub fn offset(self) -> usize {
        self.0 as usize - 1
    }

    pub fn all() -> impl Iterator<Item = AtomLevel> {
        (1..=NUM_LEVELS as u8).map(AtomLevel)
    }
}

impl fmt::Display for AtomLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|{}⟩_A", self.0)
    }
}

/// Occupation triple `(n_a, n_b, n_c)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct FockLabel {
    pub occ: [usize; 3],
}

impl FockLabel {
    pub const fn new(n_a: usize, n_b: usize, n_c: usize) -> Self {
        FockLabel { occ: [n_a, n_b, n_c] }
    }

    pub fn get(&self, mode: ModeId) -> usize {
        self.occ[mode.slot()]
    }

    pub fn n_a(&self) -> usize {
        self.occ[0]
    }

    pub fn n_b(&self) -> usize {
        self.occ[1]
    }

    pub fn n_c(&self) -> usize {
        self.occ[2]
    }

    pub fn max_occupation(&self) -> usize {
        self.occ.iter().copied().max().unwrap_or(0)
    }

    /// Label with one photon removed from `mode`, if there is one.
    pub fn lowered(&self, mode: ModeId) -> Option<FockLabel> {
        let mut occ = self.occ;
        let slot = &mut occ[mode.slot()];
        *slot = slot.checked_sub(1)?;
        Some(FockLabel { occ })
    }
}

impl fmt::Display for FockLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|{}{}{}⟩", self.occ[0], self.occ[1], self.occ[2])
    }
}

/// Field index of `label` for truncation order `n_max`.
pub fn field_index(label: FockLabel, n_max: usize) -> Result<usize> {
    if let Some(&n) = label.occ.iter().find(|&&n| n > n_max) {
        return Err(CpsError::Domain(format!(
            "occupation {n} exceeds truncation order {n_max}"
        )));
    }
    let radix = n_max + 1;
    Ok(label.occ.iter().fold(0, |acc, &n| acc * radix + n))
}

/// Inverse of [`field_index`].
pub fn label_from_index(index: usize, n_max: usize) -> Result<FockLabel> {
    let radix = n_max + 1;
    if index >= radix.pow(3) {
        return Err(CpsError::Domain(format!(
            "field index {index} out of range for truncation order {n_max}"
        )));
    }
    Ok(FockLabel::new(
        index / (radix * radix),
        (index / radix) % radix,
        index % radix,
    ))
}

/// All labels with occupations `≤ n_max`, in index order.
pub fn enumerate_basis(n_max: usize) -> Result<Vec<FockLabel>> {
    if n_max < 1 {
        return Err(CpsError::Domain("truncation order must be ≥ 1".into()));
    }
    let radix = n_max + 1;
    Ok((0..radix.pow(3))
        .map(|i| FockLabel::new(i / (radix * radix), (i / radix) % radix, i % radix))
        .collect())
}

/// Truncated Fock space together with the joint atom ⊗ field layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockSpace {
    n_max: usize,
}

impl FockSpace {
    pub fn new(n_max: usize) -> Result<Self> {
        if n_max < 1 {
            return Err(CpsError::Domain("truncation order must be ≥ 1".into()));
        }
        Ok(FockSpace { n_max })
    }

    pub fn qubit() -> Self {
        FockSpace { n_max: 1 }
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// `(N+1)³`
    pub fn field_dim(&self) -> usize {
        (self.n_max + 1).pow(3)
    }

    /// `6·(N+1)³`
    pub fn joint_dim(&self) -> usize {
        NUM_LEVELS * self.field_dim()
    }

    pub fn index(&self, label: FockLabel) -> Result<usize> {
        field_index(label, self.n_max)
    }

    pub fn label(&self, index: usize) -> Result<FockLabel> {
        label_from_index(index, self.n_max)
    }

    /// Labels in index order.
    pub fn labels(&self) -> impl Iterator<Item = FockLabel> + '_ {
        let radix = self.n_max + 1;
        (0..self.field_dim())
            .map(move |i| FockLabel::new(i / (radix * radix), (i / radix) % radix, i % radix))
    }

    /// Index of a qubit-sector state (occupations ≤ 1) given by its 3-bit code.
    pub fn qubit_state_index(&self, code: usize) -> Result<usize> {
        let label = label_from_index(code, 1)?;
        self.index(label)
    }

    pub fn joint_index(&self, level: AtomLevel, field: usize) -> usize {
        debug_assert!(field < self.field_dim());
        level.offset() * self.field_dim() + field
    }

    pub fn split_joint(&self, index: usize) -> Result<(AtomLevel, usize)> {
        if index >= self.joint_dim() {
            return Err(CpsError::Domain(format!("joint index {index} out of range")));
        }
        let level = AtomLevel::new(index / self.field_dim() + 1)?;
        Ok((level, index % self.field_dim()))
    }
}
