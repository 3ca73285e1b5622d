//! Generalized flag specs: a finite basis modification of E plus a coloring.
//!
//! The flag encoded by a spec has positions indexed by the label values; for
//! a label a the pair of spaces is F′_a = span{l_i : label(i) < a} and
//! F″_a = span{l_i : label(i) ≤ a}.  Everything downstream (truncation,
//! commensurability, cells, Picard data) works through these two span
//! families at finite levels.

pub mod chain;
mod compat;
mod queries;

pub use chain::{
    flag_of_chain, flag_of_spec_chain, induced_chain, partition_class, ChainSpec, IndexSet,
    MembershipProfile,
};
pub use compat::compatible_basis_finite;
pub use queries::{dual, is_flag, is_maximal, reconstruct_check};

use crate::labels::{Coloring, PositionLabel};
use crate::linalg::{Matrix, Scalar, Vector};
use crate::{Error, Result};
use std::collections::{BTreeMap, BTreeSet};

/// A basis of V that differs from the standard basis in finitely many
/// vectors: slot i carries `replacements[i]` when present, e_i otherwise.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct BasisSpec {
    replacements: BTreeMap<i64, Vector>,
}

impl BasisSpec {
    pub fn identity() -> Self {
        BasisSpec::default()
    }

    pub fn with_replacements<I: IntoIterator<Item = (i64, Vector)>>(pairs: I) -> Self {
        BasisSpec {
            replacements: pairs.into_iter().collect(),
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.replacements.is_empty()
    }

    pub fn replaced(&self) -> impl Iterator<Item = (i64, &Vector)> {
        self.replacements.iter().map(|(s, v)| (*s, v))
    }

    pub fn vector_at(&self, i: i64) -> Vector {
        self.replacements
            .get(&i)
            .cloned()
            .unwrap_or_else(|| Vector::unit(i))
    }

    /// Replaced slots together with every slot any replacement touches.
    pub fn touched_slots(&self) -> BTreeSet<i64> {
        let mut slots: BTreeSet<i64> = self.replacements.keys().copied().collect();
        for v in self.replacements.values() {
            slots.extend(v.support());
        }
        slots
    }

    pub fn max_touched(&self) -> i64 {
        self.touched_slots().last().copied().unwrap_or(0)
    }

    /// Change-of-basis determinant on the touched block; the family is a
    /// basis of V exactly when this is nonzero.
    pub fn det(&self) -> Result<Scalar> {
        let slots: Vec<i64> = self.touched_slots().into_iter().collect();
        let cols: Vec<Vector> = slots.iter().map(|i| self.vector_at(*i)).collect();
        let d = Matrix::from_columns(&cols, &slots).det()?;
        if d.is_zero() {
            return Err(Error::SingularBasis);
        }
        Ok(d)
    }

    fn drop_identity_replacements(&mut self) {
        self.replacements.retain(|i, v| *v != Vector::unit(*i));
    }
}

/// The universal flag representation: which basis, and which label each
/// basis slot carries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneralizedFlagSpec {
    pub basis: BasisSpec,
    pub coloring: Coloring,
}

impl GeneralizedFlagSpec {
    pub fn new(basis: BasisSpec, coloring: Coloring) -> Self {
        GeneralizedFlagSpec { basis, coloring }
    }

    pub fn from_coloring(coloring: Coloring) -> Self {
        GeneralizedFlagSpec {
            basis: BasisSpec::identity(),
            coloring,
        }
    }

    /// Smallest level whose window contains the coloring window and every
    /// basis modification.
    pub fn n_spec(&self) -> i64 {
        self.coloring.window_len().max(self.basis.max_touched())
    }

    pub fn vector_at(&self, i: i64) -> Vector {
        self.basis.vector_at(i)
    }

    pub fn vectors_up_to(&self, n: i64) -> Vec<Vector> {
        (1..=n).map(|i| self.vector_at(i)).collect()
    }

    /// Basis of F′_a ∩ V_n (requires n ≥ n_spec, where the identification
    /// with {l_i : i ≤ n, label(i) < a} is exact).
    pub fn gens_below(&self, a: &PositionLabel, n: i64) -> Vec<Vector> {
        (1..=n)
            .filter(|i| self.coloring.label(*i) < *a)
            .map(|i| self.vector_at(i))
            .collect()
    }

    /// Basis of F″_a ∩ V_n.
    pub fn gens_through(&self, a: &PositionLabel, n: i64) -> Vec<Vector> {
        (1..=n)
            .filter(|i| self.coloring.label(*i) <= *a)
            .map(|i| self.vector_at(i))
            .collect()
    }

    /// Labels occupied among indices 1..=n, ascending.
    pub fn visible_labels(&self, n: i64) -> Vec<PositionLabel> {
        self.coloring.distinct_labels_up_to(n)
    }
}

/// Outcome of validation: the canonical spec plus the recorded basis data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub spec: GeneralizedFlagSpec,
    pub basis_det: Scalar,
    pub n_spec: i64,
}

/// Checks basis invertibility and label consistency, returning the spec in
/// canonical form (identity replacements dropped, window trimmed, modulus
/// reduced).
pub fn validate_spec(s: &GeneralizedFlagSpec) -> Result<ValidationReport> {
    let mut spec = s.clone();
    spec.basis.drop_identity_replacements();
    for (slot, v) in spec.basis.replaced() {
        if slot < 1 {
            return Err(Error::InvalidSpec(format!("replaced slot {slot} < 1")));
        }
        if !v.supported_within(|s| s >= 1) {
            return Err(Error::InvalidSpec(format!(
                "replacement for slot {slot} leaves the index range"
            )));
        }
    }
    let basis_det = spec.basis.det()?;
    spec.coloring.canonicalize();
    spec.coloring.validate()?;
    let n_spec = spec.n_spec();
    Ok(ValidationReport {
        spec,
        basis_det,
        n_spec,
    })
}
