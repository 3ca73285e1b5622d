//! The finite-level tower under a generalized flag: truncations to V_n, the
//! level-to-level embedding, and lifting a finite flag back to a spec.
//!
//! Truncation sends a flag F to the chain {G ∩ V_n : G ∈ F} of distinct
//! subspaces; for n at or above the spec level this chain is computed
//! exactly from the spec basis.  The embedding into level n+1 inserts
//! e_{n+1} at the position its label dictates, so that truncations at
//! consecutive levels commute with it.

mod cells;
mod group;

pub use cells::{big_cell_coords, cell_apply, find_covering_cell, CellCoords, CellMap, CellMembership};
pub use group::{mapping_element, stabilizer_dim, GroupElement};

use crate::flags::{validate_spec, BasisSpec, GeneralizedFlagSpec};
use crate::labels::{Coloring, PositionLabel};
use crate::linalg::{in_span, rank, span_eq, Echelon, Vector};
use crate::{Error, Result};

/// A flag of V_n: the distinct nonzero members in order, each carrying the
/// position label it came from.  The zero member is implicit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteFlag {
    pub level: i64,
    pub labels: Vec<PositionLabel>,
    pub steps: Vec<Vec<Vector>>,
}

impl FiniteFlag {
    /// Dimension sequence 0 = d_0 < d_1 < … < d_s = level.
    pub fn dims(&self) -> Vec<usize> {
        let mut out = vec![0];
        out.extend(self.steps.iter().map(|s| s.len()));
        out
    }

    pub fn validate(&self) -> Result<()> {
        if self.labels.len() != self.steps.len() {
            return Err(Error::InvalidSpec("one label per step required".into()));
        }
        if !self.labels.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidSpec("step labels must strictly increase".into()));
        }
        let dims = self.dims();
        if !dims.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::NotAChain);
        }
        if *dims.last().unwrap() != self.level.max(0) as usize {
            return Err(Error::InvalidSpec("top step must be all of V_n".into()));
        }
        for st in &self.steps {
            if rank(st) != st.len() {
                return Err(Error::NotIndependent);
            }
            if !st.iter().all(|v| v.supported_within(|s| 1 <= s && s <= self.level)) {
                return Err(Error::InvalidSpec("step vectors must live in V_n".into()));
            }
        }
        for w in self.steps.windows(2) {
            if !w[0].iter().all(|v| in_span(v, &w[1])) {
                return Err(Error::NotAChain);
            }
        }
        Ok(())
    }

    /// Same chain of subspaces with the same labels.
    pub fn same_flag(&self, other: &FiniteFlag) -> bool {
        self.level == other.level
            && self.labels == other.labels
            && self.steps.len() == other.steps.len()
            && self.steps.iter().zip(&other.steps).all(|(a, b)| span_eq(a, b))
    }

    /// Same chain of subspaces, labels ignored.
    pub fn steps_agree(&self, other: &FiniteFlag) -> bool {
        self.level == other.level
            && self.steps.len() == other.steps.len()
            && self.steps.iter().zip(&other.steps).all(|(a, b)| span_eq(a, b))
    }

    /// For each step, vectors extending the previous step to it.
    pub fn step_extensions(&self) -> Result<Vec<Vec<Vector>>> {
        let mut reducer = Echelon::new();
        let mut out = Vec::with_capacity(self.steps.len());
        for (i, st) in self.steps.iter().enumerate() {
            let mut new = Vec::new();
            for v in st {
                if reducer.insert(v) {
                    new.push(v.clone());
                }
            }
            let need = self.dims()[i + 1] - self.dims()[i];
            if new.len() != need {
                return Err(Error::NotAChain);
            }
            out.push(new);
        }
        Ok(out)
    }
}

/// The chain {G ∩ V_n : G a member of the flag of s}, in position order.
pub fn truncate(s: &GeneralizedFlagSpec, n: i64) -> Result<FiniteFlag> {
    let report = validate_spec(s)?;
    if n < report.n_spec {
        return Err(Error::LevelTooSmall {
            required: report.n_spec.max(0) as usize,
            got: n.max(0) as usize,
        });
    }
    let f = report.spec;
    let labels = f.coloring.distinct_labels_up_to(n);
    let steps = labels.iter().map(|a| f.gens_through(a, n)).collect();
    Ok(FiniteFlag { level: n, labels, steps })
}

/// What the embedding did with e_{n+1}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmbedReport {
    pub flag: FiniteFlag,
    /// 1-based index of the step that absorbed e_{n+1}.
    pub join_position: usize,
    /// Whether a new step was created (the step count grew by one).
    pub class_added: bool,
}

/// Embed a level-n flag of the reference type into level n+1: e_{n+1} lands
/// at the position the reference coloring assigns to index n+1, either
/// joining an existing step or starting a new one.
pub fn embed_step(f: &FiniteFlag, s: &GeneralizedFlagSpec) -> Result<EmbedReport> {
    let fs = validate_spec(s)?.spec;
    let t = truncate(&fs, f.level)?;
    if t.labels != f.labels || t.dims() != f.dims() {
        return Err(Error::TypeMismatch(format!(
            "finite flag does not have the reference type at level {}",
            f.level
        )));
    }
    let a = fs.coloring.label(f.level + 1);
    let e_new = Vector::unit(f.level + 1);
    let mut labels = f.labels.clone();
    let mut steps = f.steps.clone();
    let (join_position, class_added) = match labels.binary_search(&a) {
        Ok(i) => {
            for st in steps[i..].iter_mut() {
                st.push(e_new.clone());
            }
            (i + 1, false)
        }
        Err(i) => {
            let mut base = if i == 0 { Vec::new() } else { steps[i - 1].clone() };
            base.push(e_new.clone());
            labels.insert(i, a);
            steps.insert(i, base);
            for st in steps[i + 1..].iter_mut() {
                st.push(e_new.clone());
            }
            (i + 1, true)
        }
    };
    Ok(EmbedReport {
        flag: FiniteFlag { level: f.level + 1, labels, steps },
        join_position,
        class_added,
    })
}

/// The unique spec with the given truncation at level n and the tail of the
/// reference: window basis read off the step extensions, labels matched to
/// the reference position-wise.
pub fn lift(f: &FiniteFlag, s: &GeneralizedFlagSpec) -> Result<GeneralizedFlagSpec> {
    let fs = validate_spec(s)?.spec;
    let n = f.level;
    let t = truncate(&fs, n)?;
    if t.labels != f.labels || t.dims() != f.dims() {
        return Err(Error::TypeMismatch(format!(
            "finite flag does not have the reference type at level {n}"
        )));
    }
    f.validate()?;
    let ext = f.step_extensions()?;
    let mut replacements = Vec::new();
    for (i, a) in f.labels.iter().enumerate() {
        let slots = (1..=n).filter(|&j| fs.coloring.label(j) == *a);
        for (slot, v) in slots.zip(&ext[i]) {
            replacements.push((slot, v.clone()));
        }
    }
    let window: Vec<PositionLabel> = (1..=n).map(|j| fs.coloring.label(j)).collect();
    let mut coloring = Coloring::new(window, fs.coloring.tail.clone());
    coloring.canonicalize();
    let spec = GeneralizedFlagSpec::new(BasisSpec::with_replacements(replacements), coloring);
    Ok(validate_spec(&spec)?.spec)
}
