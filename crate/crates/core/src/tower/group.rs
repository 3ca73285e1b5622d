//! Finitary transformations of V: an invertible block on a window of the
//! basis, the identity beyond it.  These realize transitivity on
//! commensurable flags and carry the stabilizer computations.

use crate::commens::{commensurable, CommDecision};
use crate::flags::{validate_spec, BasisSpec, GeneralizedFlagSpec};
use crate::linalg::{rank, solve_homogeneous, Matrix, Scalar, Vector};
use crate::tower::truncate;
use crate::{Error, Result};

/// An element acting as `block` on span{e_1..e_window} and fixing every
/// higher e_i.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupElement {
    pub window: i64,
    pub block: Matrix,
}

impl GroupElement {
    pub fn identity(window: i64) -> Self {
        GroupElement {
            window,
            block: Matrix::identity(window.max(0) as usize),
        }
    }

    pub fn det(&self) -> Result<Scalar> {
        self.block.det()
    }

    pub fn validate(&self) -> Result<()> {
        if self.block.rows() != self.window.max(0) as usize || self.block.rows() != self.block.cols() {
            return Err(Error::NonSquare {
                rows: self.block.rows(),
                cols: self.block.cols(),
            });
        }
        if self.det()? != Scalar::one() {
            return Err(Error::DeterminantObstruction);
        }
        Ok(())
    }

    pub fn apply_vector(&self, v: &Vector) -> Vector {
        let n = self.window;
        let coords: Vec<Scalar> = (1..=n).map(|j| v.coeff(j)).collect();
        let image = self.block.apply_to_vector(&coords);
        let mut out = v.restrict(|s| s < 1 || s > n);
        for (k, c) in image.into_iter().enumerate() {
            out.add_to_slot(k as i64 + 1, c);
        }
        out
    }

    /// The spec of the image flag: same coloring, transported basis.
    pub fn apply_spec(&self, s: &GeneralizedFlagSpec) -> Result<GeneralizedFlagSpec> {
        let f = validate_spec(s)?.spec;
        let reach = self.window.max(f.n_spec());
        let replacements = (1..=reach).map(|j| (j, self.apply_vector(&f.vector_at(j))));
        let image = GeneralizedFlagSpec::new(
            BasisSpec::with_replacements(replacements),
            f.coloring.clone(),
        );
        Ok(validate_spec(&image)?.spec)
    }
}

/// A finitary element g with g(flag of s1) = flag of s2 and det 1, built by
/// transporting step-extension bases at the witness level and rescaling one
/// basis vector to fix the determinant.
pub fn mapping_element(s1: &GeneralizedFlagSpec, s2: &GeneralizedFlagSpec) -> Result<GroupElement> {
    let CommDecision::Commensurable(w) = commensurable(s1, s2)? else {
        return Err(Error::Incommensurable);
    };
    let n = w.u_level.max(1);
    let t1 = truncate(s1, n)?;
    let t2 = truncate(s2, n)?;
    if t1.dims() != t2.dims() {
        return Err(Error::Incommensurable);
    }
    let u: Vec<Vector> = t1.step_extensions()?.concat();
    let mut v: Vec<Vector> = t2.step_extensions()?.concat();
    let slots: Vec<i64> = (1..=n).collect();
    let mu = Matrix::from_columns(&u, &slots);
    let delta = Matrix::from_columns(&v, &slots).det()? / mu.det()?;
    // Rescaling one extension vector leaves every step span unchanged.
    v[0] = v[0].scale(&delta.recip());
    let block = Matrix::from_columns(&v, &slots).mul(&mu.inverse().expect("step basis of V_n"));
    let g = GroupElement { window: n, block };
    g.validate()?;
    Ok(g)
}

/// Dimension of the Lie-algebra stabilizer of truncate(s, n) inside the
/// trace-zero n×n matrices: n² minus the rank of the preservation conditions
/// X·step ⊆ step together with tr X = 0.
pub fn stabilizer_dim(s: &GeneralizedFlagSpec, n: i64) -> Result<i64> {
    let t = truncate(s, n)?;
    let slots: Vec<i64> = (1..=n).collect();
    // Unknown x_{kl} lives at flattened slot (k-1)·n + l.
    let mut conditions: Vec<Vector> = Vec::new();
    for step in &t.steps {
        if step.len() == n.max(0) as usize {
            continue;
        }
        let annihilator = solve_homogeneous(step, &slots);
        for sv in step {
            for y in &annihilator {
                let mut row = Vector::zero();
                for (k, yk) in y.iter() {
                    for (l, sl) in sv.iter() {
                        row.add_to_slot((k - 1) * n + l, yk * sl);
                    }
                }
                conditions.push(row);
            }
        }
    }
    let mut trace = Vector::zero();
    for k in 1..=n {
        trace.add_to_slot((k - 1) * n + k, Scalar::one());
    }
    conditions.push(trace);
    Ok(n * n - rank(&conditions) as i64)
}
