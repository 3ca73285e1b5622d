//! Big cells: coordinates for flags commensurable with a reference F,
//! relative to a basis L defining the cell's center.
//!
//! The center is the flag spanned by the L-vectors under F's coloring.  A
//! flag g lies in the cell when every step of g is a graph over the matching
//! lower L-slices, transversal to the span of the higher slices; the cell
//! coordinates record, per position, the finite-rank correction map from the
//! strictly-lower part into that position's slice.

use std::collections::BTreeMap;

use crate::commens::commensurable;
use crate::flags::{validate_spec, BasisSpec, GeneralizedFlagSpec};
use crate::labels::PositionLabel;
use crate::linalg::{rank, solve_linear, span_intersect, Matrix, Scalar, Vector};
use crate::tower::truncate;
use crate::{Error, Result};

/// Correction map into one position's slice, in L-slot coordinates:
/// entries (input slot, output slot, coefficient), inputs strictly below the
/// position, outputs at it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellMap {
    pub position: PositionLabel,
    pub entries: Vec<(i64, i64, Scalar)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellCoords {
    pub maps: Vec<CellMap>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CellMembership {
    InCell(CellCoords),
    /// Transversality fails at this position: the step meets the span of the
    /// higher slices in this dimension instead of 0.
    NotInCell { position: PositionLabel, excess: usize },
}

impl CellMembership {
    pub fn coords(&self) -> Option<&CellCoords> {
        match self {
            CellMembership::InCell(c) => Some(c),
            CellMembership::NotInCell { .. } => None,
        }
    }
}

/// The flag of the corrected basis: slot j carries l_j plus its recorded
/// corrections, under the reference coloring.
pub fn cell_apply(
    coords: &CellCoords,
    l: &BasisSpec,
    f: &GeneralizedFlagSpec,
) -> Result<GeneralizedFlagSpec> {
    let rf = validate_spec(f)?;
    let mut reach = rf.n_spec.max(l.max_touched());
    for m in &coords.maps {
        for (i, o, _) in &m.entries {
            reach = reach.max(*i).max(*o);
        }
    }
    let replacements = (1..=reach).map(|j| {
        let mut v = l.vector_at(j);
        for m in &coords.maps {
            for (i, o, c) in &m.entries {
                if *i == j {
                    v = v.add(&l.vector_at(*o).scale(c));
                }
            }
        }
        (j, v)
    });
    let spec = GeneralizedFlagSpec::new(
        BasisSpec::with_replacements(replacements),
        rf.spec.coloring.clone(),
    );
    Ok(validate_spec(&spec)?.spec)
}

/// Recover cell coordinates of g in the cell of (F, L), or certify that g
/// lies outside it.
pub fn big_cell_coords(
    g: &GeneralizedFlagSpec,
    l: &BasisSpec,
    f: &GeneralizedFlagSpec,
) -> Result<CellMembership> {
    let rg = validate_spec(g)?;
    let rf = validate_spec(f)?;
    // The center must be a well-formed flag of F's shape.
    let center = validate_spec(&GeneralizedFlagSpec::new(l.clone(), rf.spec.coloring.clone()))?;
    if !commensurable(g, f)?.is_commensurable() {
        return Err(Error::Incommensurable);
    }
    let m = rg.n_spec.max(rf.n_spec).max(center.n_spec).max(1);
    let tg = truncate(&rg.spec, m)?;
    let tf = truncate(&rf.spec, m)?;
    if tg.dims() != tf.dims() {
        return Err(Error::Incommensurable);
    }
    // Work in L-coordinates, where the center is the standard slot flag.
    let slots: Vec<i64> = (1..=m).collect();
    let cols: Vec<Vector> = slots.iter().map(|&j| center.spec.vector_at(j)).collect();
    let to_l = Matrix::from_columns(&cols, &slots)
        .inverse()
        .ok_or(Error::SingularBasis)?;
    let in_l = |v: &Vector| -> Vector {
        let coords: Vec<Scalar> = slots.iter().map(|&j| v.coeff(j)).collect();
        Vector::from_pairs(
            to_l.apply_to_vector(&coords)
                .into_iter()
                .enumerate()
                .map(|(k, c)| (k as i64 + 1, c)),
        )
    };
    let gsteps: Vec<Vec<Vector>> = tg
        .steps
        .iter()
        .map(|st| st.iter().map(in_l).collect())
        .collect();
    let position_of = |j: i64| rf.spec.coloring.label(j);
    for (i, a) in tf.labels.iter().enumerate() {
        let higher: Vec<Vector> = slots
            .iter()
            .filter(|&&j| position_of(j) > *a)
            .map(|&j| Vector::unit(j))
            .collect();
        let excess = rank(&span_intersect(&gsteps[i], &higher));
        if excess != 0 {
            return Ok(CellMembership::NotInCell { position: a.clone(), excess });
        }
    }
    let mut grouped: BTreeMap<PositionLabel, Vec<(i64, i64, Scalar)>> = BTreeMap::new();
    for (i, a) in tf.labels.iter().enumerate() {
        let low: Vec<i64> = slots.iter().copied().filter(|&j| position_of(j) <= *a).collect();
        for &j in low.iter().filter(|&&j| position_of(j) == *a) {
            // The step projects isomorphically onto the low slots, so the
            // graph vector over l_j exists and is unique.
            let projected: Vec<Vector> = gsteps[i]
                .iter()
                .map(|b| b.restrict(|s| low.binary_search(&s).is_ok()))
                .collect();
            let ys = solve_linear(&projected, &Vector::unit(j))
                .expect("transversal step projects onto the low slots");
            let mut gamma = Vector::zero();
            for (y, b) in ys.iter().zip(&gsteps[i]) {
                gamma = gamma.add(&b.scale(y));
            }
            for (k, c) in gamma.iter() {
                if position_of(k) > *a {
                    grouped
                        .entry(position_of(k))
                        .or_default()
                        .push((j, k, c.clone()));
                }
            }
        }
    }
    let maps = grouped
        .into_iter()
        .map(|(position, mut entries)| {
            entries.sort_by(|x, y| (x.0, x.1).cmp(&(y.0, y.1)));
            CellMap { position, entries }
        })
        .collect();
    Ok(CellMembership::InCell(CellCoords { maps }))
}

/// A basis whose cell contains g: step-extension vectors of g assigned to
/// the reference slots position by position.
pub fn find_covering_cell(
    g: &GeneralizedFlagSpec,
    f: &GeneralizedFlagSpec,
) -> Result<BasisSpec> {
    let rg = validate_spec(g)?;
    let rf = validate_spec(f)?;
    if !commensurable(g, f)?.is_commensurable() {
        return Err(Error::Incommensurable);
    }
    let m = rg.n_spec.max(rf.n_spec).max(1);
    let tg = truncate(&rg.spec, m)?;
    let tf = truncate(&rf.spec, m)?;
    if tg.dims() != tf.dims() {
        return Err(Error::Incommensurable);
    }
    let ext = tg.step_extensions()?;
    let mut replacements = Vec::new();
    for (i, a) in tf.labels.iter().enumerate() {
        let slots = (1..=m).filter(|&j| rf.spec.coloring.label(j) == *a);
        for (slot, v) in slots.zip(&ext[i]) {
            if v != &Vector::unit(slot) {
                replacements.push((slot, v.clone()));
            }
        }
    }
    let l = BasisSpec::with_replacements(replacements);
    l.det()?;
    Ok(l)
}
