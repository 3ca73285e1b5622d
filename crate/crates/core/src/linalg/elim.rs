use super::{Scalar, Vector};
use std::collections::BTreeSet;

/// Incremental Gauss-Jordan reduction over sparse rational vectors.
///
/// Pivot slots are chosen minimal under a two-level key: slots listed in
/// `front` sort before all others, ties broken by the slot itself.  With an
/// empty front this is plain ascending-slot reduction; the window
/// intersection routines put the slots *outside* the window in front, so a
/// row whose pivot lands inside the window is supported inside the window
/// entirely.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    front: BTreeSet<i64>,
    rows: Vec<Vector>,
    pivots: Vec<i64>,
}

impl Echelon {
    pub fn new() -> Self {
        Echelon::default()
    }

    pub fn with_front(front: BTreeSet<i64>) -> Self {
        Echelon {
            front,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    fn key(&self, slot: i64) -> (u8, i64) {
        (u8::from(!self.front.contains(&slot)), slot)
    }

    fn pivot_slot(&self, v: &Vector) -> Option<i64> {
        v.support().min_by_key(|s| self.key(*s))
    }

    /// Fully reduces `v` against the rows collected so far.
    pub fn reduce(&self, v: &Vector) -> Vector {
        let mut v = v.clone();
        for (row, pivot) in self.rows.iter().zip(&self.pivots) {
            let c = v.coeff(*pivot);
            if !c.is_zero() {
                v = v.sub(&row.scale(&c));
            }
        }
        v
    }

    /// Inserts `v` if it enlarges the span; returns whether it did.
    pub fn insert(&mut self, v: &Vector) -> bool {
        let mut v = self.reduce(v);
        let Some(pivot) = self.pivot_slot(&v) else {
            return false;
        };
        v = v.scale(&v.coeff(pivot).recip());
        for row in &mut self.rows {
            let c = row.coeff(pivot);
            if !c.is_zero() {
                *row = row.sub(&v.scale(&c));
            }
        }
        self.rows.push(v);
        self.pivots.push(pivot);
        true
    }

    pub fn contains(&self, v: &Vector) -> bool {
        self.reduce(v).is_zero()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vector] {
        &self.rows
    }

    pub fn pivots(&self) -> &[i64] {
        &self.pivots
    }

    /// Coefficients expressing `v` over the collected rows, or `None` when
    /// `v` is outside the span.
    pub fn coordinates(&self, v: &Vector) -> Option<Vec<Scalar>> {
        // Rows are fully reduced, so each pivot slot survives in exactly one
        // row and the coefficient of `v` there is the coordinate.
        if !self.contains(v) {
            return None;
        }
        Some(self.pivots.iter().map(|p| v.coeff(*p)).collect())
    }
}

pub fn rank(gens: &[Vector]) -> usize {
    let mut ech = Echelon::new();
    for g in gens {
        ech.insert(g);
    }
    ech.rank()
}

pub fn in_span(v: &Vector, gens: &[Vector]) -> bool {
    let mut ech = Echelon::new();
    for g in gens {
        ech.insert(g);
    }
    ech.contains(v)
}

pub fn span_eq(a: &[Vector], b: &[Vector]) -> bool {
    let mut ech = Echelon::new();
    for g in a {
        ech.insert(g);
    }
    let rank_a = ech.rank();
    if !b.iter().all(|v| ech.contains(v)) {
        return false;
    }
    rank(b) == rank_a
}

/// Basis of span(a) + span(b).
pub fn sum_spans(a: &[Vector], b: &[Vector]) -> Vec<Vector> {
    let mut ech = Echelon::new();
    for g in a.iter().chain(b) {
        ech.insert(g);
    }
    ech.rows().to_vec()
}

/// Basis of span(a) ∩ span(b), by the block trick: reduce rows (v | v) for
/// v in a and (w | 0) for w in b, pivoting on the first block; rows whose
/// first block vanished carry intersection vectors in the second block.
pub fn span_intersect(a: &[Vector], b: &[Vector]) -> Vec<Vector> {
    let support: BTreeSet<i64> = a
        .iter()
        .chain(b)
        .flat_map(|v| v.support())
        .collect();
    let (Some(&mn), Some(&mx)) = (support.first(), support.last()) else {
        return Vec::new();
    };
    let shift = mx - mn + 1;
    let lift = |v: &Vector, copy: bool| -> Vector {
        let mut pairs: Vec<(i64, Scalar)> = v.iter().map(|(s, c)| (s, c.clone())).collect();
        if copy {
            pairs.extend(v.iter().map(|(s, c)| (s + shift, c.clone())));
        }
        Vector::from_pairs(pairs)
    };
    let mut ech = Echelon::new();
    for v in a {
        ech.insert(&lift(v, true));
    }
    for w in b {
        ech.insert(&lift(w, false));
    }
    ech.rows()
        .iter()
        .zip(ech.pivots())
        .filter(|(_, p)| **p > mx)
        .map(|(row, _)| {
            Vector::from_pairs(row.iter().map(|(s, c)| (s - shift, c.clone())))
        })
        .collect()
}

/// Basis of span(gens) ∩ span{e_s : s ∈ slots}.
pub fn intersect_slots(gens: &[Vector], slots: &BTreeSet<i64>) -> Vec<Vector> {
    let front: BTreeSet<i64> = gens
        .iter()
        .flat_map(|v| v.support())
        .filter(|s| !slots.contains(s))
        .collect();
    let mut ech = Echelon::with_front(front.clone());
    for g in gens {
        ech.insert(g);
    }
    ech.rows()
        .iter()
        .zip(ech.pivots())
        .filter(|(_, p)| !front.contains(p))
        .map(|(row, _)| row.clone())
        .collect()
}

/// Basis of span(gens) ∩ span{e_1, ..., e_n}.
pub fn intersect_window(gens: &[Vector], n: usize) -> Vec<Vector> {
    intersect_slots(gens, &(1..=n as i64).collect())
}

/// Basis of { x ∈ span{e_s : s ∈ slots} : Σ_s c(s)·x(s) = 0 for every
/// constraint c }.
pub fn solve_homogeneous(constraints: &[Vector], slots: &[i64]) -> Vec<Vector> {
    // Row-reduce the constraint matrix restricted to `slots`; one kernel
    // vector per free column, with back-substituted pivot entries.
    let mut ech = Echelon::new();
    for c in constraints {
        ech.insert(&c.restrict(|s| slots.contains(&s)));
    }
    let pivot_set: BTreeSet<i64> = ech.pivots().iter().copied().collect();
    slots
        .iter()
        .filter(|s| !pivot_set.contains(s))
        .map(|&free| {
            let mut pairs = vec![(free, Scalar::one())];
            for (row, p) in ech.rows().iter().zip(ech.pivots()) {
                let c = row.coeff(free);
                if !c.is_zero() {
                    pairs.push((*p, -c));
                }
            }
            Vector::from_pairs(pairs)
        })
        .collect()
}

/// Solves Σ_j x_j · columns[j] = rhs exactly, returning one solution.
/// `None` when inconsistent.
pub fn solve_linear(columns: &[Vector], rhs: &Vector) -> Option<Vec<Scalar>> {
    // Tag each column with a marker slot below every real slot; reducing rhs
    // against the tagged columns leaves -x_j on the markers.
    let support: BTreeSet<i64> = columns
        .iter()
        .chain(std::iter::once(rhs))
        .flat_map(|v| v.support())
        .collect();
    let base = support.first().copied().unwrap_or(0) - 1 - columns.len() as i64;
    // Real slots pivot first, so a marker becomes a pivot only for relations
    // among the columns.
    let mut marked = Echelon::with_front(support);
    for (j, col) in columns.iter().enumerate() {
        let mut t = col.clone();
        t.add_to_slot(base + j as i64, Scalar::one());
        marked.insert(&t);
    }
    let residue = marked.reduce(rhs);
    if residue.support().any(|s| s >= base + columns.len() as i64) {
        return None; // a real coordinate is left over
    }
    Some(
        (0..columns.len())
            .map(|j| -residue.coeff(base + j as i64))
            .collect(),
    )
}

/// Coefficients of `v` over `basis`, or `None` when `v` is outside the span.
pub fn express_in(v: &Vector, basis: &[Vector]) -> Option<Vec<Scalar>> {
    solve_linear(basis, v)
}

/// Picks vectors from `pool`, in order, that extend `base` to an independent
/// family of size `target`; returns only the picked vectors, or `None` when
/// the pool runs out first.
pub fn extend_independent<I>(base: &[Vector], pool: I, target: usize) -> Option<Vec<Vector>>
where
    I: IntoIterator<Item = Vector>,
{
    let mut ech = Echelon::new();
    for b in base {
        ech.insert(b);
    }
    let mut picked = Vec::new();
    let mut pool = pool.into_iter();
    while ech.rank() < target {
        let cand = pool.next()?;
        if ech.insert(&cand) {
            picked.push(cand);
        }
    }
    Some(picked)
}
