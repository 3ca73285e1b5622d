//! Picard data for the ind-variety of flags commensurable with a reference:
//! integer weight classes indexed by positions, their restrictions to the
//! finite-level lattices, kernel verification against the predicted span,
//! projectivity and very-ampleness decisions, and the determinant cocycle
//! that glues trivializations over big cells.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use num::{Integer, ToPrimitive};

use crate::flags::{is_flag, validate_spec, BasisSpec, GeneralizedFlagSpec};
use crate::isotropic::{validate_isotropic, IsotropicFlagSpec};
use crate::labels::{calkin_wilf_inverse, PositionLabel, TailRule};
use crate::linalg::{solve_linear, Matrix, Scalar};
use crate::tower::truncate;
use crate::{Error, Result};

/// Integer weights for the tail classes of a coloring, in the same residue
/// order as the tail rules.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TailWeights {
    /// Class r of an affine tail gets m_r(i) = u_r·i + v_r at index i.
    Affine(Vec<(i64, i64)>),
    /// A dense tail admits one constant across the whole tier.
    Constant(i64),
}

/// A weight assignment: finitely many exceptional positions override the
/// per-class tail rules.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightRule {
    pub exceptions: BTreeMap<PositionLabel, i64>,
    pub tail: TailWeights,
}

/// A representable Picard class on the flag presented by `base`: one integer
/// weight per position, encoded by exceptions plus tail rules.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PicElement {
    pub base: GeneralizedFlagSpec,
    pub weights: WeightRule,
}

impl PicElement {
    pub fn new(base: GeneralizedFlagSpec, weights: WeightRule) -> Self {
        PicElement { base, weights }
    }
}

/// The weight at an occupied position.  Exceptions win; otherwise every tail
/// class containing the position must agree on the value.
pub fn weight_at(p: &PicElement, a: &PositionLabel) -> Result<i64> {
    if let Some(&m) = p.weights.exceptions.get(a) {
        return Ok(m);
    }
    let c = &p.base.coloring;
    let w = c.window_len();
    let mut found: Option<i64> = None;
    let mut record = |m: i64| -> Result<()> {
        match found {
            Some(prev) if prev != m => Err(Error::InvalidSpec(format!(
                "classes merged at {a} disagree on the weight"
            ))),
            _ => {
                found = Some(m);
                Ok(())
            }
        }
    };
    match (&c.tail, &p.weights.tail) {
        (TailRule::Affine { modulus, rules }, TailWeights::Affine(ws)) => {
            if ws.len() != rules.len() {
                return Err(Error::InvalidSpec(
                    "one weight rule per tail class".into(),
                ));
            }
            for (r, (rule, &(u, v))) in rules.iter().zip(ws).enumerate() {
                if rule.tier != a.tier {
                    continue;
                }
                if rule.slope.is_zero() {
                    if rule.intercept == a.offset {
                        record(v)?;
                    }
                } else {
                    let x = (&a.offset - &rule.intercept) / rule.slope.clone();
                    if !x.is_integer() {
                        continue;
                    }
                    let Some(i) = x.floor_int().to_i64() else {
                        continue;
                    };
                    if i > w && i.rem_euclid(*modulus) == r as i64 {
                        record(u * i + v)?;
                    }
                }
            }
        }
        (TailRule::Dense { tier, reversed }, TailWeights::Constant(m)) => {
            if a.tier == *tier {
                let q = if *reversed {
                    -&a.offset
                } else {
                    a.offset.clone()
                };
                if let Some(i) = calkin_wilf_inverse(&q) {
                    if i > w {
                        record(*m)?;
                    }
                }
            }
        }
        _ => {
            return Err(Error::InvalidSpec(
                "weight tail shape must match the coloring tail".into(),
            ));
        }
    }
    found.ok_or_else(|| Error::InvalidSpec(format!("no weight rule covers position {a}")))
}

/// Structural checks: the base validates, the tail shapes match, constant
/// classes carry constant weights, exceptions sit on occupied positions, and
/// every window position has a weight.  Weights are resolved against the
/// coloring exactly as written, so a window entry restating the tail is
/// covered by the tail rule for its later class members only.
pub fn validate_pic(p: &PicElement) -> Result<()> {
    validate_spec(&p.base)?;
    let c = &p.base.coloring;
    match (&c.tail, &p.weights.tail) {
        (TailRule::Affine { rules, .. }, TailWeights::Affine(ws)) => {
            if ws.len() != rules.len() {
                return Err(Error::InvalidSpec(
                    "one weight rule per tail class".into(),
                ));
            }
            for (rule, &(u, _)) in rules.iter().zip(ws) {
                if rule.slope.is_zero() && u != 0 {
                    return Err(Error::InvalidSpec(
                        "a constant class admits only a constant weight".into(),
                    ));
                }
            }
        }
        (TailRule::Dense { .. }, TailWeights::Constant(_)) => {}
        _ => {
            return Err(Error::InvalidSpec(
                "weight tail shape must match the coloring tail".into(),
            ));
        }
    }
    for a in p.weights.exceptions.keys() {
        if !c.class_is_occupied(a) {
            return Err(Error::InvalidSpec(format!(
                "exception at unoccupied position {a}"
            )));
        }
    }
    for i in 1..=c.window_len() {
        weight_at(p, &c.label(i))?;
    }
    Ok(())
}

/// Pointwise sum of two weight assignments over the same base.
pub fn pic_add(p: &PicElement, q: &PicElement) -> Result<PicElement> {
    if p.base != q.base {
        return Err(Error::TypeMismatch(
            "weight assignments live over different bases".into(),
        ));
    }
    let tail = match (&p.weights.tail, &q.weights.tail) {
        (TailWeights::Affine(a), TailWeights::Affine(b)) if a.len() == b.len() => {
            TailWeights::Affine(
                a.iter()
                    .zip(b)
                    .map(|(&(u1, v1), &(u2, v2))| (u1 + u2, v1 + v2))
                    .collect(),
            )
        }
        (TailWeights::Constant(a), TailWeights::Constant(b)) => TailWeights::Constant(a + b),
        _ => {
            return Err(Error::TypeMismatch(
                "weight tails have different shapes".into(),
            ));
        }
    };
    let mut exceptions = BTreeMap::new();
    for a in p.weights.exceptions.keys().chain(q.weights.exceptions.keys()) {
        exceptions.insert(a.clone(), weight_at(p, a)? + weight_at(q, a)?);
    }
    Ok(PicElement {
        base: p.base.clone(),
        weights: WeightRule { exceptions, tail },
    })
}

/// Coordinates of the restriction to the level-n lattice Z^{s_n - 1}, indexed
/// by the visible position classes with the top one dropped: the class of the
/// pullback of O(1) through each intermediate step, minus the determinant of
/// the ambient V_n, which is trivial on the special linear flag variety.
/// Positions invisible at level n contribute nothing.
pub fn restrict_pic(p: &PicElement, n: i64) -> Result<Vec<i64>> {
    validate_pic(p)?;
    let required = p.base.n_spec();
    if n < required {
        return Err(Error::LevelTooSmall {
            required: required.max(0) as usize,
            got: n.max(0) as usize,
        });
    }
    let visible = p.base.coloring.distinct_labels_up_to(n);
    let Some(top) = visible.last() else {
        return Ok(Vec::new());
    };
    let m_top = weight_at(p, top)?;
    visible[..visible.len() - 1]
        .iter()
        .map(|a| Ok(weight_at(p, a)? - m_top))
        .collect()
}

/// Restriction coordinates for a weight assignment on an isotropic spec,
/// given as one weight per visible class at level n.  Duality identifies the
/// quotient at a mirrored position with the dual of the one below, and the
/// middle quotient carries at most a 2-torsion class which dies in the free
/// level lattice, so coordinates live on the classes strictly below the
/// center.
fn iso_coords(visible: &[PositionLabel], w: &[i64]) -> Vec<i64> {
    let center = PositionLabel::of_ints(0, 0);
    visible
        .iter()
        .enumerate()
        .filter(|(_, a)| **a < center)
        .map(|(t, a)| {
            let mt = visible
                .binary_search(&a.mirror())
                .expect("mirrored class visible at the same level");
            w[t] - w[mt]
        })
        .collect()
}

fn box_assignments(k: usize, bound: i64) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        let mut next = Vec::with_capacity(out.len() * (2 * bound + 1) as usize);
        for a in &out {
            for x in -bound..=bound {
                let mut b = a.clone();
                b.push(x);
                next.push(b);
            }
        }
        out = next;
    }
    out
}

/// Brute-force comparison of the kernel of the level-n restriction with the
/// predicted span: assignments supported on the visible classes restrict to
/// zero exactly when they are constant (a multiple of the product of all
/// position classes; invisible classes are killed outright and do not enter
/// the enumeration).
pub fn kernel_check(s: &GeneralizedFlagSpec, n: i64, bound: i64) -> Result<bool> {
    let spec = validate_spec(s)?.spec;
    let visible = spec.coloring.distinct_labels_up_to(n);
    let k = visible.len();
    let zero_tail = match &spec.coloring.tail {
        TailRule::Affine { rules, .. } => TailWeights::Affine(vec![(0, 0); rules.len()]),
        TailRule::Dense { .. } => TailWeights::Constant(0),
    };
    let mut kernel = BTreeSet::new();
    for w in box_assignments(k, bound) {
        let p = PicElement {
            base: spec.clone(),
            weights: WeightRule {
                exceptions: visible.iter().cloned().zip(w.iter().copied()).collect(),
                tail: zero_tail.clone(),
            },
        };
        if restrict_pic(&p, n)?.iter().all(|&x| x == 0) {
            kernel.insert(w);
        }
    }
    let predicted: BTreeSet<Vec<i64>> = (-bound..=bound).map(|c| vec![c; k]).collect();
    Ok(kernel == predicted)
}

/// Isotropic variant: the kernel must be spanned by the paired classes
/// (below plus its mirror) together with the center class.
pub fn kernel_check_isotropic(s: &IsotropicFlagSpec, n: i64, bound: i64) -> Result<bool> {
    let check = validate_isotropic(s, n)?;
    if !check.ok {
        return Err(Error::InvalidSpec(check.failing.unwrap_or_default()));
    }
    let visible = s.visible_labels(n);
    let k = visible.len();
    let center = PositionLabel::of_ints(0, 0);
    // predicted generators have disjoint supports, so expansions with
    // coefficients in the box enumerate the span inside the box exactly
    let mut generators: Vec<Vec<i64>> = Vec::new();
    for (t, a) in visible.iter().enumerate() {
        if *a < center {
            let mt = visible
                .binary_search(&a.mirror())
                .expect("mirrored class visible at the same level");
            let mut g = vec![0; k];
            g[t] = 1;
            g[mt] = 1;
            generators.push(g);
        } else if *a == center {
            let mut g = vec![0; k];
            g[t] = 1;
            generators.push(g);
        }
    }
    let mut predicted = BTreeSet::new();
    for c in box_assignments(generators.len(), bound) {
        let mut w = vec![0i64; k];
        for (g, &ci) in generators.iter().zip(&c) {
            for (t, &gt) in g.iter().enumerate() {
                w[t] += ci * gt;
            }
        }
        predicted.insert(w);
    }
    let mut kernel = BTreeSet::new();
    for w in box_assignments(k, bound) {
        if iso_coords(&visible, &w).iter().all(|&x| x == 0) {
            kernel.insert(w);
        }
    }
    Ok(kernel == predicted)
}

/// Generators and relations of the Picard group, described by sampling the
/// position classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PicPresentation {
    /// Total number of position classes, None when there are infinitely many.
    pub generators: Option<usize>,
    /// Rank after imposing the diagonal relation, when finite.
    pub free_rank: Option<usize>,
    /// Whether the all-ones assignment is a relation (it is exactly for the
    /// general linear case; duality replaces it for isotropic specs).
    pub diagonal_relation: bool,
    /// The generating classes visible at a small sample level, in order.
    pub sample: Vec<PositionLabel>,
}

fn affine_class_count(c: &crate::labels::Coloring) -> Option<usize> {
    match &c.tail {
        TailRule::Affine { modulus, rules } => {
            if rules.iter().any(|r| !r.slope.is_zero()) {
                None
            } else {
                let horizon = c.window_len() + modulus;
                Some(c.distinct_labels_up_to(horizon).len())
            }
        }
        TailRule::Dense { .. } => None,
    }
}

fn sample_level(c: &crate::labels::Coloring) -> i64 {
    match &c.tail {
        TailRule::Affine { modulus, .. } => (c.window_len() + modulus).max(4),
        TailRule::Dense { .. } => 4,
    }
}

/// One generator per position class, one relation: the product of all of
/// them is the trivial class.
pub fn pic_presentation(s: &GeneralizedFlagSpec) -> Result<PicPresentation> {
    let spec = validate_spec(s)?.spec;
    let generators = affine_class_count(&spec.coloring);
    let sample = spec.coloring.distinct_labels_up_to(sample_level(&spec.coloring));
    Ok(PicPresentation {
        generators,
        free_rank: generators.map(|g| g - 1),
        diagonal_relation: true,
        sample,
    })
}

/// One generator per class strictly below the center, no relation: duality
/// folds the upper half onto the lower and kills the middle class.
pub fn pic_presentation_isotropic(s: &IsotropicFlagSpec) -> Result<PicPresentation> {
    let level = sample_level(&s.coloring.plus).max(s.n_spec());
    let check = validate_isotropic(s, level)?;
    if !check.ok {
        return Err(Error::InvalidSpec(check.failing.unwrap_or_default()));
    }
    let center = PositionLabel::of_ints(0, 0);
    let sample: Vec<PositionLabel> = s
        .visible_labels(level)
        .into_iter()
        .filter(|a| *a < center)
        .collect();
    // with constant tails the class set stabilizes within the sample level,
    // so the sample is the whole generator list
    let finite = matches!(
        &s.coloring.plus.tail,
        TailRule::Affine { rules, .. } if rules.iter().all(|r| r.slope.is_zero())
    );
    let generators = finite.then_some(sample.len());
    Ok(PicPresentation {
        generators,
        free_rank: generators,
        diagonal_relation: false,
        sample,
    })
}

/// Projectivity is exactly the flag condition on the position order.
pub fn is_projective(s: &GeneralizedFlagSpec) -> Result<bool> {
    Ok(is_flag(&validate_spec(s)?.spec))
}

/// The isotropic ind-variety is projective exactly when the union of both
/// mirrored colorings satisfies the flag condition; each side alone can be a
/// flag while the combined position order is not.
pub fn is_projective_isotropic(s: &IsotropicFlagSpec) -> Result<bool> {
    let check = validate_isotropic(s, s.n_spec().max(1))?;
    if !check.ok {
        return Err(Error::InvalidSpec(check.failing.unwrap_or_default()));
    }
    let sides = [&s.coloring.plus, &s.coloring.minus];
    let mut tiers = BTreeSet::new();
    if let Some(z) = &s.coloring.zero {
        tiers.insert(z.tier);
    }
    for side in sides {
        for a in &side.window {
            tiers.insert(a.tier);
        }
        match &side.tail {
            TailRule::Affine { rules, .. } => {
                for r in rules {
                    tiers.insert(r.tier);
                }
            }
            TailRule::Dense { .. } => return Ok(false),
        }
    }
    for side in sides {
        let TailRule::Affine { rules, .. } = &side.tail else {
            return Ok(false);
        };
        for r in rules {
            if r.slope.is_zero() {
                continue;
            }
            if r.slope.is_negative() {
                if tiers.range(..r.tier).next().is_some() {
                    return Ok(false);
                }
            } else if tiers.range(r.tier + 1..).next().is_some() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// A sloped tail class together with its weight rule, ready for the
/// monotonicity case analysis.
struct Family {
    tier: i64,
    slope: Scalar,
    intercept: Scalar,
    modulus: i64,
    /// Smallest tail index in this residue class.
    first: i64,
    u: i64,
    v: i64,
    /// Indices whose weight an exception overrides.
    excluded: BTreeSet<i64>,
}

impl Family {
    fn offset_at(&self, i: i64) -> Scalar {
        &self.slope * &Scalar::from_int(i) + &self.intercept
    }

    fn weight_at(&self, i: i64) -> i64 {
        self.u * i + self.v
    }

    fn first_active(&self) -> i64 {
        let mut i = self.first;
        while self.excluded.contains(&i) {
            i += self.modulus;
        }
        i
    }

    fn ascending(&self) -> bool {
        !self.slope.is_negative()
    }
}

/// Splits a validated element over an affine flag coloring into finitely
/// many fixed weighted positions (window, constant classes, exceptions) and
/// the sloped families.
fn ample_data(p: &PicElement) -> (BTreeMap<PositionLabel, i64>, Vec<Family>) {
    let c = &p.base.coloring;
    let w = c.window_len();
    let (modulus, rules) = match &c.tail {
        TailRule::Affine { modulus, rules } => (*modulus, rules),
        TailRule::Dense { .. } => unreachable!("dense colorings are never flags"),
    };
    let TailWeights::Affine(ws) = &p.weights.tail else {
        unreachable!("validated weights match the tail shape");
    };
    let mut fixed = BTreeMap::new();
    for i in 1..=w {
        let a = c.label(i);
        let m = weight_at(p, &a).expect("validated weights cover the window");
        fixed.insert(a, m);
    }
    for (a, &m) in &p.weights.exceptions {
        fixed.insert(a.clone(), m);
    }
    let mut families = Vec::new();
    for (r, (rule, &(u, v))) in rules.iter().zip(ws).enumerate() {
        if rule.slope.is_zero() {
            let a = PositionLabel::new(rule.tier, rule.intercept.clone());
            let m = weight_at(p, &a).expect("validated weights cover constant classes");
            fixed.insert(a, m);
            continue;
        }
        let base = w + 1;
        let first = base + (r as i64 - base).rem_euclid(modulus);
        let mut excluded = BTreeSet::new();
        for b in p.weights.exceptions.keys() {
            if b.tier != rule.tier {
                continue;
            }
            let x = (&b.offset - &rule.intercept) / rule.slope.clone();
            if !x.is_integer() {
                continue;
            }
            let Some(i) = x.floor_int().to_i64() else {
                continue;
            };
            if i >= first && (i - first) % modulus == 0 {
                excluded.insert(i);
            }
        }
        families.push(Family {
            tier: rule.tier,
            slope: rule.slope.clone(),
            intercept: rule.intercept.clone(),
            modulus,
            first,
            u,
            v,
            excluded,
        });
    }
    (fixed, families)
}

/// First index at which s·i + c has passed t in the direction of s: the same
/// formula serves both signs since dividing by a negative slope flips the
/// inequality.
fn cross_index(s: &Scalar, c: &Scalar, t: &Scalar) -> i64 {
    let x = (t - c) / s.clone();
    x.floor_int().to_i64().expect("crossing index fits in i64") + 1
}

fn family_vs_fixed(f: &Family, b: &PositionLabel, m_b: i64) -> bool {
    if b.tier != f.tier {
        // the flag condition puts every other tier below an ascending family
        // and above a descending one, so only the first member is extremal
        let i = f.first_active();
        return if f.ascending() {
            b.tier < f.tier && f.weight_at(i) > m_b
        } else {
            b.tier > f.tier && f.weight_at(i) < m_b
        };
    }
    // walk the class until both the label and the weight have passed the
    // fixed position; beyond that, monotonicity settles every comparison
    let lab_cross = cross_index(&f.slope, &f.intercept, &b.offset);
    let w_cross = cross_index(
        &Scalar::from_int(f.u),
        &Scalar::from_int(f.v),
        &Scalar::from_int(m_b),
    );
    let h = lab_cross.max(w_cross).max(f.first) + f.modulus;
    let mut i = f.first;
    while i <= h {
        if !f.excluded.contains(&i) {
            let off = f.offset_at(i);
            let m = f.weight_at(i);
            let ok = match off.cmp(&b.offset) {
                Ordering::Less => m < m_b,
                Ordering::Greater => m > m_b,
                // the same position seen through two descriptions
                Ordering::Equal => m == m_b,
            };
            if !ok {
                return false;
            }
        }
        i += f.modulus;
    }
    true
}

/// gcd of a·Z + b·Z as a subgroup of Q.
fn rational_gcd(a: &Scalar, b: &Scalar) -> Scalar {
    let l = a.denom().lcm(b.denom());
    let pa = a.numer() * (&l / a.denom());
    let pb = b.numer() * (&l / b.denom());
    Scalar::from_bigint(pa.gcd(&pb)) / Scalar::from_bigint(l)
}

/// Two families climbing the same way: weights must grow at the same exact
/// rate per unit of label, and the residual offset must respect the smallest
/// achievable label gaps.  The gaps between the two classes fill a full
/// coset of G·Z (the index equations admit solutions arbitrarily far out, so
/// neither the start bounds nor finitely many exceptions thin it out).
fn proportional_pair(f: &Family, g: &Family) -> bool {
    let uf = Scalar::from_int(f.u);
    let ug = Scalar::from_int(g.u);
    if &uf * &g.slope != &ug * &f.slope {
        return false;
    }
    let lambda = uf / f.slope.clone();
    let delta = Scalar::from_int(f.v - g.v) - &lambda * &(&f.intercept - &g.intercept);
    let step_f = (&f.slope * &Scalar::from_int(f.modulus)).abs();
    let step_g = (&g.slope * &Scalar::from_int(g.modulus)).abs();
    let gap = rational_gcd(&step_f, &step_g);
    let d0 = f.offset_at(f.first) - g.offset_at(g.first);
    let rem = &d0 - &(&gap * &Scalar::from_bigint((&d0 / &gap).floor_int()));
    // rem = 0 would exhibit a label collision, which the coloring rejects
    let (minpos, maxneg) = if rem.is_zero() {
        (gap.clone(), -&gap)
    } else {
        (rem.clone(), &rem - &gap)
    };
    &lambda * &minpos + &delta > Scalar::zero() && &lambda * &maxneg + &delta < Scalar::zero()
}

/// One family climbs while the other descends: every violating pair lies in
/// one of two finite triangles, where either the weights have not separated
/// (D_W <= 0 forces the ascending label below) or the labels have not
/// (D_L < 0 forces the ascending weight below).
fn opposed_pair(f: &Family, g: &Family) -> bool {
    let (a, d) = if f.ascending() { (f, g) } else { (g, f) };
    // weight triangle: u_a·i + |u_d|·j <= v_d - v_a, checked in integers
    let mut i = a.first;
    while a.weight_at(i) - d.weight_at(d.first) <= 0 {
        let mut j = d.first;
        while a.weight_at(i) - d.weight_at(j) <= 0 {
            if !a.excluded.contains(&i) && !d.excluded.contains(&j) {
                let dl = a.offset_at(i) - d.offset_at(j);
                let dw = a.weight_at(i) - d.weight_at(j);
                if dl > Scalar::zero() || dw == 0 {
                    return false;
                }
            }
            j += d.modulus;
        }
        i += a.modulus;
    }
    // label triangle:phases where the ascending label is still below
    let mut i = a.first;
    while a.offset_at(i) < d.offset_at(d.first) {
        let mut j = d.first;
        while a.offset_at(i) < d.offset_at(j) {
            if !a.excluded.contains(&i) && !d.excluded.contains(&j) {
                if a.weight_at(i) - d.weight_at(j) >= 0 {
                    return false;
                }
            }
            j += d.modulus;
        }
        i += a.modulus;
    }
    true
}

fn family_vs_family(f: &Family, g: &Family) -> bool {
    if f.tier != g.tier {
        // distinct tiers can only pair a descending family at the bottom
        // with an ascending one at the top; compare their first members
        let (lo, hi) = if f.tier < g.tier { (f, g) } else { (g, f) };
        return lo.weight_at(lo.first_active()) < hi.weight_at(hi.first_active());
    }
    if f.ascending() == g.ascending() {
        proportional_pair(f, g)
    } else {
        opposed_pair(f, g)
    }
}

/// Decides whether the weight map is strictly increasing along the position
/// order.  Everything reduces to finitely many comparisons: fixed positions
/// pairwise, each sloped family against each fixed position up to the
/// crossing indices, and family pairs via exact rate-and-offset analysis.
pub fn is_very_ample(p: &PicElement) -> Result<bool> {
    validate_pic(p)?;
    if !is_flag(&p.base) {
        return Ok(false);
    }
    let (fixed, families) = ample_data(p);
    let entries: Vec<_> = fixed.iter().collect();
    for pair in entries.windows(2) {
        if pair[1].1 <= pair[0].1 {
            return Ok(false);
        }
    }
    for f in &families {
        // weights must move the same way as the labels, and strictly
        if f.u == 0 || (f.u > 0) != f.ascending() {
            return Ok(false);
        }
    }
    for f in &families {
        for (b, &m) in &fixed {
            if !family_vs_fixed(f, b, m) {
                return Ok(false);
            }
        }
    }
    for (t, f) in families.iter().enumerate() {
        for g in &families[t + 1..] {
            if !family_vs_family(f, g) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Constructs a very ample class on any flag coloring: clear the label
/// denominators, then shift whole tiers apart so the finite middle parts
/// never overlap.  Returns None exactly when the spec is not a flag.
pub fn very_ample_witness(s: &GeneralizedFlagSpec) -> Result<Option<PicElement>> {
    let spec = validate_spec(s)?.spec;
    if !is_flag(&spec) {
        return Ok(None);
    }
    let TailRule::Affine { modulus, rules } = spec.coloring.tail.clone() else {
        unreachable!("dense colorings are never flags");
    };
    let w = spec.coloring.window_len();
    let mut q = Scalar::one();
    for i in 1..=w {
        q = Scalar::from_bigint(q.numer().lcm(spec.coloring.label(i).offset.denom()));
    }
    for r in &rules {
        q = Scalar::from_bigint(q.numer().lcm(r.slope.denom()));
        q = Scalar::from_bigint(q.numer().lcm(r.intercept.denom()));
    }
    let scaled = |x: &Scalar| -> i64 {
        (&q * x)
            .floor_int()
            .to_i64()
            .expect("scaled offset fits in i64")
    };
    // per tier, the largest and smallest scaled offsets that anything else
    // must clear; unbounded directions face no neighbor by the flag condition
    let mut tiers: BTreeMap<i64, (i64, i64)> = BTreeMap::new();
    let mut meet = |tier: i64, off: i64| {
        let e = tiers.entry(tier).or_insert((off, off));
        e.0 = e.0.min(off);
        e.1 = e.1.max(off);
    };
    for i in 1..=w {
        let a = spec.coloring.label(i);
        meet(a.tier, scaled(&a.offset));
    }
    for (r, rule) in rules.iter().enumerate() {
        if rule.slope.is_zero() {
            meet(rule.tier, scaled(&rule.intercept));
        } else {
            let base = w + 1;
            let first = base + (r as i64 - base).rem_euclid(modulus);
            meet(rule.tier, scaled(&rule.slope) * first + scaled(&rule.intercept));
        }
    }
    let mut shift: BTreeMap<i64, i64> = BTreeMap::new();
    let mut prev: Option<(i64, i64)> = None;
    for (&tier, &(lo, hi)) in &tiers {
        let s_t = match prev {
            None => 0,
            Some((p_shift, p_hi)) => p_shift + p_hi - lo + 1,
        };
        shift.insert(tier, s_t);
        prev = Some((s_t, hi));
    }
    let tail = TailWeights::Affine(
        rules
            .iter()
            .map(|r| (scaled(&r.slope), scaled(&r.intercept) + shift[&r.tier]))
            .collect(),
    );
    let mut exceptions = BTreeMap::new();
    for i in 1..=w {
        let a = spec.coloring.label(i);
        let m = scaled(&a.offset) + shift[&a.tier];
        exceptions.insert(a, m);
    }
    Ok(Some(PicElement {
        base: spec,
        weights: WeightRule { exceptions, tail },
    }))
}

/// Determinant of the basis change g: L -> M on the quotient at `pos` of the
/// common flag, computed inside V_n.  The value does not depend on n once n
/// covers every modified slot.
pub fn transition_det(
    l: &BasisSpec,
    m: &BasisSpec,
    pos: &PositionLabel,
    n: i64,
    s: &GeneralizedFlagSpec,
) -> Result<Scalar> {
    let spec_l = GeneralizedFlagSpec::new(l.clone(), s.coloring.clone());
    let spec_m = GeneralizedFlagSpec::new(m.clone(), s.coloring.clone());
    let required = s
        .n_spec()
        .max(spec_l.n_spec())
        .max(spec_m.n_spec())
        .max(1);
    if n < required {
        return Err(Error::LevelTooSmall {
            required: required.max(0) as usize,
            got: n.max(0) as usize,
        });
    }
    let members = s.coloring.class_members_up_to(pos, n);
    if members.is_empty() {
        return Err(Error::PositionInvisible);
    }
    let reference = truncate(s, n)?;
    for cand in [&spec_l, &spec_m] {
        if !truncate(cand, n)?.same_flag(&reference) {
            return Err(Error::TypeMismatch("bases present different flags".into()));
        }
    }
    // g maps the L-frame to the M-frame slotwise, so the images of the class
    // members are the M-vectors at the same indices; quotient by F' and take
    // the determinant of the induced square block
    let mut columns = spec_l.gens_below(pos, n);
    let fixed = columns.len();
    for &i in &members {
        columns.push(spec_l.vector_at(i));
    }
    let k = members.len();
    let mut rows = vec![vec![Scalar::zero(); k]; k];
    for (j, &i) in members.iter().enumerate() {
        let image = spec_m.vector_at(i);
        let coords = solve_linear(&columns, &image).ok_or_else(|| {
            Error::TypeMismatch("image leaves the span of the class".into())
        })?;
        for t in 0..k {
            rows[t][j] = coords[fixed + t].clone();
        }
    }
    Matrix::from_rows(rows).det()
}
