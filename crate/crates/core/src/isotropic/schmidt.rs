//! Hyperbolic pairing of isotropic generators and isometric transport
//! between isotropic flags of the same type.


use crate::flags::BasisSpec;
use crate::labels::PositionLabel;
use crate::linalg::{Matrix, Scalar, Vector};
use crate::tower::FiniteFlag;
use crate::{Error, Result};

use super::forms::{form_eval, FormKind};
use super::{truncate_isotropic, validate_isotropic, IsotropicFlagSpec};

struct Pairing {
    us: Vec<Vector>,
    vs: Vec<Vector>,
    u_src: Vec<usize>,
    v_src: Vec<usize>,
    /// At most one anisotropic direction, kept aside for kind B.
    center: Option<(Vector, usize)>,
}

/// g minus its components along the pairs (and center) found so far.
fn reduce(g: &Vector, p: &Pairing, kind: FormKind) -> Vector {
    let mut out = g.clone();
    for (u, v) in p.us.iter().zip(&p.vs) {
        let a = form_eval(kind, u, &out);
        if !a.is_zero() {
            out = out.sub(&v.scale(&a));
        }
        let b = form_eval(kind, &out, v);
        if !b.is_zero() {
            out = out.sub(&u.scale(&b));
        }
    }
    if let Some((c, _)) = &p.center {
        let t = form_eval(kind, c, &out);
        if !t.is_zero() {
            out = out.sub(&c.scale(&(t / form_eval(kind, c, c))));
        }
    }
    out
}

fn pair_up(gs: &[Vector], kind: FormKind, allow_center: bool) -> Result<Pairing> {
    let mut p = Pairing {
        us: Vec::new(),
        vs: Vec::new(),
        u_src: Vec::new(),
        v_src: Vec::new(),
        center: None,
    };
    let mut used = vec![false; gs.len()];
    for i in 0..gs.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        let u = reduce(&gs[i], &p, kind);
        if u.is_zero() {
            continue;
        }
        if !form_eval(kind, &u, &u).is_zero() {
            if allow_center && p.center.is_none() {
                p.center = Some((u, i));
                continue;
            }
            return Err(Error::FieldObstruction);
        }
        let mut found = None;
        for j in (i + 1)..gs.len() {
            if used[j] {
                continue;
            }
            let w = reduce(&gs[j], &p, kind);
            let c = form_eval(kind, &u, &w);
            if !c.is_zero() {
                found = Some((j, w, c));
                break;
            }
        }
        let Some((j, mut v, c)) = found else {
            return Err(Error::DegeneratePrefix);
        };
        used[j] = true;
        // w(u, v) = c; for symmetric kinds also strip v's own length,
        // w(v − (d/2c)u, v − (d/2c)u) = d − (d/c)·c = 0.
        if kind.is_symmetric() {
            let d = form_eval(kind, &v, &v);
            if !d.is_zero() {
                v = v.sub(&u.scale(&(d / (Scalar::from_int(2) * c.clone()))));
            }
        }
        p.us.push(u);
        p.vs.push(v.scale(&c.recip()));
        p.u_src.push(i);
        p.v_src.push(j);
    }
    Ok(p)
}

/// Split the span of gs into hyperbolic pairs: returns (us, vs) with
/// w(u_i, v_j) = δ_ij and every other pairing zero.  Dependent inputs are
/// dropped; an anisotropic direction is a `FieldObstruction` and a nonzero
/// vector pairing to nothing that follows it a `DegeneratePrefix`.
pub fn isotropic_gram_schmidt(gs: &[Vector], kind: FormKind) -> Result<(Vec<Vector>, Vec<Vector>)> {
    let p = pair_up(gs, kind, false)?;
    Ok((p.us, p.vs))
}

/// An isometry of the mirrored space: the block acts on `slots`, every
/// other slot is fixed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsoElement {
    /// Slots the block acts on, ascending.
    pub slots: Vec<i64>,
    pub block: Matrix,
}

impl IsoElement {
    pub fn identity(slots: Vec<i64>) -> Self {
        let n = slots.len();
        IsoElement { slots, block: Matrix::identity(n) }
    }

    pub fn det(&self) -> Result<Scalar> {
        self.block.det()
    }

    pub fn apply_vector(&self, v: &Vector) -> Vector {
        let coords: Vec<Scalar> = self.slots.iter().map(|&s| v.coeff(s)).collect();
        let image = self.block.apply_to_vector(&coords);
        let mut out = v.restrict(|s| self.slots.binary_search(&s).is_err());
        for (k, c) in image.into_iter().enumerate() {
            out.add_to_slot(self.slots[k], c);
        }
        out
    }

    /// Whether the images of the touched slots pair exactly as the slots do.
    /// Untouched slots only pair against each other, so this decides form
    /// preservation on all of V.
    pub fn preserves_form(&self, kind: FormKind) -> bool {
        let images: Vec<Vector> = self
            .slots
            .iter()
            .map(|&s| self.apply_vector(&Vector::unit(s)))
            .collect();
        for (i, &s) in self.slots.iter().enumerate() {
            for (j, &t) in self.slots.iter().enumerate() {
                if form_eval(kind, &images[i], &images[j]) != kind.pairing(s, t) {
                    return false;
                }
            }
        }
        true
    }

    /// The spec of the image flag g·F(s), over the same coloring.
    pub fn apply_spec(&self, s: &IsotropicFlagSpec) -> IsotropicFlagSpec {
        let reach = s
            .n_spec()
            .max(self.slots.iter().map(|s| s.abs()).max().unwrap_or(0));
        let replacements: Vec<(i64, Vector)> = s
            .form
            .slots_up_to(reach)
            .into_iter()
            .map(|slot| (slot, self.apply_vector(&s.vector_at(slot))))
            .filter(|(slot, v)| v != &Vector::unit(*slot))
            .collect();
        IsotropicFlagSpec::new(
            s.form,
            BasisSpec::with_replacements(replacements),
            s.coloring.clone(),
        )
    }
}

fn sqrt_exact(q: &Scalar) -> Option<Scalar> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    if &(&n * &n) == q.numer() && &(&d * &d) == q.denom() {
        Some(Scalar::from_bigint(n) / Scalar::from_bigint(d))
    } else {
        None
    }
}

fn flattened_extensions(t: &FiniteFlag) -> Result<(Vec<Vector>, Vec<PositionLabel>)> {
    let ext = t.step_extensions()?;
    let mut vecs = Vec::new();
    let mut cls = Vec::new();
    for (a, es) in t.labels.iter().zip(ext) {
        for e in es {
            vecs.push(e);
            cls.push(a.clone());
        }
    }
    Ok((vecs, cls))
}

/// An element of the isometry group carrying F(s1) onto F(s2).  Both specs
/// must be isotropic of the same type (equal forms and equal canonical
/// colorings); the determinant is normalized to 1, which for kind D can
/// fail (`DeterminantObstruction`) when no position is self-mirrored.
pub fn mapping_element_isotropic(
    s1: &IsotropicFlagSpec,
    s2: &IsotropicFlagSpec,
) -> Result<IsoElement> {
    if s1.form != s2.form {
        return Err(Error::TypeMismatch("forms differ".into()));
    }
    let kind = s1.form;
    let n = s1.n_spec().max(s2.n_spec()).max(1);
    for s in [s1, s2] {
        let check = validate_isotropic(s, n)?;
        if !check.ok {
            return Err(Error::InvalidSpec(check.failing.unwrap_or_default()));
        }
    }
    let canonical = |c: &super::IsoColoring| {
        let mut plus = c.plus.clone();
        plus.canonicalize();
        let mut minus = c.minus.clone();
        minus.canonicalize();
        (plus, minus, c.zero.clone())
    };
    if canonical(&s1.coloring) != canonical(&s2.coloring) {
        return Err(Error::Incommensurable);
    }
    let (g1, cls1) = flattened_extensions(&truncate_isotropic(s1, n)?)?;
    let (g2, _) = flattened_extensions(&truncate_isotropic(s2, n)?)?;
    let p1 = pair_up(&g1, kind, kind.has_center())?;
    let p2 = pair_up(&g2, kind, kind.has_center())?;
    // The perp identity forces each partner into the mirrored class, so a
    // basis-to-basis transport is classwise and carries flag onto flag.
    for (ui, vi) in p1.u_src.iter().zip(&p1.v_src) {
        debug_assert_eq!(cls1[*vi], cls1[*ui].mirror());
    }
    let mut cols1: Vec<Vector> = p1.us.iter().chain(&p1.vs).cloned().collect();
    let mut cols2: Vec<Vector> = p2.us.iter().chain(&p2.vs).cloned().collect();
    match (&p1.center, &p2.center) {
        (None, None) => {}
        (Some((c1, _)), Some((c2, _))) => {
            // c1 ↦ λ·c2 must preserve the (nonzero) lengths exactly.
            let ratio = form_eval(kind, c1, c1) / form_eval(kind, c2, c2);
            let lam = sqrt_exact(&ratio).ok_or(Error::FieldObstruction)?;
            cols1.push(c1.clone());
            cols2.push(c2.scale(&lam));
        }
        _ => return Err(Error::TypeMismatch("only one side has a center".into())),
    }
    let slots = kind.slots_up_to(n);
    let inv1 = Matrix::from_columns(&cols1, &slots)
        .inverse()
        .expect("hyperbolic columns form a basis");
    let mut block = Matrix::from_columns(&cols2, &slots).mul(&inv1);
    if block.det()? != Scalar::one() {
        match kind {
            FormKind::C => unreachable!("symplectic transports have determinant one"),
            FormKind::B => {
                // Negating the center image flips the sign and is still
                // an isometry.
                let last = cols2.len() - 1;
                cols2[last] = cols2[last].neg();
            }
            FormKind::D => {
                // Swapping a hyperbolic pair flips the sign but moves
                // members unless the pair sits in a self-mirrored class.
                let k = (0..p1.us.len())
                    .find(|&k| {
                        let a = &cls1[p1.u_src[k]];
                        *a == a.mirror()
                    })
                    .ok_or(Error::DeterminantObstruction)?;
                let np = p2.us.len();
                cols2.swap(k, np + k);
            }
        }
        block = Matrix::from_columns(&cols2, &slots).mul(&inv1);
        debug_assert_eq!(block.det()?, Scalar::one());
    }
    let g = IsoElement { slots, block };
    debug_assert!(g.preserves_form(kind));
    Ok(g)
}
