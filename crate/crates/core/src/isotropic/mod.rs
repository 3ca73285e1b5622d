//! Isotropic flags: generalized flags on the mirrored basis that are taken
//! to themselves by the orthogonal/symplectic involution τ.
//!
//! Here V carries slots ℤ∖{0} (plus 0 for kind B), slot −i playing e^i.  A
//! coloring assigns labels to both sides; the spec is isotropic when the
//! negative side mirrors the positive one and the orthogonality identity
//! (F′)^⊥ = τ(F)″ holds at every truncation level, τ acting on positions by
//! label negation.

mod forms;
mod schmidt;

pub use forms::{form_eval, perp_truncated, FormKind};
pub use schmidt::{isotropic_gram_schmidt, mapping_element_isotropic, IsoElement};

use crate::flags::BasisSpec;
use crate::labels::{Coloring, PositionLabel};
use crate::linalg::{span_eq, Vector};
use crate::tower::FiniteFlag;
use crate::{Error, Result};

/// Labels for both sides of the mirrored basis (and the center slot for
/// kind B).  Stored independently so that symmetry is a checkable property,
/// not a representation artifact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsoColoring {
    pub plus: Coloring,
    pub minus: Coloring,
    pub zero: Option<PositionLabel>,
}

impl IsoColoring {
    /// The mirror-symmetric coloring with the given positive side.
    pub fn mirrored(plus: Coloring, zero: Option<PositionLabel>) -> Self {
        let minus = plus.mirror();
        IsoColoring { plus, minus, zero }
    }

    pub fn label_at(&self, slot: i64) -> PositionLabel {
        if slot > 0 {
            self.plus.label(slot)
        } else if slot < 0 {
            self.minus.label(-slot)
        } else {
            self.zero.clone().unwrap_or_else(|| PositionLabel::of_ints(0, 0))
        }
    }

    /// Whether the negative side is exactly the mirror of the positive one.
    pub fn is_mirror_symmetric(&self) -> bool {
        let mut a = self.plus.mirror();
        a.canonicalize();
        let mut b = self.minus.clone();
        b.canonicalize();
        a == b
    }
}

/// A generalized flag spec over the mirrored slots, tied to a form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsotropicFlagSpec {
    pub form: FormKind,
    pub basis: BasisSpec,
    pub coloring: IsoColoring,
}

impl IsotropicFlagSpec {
    pub fn new(form: FormKind, basis: BasisSpec, coloring: IsoColoring) -> Self {
        IsotropicFlagSpec { form, basis, coloring }
    }

    pub fn from_coloring(form: FormKind, coloring: IsoColoring) -> Self {
        IsotropicFlagSpec::new(form, BasisSpec::identity(), coloring)
    }

    /// Smallest mirror-window level covering both coloring windows and every
    /// basis modification.
    pub fn n_spec(&self) -> i64 {
        let touched = self
            .basis
            .touched_slots()
            .into_iter()
            .map(|s| s.abs())
            .max()
            .unwrap_or(0);
        self.coloring
            .plus
            .window_len()
            .max(self.coloring.minus.window_len())
            .max(touched)
    }

    pub fn vector_at(&self, slot: i64) -> Vector {
        self.basis.vector_at(slot)
    }

    pub fn slots_up_to(&self, n: i64) -> Vec<i64> {
        self.form.slots_up_to(n)
    }

    pub fn gens_below(&self, a: &PositionLabel, n: i64) -> Vec<Vector> {
        self.slots_up_to(n)
            .into_iter()
            .filter(|&s| self.coloring.label_at(s) < *a)
            .map(|s| self.vector_at(s))
            .collect()
    }

    pub fn gens_through(&self, a: &PositionLabel, n: i64) -> Vec<Vector> {
        self.slots_up_to(n)
            .into_iter()
            .filter(|&s| self.coloring.label_at(s) <= *a)
            .map(|s| self.vector_at(s))
            .collect()
    }

    pub fn visible_labels(&self, n: i64) -> Vec<PositionLabel> {
        let mut labels: Vec<PositionLabel> = self
            .slots_up_to(n)
            .into_iter()
            .map(|s| self.coloring.label_at(s))
            .collect();
        labels.sort();
        labels.dedup();
        labels
    }

    /// F′_τ ∩ V_n: the union of the members contained in their own
    /// τ-image, i.e. everything strictly below the self-dual cut (0,0).
    pub fn f_tau(&self, n: i64) -> Vec<Vector> {
        self.gens_below(&PositionLabel::of_ints(0, 0), n)
    }
}

/// Outcome of the isotropy check at one level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsoCheck {
    pub ok: bool,
    /// A failing position or condition, when not ok.
    pub failing: Option<String>,
    /// dim(F′_τ ∩ V_n).
    pub f_tau_dim: usize,
}

fn iso_failure(reason: String, f_tau_dim: usize) -> IsoCheck {
    IsoCheck { ok: false, failing: Some(reason), f_tau_dim }
}

/// Check that the spec is a well-formed isotropic flag at level n: the
/// coloring mirrors, the center slot is self-dual exactly for kind B, τ
/// reverses the visible order, and (F′)^⊥ ∩ V_n = τ(F)″ ∩ V_n at every
/// visible position.
pub fn validate_isotropic(s: &IsotropicFlagSpec, n: i64) -> Result<IsoCheck> {
    if n < s.n_spec() {
        return Err(Error::LevelTooSmall {
            required: s.n_spec().max(0) as usize,
            got: n.max(0) as usize,
        });
    }
    s.coloring.plus.validate()?;
    s.coloring.minus.validate()?;
    s.basis.det()?;
    for (slot, v) in s.basis.replaced() {
        if !s.form.has_center() && (slot == 0 || !v.coeff(0).is_zero()) {
            return Err(Error::InvalidSpec(
                "slot 0 exists only for kind B".into(),
            ));
        }
    }
    let f_tau_dim = crate::linalg::rank(&s.f_tau(n));
    if !s.coloring.is_mirror_symmetric() {
        return Ok(iso_failure("coloring is not mirror-symmetric".into(), f_tau_dim));
    }
    match (&s.coloring.zero, s.form.has_center()) {
        (Some(z), true) => {
            if *z != PositionLabel::of_ints(0, 0) {
                return Ok(iso_failure(format!(
                    "center slot sits at {z}, not at the self-dual position"
                ), f_tau_dim));
            }
        }
        (None, true) => {
            return Ok(iso_failure("kind B requires a center label".into(), f_tau_dim))
        }
        (Some(_), false) => {
            return Ok(iso_failure("only kind B has a center slot".into(), f_tau_dim))
        }
        (None, false) => {}
    }
    // τ = label negation is automatically an order-reversing involution on
    // the visible positions; what needs checking is the perp identity.
    for a in &s.visible_labels(n) {
        let perp = perp_truncated(&s.gens_below(a, n), n, s.form);
        let mirrored = s.gens_through(&a.mirror(), n);
        if !span_eq(&perp, &mirrored) {
            return Ok(iso_failure(
                format!("(F′)^⊥ differs from τ(F)″ at position {a}"),
                f_tau_dim,
            ));
        }
    }
    Ok(IsoCheck { ok: true, failing: None, f_tau_dim })
}

/// The chain {G ∩ V_n} over the mirror window, in position order.
pub fn truncate_isotropic(s: &IsotropicFlagSpec, n: i64) -> Result<FiniteFlag> {
    if n < s.n_spec() {
        return Err(Error::LevelTooSmall {
            required: s.n_spec().max(0) as usize,
            got: n.max(0) as usize,
        });
    }
    s.basis.det()?;
    let labels = s.visible_labels(n);
    let steps = labels.iter().map(|a| s.gens_through(a, n)).collect();
    Ok(FiniteFlag { level: n, labels, steps })
}

/// Mirror-symmetric embedding into level n+1: e_{n+1} joins the position of
/// its label and e^{n+1} the mirrored position.
pub fn embed_step_isotropic(f: &FiniteFlag, s: &IsotropicFlagSpec) -> Result<FiniteFlag> {
    let t = truncate_isotropic(s, f.level)?;
    if t.labels != f.labels || t.dims() != f.dims() {
        return Err(Error::TypeMismatch(format!(
            "finite flag does not have the reference type at level {}",
            f.level
        )));
    }
    let mut labels = f.labels.clone();
    let mut steps = f.steps.clone();
    for slot in [-(f.level + 1), f.level + 1] {
        let a = s.coloring.label_at(slot);
        let v = Vector::unit(slot);
        match labels.binary_search(&a) {
            Ok(i) => {
                for st in steps[i..].iter_mut() {
                    st.push(v.clone());
                }
            }
            Err(i) => {
                let mut base = if i == 0 { Vec::new() } else { steps[i - 1].clone() };
                base.push(v.clone());
                labels.insert(i, a);
                steps.insert(i, base);
                for st in steps[i + 1..].iter_mut() {
                    st.push(v.clone());
                }
            }
        }
    }
    Ok(FiniteFlag { level: f.level + 1, labels, steps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::linalg::in_span;

    #[test]
    fn standard_fixtures_are_isotropic() {
        for s in [fixtures::c_asc(), fixtures::b_asc(), fixtures::d_asc()] {
            let check = validate_isotropic(&s, 4).unwrap();
            assert!(check.ok, "{:?}", check.failing);
        }
    }

    #[test]
    fn f_tau_is_the_lower_half() {
        let s = fixtures::c_asc();
        let check = validate_isotropic(&s, 4).unwrap();
        assert_eq!(check.f_tau_dim, 4);
        let b = validate_isotropic(&fixtures::b_asc(), 4).unwrap();
        assert_eq!(b.f_tau_dim, 4);
    }

    #[test]
    fn asymmetric_coloring_is_rejected() {
        let mut s = fixtures::c_asc();
        // Give e^1 a label other than −label(e_1).
        let window = vec![PositionLabel::of_ints(0, -5)];
        s.coloring.minus = Coloring::new(window, s.coloring.minus.tail.clone());
        let check = validate_isotropic(&s, 4).unwrap();
        assert!(!check.ok);
        assert!(check.failing.unwrap().contains("mirror"));
    }

    #[test]
    fn perp_identity_fails_for_a_skewed_basis() {
        let mut s = fixtures::c_asc();
        // e_1 ↦ e_1 + e_2 keeps a valid basis but moves the step at (0,1)
        // off the τ-compatible chain: it now pairs nontrivially with e^2.
        s.basis = BasisSpec::with_replacements(vec![(
            1,
            Vector::unit(1).add(&Vector::unit(2)),
        )]);
        let check = validate_isotropic(&s, 4).unwrap();
        assert!(!check.ok);
        assert!(check.failing.unwrap().contains("⊥"));
    }

    #[test]
    fn truncation_is_the_full_symplectic_flag() {
        let t = truncate_isotropic(&fixtures::c_asc(), 2).unwrap();
        assert_eq!(t.dims(), vec![0, 1, 2, 3, 4]);
        assert_eq!(
            t.labels,
            vec![
                PositionLabel::of_ints(0, -2),
                PositionLabel::of_ints(0, -1),
                PositionLabel::of_ints(0, 1),
                PositionLabel::of_ints(0, 2),
            ]
        );
        assert!(span_eq(&t.steps[0], &[Vector::unit(-2)]));
        assert!(span_eq(&t.steps[1], &[Vector::unit(-2), Vector::unit(-1)]));
    }

    #[test]
    fn center_slot_shows_up_for_kind_b() {
        let t = truncate_isotropic(&fixtures::b_asc(), 2).unwrap();
        assert_eq!(t.dims(), vec![0, 1, 2, 3, 4, 5]);
        let mid = &t.steps[2];
        assert!(in_span(&Vector::unit(0), mid));
    }

    #[test]
    fn embedding_matches_truncation() {
        for s in [fixtures::c_asc(), fixtures::b_asc(), fixtures::d_asc()] {
            for n in s.n_spec().max(1)..7 {
                let stepped = embed_step_isotropic(&truncate_isotropic(&s, n).unwrap(), &s).unwrap();
                assert!(stepped.same_flag(&truncate_isotropic(&s, n + 1).unwrap()), "level {n}");
            }
        }
    }

    #[test]
    fn embedded_steps_stay_isotropic() {
        let s = fixtures::c_asc();
        let f = embed_step_isotropic(&truncate_isotropic(&s, 3).unwrap(), &s).unwrap();
        for (a, step) in f.labels.iter().zip(&f.steps) {
            let perp = perp_truncated(step, 4, s.form);
            let mirrored_below = s.gens_below(&a.mirror(), 4);
            for v in &mirrored_below {
                assert!(in_span(v, &perp), "step at {a} lost isotropy");
            }
        }
    }
}
