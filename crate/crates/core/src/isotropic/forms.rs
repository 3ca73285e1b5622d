//! The standard bilinear forms on the mirrored basis: slots i and −i are
//! dual, slot 0 (kind B only) is self-paired.

use crate::linalg::{solve_homogeneous, Scalar, Vector};

/// Which standard form the mirrored slots carry.
///
/// All three pair e_i with e^i (slot −i); B and D are symmetric, C is
/// skew-symmetric, and B additionally has the self-paired slot 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormKind {
    B,
    C,
    D,
}

impl FormKind {
    pub fn has_center(&self) -> bool {
        matches!(self, FormKind::B)
    }

    pub fn is_symmetric(&self) -> bool {
        !matches!(self, FormKind::C)
    }

    /// w(e_s, e_t) on basis slots.
    pub fn pairing(&self, s: i64, t: i64) -> Scalar {
        if s == 0 && t == 0 && self.has_center() {
            return Scalar::one();
        }
        if s != 0 && t == -s {
            return if s > 0 || self.is_symmetric() {
                Scalar::one()
            } else {
                -Scalar::one()
            };
        }
        Scalar::zero()
    }

    /// Slots of the level-n mirror window, ascending.
    pub fn slots_up_to(&self, n: i64) -> Vec<i64> {
        let mut slots: Vec<i64> = (-n..=-1).collect();
        if self.has_center() {
            slots.push(0);
        }
        slots.extend(1..=n);
        slots
    }
}

/// Bilinear extension of the slot pairing.
pub fn form_eval(kind: FormKind, u: &Vector, v: &Vector) -> Scalar {
    let mut acc = Scalar::zero();
    for (s, a) in u.iter() {
        let b = v.coeff(-s);
        if !b.is_zero() {
            acc += a * &(&b * &kind.pairing(s, -s));
        }
    }
    acc
}

/// Basis of (span gens)^⊥ ∩ V_n, where V_n is spanned by the level-n mirror
/// window.  Only generators supported within the window can pair nonzero
/// against it, so the kernel computation is exact for any gens.
pub fn perp_truncated(gens: &[Vector], n: i64, kind: FormKind) -> Vec<Vector> {
    // w(x, g) = Σ_s x_s w(e_s, e_{-s}) g_{-s}: one linear constraint per g.
    let rows: Vec<Vector> = gens
        .iter()
        .map(|g| {
            Vector::from_pairs(g.iter().map(|(t, c)| (-t, c * &kind.pairing(-t, t))))
        })
        .collect();
    solve_homogeneous(&rows, &kind.slots_up_to(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{rank, span_eq};

    fn e(i: i64) -> Vector {
        Vector::unit(i)
    }

    #[test]
    fn pairings_follow_the_type() {
        for kind in [FormKind::B, FormKind::C, FormKind::D] {
            assert_eq!(form_eval(kind, &e(1), &e(-1)), Scalar::one());
            assert_eq!(form_eval(kind, &e(1), &e(2)), Scalar::zero());
            assert_eq!(form_eval(kind, &e(-1), &e(-2)), Scalar::zero());
            assert_eq!(form_eval(kind, &e(1), &e(-2)), Scalar::zero());
        }
        assert_eq!(form_eval(FormKind::C, &e(-1), &e(1)), -Scalar::one());
        assert_eq!(form_eval(FormKind::B, &e(-1), &e(1)), Scalar::one());
        assert_eq!(form_eval(FormKind::D, &e(-1), &e(1)), Scalar::one());
        assert_eq!(form_eval(FormKind::B, &e(0), &e(0)), Scalar::one());
        assert_eq!(form_eval(FormKind::C, &e(0), &e(0)), Scalar::zero());
    }

    #[test]
    fn perp_of_nothing_is_everything() {
        let p = perp_truncated(&[], 2, FormKind::C);
        assert_eq!(rank(&p), 4);
    }

    #[test]
    fn perp_of_the_window_is_zero() {
        let gens: Vec<Vector> = FormKind::B.slots_up_to(2).into_iter().map(Vector::unit).collect();
        assert_eq!(rank(&perp_truncated(&gens, 2, FormKind::B)), 0);
    }

    #[test]
    fn perp_of_a_lagrangian_direction() {
        let p = perp_truncated(&[e(1)], 2, FormKind::C);
        assert!(span_eq(&p, &[e(1), e(2), e(-2)]));
    }
}
