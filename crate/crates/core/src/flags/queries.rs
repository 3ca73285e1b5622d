//! Structural predicates on flag specs: maximality, interval-finiteness,
//! reconstruction identities, and duality.

use super::GeneralizedFlagSpec;
use crate::labels::TailRule;
use crate::linalg::{span_eq, span_intersect, Vector};
use crate::{Error, Result};
use std::collections::BTreeSet;

/// A flag is maximal iff no two indices share a position: every tail class
/// must move (nonzero slope or dense), and window labels must be unshared.
pub fn is_maximal(s: &GeneralizedFlagSpec) -> bool {
    let c = &s.coloring;
    if let TailRule::Affine { rules, .. } = &c.tail {
        if rules.iter().any(|r| r.slope.is_zero()) {
            return false;
        }
    }
    (1..=c.window_len()).all(|i| c.class_members_up_to(&c.label(i), i64::MAX - 1).len() == 1)
}

/// Whether the occupied positions order-embed in ℤ: no dense class, and no
/// sloped class may have occupied positions beyond the side it runs to.
pub fn is_flag(s: &GeneralizedFlagSpec) -> bool {
    let c = &s.coloring;
    let TailRule::Affine { rules, .. } = &c.tail else {
        return false;
    };
    let tiers: BTreeSet<i64> = c
        .window
        .iter()
        .map(|l| l.tier)
        .chain(rules.iter().map(|r| r.tier))
        .collect();
    rules.iter().all(|r| {
        if r.slope.is_zero() {
            true
        } else if r.slope.is_negative() {
            tiers.range(..r.tier).next().is_none()
        } else {
            tiers.range(r.tier + 1..).next().is_none()
        }
    })
}

/// Verifies, inside V_n, that each F′ is the union of the F″ below it and
/// each F″ is the intersection of the F′ above it.
pub fn reconstruct_check(s: &GeneralizedFlagSpec, n: i64) -> Result<bool> {
    let spec = super::validate_spec(s)?.spec;
    let labels = spec.visible_labels(n);
    let ambient: Vec<Vector> = (1..=n).map(Vector::unit).collect();
    for a in &labels {
        let union: Vec<Vector> = labels
            .iter()
            .filter(|b| *b < a)
            .flat_map(|b| spec.gens_through(b, n))
            .collect();
        if !span_eq(&spec.gens_below(a, n), &union) {
            return Ok(false);
        }
        let mut meet: Option<Vec<Vector>> = None;
        for b in labels.iter().filter(|b| *b > a) {
            let gens = spec.gens_below(b, n);
            meet = Some(match meet {
                None => gens,
                Some(m) => span_intersect(&m, &gens),
            });
        }
        if !span_eq(&spec.gens_through(a, n), &meet.unwrap_or_else(|| ambient.clone())) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The dual flag on the mirror coloring. Only colorings over the standard
/// basis dualize slotwise.
pub fn dual(s: &GeneralizedFlagSpec) -> Result<GeneralizedFlagSpec> {
    if !s.basis.is_trivial() {
        return Err(Error::NontrivialBasis);
    }
    let mut coloring = s.coloring.mirror();
    coloring.canonicalize();
    coloring.validate()?;
    Ok(GeneralizedFlagSpec::from_coloring(coloring))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::flags::{BasisSpec, GeneralizedFlagSpec};
    use crate::labels::{AffineLabel, Coloring, PositionLabel, TailRule};
    use crate::linalg::Scalar;

    #[test]
    fn maximality_pins() {
        assert!(is_maximal(&fixtures::asc()));
        assert!(is_maximal(&fixtures::zeta()));
        assert!(is_maximal(&fixtures::dense()));
        assert!(!is_maximal(&fixtures::gr(2)));
        // Two window indices on one label.
        let shared = GeneralizedFlagSpec::from_coloring(Coloring::new(
            vec![PositionLabel::of_ints(0, 5), PositionLabel::of_ints(0, 5)],
            TailRule::Affine {
                modulus: 1,
                rules: vec![AffineLabel::new(0, Scalar::from_int(1), Scalar::from_int(5))],
            },
        ));
        assert!(!is_maximal(&shared));
        // A sloped tail hitting a window label exactly once.
        let hit = GeneralizedFlagSpec::from_coloring(Coloring::new(
            vec![PositionLabel::of_ints(0, 3)],
            TailRule::Affine {
                modulus: 1,
                rules: vec![AffineLabel::new(0, Scalar::from_int(1), Scalar::from_int(0))],
            },
        ));
        assert!(!is_maximal(&hit));
    }

    #[test]
    fn flag_shape_pins() {
        assert!(is_flag(&fixtures::asc()));
        assert!(is_flag(&fixtures::gr(2)));
        assert!(!is_flag(&fixtures::zeta()));
        assert!(!is_flag(&fixtures::dense()));
        assert!(is_flag(&dual(&fixtures::asc()).unwrap()));
    }

    #[test]
    fn reconstruction_holds_on_fixtures() {
        for s in [fixtures::asc(), fixtures::zeta(), fixtures::gr(2), fixtures::dense()] {
            assert!(reconstruct_check(&s, 6).unwrap(), "failed for {s:?}");
        }
    }

    #[test]
    fn dual_mirrors_and_involutes() {
        let d = dual(&fixtures::gr(2)).unwrap();
        // Positions flip sign: the surviving step is spanned by e_i, i > 2.
        let below = d.gens_below(&PositionLabel::of_ints(0, -1), 5);
        let expected: Vec<_> = (3..=5).map(crate::linalg::Vector::unit).collect();
        assert!(crate::linalg::span_eq(&below, &expected));
        for s in [fixtures::asc(), fixtures::zeta(), fixtures::dense(), fixtures::gr(3)] {
            assert_eq!(dual(&dual(&s).unwrap()).unwrap(), s);
        }
        let moved = GeneralizedFlagSpec::new(
            BasisSpec::with_replacements([(1, crate::linalg::Vector::unit(2))]),
            fixtures::asc().coloring,
        );
        assert_eq!(dual(&moved).unwrap_err(), Error::NontrivialBasis);
    }
}
