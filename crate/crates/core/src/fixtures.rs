//! Named example specs used across tests, docs, and the CLI corpus.

use crate::flags::GeneralizedFlagSpec;
use crate::isotropic::{FormKind, IsoColoring, IsotropicFlagSpec};
use crate::labels::{AffineLabel, Coloring, PositionLabel, TailRule};
use crate::linalg::Scalar;

/// label(i) = (0, i): the ascending full flag 0 ⊂ ⟨e_1⟩ ⊂ ⟨e_1,e_2⟩ ⊂ …
pub fn asc() -> GeneralizedFlagSpec {
    GeneralizedFlagSpec::from_coloring(Coloring::new(
        vec![],
        TailRule::Affine {
            modulus: 1,
            rules: vec![AffineLabel::new(0, Scalar::one(), Scalar::zero())],
        },
    ))
}

/// label(2i−1) = (0, i), label(2i) = (1, −i): order type ω + ω*, maximal but
/// not a flag.
pub fn zeta() -> GeneralizedFlagSpec {
    GeneralizedFlagSpec::from_coloring(Coloring::new(
        vec![],
        TailRule::Affine {
            modulus: 2,
            rules: vec![
                AffineLabel::new(1, Scalar::new(-1, 2), Scalar::zero()),
                AffineLabel::new(0, Scalar::new(1, 2), Scalar::new(1, 2)),
            ],
        },
    ))
}

/// label(i) = (0, cw(i)): positions ordered like ℚ.
pub fn dense() -> GeneralizedFlagSpec {
    GeneralizedFlagSpec::from_coloring(Coloring::new(
        vec![],
        TailRule::Dense {
            tier: 0,
            reversed: false,
        },
    ))
}

/// The Grassmannian point ⟨e_1, …, e_l⟩: indices ≤ l get (0,1), the rest
/// (0,2).
pub fn gr(l: i64) -> GeneralizedFlagSpec {
    GeneralizedFlagSpec::from_coloring(Coloring::new(
        vec![PositionLabel::of_ints(0, 1); l as usize],
        TailRule::constant(PositionLabel::of_ints(0, 2)),
    ))
}

/// Symplectic full isotropic flag: e_i at (0, i), e^i at (0, −i).
pub fn c_asc() -> IsotropicFlagSpec {
    IsotropicFlagSpec::from_coloring(FormKind::C, IsoColoring::mirrored(asc().coloring, None))
}

/// Odd orthogonal analogue of [`c_asc`], with the center slot at (0, 0).
pub fn b_asc() -> IsotropicFlagSpec {
    IsotropicFlagSpec::from_coloring(
        FormKind::B,
        IsoColoring::mirrored(asc().coloring, Some(PositionLabel::of_ints(0, 0))),
    )
}

/// Even orthogonal analogue of [`c_asc`].
pub fn d_asc() -> IsotropicFlagSpec {
    IsotropicFlagSpec::from_coloring(FormKind::D, IsoColoring::mirrored(asc().coloring, None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flags::validate_spec;

    #[test]
    fn fixtures_validate_canonically() {
        for s in [asc(), zeta(), dense(), gr(2), gr(3)] {
            let report = validate_spec(&s).unwrap();
            assert_eq!(report.spec, s, "fixture should already be canonical");
        }
    }

    #[test]
    fn zeta_labels_match_the_definition() {
        let z = zeta();
        for i in 1..=6 {
            assert_eq!(z.coloring.label(2 * i - 1), PositionLabel::of_ints(0, i));
            assert_eq!(z.coloring.label(2 * i), PositionLabel::of_ints(1, -i));
        }
    }
}
