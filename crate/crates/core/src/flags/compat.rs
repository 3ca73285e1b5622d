//! Adapting an ordered basis of a finite-dimensional space to a flag.

use crate::linalg::{in_span, rank, solve_linear, Echelon, Vector};
use crate::{Error, Result};

/// Corrects each l_k by earlier ones so that span{e_1..e_k} = span{l_1..l_k}
/// for all k and each e_k lies in the smallest step of the chain its coset
/// allows. Steps are bases of an increasing chain of proper subspaces.
pub fn compatible_basis_finite(ls: &[Vector], steps: &[Vec<Vector>]) -> Result<Vec<Vector>> {
    if rank(ls) != ls.len() {
        return Err(Error::NotIndependent);
    }
    for w in steps.windows(2) {
        if !w[0].iter().all(|v| in_span(v, &w[1])) {
            return Err(Error::NotAChain);
        }
    }
    let mut out: Vec<Vector> = Vec::with_capacity(ls.len());
    let mut reducer = Echelon::new();
    for l in ls {
        let lowest = steps.iter().position(|step| {
            let mut gens: Vec<Vector> = step.clone();
            gens.extend(out.iter().cloned());
            in_span(l, &gens)
        });
        let e = match lowest {
            Some(j) => {
                // Split l over (out | step_j); the step part is the adapted vector.
                let mut columns = out.clone();
                columns.extend(steps[j].iter().cloned());
                let coeffs = solve_linear(&columns, l).expect("membership was just verified");
                let mut e = l.clone();
                for (c, prev) in coeffs.iter().zip(&out) {
                    e = e.sub(&prev.scale(c));
                }
                e
            }
            // No step contains the coset; reduce for determinism.
            None => reducer.reduce(l),
        };
        reducer.insert(&e);
        out.push(e);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{span_eq, Scalar};
    use proptest::prelude::*;

    fn e(i: i64) -> Vector {
        Vector::unit(i)
    }

    #[test]
    fn already_adapted_bases_pass_through() {
        let ls = vec![e(1), e(2), e(3)];
        let steps = vec![vec![e(1)], vec![e(1), e(2)]];
        assert_eq!(compatible_basis_finite(&ls, &steps).unwrap(), ls);
    }

    #[test]
    fn swaps_to_reach_the_small_step() {
        // Flag 0 ⊂ ⟨e_1⟩ ⊂ V_2 with basis (e_2, e_1 + e_2): the correction
        // lands the second vector inside ⟨e_1⟩.
        let ls = vec![e(2), e(1).add(&e(2))];
        let steps = vec![vec![e(1)]];
        let adapted = compatible_basis_finite(&ls, &steps).unwrap();
        assert_eq!(adapted, vec![e(2), e(1)]);
    }

    #[test]
    fn dependent_input_is_rejected() {
        let ls = vec![e(1), e(1).scale(&Scalar::from_int(2))];
        assert_eq!(
            compatible_basis_finite(&ls, &[]).unwrap_err(),
            Error::NotIndependent
        );
        let bad_steps = vec![vec![e(1)], vec![e(2)]];
        assert_eq!(
            compatible_basis_finite(&[e(1)], &bad_steps).unwrap_err(),
            Error::NotAChain
        );
    }

    proptest! {
        #[test]
        fn prefixes_always_span_the_same_spaces(seed in 0u64..40) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let n = 4i64;
            // Random invertible triangular-ish basis of V_4.
            let ls: Vec<Vector> = (1..=n).map(|i| {
                let mut v = e(rng.gen_range(1..=n));
                for j in 1..=n {
                    if rng.gen_bool(0.5) {
                        v = v.add(&e(j).scale(&Scalar::from_int(rng.gen_range(-2..=2))));
                    }
                }
                if v.is_zero() { e(i) } else { v }
            }).collect();
            prop_assume!(rank(&ls) == ls.len());
            let steps = vec![vec![e(1)], vec![e(1), e(2)], vec![e(1), e(2), e(3)]];
            let adapted = compatible_basis_finite(&ls, &steps).unwrap();
            for k in 1..=ls.len() {
                prop_assert!(span_eq(&ls[..k], &adapted[..k]));
            }
        }
    }
}
