//! Position labels and colorings.
//!
//! A coloring assigns every basis index i ≥ 1 a label in ℤ × ℚ (ordered
//! lexicographically); indices sharing a label sit in the same gap of the
//! flag, and the label order is the flag order.  The assignment is finitely
//! presented: an explicit window for small indices and either a
//! residue-periodic affine rule or a dense (Calkin–Wilf) rule for the rest.

use crate::linalg::Scalar;
use crate::{Error, Result};
use num::bigint::BigInt;
use num::integer::Integer;
use num::{One, Signed, Zero};
use std::fmt;

/// A flag position: `tier` splits the order into stacked copies of ℚ, so
/// order types like ω + ω* fit even though each tier's offsets are rational.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PositionLabel {
    pub tier: i64,
    pub offset: Scalar,
}

impl PositionLabel {
    pub fn new(tier: i64, offset: Scalar) -> Self {
        PositionLabel { tier, offset }
    }

    pub fn of_ints(tier: i64, offset: i64) -> Self {
        PositionLabel::new(tier, Scalar::from_int(offset))
    }

    /// Order-reversal: negate both coordinates.
    pub fn mirror(&self) -> PositionLabel {
        PositionLabel {
            tier: -self.tier,
            offset: -&self.offset,
        }
    }
}

impl fmt::Display for PositionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.tier, self.offset)
    }
}

impl fmt::Debug for PositionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// One residue class of an affine tail: index i gets label
/// (tier, slope·i + intercept).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AffineLabel {
    pub tier: i64,
    pub slope: Scalar,
    pub intercept: Scalar,
}

impl AffineLabel {
    pub fn new(tier: i64, slope: Scalar, intercept: Scalar) -> Self {
        AffineLabel {
            tier,
            slope,
            intercept,
        }
    }

    pub fn at(&self, i: i64) -> PositionLabel {
        PositionLabel {
            tier: self.tier,
            offset: &self.slope * &Scalar::from_int(i) + self.intercept.clone(),
        }
    }

    pub fn mirror(&self) -> AffineLabel {
        AffineLabel {
            tier: -self.tier,
            slope: -&self.slope,
            intercept: -&self.intercept,
        }
    }
}

/// Label rule for indices beyond the window.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TailRule {
    /// `rules[i mod modulus]` applies to index i.
    Affine { modulus: i64, rules: Vec<AffineLabel> },
    /// Label (tier, cw(i)), or (tier, −cw(i)) when reversed; order-dense.
    Dense { tier: i64, reversed: bool },
}

impl TailRule {
    /// Every index labelled with the same constant.
    pub fn constant(label: PositionLabel) -> TailRule {
        TailRule::Affine {
            modulus: 1,
            rules: vec![AffineLabel::new(label.tier, Scalar::zero(), label.offset)],
        }
    }

    pub fn label(&self, i: i64) -> PositionLabel {
        match self {
            TailRule::Affine { modulus, rules } => rules[(i.rem_euclid(*modulus)) as usize].at(i),
            TailRule::Dense { tier, reversed } => {
                let cw = calkin_wilf(i);
                PositionLabel::new(*tier, if *reversed { -cw } else { cw })
            }
        }
    }

    pub fn mirror(&self) -> TailRule {
        match self {
            TailRule::Affine { modulus, rules } => TailRule::Affine {
                modulus: *modulus,
                rules: rules.iter().map(AffineLabel::mirror).collect(),
            },
            TailRule::Dense { tier, reversed } => TailRule::Dense {
                tier: -tier,
                reversed: !reversed,
            },
        }
    }

    /// Structural checks plus the cross-class collision analysis: two
    /// residue classes may share labels only when both are constant with the
    /// same value (one merged position).  `window_len` bounds the indices the
    /// tail actually serves.
    pub fn validate(&self, window_len: i64) -> Result<()> {
        let TailRule::Affine { modulus, rules } = self else {
            return Ok(()); // dense rules are injective by construction
        };
        if *modulus < 1 {
            return Err(Error::InvalidSpec(format!("modulus {modulus} < 1")));
        }
        if rules.len() != *modulus as usize {
            return Err(Error::InvalidSpec(format!(
                "{} rules for modulus {modulus}",
                rules.len()
            )));
        }
        for r in 0..rules.len() {
            for s in r + 1..rules.len() {
                let (rr, rs) = (&rules[r], &rules[s]);
                if rr.tier != rs.tier {
                    continue;
                }
                if rr.slope.is_zero() && rs.slope.is_zero() {
                    continue; // equal constants merge, unequal never meet
                }
                if affine_classes_meet(rr, r as i64, rs, s as i64, *modulus, window_len) {
                    return Err(Error::LabelCollision(format!(
                        "residues {r} and {s} mod {modulus} share a label"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Whether label classes r (rule `f`) and s (rule `g`), same tier, produce
/// equal labels at indices beyond `window_len`.  Reduces to an integer linear
/// equation A·p + B·q = C over the residue-class parameters with one-sided
/// bounds, solved by extended gcd plus sign analysis.
fn affine_classes_meet(
    f: &AffineLabel,
    r: i64,
    g: &AffineLabel,
    s: i64,
    m: i64,
    window_len: i64,
) -> bool {
    // Index parametrization: i = r + m·p > window_len, j = s + m·q > window_len.
    let p_min = (window_len - r).div_euclid(m) + 1;
    let q_min = (window_len - s).div_euclid(m) + 1;
    let em = Scalar::from_int(m);
    // f at i equals g at j:  (a·m)p − (c·m)q = (d − b) + c·s − a·r.
    let a = &f.slope * &em;
    let b = -(&g.slope * &em);
    let c = (&g.intercept - &f.intercept) + &g.slope * &Scalar::from_int(s)
        - &f.slope * &Scalar::from_int(r);

    if f.slope.is_zero() || g.slope.is_zero() {
        // One class constant: the sloped one passes the constant at most once.
        let (slope, cls_r, cls_min, target) = if f.slope.is_zero() {
            (g, s, q_min, &f.intercept)
        } else {
            (f, r, p_min, &g.intercept)
        };
        let i = (target - &slope.intercept) / slope.slope.clone();
        if !i.is_integer() {
            return false;
        }
        let i = match i64::try_from(&i.floor_int()) {
            Ok(v) => v,
            Err(_) => return false,
        };
        return i.rem_euclid(m) == cls_r && (i - cls_r).div_euclid(m) >= cls_min;
    }

    // Clear denominators to an integer equation A·p + B·q = C.
    let lcm_d = [&a, &b, &c]
        .iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let scale = Scalar::from_bigint(lcm_d);
    let to_int = |x: &Scalar| (x * &scale).numer().clone();
    let (ai, bi, ci) = (to_int(&a), to_int(&b), to_int(&c));

    let ext = ai.extended_gcd(&bi);
    if !(&ci % &ext.gcd).is_zero() {
        return false;
    }
    let k = &ci / &ext.gcd;
    // One solution; the general one moves along (B/g, −A/g)·t.
    let p0 = &ext.x * &k;
    let q0 = &ext.y * &k;
    let u = &bi / &ext.gcd;
    let v = -(&ai / &ext.gcd);

    // p0 + u·t ≥ p_min and q0 + v·t ≥ q_min: each is a one-sided bound on t.
    let mut lower: Option<BigInt> = None;
    let mut upper: Option<BigInt> = None;
    let mut apply = |coef: &BigInt, base: &BigInt, min: i64| {
        let need = BigInt::from(min) - base;
        if coef.is_positive() {
            let t = need.div_ceil(coef);
            lower = Some(lower.take().map_or(t.clone(), |l| l.max(t)));
        } else {
            let t = need.div_floor(coef);
            upper = Some(upper.take().map_or(t.clone(), |u| u.min(t)));
        }
    };
    apply(&u, &p0, p_min);
    apply(&v, &q0, q_min);
    match (lower, upper) {
        (Some(l), Some(u)) => l <= u,
        _ => true, // unbounded on one side: solutions exist
    }
}

/// A finitely presented labeling of all indices i ≥ 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Coloring {
    pub window: Vec<PositionLabel>,
    pub tail: TailRule,
}

impl Coloring {
    pub fn new(window: Vec<PositionLabel>, tail: TailRule) -> Self {
        Coloring { window, tail }
    }

    pub fn window_len(&self) -> i64 {
        self.window.len() as i64
    }

    pub fn label(&self, i: i64) -> PositionLabel {
        assert!(i >= 1, "indices start at 1");
        match self.window.get((i - 1) as usize) {
            Some(l) => l.clone(),
            None => self.tail.label(i),
        }
    }

    /// Minimal presentation with the same label function: window entries
    /// that restate the tail are dropped and the tail modulus is reduced.
    pub fn canonicalize(&mut self) {
        let reduced = match &self.tail {
            TailRule::Affine { modulus, rules } => {
                let m = *modulus;
                (1..m)
                    .filter(|d| m % d == 0)
                    .find(|&d| (0..m).all(|r| rules[r as usize] == rules[(r % d) as usize]))
                    .map(|d| TailRule::Affine {
                        modulus: d,
                        rules: rules[..d as usize].to_vec(),
                    })
            }
            TailRule::Dense { .. } => None,
        };
        if let Some(tail) = reduced {
            self.tail = tail;
        }
        while let Some(last) = self.window.last() {
            if *last == self.tail.label(self.window_len()) {
                self.window.pop();
            } else {
                break;
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.tail.validate(self.window_len())
    }

    pub fn mirror(&self) -> Coloring {
        Coloring {
            window: self.window.iter().map(PositionLabel::mirror).collect(),
            tail: self.tail.mirror(),
        }
    }

    /// Sorted distinct labels among indices 1..=n.
    pub fn distinct_labels_up_to(&self, n: i64) -> Vec<PositionLabel> {
        let mut ls: Vec<PositionLabel> = (1..=n).map(|i| self.label(i)).collect();
        ls.sort();
        ls.dedup();
        ls
    }

    /// All indices i ≤ n with label(i) = a, ascending.
    pub fn class_members_up_to(&self, a: &PositionLabel, n: i64) -> Vec<i64> {
        let mut hits: Vec<i64> = Vec::new();
        let w = self.window_len().min(n);
        for i in 1..=w {
            if self.window[(i - 1) as usize] == *a {
                hits.push(i);
            }
        }
        let lo = self.window_len();
        match &self.tail {
            TailRule::Affine { modulus, rules } => {
                for (r, rule) in rules.iter().enumerate() {
                    if rule.tier != a.tier {
                        continue;
                    }
                    if rule.slope.is_zero() {
                        if rule.intercept == a.offset {
                            let mut i = lo + 1;
                            while i.rem_euclid(*modulus) != r as i64 {
                                i += 1;
                            }
                            while i <= n {
                                hits.push(i);
                                i += modulus;
                            }
                        }
                    } else {
                        let i = (&a.offset - &rule.intercept) / rule.slope.clone();
                        if i.is_integer() {
                            if let Ok(i) = i64::try_from(&i.floor_int()) {
                                if i > lo && i <= n && i.rem_euclid(*modulus) == r as i64 {
                                    hits.push(i);
                                }
                            }
                        }
                    }
                }
            }
            TailRule::Dense { tier, reversed } => {
                if *tier == a.tier {
                    let off = if *reversed { -&a.offset } else { a.offset.clone() };
                    if let Some(i) = calkin_wilf_inverse(&off) {
                        if i > lo && i <= n {
                            hits.push(i);
                        }
                    }
                }
            }
        }
        hits.sort_unstable();
        hits.dedup();
        hits
    }

    /// Smallest index strictly beyond n0 carrying label `a`, if any.
    pub fn first_member_beyond(&self, a: &PositionLabel, n0: i64) -> Option<i64> {
        let mut best: Option<i64> = None;
        let mut offer = |i: i64| {
            if best.is_none_or(|b| i < b) {
                best = Some(i);
            }
        };
        let lo = self.window_len();
        for i in (n0.max(0) + 1)..=lo {
            if self.window[(i - 1) as usize] == *a {
                offer(i);
            }
        }
        let start = lo.max(n0);
        match &self.tail {
            TailRule::Affine { modulus, rules } => {
                for (r, rule) in rules.iter().enumerate() {
                    if rule.tier != a.tier {
                        continue;
                    }
                    if rule.slope.is_zero() {
                        if rule.intercept == a.offset {
                            let mut i = start + 1;
                            while i.rem_euclid(*modulus) != r as i64 {
                                i += 1;
                            }
                            offer(i);
                        }
                    } else {
                        let i = (&a.offset - &rule.intercept) / rule.slope.clone();
                        if i.is_integer() {
                            if let Ok(i) = i64::try_from(&i.floor_int()) {
                                if i > start && i.rem_euclid(*modulus) == r as i64 {
                                    offer(i);
                                }
                            }
                        }
                    }
                }
            }
            TailRule::Dense { tier, reversed } => {
                if *tier == a.tier {
                    let off = if *reversed { -&a.offset } else { a.offset.clone() };
                    if let Some(i) = calkin_wilf_inverse(&off) {
                        if i > start {
                            offer(i);
                        }
                    }
                }
            }
        }
        best
    }

    /// Whether the class of `a` contains infinitely many indices.
    pub fn class_is_infinite(&self, a: &PositionLabel) -> bool {
        match &self.tail {
            TailRule::Affine { rules, .. } => rules.iter().any(|r| {
                r.tier == a.tier && r.slope.is_zero() && r.intercept == a.offset
            }),
            TailRule::Dense { .. } => false,
        }
    }

    /// Whether any index at all carries label `a`.
    pub fn class_is_occupied(&self, a: &PositionLabel) -> bool {
        if self.window.contains(a) || self.class_is_infinite(a) {
            return true;
        }
        !self
            .class_members_up_to(a, i64::MAX - 1)
            .is_empty()
    }
}

/// The Calkin–Wilf enumeration of positive rationals: cw(1) = 1 and the
/// children of a/b are a/(a+b), (a+b)/b, read off breadth-first.
pub fn calkin_wilf(i: i64) -> Scalar {
    assert!(i >= 1, "enumeration starts at 1");
    let (mut a, mut b) = (BigInt::one(), BigInt::one());
    let bits = 63 - i.leading_zeros() as i64;
    for k in (0..bits).rev() {
        if (i >> k) & 1 == 0 {
            b += &a;
        } else {
            a += &b;
        }
    }
    Scalar::from_bigint(a) / Scalar::from_bigint(b)
}

/// Index of a positive rational in the Calkin–Wilf order; `None` for
/// non-positive inputs or indices past i64.
pub fn calkin_wilf_inverse(q: &Scalar) -> Option<i64> {
    if !q.numer().is_positive() {
        return None;
    }
    let (mut a, mut b) = (q.numer().clone(), q.denom().clone());
    let mut bits = Vec::new();
    while !(a.is_one() && b.is_one()) {
        if a > b {
            bits.push(1);
            a -= &b;
        } else {
            bits.push(0);
            b -= &a;
        }
    }
    let mut i: i64 = 1;
    for bit in bits.iter().rev() {
        i = i.checked_mul(2)?.checked_add(*bit)?;
    }
    Some(i)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn aff(tier: i64, slope: (i64, i64), intercept: (i64, i64)) -> AffineLabel {
        AffineLabel::new(
            tier,
            Scalar::new(slope.0, slope.1),
            Scalar::new(intercept.0, intercept.1),
        )
    }

    #[test]
    fn calkin_wilf_prefix_and_inverse() {
        let want = [(1, 1), (1, 2), (2, 1), (1, 3), (3, 2), (2, 3), (3, 1)];
        for (i, (p, q)) in want.iter().enumerate() {
            assert_eq!(calkin_wilf(i as i64 + 1), Scalar::new(*p, *q));
        }
        for i in 1..=200 {
            assert_eq!(calkin_wilf_inverse(&calkin_wilf(i)), Some(i));
        }
        assert_eq!(calkin_wilf_inverse(&Scalar::zero()), None);
        assert_eq!(calkin_wilf_inverse(&Scalar::from_int(-2)), None);
    }

    #[test]
    fn labels_order_lexicographically() {
        let a = PositionLabel::of_ints(0, 5);
        let b = PositionLabel::new(1, Scalar::new(-7, 2));
        assert!(a < b);
        assert!(PositionLabel::of_ints(0, 4) < a);
        assert_eq!(a.to_string(), "(0,5)");
        assert_eq!(b.to_string(), "(1,-7/2)");
        assert_eq!(b.mirror().to_string(), "(-1,7/2)");
    }

    #[test]
    fn interleaved_classes_collide() {
        // label(2k) = k, label(2k+1) = k+1: indices 1 and 2 both get 1.
        let tail = TailRule::Affine {
            modulus: 2,
            rules: vec![aff(0, (1, 2), (0, 1)), aff(0, (1, 2), (1, 2))],
        };
        assert!(matches!(tail.validate(0), Err(Error::LabelCollision(_))));
    }

    #[test]
    fn parity_classes_do_not_collide() {
        // Both residues carry label (0, i): injective despite two classes.
        let tail = TailRule::Affine {
            modulus: 2,
            rules: vec![aff(0, (1, 1), (0, 1)), aff(0, (1, 1), (0, 1))],
        };
        assert!(tail.validate(0).is_ok());
    }

    #[test]
    fn constant_merge_is_fine_but_progression_hit_is_not() {
        let merged = TailRule::Affine {
            modulus: 2,
            rules: vec![aff(0, (0, 1), (5, 1)), aff(0, (0, 1), (5, 1))],
        };
        assert!(merged.validate(0).is_ok());

        let hit = TailRule::Affine {
            modulus: 2,
            rules: vec![aff(0, (0, 1), (3, 1)), aff(0, (1, 1), (0, 1))],
        };
        // label(3) = 3 equals the even-class constant 3 ...
        assert!(matches!(hit.validate(0), Err(Error::LabelCollision(_))));
        // ... but a window covering index 3 shields it.
        assert!(hit.validate(3).is_ok());
    }

    #[test]
    fn zeta_tail_is_valid_and_matches_hand_labels() {
        let tail = TailRule::Affine {
            modulus: 2,
            rules: vec![aff(1, (-1, 2), (0, 1)), aff(0, (1, 2), (1, 2))],
        };
        tail.validate(0).unwrap();
        assert_eq!(tail.label(1), PositionLabel::of_ints(0, 1));
        assert_eq!(tail.label(2), PositionLabel::of_ints(1, -1));
        assert_eq!(tail.label(7), PositionLabel::of_ints(0, 4));
        assert_eq!(tail.label(8), PositionLabel::of_ints(1, -4));
    }

    #[test]
    fn canonicalize_reduces_modulus_and_trims_window() {
        let asc = TailRule::Affine {
            modulus: 1,
            rules: vec![aff(0, (1, 1), (0, 1))],
        };
        let mut c = Coloring::new(
            vec![PositionLabel::of_ints(0, 1), PositionLabel::of_ints(0, 7)],
            TailRule::Affine {
                modulus: 2,
                rules: vec![aff(0, (1, 1), (0, 1)), aff(0, (1, 1), (0, 1))],
            },
        );
        c.canonicalize();
        assert_eq!(c.tail, asc);
        // (0,7) at index 2 differs from tail's (0,2): kept; window stays.
        assert_eq!(c.window.len(), 2);

        let mut d = Coloring::new(
            vec![PositionLabel::of_ints(0, 1), PositionLabel::of_ints(0, 2)],
            asc.clone(),
        );
        d.canonicalize();
        assert!(d.window.is_empty());
    }

    #[test]
    fn class_membership_queries() {
        let gr2 = Coloring::new(
            vec![PositionLabel::of_ints(0, 1), PositionLabel::of_ints(0, 1)],
            TailRule::constant(PositionLabel::of_ints(0, 2)),
        );
        let low = PositionLabel::of_ints(0, 1);
        let high = PositionLabel::of_ints(0, 2);
        assert_eq!(gr2.class_members_up_to(&low, 6), vec![1, 2]);
        assert_eq!(gr2.class_members_up_to(&high, 6), vec![3, 4, 5, 6]);
        assert!(gr2.class_is_infinite(&high));
        assert!(!gr2.class_is_infinite(&low));
        assert!(!gr2.class_is_occupied(&PositionLabel::of_ints(0, 3)));

        let dense = Coloring::new(
            vec![],
            TailRule::Dense {
                tier: 0,
                reversed: false,
            },
        );
        // cw(5) = 3/2.
        let three_halves = PositionLabel::new(0, Scalar::new(3, 2));
        assert_eq!(dense.class_members_up_to(&three_halves, 10), vec![5]);
        assert!(dense.class_is_occupied(&three_halves));
    }
}
