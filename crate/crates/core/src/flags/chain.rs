//! Chains of index-spans and the normalization taking a chain to the unique
//! generalized flag with the same vector partition.

use super::{BasisSpec, GeneralizedFlagSpec};
use crate::labels::{AffineLabel, Coloring, PositionLabel, TailRule};
use crate::linalg::{solve_linear, Scalar, Vector};
use crate::{Error, Result};
use std::collections::{BTreeMap, BTreeSet};

/// A finitely presented set of basis indices: explicit members below a
/// cutoff, full residue classes mod `modulus` from `from` on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexSet {
    pub explicit: BTreeSet<i64>,
    pub from: i64,
    pub modulus: i64,
    pub residues: BTreeSet<i64>,
}

impl IndexSet {
    pub fn finite<I: IntoIterator<Item = i64>>(indices: I) -> Self {
        IndexSet {
            explicit: indices.into_iter().collect(),
            from: 1,
            modulus: 1,
            residues: BTreeSet::new(),
        }
    }

    pub fn all() -> Self {
        IndexSet::periodic(1, 1, [0])
    }

    pub fn periodic<I: IntoIterator<Item = i64>>(from: i64, modulus: i64, residues: I) -> Self {
        IndexSet {
            explicit: BTreeSet::new(),
            from,
            modulus,
            residues: residues.into_iter().collect(),
        }
    }

    pub fn with_explicit<I: IntoIterator<Item = i64>>(mut self, indices: I) -> Self {
        self.explicit.extend(indices);
        self
    }

    pub fn contains(&self, i: i64) -> bool {
        self.explicit.contains(&i)
            || (i >= self.from && self.residues.contains(&i.rem_euclid(self.modulus)))
    }

    pub fn validate(&self) -> Result<()> {
        if self.modulus < 1 {
            return Err(Error::InvalidSpec(format!("modulus {} < 1", self.modulus)));
        }
        if self.from < 1 {
            return Err(Error::InvalidSpec(format!("from {} < 1", self.from)));
        }
        if let Some(i) = self.explicit.first() {
            if *i < 1 {
                return Err(Error::InvalidSpec(format!("index {i} < 1")));
            }
        }
        if let Some(r) = self.residues.iter().find(|r| **r < 0 || **r >= self.modulus) {
            return Err(Error::InvalidSpec(format!(
                "residue {r} outside [0, {})",
                self.modulus
            )));
        }
        Ok(())
    }

    fn irregular_until(&self) -> i64 {
        (self.from - 1).max(self.explicit.last().copied().unwrap_or(0))
    }

    /// Membership agrees beyond this bound with pure residue periodicity for
    /// both sets, so inclusion and equality are finite checks.
    fn joint_horizon(&self, other: &IndexSet) -> i64 {
        self.irregular_until().max(other.irregular_until())
            + num::integer::lcm(self.modulus, other.modulus)
    }

    pub fn subset_of(&self, other: &IndexSet) -> bool {
        let h = self.joint_horizon(other);
        (1..=h).all(|i| !self.contains(i) || other.contains(i))
    }

    pub fn set_eq(&self, other: &IndexSet) -> bool {
        self.subset_of(other) && other.subset_of(self)
    }
}

/// Finitely many index-spans over a shared basis, intended to be totally
/// ordered by inclusion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainSpec {
    pub basis: BasisSpec,
    pub members: Vec<IndexSet>,
}

impl ChainSpec {
    pub fn new(basis: BasisSpec, members: Vec<IndexSet>) -> Self {
        ChainSpec { basis, members }
    }

    /// Distinct, pairwise comparable members sorted ascending by inclusion.
    pub fn validated(&self) -> Result<ChainSpec> {
        self.basis.det()?;
        for m in &self.members {
            m.validate()?;
        }
        for (i, a) in self.members.iter().enumerate() {
            for b in &self.members[i + 1..] {
                if a.set_eq(b) || (!a.subset_of(b) && !b.subset_of(a)) {
                    return Err(Error::NotAChain);
                }
            }
        }
        let mut members = self.members.clone();
        members.sort_by(|a, b| {
            if a.subset_of(b) {
                std::cmp::Ordering::Less
            } else {
                std::cmp::Ordering::Greater
            }
        });
        Ok(ChainSpec::new(self.basis.clone(), members))
    }
}

/// The set of chain members containing a given vector (always an up-set of
/// the inclusion-sorted chain).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MembershipProfile {
    pub containing: Vec<usize>,
}

/// Coordinates of `v` over the chain's basis, exact; the support of these
/// coordinates decides membership in every index-span at once.
fn basis_coordinates(basis: &BasisSpec, v: &Vector) -> Result<Vec<(i64, Scalar)>> {
    if v.is_zero() {
        return Err(Error::ZeroVector);
    }
    if !v.supported_within(|s| s >= 1) {
        return Err(Error::InvalidSpec("vector leaves the index range".into()));
    }
    let n = v.max_slot().unwrap_or(0).max(basis.max_touched());
    let columns: Vec<Vector> = (1..=n).map(|i| basis.vector_at(i)).collect();
    let coords = solve_linear(&columns, v).expect("a validated basis spans its window");
    Ok(coords
        .into_iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(k, c)| (k as i64 + 1, c))
        .collect())
}

/// Which members of `c` contain `v`.
pub fn partition_class(c: &ChainSpec, v: &Vector) -> Result<MembershipProfile> {
    let c = c.validated()?;
    let support: Vec<i64> = basis_coordinates(&c.basis, v)?
        .into_iter()
        .map(|(i, _)| i)
        .collect();
    Ok(MembershipProfile {
        containing: (0..c.members.len())
            .filter(|j| support.iter().all(|i| c.members[*j].contains(*i)))
            .collect(),
    })
}

/// The unique generalized flag inducing the same partition of V as the
/// chain: indices are grouped by their membership profile, profiles ordered
/// by the smallest containing member.
pub fn flag_of_chain(c: &ChainSpec) -> Result<GeneralizedFlagSpec> {
    let c = c.validated()?;
    let horizon = c
        .members
        .iter()
        .map(IndexSet::irregular_until)
        .max()
        .unwrap_or(0);
    let period = c
        .members
        .iter()
        .fold(1i64, |acc, m| num::integer::lcm(acc, m.modulus));
    let first_containing = |i: i64| -> i64 {
        c.members
            .iter()
            .position(|m| m.contains(i))
            .unwrap_or(c.members.len()) as i64
    };
    let window = (1..=horizon)
        .map(|i| PositionLabel::of_ints(0, first_containing(i) + 1))
        .collect();
    let rules = (0..period)
        .map(|r| {
            let rep = horizon + 1 + (r - horizon - 1).rem_euclid(period);
            AffineLabel::new(
                0,
                Scalar::zero(),
                Scalar::from_int(first_containing(rep) + 1),
            )
        })
        .collect();
    let mut coloring = Coloring::new(
        window,
        TailRule::Affine {
            modulus: period,
            rules,
        },
    );
    coloring.canonicalize();
    Ok(GeneralizedFlagSpec::new(c.basis.clone(), coloring))
}

/// The chain of all spaces F′, F″ of a spec with finitely many positions
/// (every tail class constant).
pub fn induced_chain(s: &GeneralizedFlagSpec) -> Result<ChainSpec> {
    let TailRule::Affine { modulus, rules } = &s.coloring.tail else {
        return Err(Error::InvalidSpec(
            "dense tails occupy infinitely many positions".into(),
        ));
    };
    if rules.iter().any(|r| !r.slope.is_zero()) {
        return Err(Error::InvalidSpec(
            "sloped tails occupy infinitely many positions".into(),
        ));
    }
    let n0 = s.coloring.window_len();
    let labels = {
        let mut ls: Vec<PositionLabel> = s.coloring.window.clone();
        ls.extend(rules.iter().map(|r| PositionLabel::new(r.tier, r.intercept.clone())));
        ls.sort();
        ls.dedup();
        ls
    };
    let index_set_where = |strictly_below: bool, a: &PositionLabel| -> IndexSet {
        let keep = |l: &PositionLabel| if strictly_below { l < a } else { l <= a };
        IndexSet {
            explicit: (1..=n0)
                .filter(|i| keep(&s.coloring.label(*i)))
                .collect(),
            from: n0 + 1,
            modulus: *modulus,
            residues: (0..*modulus)
                .filter(|r| keep(&PositionLabel::new(rules[*r as usize].tier, rules[*r as usize].intercept.clone())))
                .collect(),
        }
    };
    let mut members: Vec<IndexSet> = Vec::new();
    for a in &labels {
        for set in [index_set_where(true, a), index_set_where(false, a)] {
            let empty = set.explicit.is_empty() && set.residues.is_empty();
            if !empty && !members.iter().any(|m| m.set_eq(&set)) {
                members.push(set);
            }
        }
    }
    ChainSpec::new(s.basis.clone(), members).validated()
}

/// Label clouds of one index species, used for order comparisons between
/// whole families of indices at once.
enum Cloud {
    Point(PositionLabel),
    Up { tier: i64, min: Scalar },
    Down { tier: i64, max: Scalar },
}

impl Cloud {
    /// Whether some label of `self` lies strictly below some label of `other`.
    fn some_below(&self, other: &Cloud) -> bool {
        let (st, ot) = (self.tier(), other.tier());
        if st != ot {
            return st < ot;
        }
        match self {
            Cloud::Down { .. } => true,
            _ => match other {
                Cloud::Up { .. } => true,
                _ => self.min_offset() < other.max_offset(),
            },
        }
    }

    fn tier(&self) -> i64 {
        match self {
            Cloud::Point(l) => l.tier,
            Cloud::Up { tier, .. } | Cloud::Down { tier, .. } => *tier,
        }
    }

    fn min_offset(&self) -> &Scalar {
        match self {
            Cloud::Point(l) => &l.offset,
            Cloud::Up { min, .. } => min,
            Cloud::Down { .. } => unreachable!("unbounded below"),
        }
    }

    fn max_offset(&self) -> &Scalar {
        match self {
            Cloud::Point(l) => &l.offset,
            Cloud::Down { max, .. } => max,
            Cloud::Up { .. } => unreachable!("unbounded above"),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
enum Species {
    Window(i64),
    Residue(i64),
}

/// Refines a flag spec by extra chain members over the same basis: the
/// result is the flag of the chain {all F′, F″ of s} ∪ {spans of extras}.
/// Extras must be pairwise comparable and each must be downward closed with
/// respect to the coloring, otherwise the union is not a chain.
pub fn flag_of_spec_chain(
    s: &GeneralizedFlagSpec,
    extras: &[IndexSet],
) -> Result<GeneralizedFlagSpec> {
    let spec = super::validate_spec(s)?.spec;
    if extras.is_empty() {
        return Ok(spec);
    }
    for e in extras {
        e.validate()?;
    }
    let TailRule::Affine { modulus, rules } = spec.coloring.tail.clone() else {
        return Err(Error::InvalidSpec(
            "dense tails admit no periodic refinements".into(),
        ));
    };
    for (i, a) in extras.iter().enumerate() {
        for b in &extras[i + 1..] {
            if !a.subset_of(b) && !b.subset_of(a) {
                return Err(Error::NotAChain);
            }
        }
    }

    let n0 = spec.coloring.window_len();
    let mut horizon = n0;
    let mut period = modulus;
    for e in extras {
        horizon = horizon.max(e.irregular_until());
        period = num::integer::lcm(period, e.modulus);
    }
    // Indices where a sloped class meets a constant or window label must sit
    // inside the window of the refined spec, so classes that may split are
    // unions of window indices and whole constant residue classes.
    let mut point_labels: Vec<PositionLabel> = spec.coloring.window.clone();
    point_labels.extend(
        rules
            .iter()
            .filter(|r| r.slope.is_zero())
            .map(|r| PositionLabel::new(r.tier, r.intercept.clone())),
    );
    point_labels.sort();
    point_labels.dedup();
    for a in &point_labels {
        for (r, rule) in rules.iter().enumerate() {
            if rule.slope.is_zero() || rule.tier != a.tier {
                continue;
            }
            let i = (&a.offset - &rule.intercept) / rule.slope.clone();
            if i.is_integer() {
                if let Ok(i) = i64::try_from(&i.floor_int()) {
                    if i > n0 && i.rem_euclid(modulus) == r as i64 {
                        horizon = horizon.max(i);
                    }
                }
            }
        }
    }

    let species: Vec<Species> = (1..=horizon)
        .map(Species::Window)
        .chain((0..period).map(Species::Residue))
        .collect();
    let first_index = |c: i64| horizon + 1 + (c - horizon - 1).rem_euclid(period);
    let cloud = |sp: &Species| -> Cloud {
        match sp {
            Species::Window(i) => Cloud::Point(spec.coloring.label(*i)),
            Species::Residue(c) => {
                let rule = &rules[(c.rem_euclid(modulus)) as usize];
                if rule.slope.is_zero() {
                    Cloud::Point(PositionLabel::new(rule.tier, rule.intercept.clone()))
                } else {
                    let edge = rule.at(first_index(*c)).offset;
                    if rule.slope.is_negative() {
                        Cloud::Down {
                            tier: rule.tier,
                            max: edge,
                        }
                    } else {
                        Cloud::Up {
                            tier: rule.tier,
                            min: edge,
                        }
                    }
                }
            }
        }
    };
    let in_extra = |sp: &Species, e: &IndexSet| -> bool {
        match sp {
            Species::Window(i) => e.contains(*i),
            Species::Residue(c) => e.contains(first_index(*c)),
        }
    };

    // Downward closure of each extra: no excluded species may reach below an
    // included one.
    for e in extras {
        for x in &species {
            if in_extra(x, e) {
                continue;
            }
            for y in &species {
                if in_extra(y, e) && cloud(x).some_below(&cloud(y)) {
                    return Err(Error::NotAChain);
                }
            }
        }
    }

    // Group point species by label; classes whose members disagree on some
    // extra split into consecutive positions (more extras ⇒ lower).
    let mut classes: BTreeMap<PositionLabel, Vec<Species>> = BTreeMap::new();
    for sp in &species {
        if let Cloud::Point(l) = cloud(sp) {
            classes.entry(l).or_default().push(*sp);
        }
    }
    let profile = |sp: &Species| -> usize { extras.iter().filter(|e| in_extra(sp, e)).count() };
    // New offset per species of a split class.
    let mut shifts: BTreeMap<Species, Scalar> = BTreeMap::new();
    for (label, members) in &classes {
        let mut ranks: Vec<usize> = members.iter().map(|sp| profile(sp)).collect();
        ranks.sort_unstable();
        ranks.dedup();
        if ranks.len() <= 1 {
            continue;
        }
        ranks.reverse(); // most extras first = lowest part
        let gap = nearest_offset_above(&spec.coloring, &rules, modulus, label)
            .map(|next| (next - &label.offset) / Scalar::from_int(ranks.len() as i64))
            .unwrap_or_else(|| Scalar::new(1, ranks.len() as i64));
        for sp in members {
            let part = ranks.iter().position(|r| *r == profile(sp)).unwrap() as i64;
            shifts.insert(*sp, &label.offset + &(Scalar::from_int(part) * gap.clone()));
        }
    }

    let window = (1..=horizon)
        .map(|i| {
            let base = spec.coloring.label(i);
            match shifts.get(&Species::Window(i)) {
                Some(off) => PositionLabel::new(base.tier, off.clone()),
                None => base,
            }
        })
        .collect();
    let new_rules = (0..period)
        .map(|c| {
            let rule = rules[(c.rem_euclid(modulus)) as usize].clone();
            match shifts.get(&Species::Residue(c)) {
                Some(off) => AffineLabel::new(rule.tier, Scalar::zero(), off.clone()),
                None => rule,
            }
        })
        .collect();
    let mut coloring = Coloring::new(
        window,
        TailRule::Affine {
            modulus: period,
            rules: new_rules,
        },
    );
    coloring.canonicalize();
    coloring.validate()?;
    Ok(GeneralizedFlagSpec::new(spec.basis, coloring))
}

/// Smallest label offset strictly above `at` within its tier, over all
/// occupied labels of the coloring (window entries, constants, and sloped
/// progressions).
fn nearest_offset_above(
    coloring: &Coloring,
    rules: &[AffineLabel],
    modulus: i64,
    at: &PositionLabel,
) -> Option<Scalar> {
    let mut best: Option<Scalar> = None;
    let mut offer = |cand: Scalar| {
        if cand > at.offset && best.as_ref().is_none_or(|b| cand < *b) {
            best = Some(cand);
        }
    };
    for l in &coloring.window {
        if l.tier == at.tier {
            offer(l.offset.clone());
        }
    }
    let n0 = coloring.window_len();
    for (r, rule) in rules.iter().enumerate() {
        if rule.tier != at.tier {
            continue;
        }
        if rule.slope.is_zero() {
            offer(rule.intercept.clone());
            continue;
        }
        // First index of the class, then the first progression value above.
        let mut i = n0 + 1;
        while i.rem_euclid(modulus) != r as i64 {
            i += 1;
        }
        let start = rule.at(i).offset;
        let step = rule.slope.abs() * Scalar::from_int(modulus);
        if rule.slope.is_negative() {
            // Values descend from `start`; the smallest one above `at`.
            if start > at.offset {
                let down = (&start - &at.offset) / step.clone();
                let mut j = down.floor_int();
                if Scalar::from_bigint(j.clone()) == down {
                    j -= 1; // land strictly above
                }
                offer(start - Scalar::from_bigint(j) * step);
            }
        } else {
            let up = (&at.offset - &start) / step.clone();
            let j = num::BigInt::from(0).max(up.floor_int() + 1);
            offer(start + Scalar::from_bigint(j) * step);
        }
    }
    best
}
