use super::Scalar;
use std::collections::BTreeMap;
use std::fmt;

/// A finitely supported vector: a map from integer slots to nonzero rational
/// coefficients.  Slot `i > 0` is the standard vector `e_i`; slot `-i` is the
/// paired vector `e^i` used by isotropic flags; slot `0` is the middle vector
/// `e_0` of an odd orthogonal form.  Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Vector {
    coords: BTreeMap<i64, Scalar>,
}

impl Vector {
    pub fn zero() -> Self {
        Vector::default()
    }

    pub fn unit(slot: i64) -> Self {
        let mut coords = BTreeMap::new();
        coords.insert(slot, Scalar::one());
        Vector { coords }
    }

    /// Builds a vector from (slot, coefficient) pairs, summing duplicates and
    /// dropping zeros.
    pub fn from_pairs<I: IntoIterator<Item = (i64, Scalar)>>(pairs: I) -> Self {
        let mut v = Vector::zero();
        for (slot, c) in pairs {
            v.add_to_slot(slot, c);
        }
        v
    }

    pub fn coeff(&self, slot: i64) -> Scalar {
        self.coords.get(&slot).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn support(&self) -> impl Iterator<Item = i64> + '_ {
        self.coords.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &Scalar)> {
        self.coords.iter().map(|(s, c)| (*s, c))
    }

    pub fn support_len(&self) -> usize {
        self.coords.len()
    }

    pub fn min_slot(&self) -> Option<i64> {
        self.coords.keys().next().copied()
    }

    pub fn max_slot(&self) -> Option<i64> {
        self.coords.keys().next_back().copied()
    }

    pub fn add_to_slot(&mut self, slot: i64, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let entry = self.coords.entry(slot).or_insert_with(Scalar::zero);
        *entry += c;
        if entry.is_zero() {
            self.coords.remove(&slot);
        }
    }

    pub fn add(&self, other: &Vector) -> Vector {
        let mut out = self.clone();
        for (slot, c) in other.iter() {
            out.add_to_slot(slot, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Vector) -> Vector {
        let mut out = self.clone();
        for (slot, c) in other.iter() {
            out.add_to_slot(slot, -c);
        }
        out
    }

    pub fn neg(&self) -> Vector {
        Vector {
            coords: self.coords.iter().map(|(s, c)| (*s, -c)).collect(),
        }
    }

    pub fn scale(&self, k: &Scalar) -> Vector {
        if k.is_zero() {
            return Vector::zero();
        }
        Vector {
            coords: self.coords.iter().map(|(s, c)| (*s, c * k)).collect(),
        }
    }

    /// Keeps only the slots accepted by the predicate.
    pub fn restrict<F: Fn(i64) -> bool>(&self, keep: F) -> Vector {
        Vector {
            coords: self
                .coords
                .iter()
                .filter(|(s, _)| keep(**s))
                .map(|(s, c)| (*s, c.clone()))
                .collect(),
        }
    }

    pub fn supported_within<F: Fn(i64) -> bool>(&self, inside: F) -> bool {
        self.coords.keys().all(|s| inside(*s))
    }
}

/// Formats one slot the way the CLI grammar spells basis vectors.
pub(crate) fn slot_name(slot: i64) -> String {
    if slot >= 0 {
        format!("e{slot}")
    } else {
        format!("e^{}", -slot)
    }
}

impl fmt::Display for Vector {
    /// `2 e1 - 3/2 e^2`; the zero vector prints as `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        // e0, e1, e2, ... then e^1, e^2, ...
        let mut ordered: Vec<(&i64, &Scalar)> = self.coords.iter().collect();
        ordered.sort_by_key(|(s, _)| (**s < 0, s.abs()));
        let mut first = true;
        for (slot, c) in ordered {
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if mag != Scalar::one() {
                write!(f, "{mag} ")?;
            }
            write!(f, "{}", slot_name(*slot))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
