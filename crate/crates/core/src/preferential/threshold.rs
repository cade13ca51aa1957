use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use super::ClearingError;
use crate::network::Amount;

/// Fraction `num/den` in `(0, 1]` of an arc's amount that must be cleared
/// before the arc counts as finished.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Threshold {
    num: u64,
    den: u64,
}

impl Threshold {
    pub const ONE: Threshold = Threshold { num: 1, den: 1 };

    pub fn new(num: u64, den: u64) -> Result<Self, ClearingError> {
        if den == 0 || num == 0 || num > den {
            return Err(ClearingError::Epsilon(format!("{num}/{den}")));
        }
        let g = num_integer::gcd(num, den);
        Ok(Threshold {
            num: num / g,
            den: den / g,
        })
    }

    pub fn num(self) -> u64 {
        self.num
    }

    pub fn den(self) -> u64 {
        self.den
    }

    /// `cleared >= (num/den) * amount`, compared without rounding.
    pub fn is_reached(self, cleared: Amount, amount: Amount) -> bool {
        cleared as u128 * self.den as u128 >= amount as u128 * self.num as u128
    }
}

impl Default for Threshold {
    fn default() -> Self {
        Threshold::ONE
    }
}

impl fmt::Display for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for Threshold {
    type Err = ClearingError;

    /// Accepts `NUM/DEN` or a bare integer (only `1` is in range).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ClearingError::Epsilon(s.to_string());
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s.trim(), "1"),
        };
        let num = num.parse().map_err(|_| bad())?;
        let den = den.parse().map_err(|_| bad())?;
        Threshold::new(num, den)
    }
}

/// A default threshold plus per-arc overrides.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Thresholds {
    pub default: Threshold,
    pub per_arc: BTreeMap<usize, Threshold>,
}

impl Thresholds {
    pub fn uniform(epsilon: Threshold) -> Self {
        Thresholds {
            default: epsilon,
            per_arc: BTreeMap::new(),
        }
    }

    pub fn for_arc(&self, arc: usize) -> Threshold {
        self.per_arc.get(&arc).copied().unwrap_or(self.default)
    }
}

impl From<Threshold> for Thresholds {
    fn from(epsilon: Threshold) -> Self {
        Thresholds::uniform(epsilon)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parsing_and_range() {
        assert_eq!("3/5".parse::<Threshold>().unwrap(), Threshold::new(3, 5).unwrap());
        assert_eq!("6/10".parse::<Threshold>().unwrap().to_string(), "3/5");
        assert_eq!("1".parse::<Threshold>().unwrap(), Threshold::ONE);
        for bad in ["0/1", "0", "5/4", "1/0", "x", "-1/2", "1.5"] {
            assert!(bad.parse::<Threshold>().is_err(), "{bad}");
        }
    }

    #[test]
    fn exact_comparison() {
        let eps = Threshold::new(3, 5).unwrap();
        assert!(eps.is_reached(3, 5));
        assert!(!eps.is_reached(3, 7));
        assert!(Threshold::ONE.is_reached(7, 7));
        assert!(!Threshold::ONE.is_reached(6, 7));
        // 1/3 of 3 is exactly 1
        assert!(Threshold::new(1, 3).unwrap().is_reached(1, 3));
    }
}
