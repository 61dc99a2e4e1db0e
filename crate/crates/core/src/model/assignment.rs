use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// Largest `n` for which an assignment round-trips through a single `u64` mask.
pub const MASK_CAP: usize = 63;

/// A point of the sign cube `{-1, +1}^n`, stored as a packed bit vector.
///
/// Bit `i` is set exactly when coordinate `i` carries sign `-1`. Coordinates
/// are 0-based in the API; the text formats use 1-based variable indices.
///
/// The total order compares coordinates from index 0 upward with `+1 < -1`,
/// so the all-`+1` point is the smallest assignment. Solvers use this order
/// to break ties between equal objective values.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Assignment {
    n: usize,
    words: Vec<u64>,
}

impl Assignment {
    /// The all-`+1` assignment.
    pub fn ones(n: usize) -> Self {
        Assignment {
            n,
            words: vec![0; n.div_ceil(64)],
        }
    }

    pub fn from_signs(signs: &[i8]) -> Result<Self> {
        let mut a = Assignment::ones(signs.len());
        for (i, &s) in signs.iter().enumerate() {
            match s {
                1 => {}
                -1 => a.set_bit(i, true),
                other => {
                    return Err(Error::domain(format!(
                        "coordinate {i} has sign {other}, expected -1 or +1"
                    )))
                }
            }
        }
        Ok(a)
    }

    /// Decodes the canonical bitmask encoding (bit `i` set means sign `-1`).
    pub fn from_mask(n: usize, mask: u64) -> Result<Self> {
        if n > MASK_CAP {
            return Err(Error::TooLarge { n, cap: MASK_CAP });
        }
        if n < 64 && mask >> n != 0 {
            return Err(Error::domain(format!("mask {mask:#x} has bits beyond n = {n}")));
        }
        let mut a = Assignment::ones(n);
        if n > 0 {
            a.words[0] = mask;
        }
        Ok(a)
    }

    pub(crate) fn from_words(n: usize, mut words: Vec<u64>) -> Self {
        words.resize(n.div_ceil(64), 0);
        if n % 64 != 0 {
            if let Some(last) = words.last_mut() {
                *last &= (1u64 << (n % 64)) - 1;
            }
        }
        Assignment { n, words }
    }

    pub fn to_mask(&self) -> Option<u64> {
        if self.n > MASK_CAP {
            return None;
        }
        Some(self.words.first().copied().unwrap_or(0))
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// `true` when coordinate `i` is `-1`.
    #[inline]
    pub fn bit(&self, i: usize) -> bool {
        debug_assert!(i < self.n);
        (self.words[i >> 6] >> (i & 63)) & 1 == 1
    }

    #[inline]
    pub fn sign(&self, i: usize) -> i8 {
        if self.bit(i) {
            -1
        } else {
            1
        }
    }

    #[inline]
    pub fn set_bit(&mut self, i: usize, negative: bool) {
        debug_assert!(i < self.n);
        let m = 1u64 << (i & 63);
        if negative {
            self.words[i >> 6] |= m;
        } else {
            self.words[i >> 6] &= !m;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.n);
        self.words[i >> 6] ^= 1u64 << (i & 63);
    }

    pub fn signs(&self) -> Vec<i8> {
        (0..self.n).map(|i| self.sign(i)).collect()
    }

    /// Number of `-1` coordinates.
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn hamming_distance(&self, other: &Assignment) -> Result<usize> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        Ok(self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum())
    }

    /// Coordinatewise product `self ⊙ other`.
    pub fn product(&self, other: &Assignment) -> Result<Assignment> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        let words = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| a ^ b)
            .collect();
        Ok(Assignment { n: self.n, words })
    }

    /// Indices where `self` and `other` differ (assumes equal length).
    pub fn differing_coords(&self, other: &Assignment) -> Vec<usize> {
        let mut out = Vec::new();
        for (w, (a, b)) in self.words.iter().zip(&other.words).enumerate() {
            let mut d = a ^ b;
            while d != 0 {
                out.push(w * 64 + d.trailing_zeros() as usize);
                d &= d - 1;
            }
        }
        out
    }
}

impl Ord for Assignment {
    fn cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.words.iter().zip(&other.words) {
            let d = a ^ b;
            if d != 0 {
                let low = d & d.wrapping_neg();
                return if a & low == 0 {
                    Ordering::Less
                } else {
                    Ordering::Greater
                };
            }
        }
        self.n.cmp(&other.n)
    }
}

impl PartialOrd for Assignment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Assignment(")?;
        fmt::Display::fmt(self, f)?;
        write!(f, ")")
    }
}

/// Renders as a string of `+`/`-` characters, coordinate 0 first.
impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            f.write_str(if self.bit(i) { "-" } else { "+" })?;
        }
        Ok(())
    }
}

impl std::str::FromStr for Assignment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let signs = s
            .trim()
            .chars()
            .map(|c| match c {
                '+' => Ok(1),
                '-' => Ok(-1),
                other => Err(Error::domain(format!("unexpected character {other:?}"))),
            })
            .collect::<Result<Vec<i8>>>()?;
        Assignment::from_signs(&signs)
    }
}

impl serde::Serialize for Assignment {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}
