//! Exact integer combinatorics: binomial coefficients, composition counts,
//! bounded composition iteration and Young tableau rendering.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default box glyph for tableau rows (U+25A0 BLACK SQUARE).
pub const DEFAULT_GLYPH: char = '\u{25A0}';

/// An ordered sequence of positive parts with its sum cached.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Composition {
    parts: Vec<u32>,
    sum: u32,
}

impl Composition {
    /// Builds a composition, rejecting zero parts.
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        if parts.contains(&0) {
            return Err(Error::InvalidArgument("composition parts must be positive"));
        }
        let sum = parts
            .iter()
            .try_fold(0u32, |acc, &p| acc.checked_add(p))
            .ok_or(Error::Overflow)?;
        Ok(Self { parts, sum })
    }

    pub fn empty() -> Self {
        Self {
            parts: Vec::new(),
            sum: 0,
        }
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    /// `|λ|`
    pub fn sum(&self) -> u32 {
        self.sum
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn first(&self) -> Option<u32> {
        self.parts.first().copied()
    }

    pub fn last(&self) -> Option<u32> {
        self.parts.last().copied()
    }

    pub fn into_parts(self) -> Vec<u32> {
        self.parts
    }
}

impl TryFrom<Vec<u32>> for Composition {
    type Error = Error;

    fn try_from(parts: Vec<u32>) -> Result<Self> {
        Self::new(parts)
    }
}

impl From<Composition> for Vec<u32> {
    fn from(c: Composition) -> Self {
        c.parts
    }
}

impl fmt::Display for Composition {
    /// Writes the parts joined by `+`, e.g. `2+5`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                f.write_str("+")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

/// `C(n, k)` as a total function: zero whenever `k < 0`, `k > n` or `n < 0`.
pub fn binomial(n: i64, k: i64) -> Result<u64> {
    if n < 0 || k < 0 || k > n {
        return Ok(0);
    }
    let k = k.min(n - k) as u128;
    let n = n as u128;
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1) at every step
        acc = acc.checked_mul(n - i).ok_or(Error::Overflow)? / (i + 1);
    }
    u64::try_from(acc).map_err(|_| Error::Overflow)
}

/// `c(m, n) = C(n-1, m-1)`: compositions of `n` with exactly `m` parts.
pub fn composition_count(m: i64, n: i64) -> Result<u64> {
    binomial(n - 1, m - 1)
}

/// `ĉ(m, n) = c(m, n-m)`: compositions of `n` with `m` parts, every part at least 2.
pub fn composition_count_min2(m: i64, n: i64) -> Result<u64> {
    composition_count(m, n - m)
}

/// Every composition of `n` with exactly `m` parts in `[min_part, max_part]`,
/// in lexicographic order of the part sequence.
pub fn iterate_compositions(n: u32, m: usize, min_part: u32, max_part: u32) -> Result<Compositions> {
    if min_part == 0 {
        return Err(Error::InvalidArgument("min_part must be at least 1"));
    }
    if max_part < min_part {
        return Err(Error::InvalidArgument("max_part must be at least min_part"));
    }
    Ok(Compositions::new(n, m, min_part, max_part))
}

/// Lexicographic iterator over bounded compositions. See [`iterate_compositions`].
#[derive(Debug, Clone)]
pub struct Compositions {
    n: u64,
    min: u64,
    max: u64,
    parts: Vec<u32>,
    state: IterState,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum IterState {
    Fresh,
    Running,
    Done,
}

impl Compositions {
    fn new(n: u32, m: usize, min: u32, max: u32) -> Self {
        let mut it = Self {
            n: u64::from(n),
            min: u64::from(min),
            max: u64::from(max),
            parts: alloc::vec![0; m],
            state: IterState::Fresh,
        };
        if !it.fill_from(0, it.n) {
            it.state = IterState::Done;
        }
        it
    }

    fn feasible(&self, slots: usize, rest: u64) -> bool {
        let slots = slots as u64;
        slots * self.min <= rest && rest <= slots * self.max
    }

    /// Fills `parts[start..]` with the lexicographically smallest suffix summing to `rest`.
    fn fill_from(&mut self, start: usize, mut rest: u64) -> bool {
        let m = self.parts.len();
        if !self.feasible(m - start, rest) {
            return false;
        }
        for j in start..m {
            let after = (m - j - 1) as u64;
            let part = self.min.max(rest.saturating_sub(after * self.max));
            self.parts[j] = part as u32;
            rest -= part;
        }
        true
    }

    fn advance(&mut self) -> bool {
        let m = self.parts.len();
        if m < 2 {
            return false;
        }
        let mut prefix: u64 = self.parts[..m - 1].iter().map(|&p| u64::from(p)).sum();
        for i in (0..m - 1).rev() {
            let current = u64::from(self.parts[i]);
            prefix -= current;
            let bumped = current + 1;
            if bumped <= self.max && bumped + prefix <= self.n {
                let rest = self.n - prefix - bumped;
                if self.feasible(m - i - 1, rest) {
                    self.parts[i] = bumped as u32;
                    return self.fill_from(i + 1, rest);
                }
            }
        }
        false
    }
}

impl Iterator for Compositions {
    type Item = Composition;

    fn next(&mut self) -> Option<Composition> {
        match self.state {
            IterState::Done => return None,
            IterState::Fresh => self.state = IterState::Running,
            IterState::Running => {
                if !self.advance() {
                    self.state = IterState::Done;
                    return None;
                }
            }
        }
        Some(Composition {
            parts: self.parts.clone(),
            sum: self.n as u32,
        })
    }
}

/// Renders one left-aligned row of [`DEFAULT_GLYPH`] per part.
pub fn render_tableau(c: &Composition) -> Result<String> {
    render_tableau_with(c, DEFAULT_GLYPH)
}

/// Renders one left-aligned row per part using `glyph` for each box. Rows are
/// separated by `\n` with no trailing newline.
pub fn render_tableau_with(c: &Composition, glyph: char) -> Result<String> {
    if c.is_empty() {
        return Err(Error::InvalidArgument("cannot render an empty composition"));
    }
    let mut out = String::with_capacity(c.sum() as usize * glyph.len_utf8() + c.len());
    for (i, &width) in c.parts().iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        out.extend(core::iter::repeat_n(glyph, width as usize));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn all(n: u32, m: usize, lo: u32, hi: u32) -> Vec<Vec<u32>> {
        iterate_compositions(n, m, lo, hi)
            .unwrap()
            .map(Composition::into_parts)
            .collect()
    }

    /// Independent brute force: every m-tuple over [lo, hi] whose sum is n,
    /// generated in lexicographic order by odometer counting.
    fn brute(n: u32, m: usize, lo: u32, hi: u32) -> Vec<Vec<u32>> {
        let mut out = Vec::new();
        if m == 0 {
            if n == 0 {
                out.push(Vec::new());
            }
            return out;
        }
        let mut t = vec![lo; m];
        loop {
            if t.iter().sum::<u32>() == n {
                out.push(t.clone());
            }
            let mut i = m;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                if t[i] < hi {
                    t[i] += 1;
                    for x in t.iter_mut().skip(i + 1) {
                        *x = lo;
                    }
                    break;
                }
            }
        }
    }

    #[test]
    fn binomial_examples() {
        assert_eq!(binomial(5, 0), Ok(1));
        assert_eq!(binomial(4, 7), Ok(0));
        assert_eq!(binomial(-1, 2), Ok(0));
        assert_eq!(binomial(6, 1), Ok(6));
        assert_eq!(binomial(3, -1), Ok(0));
        assert_eq!(binomial(0, 0), Ok(1));
        assert_eq!(binomial(62, 31), Ok(465_428_353_255_261_088));
    }

    #[test]
    fn binomial_overflow_is_reported() {
        assert_eq!(binomial(67, 33), Ok(14_226_520_737_620_288_370));
        assert_eq!(binomial(68, 34), Err(Error::Overflow));
        assert_eq!(binomial(i64::MAX, 3), Err(Error::Overflow));
    }

    #[test]
    fn composition_count_examples() {
        assert_eq!(composition_count(1, 7), Ok(1));
        assert_eq!(composition_count(7, 7), Ok(1));
        // brute force: 91 triples of positive integers summing to 15
        assert_eq!(brute(15, 3, 1, 15).len(), 91);
        assert_eq!(composition_count(3, 15), Ok(91));
    }

    #[test]
    fn min2_examples() {
        assert_eq!(composition_count_min2(5, 14), composition_count(5, 9));
        assert_eq!(composition_count_min2(3, 5), Ok(0));
        assert_eq!(brute(6, 2, 2, 6), vec![vec![2, 4], vec![3, 3], vec![4, 2]]);
        assert_eq!(composition_count_min2(2, 6), Ok(3));
    }

    #[test]
    fn iterator_examples() {
        assert_eq!(
            all(7, 2, 1, 11),
            vec![vec![1, 6], vec![2, 5], vec![3, 4], vec![4, 3], vec![5, 2], vec![6, 1]]
        );
        assert_eq!(all(5, 1, 1, 11), vec![vec![5]]);
        assert!(all(15, 3, 2, 11).iter().all(|c| c[1] != 1));
    }

    #[test]
    fn iterator_degenerate_parameters() {
        assert_eq!(all(0, 0, 1, 5), vec![Vec::<u32>::new()]);
        assert!(all(3, 0, 1, 5).is_empty());
        assert!(all(0, 2, 1, 5).is_empty());
        assert!(all(30, 2, 1, 11).is_empty());
        assert!(all(3, 4, 1, 11).is_empty());
        assert!(iterate_compositions(3, 1, 0, 4).is_err());
        assert!(iterate_compositions(3, 1, 5, 4).is_err());
    }

    #[test]
    fn iterator_matches_brute_force() {
        for n in 0..=12 {
            for m in 0..=5 {
                for (lo, hi) in [(1, 12), (2, 5), (1, 3), (3, 3)] {
                    assert_eq!(all(n, m, lo, hi), brute(n, m, lo, hi), "n={n} m={m} [{lo},{hi}]");
                }
            }
        }
    }

    #[test]
    fn composition_rejects_zero_part() {
        assert!(Composition::new(vec![3, 0, 1]).is_err());
        let c = Composition::new(vec![3, 2, 4, 1]).unwrap();
        assert_eq!(c.sum(), 10);
        assert_eq!(c.to_string(), "3+2+4+1");
        assert_eq!(Composition::empty().sum(), 0);
        assert_eq!(Composition::empty().len(), 0);
    }

    #[test]
    fn tableau_rows() {
        let c = Composition::new(vec![3, 2, 4, 1]).unwrap();
        let widths: Vec<usize> = render_tableau(&c)
            .unwrap()
            .lines()
            .map(|l| l.chars().count())
            .collect();
        assert_eq!(widths, vec![3, 2, 4, 1]);

        let one = Composition::new(vec![1]).unwrap();
        assert_eq!(render_tableau_with(&one, '#').unwrap(), "#");

        let stair = Composition::new(vec![4, 3, 2, 1, 1]).unwrap();
        assert_eq!(
            render_tableau_with(&stair, '#').unwrap(),
            "####\n###\n##\n#\n#"
        );
        assert!(render_tableau(&Composition::empty()).is_err());
    }
}
