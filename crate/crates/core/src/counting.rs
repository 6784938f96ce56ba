//! The two counting theorems for legal dealer compositions, with every
//! correction term exposed, plus the i-Ace set constructor.
//!
//! Terms are evaluated exactly as the formulas are written, with out-of-range
//! binomials vanishing. Whether a formula matches the real dealer is the
//! oracle's call, not this module's.

use alloc::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::combinatorics::{binomial, composition_count, iterate_compositions, Composition};
use crate::error::{Error, Result};

/// Largest `target - upcard` gap covered by the closed-form count.
pub const CLOSED_FORM_MAX_GAP: i64 = 11;

/// Soft bonus of an ace (11 - 1).
pub const ACE_BONUS: u32 = 10;

/// Game parameters: stand value `s`, bust value `b`, highest card value `A`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RuleSet {
    stand: u32,
    bust: u32,
    max_card: u32,
}

impl RuleSet {
    pub fn new(stand: u32, bust: u32, max_card: u32) -> Result<Self> {
        if stand < 2 {
            return Err(Error::InvalidRules("stand must be at least 2"));
        }
        if bust < stand {
            return Err(Error::InvalidRules("bust must be at least stand"));
        }
        if max_card < 2 {
            return Err(Error::InvalidRules("max card must be at least 2"));
        }
        Ok(Self {
            stand,
            bust,
            max_card,
        })
    }

    pub fn stand(&self) -> u32 {
        self.stand
    }

    pub fn bust(&self) -> u32 {
        self.bust
    }

    pub fn max_card(&self) -> u32 {
        self.max_card
    }
}

impl Default for RuleSet {
    fn default() -> Self {
        Self {
            stand: 17,
            bust: 21,
            max_card: 11,
        }
    }
}

/// A counting question: in how many ways does a dealer showing `upcard`
/// finish on exactly `target` after revealing `cards` cards? The face-down
/// card is one of the `cards`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Query {
    pub upcard: u32,
    pub target: u32,
    pub cards: u32,
}

impl Query {
    pub fn new(upcard: u32, target: u32, cards: u32) -> Self {
        Self {
            upcard,
            target,
            cards,
        }
    }

    pub fn validate(&self, rules: &RuleSet) -> Result<()> {
        if self.upcard < 1 || self.upcard > rules.max_card {
            return Err(Error::InvalidQuery("upcard must lie in 1..=max_card"));
        }
        if self.target < rules.stand || self.target > rules.bust {
            return Err(Error::InvalidQuery("target must lie in stand..=bust"));
        }
        if self.cards < 1 || self.cards > self.target.saturating_sub(self.upcard) {
            return Err(Error::InvalidQuery("cards must lie in 1..=target-upcard"));
        }
        Ok(())
    }

    /// `w - d`
    pub fn gap(&self) -> i64 {
        i64::from(self.target) - i64::from(self.upcard)
    }

    pub fn regime(&self) -> Regime {
        if self.gap() <= CLOSED_FORM_MAX_GAP {
            Regime::Closed
        } else {
            Regime::General
        }
    }
}

/// Which counting theorem governs a query.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    /// `w - d <= 11`
    Closed,
    General,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::Closed => "closed",
            Regime::General => "general",
        }
    }
}

/// Unrestricted composition count, each restriction's correction term and
/// the resulting net count.
///
/// `net` is whatever the formula produced, negative values included.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CountBreakdown {
    pub unrestricted: u64,
    pub r1: u64,
    pub r2: u64,
    pub r3: u64,
    pub r4: u64,
    pub r_star: u64,
    pub r2_star: u64,
    pub net: i64,
}

impl CountBreakdown {
    /// `unrestricted - r1 - r2 - r3 - r4 + r_star + r2_star`
    pub fn identity_net(&self) -> Result<i64> {
        let v = i128::from(self.unrestricted) - i128::from(self.r1) - i128::from(self.r2)
            - i128::from(self.r3)
            - i128::from(self.r4)
            + i128::from(self.r_star)
            + i128::from(self.r2_star);
        i64::try_from(v).map_err(|_| Error::Overflow)
    }
}

fn sum_over(lo: i64, hi: i64, mut term: impl FnMut(i64) -> Result<u64>) -> Result<u64> {
    let mut acc: u64 = 0;
    for i in lo..=hi {
        acc = acc.checked_add(term(i)?).ok_or(Error::Overflow)?;
    }
    Ok(acc)
}

fn product(a: u64, b: u64) -> Result<u64> {
    a.checked_mul(b).ok_or(Error::Overflow)
}

struct Params {
    m: i64,
    w: i64,
    s: i64,
    d: i64,
    b: i64,
    a: i64,
}

impl Params {
    fn new(q: &Query, r: &RuleSet) -> Self {
        Self {
            m: i64::from(q.cards),
            w: i64::from(q.target),
            s: i64::from(r.stand),
            d: i64::from(q.upcard),
            b: i64::from(r.bust),
            a: i64::from(r.max_card),
        }
    }

    /// `C(s-d-2, m-1)`
    fn closed(&self) -> Result<u64> {
        binomial(self.s - self.d - 2, self.m - 1)
    }

    fn unrestricted(&self) -> Result<u64> {
        composition_count(self.m, self.w - self.d)
    }

    /// Compositions starting with 1: `C(w-d-2, m-2)`.
    fn r2(&self) -> Result<u64> {
        binomial(self.w - self.d - 2, self.m - 2)
    }

    /// Compositions ending in `1..=w-s`.
    fn r3(&self) -> Result<u64> {
        let Params { m, w, s, d, .. } = *self;
        sum_over(1, w - s, |i| binomial(w - d - i - 1, m - 2))
    }

    /// Compositions removed by both the first-card and last-card rules.
    fn r_star(&self) -> Result<u64> {
        let Params { m, w, s, d, .. } = *self;
        sum_over(1, w - s, |i| binomial(w - d - i - 2, m - 3))
    }

    /// Any part above the highest card: `m * sum_{i=A+1}^{w-d} C(w-d-i-1, m-2)`.
    fn r1(&self) -> Result<u64> {
        let Params { m, w, d, a, .. } = *self;
        let inner = sum_over(a + 1, w - d, |i| binomial(w - d - i - 1, m - 2))?;
        product(u64::try_from(m).map_err(|_| Error::Overflow)?, inner)
    }

    /// Forced-eleven aces: `sum_{j=2}^{10-d} sum_{i=0}^{m+3} C(j-i-2, i) C(s-d-j, m-3-i)`.
    fn r4(&self) -> Result<u64> {
        let Params { m, s, d, .. } = *self;
        sum_over(2, 10 - d, |j| {
            sum_over(0, m + 3, |i| {
                product(binomial(j - i - 2, i)?, binomial(s - d - j, m - 3 - i)?)
            })
        })
    }

    /// Face-down aces that legitimately count as one:
    /// `sum_{k=b-d-10}^{s-d-2} sum_{i=1}^{m-2} C(k-b+s-2, i-1) C(w-d-k-2, m-i-2)`.
    fn r2_star(&self) -> Result<u64> {
        let Params { m, w, s, d, b, .. } = *self;
        sum_over(b - d - 10, s - d - 2, |k| {
            sum_over(1, m - 2, |i| {
                product(
                    binomial(k - b + s - 2, i - 1)?,
                    binomial(w - d - k - 2, m - i - 2)?,
                )
            })
        })
    }

    fn diagnostics(&self) -> Result<(u64, u64, u64, u64)> {
        Ok((self.unrestricted()?, self.r2()?, self.r3()?, self.r_star()?))
    }
}

fn signed(v: u64) -> Result<i64> {
    i64::try_from(v).map_err(|_| Error::Overflow)
}

/// Closed-form count `C(s-d-2, m-1)`, valid when `w - d <= 11`.
///
/// The target does not enter the value; it only gates the regime.
pub fn closed_form_count(q: &Query, r: &RuleSet) -> Result<u64> {
    q.validate(r)?;
    if q.gap() > CLOSED_FORM_MAX_GAP {
        return Err(Error::WrongRegime {
            gap: q.gap(),
            limit: CLOSED_FORM_MAX_GAP,
            alternative: "general_count",
        });
    }
    Params::new(q, r).closed()
}

/// The general-case count, term by term.
///
/// `net = C(s-d-2, m-1) - r1 - r4 + r2_star`; `unrestricted`, `r2`, `r3` and
/// `r_star` are the closed-form reduction's terms, filled in for display.
/// When `d <= s - 2` those reduce to the same base, so
/// [`CountBreakdown::identity_net`] equals `net`.
pub fn general_count(q: &Query, r: &RuleSet) -> Result<CountBreakdown> {
    q.validate(r)?;
    let p = Params::new(q, r);
    let base = p.closed()?;
    let r1 = p.r1()?;
    let r4 = p.r4()?;
    let r2_star = p.r2_star()?;
    let (unrestricted, r2, r3, r_star) = p.diagnostics()?;
    let net = i128::from(base) - i128::from(r1) - i128::from(r4) + i128::from(r2_star);
    Ok(CountBreakdown {
        unrestricted,
        r1,
        r2,
        r3,
        r4,
        r_star,
        r2_star,
        net: i64::try_from(net).map_err(|_| Error::Overflow)?,
    })
}

/// Dispatches on the closed-form hypothesis `w - d <= 11`.
pub fn count(q: &Query, r: &RuleSet) -> Result<CountBreakdown> {
    q.validate(r)?;
    match q.regime() {
        Regime::General => general_count(q, r),
        Regime::Closed => {
            let p = Params::new(q, r);
            let (unrestricted, r2, r3, r_star) = p.diagnostics()?;
            Ok(CountBreakdown {
                unrestricted,
                r1: 0,
                r2,
                r3,
                r4: 0,
                r_star,
                r2_star: 0,
                net: signed(p.closed()?)?,
            })
        }
    }
}

/// The i-Ace set: compositions of length `i` with every part at least 2 and
/// `d + |λ| <= b - 11`, i.e. prefixes after which a drawn ace must count 11.
///
/// With the default rules the bound is the familiar `|λ| <= 10 - d`.
pub fn i_ace_set(i: usize, upcard: u32, r: &RuleSet) -> Result<BTreeSet<Composition>> {
    if i == 0 {
        return Err(Error::InvalidArgument("i-Ace set length must be at least 1"));
    }
    if upcard > ACE_BONUS {
        return Err(Error::InvalidArgument("i-Ace set needs an upcard of at most 10"));
    }
    let mut out = BTreeSet::new();
    let limit = i64::from(r.bust) - 11 - i64::from(upcard);
    let min_sum = 2 * i as i64;
    if limit < min_sum {
        return Ok(out);
    }
    for total in min_sum..=limit {
        out.extend(iterate_compositions(total as u32, i, 2, total as u32)?);
    }
    Ok(out)
}
