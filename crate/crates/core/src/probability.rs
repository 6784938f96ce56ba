//! Infinite-deck dealer probabilities: the closed form, exact
//! enumeration-weighted sums, a forward recursion over hand states and a
//! seeded Monte Carlo estimator.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::counting::{RuleSet, ACE_BONUS};
use crate::error::{Error, Result};
use crate::oracle::{enumerate_hands, HandStart, HandState, ACE, SOFT_ACE, TEN};

/// Largest `w - d` gap for the closed-form probability.
pub const CLOSED_FORM_PROBABILITY_MAX_GAP: i64 = 9;

/// Tolerance on the total mass of a [`CardDistribution`].
pub const MASS_TOLERANCE: f64 = 1e-12;

/// Trials per Monte Carlo chunk. Each chunk has its own derived seed.
pub const MC_CHUNK_TRIALS: u64 = 1 << 16;

/// Identity of the Monte Carlo sampler: ChaCha8 per chunk, seeds derived by
/// SplitMix64, one uniform f64 per card.
pub const MC_ALGORITHM: &str = "chacha8-splitmix64-chunked-v1";

/// Draw probability for each card value 1 (ace) through 10.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CardDistribution {
    mass: [f64; 10],
}

impl CardDistribution {
    /// Validated distribution: non-negative masses summing to 1.
    pub fn new(mass: [f64; 10]) -> Result<Self> {
        if mass.iter().any(|m| !m.is_finite() || *m < 0.0) {
            return Err(Error::InvalidDistribution("masses must be finite and non-negative"));
        }
        let total: f64 = mass.iter().sum();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::InvalidDistribution("masses must sum to 1"));
        }
        Ok(Self { mass })
    }

    /// Every value including ten at 1/13. Sums to 10/13; only meant for
    /// comparing against the closed form, which assumes 1/13 for every card.
    pub fn uniform_diagnostic() -> Self {
        Self {
            mass: [1.0 / 13.0; 10],
        }
    }

    /// Mass of card value `card` (1 = ace); zero outside 1..=10.
    pub fn mass(&self, card: u32) -> f64 {
        match card {
            ACE..=TEN => self.mass[card as usize - 1],
            _ => 0.0,
        }
    }

    /// Mass of a counted part: 1 and 11 are both the ace.
    pub fn part_mass(&self, part: u32) -> f64 {
        if part == SOFT_ACE {
            self.mass(ACE)
        } else {
            self.mass(part)
        }
    }

    pub fn total_mass(&self) -> f64 {
        self.mass.iter().sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.total_mass() - 1.0).abs() <= MASS_TOLERANCE
    }

    pub fn masses(&self) -> &[f64; 10] {
        &self.mass
    }
}

impl Default for CardDistribution {
    /// Infinite deck: 4/52 per non-ten value, 16/52 for ten-valued cards.
    fn default() -> Self {
        let mut mass = [4.0 / 52.0; 10];
        mass[9] = 16.0 / 52.0;
        Self { mass }
    }
}

/// Probability of each final total `stand..=bust`, plus busting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeDistribution {
    stand: u32,
    /// Index `i` holds total `stand + i`.
    final_totals: Vec<f64>,
    bust_mass: f64,
}

impl OutcomeDistribution {
    fn zeroed(rules: &RuleSet) -> Self {
        Self {
            stand: rules.stand(),
            final_totals: vec![0.0; (rules.bust() - rules.stand() + 1) as usize],
            bust_mass: 0.0,
        }
    }

    pub fn stand(&self) -> u32 {
        self.stand
    }

    pub fn bust(&self) -> u32 {
        self.stand + self.final_totals.len() as u32 - 1
    }

    /// Mass on final total `w`; zero outside `stand..=bust`.
    pub fn total(&self, w: u32) -> f64 {
        w.checked_sub(self.stand)
            .and_then(|i| self.final_totals.get(i as usize))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn bust_mass(&self) -> f64 {
        self.bust_mass
    }

    /// `(total, mass)` pairs in increasing total order.
    pub fn totals(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.final_totals
            .iter()
            .enumerate()
            .map(move |(i, &p)| (self.stand + i as u32, p))
    }

    pub fn total_mass(&self) -> f64 {
        self.final_totals.iter().sum::<f64>() + self.bust_mass
    }
}

fn check_target(w: u32, rules: &RuleSet) -> Result<()> {
    if w < rules.stand() || w > rules.bust() {
        return Err(Error::InvalidQuery("target must lie in stand..=bust"));
    }
    Ok(())
}

fn powi(base: f64, exp: u32) -> f64 {
    (0..exp).fold(1.0, |acc, _| acc * base)
}

/// `(1/13) (14/13)^(s-d-2)`, valid when `w - d <= 9`.
///
/// `dealer` is any running dealer total below `stand - 1`; an upcard is the
/// usual case.
pub fn closed_form_probability(w: u32, dealer: u32, rules: &RuleSet) -> Result<f64> {
    check_target(w, rules)?;
    if dealer == 0 || dealer + 2 > rules.stand() {
        return Err(Error::InvalidArgument("dealer total must lie in 1..=stand-2"));
    }
    let gap = i64::from(w) - i64::from(dealer);
    if gap > CLOSED_FORM_PROBABILITY_MAX_GAP {
        return Err(Error::WrongRegime {
            gap,
            limit: CLOSED_FORM_PROBABILITY_MAX_GAP,
            alternative: "exact_probability",
        });
    }
    let exponent = rules.stand() - dealer - 2;
    Ok(powi(14.0 / 13.0, exponent) / 13.0)
}

/// Probability that a hand from `start` finishes on exactly `w`: the sum over
/// every certified hand of the product of its cards' masses.
pub fn exact_probability_from(
    start: HandStart,
    w: u32,
    rules: &RuleSet,
    cd: &CardDistribution,
) -> Result<f64> {
    check_target(w, rules)?;
    let max_cards = w.saturating_sub(start.hard_total());
    let mut p = 0.0;
    for m in 1..=max_cards {
        for c in enumerate_hands(start, w, m, rules)? {
            p += c.parts().iter().map(|&part| cd.part_mass(part)).product::<f64>();
        }
    }
    Ok(p)
}

/// Probability that a dealer showing `upcard` (11 = ace) finishes on `w`.
pub fn exact_probability(w: u32, upcard: u32, rules: &RuleSet, cd: &CardDistribution) -> Result<f64> {
    if upcard > rules.max_card() {
        return Err(Error::InvalidQuery("upcard exceeds the highest card"));
    }
    exact_probability_from(HandStart::upcard(upcard)?, w, rules, cd)
}

/// Exact final-total distribution by forward recursion over
/// `(hard total, soft aces)` states, absorbing at `stand` or bust.
pub fn outcome_distribution(upcard: u32, rules: &RuleSet, cd: &CardDistribution) -> Result<OutcomeDistribution> {
    if upcard > rules.max_card() {
        return Err(Error::InvalidQuery("upcard exceeds the highest card"));
    }
    outcome_distribution_from(HandStart::upcard(upcard)?, rules, cd)
}

/// As [`outcome_distribution`] from an arbitrary start.
pub fn outcome_distribution_from(
    start: HandStart,
    rules: &RuleSet,
    cd: &CardDistribution,
) -> Result<OutcomeDistribution> {
    let (s, b) = (rules.stand(), rules.bust());
    let mut out = OutcomeDistribution::zeroed(rules);
    let absorb = |out: &mut OutcomeDistribution, total: u32, p: f64| {
        if total > b {
            out.bust_mass += p;
        } else {
            out.final_totals[(total - s) as usize] += p;
        }
    };
    let start_total = start.total;
    if start_total >= s {
        absorb(&mut out, start_total, 1.0);
        return Ok(out);
    }
    // every card raises the hard total, so popping the smallest key is a topological order
    let mut pending: BTreeMap<(u32, u32), f64> = BTreeMap::new();
    pending.insert((start.hard_total(), start.soft_aces), 1.0);
    while let Some(((hard, soft), p)) = pending.pop_first() {
        let total = hard + ACE_BONUS * soft;
        for card in ACE..=TEN {
            let q = cd.mass(card);
            if q == 0.0 {
                continue;
            }
            let next_hard = hard + card;
            let mut next_soft = soft + u32::from(card == ACE && total + SOFT_ACE <= b);
            while next_soft > 0 && next_hard + ACE_BONUS * next_soft > b {
                next_soft -= 1;
            }
            let next_total = next_hard + ACE_BONUS * next_soft;
            if next_total >= s {
                absorb(&mut out, next_total, p * q);
            } else {
                *pending.entry((next_hard, next_soft)).or_insert(0.0) += p * q;
            }
        }
    }
    Ok(out)
}

/// Closed-form probability for each target in `lo..=hi`, treating the
/// dealer's running total as the upcard. Targets outside the closed form's
/// reach fall back to exact enumeration from a hard total under the default
/// deck. Soft aces already in the dealer's hand are ignored.
pub fn beat_probability(dealer_current: u32, lo: u32, hi: u32, rules: &RuleSet) -> Result<f64> {
    if lo < rules.stand() || hi > rules.bust() || lo > hi {
        return Err(Error::InvalidArgument("need stand <= lo <= hi <= bust"));
    }
    if dealer_current == 0 || dealer_current >= rules.stand() {
        return Err(Error::InvalidArgument("dealer total must lie in 1..stand"));
    }
    let cd = CardDistribution::default();
    let mut p = 0.0;
    for w in lo..=hi {
        p += match closed_form_probability(w, dealer_current, rules) {
            Ok(v) => v,
            Err(Error::WrongRegime { .. }) | Err(Error::InvalidArgument(_)) => {
                exact_probability_from(HandStart::hard(dealer_current), w, rules, &cd)?
            }
            Err(e) => return Err(e),
        };
    }
    Ok(p)
}

/// Raw Monte Carlo tallies; merge chunks in any order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutcomeCounts {
    stand: u32,
    final_totals: Vec<u64>,
    bust: u64,
    trials: u64,
}

impl OutcomeCounts {
    pub fn new(rules: &RuleSet) -> Self {
        Self {
            stand: rules.stand(),
            final_totals: vec![0; (rules.bust() - rules.stand() + 1) as usize],
            bust: 0,
            trials: 0,
        }
    }

    pub fn merge(&mut self, other: &OutcomeCounts) -> Result<()> {
        if self.stand != other.stand || self.final_totals.len() != other.final_totals.len() {
            return Err(Error::InvalidArgument("cannot merge counts for different rules"));
        }
        for (a, b) in self.final_totals.iter_mut().zip(&other.final_totals) {
            *a += b;
        }
        self.bust += other.bust;
        self.trials += other.trials;
        Ok(())
    }

    pub fn trials(&self) -> u64 {
        self.trials
    }

    pub fn bust(&self) -> u64 {
        self.bust
    }

    pub fn total(&self, w: u32) -> u64 {
        w.checked_sub(self.stand)
            .and_then(|i| self.final_totals.get(i as usize))
            .copied()
            .unwrap_or(0)
    }
}

/// Empirical frequency with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub probability: f64,
    pub stderr: f64,
}

impl Estimate {
    fn from_count(hits: u64, trials: u64) -> Self {
        let n = trials as f64;
        let p = hits as f64 / n;
        Self {
            probability: p,
            stderr: libm::sqrt(p * (1.0 - p) / n),
        }
    }

    /// `|probability - exact|` in standard errors; zero-width cells only
    /// match an identical exact value.
    pub fn z_score(&self, exact: f64) -> f64 {
        let diff = (self.probability - exact).abs();
        if self.stderr > 0.0 {
            diff / self.stderr
        } else if diff == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

/// Monte Carlo estimate of an [`OutcomeDistribution`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloEstimate {
    stand: u32,
    trials: u64,
    final_totals: Vec<Estimate>,
    bust: Estimate,
}

impl MonteCarloEstimate {
    pub fn from_counts(counts: &OutcomeCounts) -> Result<Self> {
        if counts.trials == 0 {
            return Err(Error::InvalidArgument("no trials recorded"));
        }
        Ok(Self {
            stand: counts.stand,
            trials: counts.trials,
            final_totals: counts
                .final_totals
                .iter()
                .map(|&h| Estimate::from_count(h, counts.trials))
                .collect(),
            bust: Estimate::from_count(counts.bust, counts.trials),
        })
    }

    pub fn trials(&self) -> u64 {
        self.trials
    }

    pub fn total(&self, w: u32) -> Option<Estimate> {
        w.checked_sub(self.stand)
            .and_then(|i| self.final_totals.get(i as usize))
            .copied()
    }

    pub fn bust(&self) -> Estimate {
        self.bust
    }

    pub fn totals(&self) -> impl Iterator<Item = (u32, Estimate)> + '_ {
        self.final_totals
            .iter()
            .enumerate()
            .map(move |(i, &e)| (self.stand + i as u32, e))
    }

    /// Largest z-score over every cell against `exact`.
    pub fn max_z_score(&self, exact: &OutcomeDistribution) -> f64 {
        self.totals()
            .map(|(w, e)| e.z_score(exact.total(w)))
            .fold(self.bust.z_score(exact.bust_mass()), f64::max)
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Seed for chunk `index` of a run seeded with `seed`.
pub fn chunk_seed(seed: u64, index: u64) -> u64 {
    splitmix64(seed ^ splitmix64(index))
}

/// Number of chunks and the size of chunk `i` for a run of `trials`.
pub fn chunk_plan(trials: u64) -> impl Iterator<Item = (u64, u64)> {
    let chunks = trials.div_ceil(MC_CHUNK_TRIALS);
    (0..chunks).map(move |i| (i, MC_CHUNK_TRIALS.min(trials - i * MC_CHUNK_TRIALS)))
}

fn sampler(cd: &CardDistribution) -> Result<[f64; 10]> {
    if !cd.is_normalized() {
        return Err(Error::InvalidDistribution("Monte Carlo needs masses summing to 1"));
    }
    let mut cumulative = [0.0; 10];
    let mut acc = 0.0;
    for (i, c) in cumulative.iter_mut().enumerate() {
        acc += cd.masses()[i];
        *c = acc;
    }
    Ok(cumulative)
}

fn sample_card(rng: &mut ChaCha8Rng, cumulative: &[f64; 10]) -> u32 {
    let u: f64 = rng.gen::<f64>() * cumulative[9];
    cumulative
        .iter()
        .position(|&c| u < c)
        .map_or(TEN, |i| i as u32 + 1)
}

/// Plays `trials` hands for chunk `index` of a run seeded with `seed`.
pub fn monte_carlo_chunk(
    upcard: u32,
    rules: &RuleSet,
    cd: &CardDistribution,
    seed: u64,
    index: u64,
    trials: u64,
) -> Result<OutcomeCounts> {
    let start = HandStart::upcard(upcard)?;
    let cumulative = sampler(cd)?;
    let mut rng = ChaCha8Rng::seed_from_u64(chunk_seed(seed, index));
    let mut counts = OutcomeCounts::new(rules);
    for _ in 0..trials {
        let mut hand = HandState::from(start);
        while !hand.is_finished(rules) {
            hand.draw(sample_card(&mut rng, &cumulative), rules);
        }
        if hand.total > rules.bust() {
            counts.bust += 1;
        } else {
            counts.final_totals[(hand.total - rules.stand()) as usize] += 1;
        }
    }
    counts.trials = trials;
    Ok(counts)
}

/// Seeded Monte Carlo estimate over `trials` dealer hands. Chunks are
/// independent, so a parallel caller that merges [`monte_carlo_chunk`]
/// results gets the identical estimate.
pub fn monte_carlo(
    upcard: u32,
    rules: &RuleSet,
    cd: &CardDistribution,
    trials: u64,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1"));
    }
    if upcard > rules.max_card() {
        return Err(Error::InvalidQuery("upcard exceeds the highest card"));
    }
    let mut counts = OutcomeCounts::new(rules);
    for (index, size) in chunk_plan(trials) {
        counts.merge(&monte_carlo_chunk(upcard, rules, cd, seed, index, size)?)?;
    }
    MonteCarloEstimate::from_counts(&counts)
}
