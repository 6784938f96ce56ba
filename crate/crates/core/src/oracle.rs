//! Ground truth: a card-by-card dealer simulation and the compositions it
//! certifies. Every counting formula is audited against this module.

use alloc::vec::Vec;
use core::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use crate::combinatorics::{iterate_compositions, Composition};
use crate::counting::{count, Query, Regime, RuleSet, ACE_BONUS};
use crate::error::{Error, Result};

/// Card value of an ace as drawn.
pub const ACE: u32 = 1;
/// Highest drawable card value (all ten-valued ranks).
pub const TEN: u32 = 10;
/// Counted value of a soft ace.
pub const SOFT_ACE: u32 = ACE + ACE_BONUS;

/// Where a dealer hand starts before any revealed card.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HandStart {
    /// Counted total, soft aces at 11.
    pub total: u32,
    /// Number of aces in the start counted as 11.
    pub soft_aces: u32,
}

impl HandStart {
    /// The dealer's face-up card by counted value; 11 is an ace.
    pub fn upcard(upcard: u32) -> Result<Self> {
        match upcard {
            SOFT_ACE => Ok(Self {
                total: SOFT_ACE,
                soft_aces: 1,
            }),
            2..=TEN => Ok(Self {
                total: upcard,
                soft_aces: 0,
            }),
            _ => Err(Error::InvalidArgument(
                "upcard must be 2..=10, or 11 for an ace",
            )),
        }
    }

    /// A hard running total with no soft aces.
    pub fn hard(total: u32) -> Self {
        Self {
            total,
            soft_aces: 0,
        }
    }

    /// Total with every ace at 1.
    pub fn hard_total(&self) -> u32 {
        self.total - ACE_BONUS * self.soft_aces
    }
}

/// Running state of a dealer hand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HandState {
    pub total: u32,
    pub soft_aces: u32,
}

impl From<HandStart> for HandState {
    fn from(s: HandStart) -> Self {
        Self {
            total: s.total,
            soft_aces: s.soft_aces,
        }
    }
}

/// Effect of drawing one card.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Draw {
    /// Value the new card was counted at when drawn.
    pub counted: u32,
    /// Soft aces demoted to 1 by this draw.
    pub demotions: u32,
}

impl HandState {
    /// Draws `card` (1 = ace): an ace counts 11 when that keeps the total
    /// within `bust`, then soft aces are demoted one at a time while busted.
    pub fn draw(&mut self, card: u32, rules: &RuleSet) -> Draw {
        let counted = if card == ACE && self.total + SOFT_ACE <= rules.bust() {
            self.soft_aces += 1;
            SOFT_ACE
        } else {
            card
        };
        self.total += counted;
        let mut demotions = 0;
        while self.total > rules.bust() && self.soft_aces > 0 {
            self.soft_aces -= 1;
            self.total -= ACE_BONUS;
            demotions += 1;
        }
        Draw { counted, demotions }
    }

    pub fn is_finished(&self, rules: &RuleSet) -> bool {
        self.total >= rules.stand()
    }
}

/// How a simulated hand ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "status", content = "total", rename_all = "lowercase")]
pub enum Outcome {
    Stood(u32),
    Busted(u32),
    Incomplete,
}

/// Per-card record of a simulated dealer hand.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DealerTrajectory {
    /// Final counted value of the starting card(s); differs from the start
    /// total only when a soft ace upcard was demoted.
    pub upcard_value: u32,
    /// Final counted value of each revealed card (aces as 1 or 11).
    pub counted_values: Vec<u32>,
    /// Hand total after each revealed card, demotions at that step applied.
    pub running_totals: Vec<u32>,
    pub outcome: Outcome,
}

/// Plays `cards` for a dealer showing `upcard` (11 = ace).
pub fn simulate(upcard: u32, cards: &[u32], rules: &RuleSet) -> Result<DealerTrajectory> {
    simulate_from(HandStart::upcard(upcard)?, cards, rules)
}

/// Plays `cards` from an arbitrary starting hand.
pub fn simulate_from(start: HandStart, cards: &[u32], rules: &RuleSet) -> Result<DealerTrajectory> {
    if cards.is_empty() {
        return Err(Error::InvalidArgument("card sequence must be non-empty"));
    }
    let mut state = HandState::from(start);
    // soft slots in draw order; slot None is the start
    let mut soft: Vec<Option<usize>> = (0..start.soft_aces).map(|_| None).collect();
    let mut upcard_value = start.total;
    let mut counted_values = Vec::with_capacity(cards.len());
    let mut running_totals = Vec::with_capacity(cards.len());

    for (idx, &card) in cards.iter().enumerate() {
        if !(ACE..=TEN).contains(&card) {
            return Err(Error::IllegalCard(card));
        }
        if state.is_finished(rules) {
            return Err(Error::OverlongSequence { consumed: idx });
        }
        let step = state.draw(card, rules);
        counted_values.push(step.counted);
        if step.counted == SOFT_ACE {
            soft.push(Some(idx));
        }
        // demote the earliest soft ace first
        for _ in 0..step.demotions {
            match soft.remove(0) {
                Some(i) => counted_values[i] = ACE,
                None => upcard_value -= ACE_BONUS,
            }
        }
        running_totals.push(state.total);
    }

    let outcome = if state.total > rules.bust() {
        Outcome::Busted(state.total)
    } else if state.is_finished(rules) {
        Outcome::Stood(state.total)
    } else {
        Outcome::Incomplete
    };
    Ok(DealerTrajectory {
        upcard_value,
        counted_values,
        running_totals,
        outcome,
    })
}

/// Physical card for a counted part: 1 and 11 are aces, 2..=10 are
/// themselves, anything else has no card.
fn card_for_part(part: u32) -> Option<u32> {
    match part {
        ACE | SOFT_ACE => Some(ACE),
        2..=TEN => Some(part),
        _ => None,
    }
}

/// Compositions of `target - start_value` with `cards` parts that a real
/// hand certifies: it stands on `target` after exactly `cards` cards, the
/// counted values equal the parts, and the start ends counted at `start_value`.
fn certified(
    start: HandStart,
    start_value: u32,
    target: u32,
    cards: u32,
    rules: RuleSet,
) -> Result<impl Iterator<Item = Composition>> {
    let impossible = target < start_value || cards == 0;
    let gap = target.saturating_sub(start_value);
    let candidates = iterate_compositions(gap, cards as usize, 1, rules.max_card())?;
    Ok(candidates.filter(move |c| {
        if impossible {
            return false;
        }
        let Some(seq) = c.parts().iter().map(|&p| card_for_part(p)).collect::<Option<Vec<_>>>()
        else {
            return false;
        };
        match simulate_from(start, &seq, &rules) {
            Ok(t) => {
                t.outcome == Outcome::Stood(target)
                    && t.upcard_value == start_value
                    && t.counted_values == c.parts()
            }
            Err(_) => false,
        }
    }))
}

/// Legal compositions of `w - d` with `m` parts: those a dealer showing `d`
/// actually produces, in lexicographic order. An ace upcard must stay at 11.
pub fn enumerate_legal(q: &Query, rules: &RuleSet) -> Result<impl Iterator<Item = Composition>> {
    q.validate(rules)?;
    let start = HandStart::upcard(q.upcard)?;
    certified(start, q.upcard, q.target, q.cards, *rules)
}

/// Every hand of exactly `cards` revealed cards that stands on `target` from
/// `start`, as counted-value compositions. A soft start contributes both the
/// hands that keep it soft and those that demote it.
pub fn enumerate_hands(
    start: HandStart,
    target: u32,
    cards: u32,
    rules: &RuleSet,
) -> Result<Vec<Composition>> {
    let mut out: Vec<Composition> = certified(start, start.total, target, cards, *rules)?.collect();
    if start.soft_aces > 0 {
        // a soft start can lose one ace bonus per soft ace
        for k in 1..=start.soft_aces {
            let value = start.total - k * ACE_BONUS;
            out.extend(certified(start, value, target, cards, *rules)?);
        }
    }
    Ok(out)
}

/// Number of legal compositions; the ground truth for every count formula.
pub fn oracle_count(q: &Query, rules: &RuleSet) -> Result<u64> {
    Ok(enumerate_legal(q, rules)?.count() as u64)
}

/// Query ranges for a formula-versus-oracle sweep. Targets outside
/// `stand..=bust` are skipped; card counts run `1..=min(w - d, cards_max)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepRanges {
    pub upcards: RangeInclusive<u32>,
    pub targets: RangeInclusive<u32>,
    pub cards_max: Option<u32>,
    /// Keep only queries in this regime.
    pub regime: Option<Regime>,
}

impl SweepRanges {
    pub fn new(upcards: RangeInclusive<u32>, targets: RangeInclusive<u32>) -> Self {
        Self {
            upcards,
            targets,
            cards_max: None,
            regime: None,
        }
    }

    pub fn with_cards_max(mut self, cards_max: u32) -> Self {
        self.cards_max = Some(cards_max);
        self
    }

    pub fn with_regime(mut self, regime: Regime) -> Self {
        self.regime = Some(regime);
        self
    }

    /// Queries in sweep order: upcard, then target, then card count.
    pub fn queries(&self, rules: &RuleSet) -> Result<Vec<Query>> {
        let mut out = Vec::new();
        for d in self.upcards.clone() {
            HandStart::upcard(d)?;
            if d > rules.max_card() {
                return Err(Error::InvalidArgument("upcard exceeds the highest card"));
            }
            for w in self.targets.clone() {
                if w < rules.stand() || w > rules.bust() || w <= d {
                    continue;
                }
                let limit = (w - d).min(self.cards_max.unwrap_or(u32::MAX));
                for m in 1..=limit {
                    let q = Query::new(d, w, m);
                    if self.regime.is_none_or(|r| q.regime() == r) {
                        out.push(q);
                    }
                }
            }
        }
        Ok(out)
    }
}

/// One formula-versus-oracle comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DiscrepancyRecord {
    pub m: u32,
    pub w: u32,
    pub s: u32,
    pub d: u32,
    pub b: u32,
    pub max_card: u32,
    pub regime: Regime,
    pub formula_net: i64,
    pub oracle_count: u64,
    /// `formula_net - oracle_count`
    pub delta: i64,
}

impl DiscrepancyRecord {
    pub fn agrees(&self) -> bool {
        self.delta == 0
    }
}

/// Compares `count(q).net` with the oracle for a single query.
pub fn verify_query(q: &Query, rules: &RuleSet) -> Result<DiscrepancyRecord> {
    let formula_net = count(q, rules)?.net;
    let oracle = oracle_count(q, rules)?;
    let oracle_signed = i64::try_from(oracle).map_err(|_| Error::Overflow)?;
    Ok(DiscrepancyRecord {
        m: q.cards,
        w: q.target,
        s: rules.stand(),
        d: q.upcard,
        b: rules.bust(),
        max_card: rules.max_card(),
        regime: q.regime(),
        formula_net,
        oracle_count: oracle,
        delta: formula_net.checked_sub(oracle_signed).ok_or(Error::Overflow)?,
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub agreements: u64,
    pub disagreements: u64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub closed: Tally,
    pub general: Tally,
}

impl SweepSummary {
    pub fn disagreements(&self) -> u64 {
        self.closed.disagreements + self.general.disagreements
    }

    pub fn agreements(&self) -> u64 {
        self.closed.agreements + self.general.agreements
    }
}

/// All sweep records in query order plus per-regime tallies.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscrepancyReport {
    pub records: Vec<DiscrepancyRecord>,
    pub summary: SweepSummary,
}

impl DiscrepancyReport {
    pub fn from_records(records: Vec<DiscrepancyRecord>) -> Self {
        let mut summary = SweepSummary::default();
        for r in &records {
            let tally = match r.regime {
                Regime::Closed => &mut summary.closed,
                Regime::General => &mut summary.general,
            };
            if r.agrees() {
                tally.agreements += 1;
            } else {
                tally.disagreements += 1;
            }
        }
        Self { records, summary }
    }

    pub fn disagreements(&self) -> impl Iterator<Item = &DiscrepancyRecord> {
        self.records.iter().filter(|r| !r.agrees())
    }

    pub fn find(&self, q: &Query) -> Option<&DiscrepancyRecord> {
        self.records
            .iter()
            .find(|r| r.m == q.cards && r.w == q.target && r.d == q.upcard)
    }
}

/// Runs [`verify_query`] over every query in `ranges`.
pub fn verify_sweep(ranges: &SweepRanges, rules: &RuleSet) -> Result<DiscrepancyReport> {
    let records = ranges
        .queries(rules)?
        .iter()
        .map(|q| verify_query(q, rules))
        .collect::<Result<Vec<_>>>()?;
    Ok(DiscrepancyReport::from_records(records))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn parts(q: Query) -> Vec<Vec<u32>> {
        enumerate_legal(&q, &RuleSet::default())
            .unwrap()
            .map(Composition::into_parts)
            .collect()
    }

    #[test]
    fn simulate_demotes_face_down_ace() {
        let t = simulate(2, &[1, 3, 10, 3], &RuleSet::default()).unwrap();
        assert_eq!(t.counted_values, vec![1, 3, 10, 3]);
        assert_eq!(t.running_totals, vec![13, 16, 16, 19]);
        assert_eq!(t.outcome, Outcome::Stood(19));
        assert_eq!(t.upcard_value, 2);
    }

    #[test]
    fn simulate_simple_stands() {
        let r = RuleSet::default();
        assert_eq!(simulate(10, &[7], &r).unwrap().outcome, Outcome::Stood(17));
        let t = simulate(10, &[1], &r).unwrap();
        assert_eq!(t.outcome, Outcome::Stood(21));
        assert_eq!(t.counted_values, vec![11]);
    }

    #[test]
    fn simulate_bust_and_incomplete() {
        let r = RuleSet::default();
        assert_eq!(simulate(10, &[6, 10], &r).unwrap().outcome, Outcome::Busted(26));
        assert_eq!(simulate(2, &[3], &r).unwrap().outcome, Outcome::Incomplete);
    }

    #[test]
    fn simulate_ace_upcard_demotion() {
        let r = RuleSet::default();
        let t = simulate(11, &[5, 10, 1], &r).unwrap();
        assert_eq!(t.upcard_value, 1);
        assert_eq!(t.counted_values, vec![5, 10, 1]);
        assert_eq!(t.running_totals, vec![16, 16, 17]);
        assert_eq!(t.outcome, Outcome::Stood(17));
        // second ace cannot be soft next to a soft upcard
        let t = simulate(11, &[1, 5], &r).unwrap();
        assert_eq!(t.counted_values, vec![1, 5]);
        assert_eq!(t.outcome, Outcome::Stood(17));
    }

    #[test]
    fn simulate_errors() {
        let r = RuleSet::default();
        assert_eq!(
            simulate(10, &[7, 2], &r),
            Err(Error::OverlongSequence { consumed: 1 })
        );
        assert_eq!(simulate(10, &[11], &r), Err(Error::IllegalCard(11)));
        assert_eq!(simulate(10, &[0], &r), Err(Error::IllegalCard(0)));
        assert!(simulate(10, &[], &r).is_err());
        assert!(simulate(1, &[5], &r).is_err());
        assert!(simulate(12, &[5], &r).is_err());
    }

    #[test]
    fn simulate_multiple_soft_aces_under_wide_bust() {
        let r = RuleSet::new(35, 40, 11).unwrap();
        let t = simulate(2, &[1, 1, 10, 10, 3], &r).unwrap();
        // 2+11+11 = 24, +10 = 34, +10 = 44 -> demote first ace -> 34, +3 = 37
        assert_eq!(t.counted_values, vec![1, 11, 10, 10, 3]);
        assert_eq!(t.running_totals, vec![13, 24, 34, 34, 37]);
        assert_eq!(t.outcome, Outcome::Stood(37));
    }

    #[test]
    fn enumerate_ten_up_two_cards() {
        assert_eq!(
            parts(Query::new(10, 17, 2)),
            vec![vec![2, 5], vec![3, 4], vec![4, 3], vec![5, 2], vec![6, 1]]
        );
    }

    #[test]
    fn enumerate_nine_up() {
        assert_eq!(
            parts(Query::new(9, 19, 2)),
            vec![vec![2, 8], vec![3, 7], vec![4, 6], vec![5, 5], vec![6, 4], vec![7, 3]]
        );
        let three = parts(Query::new(9, 19, 3));
        assert_eq!(three.len(), 15);
        assert!(three.iter().all(|c| c[..2].iter().sum::<u32>() < 8));
    }

    #[test]
    fn enumerate_two_up_excludes_forced_eleven() {
        let legal = parts(Query::new(2, 17, 3));
        for first in 2..=8 {
            assert!(!legal.contains(&vec![first, 1, 14 - first]));
        }
        assert!(legal.contains(&vec![3, 11, 1]));
    }

    #[test]
    fn oracle_counts() {
        let r = RuleSet::default();
        assert_eq!(oracle_count(&Query::new(10, 17, 2), &r), Ok(5));
        assert_eq!(oracle_count(&Query::new(2, 18, 3), &r), Ok(68));
        assert!(oracle_count(&Query::new(16, 17, 1), &r).is_err());
    }

    #[test]
    fn enumerate_hands_covers_demoted_ace_upcard() {
        let r = RuleSet::default();
        let start = HandStart::upcard(11).unwrap();
        let hands = enumerate_hands(start, 17, 3, &r).unwrap();
        assert!(hands.iter().any(|c| c.parts() == [5, 10, 1]));
        let kept = oracle_count(&Query::new(11, 17, 3), &r).unwrap();
        assert!(hands.len() as u64 > kept);
    }

    #[test]
    fn sweep_records_and_summary() {
        let r = RuleSet::default();
        let report = verify_sweep(&SweepRanges::new(10..=10, 17..=17), &r).unwrap();
        assert_eq!(report.records.len(), 7);
        assert_eq!(report.summary.closed.agreements, 7);
        assert_eq!(report.summary.disagreements(), 0);

        let report = verify_sweep(&SweepRanges::new(2..=2, 18..=18).with_cards_max(3), &r).unwrap();
        let rec = report.find(&Query::new(2, 18, 3)).unwrap();
        assert_eq!((rec.formula_net, rec.oracle_count, rec.delta), (58, 68, -10));
        assert_eq!(rec.regime, Regime::General);
    }

    #[test]
    fn empty_sweep() {
        let r = RuleSet::default();
        #[allow(clippy::reversed_empty_ranges)]
        let report = verify_sweep(&SweepRanges::new(5..=4, 17..=21), &r).unwrap();
        assert!(report.records.is_empty());
        assert_eq!(report.summary, SweepSummary::default());
    }
}
