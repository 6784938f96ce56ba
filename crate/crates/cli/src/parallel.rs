//! Thread-parallel drivers for the sweep and the Monte Carlo estimator.
//! Work is split into fixed pieces and merged in piece order, so results do
//! not depend on the thread count.

use std::num::NonZeroUsize;
use std::thread;

use bjcomp_core::oracle::verify_query;
use bjcomp_core::probability::{chunk_plan, monte_carlo_chunk, MonteCarloEstimate, OutcomeCounts};
use bjcomp_core::{CardDistribution, DiscrepancyReport, Result, RuleSet, SweepRanges};

fn workers() -> usize {
    thread::available_parallelism().map_or(1, NonZeroUsize::get)
}

/// Same report as [`bjcomp_core::verify_sweep`], computed across threads.
pub fn verify_sweep(ranges: &SweepRanges, rules: &RuleSet) -> Result<DiscrepancyReport> {
    let queries = ranges.queries(rules)?;
    if queries.is_empty() {
        return Ok(DiscrepancyReport::default());
    }
    let per = queries.len().div_ceil(workers());
    let pieces: Vec<Result<Vec<_>>> = thread::scope(|scope| {
        let handles: Vec<_> = queries
            .chunks(per)
            .map(|chunk| scope.spawn(move || chunk.iter().map(|q| verify_query(q, rules)).collect()))
            .collect();
        handles.into_iter().map(|h| h.join().expect("sweep worker panicked")).collect()
    });
    let mut records = Vec::with_capacity(queries.len());
    for piece in pieces {
        records.extend(piece?);
    }
    Ok(DiscrepancyReport::from_records(records))
}

/// Same estimate as [`bjcomp_core::monte_carlo`], chunks spread across threads.
pub fn monte_carlo(
    upcard: u32,
    rules: &RuleSet,
    cd: &CardDistribution,
    trials: u64,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    if trials == 0 {
        return Err(bjcomp_core::Error::InvalidArgument("trials must be at least 1"));
    }
    let plan: Vec<(u64, u64)> = chunk_plan(trials).collect();
    let per = plan.len().div_ceil(workers());
    let partials: Vec<Result<OutcomeCounts>> = thread::scope(|scope| {
        let handles: Vec<_> = plan
            .chunks(per)
            .map(|chunk| {
                scope.spawn(move || {
                    let mut acc = OutcomeCounts::new(rules);
                    for &(index, size) in chunk {
                        acc.merge(&monte_carlo_chunk(upcard, rules, cd, seed, index, size)?)?;
                    }
                    Ok(acc)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("monte carlo worker panicked")).collect()
    });
    let mut counts = OutcomeCounts::new(rules);
    for p in partials {
        counts.merge(&p?)?;
    }
    MonteCarloEstimate::from_counts(&counts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_sweep_matches_serial() {
        let r = RuleSet::default();
        let ranges = SweepRanges::new(2..=11, 17..=21).with_cards_max(4);
        assert_eq!(verify_sweep(&ranges, &r).unwrap(), bjcomp_core::verify_sweep(&ranges, &r).unwrap());
    }

    #[test]
    fn parallel_monte_carlo_matches_serial() {
        let r = RuleSet::default();
        let cd = CardDistribution::default();
        let trials = 300_001;
        assert_eq!(
            monte_carlo(11, &r, &cd, trials, 99).unwrap(),
            bjcomp_core::monte_carlo(11, &r, &cd, trials, 99).unwrap()
        );
    }
}
