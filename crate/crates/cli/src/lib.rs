//! Command-line front end for `bjcomp-core`.
//!
//! [`run`] parses an argument vector, writes the rendered result to the given
//! writers and returns the process exit status: 0 on success, 1 on usage or
//! validation errors, 2 when `verify --strict` finds a disagreement.
//!
//! `--cards M` counts the face-down card plus every drawn card; the face-up
//! card is never included. An ace upcard is written as 11.

pub mod formats;
pub mod parallel;

use std::ffi::OsString;
use std::fmt;
use std::io::{self, Write};
use std::ops::RangeInclusive;

use bjcomp_core::{
    closed_form_probability, count, enumerate_legal, exact_probability, oracle_count,
    outcome_distribution, render_tableau, CardDistribution, Composition, Query, RuleSet,
    SweepRanges,
};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use crate::formats::{
    CountDoc, DistributionDoc, EnumerateDoc, OracleDoc, OutputFormat, ProbDoc, ProbMethod,
    TableauDoc,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DISAGREEMENT: i32 = 2;

/// Largest `target - upcard` gap the closed-form probability covers.
const PROB_CLOSED_MAX_GAP: u32 = 9;

#[derive(Debug, Parser)]
#[command(name = "bjcomp", version, about = "Count and analyse Blackjack dealer compositions")]
struct Cli {
    /// Output format; `verify` defaults to csv, everything else to table.
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args, Clone, Copy)]
struct RuleArgs {
    /// Total at which the dealer stands.
    #[arg(long, default_value_t = 17)]
    stand: u32,
    /// Largest total that does not bust.
    #[arg(long, default_value_t = 21)]
    bust: u32,
    /// Highest card value (an ace counted high).
    #[arg(long = "max-card", default_value_t = 11)]
    max_card: u32,
}

impl RuleArgs {
    fn rules(self) -> Result<RuleSet, CliError> {
        Ok(RuleSet::new(self.stand, self.bust, self.max_card)?)
    }
}

#[derive(Debug, Args, Clone, Copy)]
struct QueryArgs {
    /// Cards revealed after the upcard, face-down card included.
    #[arg(long)]
    cards: u32,
    /// Dealer upcard, 2..=10, or 11 for an ace.
    #[arg(long)]
    upcard: u32,
    /// Final dealer total.
    #[arg(long)]
    target: u32,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Net count of legal compositions.
    Count {
        #[command(flatten)]
        query: QueryArgs,
        #[command(flatten)]
        rules: RuleArgs,
        /// Show every correction term.
        #[arg(long)]
        breakdown: bool,
        /// Cross-check against the dealer simulation.
        #[arg(long)]
        oracle: bool,
    },
    /// List the legal compositions in lexicographic order.
    Enumerate {
        #[command(flatten)]
        query: QueryArgs,
        #[command(flatten)]
        rules: RuleArgs,
    },
    /// Probability that the dealer finishes on the target.
    Prob {
        #[arg(long)]
        upcard: u32,
        #[arg(long)]
        target: u32,
        #[command(flatten)]
        rules: RuleArgs,
        /// Always use the enumeration-weighted computation.
        #[arg(long)]
        exact: bool,
    },
    /// Distribution of the dealer's final total.
    Dist {
        #[arg(long)]
        upcard: u32,
        #[command(flatten)]
        rules: RuleArgs,
        /// Add a Monte Carlo estimate with this many trials.
        #[arg(long, value_name = "TRIALS")]
        mc: Option<u64>,
        #[arg(long, requires = "mc", default_value_t = 0)]
        seed: u64,
    },
    /// Compare formula and oracle counts over a grid of queries.
    Verify {
        /// Upcards as D1..D2 or a single value.
        #[arg(long = "upcard-range", value_parser = parse_range)]
        upcard_range: RangeInclusive<u32>,
        /// Targets as W1..W2 or a single value.
        #[arg(long = "target-range", value_parser = parse_range)]
        target_range: RangeInclusive<u32>,
        /// Largest card count to check; defaults to every feasible count.
        #[arg(long = "cards-max")]
        cards_max: Option<u32>,
        #[command(flatten)]
        rules: RuleArgs,
        /// Exit with status 2 if any query disagrees.
        #[arg(long)]
        strict: bool,
    },
    /// Render a composition as a Young tableau.
    Tableau {
        /// Parts separated by commas, e.g. 3,2,4.
        #[arg(value_parser = parse_parts)]
        parts: Composition,
    },
}

fn parse_range(s: &str) -> Result<RangeInclusive<u32>, String> {
    let bound = |t: &str| t.trim().parse::<u32>().map_err(|_| format!("`{t}` is not a non-negative integer"));
    let (lo, hi) = match s.split_once("..") {
        Some((lo, hi)) => (bound(lo)?, bound(hi.strip_prefix('=').unwrap_or(hi))?),
        None => {
            let v = bound(s)?;
            (v, v)
        }
    };
    if lo > hi {
        return Err(format!("empty range {lo}..{hi}"));
    }
    Ok(lo..=hi)
}

fn parse_parts(s: &str) -> Result<Composition, String> {
    let parts = s
        .split(',')
        .map(|p| p.trim().parse::<u32>().map_err(|_| format!("`{p}` is not a positive integer")))
        .collect::<Result<Vec<_>, _>>()?;
    Composition::new(parts).map_err(|e| e.to_string())
}

#[derive(Debug)]
enum CliError {
    Invalid(String),
    Core(bjcomp_core::Error),
    Io(io::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Invalid(msg) => f.write_str(msg),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "output error: {e}"),
        }
    }
}

impl From<bjcomp_core::Error> for CliError {
    fn from(e: bjcomp_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

fn check_upcard(upcard: u32, rules: &RuleSet) -> Result<(), CliError> {
    if !(2..=11).contains(&upcard) {
        return Err(CliError::Invalid(format!("upcard {upcard} must be 2..=10, or 11 for an ace")));
    }
    if upcard > rules.max_card() {
        return Err(CliError::Invalid(format!(
            "upcard {upcard} exceeds the highest card value {}",
            rules.max_card()
        )));
    }
    Ok(())
}

fn check_target(target: u32, rules: &RuleSet) -> Result<(), CliError> {
    if !(rules.stand()..=rules.bust()).contains(&target) {
        return Err(CliError::Invalid(format!(
            "target {target} must lie in [{}, {}]",
            rules.stand(),
            rules.bust()
        )));
    }
    Ok(())
}

fn check_query(q: QueryArgs, rules: &RuleSet) -> Result<Query, CliError> {
    check_upcard(q.upcard, rules)?;
    check_target(q.target, rules)?;
    let max_cards = q.target.saturating_sub(q.upcard);
    if q.cards < 1 || q.cards > max_cards {
        return Err(CliError::Invalid(format!(
            "cards {} must lie in [1, {max_cards}] (target minus upcard)",
            q.cards
        )));
    }
    let query = Query::new(q.upcard, q.target, q.cards);
    query.validate(rules)?;
    Ok(query)
}

/// Parse `argv` (program name first), execute, and return the exit status.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => return report_clap_error(&e, out, err),
    };
    let status = match execute(cli, out, err) {
        Ok(status) => status,
        // a closed pipe downstream (`| head`) is not our error
        Err(CliError::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    };
    let _ = out.flush();
    status
}

fn report_clap_error(e: &clap::Error, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match e.kind() {
        ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
            let _ = write!(out, "{}", e.render());
            EXIT_OK
        }
        ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
            let _ = writeln!(err, "error: a subcommand is required; see --help");
            EXIT_USAGE
        }
        _ => {
            // keep the diagnostic to one line: drop usage and tips, join the rest
            let rendered = e.render().to_string();
            let line = rendered
                .lines()
                .take_while(|l| !l.starts_with("Usage:") && !l.starts_with("For more information"))
                .filter(|l| !l.trim_start().starts_with("tip:"))
                .map(str::trim)
                .filter(|l| !l.is_empty())
                .collect::<Vec<_>>()
                .join(" ");
            let _ = writeln!(err, "{line}");
            EXIT_USAGE
        }
    }
}

fn execute(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let format = cli.format;
    match cli.command {
        Command::Count {
            query,
            rules,
            breakdown,
            oracle,
        } => {
            let rules = rules.rules()?;
            let q = check_query(query, &rules)?;
            cmd_count(q, rules, breakdown, oracle, format.unwrap_or(OutputFormat::Table), out)?;
        }
        Command::Enumerate { query, rules } => {
            let rules = rules.rules()?;
            let q = check_query(query, &rules)?;
            cmd_enumerate(q, rules, format.unwrap_or(OutputFormat::Table), out)?;
        }
        Command::Prob {
            upcard,
            target,
            rules,
            exact,
        } => {
            let rules = rules.rules()?;
            check_upcard(upcard, &rules)?;
            check_target(target, &rules)?;
            cmd_prob(upcard, target, rules, exact, format.unwrap_or(OutputFormat::Table), out)?;
        }
        Command::Dist {
            upcard,
            rules,
            mc,
            seed,
        } => {
            let rules = rules.rules()?;
            check_upcard(upcard, &rules)?;
            cmd_dist(upcard, rules, mc.map(|t| (t, seed)), format.unwrap_or(OutputFormat::Table), out)?;
        }
        Command::Verify {
            upcard_range,
            target_range,
            cards_max,
            rules,
            strict,
        } => {
            let rules = rules.rules()?;
            check_upcard(*upcard_range.start(), &rules)?;
            check_upcard(*upcard_range.end(), &rules)?;
            let mut ranges = SweepRanges::new(upcard_range, target_range);
            if let Some(m) = cards_max {
                if m == 0 {
                    return Err(CliError::Invalid("cards-max must be at least 1".into()));
                }
                ranges = ranges.with_cards_max(m);
            }
            let report = parallel::verify_sweep(&ranges, &rules)?;
            match format.unwrap_or(OutputFormat::Csv) {
                OutputFormat::Csv => {
                    formats::write_discrepancy_csv(&report, out)?;
                    formats::write_sweep_summary(&report, err)?;
                }
                OutputFormat::Table => formats::write_discrepancy_table(&report, out)?,
                OutputFormat::Json => formats::write_json(&report, out)?,
            }
            if strict && report.summary.disagreements() > 0 {
                return Ok(EXIT_DISAGREEMENT);
            }
        }
        Command::Tableau { parts } => cmd_tableau(parts, format.unwrap_or(OutputFormat::Table), out)?,
    }
    Ok(EXIT_OK)
}

fn cmd_count(
    q: Query,
    rules: RuleSet,
    breakdown: bool,
    oracle: bool,
    format: OutputFormat,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let b = count(&q, &rules)?;
    let oracle = if oracle {
        let n = oracle_count(&q, &rules)?;
        Some(OracleDoc {
            count: n,
            matches: i64::try_from(n).is_ok_and(|n| n == b.net),
        })
    } else {
        None
    };
    let status = |o: &OracleDoc| if o.matches { "MATCH" } else { "MISMATCH" };
    let doc = CountDoc {
        query: q,
        rules,
        regime: q.regime(),
        net: b.net,
        breakdown: breakdown.then_some(b),
        oracle,
    };
    match format {
        OutputFormat::Json => formats::write_json(&doc, out)?,
        OutputFormat::Table if !breakdown && oracle.is_none() => writeln!(out, "{}", b.net)?,
        OutputFormat::Table => {
            let mut rows: Vec<(&str, String)> = vec![("regime", doc.regime.as_str().to_string())];
            if breakdown {
                rows.extend([
                    ("unrestricted", b.unrestricted.to_string()),
                    ("r1", b.r1.to_string()),
                    ("r2", b.r2.to_string()),
                    ("r3", b.r3.to_string()),
                    ("r4", b.r4.to_string()),
                    ("r_star", b.r_star.to_string()),
                    ("r2_star", b.r2_star.to_string()),
                ]);
            }
            rows.push(("net", b.net.to_string()));
            if let Some(o) = &oracle {
                rows.push(("oracle", o.count.to_string()));
                rows.push(("status", status(o).to_string()));
            }
            for (k, v) in rows {
                writeln!(out, "{k:<13}{v}")?;
            }
        }
        OutputFormat::Csv => {
            let mut header = vec!["m", "w", "s", "d", "b", "max_card", "regime", "net"];
            let mut row = vec![
                q.cards.to_string(),
                q.target.to_string(),
                rules.stand().to_string(),
                q.upcard.to_string(),
                rules.bust().to_string(),
                rules.max_card().to_string(),
                doc.regime.as_str().to_string(),
                b.net.to_string(),
            ];
            if breakdown {
                header.extend(["unrestricted", "r1", "r2", "r3", "r4", "r_star", "r2_star"]);
                row.extend(
                    [b.unrestricted, b.r1, b.r2, b.r3, b.r4, b.r_star, b.r2_star].map(|v| v.to_string()),
                );
            }
            if let Some(o) = &oracle {
                header.extend(["oracle_count", "status"]);
                row.extend([o.count.to_string(), status(o).to_string()]);
            }
            formats::write_csv(&header, &[row], out)?;
        }
    }
    Ok(())
}

fn cmd_enumerate(q: Query, rules: RuleSet, format: OutputFormat, out: &mut dyn Write) -> Result<(), CliError> {
    let comps: Vec<Composition> = enumerate_legal(&q, &rules)?.collect();
    match format {
        OutputFormat::Table => {
            for c in &comps {
                writeln!(out, "{c}")?;
            }
        }
        OutputFormat::Csv => {
            let rows: Vec<Vec<String>> = comps.iter().map(|c| vec![c.to_string()]).collect();
            formats::write_csv(&["composition"], &rows, out)?;
        }
        OutputFormat::Json => formats::write_json(
            &EnumerateDoc {
                query: q,
                rules,
                count: comps.len(),
                compositions: comps,
            },
            out,
        )?,
    }
    Ok(())
}

fn cmd_prob(
    upcard: u32,
    target: u32,
    rules: RuleSet,
    force_exact: bool,
    format: OutputFormat,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let closed = if !force_exact && target - upcard.min(target) <= PROB_CLOSED_MAX_GAP {
        match closed_form_probability(target, upcard, &rules) {
            Ok(p) => Some(p),
            Err(bjcomp_core::Error::InvalidArgument(_) | bjcomp_core::Error::WrongRegime { .. }) => None,
            Err(e) => return Err(e.into()),
        }
    } else {
        None
    };
    let (method, probability) = match closed {
        Some(p) => (ProbMethod::ClosedForm, p),
        None => (
            ProbMethod::Exact,
            exact_probability(target, upcard, &rules, &CardDistribution::default())?,
        ),
    };
    match format {
        OutputFormat::Table => writeln!(out, "{probability:.4}")?,
        OutputFormat::Csv => formats::write_csv(
            &["upcard", "target", "method", "probability"],
            &[vec![
                upcard.to_string(),
                target.to_string(),
                method.as_str().to_string(),
                probability.to_string(),
            ]],
            out,
        )?,
        OutputFormat::Json => formats::write_json(
            &ProbDoc {
                upcard,
                target,
                rules,
                method,
                probability,
            },
            out,
        )?,
    }
    Ok(())
}

fn cmd_dist(
    upcard: u32,
    rules: RuleSet,
    mc: Option<(u64, u64)>,
    format: OutputFormat,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let cd = CardDistribution::default();
    let exact = outcome_distribution(upcard, &rules, &cd)?;
    let estimate = match mc {
        Some((trials, seed)) => Some((parallel::monte_carlo(upcard, &rules, &cd, trials, seed)?, seed)),
        None => None,
    };
    let est = estimate.as_ref().map(|(e, _)| e);
    match format {
        OutputFormat::Table => formats::write_distribution_table(&exact, est, out)?,
        OutputFormat::Csv => formats::write_distribution_csv(&exact, est, out)?,
        OutputFormat::Json => formats::write_json(
            &DistributionDoc::new(upcard, &exact, estimate.as_ref().map(|(e, s)| (e, *s))),
            out,
        )?,
    }
    Ok(())
}

fn cmd_tableau(parts: Composition, format: OutputFormat, out: &mut dyn Write) -> Result<(), CliError> {
    let rendered = render_tableau(&parts)?;
    match format {
        OutputFormat::Table => writeln!(out, "{rendered}")?,
        OutputFormat::Csv => {
            let rows: Vec<Vec<String>> = parts
                .parts()
                .iter()
                .enumerate()
                .map(|(i, p)| vec![(i + 1).to_string(), p.to_string()])
                .collect();
            formats::write_csv(&["row", "length"], &rows, out)?;
        }
        OutputFormat::Json => formats::write_json(
            &TableauDoc {
                rows: rendered.lines().map(str::to_string).collect(),
                parts,
            },
            out,
        )?,
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_parse() {
        assert_eq!(parse_range("2..11"), Ok(2..=11));
        assert_eq!(parse_range("17..=21"), Ok(17..=21));
        assert_eq!(parse_range("9"), Ok(9..=9));
        assert!(parse_range("5..3").is_err());
        assert!(parse_range("a..3").is_err());
    }

    #[test]
    fn parts_parse() {
        assert_eq!(parse_parts("3,2,4").unwrap().parts(), [3, 2, 4]);
        assert!(parse_parts("3,0").is_err());
        assert!(parse_parts("").is_err());
    }

    #[test]
    fn clap_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
