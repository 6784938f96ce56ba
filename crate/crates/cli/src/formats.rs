//! Machine-readable output: CSV and JSON encodings of reports and
//! distributions, plus the plain-text tables used by default.

use std::fmt;
use std::io::{self, Write};
use std::marker::PhantomData;

use bjcomp_core::probability::{Estimate, MonteCarloEstimate, MC_ALGORITHM};
use bjcomp_core::{
    Composition, CountBreakdown, DiscrepancyReport, OutcomeDistribution, Query, Regime, RuleSet,
};
use serde::de::{self, MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Header of the discrepancy CSV.
pub const DISCREPANCY_HEADER: [&str; 10] = [
    "m",
    "w",
    "s",
    "d",
    "b",
    "max_card",
    "regime",
    "formula_net",
    "oracle_count",
    "delta",
];

/// Header of the distribution CSV; a Monte Carlo run appends
/// `mc_probability,mc_stderr`.
pub const DISTRIBUTION_HEADER: [&str; 3] = ["total", "probability", "stderr"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Table,
    Csv,
    Json,
}

fn csv_error(e: csv::Error) -> io::Error {
    io::Error::other(e)
}

/// One row per record under [`DISCREPANCY_HEADER`].
/// The header is written even when there are no records.
pub fn write_discrepancy_csv(report: &DiscrepancyReport, out: &mut dyn Write) -> io::Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(DISCREPANCY_HEADER).map_err(csv_error)?;
    for rec in &report.records {
        w.serialize(rec).map_err(csv_error)?;
    }
    w.flush()
}

pub fn write_discrepancy_table(report: &DiscrepancyReport, out: &mut dyn Write) -> io::Result<()> {
    writeln!(
        out,
        "{:>3} {:>3} {:>3} {:>3} {:>3} {:>4} {:<8} {:>12} {:>12} {:>8}",
        "m", "w", "s", "d", "b", "A", "regime", "formula", "oracle", "delta"
    )?;
    for r in &report.records {
        writeln!(
            out,
            "{:>3} {:>3} {:>3} {:>3} {:>3} {:>4} {:<8} {:>12} {:>12} {:>8}",
            r.m,
            r.w,
            r.s,
            r.d,
            r.b,
            r.max_card,
            r.regime.as_str(),
            r.formula_net,
            r.oracle_count,
            r.delta
        )?;
    }
    writeln!(out)?;
    write_sweep_summary(report, out)
}

pub fn write_sweep_summary(report: &DiscrepancyReport, out: &mut dyn Write) -> io::Result<()> {
    let s = &report.summary;
    writeln!(
        out,
        "closed regime: {} agree, {} disagree; general regime: {} agree, {} disagree",
        s.closed.agreements, s.closed.disagreements, s.general.agreements, s.general.disagreements
    )
}

/// Per-total values keyed by the decimal total, in increasing numeric order.
#[derive(Debug, Clone, PartialEq)]
pub struct TotalsMap<V>(pub Vec<(u32, V)>);

impl<V: Serialize> Serialize for TotalsMap<V> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for (total, value) in &self.0 {
            map.serialize_entry(&total.to_string(), value)?;
        }
        map.end()
    }
}

impl<'de, V: Deserialize<'de>> Deserialize<'de> for TotalsMap<V> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct Visit<V>(PhantomData<V>);

        impl<'de, V: Deserialize<'de>> Visitor<'de> for Visit<V> {
            type Value = TotalsMap<V>;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a map from decimal totals to values")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut access: A) -> Result<Self::Value, A::Error> {
                let mut entries = Vec::new();
                while let Some((key, value)) = access.next_entry::<String, V>()? {
                    let total = key.parse().map_err(|_| de::Error::custom(format!("bad total {key:?}")))?;
                    entries.push((total, value));
                }
                entries.sort_by_key(|e| e.0);
                Ok(TotalsMap(entries))
            }
        }

        deserializer.deserialize_map(Visit(PhantomData))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloDoc {
    pub trials: u64,
    pub seed: u64,
    pub algorithm: String,
    pub final_totals: TotalsMap<Estimate>,
    pub bust: Estimate,
}

/// JSON document for `dist`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionDoc {
    pub upcard: u32,
    pub stand: u32,
    pub bust: u32,
    pub final_totals: TotalsMap<f64>,
    pub bust_mass: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub monte_carlo: Option<MonteCarloDoc>,
}

impl DistributionDoc {
    pub fn new(upcard: u32, exact: &OutcomeDistribution, mc: Option<(&MonteCarloEstimate, u64)>) -> Self {
        Self {
            upcard,
            stand: exact.stand(),
            bust: exact.bust(),
            final_totals: TotalsMap(exact.totals().collect()),
            bust_mass: exact.bust_mass(),
            monte_carlo: mc.map(|(est, seed)| MonteCarloDoc {
                trials: est.trials(),
                seed,
                algorithm: MC_ALGORITHM.to_string(),
                final_totals: TotalsMap(est.totals().collect()),
                bust: est.bust(),
            }),
        }
    }
}

/// Rows `stand..=bust` then `bust`. Exact cells carry a zero stderr.
pub fn write_distribution_csv(
    dist: &OutcomeDistribution,
    mc: Option<&MonteCarloEstimate>,
    out: &mut dyn Write,
) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<&str> = DISTRIBUTION_HEADER.to_vec();
    if mc.is_some() {
        header.extend(["mc_probability", "mc_stderr"]);
    }
    w.write_record(&header).map_err(csv_error)?;
    let rows = dist
        .totals()
        .map(|(t, p)| (t.to_string(), p, mc.and_then(|m| m.total(t))))
        .chain(std::iter::once((
            "bust".to_string(),
            dist.bust_mass(),
            mc.map(|m| m.bust()),
        )));
    for (label, p, est) in rows {
        let mut record = vec![label, p.to_string(), 0.0f64.to_string()];
        if mc.is_some() {
            let est = est.unwrap_or(Estimate {
                probability: 0.0,
                stderr: 0.0,
            });
            record.push(est.probability.to_string());
            record.push(est.stderr.to_string());
        }
        w.write_record(&record).map_err(csv_error)?;
    }
    w.flush()
}

pub fn write_distribution_table(
    dist: &OutcomeDistribution,
    mc: Option<&MonteCarloEstimate>,
    out: &mut dyn Write,
) -> io::Result<()> {
    match mc {
        None => writeln!(out, "{:<6} {:>11}", "total", "probability")?,
        Some(_) => writeln!(
            out,
            "{:<6} {:>11} {:>11} {:>9}",
            "total", "probability", "monte carlo", "stderr"
        )?,
    }
    let rows = dist
        .totals()
        .map(|(t, p)| (t.to_string(), p, mc.and_then(|m| m.total(t))))
        .chain(std::iter::once(("bust".to_string(), dist.bust_mass(), mc.map(|m| m.bust()))));
    for (label, p, est) in rows {
        match est {
            None => writeln!(out, "{label:<6} {p:>11.4}")?,
            Some(e) => writeln!(
                out,
                "{label:<6} {p:>11.4} {:>11.4} {:>9.6}",
                e.probability, e.stderr
            )?,
        }
    }
    Ok(())
}

/// Oracle cross-check attached to a count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleDoc {
    pub count: u64,
    pub matches: bool,
}

/// JSON document for `count`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountDoc {
    pub query: Query,
    pub rules: RuleSet,
    pub regime: Regime,
    pub net: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub breakdown: Option<CountBreakdown>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleDoc>,
}

/// JSON document for `enumerate`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumerateDoc {
    pub query: Query,
    pub rules: RuleSet,
    pub count: usize,
    pub compositions: Vec<Composition>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbMethod {
    ClosedForm,
    Exact,
}

impl ProbMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            ProbMethod::ClosedForm => "closed_form",
            ProbMethod::Exact => "exact",
        }
    }
}

/// JSON document for `prob`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbDoc {
    pub upcard: u32,
    pub target: u32,
    pub rules: RuleSet,
    pub method: ProbMethod,
    pub probability: f64,
}

/// JSON document for `tableau`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableauDoc {
    pub parts: Composition,
    pub rows: Vec<String>,
}

/// Pretty JSON followed by a newline.
pub fn write_json<T: Serialize + ?Sized>(value: &T, out: &mut dyn Write) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut *out, value).map_err(io::Error::other)?;
    writeln!(out)
}

/// Generic CSV: header then rows.
pub fn write_csv<R: AsRef<[u8]>>(header: &[&str], rows: &[Vec<R>], out: &mut dyn Write) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header).map_err(csv_error)?;
    for row in rows {
        w.write_record(row).map_err(csv_error)?;
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use bjcomp_core::{outcome_distribution, verify_sweep, CardDistribution, RuleSet, SweepRanges};

    #[test]
    fn discrepancy_csv_header_and_rows() {
        let r = RuleSet::default();
        let report = verify_sweep(&SweepRanges::new(10..=10, 17..=17).with_cards_max(2), &r).unwrap();
        let mut buf = Vec::new();
        write_discrepancy_csv(&report, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("m,w,s,d,b,max_card,regime,formula_net,oracle_count,delta"));
        assert_eq!(lines.next(), Some("1,17,17,10,21,11,closed,1,1,0"));
        assert_eq!(lines.next(), Some("2,17,17,10,21,11,closed,5,5,0"));
        assert_eq!(lines.next(), None);
    }

    #[test]
    fn distribution_json_uses_string_keys() {
        let dist = outcome_distribution(10, &RuleSet::default(), &CardDistribution::default()).unwrap();
        let doc = DistributionDoc::new(10, &dist, None);
        let json = serde_json::to_value(&doc).unwrap();
        let totals = json["final_totals"].as_object().unwrap();
        let keys: Vec<&str> = totals.keys().map(String::as_str).collect();
        assert_eq!(keys, ["17", "18", "19", "20", "21"]);
        assert!(totals.values().all(serde_json::Value::is_number));
        assert!(json["bust_mass"].is_number());
        assert!(json.get("monte_carlo").is_none());
        let back: DistributionDoc = serde_json::from_value(json).unwrap();
        assert_eq!(back, doc);
    }

    #[test]
    fn totals_map_orders_numerically() {
        let m: TotalsMap<u32> = serde_json::from_str(r#"{"21":3,"9":1,"17":2}"#).unwrap();
        assert_eq!(m.0, [(9, 1), (17, 2), (21, 3)]);
        assert_eq!(serde_json::to_string(&m).unwrap(), r#"{"9":1,"17":2,"21":3}"#);
    }

    #[test]
    fn distribution_csv_has_bust_row() {
        let dist = outcome_distribution(6, &RuleSet::default(), &CardDistribution::default()).unwrap();
        let mut buf = Vec::new();
        write_distribution_csv(&dist, None, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "total,probability,stderr");
        assert_eq!(lines.len(), 7);
        assert!(lines[6].starts_with("bust,"));
    }
}
