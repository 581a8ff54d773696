//! Analytic-versus-simulation comparison for the published tables.

use std::time::Instant;

use rmt_gaps::par::try_map_slice;
use rmt_gaps::{build, EnsembleSpec, Execution, GapQuery, SamplingMethod, SimulationConfig};
use serde::Serialize;

use crate::error::Result;
use crate::output::{fmt_sig, ser_sig, ser_sig_opt, z_score, Abscissa, ResultRow};
use crate::tables::{Table, TableRow};

/// Allowance for the 4-decimal rounding of published values.
pub const ROUNDING_SLACK: f64 = 5e-5;
/// MC agreement threshold in standard errors.
pub const MC_SIGMAS: f64 = 3.0;

/// |analytic − mc| ≤ 3·stderr + 5e-5.
pub fn mc_agrees(analytic: f64, mc: f64, stderr: f64) -> bool {
    (analytic - mc).abs() <= MC_SIGMAS * stderr + ROUNDING_SLACK
}

#[derive(Debug, Clone, Serialize)]
pub struct QuantityRecord {
    #[serde(serialize_with = "ser_sig")]
    pub analytic: f64,
    #[serde(serialize_with = "ser_sig_opt")]
    pub published: Option<f64>,
    pub published_match: Option<bool>,
    #[serde(serialize_with = "ser_sig_opt")]
    pub mc_value: Option<f64>,
    #[serde(serialize_with = "ser_sig_opt")]
    pub mc_stderr: Option<f64>,
    #[serde(serialize_with = "ser_sig_opt")]
    pub z_score: Option<f64>,
    pub pass: bool,
}

impl QuantityRecord {
    fn new(analytic: f64, published: Option<f64>, mc: Option<(f64, f64)>) -> Self {
        let published_match = published.map(|p| (analytic - p).abs() <= ROUNDING_SLACK);
        let (mc_value, mc_stderr, z, pass) = match mc {
            Some((v, se)) => (Some(v), Some(se), Some(z_score(analytic, v, se)), mc_agrees(analytic, v, se)),
            None => (None, None, None, published_match.unwrap_or(true)),
        };
        Self { analytic, published, published_match, mc_value, mc_stderr, z_score: z, pass }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct QueryOut {
    #[serde(serialize_with = "ser_sig")]
    pub r: f64,
    #[serde(serialize_with = "ser_sig")]
    pub s: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Record {
    /// 1-based row number in the table.
    pub row: usize,
    pub ensemble: EnsembleSpec,
    pub query: QueryOut,
    /// Sampler that produced the MC columns.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sampler: Option<SamplingMethod>,
    pub gap: QuantityRecord,
    pub double_gap: QuantityRecord,
    pub pass: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Metadata {
    pub tool_version: String,
    pub seed: Option<u64>,
    pub realizations: Option<usize>,
    /// Only recorded on request, so that reports stay byte-identical.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub table: String,
    pub title: String,
    pub records: Vec<Record>,
    pub all_pass: bool,
    pub metadata: Metadata,
}

impl RunReport {
    /// Flat rows, E(r,s) then Ẽ(r,s) for each record.
    pub fn rows(&self) -> Vec<ResultRow> {
        let mut out = Vec::with_capacity(2 * self.records.len());
        for rec in &self.records {
            for q in [&rec.gap, &rec.double_gap] {
                let mut row = ResultRow::analytic(Abscissa::Interval(rec.query.r, rec.query.s), q.analytic);
                if let (Some(v), Some(se)) = (q.mc_value, q.mc_stderr) {
                    row = row.with_mc(v, se);
                }
                out.push(row);
            }
        }
        out
    }

    /// One human-readable line per record.
    pub fn summary(&self) -> String {
        let mut out = format!("{} (table {})\n", self.title, self.table);
        for rec in &self.records {
            let part = |name: &str, q: &QuantityRecord| {
                let mut s = format!("{name} {}", fmt_sig(q.analytic));
                if let Some(p) = q.published {
                    s += &format!(" [published {p:.4}]");
                }
                if let (Some(v), Some(se)) = (q.mc_value, q.mc_stderr) {
                    s += &format!(" mc {} ± {}", fmt_sig(v), fmt_sig(se));
                }
                s
            };
            out += &format!(
                "row {} ({}, {}): {}; {} -> {}\n",
                rec.row,
                fmt_sig(rec.query.r),
                fmt_sig(rec.query.s),
                part("E", &rec.gap),
                part("Ẽ", &rec.double_gap),
                if rec.pass { "pass" } else { "FAIL" }
            );
            for note in &rec.notes {
                out += &format!("    note: {note}\n");
            }
        }
        out += &format!("{}\n", if self.all_pass { "all rows pass" } else { "some rows FAIL" });
        out
    }
}

/// Options for [`reproduce_table`]; `simulation = None` skips Monte Carlo
/// and grades rows against the published analytic values instead.
#[derive(Debug, Clone)]
pub struct ReproduceOptions {
    pub simulation: Option<SimulationConfig>,
    pub execution: Execution,
    pub record_time: bool,
}

impl Default for ReproduceOptions {
    fn default() -> Self {
        Self { simulation: Some(SimulationConfig::default()), execution: Execution::Parallel, record_time: false }
    }
}

fn evaluate_row(table: &Table, row: &TableRow, index: usize, opts: &ReproduceOptions) -> Result<Record> {
    let resolved = table.resolve(index)?;
    let model = build(&resolved.spec)?;
    let q: GapQuery = resolved.query;
    let e = model.gap_probability(q)?;
    let et = model.double_gap_probability(q)?;
    let (mc_e, mc_et, sampler) = match &opts.simulation {
        Some(cfg) => {
            let run = rmt_gaps::simulate(&model, cfg)?;
            let g = run.gap(q.r, q.s)?;
            let d = run.double_gap(q.r, q.s)?;
            (Some((g.value, g.std_error)), Some((d.value, d.std_error)), Some(run.method))
        }
        None => (None, None, None),
    };
    let gap = QuantityRecord::new(e, Some(row.e), mc_e);
    let double_gap = QuantityRecord::new(et, Some(row.e_tilde), mc_et);
    Ok(Record {
        row: index + 1,
        ensemble: model.spec().clone(),
        query: QueryOut { r: q.r, s: q.s },
        sampler,
        pass: gap.pass && double_gap.pass,
        gap,
        double_gap,
        notes: resolved.notes,
    })
}

/// Runs every row of `table`; rows are evaluated in parallel and reported
/// in row order.
pub fn reproduce_table(table: &Table, opts: &ReproduceOptions) -> Result<RunReport> {
    let start = Instant::now();
    let indexed: Vec<(usize, &TableRow)> = table.row.iter().enumerate().collect();
    let records = try_map_slice(opts.execution, &indexed, |&(i, row)| evaluate_row(table, row, i, opts))?;
    let all_pass = records.iter().all(|r| r.pass);
    Ok(RunReport {
        table: table.id.clone(),
        title: table.title.clone(),
        all_pass,
        records,
        metadata: Metadata {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            seed: opts.simulation.as_ref().map(|c| c.seed),
            realizations: opts.simulation.as_ref().map(|c| c.realizations),
            wall_time_s: opts.record_time.then(|| start.elapsed().as_secs_f64()),
        },
    })
}
