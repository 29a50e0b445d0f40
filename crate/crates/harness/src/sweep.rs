//! Two-axis parameter sweeps over a preparation, evaluated with the closed
//! forms, the full circuit simulation, or both.

use std::fmt::Write as _;

use pqs_core::analytics::{self, AnalyticPf};
use pqs_core::scissors::{self, Preparation as Prepared};
use pqs_core::sources::{self, SourceParams};
use pqs_core::PureState;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{CutoffPolicy, ExperimentConfig, Point, Preparation};
use crate::error::{HarnessError, Result};

/// One grid cell. Columns that the backend does not produce are `None`;
/// cells flagged in `status` carry NaN.
#[derive(Debug, Clone, Serialize)]
pub struct Row {
    pub axis1: f64,
    pub axis2: f64,
    pub p_analytic: Option<f64>,
    pub f_analytic: Option<f64>,
    pub p_numeric: Option<f64>,
    pub f_numeric: Option<f64>,
    pub abs_err_p: Option<f64>,
    pub abs_err_f: Option<f64>,
    pub count_rate: Option<f64>,
    pub status: String,
}

impl Row {
    /// Bitwise equality, so NaN cells compare equal to themselves.
    pub fn same_as(&self, other: &Row) -> bool {
        let bits = |r: &Row| {
            [r.axis1, r.axis2]
                .into_iter()
                .map(Some)
                .chain([
                    r.p_analytic,
                    r.f_analytic,
                    r.p_numeric,
                    r.f_numeric,
                    r.abs_err_p,
                    r.abs_err_f,
                    r.count_rate,
                ])
                .map(|v| v.map(f64::to_bits))
                .collect::<Vec<_>>()
        };
        bits(self) == bits(other) && self.status == other.status
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub rows: usize,
    pub flagged: usize,
    pub max_abs_err_p: Option<f64>,
    pub max_abs_err_f: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepGrid {
    pub config: ExperimentConfig,
    pub rows: Vec<Row>,
}

fn source_params(config: &ExperimentConfig, p: &Point) -> SourceParams {
    let mut params = SourceParams::new(p.delta, p.phi, p.t0);
    if let CutoffPolicy::Fixed(c) = config.cutoff {
        params = params.with_cutoff(c);
    }
    if let Preparation::Omega { splits, .. } = &config.preparation {
        params = params.with_splits(splits.clone());
    }
    params
}

/// Closed-form P and F of the configured preparation at `p`. The Bell case
/// uses the form that keeps the interference of the two vacuum branches.
pub fn analytic_cell(preparation: &Preparation, p: &Point) -> pqs_core::Result<AnalyticPf> {
    match preparation {
        Preparation::Hybrid(k) => analytics::pf_hybrid(k.method(p), p.delta, p.phi, p.t0),
        Preparation::Bell(k) => analytics::pf_bell_exact(k.method(p), p.delta, p.phi, p.t0),
        Preparation::Omega { .. } => Err(pqs_core::Error::InvalidArgument("no closed form".into())),
    }
}

/// Simulated preparation at `p` together with its target state.
pub fn simulate_cell(config: &ExperimentConfig, p: &Point) -> pqs_core::Result<(Prepared, PureState)> {
    let params = source_params(config, p);
    match &config.preparation {
        Preparation::Hybrid(k) => {
            Ok((scissors::prepare_hybrid(&params, k.device(p))?, sources::hybrid_target(&params)?))
        }
        Preparation::Bell(k) => {
            Ok((scissors::prepare_bell(&params, k.device(p))?, sources::bell_target(p.phi, params.cutoff)?))
        }
        Preparation::Omega { n, scissors: kinds, .. } => {
            let devices: Vec<_> = kinds.iter().map(|k| k.device(p)).collect();
            Ok((
                scissors::prepare_omega(&params, *n, &devices)?,
                sources::target_omega(*n, kinds.len(), &params)?,
            ))
        }
    }
}

/// Turns per-cell physics failures into flags; anything else aborts.
fn flag(err: pqs_core::Error) -> Result<String> {
    match err {
        pqs_core::Error::DegenerateNormalization(m) => Ok(format!("degenerate: {}", m)),
        pqs_core::Error::ZeroProbability => Ok("no-herald".into()),
        e => Err(e.into()),
    }
}

pub fn evaluate_cell(config: &ExperimentConfig, p: &Point) -> Result<Row> {
    let mut row = Row {
        axis1: p.get(config.axis1.name),
        axis2: p.get(config.axis2.name),
        p_analytic: None,
        f_analytic: None,
        p_numeric: None,
        f_numeric: None,
        abs_err_p: None,
        abs_err_f: None,
        count_rate: None,
        status: "ok".into(),
    };
    let mut flags = Vec::new();
    if config.backend.analytic() {
        let (pa, fa) = match analytic_cell(&config.preparation, p) {
            Ok(a) => (a.probability, a.fidelity),
            Err(e) => {
                flags.push(flag(e)?);
                (f64::NAN, f64::NAN)
            }
        };
        row.p_analytic = Some(pa);
        row.f_analytic = Some(fa);
    }
    if config.backend.numeric() {
        let (pn, fn_) = match simulate_cell(config, p) {
            Ok((prep, target)) => match prep.fidelity(&target) {
                Ok(f) => (prep.probability, f),
                Err(e) => {
                    flags.push(flag(e)?);
                    (prep.probability, f64::NAN)
                }
            },
            Err(e) => {
                flags.push(flag(e)?);
                (f64::NAN, f64::NAN)
            }
        };
        row.p_numeric = Some(pn);
        row.f_numeric = Some(fn_);
    }
    if let (Some(pa), Some(fa), Some(pn), Some(fn_)) = (row.p_analytic, row.f_analytic, row.p_numeric, row.f_numeric) {
        row.abs_err_p = Some((pa - pn).abs());
        row.abs_err_f = Some((fa - fn_).abs());
    }
    if let Some(rate) = config.repetition_rate {
        let p = row.p_analytic.or(row.p_numeric).unwrap_or(f64::NAN);
        row.count_rate = Some(analytics::count_rate(rate, p));
    }
    flags.dedup();
    if !flags.is_empty() {
        row.status = flags.join("; ");
    }
    Ok(row)
}

/// Runs the sweep on `jobs` threads (all cores when `None`, serially for
/// `Some(1)`). Rows come back in grid order whatever the schedule.
pub fn run_sweep(config: &ExperimentConfig, jobs: Option<usize>) -> Result<SweepGrid> {
    config.validate()?;
    let points = config.points();
    let rows: Result<Vec<Row>> = match jobs {
        Some(1) => points.iter().map(|p| evaluate_cell(config, p)).collect(),
        _ => {
            let mut builder = rayon::ThreadPoolBuilder::new();
            if let Some(n) = jobs {
                builder = builder.num_threads(n);
            }
            let pool = builder.build().map_err(|e| HarnessError::Config(e.to_string()))?;
            pool.install(|| points.par_iter().map(|p| evaluate_cell(config, p)).collect())
        }
    };
    Ok(SweepGrid { config: config.clone(), rows: rows? })
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{:.17e}", x)).unwrap_or_default()
}

fn max_of(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    values.flatten().filter(|v| !v.is_nan()).fold(None, |m, v| Some(m.map_or(v, |m: f64| m.max(v))))
}

impl SweepGrid {
    pub fn summary(&self) -> Summary {
        Summary {
            rows: self.rows.len(),
            flagged: self.rows.iter().filter(|r| r.status != "ok").count(),
            max_abs_err_p: max_of(self.rows.iter().map(|r| r.abs_err_p)),
            max_abs_err_f: max_of(self.rows.iter().map(|r| r.abs_err_f)),
        }
    }

    fn columns(&self) -> Vec<&'static str> {
        let mut cols = Vec::new();
        let b = self.config.backend;
        if b.analytic() {
            cols.extend(["p_analytic", "f_analytic"]);
        }
        if b.numeric() {
            cols.extend(["p_numeric", "f_numeric"]);
        }
        if b.analytic() && b.numeric() {
            cols.extend(["abs_err_p", "abs_err_f"]);
        }
        if self.config.repetition_rate.is_some() {
            cols.push("count_rate");
        }
        cols
    }

    fn column(row: &Row, name: &str) -> Option<f64> {
        match name {
            "p_analytic" => row.p_analytic,
            "f_analytic" => row.f_analytic,
            "p_numeric" => row.p_numeric,
            "f_numeric" => row.f_numeric,
            "abs_err_p" => row.abs_err_p,
            "abs_err_f" => row.abs_err_f,
            "count_rate" => row.count_rate,
            _ => None,
        }
    }

    /// CSV with the config echoed in leading `# config:` lines and a
    /// `# summary:` footer.
    pub fn to_csv(&self) -> Result<String> {
        let mut out = String::new();
        for line in self.config.to_text().lines() {
            writeln!(out, "# config: {}", line).unwrap();
        }
        let cols = self.columns();
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec![self.config.axis1.name.as_str(), self.config.axis2.name.as_str()];
        header.extend(&cols);
        header.push("status");
        w.write_record(&header)?;
        for r in &self.rows {
            let mut rec = vec![format!("{:.17e}", r.axis1), format!("{:.17e}", r.axis2)];
            rec.extend(cols.iter().map(|c| fmt_opt(Self::column(r, c))));
            rec.push(r.status.clone());
            w.write_record(&rec)?;
        }
        out += &String::from_utf8(w.into_inner().map_err(|e| e.into_error())?).expect("utf-8");
        let s = self.summary();
        writeln!(out, "# summary: rows = {}", s.rows).unwrap();
        writeln!(out, "# summary: flagged = {}", s.flagged).unwrap();
        if let Some(e) = s.max_abs_err_p {
            writeln!(out, "# summary: max_abs_err_p = {:.3e}", e).unwrap();
        }
        if let Some(e) = s.max_abs_err_f {
            writeln!(out, "# summary: max_abs_err_f = {:.3e}", e).unwrap();
        }
        Ok(out)
    }

    /// Reads back a file written by [`SweepGrid::to_csv`].
    pub fn parse_csv(text: &str) -> Result<SweepGrid> {
        let config_text: String = text
            .lines()
            .filter_map(|l| l.strip_prefix("# config: ").or_else(|| (l == "# config:").then_some("")))
            .map(|l| format!("{}\n", l))
            .collect();
        let config = ExperimentConfig::parse(&config_text)?;
        let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
        let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
        let parse = |s: &str| -> Result<Option<f64>> {
            if s.is_empty() {
                return Ok(None);
            }
            s.parse().map(Some).map_err(|_| HarnessError::Config(format!("bad number {:?} in csv", s)))
        };
        let mut rows = Vec::new();
        for rec in reader.records() {
            let rec = rec?;
            let mut row = Row {
                axis1: f64::NAN,
                axis2: f64::NAN,
                p_analytic: None,
                f_analytic: None,
                p_numeric: None,
                f_numeric: None,
                abs_err_p: None,
                abs_err_f: None,
                count_rate: None,
                status: String::new(),
            };
            for (i, (name, field)) in header.iter().zip(rec.iter()).enumerate() {
                match (i, name.as_str()) {
                    (0, _) => row.axis1 = parse(field)?.unwrap_or(f64::NAN),
                    (1, _) => row.axis2 = parse(field)?.unwrap_or(f64::NAN),
                    (_, "p_analytic") => row.p_analytic = parse(field)?,
                    (_, "f_analytic") => row.f_analytic = parse(field)?,
                    (_, "p_numeric") => row.p_numeric = parse(field)?,
                    (_, "f_numeric") => row.f_numeric = parse(field)?,
                    (_, "abs_err_p") => row.abs_err_p = parse(field)?,
                    (_, "abs_err_f") => row.abs_err_f = parse(field)?,
                    (_, "count_rate") => row.count_rate = parse(field)?,
                    (_, "status") => row.status = field.to_string(),
                    (_, other) => return Err(HarnessError::Config(format!("unknown csv column {:?}", other))),
                }
            }
            rows.push(row);
        }
        Ok(SweepGrid { config, rows })
    }

    /// Gnuplot `splot` blocks: one block per axis1 value, separated by blank
    /// lines, columns as in the CSV.
    pub fn to_matrix(&self) -> String {
        let cols = self.columns();
        let mut out = format!("# {} {} {}\n", self.config.axis1.name, self.config.axis2.name, cols.join(" "));
        let per_block = self.config.axis2.steps;
        for (i, r) in self.rows.iter().enumerate() {
            if i > 0 && i % per_block == 0 {
                out.push('\n');
            }
            let mut fields = vec![format!("{:.17e}", r.axis1), format!("{:.17e}", r.axis2)];
            fields.extend(cols.iter().map(|c| format!("{:.17e}", Self::column(r, c).unwrap_or(f64::NAN))));
            out += &fields.join(" ");
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        #[derive(Serialize)]
        struct Doc<'a> {
            #[serde(flatten)]
            grid: &'a SweepGrid,
            summary: Summary,
        }
        Ok(serde_json::to_string_pretty(&Doc { grid: self, summary: self.summary() })?)
    }
}
