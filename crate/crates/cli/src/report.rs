//! CSV emission. Reals are written with 17 significant digits in
//! scientific notation so every value round-trips exactly; the output is a
//! pure function of its inputs, so re-runs produce identical bytes.
//!
//! Suite files may start with `# key=value` metadata lines (effective
//! lambda, triggered counts) ahead of the column header.

use seqlepski::kernel::{ErrorDecomposition, SequentialEstimate};
use seqlepski::lab::{LowerBoundDiagnostic, MomentReport, RiskRow, StoppingReport, TailCheckReport};
use seqlepski::lepski::{AdaptiveEstimate, BandwidthGrid};
use seqlepski::Path;

use crate::config::Scenario;

pub const RISK_HEADER: [&str; 11] = [
    "scenario_id",
    "n",
    "M",
    "beta",
    "z0",
    "lambda",
    "R_n",
    "stderr",
    "rate_N",
    "normalized",
    "khat_mode",
];
pub const KHAT_HEADER: [&str; 4] = ["scenario_id", "n", "k", "count"];
pub const TAIL_HEADER: [&str; 5] = ["z", "bound", "empirical", "margin", "pass"];
pub const MOMENTS_HEADER: [&str; 5] = ["k", "order", "bound", "empirical", "pass"];
pub const STOPPING_HEADER: [&str; 6] = ["n", "h", "H", "M", "untriggered", "stderr"];
pub const LOWERBOUND_HEADER: [&str; 6] = ["n", "M", "beta_bar_half", "mean_varsigma", "eta_mean", "eta_var"];
pub const GRID_HEADER: [&str; 9] = ["n", "j", "beta", "h", "N", "H", "d_n", "m", "lambda"];
pub const TRACE_HEADER: [&str; 8] = [
    "j",
    "beta_j",
    "h_j",
    "N_j",
    "H_j",
    "estimate_j",
    "omega_j",
    "threshold_j",
];
pub const ESTIMATE_HEADER: [&str; 9] = [
    "j",
    "tau",
    "alpha",
    "triggered",
    "A_n",
    "value",
    "bias_term",
    "noise_term",
    "H",
];
pub const PATH_HEADER: [&str; 3] = ["k", "x_k", "y_k"];

/// 17 significant digits, `.` decimal point, no grouping.
pub fn real(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

/// Accumulates one CSV document in memory.
pub struct CsvDoc {
    out: csv::Writer<Vec<u8>>,
}

impl CsvDoc {
    pub fn new(header: &[&str]) -> Self {
        Self::with_meta(&[], header)
    }

    pub fn with_meta(meta: &[(&str, String)], header: &[&str]) -> Self {
        let mut buf = Vec::new();
        for (k, v) in meta {
            buf.extend_from_slice(format!("# {k}={v}\n").as_bytes());
        }
        let mut out = csv::WriterBuilder::new().flexible(true).from_writer(buf);
        out.write_record(header).expect("in-memory write");
        Self { out }
    }

    pub fn row<I, S>(&mut self, fields: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.out.write_record(fields).expect("in-memory write");
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.out.into_inner().expect("in-memory flush")
    }
}

pub fn risk_rows(doc: &mut CsvDoc, scenario: &Scenario, rows: &[RiskRow]) {
    for r in rows {
        doc.row([
            scenario.id.clone(),
            r.n.to_string(),
            r.replications.to_string(),
            real(scenario.signal.beta()),
            real(scenario.z0()),
            real(r.lambda),
            real(r.risk),
            real(r.stderr),
            real(r.rate),
            real(r.normalized),
            r.khat_mode().to_string(),
        ]);
    }
}

pub fn khat_rows(doc: &mut CsvDoc, scenario: &Scenario, rows: &[RiskRow]) {
    for r in rows {
        for (k, count) in r.khat_counts.iter().enumerate() {
            doc.row([scenario.id.clone(), r.n.to_string(), k.to_string(), count.to_string()]);
        }
    }
}

pub fn tail(report: &TailCheckReport, lambda: f64) -> Vec<u8> {
    let meta = [
        ("lambda", real(lambda)),
        ("n", report.n.to_string()),
        ("h", real(report.h)),
        ("M", report.replications.to_string()),
        ("triggered", report.triggered.to_string()),
        ("zeta_mean", real(report.zeta_mean)),
        ("zeta_variance", real(report.zeta_variance)),
        ("variance_in_band", report.variance_in_band().to_string()),
    ];
    let mut doc = CsvDoc::with_meta(&meta, &TAIL_HEADER);
    for r in &report.rows {
        doc.row([real(r.z), real(r.bound), real(r.empirical), real(r.margin), r.pass.to_string()]);
    }
    doc.into_bytes()
}

pub fn moments(report: &MomentReport, lambda: f64) -> Vec<u8> {
    let meta = [
        ("lambda", real(lambda)),
        ("n", report.n.to_string()),
        ("M", report.replications.to_string()),
        ("eps", real(report.eps)),
    ];
    let mut doc = CsvDoc::with_meta(&meta, &MOMENTS_HEADER);
    for r in &report.rows {
        doc.row([
            r.k.to_string(),
            r.order.to_string(),
            real(r.bound),
            real(r.empirical),
            r.pass.to_string(),
        ]);
    }
    doc.into_bytes()
}

pub fn stopping(report: &StoppingReport, lambda: f64) -> Vec<u8> {
    let meta = [
        ("lambda", real(lambda)),
        ("monotone_in_n", report.monotone_in_n().to_string()),
    ];
    let mut doc = CsvDoc::with_meta(&meta, &STOPPING_HEADER);
    for r in &report.rows {
        doc.row([
            r.n.to_string(),
            real(r.h),
            real(r.threshold),
            r.replications.to_string(),
            real(r.untriggered),
            real(r.stderr),
        ]);
    }
    doc.into_bytes()
}

pub fn lower_bound(d: &LowerBoundDiagnostic, lambda: f64) -> Vec<u8> {
    let meta = [
        ("lambda", real(lambda)),
        ("v_width", real(d.v_width)),
        ("rejected", d.rejected.to_string()),
    ];
    let mut doc = CsvDoc::with_meta(&meta, &LOWERBOUND_HEADER);
    let (eta_mean, eta_var) = d.eta_mean_variance();
    doc.row([
        d.n.to_string(),
        d.replications.to_string(),
        real(d.sigma_star_sq),
        real(d.mean_varsigma()),
        real(eta_mean),
        real(eta_var),
    ]);
    doc.into_bytes()
}

pub fn grids(grids: &[BandwidthGrid]) -> Vec<u8> {
    let lambda = grids.first().map_or(f64::NAN, |g| g.lambda);
    let mut doc = CsvDoc::with_meta(&[("lambda", real(lambda))], &GRID_HEADER);
    for g in grids {
        for j in 0..g.len() {
            doc.row([
                g.n.to_string(),
                j.to_string(),
                real(g.betas[j]),
                real(g.bandwidths[j]),
                real(g.rates[j]),
                real(g.threshold(j)),
                real(g.d_n),
                g.m.to_string(),
                real(g.lambda),
            ]);
        }
    }
    doc.into_bytes()
}

/// Per-bandwidth trace plus a trailing `final,<k_hat>,<value>` row.
pub fn trace(estimate: &AdaptiveEstimate, grid: &BandwidthGrid) -> Vec<u8> {
    let meta = [("lambda", real(grid.lambda)), ("n", grid.n.to_string())];
    let mut doc = CsvDoc::with_meta(&meta, &TRACE_HEADER);
    for r in estimate.trace(grid) {
        doc.row([
            r.j.to_string(),
            real(r.beta),
            real(r.h),
            real(r.rate),
            real(r.threshold),
            real(r.estimate),
            real(r.omega),
            real(r.selection_threshold),
        ]);
    }
    doc.row(["final".to_string(), estimate.k_hat.to_string(), real(estimate.value)]);
    doc.into_bytes()
}

fn opt_real(x: Option<f64>) -> String {
    x.map(real).unwrap_or_default()
}

/// One debug record per grid bandwidth.
pub fn estimates(records: &[(SequentialEstimate, ErrorDecomposition)], lambda: f64) -> Vec<u8> {
    let mut doc = CsvDoc::with_meta(&[("lambda", real(lambda))], &ESTIMATE_HEADER);
    for (j, (e, d)) in records.iter().enumerate() {
        doc.row([
            j.to_string(),
            e.tau.map(|t| t.to_string()).unwrap_or_default(),
            opt_real(e.alpha),
            e.triggered.to_string(),
            real(e.a_n),
            real(e.value),
            real(d.bias_term),
            real(d.noise_term),
            real(e.threshold),
        ]);
    }
    doc.into_bytes()
}

pub fn path(path: &Path, lambda: f64) -> Vec<u8> {
    let mut doc = CsvDoc::with_meta(&[("lambda", real(lambda))], &PATH_HEADER);
    for (k, y) in path.values().iter().enumerate() {
        doc.row([k.to_string(), real(path.x(k)), real(*y)]);
    }
    doc.into_bytes()
}
