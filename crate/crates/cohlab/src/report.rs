//! Report emission: a manifest header followed by either comma-separated
//! rows (fixed column order, six-decimal floats) or a structured JSON
//! document. Identical inputs and seeds produce byte-identical output
//! regardless of thread count; only the version line varies across builds.

use serde::Serialize;

use crate::erasure::{BestRate, ChernoffOutcome, ErasureReport, ExchangeFloorReport};
use crate::typicality::TypicalityReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Tabular,
    Structured,
}

impl std::str::FromStr for OutputFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "tabular" => Ok(OutputFormat::Tabular),
            "structured" => Ok(OutputFormat::Structured),
            other => Err(format!("unknown format '{other}' (tabular|structured)")),
        }
    }
}

/// Run metadata embedded in every report; enough to re-run the experiment.
#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub version: String,
    pub command: String,
    /// Ordered key=value parameter pairs.
    pub params: Vec<(String, String)>,
    pub master_seed: Option<u64>,
}

impl Manifest {
    pub fn new(command: &str) -> Self {
        Manifest {
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            params: Vec::new(),
            master_seed: None,
        }
    }

    pub fn param(mut self, key: &str, value: impl std::fmt::Display) -> Self {
        self.params.push((key.to_string(), value.to_string()));
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.master_seed = Some(seed);
        self
    }

    /// `#`-prefixed header lines for the tabular format.
    pub fn header_lines(&self) -> Vec<String> {
        let mut lines = vec![
            format!("# cohlab-report version={}", self.version),
            format!("# command={}", self.command),
        ];
        if !self.params.is_empty() {
            let joined: Vec<String> = self
                .params
                .iter()
                .map(|(k, v)| format!("{k}={v}"))
                .collect();
            lines.push(format!("# params {}", joined.join(" ")));
        }
        if let Some(s) = self.master_seed {
            lines.push(format!("# seed={s}"));
        }
        lines
    }
}

/// A report section: one CSV header plus formatted rows.
pub trait TabularRecord {
    fn csv_header() -> &'static str;
    fn csv_row(&self) -> String;
}

fn f(x: f64) -> String {
    format!("{x:.6}")
}

impl TabularRecord for ErasureReport {
    fn csv_header() -> &'static str {
        "n,eps,members,seed,eps_witness,eps_tau,entropy_exchange,exchange_floor,rate,c_r"
    }

    fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.n,
            f(self.eps),
            self.members,
            self.seed,
            f(self.achieved_eps_witness),
            f(self.achieved_eps_tau),
            f(self.entropy_exchange),
            f(self.exchange_floor),
            f(self.rate),
            f(self.c_r),
        )
    }
}

impl TabularRecord for BestRate {
    fn csv_header() -> &'static str {
        "n,formula_size,best_size,rate_best,target_error,pass_fraction"
    }

    fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.n,
            self.formula_size,
            self.best_size,
            f(self.rate_best),
            f(self.target_error),
            f(self.pass_fraction),
        )
    }
}

impl TabularRecord for ChernoffOutcome {
    fn csv_header() -> &'static str {
        "empirical_success,bound,trials"
    }

    fn csv_row(&self) -> String {
        format!("{},{},{}", f(self.empirical_success), f(self.bound), self.trials)
    }
}

impl TabularRecord for ExchangeFloorReport {
    fn csv_header() -> &'static str {
        "n,achieved_eps,entropy_exchange,bound,bound_holds,dephased_entropy,diagonal_floor"
    }

    fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.n,
            f(self.achieved_eps),
            f(self.entropy_exchange),
            f(self.bound),
            self.bound_holds,
            f(self.dephased_entropy),
            f(self.diagonal_floor),
        )
    }
}

impl TabularRecord for TypicalityReport {
    fn csv_header() -> &'static str {
        "dim_typ,mass,eps,dim_lower,dim_upper,dim_bounds_ok,sandwich_min,sandwich_max,sandwich_ok"
    }

    fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.dim_typ,
            f(self.mass),
            f(self.eps),
            f(self.dim_lower),
            f(self.dim_upper),
            self.dim_bounds_ok,
            format_args!("{:.6e}", self.sandwich_min),
            format_args!("{:.6e}", self.sandwich_max),
            self.sandwich_ok,
        )
    }
}

/// Render manifest + rows as tabular text.
pub fn render_tabular<R: TabularRecord>(manifest: &Manifest, rows: &[R]) -> String {
    let mut out = String::new();
    for line in manifest.header_lines() {
        out.push_str(&line);
        out.push('\n');
    }
    out.push_str(R::csv_header());
    out.push('\n');
    for r in rows {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    out
}

/// Render manifest + rows as a structured JSON document.
pub fn render_structured<R: Serialize>(manifest: &Manifest, rows: &[R]) -> String {
    #[derive(Serialize)]
    struct Doc<'a, R: Serialize> {
        manifest: &'a Manifest,
        rows: &'a [R],
    }
    let mut s = serde_json::to_string_pretty(&Doc { manifest, rows })
        .expect("report serialization cannot fail");
    s.push('\n');
    s
}

/// The report body: everything after the manifest lines. Used by the
/// determinism checks, which compare bodies across runs and thread counts.
pub fn body_of(report: &str) -> String {
    report
        .lines()
        .filter(|l| !l.starts_with('#'))
        .collect::<Vec<_>>()
        .join("\n")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tabular_layout() {
        let manifest = Manifest::new("erase").param("copies", 4).seed(7);
        let row = ErasureReport {
            n: 4,
            eps: 0.1,
            members: 37,
            seed: 7,
            achieved_eps_witness: 0.25,
            achieved_eps_tau: 0.5,
            entropy_exchange: 5.0,
            exchange_floor: 1.2,
            rate: 1.3,
            c_r: 1.0,
        };
        let text = render_tabular(&manifest, &[row]);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], format!("# cohlab-report version={}", env!("CARGO_PKG_VERSION")));
        assert_eq!(lines[1], "# command=erase");
        assert_eq!(lines[2], "# params copies=4");
        assert_eq!(lines[3], "# seed=7");
        assert_eq!(lines[4], ErasureReport::csv_header());
        assert!(lines[5].starts_with("4,0.100000,37,7,0.250000,0.500000,"));
        assert_eq!(body_of(&text).lines().count(), 2);
    }

    #[test]
    fn structured_contains_manifest() {
        let manifest = Manifest::new("chernoff").param("dim", 2);
        let rows = vec![ChernoffOutcome {
            empirical_success: 1.0,
            bound: 0.5,
            trials: 10,
        }];
        let text = render_structured(&manifest, &rows);
        assert!(text.contains("\"command\": \"chernoff\""));
        assert!(text.contains("\"empirical_success\": 1.0"));
    }
}
