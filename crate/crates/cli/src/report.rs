use serde::Serialize;
use vcsp::instance::ratio;
use vcsp::value::fmt_rational;
use vcsp::ExtRat;

pub const CSV_HEADER: &str = "case,algo,eps,level,value,oracle,ratio,ms";

/// One row of output. `ratio` is present only when value and oracle are finite
/// and the oracle is positive.
#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub case: String,
    pub algo: String,
    pub eps: Option<String>,
    pub level: Option<usize>,
    pub seed: Option<u64>,
    pub value: String,
    pub oracle: Option<String>,
    pub ratio: Option<String>,
    pub ms: Option<u64>,
}

impl RunReport {
    pub fn new(case: impl Into<String>, algo: impl Into<String>, value: &ExtRat) -> Self {
        RunReport {
            case: case.into(),
            algo: algo.into(),
            eps: None,
            level: None,
            seed: None,
            value: value.to_string(),
            oracle: None,
            ratio: None,
            ms: None,
        }
    }

    pub fn with_oracle(mut self, value: &ExtRat, oracle: &ExtRat) -> Self {
        self.oracle = Some(oracle.to_string());
        self.ratio = ratio(value, oracle).map(|r| fmt_rational(&r));
        self
    }

    pub fn csv_row(&self) -> String {
        let opt = |v: &Option<String>| v.clone().unwrap_or_default();
        [
            self.case.clone(),
            self.algo.clone(),
            opt(&self.eps),
            self.level.map(|l| l.to_string()).unwrap_or_default(),
            self.value.clone(),
            opt(&self.oracle),
            opt(&self.ratio),
            self.ms.map(|m| m.to_string()).unwrap_or_default(),
        ]
        .join(",")
    }
}

/// Print to stdout, ignoring a closed pipe.
pub fn emit(text: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{text}");
}
