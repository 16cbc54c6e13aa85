//! Attribute-privacy analysis of a CSV file: one conditional law of the
//! released column per value of the secret column, compared pairwise.

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::transport::{
    framework_sensitivity, DagwmConfig, DeltaValue, PValue, SensitivityConfig, SensitivityReport,
};
use crate::types::{DiscreteDistribution, Framework, NoiseFamily, NoiseSpec, Norm, SecretPairInstance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Table,
}

/// Noise family and orders for the distribution-aware column.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DagwmRequest {
    pub family: NoiseFamily,
    pub q: f64,
    pub alpha: f64,
}

impl std::str::FromStr for DagwmRequest {
    type Err = Error;

    /// `family:key=value,...`, e.g. `cauchy:k=2,lambda=1,q=1,alpha=2`.
    fn from_str(s: &str) -> Result<Self> {
        let (family, rest) = s.split_once(':').unwrap_or((s, ""));
        let mut kv = BTreeMap::new();
        for part in rest.split(',').filter(|p| !p.trim().is_empty()) {
            let (k, v) =
                part.split_once('=').ok_or_else(|| invalid(format!("bad dagwm parameter '{part}'")))?;
            let v: f64 = v.trim().parse().map_err(|_| invalid(format!("bad number in '{part}'")))?;
            kv.insert(k.trim().to_string(), v);
        }
        let get = |k: &str| kv.get(k).copied().ok_or_else(|| invalid(format!("dagwm needs '{k}'")));
        let family = match family.trim() {
            "gaussian" | "gauss" => NoiseFamily::Gaussian { sigma: get("sigma")? },
            "laplace" => NoiseFamily::Laplace { scale: get("scale")? },
            "cauchy" | "generalized_cauchy" => {
                NoiseFamily::GeneralizedCauchy { k: get("k")?, lambda: get("lambda")? }
            }
            other => return Err(invalid(format!("unknown dagwm family '{other}'"))),
        };
        Ok(DagwmRequest { family, q: kv.get("q").copied().unwrap_or(1.0), alpha: get("alpha")? })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    pub input_path: PathBuf,
    pub value_column: String,
    pub secret_column: String,
    pub norm: Norm,
    pub delta: Option<f64>,
    pub p_list: Vec<f64>,
    pub dagwm: Option<DagwmRequest>,
    pub output: OutputFormat,
    /// Declared range of the released column; the observed range is used
    /// when absent.
    pub value_range: Option<(f64, f64)>,
    /// Report the range as a lower bound ("≥").
    pub open_range: bool,
    pub delimiter: u8,
    /// Columns are 0-based indices and the first row is data.
    pub no_header: bool,
    /// Tokens that mark a missing entry; such rows are skipped.
    pub na_values: Vec<String>,
    /// Label-to-number mapping for a categorical released column.
    pub value_map: Vec<(String, f64)>,
}

impl AnalysisConfig {
    pub fn new(input: impl Into<PathBuf>, value_column: &str, secret_column: &str) -> Self {
        AnalysisConfig {
            input_path: input.into(),
            value_column: value_column.to_string(),
            secret_column: secret_column.to_string(),
            norm: Norm::L2,
            delta: None,
            p_list: Vec::new(),
            dagwm: None,
            output: OutputFormat::Json,
            value_range: None,
            open_range: false,
            delimiter: b',',
            no_header: false,
            na_values: Vec::new(),
            value_map: Vec::new(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.value_column == self.secret_column {
            return Err(invalid("value and secret columns must differ"));
        }
        if let Some(p) = self.p_list.iter().find(|p| !(**p >= 1.0)) {
            return Err(invalid(format!("p must be >= 1, got {p}")));
        }
        if let Some((lo, hi)) = self.value_range {
            if !(lo <= hi) {
                return Err(invalid(format!("empty value range {lo}:{hi}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DagwmSummary {
    pub q: f64,
    pub alpha: f64,
    pub value: f64,
    pub log_value: f64,
    /// log(value) / (q (alpha - 1)).
    pub epsilon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sensitivities {
    /// Classical sensitivity: the width of the released column's range.
    pub delta: f64,
    /// The width is a lower bound (open-ended or observed range).
    pub delta_open: bool,
    pub delta_g: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_g_delta: Option<DeltaValue>,
    pub wp: Vec<PValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dagwm: Option<DagwmSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairRow {
    pub label: String,
    pub w_inf: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub near_threshold: Option<f64>,
    pub wp: Vec<PValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dagwm_log_cost: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub sensitivities: Sensitivities,
    pub pairs: Vec<PairRow>,
    pub config_echo: AnalysisConfig,
}

impl AnalysisReport {
    pub fn delta_text(&self) -> String {
        let s = &self.sensitivities;
        if s.delta_open {
            format!("≥{}", s.delta)
        } else {
            s.delta.to_string()
        }
    }

    pub fn to_table(&self) -> String {
        let s = &self.sensitivities;
        let mut out = String::new();
        out.push_str(&format!("{:<18}{}\n", "delta", self.delta_text()));
        out.push_str(&format!("{:<18}{}\n", "delta_g", s.delta_g));
        if let Some(d) = &s.delta_g_delta {
            out.push_str(&format!("{:<18}{}\n", format!("delta_g[{}]", d.delta), d.value));
        }
        for w in &s.wp {
            out.push_str(&format!("{:<18}{}\n", format!("w_{}", w.p), w.value));
        }
        if let Some(d) = &s.dagwm {
            out.push_str(&format!("{:<18}{}\n", "dagwm_log_cost", d.log_value));
            out.push_str(&format!("{:<18}{}\n", "dagwm_epsilon", d.epsilon));
        }
        out.push('\n');
        for p in &self.pairs {
            out.push_str(&format!("{}\tw_inf={}", p.label, p.w_inf));
            if let Some(n) = p.near_threshold {
                out.push_str(&format!("\tnear={n}"));
            }
            for w in &p.wp {
                out.push_str(&format!("\tw_{}={}", w.p, w.value));
            }
            if let Some(c) = p.dagwm_log_cost {
                out.push_str(&format!("\tdagwm_log={c}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Empirical conditionals of the value column, keyed by secret value.
pub fn read_conditionals(cfg: &AnalysisConfig) -> Result<BTreeMap<String, Vec<f64>>> {
    let file = std::fs::File::open(&cfg.input_path)
        .map_err(|e| Error::Format(format!("cannot open '{}': {e}", cfg.input_path.display())))?;
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(cfg.delimiter)
        .has_headers(!cfg.no_header)
        .flexible(true)
        .from_reader(file);
    let (vi, si) = if cfg.no_header {
        let idx = |c: &str| {
            c.parse::<usize>()
                .map_err(|_| Error::Format(format!("without a header, column '{c}' must be an index")))
        };
        (idx(&cfg.value_column)?, idx(&cfg.secret_column)?)
    } else {
        let headers = reader.headers()?.clone();
        let find = |c: &str| {
            headers
                .iter()
                .position(|h| h.trim().trim_matches('"') == c)
                .ok_or_else(|| Error::Format(format!("column '{c}' not found in header")))
        };
        (find(&cfg.value_column)?, find(&cfg.secret_column)?)
    };

    let mut groups: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        if record.iter().all(|f| f.trim().is_empty()) {
            continue;
        }
        let cell = |i: usize| {
            record
                .get(i)
                .map(|s| s.trim().trim_matches('"').trim())
                .ok_or_else(|| Error::Format(format!("row {}: missing column {i}", row + 1)))
        };
        let (raw_value, secret) = (cell(vi)?, cell(si)?);
        if cfg.na_values.iter().any(|na| na == raw_value || na == secret) {
            continue;
        }
        let value =
            match cfg.value_map.iter().find(|(k, _)| k == raw_value) {
                Some((_, v)) => *v,
                None => raw_value.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| {
                    Error::Format(format!("row {}: non-numeric value '{raw_value}'", row + 1))
                })?,
            };
        groups.entry(secret.to_string()).or_default().push(value);
    }
    if groups.len() < 2 {
        return Err(invalid(format!(
            "secret column '{}' needs at least two distinct values, found {}",
            cfg.secret_column,
            groups.len()
        )));
    }
    Ok(groups)
}

/// Runs the analysis described by `cfg`.
pub fn cmd_attribute_analysis(cfg: &AnalysisConfig) -> Result<AnalysisReport> {
    cfg.validate()?;
    let groups = read_conditionals(cfg)?;
    let dists: Vec<(String, DiscreteDistribution)> = groups
        .iter()
        .map(|(k, vs)| {
            let d = DiscreteDistribution::new(vs.iter().map(|&v| vec![v]).collect(), None)?;
            Ok((k.clone(), d))
        })
        .collect::<Result<_>>()?;
    let mut pairs = Vec::new();
    for (i, (a, da)) in dists.iter().enumerate() {
        for (b, db) in &dists[i + 1..] {
            pairs.push(SecretPairInstance::new(
                da.clone(),
                db.clone(),
                format!("{}={a} vs {}={b}", cfg.secret_column, cfg.secret_column),
            )?);
        }
    }
    let fw = Framework::new(pairs)?;

    let all: Vec<f64> = groups.values().flatten().copied().collect();
    let (obs_lo, obs_hi) =
        all.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let (delta, delta_open) = match cfg.value_range {
        Some((lo, hi)) => (hi - lo, cfg.open_range),
        None => (obs_hi - obs_lo, true),
    };

    let dagwm = cfg
        .dagwm
        .map(|r| Ok::<_, Error>(DagwmConfig { noise: NoiseSpec::new(r.family, 1)?, q: r.q, alpha: r.alpha }))
        .transpose()?;
    let scfg = SensitivityConfig {
        norm: cfg.norm,
        delta: cfg.delta,
        p_list: cfg.p_list.clone(),
        dagwm,
        delta_group: Some(delta),
    };
    let rep: SensitivityReport = framework_sensitivity(&fw, &scfg)?;
    Ok(AnalysisReport {
        sensitivities: Sensitivities {
            delta,
            delta_open,
            delta_g: rep.delta_g,
            delta_g_delta: rep.delta_g_delta,
            wp: rep.w_p.unwrap_or_default(),
            dagwm: rep.delta_g_zeta.map(|z| DagwmSummary {
                q: z.q,
                alpha: z.alpha,
                value: z.value,
                log_value: z.log_value,
                epsilon: z.log_value / (z.q * (z.alpha - 1.0)),
            }),
        },
        pairs: rep
            .pairs
            .into_iter()
            .map(|p| PairRow {
                label: p.label,
                w_inf: p.w_inf,
                near_threshold: p.near_threshold,
                wp: p.w_p,
                dagwm_log_cost: p.dagwm_log_cost,
            })
            .collect(),
        config_echo: cfg.clone(),
    })
}
