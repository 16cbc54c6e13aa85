// Attribute-privacy analysis of a CSV column against a categorical secret,
// as done by `pfkit analyze`.
//
// `cargo run --example csv_analysis`

use pfkit::cli::{cmd_attribute_analysis, AnalysisConfig, AnalysisReport};
use pfkit::Norm;

pub fn run_example() -> pfkit::Result<AnalysisReport> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/grades.csv");
    let mut cfg = AnalysisConfig::new(path, "grade", "paid");
    cfg.norm = Norm::L1;
    cfg.value_range = Some((0.0, 20.0));
    cfg.delta = Some(0.1);
    cfg.p_list = vec![1.0, 2.0];
    cfg.dagwm = Some("cauchy:k=2,lambda=1,q=1,alpha=2".parse()?);
    let report = cmd_attribute_analysis(&cfg)?;
    print!("{}", report.to_table());
    Ok(report)
}

#[allow(dead_code)]
fn main() -> pfkit::Result<()> {
    run_example().map(|_| ())
}
