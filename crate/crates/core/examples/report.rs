//! Running suites from a configuration and rendering the report as JSON and markdown.

use hecke_cycles::config::{RunConfig, SuiteName};
use hecke_cycles::report::{Report, Status};
use hecke_cycles::suites;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut cfg = RunConfig::default();
    cfg.apply_file("q = 2\nradius = 6\nn_max = 3\nsamples = 5\nsuites = symbolic, family\n")?;
    cfg.validate()?;
    let report = suites::run(&cfg);
    print!("{}", report.to_markdown());
    let json = report.to_json();
    let back = Report::from_json(&json)?;
    println!("\nJSON round trip is byte-identical: {}", back.to_json() == json);
    println!(
        "{} pass, {} fail, {} finding; run failed: {}",
        report.count(Status::Pass),
        report.count(Status::Fail),
        report.count(Status::Finding),
        report.failed()
    );
    let bad = RunConfig { q: 7, suites: vec![SuiteName::Census], ..RunConfig::default() };
    println!("q = 7 census: {}", bad.validate().unwrap_err());
    Ok(())
}
