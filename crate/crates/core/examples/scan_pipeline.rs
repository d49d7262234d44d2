//! A small checkpointed scan, its report, and point verification of torsion candidates.
//!
//!     cargo run --release --example scan_pipeline -- 1200..1400

use congruum::pipeline::{self, parse_range, RecordFile, ScanConfig};

fn main() -> congruum::Result<()> {
    let range = std::env::args().nth(1).unwrap_or_else(|| "5..400".into());
    let (lo, hi) = parse_range(&range)?;
    let dir = std::env::temp_dir().join("congruum-example");
    std::fs::create_dir_all(&dir).map_err(|e| congruum::Error::io(dir.display().to_string(), e))?;
    let out = dir.join("scan.txt");
    let ckpt = dir.join("scan.ckpt");

    let cfg = ScanConfig { lo, hi, ..ScanConfig::default() };
    let summary = pipeline::scan(cfg, &out, Some(&ckpt))?;
    println!("{} records written to {}", summary.records, out.display());

    let file = RecordFile::read(&out)?;
    print!("{}", pipeline::report(&file)?.table());
    let rows = pipeline::verify(&file.records, 400, true);
    print!("{}", pipeline::verify_table(&rows));
    Ok(())
}
