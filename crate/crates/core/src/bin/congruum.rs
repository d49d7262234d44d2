use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use congruum::error::{Error, Result};
use congruum::pipeline::{
    self, exit_code, ConfigFile, Mode, RecordFile, ScanConfig, EXIT_OK,
};

#[derive(Parser)]
#[command(name = "congruum", version, about = "Heegner-point rank scans for Dy^2 = x^3 - x")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify every squarefree |D| in a range and write one record per line.
    Scan(ScanArgs),
    /// Continue an interrupted scan from its checkpoint.
    Resume {
        #[arg(long, env = "CONGRUUM_CHECKPOINT")]
        checkpoint: PathBuf,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Search for points on TorsionCandidate and Indeterminate records.
    Verify {
        records: PathBuf,
        #[arg(long, default_value_t = 1000)]
        height_bound: u64,
        /// Also confirm Nontorsion records with an explicit point.
        #[arg(long)]
        all: bool,
    },
    /// Per-class counts and survival rates; writes cumulative TSV files with --plot-dir.
    Report {
        records: PathBuf,
        #[arg(long)]
        plot_dir: Option<PathBuf>,
    },
    /// Quick consistency checks.
    Selftest,
}

#[derive(Args)]
struct ScanArgs {
    /// Range of |D| as LO..HI, inclusive.
    #[arg(long)]
    range: Option<String>,
    /// Comma-separated classes among S5, S7, I6, I14.
    #[arg(long, value_delimiter = ',')]
    classes: Option<Vec<String>>,
    #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(["full", "prefiltered"]))]
    mode: Option<String>,
    /// Precision ladder in bits, e.g. 256,512,1024.
    #[arg(long, value_delimiter = ',')]
    prec: Option<Vec<u32>>,
    #[arg(long)]
    threshold_nontorsion: Option<f64>,
    #[arg(long)]
    threshold_torsion: Option<f64>,
    #[arg(long)]
    height_bound: Option<i64>,
    #[arg(long)]
    no_normalizer: bool,
    #[arg(long)]
    series_ceiling: Option<usize>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    chunk: Option<usize>,
    #[arg(long)]
    record_timing: bool,
    /// TOML file with the same keys; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, env = "CONGRUUM_OUT")]
    out: PathBuf,
    #[arg(long, env = "CONGRUUM_CHECKPOINT")]
    checkpoint: Option<PathBuf>,
}

impl ScanArgs {
    fn resolve(&self) -> Result<ScanConfig> {
        let base = match &self.config {
            Some(p) => ConfigFile::load(p)?,
            None => ConfigFile::default(),
        };
        let mode = self.mode.as_deref().map(str::parse::<Mode>).transpose()?;
        let flags = ConfigFile {
            range: self.range.clone(),
            classes: self.classes.clone(),
            mode,
            prec: self.prec.clone(),
            threshold_nontorsion: self.threshold_nontorsion,
            threshold_torsion: self.threshold_torsion,
            height_bound: self.height_bound,
            use_normalizer: self.no_normalizer.then_some(false),
            series_ceiling: self.series_ceiling,
            max_abs_d: None,
            workers: self.workers,
            chunk: self.chunk,
            record_timing: self.record_timing.then_some(true),
        };
        ScanConfig::from_file(&base.overlay(&flags))
    }
}

fn run(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Scan(args) => {
            let cfg = args.resolve()?;
            let s = pipeline::scan(cfg, &args.out, args.checkpoint.as_deref())?;
            eprintln!("{} records, {} indeterminate", s.records, s.buckets.indeterminate());
            Ok(s.exit_code())
        }
        Command::Resume { checkpoint, workers } => {
            let s = pipeline::resume(&checkpoint, workers)?;
            eprintln!("{} records, {} indeterminate", s.records, s.buckets.indeterminate());
            Ok(s.exit_code())
        }
        Command::Verify { records, height_bound, all } => {
            let file = RecordFile::read(&records)?;
            let rows = pipeline::verify(&file.records, height_bound, all);
            print!("{}", pipeline::verify_table(&rows));
            Ok(EXIT_OK)
        }
        Command::Report { records, plot_dir } => {
            let file = RecordFile::read(&records)?;
            let rep = pipeline::report(&file)?;
            print!("{}", rep.table());
            if let Some(dir) = plot_dir {
                for p in rep.write_plot_data(&dir)? {
                    eprintln!("wrote {}", p.display());
                }
            }
            Ok(EXIT_OK)
        }
        Command::Selftest => {
            let checks = pipeline::selftest();
            let mut ok = true;
            for (name, pass) in &checks {
                println!("{} {name}", if *pass { "PASS" } else { "FAIL" });
                ok &= pass;
            }
            if ok {
                Ok(EXIT_OK)
            } else {
                Err(Error::Invariant("selftest failed".into()))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::Invariant(_) => 1,
                ref other => exit_code(other),
            };
            ExitCode::from(code as u8)
        }
    }
}
