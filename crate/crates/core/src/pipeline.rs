//! Batch scans over ranges of `|D|` with checkpointed, byte-deterministic output.
//!
//! A record file is one header line followed by one line per scanned `|D|`, in
//! ascending order:
//!
//! ```text
//! #congruum version=0.1.0 config=3f0c...  cm_recipe=... normalizer=on ...
//! D=5 cls=S5 class_number=2 cm_disc=-80 verdict=Nontorsion dist=2.239067186e-2 prec_bits=256 selmer=1,2,1 point=-4/5 elapsed_ms=-
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::arith::{ResidueSet, SquarefreeSieve};
use crate::curves::{classify, Class};
use crate::descent::{rank3_filter, selmer_bound, SelmerBound};
use crate::error::{Error, Result};
use crate::heegner::{classify_pd, heegner_point, HeegnerConfig, HeegnerPoint, Newforms, Verdict, CM_RECIPE};
use crate::search::{descent_search, naive_search, FoundPoint};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_INDETERMINATE: i32 = 4;

/// Exit code for an error returned by any pipeline operation.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io { .. } => EXIT_IO,
        _ => EXIT_CONFIG,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Classify every squarefree `|D|` in range.
    Full,
    /// Classify only the `|D|` that pass the rank-3 Selmer filter.
    Prefiltered,
}

impl Mode {
    pub fn name(&self) -> &'static str {
        match self {
            Mode::Full => "full",
            Mode::Prefiltered => "prefiltered",
        }
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Mode> {
        match s {
            "full" => Ok(Mode::Full),
            "prefiltered" => Ok(Mode::Prefiltered),
            _ => Err(Error::Config(format!("unknown mode {s:?}"))),
        }
    }
}

/// Optional settings as read from a TOML file or gathered from flags.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub range: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classes: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prec: Option<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold_nontorsion: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold_torsion: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub height_bound: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub use_normalizer: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub series_ceiling: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_abs_d: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chunk: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub record_timing: Option<bool>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<ConfigFile> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// Fields set in `over` replace those in `self`.
    pub fn overlay(mut self, over: &ConfigFile) -> ConfigFile {
        macro_rules! take {
            ($($f:ident),*) => { $( if over.$f.is_some() { self.$f = over.$f.clone(); } )* };
        }
        take!(
            range,
            classes,
            mode,
            prec,
            threshold_nontorsion,
            threshold_torsion,
            height_bound,
            use_normalizer,
            series_ceiling,
            max_abs_d,
            workers,
            chunk,
            record_timing
        );
        self
    }
}

/// Fully resolved scan settings.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanConfig {
    pub lo: u64,
    pub hi: u64,
    pub classes: Vec<Class>,
    pub mode: Mode,
    pub heegner: HeegnerConfig,
    /// Naive search height for the optional point in each record; 0 disables it.
    pub height_bound: i64,
    pub max_abs_d: u64,
    pub workers: usize,
    pub chunk: usize,
    pub record_timing: bool,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            lo: 5,
            hi: 1000,
            classes: Class::ODD_SIGN.to_vec(),
            mode: Mode::Full,
            heegner: HeegnerConfig::default(),
            height_bound: 64,
            max_abs_d: 10_000_000,
            workers: 1,
            chunk: 32,
            record_timing: false,
        }
    }
}

pub fn parse_range(s: &str) -> Result<(u64, u64)> {
    let bad = || Error::Config(format!("range {s:?} is not of the form LO..HI"));
    let (a, b) = s.split_once("..").ok_or_else(bad)?;
    let lo: u64 = a.trim().parse().map_err(|_| bad())?;
    let hi: u64 = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
    if lo == 0 || lo > hi {
        return Err(Error::Config(format!("empty or invalid range {s:?}")));
    }
    Ok((lo, hi))
}

fn parse_classes(names: &[String]) -> Result<Vec<Class>> {
    let mut out = Vec::new();
    for n in names {
        for part in n.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let c = Class::parse(part).ok_or_else(|| Error::Config(format!("unknown class {part:?}")))?;
            if c == Class::EvenSign {
                return Err(Error::Config("EVEN_SIGN twists have root number +1 and are not scanned".into()));
            }
            if !out.contains(&c) {
                out.push(c);
            }
        }
    }
    out.sort();
    if out.is_empty() {
        return Err(Error::Config("no classes selected".into()));
    }
    Ok(out)
}

impl ScanConfig {
    pub fn from_file(f: &ConfigFile) -> Result<ScanConfig> {
        let mut c = ScanConfig::default();
        if let Some(r) = &f.range {
            (c.lo, c.hi) = parse_range(r)?;
        }
        if let Some(cl) = &f.classes {
            c.classes = parse_classes(cl)?;
        }
        if let Some(m) = f.mode {
            c.mode = m;
        }
        if let Some(p) = &f.prec {
            c.heegner.ladder = p.clone();
        }
        if let Some(t) = f.threshold_nontorsion {
            c.heegner.threshold_nontorsion = t;
        }
        if let Some(t) = f.threshold_torsion {
            c.heegner.threshold_torsion = t;
        }
        if let Some(h) = f.height_bound {
            c.height_bound = h;
        }
        if let Some(n) = f.use_normalizer {
            c.heegner.use_normalizer = n;
        }
        if let Some(s) = f.series_ceiling {
            c.heegner.series_ceiling = s;
        }
        if let Some(m) = f.max_abs_d {
            c.max_abs_d = m;
        }
        if let Some(w) = f.workers {
            c.workers = w;
        }
        if let Some(ch) = f.chunk {
            c.chunk = ch;
        }
        if let Some(t) = f.record_timing {
            c.record_timing = t;
        }
        c.validate()?;
        Ok(c)
    }

    pub fn to_file(&self) -> ConfigFile {
        ConfigFile {
            range: Some(format!("{}..{}", self.lo, self.hi)),
            classes: Some(self.classes.iter().map(|c| c.name().to_string()).collect()),
            mode: Some(self.mode),
            prec: Some(self.heegner.ladder.clone()),
            threshold_nontorsion: Some(self.heegner.threshold_nontorsion),
            threshold_torsion: Some(self.heegner.threshold_torsion),
            height_bound: Some(self.height_bound),
            use_normalizer: Some(self.heegner.use_normalizer),
            series_ceiling: Some(self.heegner.series_ceiling),
            max_abs_d: Some(self.max_abs_d),
            workers: Some(self.workers),
            chunk: Some(self.chunk),
            record_timing: Some(self.record_timing),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let h = &self.heegner;
        if self.lo == 0 || self.lo > self.hi {
            return Err(Error::Config(format!("invalid range {}..{}", self.lo, self.hi)));
        }
        if self.hi > self.max_abs_d {
            return Err(Error::Config(format!("range end {} exceeds ceiling {}", self.hi, self.max_abs_d)));
        }
        if h.ladder.is_empty() || h.ladder.iter().any(|&p| p < 64) || h.ladder.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config(format!("precision ladder {:?} must be increasing, >= 64", h.ladder)));
        }
        let (nt, t) = (h.threshold_nontorsion, h.threshold_torsion);
        if !(t > 0.0 && nt > t && nt < 1.0) {
            return Err(Error::Config(format!("thresholds need 0 < torsion ({t}) < nontorsion ({nt}) < 1")));
        }
        if self.workers == 0 || self.chunk == 0 || h.series_ceiling < 16 {
            return Err(Error::Config("workers, chunk and series_ceiling must be positive".into()));
        }
        Ok(())
    }

    /// Residues mod 16 of the selected classes.
    pub fn residues(&self) -> ResidueSet {
        let r: Vec<u8> = self.classes.iter().flat_map(|c| c.residues_mod16().iter().copied()).collect();
        ResidueSet::from_mod16(&r)
    }

    /// Squarefree `|D|` in range and in the selected classes, ascending.
    pub fn candidates(&self) -> SquarefreeSieve {
        SquarefreeSieve::starting_at(self.hi + 1, self.residues(), self.lo)
    }

    /// Everything that affects record content; paths, worker count and chunking do not.
    fn canonical(&self) -> String {
        let h = &self.heegner;
        format!(
            "version={VERSION};range={}..{};classes={};mode={};prec={:?};nt={:e};t={:e};normalizer={};ceiling={};height={};timing={};recipe={CM_RECIPE}",
            self.lo,
            self.hi,
            self.classes.iter().map(|c| c.name()).collect::<Vec<_>>().join(","),
            self.mode.name(),
            h.ladder,
            h.threshold_nontorsion,
            h.threshold_torsion,
            h.use_normalizer,
            h.series_ceiling,
            self.height_bound,
            self.record_timing
        )
    }

    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical().as_bytes());
        digest.iter().take(8).fold(String::new(), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
    }

    pub fn header(&self) -> String {
        let h = &self.heegner;
        format!(
            "#congruum version={VERSION} config={} cm_recipe={CM_RECIPE} normalizer={} range={}..{} classes={} mode={} prec={} threshold_nontorsion={:e} threshold_torsion={:e}",
            self.hash(),
            if h.use_normalizer { "on" } else { "off" },
            self.lo,
            self.hi,
            self.classes.iter().map(|c| c.name()).collect::<Vec<_>>().join(","),
            self.mode.name(),
            h.ladder.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(","),
            h.threshold_nontorsion,
            h.threshold_torsion
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanRecord {
    pub d: u64,
    pub cls: Class,
    pub class_number: usize,
    pub cm_disc: i64,
    pub verdict: Verdict,
    pub dist: f64,
    pub prec_bits: u32,
    pub selmer: (u32, u32, u32),
    pub point: Option<(i128, i128)>,
    pub elapsed_ms: Option<u64>,
}

fn format_dist(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.9e}")
    } else {
        "nan".to_string()
    }
}

impl ScanRecord {
    pub fn to_line(&self) -> String {
        let point = match self.point {
            Some((r, s)) => format!("{r}/{s}"),
            None => "-".to_string(),
        };
        let elapsed = self.elapsed_ms.map_or("-".to_string(), |t| t.to_string());
        format!(
            "D={} cls={} class_number={} cm_disc={} verdict={} dist={} prec_bits={} selmer={},{},{} point={} elapsed_ms={}",
            self.d,
            self.cls,
            self.class_number,
            self.cm_disc,
            self.verdict,
            format_dist(self.dist),
            self.prec_bits,
            self.selmer.0,
            self.selmer.1,
            self.selmer.2,
            point,
            elapsed
        )
    }

    pub fn parse(line: &str) -> Result<ScanRecord> {
        let bad = |what: &str| Error::Record(format!("{what} in {line:?}"));
        let fields: Vec<(&str, &str)> = line
            .split_whitespace()
            .map(|kv| kv.split_once('=').ok_or_else(|| bad("field without '='")))
            .collect::<Result<_>>()?;
        const KEYS: [&str; 10] = [
            "D",
            "cls",
            "class_number",
            "cm_disc",
            "verdict",
            "dist",
            "prec_bits",
            "selmer",
            "point",
            "elapsed_ms",
        ];
        if fields.len() != KEYS.len() || fields.iter().zip(KEYS).any(|((k, _), want)| *k != want) {
            return Err(bad("unexpected field order"));
        }
        let v = |i: usize| fields[i].1;
        let num = |i: usize| v(i).parse::<i64>().map_err(|_| bad(KEYS[i]));
        let selmer: Vec<u32> = v(7)
            .split(',')
            .map(|x| x.parse().map_err(|_| bad("selmer")))
            .collect::<Result<_>>()?;
        if selmer.len() != 3 {
            return Err(bad("selmer"));
        }
        let point = match v(8) {
            "-" => None,
            p => {
                let (r, s) = p.split_once('/').ok_or_else(|| bad("point"))?;
                Some((r.parse().map_err(|_| bad("point"))?, s.parse().map_err(|_| bad("point"))?))
            }
        };
        let dist = match v(5) {
            "nan" => f64::NAN,
            x => x.parse().map_err(|_| bad("dist"))?,
        };
        Ok(ScanRecord {
            d: num(0)? as u64,
            cls: Class::parse(v(1)).ok_or_else(|| bad("cls"))?,
            class_number: num(2)? as usize,
            cm_disc: num(3)?,
            verdict: Verdict::parse(v(4)).ok_or_else(|| bad("verdict"))?,
            dist,
            prec_bits: num(6)? as u32,
            selmer: (selmer[0], selmer[1], selmer[2]),
            point,
            elapsed_ms: match v(9) {
                "-" => None,
                t => Some(t.parse().map_err(|_| bad("elapsed_ms"))?),
            },
        })
    }

    pub fn passes_rank3(&self) -> bool {
        self.selmer.2 >= 3
    }
}

/// Shared read-only state for one scan.
pub struct ScanContext {
    pub config: ScanConfig,
    pub forms: Newforms,
}

impl ScanContext {
    pub fn new(config: ScanConfig) -> Self {
        let forms = config.heegner.newforms();
        ScanContext { config, forms }
    }

    /// Record for one `|D|`, or `None` when the prefilter rejects it.
    pub fn scan_one(&self, d: u64) -> Option<ScanRecord> {
        let start = Instant::now();
        let cfg = &self.config;
        let sb: SelmerBound = selmer_bound(d as i64);
        if cfg.mode == Mode::Prefiltered && !sb.passes_rank3 {
            return None;
        }
        let mut rec = ScanRecord {
            d,
            cls: Class::of_abs(d),
            class_number: 0,
            cm_disc: 0,
            verdict: Verdict::Indeterminate,
            dist: f64::NAN,
            prec_bits: 0,
            selmer: (sb.dim_phi, sb.dim_phihat, sb.rank_upper),
            point: None,
            elapsed_ms: None,
        };
        // any failure on a single D becomes an Indeterminate record
        if let Ok(c) = classify(d as i64).and_then(|t| classify_pd(&t, &self.forms, &cfg.heegner)) {
            rec.class_number = c.class_number;
            rec.cm_disc = c.cm_disc;
            rec.verdict = c.verdict;
            rec.dist = c.dist;
            rec.prec_bits = c.prec_bits;
        }
        if cfg.height_bound > 0 {
            rec.point = naive_search(d as i64, cfg.height_bound).map(|p| (p.r, p.s));
        }
        if cfg.record_timing {
            rec.elapsed_ms = Some(start.elapsed().as_millis() as u64);
        }
        Some(rec)
    }
}

/// Per-class verdict and filter counters, carried in the checkpoint.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Buckets {
    pub counts: BTreeMap<String, [u64; 4]>,
}

impl Buckets {
    pub fn add(&mut self, r: &ScanRecord) {
        let e = self.counts.entry(r.cls.name().to_string()).or_default();
        match r.verdict {
            Verdict::Nontorsion => e[0] += 1,
            Verdict::TorsionCandidate => e[1] += 1,
            Verdict::Indeterminate => e[2] += 1,
        }
        if r.passes_rank3() {
            e[3] += 1;
        }
    }

    pub fn indeterminate(&self) -> u64 {
        self.counts.values().map(|c| c[2]).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub config_hash: String,
    pub out: PathBuf,
    /// First `|D|` not yet written.
    pub next_abs_d: u64,
    /// Length of the record file covering everything below `next_abs_d`.
    pub offset: u64,
    pub records: u64,
    pub buckets: Buckets,
    pub config: ConfigFile,
}

impl Checkpoint {
    pub fn load(path: &Path) -> Result<Checkpoint> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("checkpoint {}: {e}", path.display())))
    }

    /// Write to a sibling temporary file and rename over the target.
    pub fn store(&self, path: &Path) -> Result<()> {
        let text = toml::to_string(self).map_err(|e| Error::Invariant(format!("checkpoint encoding: {e}")))?;
        let tmp = path.with_extension("tmp");
        let io = |e| Error::io(tmp.display().to_string(), e);
        let mut f = File::create(&tmp).map_err(io)?;
        f.write_all(text.as_bytes()).map_err(io)?;
        f.sync_all().map_err(io)?;
        fs::rename(&tmp, path).map_err(|e| Error::io(path.display().to_string(), e))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanSummary {
    pub records: u64,
    pub buckets: Buckets,
}

impl ScanSummary {
    pub fn exit_code(&self) -> i32 {
        if self.buckets.indeterminate() > 0 {
            EXIT_INDETERMINATE
        } else {
            EXIT_OK
        }
    }
}

fn run_from(ctx: &ScanContext, out: &Path, checkpoint: Option<&Path>, mut cp: Checkpoint) -> Result<ScanSummary> {
    let cfg = &ctx.config;
    let io = |e| Error::io(out.display().to_string(), e);
    let file = OpenOptions::new().read(true).write(true).open(out).map_err(io)?;
    let len = file.metadata().map_err(io)?.len();
    if len < cp.offset {
        return Err(Error::Record(format!(
            "{} is shorter ({len} bytes) than its checkpoint ({} bytes)",
            out.display(),
            cp.offset
        )));
    }
    // bytes past the checkpoint belong to a chunk that was not committed
    file.set_len(cp.offset).map_err(io)?;
    drop(file);
    let mut file = OpenOptions::new().append(true).open(out).map_err(io)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
    let mut sieve = SquarefreeSieve::starting_at(cfg.hi + 1, cfg.residues(), cp.next_abs_d);
    loop {
        let chunk: Vec<u64> = sieve.by_ref().take(cfg.chunk).collect();
        let Some(&last) = chunk.last() else {
            break;
        };
        let recs: Vec<Option<ScanRecord>> = pool.install(|| chunk.par_iter().map(|&d| ctx.scan_one(d)).collect());
        let mut text = String::new();
        for r in recs.iter().flatten() {
            text.push_str(&r.to_line());
            text.push('\n');
            cp.buckets.add(r);
            cp.records += 1;
        }
        file.write_all(text.as_bytes()).map_err(io)?;
        file.sync_data().map_err(io)?;
        cp.offset += text.len() as u64;
        cp.next_abs_d = last + 1;
        if let Some(path) = checkpoint {
            cp.store(path)?;
        }
    }
    Ok(ScanSummary {
        records: cp.records,
        buckets: cp.buckets,
    })
}

/// Start a scan, replacing any existing output.
pub fn scan(config: ScanConfig, out: &Path, checkpoint: Option<&Path>) -> Result<ScanSummary> {
    config.validate()?;
    let header = config.header() + "\n";
    fs::write(out, &header).map_err(|e| Error::io(out.display().to_string(), e))?;
    let cp = Checkpoint {
        config_hash: config.hash(),
        out: out.to_path_buf(),
        next_abs_d: config.lo,
        offset: header.len() as u64,
        records: 0,
        buckets: Buckets::default(),
        config: config.to_file(),
    };
    if let Some(path) = checkpoint {
        cp.store(path)?;
    }
    let ctx = ScanContext::new(config);
    run_from(&ctx, out, checkpoint, cp)
}

/// Continue the scan recorded in `checkpoint`. `workers` may differ from the original run.
pub fn resume(checkpoint: &Path, workers: Option<usize>) -> Result<ScanSummary> {
    let cp = Checkpoint::load(checkpoint)?;
    let mut config = ScanConfig::from_file(&cp.config)?;
    if config.hash() != cp.config_hash {
        return Err(Error::Config(format!(
            "checkpoint config hash {} does not match its stored config ({})",
            cp.config_hash,
            config.hash()
        )));
    }
    if let Some(w) = workers {
        config.workers = w;
    }
    let out = cp.out.clone();
    let ctx = ScanContext::new(config);
    run_from(&ctx, &out, Some(checkpoint), cp)
}

/// Header fields and records of a record file.
#[derive(Debug, Clone, PartialEq)]
pub struct RecordFile {
    pub header: BTreeMap<String, String>,
    pub records: Vec<ScanRecord>,
}

impl RecordFile {
    pub fn read(path: &Path) -> Result<RecordFile> {
        let io = |e| Error::io(path.display().to_string(), e);
        let f = File::open(path).map_err(io)?;
        let mut lines = BufReader::new(f).lines();
        let first = lines.next().ok_or_else(|| Error::Record(format!("{} is empty", path.display())))?;
        let first = first.map_err(io)?;
        let rest = first
            .strip_prefix("#congruum ")
            .ok_or_else(|| Error::Record(format!("{}: missing header line", path.display())))?;
        let header = rest
            .split_whitespace()
            .filter_map(|kv| kv.split_once('='))
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect();
        let mut records = Vec::new();
        for line in lines {
            let line = line.map_err(io)?;
            if !line.trim().is_empty() {
                records.push(ScanRecord::parse(&line)?);
            }
        }
        Ok(RecordFile { header, records })
    }

    fn header_field(&self, k: &str) -> Result<&str> {
        self.header
            .get(k)
            .map(String::as_str)
            .ok_or_else(|| Error::Record(format!("header has no {k}")))
    }

    /// Range, classes and mode claimed by the header.
    pub fn claimed(&self) -> Result<(u64, u64, Vec<Class>, Mode)> {
        let (lo, hi) = parse_range(self.header_field("range")?)?;
        let classes = parse_classes(&[self.header_field("classes")?.to_string()])?;
        let mode = self.header_field("mode")?.parse()?;
        Ok((lo, hi, classes, mode))
    }

    /// Check that the records are exactly the expected `|D|` for the claimed range.
    pub fn check_complete(&self) -> Result<()> {
        let (lo, hi, classes, mode) = self.claimed()?;
        let cfg = ScanConfig {
            lo,
            hi,
            classes,
            ..ScanConfig::default()
        };
        let mut got = self.records.iter().map(|r| r.d);
        for d in cfg.candidates() {
            if mode == Mode::Prefiltered && !rank3_filter(d as i64) {
                continue;
            }
            match got.next() {
                Some(g) if g == d => {}
                Some(g) => return Err(Error::Record(format!("gap in |D|: expected {d}, found {g}"))),
                None => return Err(Error::Record(format!("gap in |D|: records end before {d}"))),
            }
        }
        if let Some(g) = got.next() {
            return Err(Error::Record(format!("unexpected record for |D| = {g}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyStatus {
    /// A nontorsion rational point was found, so the rank is positive.
    PointFound,
    /// Nothing found up to the height bound.
    Open,
}

/// An exactly verified nontorsion point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    Search(FoundPoint),
    Heegner(HeegnerPoint),
}

impl Witness {
    pub fn x(&self) -> String {
        match self {
            Witness::Search(p) => format!("{}/{}", p.r, p.s),
            Witness::Heegner(p) => format!("{}/{}", p.x_num, p.x_den),
        }
    }

    pub fn source(&self) -> &'static str {
        match self {
            Witness::Search(_) => "search",
            Witness::Heegner(_) => "heegner",
        }
    }

    pub fn verify(&self) -> bool {
        match self {
            Witness::Search(p) => p.verify(),
            Witness::Heegner(p) => p.verify(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyRow {
    pub d: u64,
    pub verdict: Verdict,
    pub rank_upper: u32,
    pub status: VerifyStatus,
    pub witness: Option<Witness>,
}

/// Naive search to `min(bound, 300)`, then the descent quartic search to `bound`.
pub fn find_point(d: u64, bound: u64) -> Option<FoundPoint> {
    naive_search(d as i64, bound.min(300) as i64).or_else(|| descent_search(d as i64, bound))
}

/// Precisions tried when reading a rational point off a Nontorsion trace.
pub const HEEGNER_POINT_LADDER: [u32; 4] = [512, 1024, 2048, 4096];

/// A witness for positive rank: the Heegner point for Nontorsion verdicts, then search.
pub fn witness(d: u64, verdict: Verdict, forms: &Newforms, height_bound: u64) -> Option<Witness> {
    if verdict == Verdict::Nontorsion {
        let cfg = HeegnerConfig {
            ladder: HEEGNER_POINT_LADDER.to_vec(),
            ..HeegnerConfig::default()
        };
        let hp = classify(d as i64).and_then(|t| heegner_point(&t, forms, &cfg));
        if let Ok(Some(p)) = hp {
            return Some(Witness::Heegner(p));
        }
    }
    find_point(d, height_bound).map(Witness::Search)
}

/// Look for points on TorsionCandidate and Indeterminate records, and on Nontorsion
/// records too when `all` is set.
pub fn verify(records: &[ScanRecord], height_bound: u64, all: bool) -> Vec<VerifyRow> {
    let forms = HeegnerConfig::default().newforms();
    records
        .iter()
        .filter(|r| all || r.verdict != Verdict::Nontorsion)
        .map(|r| {
            let witness = witness(r.d, r.verdict, &forms, height_bound);
            VerifyRow {
                d: r.d,
                verdict: r.verdict,
                rank_upper: r.selmer.2,
                status: if witness.is_some() {
                    VerifyStatus::PointFound
                } else {
                    VerifyStatus::Open
                },
                witness,
            }
        })
        .collect()
}

pub fn verify_table(rows: &[VerifyRow]) -> String {
    let mut s = String::from("D\tverdict\trank_upper\tstatus\tsource\tx\n");
    for r in rows {
        let (src, x) = r.witness.as_ref().map_or(("-", "-".to_string()), |w| (w.source(), w.x()));
        let status = match r.status {
            VerifyStatus::PointFound => "point-found",
            VerifyStatus::Open => "open",
        };
        let _ = writeln!(s, "{}\t{}\t{}\t{}\t{}\t{}", r.d, r.verdict, r.rank_upper, status, src, x);
    }
    let found = rows.iter().filter(|r| r.status == VerifyStatus::PointFound).count();
    let _ = writeln!(s, "# total {} point-found {} open {}", rows.len(), found, rows.len() - found);
    s
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassStats {
    pub cls: Class,
    pub scanned: u64,
    pub nontorsion: u64,
    pub torsion_candidates: u64,
    pub indeterminate: u64,
    /// `|D|` in range passing the rank-3 filter, and the number considered.
    pub survivors: u64,
    pub eligible: u64,
}

impl ClassStats {
    pub fn survival_rate(&self) -> f64 {
        if self.eligible == 0 {
            0.0
        } else {
            self.survivors as f64 / self.eligible as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub classes: Vec<ClassStats>,
    /// Per class, `(|D|, cumulative TorsionCandidate count)` at each candidate.
    pub cumulative: BTreeMap<Class, Vec<(u64, u64)>>,
}

/// Bucket statistics; rejects record files with gaps.
pub fn report(file: &RecordFile) -> Result<Report> {
    file.check_complete()?;
    let (lo, hi, classes, mode) = file.claimed()?;
    let mut stats: Vec<ClassStats> = classes
        .iter()
        .map(|&cls| ClassStats {
            cls,
            scanned: 0,
            nontorsion: 0,
            torsion_candidates: 0,
            indeterminate: 0,
            survivors: 0,
            eligible: 0,
        })
        .collect();
    let idx = |c: Class| classes.iter().position(|&x| x == c);
    let mut cumulative: BTreeMap<Class, Vec<(u64, u64)>> = classes.iter().map(|&c| (c, Vec::new())).collect();
    for r in &file.records {
        let Some(i) = idx(r.cls) else {
            return Err(Error::Record(format!("|D| = {} has class {} outside the header", r.d, r.cls)));
        };
        let s = &mut stats[i];
        s.scanned += 1;
        match r.verdict {
            Verdict::Nontorsion => s.nontorsion += 1,
            Verdict::TorsionCandidate => {
                s.torsion_candidates += 1;
                cumulative.get_mut(&r.cls).expect("class present").push((r.d, s.torsion_candidates));
            }
            Verdict::Indeterminate => s.indeterminate += 1,
        }
        if r.passes_rank3() {
            s.survivors += 1;
        }
    }
    let cfg = ScanConfig {
        lo,
        hi,
        classes: classes.clone(),
        ..ScanConfig::default()
    };
    for d in cfg.candidates() {
        if let Some(i) = idx(Class::of_abs(d)) {
            stats[i].eligible += 1;
        }
    }
    if mode == Mode::Full {
        // survivors were counted from the records, which cover every eligible D
        debug_assert!(stats.iter().all(|s| s.scanned == s.eligible));
    }
    Ok(Report { classes: stats, cumulative })
}

impl Report {
    pub fn table(&self) -> String {
        let mut s = String::from("class\tscanned\tNontorsion\tTorsionCandidate\tIndeterminate\tfilter_pass\teligible\tsurvival\n");
        let mut tot = [0u64; 6];
        for c in &self.classes {
            let _ = writeln!(
                s,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{:.4}",
                c.cls,
                c.scanned,
                c.nontorsion,
                c.torsion_candidates,
                c.indeterminate,
                c.survivors,
                c.eligible,
                c.survival_rate()
            );
            for (t, v) in tot.iter_mut().zip([
                c.scanned,
                c.nontorsion,
                c.torsion_candidates,
                c.indeterminate,
                c.survivors,
                c.eligible,
            ]) {
                *t += v;
            }
        }
        let rate = if tot[5] == 0 { 0.0 } else { tot[4] as f64 / tot[5] as f64 };
        let _ = writeln!(
            s,
            "total\t{}\t{}\t{}\t{}\t{}\t{}\t{:.4}",
            tot[0], tot[1], tot[2], tot[3], tot[4], tot[5], rate
        );
        s
    }

    /// Write `cumulative_<class>.tsv` files (two columns: |D| and running count).
    pub fn write_plot_data(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir.display().to_string(), e))?;
        let mut paths = Vec::new();
        for (cls, series) in &self.cumulative {
            let path = dir.join(format!("cumulative_{}.tsv", cls.name()));
            let mut text = String::from("abs_d\tcumulative_torsion_candidates\n");
            for (d, n) in series {
                let _ = writeln!(text, "{d}\t{n}");
            }
            fs::write(&path, text).map_err(|e| Error::io(path.display().to_string(), e))?;
            paths.push(path);
        }
        Ok(paths)
    }
}

/// Fast end-to-end checks of the installed build; returns one line per check.
pub fn selftest() -> Vec<(String, bool)> {
    use crate::arith::count_squarefree_classes;
    use crate::modform::{coefficients_level32, trace_of_frobenius};
    use crate::torus::periods;
    use crate::curves::Parent;

    let mut out = Vec::new();
    let count = count_squarefree_classes(10_000, ResidueSet::odd_sign());
    let brute = (1..10_000u64)
        .filter(|&n| matches!(n % 8, 5..=7) && crate::arith::is_squarefree(n))
        .count() as u64;
    out.push((format!("sieve count below 10^4: {count}"), count == brute));

    let f = coefficients_level32(1000);
    let bad = crate::arith::primes_up_to(999)
        .into_iter()
        .skip(1)
        .filter(|&p| f.a(p as usize) != trace_of_frobenius(-1, p))
        .count();
    out.push((format!("level-32 coefficients vs point counts, p < 1000: {bad} mismatches"), bad == 0));

    let omega = periods(Parent::E1, 128).omega1.to_f64();
    out.push((format!("omega = {omega:.16}"), (omega - 2.622_057_554_292_119_8).abs() < 1e-14));

    let cfg = HeegnerConfig::default();
    let forms = cfg.newforms();
    for d in [5i64, 6, 7] {
        let v = classify(d).and_then(|t| classify_pd(&t, &forms, &cfg));
        let ok = matches!(&v, Ok(c) if c.verdict == Verdict::Nontorsion);
        out.push((format!("D = {d} classifies as Nontorsion"), ok));
    }
    let p = find_point(5, 50);
    out.push(("D = 5 has a rational point".to_string(), p.is_some_and(|p| p.verify())));
    out.push(("D = 1254 passes the rank-3 filter".to_string(), rank3_filter(1254)));
    out
}
