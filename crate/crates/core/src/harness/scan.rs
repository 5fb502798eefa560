use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Check, HarnessError, VerificationRecord};
use crate::toric::{
    census, ldp_enumerate_with, random_complete_fan, toric_mmp, Fan2, FANO_BOUND, NEF_BOUND,
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanConfig {
    /// Coordinate bound for exhaustive enumeration.
    pub bound: i64,
    /// Largest ray count for random fans.
    pub max_rays: usize,
    pub seed: u64,
    pub workers: usize,
    /// Keep one fan per `GL(2,Z)` class in the enumeration.
    pub dedupe: bool,
    pub out: Option<PathBuf>,
    /// Number of random fans drawn; only those with `-K` nef are checked.
    pub random: usize,
    /// Coordinate bound for random fans.
    pub random_bound: i64,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            bound: 2,
            max_rays: 8,
            seed: 0,
            workers: 1,
            dedupe: false,
            out: None,
            random: 1000,
            random_bound: 4,
        }
    }
}

impl ScanConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: &str| Err(HarnessError::Config(m.to_string()));
        if self.bound < 1 {
            return bad("bound must be at least 1");
        }
        if self.workers < 1 {
            return bad("workers must be at least 1");
        }
        if self.max_rays < 3 {
            return bad("max_rays must be at least 3");
        }
        if self.random_bound < 1 {
            return bad("random_bound must be at least 1");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScanSummary {
    pub bound: i64,
    pub enumerated: usize,
    pub random_sampled: usize,
    pub random_nef: usize,
    pub records: usize,
    pub checks: usize,
    pub violations: usize,
    pub violated_claims: Vec<String>,
    /// Largest `n - 2 rho` over every checked fan.
    pub max_excess: Option<i64>,
    pub mmp_steps: usize,
}

#[derive(Debug, Clone)]
pub struct ScanOutput {
    /// Sorted canonically.
    pub records: Vec<VerificationRecord>,
    pub summary: ScanSummary,
}

/// SplitMix64 finalizer, used to derive independent per-index seeds.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Bound checks that apply to the fan, plus the contraction invariant along
/// its toric MMP. Also returns `n - 2 rho` and the number of MMP steps.
pub fn fan_record(f: &Fan2, source: &str) -> (VerificationRecord, i64, usize) {
    let r = census(f);
    let mut checks: Vec<Check> = r
        .bounds
        .iter()
        .map(|b| {
            let id = match b.name.as_str() {
                FANO_BOUND => "fano-singular-bound",
                NEF_BOUND => "nef-singular-bound",
                other => unreachable!("unknown bound {other}"),
            };
            let rel = if b.pass { "<=" } else { ">" };
            Check::new(id, b.pass, format!("{} {rel} {}", b.value, b.limit))
        })
        .collect();
    let run = toric_mmp(f);
    let worst = run
        .steps
        .iter()
        .find(|s| !s.invariant_holds())
        .map(|s| format!("; fails at ray {:?}", s.contracted_ray))
        .unwrap_or_default();
    checks.push(Check::new(
        "mmp-singular-drop",
        run.invariant_holds(),
        format!(
            "{} steps to rho = {}{worst}",
            run.steps.len(),
            run.output.picard_number()
        ),
    ));
    let excess = r.singular_count() as i64 - 2 * r.picard_number as i64;
    let subject = format!(
        "fan {}",
        serde_json::to_string(f.rays()).expect("rays serialize")
    );
    (
        VerificationRecord {
            subject,
            source: source.to_string(),
            checks,
        },
        excess,
        run.steps.len(),
    )
}

/// Exhaustive enumeration plus seeded random fans. Output does not depend on
/// the worker count.
pub fn scan(config: &ScanConfig) -> Result<ScanOutput, HarnessError> {
    config.validate()?;
    let enumerated = ldp_enumerate_with(config.bound, config.workers, config.dedupe);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| HarnessError::Config(e.to_string()))?;
    let (mut rows, random_rows) = pool.install(|| {
        let rows: Vec<_> = enumerated
            .par_iter()
            .map(|f| fan_record(f, "ldp"))
            .collect();
        let random_rows: Vec<_> = (0..config.random)
            .into_par_iter()
            .filter_map(|i| {
                let seed = splitmix64(config.seed ^ splitmix64(i as u64));
                let f = random_complete_fan(seed, config.max_rays, config.random_bound);
                census(&f)
                    .positivity
                    .is_nef()
                    .then(|| fan_record(&f, &format!("random:{i}")))
            })
            .collect();
        (rows, random_rows)
    });
    let random_nef = random_rows.len();
    rows.extend(random_rows);

    let mut violated = BTreeSet::new();
    let mut checks = 0;
    let mut violations = 0;
    let mut mmp_steps = 0;
    let mut max_excess = None;
    for (rec, excess, steps) in &rows {
        checks += rec.checks.len();
        for c in rec.checks.iter().filter(|c| !c.pass) {
            violations += 1;
            violated.insert(c.claim.to_string());
        }
        mmp_steps += steps;
        max_excess = max_excess.max(Some(*excess));
    }
    let mut records: Vec<VerificationRecord> = rows.into_iter().map(|(r, _, _)| r).collect();
    records.sort();
    let summary = ScanSummary {
        bound: config.bound,
        enumerated: enumerated.len(),
        random_sampled: config.random,
        random_nef,
        records: records.len(),
        checks,
        violations,
        violated_claims: violated.into_iter().collect(),
        max_excess,
        mmp_steps,
    };
    if let Some(path) = &config.out {
        let io = |source| HarnessError::Io {
            path: path.display().to_string(),
            source,
        };
        let mut w = BufWriter::new(File::create(path).map_err(io)?);
        write_records(&records, &mut w).map_err(io)?;
        w.flush().map_err(io)?;
    }
    Ok(ScanOutput { records, summary })
}

/// One JSON object per line.
pub fn write_records<W: Write>(records: &[VerificationRecord], w: &mut W) -> std::io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut *w, r)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

pub fn canonical_bytes(records: &[VerificationRecord]) -> Vec<u8> {
    let mut out = Vec::new();
    write_records(records, &mut out).expect("writing to memory");
    out
}
