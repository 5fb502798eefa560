use std::collections::BTreeMap;

use num_integer::Integer;
use serde::Serialize;

use super::scan::fan_record;
use super::{claim, ScanConfig, CLAIMS};
use crate::fan_census::{census as fan_census, fixture_library};
use crate::surface::scenario::{
    scenario_double_blowup_on, scenario_fiber_contraction_on, ScenarioReport, VPattern,
};
use crate::surface::{chain_discrepancies_on, SurfaceModel};
use crate::toric::{census, parabola_fan, resolve_singularity, Positivity, QuotientSingularity};
use crate::wps::{audit_family, family_orders};

const KEPT_WITNESSES: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClaimOutcome {
    pub claim: &'static str,
    pub anchor: &'static str,
    pub relation: &'static str,
    pub cases: usize,
    pub failed: usize,
    pub pass: bool,
    /// First few failing cases.
    pub witnesses: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub outcomes: Vec<ClaimOutcome>,
    pub all_pass: bool,
}

impl SuiteReport {
    pub fn failing_claims(&self) -> Vec<&'static str> {
        self.outcomes
            .iter()
            .filter(|o| !o.pass)
            .map(|o| o.claim)
            .collect()
    }
}

#[derive(Default)]
struct Tally(BTreeMap<&'static str, (usize, usize, Vec<String>)>);

impl Tally {
    fn record(&mut self, id: &str, pass: bool, witness: impl FnOnce() -> String) {
        let e = self.0.entry(claim(id).id).or_default();
        e.0 += 1;
        if !pass {
            e.1 += 1;
            if e.2.len() < KEPT_WITNESSES {
                e.2.push(witness());
            }
        }
    }

    fn finish(self) -> SuiteReport {
        let outcomes: Vec<ClaimOutcome> = CLAIMS
            .iter()
            .map(|c| {
                let (cases, failed, witnesses) = self.0.get(c.id).cloned().unwrap_or_default();
                ClaimOutcome {
                    claim: c.id,
                    anchor: c.anchor,
                    relation: c.relation,
                    cases,
                    failed,
                    // a claim that was never exercised does not pass
                    pass: cases > 0 && failed == 0,
                    witnesses: if cases == 0 {
                        vec!["no cases ran".into()]
                    } else {
                        witnesses
                    },
                }
            })
            .collect();
        let all_pass = outcomes.iter().all(|o| o.pass);
        SuiteReport { outcomes, all_pass }
    }
}

fn scenario_groups(t: &mut Tally, subject: &str, r: &ScenarioReport, groups: &[(&str, &str)]) {
    for &(group, id) in groups {
        let bad: Vec<String> = r
            .identities
            .iter()
            .filter(|i| i.group == group && !i.equal)
            .map(|i| format!("{} vs {}", i.lhs, i.rhs))
            .collect();
        let present = r.identities.iter().any(|i| i.group == group);
        t.record(id, present && bad.is_empty(), || {
            if present {
                format!("{subject}: {}", bad.join("; "))
            } else {
                format!("{subject}: no identities in group {group}")
            }
        });
    }
}

fn double_blowup_groups(p: &VPattern) -> Vec<(&'static str, &'static str)> {
    let (n, blocks) = (p.n(), p.blocks().len());
    let mut g = vec![("points", "double-blowup-a1-points")];
    if blocks == 1 {
        g.push(("effective", "double-blowup-effective-anticanonical"));
    }
    if n == 4 && blocks == 2 {
        g.push(("calabi-yau", "double-blowup-log-calabi-yau"));
    }
    if n == 3 && blocks == 3 {
        g.push(("fano", "double-blowup-fano-optimal"));
    }
    g
}

const FIBER_CONTRACTION_GROUPS: &[(&str, &str)] = &[
    ("discrepancy", "fiber-contraction-log-discrepancy"),
    ("points", "fiber-contraction-point-count"),
    ("class", "fiber-contraction-class-identity"),
];

/// Golden checks for every registered claim, with surface scenarios built on
/// the quadric.
pub fn golden_suite() -> SuiteReport {
    golden_suite_on(&SurfaceModel::start_quadric())
}

/// As [`golden_suite`], building the surface scenarios and resolution chains
/// on `base`, which must track fiber classes `L` and `R`.
pub fn golden_suite_on(base: &SurfaceModel) -> SuiteReport {
    let mut t = Tally::default();

    for n in 2..=200 {
        let f = parabola_fan(n).expect("n >= 2");
        let r = census(&f);
        let ok = r.positivity == Positivity::Ample
            && r.picard_number as i64 == n
            && r.singular_count() as i64 == n;
        t.record("toric-family-count", ok, || {
            format!(
                "n = {n}: {:?}, rho = {}, {} singular",
                r.positivity,
                r.picard_number,
                r.singular_count()
            )
        });
        let (rec, _, _) = fan_record(&f, "family");
        for c in rec.checks {
            t.record(c.claim, c.pass, || format!("family n = {n}: {}", c.witness));
        }
    }

    let scan_cfg = ScanConfig {
        bound: 2,
        random: 2000,
        ..ScanConfig::default()
    };
    match super::scan(&scan_cfg) {
        Ok(out) => {
            for rec in &out.records {
                for c in &rec.checks {
                    t.record(c.claim, c.pass, || {
                        format!("{} ({}): {}", rec.subject, rec.source, c.witness)
                    });
                }
            }
        }
        Err(e) => t.record("fano-singular-bound", false, || e.to_string()),
    }

    let mut patterns = Vec::new();
    for n in 1..=20 {
        patterns.push(VPattern::all_equal(n));
        if n > 1 {
            patterns.push(VPattern::all_distinct(n));
        }
    }
    for n in 2..=4 {
        patterns.extend(VPattern::all(n));
    }
    patterns.sort();
    patterns.dedup();
    for p in &patterns {
        let subject = format!("double-blowup pattern {p}");
        match scenario_double_blowup_on(base, p) {
            Ok((_, _, r)) => scenario_groups(&mut t, &subject, &r, &double_blowup_groups(p)),
            Err(e) => {
                for (_, id) in double_blowup_groups(p) {
                    t.record(id, false, || format!("{subject}: {e}"));
                }
            }
        }
    }

    for n in 3..=50 {
        let subject = format!("fiber-contraction n = {n}");
        match scenario_fiber_contraction_on(base, n) {
            Ok(r) => scenario_groups(&mut t, &subject, &r, FIBER_CONTRACTION_GROUPS),
            Err(e) => {
                for (_, id) in FIBER_CONTRACTION_GROUPS {
                    t.record(id, false, || format!("{subject}: {e}"));
                }
            }
        }
    }

    for r in 2..=50u64 {
        for a in (1..r).filter(|a| a.gcd(&r) == 1) {
            let q = QuotientSingularity::new(r, a).expect("coprime");
            let res = resolve_singularity(&q).expect("singular");
            let other = chain_discrepancies_on(base, &res.chain);
            let ok = other.as_ref().is_ok_and(|d| *d == res.discrepancies);
            t.record("hj-cross-check", ok, || {
                format!("{q}: chain {:?} gives {other:?}", res.chain)
            });
        }
    }

    for (name, f) in fixture_library() {
        let r = fan_census(&f);
        t.record("fan-census-euler", r.euler_ok, || {
            format!("{name}: chi = {}", r.euler_characteristic)
        });
        t.record(
            "fan-census-binomial",
            r.binomial_ok && r.picard_identity,
            || format!("{name}: counts {:?}", r.counts),
        );
    }

    for k in 1..=100 {
        let r = audit_family(k).expect("k >= 1");
        let ok = r.total == 2 * k + 3 && r.orders == family_orders(k) && r.flagged == 0;
        t.record("wps-family-count", ok, || {
            format!("k = {k}: total {}, orders {:?}", r.total, r.orders)
        });
    }

    t.finish()
}
