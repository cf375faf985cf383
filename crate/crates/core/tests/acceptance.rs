//! The eight acceptance criteria, each run at its stated scale and
//! tolerance. Prints one line per criterion.

use std::time::{Duration, Instant};

use convex_radii::harness::{run_suite, Row, Suite, SuiteConfig};

struct Criterion {
    id: usize,
    name: &'static str,
    suite: Suite,
    n_max: usize,
    samples: usize,
    /// Extra condition on the full row set, with a description.
    extra: fn(&[Row]) -> Result<(), String>,
    budget: Option<Duration>,
}

fn cases(rows: &[Row]) -> usize {
    let mut ids: Vec<&str> = rows.iter().map(|r| r.case_id.as_str()).collect();
    ids.dedup();
    ids.len()
}

fn has(rows: &[Row], prefix: &str) -> bool {
    rows.iter().any(|r| r.case_id.starts_with(prefix))
}

fn require(ok: bool, what: &str) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what.to_string())
    }
}

fn count(rows: &[Row], prefix: &str) -> usize {
    cases(&rows.iter().filter(|r| r.case_id.starts_with(prefix)).cloned().collect::<Vec<_>>())
}

const CRITERIA: [Criterion; 8] = [
    Criterion {
        id: 1,
        name: "john identities",
        suite: Suite::JohnIdentities,
        n_max: 6,
        samples: 200,
        extra: |rows| require(cases(rows) >= 200, "fewer than 200 parameter combinations"),
        budget: Some(Duration::from_secs(30)),
    },
    Criterion {
        id: 2,
        name: "outer bound",
        suite: Suite::OuterBound,
        n_max: 4,
        samples: 20,
        extra: |rows| {
            require(
                has(rows, "family/n3/") && has(rows, "family/n4/") && count(rows, "family/n4/k1/") == 50,
                "missing 50-point t-grids for n = 3, 4",
            )?;
            require(
                ["simplex/n2/k1", "simplex/n4/k1", "simplex/n4/k3"].iter().all(|p| has(rows, p)),
                "missing exceptional simplex cases",
            )
        },
        budget: None,
    },
    Criterion {
        id: 3,
        name: "inner bound",
        suite: Suite::InnerBound,
        n_max: 6,
        samples: 500,
        extra: |rows| {
            require(count(rows, "random/") == 500, "expected 500 random bodies")?;
            for family in ["high-asym", "mid-asym", "small-asym"] {
                require(has(rows, family), family)?;
            }
            require(
                rows.iter().any(|r| r.quantity == "k-ball center norm squared")
                    && rows.iter().any(|r| r.quantity == "carrier perpendicularity"),
                "missing equality certificates",
            )
        },
        budget: None,
    },
    Criterion {
        id: 4,
        name: "planar diameter",
        suite: Suite::PlanarDiameter,
        n_max: 2,
        samples: 200,
        extra: |rows| {
            require(count(rows, "small-asym/") == 21, "expected a 21-point s-grid")?;
            require(count(rows, "random/") == 200, "expected 200 random planar bodies")
        },
        budget: None,
    },
    Criterion {
        id: 5,
        name: "scalar lemmas",
        suite: Suite::ScalarLemmas,
        n_max: 6,
        samples: 0,
        extra: |rows| require(count(rows, "planar/") == 9, "expected s = 1.1, ..., 1.9"),
        budget: None,
    },
    Criterion {
        id: 6,
        name: "rounding",
        suite: Suite::Rounding,
        n_max: 4,
        samples: 20,
        extra: |rows| {
            require(
                (2..=4).all(|n| count(rows, &format!("spindle/n{n}/")) == 9 && has(rows, &format!("gap/n{n}"))),
                "expected 9-point s-grids and gap rows for n = 2, 3, 4",
            )
        },
        budget: None,
    },
    Criterion {
        id: 7,
        name: "affine ratios",
        suite: Suite::AffineRatios,
        n_max: 3,
        samples: 50,
        extra: |rows| {
            require(count(rows, "difference/") == 5, "expected 5 values of lambda")?;
            require(count(rows, "random-pair/") == 50, "expected 50 random planar pairs")?;
            require(
                ["simplex/n2", "simplex/n3", "cube/n3", "cross-polytope/n3"].iter().all(|p| has(rows, p)),
                "missing regular bodies",
            )
        },
        budget: None,
    },
    Criterion {
        id: 8,
        name: "proof-level oracles",
        suite: Suite::Oracles,
        n_max: 5,
        samples: 100,
        extra: |rows| {
            require(count(rows, "ball-lemma/") * 100 >= 10_000, "fewer than 10^4 ball-lemma instances")?;
            require(count(rows, "john-vectors/") * 100 >= 10_000, "fewer than 10^4 point pairs")?;
            require(count(rows, "equality/") >= 1, "missing equality instances")
        },
        budget: None,
    },
];

fn run(c: &Criterion) -> bool {
    let cfg = SuiteConfig { n_max: c.n_max, samples: c.samples, seed: 2024, ..SuiteConfig::new(c.suite) };
    let start = Instant::now();
    let rows = match run_suite(&cfg) {
        Ok(rows) => rows,
        Err(e) => {
            println!("criterion {} {}: FAIL ({e})", c.id, c.name);
            return false;
        }
    };
    let elapsed = start.elapsed();
    let failed: Vec<&Row> = rows.iter().filter(|r| !r.pass).collect();
    let mut problems: Vec<String> = failed
        .iter()
        .take(5)
        .map(|r| format!("{} {}: measured {} bound {}", r.case_id, r.quantity, r.measured, r.bound))
        .collect();
    if let Err(e) = (c.extra)(&rows) {
        problems.push(e);
    }
    if let Some(budget) = c.budget {
        if elapsed > budget {
            problems.push(format!("took {:.1}s, budget {}s", elapsed.as_secs_f64(), budget.as_secs()));
        }
    }
    let pass = failed.is_empty() && problems.is_empty();
    println!(
        "criterion {} {}: {} ({} rows over {} cases, {} failed, {:.1}s)",
        c.id,
        c.name,
        if pass { "PASS" } else { "FAIL" },
        rows.len(),
        cases(&rows),
        failed.len(),
        elapsed.as_secs_f64()
    );
    for p in &problems {
        println!("    {p}");
    }
    pass
}

#[test]
fn acceptance() {
    let results: Vec<bool> = CRITERIA.iter().map(run).collect();
    let failed: Vec<usize> = CRITERIA.iter().zip(&results).filter(|(_, ok)| !**ok).map(|(c, _)| c.id).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
