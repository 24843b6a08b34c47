use std::time::{Duration, Instant};

use semicohen_core::seq::Mode;
use semicohen_core::suites::{self, SeparationBounds, SuiteResult};
use semicohen_core::Truncation;

struct Criterion {
    name: &'static str,
    limit: Option<Duration>,
    run: fn() -> Vec<SuiteResult>,
}

fn amalgamation_scale() -> Vec<SuiteResult> {
    suites::amalgamation_sweep(Mode::Scale, &Truncation::new([0, 1, 2], 2, 3), 3)
}

fn amalgamation_evdiff() -> Vec<SuiteResult> {
    suites::amalgamation_sweep(Mode::EvDiff, &Truncation::new([0, 1, 2], 2, 4), 3)
}

fn projection_monotone() -> Vec<SuiteResult> {
    vec![
        suites::projection_monotone_exhaustive(&[0, 1], 2, 3),
        suites::projection_monotone_random(10_000, 31),
    ]
}

fn lifting() -> Vec<SuiteResult> {
    vec![suites::lift_random(10_000, 32)]
}

fn separativity() -> Vec<SuiteResult> {
    suites::separativity_sweep(&SeparationBounds {
        indices: vec![0, 1, 2],
        max_len: 2,
        max_val: 4,
        env_len: 2,
        env_val: 4,
    })
}

fn isomorphism() -> Vec<SuiteResult> {
    vec![suites::isomorphism_sweep(
        Mode::EvDiff,
        &Truncation::new([0, 1, 2], 2, 3),
    )]
}

fn simulation() -> Vec<SuiteResult> {
    let mut out = suites::simulation_sweep(Mode::Scale, 1..=100, 50);
    out.extend(suites::simulation_sweep(Mode::EvDiff, 1..=100, 50));
    out
}

fn order_axioms() -> Vec<SuiteResult> {
    suites::all_order_axioms(&Truncation::new([0, 1, 2], 2, 3))
}

fn predensity() -> Vec<SuiteResult> {
    vec![suites::predensity_demo(
        &Truncation::new([0], 2, 2),
        &Truncation::new([0, 1], 2, 2),
    )]
}

const CRITERIA: &[Criterion] = &[
    Criterion {
        name: "scale amalgamation sweep",
        limit: Some(Duration::from_secs(120)),
        run: amalgamation_scale,
    },
    Criterion {
        name: "evdiff amalgamation sweep",
        limit: None,
        run: amalgamation_evdiff,
    },
    Criterion {
        name: "projection monotone",
        limit: None,
        run: projection_monotone,
    },
    Criterion {
        name: "lifting below both",
        limit: None,
        run: lifting,
    },
    Criterion {
        name: "residue separativity",
        limit: None,
        run: separativity,
    },
    Criterion {
        name: "flat isomorphism",
        limit: None,
        run: isomorphism,
    },
    Criterion {
        name: "generic simulation",
        limit: Some(Duration::from_secs(60)),
        run: simulation,
    },
    Criterion {
        name: "order axioms",
        limit: None,
        run: order_axioms,
    },
    Criterion {
        name: "predensity of antichains",
        limit: None,
        run: predensity,
    },
];

fn main() {
    let mut failed = 0;
    for c in CRITERIA {
        let start = Instant::now();
        let rows = (c.run)();
        let elapsed = start.elapsed();
        let in_time = c.limit.is_none_or(|l| elapsed <= l);
        let ok = in_time && rows.iter().all(SuiteResult::passed);
        let checked: u64 = rows.iter().map(|r| r.checked).sum();
        let failures: u64 = rows.iter().map(|r| r.failures).sum();
        println!(
            "{} {}: {} checked, {} failed, {:.1}s",
            if ok { "PASS" } else { "FAIL" },
            c.name,
            checked,
            failures,
            elapsed.as_secs_f64()
        );
        for r in &rows {
            if let Some(f) = &r.first_failure {
                println!("    {}: {}", r.name, f);
            }
            if r.checked == 0 {
                println!("    {}: nothing checked", r.name);
            }
        }
        if !in_time {
            println!("    over the time limit of {:?}", c.limit.unwrap());
        }
        if !ok {
            failed += 1;
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
