use std::time::Instant;

use posetnet::suite::{run_criterion, SuiteOptions, CRITERIA};

fn main() {
    let opts = SuiteOptions::default();
    for (i, name) in CRITERIA.iter().enumerate() {
        let t = Instant::now();
        let r = run_criterion(i, &opts);
        println!("{name}: {} checks, passed={} in {:?}", r.checks.len(), r.all_passed(), t.elapsed());
        for f in r.failures().take(5) {
            println!("  {} {:?}", f.name, f.witness);
        }
    }
}
