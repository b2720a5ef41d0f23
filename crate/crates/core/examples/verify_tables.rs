//! Recompute every row of the embedded class number tables.

use simplest_cubic::scan;

fn main() {
    let checks = scan::verify_tables();
    for c in checks.iter().filter(|c| c.index != Some(1) || !c.passed()) {
        println!(
            "table {} m = {:>8} h = {:>2} index {:>8} u = {:>4}  {}",
            c.table,
            c.m,
            c.h,
            c.index.unwrap_or(0),
            c.unit_index.unwrap_or(0),
            c.failure.as_deref().unwrap_or("ok")
        );
    }
    let passed = checks.iter().filter(|c| c.passed()).count();
    println!("{passed}/{} rows pass", checks.len());
}
