//! Fields with class number below 16 over a range of m.
//!
//! `cargo run --release --example h16_scan -- -1 20000`

use simplest_cubic::scan;

fn main() {
    let args: Vec<i64> = std::env::args().skip(1).map(|a| a.parse().expect("integer bound")).collect();
    let (lo, hi) = match args[..] {
        [lo, hi] => (lo, hi),
        [hi] => (-1, hi),
        _ => (-1, 20_000),
    };
    let mut progress = |m: i64, computed: usize| eprintln!("through m = {m}: {computed} fields computed");
    let (rows, summary) = scan::scan_h_below_16(lo, hi, true, Some(&mut progress)).expect("scan");
    for r in &rows {
        println!("{:>9} {:>3} {:>12} {}", r.m, r.h.map_or("?".into(), |h| h.to_string()), r.conductor, r.d_factors);
    }
    println!("{} rows, buckets {:?}, {} computed, {:.1?}", summary.total, summary.buckets, summary.computed, summary.runtime);
}
