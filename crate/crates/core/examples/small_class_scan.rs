//! Small class numbers by index and conductor shape.
//!
//! `cargo run --release --example small_class_scan -- 27 1000`

use simplest_cubic::scan;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let index: u32 = args.first().map_or(27, |a| a.parse().expect("1, 3 or 27"));
    let hmax: u64 = args.get(1).map_or(100, |a| a.parse().expect("integer"));
    let (lo, hi) = scan::default_range(index, hmax as f64).expect("index");
    let (rows, summary) = scan::scan_small_class(lo, hi, &[index], None, hmax).expect("scan");
    for r in &rows {
        let sub = r.subcase.map_or("special".to_string(), |s| s.to_string());
        println!("{:>6} {:>12} {:>4} {sub}", r.m, r.value, r.h.map_or("?".into(), |h| h.to_string()));
    }
    println!("{} rows for m in {lo}..={hi}, buckets {:?}", summary.total, summary.buckets);
}
