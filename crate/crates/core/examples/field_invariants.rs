//! Discriminant, conductor and index of L_m.
//!
//! `cargo run --example field_invariants -- 12 40 2389`

use simplest_cubic::field;

fn main() {
    let ms: Vec<i64> = std::env::args().skip(1).map(|a| a.parse().expect("integer m")).collect();
    let ms = if ms.is_empty() { vec![-1, 0, 3, 12, 40, 506370] } else { ms };
    println!("{:>8} {:>14} {:>24} {:>10} {:>6} {:>3}", "m", "D", "D factored", "f", "index", "r3");
    for m in ms {
        let f = field::build_field(m).expect("field");
        println!(
            "{:>8} {:>14} {:>24} {:>10} {:>6} {:>3}",
            f.m, f.d, f.d_factors.to_string(), f.conductor, f.index, f.r3
        );
        let roots = field::real_roots(f.m, 53).as_f64();
        let (n0, n1, n2) = field::norm_identities(&roots);
        println!("         roots {roots:.6?}  N(α)={n0:.3} N(α+1)={n1:.3} N(α−1)={n2:.3}");
    }
}
