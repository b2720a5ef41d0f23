//! Solutions of F_m(x, y) = λ with λ | m² + 3m + 9, grouped by orbit.
//!
//! `cargo run --example thue_solutions -- -1 2000`

use simplest_cubic::thue;

fn main() {
    let args: Vec<i64> = std::env::args().skip(1).map(|a| a.parse().expect("integer")).collect();
    let m = args.first().copied().unwrap_or(-1);
    let bound = args.get(1).copied().unwrap_or(thue::DEFAULT_BOUND);
    let lambdas = thue::divisor_lambdas(m).expect("divisors");
    println!("m = {m}, λ ∈ {lambdas:?}, |x|, |y| ≤ {bound}");
    let mut orbit = None;
    for s in thue::solve_bounded(m, &lambdas, bound) {
        if orbit != Some(s.orbit_id) {
            println!("orbit {:?}:", s.orbit_id);
            orbit = Some(s.orbit_id);
        }
        let target = thue::coincidence_target(m, s.x, s.y).map(|(_, n)| format!("L_{m} = L_{n}")).unwrap_or_default();
        println!("  ({:>5}, {:>5})  λ = {:<4} {} {target}", s.x, s.y, s.lambda, if s.trivial { "trivial" } else { "" });
    }
}
