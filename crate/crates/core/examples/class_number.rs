//! Class numbers through the analytic class number formula.
//!
//! `cargo run --example class_number -- 64 31 12`

use simplest_cubic::classno;

fn main() {
    let ms: Vec<i64> = std::env::args().skip(1).map(|a| a.parse().expect("integer m")).collect();
    let ms = if ms.is_empty() { vec![-1, 11, 16, 31, 64, 12, 336] } else { ms };
    for m in ms {
        match classno::class_number(m) {
            Ok(r) => println!(
                "m = {:>6}  f = {:>8}  Reg(E) = {:>10.6}  |L|² = {:.6}  H_raw = {:>10.6}  u = {:>3}  h = {}",
                r.field.m,
                r.field.conductor,
                r.reg_e,
                r.l_value.abs_squared,
                r.h_raw,
                r.unit_index,
                r.h.unwrap()
            ),
            Err(e) => println!("m = {m}: {e}"),
        }
    }
}
