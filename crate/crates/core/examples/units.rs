//! Regulator of ⟨−1, α, α+1⟩ and its index in the full unit group.

use simplest_cubic::{field, units};

fn main() {
    let ms: Vec<i64> = std::env::args().skip(1).map(|a| a.parse().expect("integer m")).collect();
    let ms = if ms.is_empty() { vec![-1, 3, 5, 12, 54, 66, 1259, 2389] } else { ms };
    for m in ms {
        let f = field::build_field(m).expect("field");
        let r = units::regulator_e(m, 106);
        let u = units::unit_index(&f).expect("unit index");
        println!(
            "m = {:>5}  index {:>4}  Reg(E) = {:>12.8}  u = {:>3}  R = {:>10.8}  (R ≥ {:.4})",
            f.m, f.index, r.reg_e, u.u, u.regulator, u.lower_bound
        );
    }
}
