//! The cubic character attached to L_m and three routes to |L(1, χ)|².

use simplest_cubic::{analytic, character, field};

fn main() {
    let m: i64 = std::env::args().nth(1).map_or(13, |a| a.parse().expect("integer m"));
    let f = field::build_field(m).expect("field");
    let pairs = character::enumerate_pairs(f.conductor).expect("characters");
    println!("m = {m}: conductor {} carries {} character pairs", f.conductor, pairs.len());
    let chi = character::select_for_field(&f).expect("character");
    println!("selected class {}; components:", chi.class_id);
    for c in &chi.components {
        println!("  modulus {:>6}  exponent {}", c.modulus, c.exponent);
    }
    let q: Vec<u64> = simplest_cubic::arith::primes_up_to(60).into_iter().filter(|&q| (3 * f.d) % q as u128 != 0).collect();
    for q in q {
        println!("  χ({q:>2}) = {:?}  roots of f_m mod {q}: {}", chi.evaluate(false, q as i128), character::roots_mod(m, q));
    }
    let fast = analytic::l1_abs_squared(&chi).expect("finite sum");
    let wide = analytic::l1_abs_squared_wide(&chi).expect("finite sum");
    let euler = analytic::l1_euler_product(&chi, analytic::EULER_PRIME_LIMIT);
    println!("|L(1,χ)|²: finite sum {:.12}, double-double {:.12}, Euler product {:.4}", fast.abs_squared, wide.abs_squared, euler.abs_squared);
}
