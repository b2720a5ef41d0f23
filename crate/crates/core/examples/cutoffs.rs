//! Where the analytic lower bounds for h pass a given value.

use simplest_cubic::analytic::{self, BoundKind};

fn main() {
    let hmax: f64 = std::env::args().nth(1).map_or(1000.0, |a| a.parse().expect("number"));
    for index in [1, 3, 27] {
        for kind in [BoundKind::Louboutin, BoundKind::Lettl] {
            let c = analytic::threshold_m(kind, index, hmax).expect("cutoff");
            println!("index {index:>2} {:<9}  h > {hmax} from m = {:>6}  (bound {:.6})", format!("{kind:?}"), c.m, c.bound_at_m);
        }
    }
}
