//! Tail probabilities of the chi-square, F and t distributions.
//!
//! cargo run --example p_values

use harmonium::stats::{chisq_sf, f_sf, t_sf, t_two_sided};

fn main() {
    println!("chisq_sf(27.829, 7)    = {:.7}", chisq_sf(27.829, 7.0));
    println!("chisq_sf(33.062, 13)   = {:.7}", chisq_sf(33.062, 13.0));
    println!("f_sf(9.504, 6, 15)     = {:.7}", f_sf(9.504, 6.0, 15.0));
    println!("t_sf(2.0, 10)          = {:.7}", t_sf(2.0, 10.0));
    println!("t_two_sided(3.376, 9)  = {:.7}", t_two_sided(3.376, 9.0));
    println!();
    println!("{:>6} {:>14} {:>14}", "x", "chisq_sf(x,2)", "exp(-x/2)");
    for x in [0.5, 2.0, 8.0, 30.0] {
        println!("{x:>6} {:>14.6e} {:>14.6e}", chisq_sf(x, 2.0), (-x / 2.0f64).exp());
    }
}
