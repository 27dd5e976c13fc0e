//! Critical values from the p-value machinery.
//!
//!     cargo run --example special_functions

use intrinsic_time::numerics::{chi2_sf, kolmogorov_sf, t_sf_two_sided};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!("chi2(5)  > 11.0705 : {:.6}", chi2_sf(11.0705, 5)?.value());
    println!("|t(10)|  > 2.228   : {:.6}", t_sf_two_sided(2.228, 10)?.value());
    println!("KS n=1e4 d=0.013581: {:.6}", kolmogorov_sf(0.013581, 10_000).value());
    Ok(())
}
