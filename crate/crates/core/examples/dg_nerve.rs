//! Linear dg-nerves: the Frobenius structure on the nerve of a dg-category,
//! its homotopy category, and sampled comparisons with the templicial side.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use templike::dgcat::{check_homotopy_category, dg_fixtures, linear_dg_nerve, Comparison, SSimplex};
use templike::exactcore::Ring;

fn main() -> templike::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (name, c) in dg_fixtures(Ring::Q, 3) {
        let (_, t) = linear_dg_nerve(&c)?;
        let h = c.h_zero()?;
        println!("{name}: H0 has {} arrows, Frobenius {}", h.category.arrows.len(), t.naf.check_frobenius().is_ok());
        println!("  homotopy category matches: {}", check_homotopy_category(&c)?.is_ok());
        let cmp = Comparison::new(&c)?;
        let ok = (0..10).filter(|t| {
            let s = SSimplex::random(&cmp.sharp.monoid, 1 + t % 3, 2, &mut rng);
            matches!(cmp.check_simplex(&s), Ok(Ok(())))
        });
        println!("  sampled simplices agreeing: {}/10", ok.count());
    }
    Ok(())
}
