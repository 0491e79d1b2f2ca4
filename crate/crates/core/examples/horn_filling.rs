//! Put a Frobenius structure on the free templicial module of `Δ³` and fill
//! every inner horn in dimensions 2 and 3.

use templike::exactcore::Ring;
use templike::frobenius::{fill_inner_horn, naf_on_quasicategory, transfer_naf_free, HornData};
use templike::simplicial::standard_simplex;

fn main() -> templike::Result<()> {
    let y = standard_simplex(3, 4);
    let z = transfer_naf_free(&naf_on_quasicategory(&y)?, Ring::Q);
    for n in 2..=3 {
        for k in 1..n {
            let horns = y.horns(n, k);
            let mut filled = 0;
            for fam in &horns {
                let h = HornData::from_simplices(&y, n, k, fam, Ring::Q);
                let s = fill_inner_horn(&z, &h).map_err(|w| templike::Error::Invariant(w.to_string()))?;
                if s.validate(&z.host).is_ok() {
                    filled += 1;
                }
            }
            println!("Λ^{n}_{k}: {filled}/{} horns filled", horns.len());
        }
    }
    Ok(())
}
