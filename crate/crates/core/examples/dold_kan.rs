//! Augmented Dold-Kan: Γ of a random chain complex, its normalization, and the
//! join/tensor comparison on standard simplices.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use templike::doldkan::{check_monoidal_associativity, counit, gamma, monoidal_iso, normalize, AugSimplicial, ChainComplex};
use templike::exactcore::Ring;

fn main() -> templike::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let c = ChainComplex::random(Ring::Q, 3, 2, &mut rng);
    println!("chain ranks: {:?}", (0..=c.dim()).map(|n| c.rank(n)).collect::<Vec<_>>());
    let g = gamma(&c)?;
    println!("Γ(C) ranks from level -1: {:?}", (-1..=g.module.top).map(|l| g.module.rank(l)).collect::<Vec<_>>());
    let n = normalize(&g.module)?;
    let e = counit(&g, &n);
    println!("N Γ(C) ≅ C: {}", e.is_iso(&n.complex, &c)?);

    let a = AugSimplicial::free_simplex(1, 3, Ring::Q);
    let b = AugSimplicial::free_simplex(0, 3, Ring::Q);
    let j = a.join(&b);
    let (na, nb, nj) = (normalize(&a)?, normalize(&b)?, normalize(&j.module)?);
    let t = na.complex.tensor(&nb.complex);
    let mu = monoidal_iso(&j, &nj, &na, &nb, &t);
    println!("N(Δ¹ ⋆ Δ⁰) ≅ N(Δ¹) ⊗ N(Δ⁰): {}", mu.is_iso(&nj.complex, &t.complex)?);
    println!("associativity: {}", check_monoidal_associativity(&a, &b, &a)?.is_ok());
    Ok(())
}
