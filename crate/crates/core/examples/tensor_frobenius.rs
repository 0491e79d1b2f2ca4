//! The tensor construction on a graded quiver, its kernel, and the
//! comparison maps between them.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use templike::exactcore::Ring;
use templike::tensorfrob::{check_graded_frobenius, check_kt_graded, epsilon_phi, tensor_graded, GradedQuiver};

fn main() -> templike::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let v = GradedQuiver::random(Ring::Q, 2, 3, 2, &mut rng);
    let t = tensor_graded(&v);
    let counts: Vec<usize> = (0..=3).map(|n| t.naf.host.count(n)).collect();
    println!("T(V) generators per level: {counts:?}");
    println!("Frobenius relations: {}", check_graded_frobenius(&t.naf).is_ok());
    println!("K(T(V)) recovers V: {}", check_kt_graded(&v)?.is_ok());
    let eq = epsilon_phi(&t.naf, false)?;
    println!("ε and φ are inverse: {}", eq.check(&t.naf).is_ok());
    Ok(())
}
