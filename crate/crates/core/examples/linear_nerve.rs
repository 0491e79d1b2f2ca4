//! Build the linear nerve of a small linear category, check the templicial
//! axioms, then corrupt one structure map and read the witness.

use templike::exactcore::Ring;
use templike::fixtures::{idempotent_category, standard_mutations};
use templike::templicial::linear_nerve;

fn main() -> templike::Result<()> {
    let c = idempotent_category(Ring::Q);
    c.check_laws()?;
    let x = linear_nerve(&c, 4);
    let counts: Vec<usize> = (0..=4).map(|n| x.count(n)).collect();
    println!("generators per level: {counts:?}");
    match x.check() {
        Ok(()) => println!("axioms hold"),
        Err(w) => println!("unexpected failure: {w}"),
    }

    for m in standard_mutations(&x).into_iter().take(3) {
        let y = m.apply(&x)?;
        match y.check() {
            Ok(()) => println!("{} on generator {}: not detected", m.cell.map_name(), m.generator),
            Err(w) => println!("{} on generator {}: {w}", m.cell.map_name(), m.generator),
        }
    }
    Ok(())
}
