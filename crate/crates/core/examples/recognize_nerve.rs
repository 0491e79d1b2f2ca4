//! Recover a linear category from its nerve, and watch the recognizer reject
//! the free templicial module of a quasi-category that is not a nerve.

use templike::exactcore::Ring;
use templike::fixtures::{span_category, two_triangle_coskeleton};
use templike::templicial::{free_templicial, linear_nerve, strong_monoidal_recognize};

fn main() -> templike::Result<()> {
    let c = span_category(Ring::Q);
    let x = linear_nerve(&c, 4);
    match strong_monoidal_recognize(&x)? {
        Ok((found, iso)) => {
            println!("recognized {} objects, {} arrows", found.objects.len(), found.arrows.len());
            println!("comparison map valid: {}", iso.check(&x, &linear_nerve(&found, 4)).is_ok());
        }
        Err(w) => println!("not a nerve: {w}"),
    }

    let y = free_templicial(&two_triangle_coskeleton(4)?, Ring::Q);
    match strong_monoidal_recognize(&y)? {
        Ok(_) => println!("coskeleton accepted (unexpected)"),
        Err(w) => println!("coskeleton rejected: {w}"),
    }
    Ok(())
}
