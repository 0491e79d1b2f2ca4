//! Homotopy categories of a quasi-category and of its free templicial module.

use templike::exactcore::Ring;
use templike::fixtures::two_triangle_coskeleton;
use templike::simplicial::homotopy_category;
use templike::templicial::{check_free_homotopy, free_templicial, linear_homotopy_category};

fn main() -> templike::Result<()> {
    let y = two_triangle_coskeleton(4)?;
    let (h, _) = homotopy_category(&y)?;
    println!("ho(Y): {} objects, {} morphisms", h.objects.len(), h.morphisms.len());
    let lh = linear_homotopy_category(&free_templicial(&y, Ring::Q))?;
    println!("ho of the free module: {} basis arrows", lh.category.arrows.len());
    println!("free linearization of ho(Y) agrees: {}", check_free_homotopy(&y, Ring::Q)?.is_ok());
    Ok(())
}
