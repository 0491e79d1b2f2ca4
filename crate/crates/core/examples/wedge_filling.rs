//! Two simplicial sets that are not quasi-categories. The glued one still
//! carries a Frobenius structure; the other lifts every wedge although an
//! inner horn does not fill.

use templike::exactcore::Ring;
use templike::fixtures::{glued_naf, glued_simplex, simplex_with_extra_face, GLUED_HORN};
use templike::frobenius::transfer_naf_free;

fn main() -> templike::Result<()> {
    let y = glued_simplex(4)?;
    let z = glued_naf(4)?;
    println!("face constraints: {:?}", z.check_face_constraints().is_ok());
    let lin = transfer_naf_free(&z, Ring::Q);
    println!("linearized structure valid: {}", lin.check_naf().is_ok());
    println!("Frobenius relations: {}", lin.check_frobenius().is_ok());

    let idx: Vec<usize> = GLUED_HORN.iter().map(|s| y.index_of(2, s).expect("triangle")).collect();
    let fillers = y.fillers(3, &[0, 2, 3], &idx);
    println!("horn {GLUED_HORN:?} has {} fillers", fillers.len());

    let e = simplex_with_extra_face(4)?;
    println!("extra face: unliftable wedge {:?}", e.first_unliftable_wedge(4)?);
    println!("extra face: unfillable horn {:?}", e.first_unfillable_inner_horn(3)?);
    Ok(())
}
