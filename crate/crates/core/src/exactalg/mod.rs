//! Exact scalar and matrix arithmetic over `Z`, `Q`, `F_p` and `F_{p^m}`.

mod field;
mod matrix;
mod scalar;
mod snf;

pub use field::{is_prime, FieldDescriptor, FiniteField};
pub use matrix::Matrix;
pub use scalar::{parse_rational, scalar_from_json, Ring, RingDescriptor, Scalar};
pub use snf::{hermite_basis, integer_rows, lattice_basis, lattice_coordinates, smith_normal_form, smith_of_rows, SmithForm};

/// Builds the field `F_{p^m}` with its canonical modulus.
pub fn ffield_make(p: u64, m: u32) -> crate::error::Result<FiniteField> {
    FiniteField::new(p, m)
}
