//! Symmetric tensors in canonical storage: construction, the orthogonal
//! group action, and Frobenius geometry.
//!
//! ```text
//! cargo run --example tensor_basics
//! ```

use nalgebra::{DMatrix, DVector};
use pmica::optim::OrthoMatrix;
use pmica::symtensor::{canonical_entry_count, SymTensor};

fn main() -> pmica::Result<()> {
    // An order-4 tensor on R^3 stores binomial(6, 4) = 15 canonical entries
    // instead of 3^4 = 81 dense ones.
    println!(
        "canonical entries for d = 4, n = 3: {} (dense: 81)",
        canonical_entry_count(3, 4)
    );

    // T = 3 v1^(x)4 + 1 v2^(x)4 + 0.5 v3^(x)4 for an orthonormal basis v_i.
    let basis = OrthoMatrix::new(DMatrix::from_row_slice(
        3,
        3,
        &[
            0.8, -0.6, 0.0, //
            0.6, 0.8, 0.0, //
            0.0, 0.0, 1.0,
        ],
    ))?;
    let terms: Vec<(f64, DVector<f64>)> = [3.0, 1.0, 0.5]
        .iter()
        .enumerate()
        .map(|(j, &weight)| (weight, basis.matrix().column(j).into_owned()))
        .collect();
    let t = SymTensor::rank_one_sum(&terms, 4)?;
    println!("||T||_F = {:.6}", t.frobenius_norm());

    // Undoing the basis rotation diagonalizes the tensor.
    let unrotated = basis.act_transpose(&t)?;
    println!("diagonal after unrotation: {:?}", unrotated.diagonal_entries());

    // The action preserves the Frobenius norm.
    println!(
        "||Q'.T||_F - ||T||_F = {:.2e}",
        unrotated.frobenius_norm() - t.frobenius_norm()
    );

    // Entries are looked up by any index order.
    println!(
        "T[0,1,2,1] = {:.6} = T[2,1,1,0] = {:.6}",
        t.entry(&[0, 1, 2, 1]),
        t.entry(&[2, 1, 1, 0])
    );

    // Text serialization round-trips bit-exactly.
    let mut buf = Vec::new();
    t.write_text(&mut buf)?;
    let back = SymTensor::read_text(std::io::Cursor::new(&buf))?;
    println!("text round-trip exact: {}", back == t);
    Ok(())
}
