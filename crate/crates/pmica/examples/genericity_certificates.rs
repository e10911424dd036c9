//! Identifiability certificates: which patterned tensors have a unique
//! orthogonal eigenbasis, and what breaks when they do not.
//!
//! ```text
//! cargo run --example genericity_certificates
//! ```

use pmica::genericity::{binary_slice, is_generic_diag, is_generic_pmi, GENERICITY_TOL};
use pmica::symtensor::SymTensor;
use pmica::Error;

fn diag_tensor(d: usize, diag: &[f64]) -> SymTensor {
    let mut t = SymTensor::zeros(d, diag.len()).unwrap();
    for (i, &v) in diag.iter().enumerate() {
        t.set_entry(&vec![i; d], v);
    }
    t
}

fn main() -> pmica::Result<()> {
    // order 4: distinct diagonal entries certify uniqueness
    let good = diag_tensor(4, &[1.0, 2.0, 3.0]);
    let report = is_generic_pmi(&good, GENERICITY_TOL)?;
    println!(
        "diag(1,2,3), d=4: generic = {}, margin = {:.3}",
        report.generic, report.margin
    );

    let bad = diag_tensor(4, &[1.0, 1.0, 3.0]);
    let report = is_generic_pmi(&bad, GENERICITY_TOL)?;
    let w = report.witness.unwrap();
    println!(
        "diag(1,1,3), d=4: generic = {}, witness pair {:?}: {}",
        report.generic, w.pair, w.condition
    );

    // order 3: at most one vanishing diagonal entry is allowed
    for diag in [[0.0, 5.0], [0.0, 0.0]] {
        let t = diag_tensor(3, &diag);
        let report = is_generic_pmi(&t, GENERICITY_TOL)?;
        println!("diag{diag:?}, d=3: generic = {}", report.generic);
    }

    // order 5 needs a genuine polynomial condition on the pair slices
    let mut quintic = SymTensor::zeros(5, 2)?;
    quintic.set_entry(&[0, 0, 0, 0, 0], 2.0 + 101.0f64.sqrt()); // a root
    quintic.set_entry(&[0, 0, 0, 1, 1], 2.0);
    quintic.set_entry(&[0, 0, 1, 1, 1], 3.0);
    quintic.set_entry(&[1, 1, 1, 1, 1], 7.0);
    let slice = binary_slice(&quintic, 0, 1)?;
    println!(
        "d=5 slice (t0..t5) = {:?}: generic = {}",
        slice.iter().map(|v| (v * 100.0).round() / 100.0).collect::<Vec<_>>(),
        is_generic_pmi(&quintic, GENERICITY_TOL)?.generic
    );

    // orders 7..9 are certified only in the diagonal pattern
    let seventh = diag_tensor(7, &[1.0, -1.0]);
    match is_generic_pmi(&seventh, GENERICITY_TOL) {
        Err(Error::GenericityOrderUnsupported { order }) => {
            println!("PMI certificate at order {order}: unsupported (unresolved polynomials)");
        }
        other => println!("unexpected: {other:?}"),
    }
    println!(
        "diagonal certificate at order 7: generic = {}",
        is_generic_diag(&seventh, GENERICITY_TOL)?.generic
    );
    Ok(())
}
