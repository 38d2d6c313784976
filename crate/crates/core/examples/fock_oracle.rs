//! Two-mode Fock space: the mixing unitary rotates ladder operators and
//! keeps canonical commutators.

use std::f64::consts::PI;

use ifm::fock::{commutator_preservation_check, rotation_check, v_unitary, FockSpace, ModePair};

fn main() {
    let n_max = 6;
    let space = FockSpace::new(&["p", "Rp"], n_max).expect("small space");
    let pair = ModePair::new("p", "Rp");
    println!("dimension {} (n_max = {n_max})", space.dim());
    for (label, alpha) in [("π/7", PI / 7.0), ("π/4", PI / 4.0), ("π/2", PI / 2.0)] {
        let rot = rotation_check(&space, &pair, alpha).unwrap();
        let com = commutator_preservation_check(&space, &pair, alpha).unwrap();
        println!("α = {label:<4} rotation residual {rot:.2e}  commutator residual {com:.2e}");
    }

    let v = v_unitary(&space, &pair, PI / 2.0).unwrap();
    let out = v.matrix() * space.basis_state(&[1, 0]).unwrap();
    let moved = out[space.index_of(&[0, 1]).unwrap()];
    println!("quarter turn sends |1,0> to {:+.3} |0,1>", moved.re);
}
