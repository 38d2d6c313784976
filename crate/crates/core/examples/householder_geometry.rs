//! Mirror reflections as Householder matrices: momentum direction changes,
//! energy does not.

use nalgebra::Vector3;

use ifm::optics::{householder, reflect_mode, Momentum3, PhotonMode};

fn main() {
    let mirror = householder(Vector3::new(1.0, 1.0, 0.0)).unwrap();
    println!("R =\n{}", mirror.matrix());
    println!("det R = {}", mirror.matrix().determinant());

    let mode = PhotonMode::new(Momentum3(Vector3::new(3.0, 0.5, 0.0)), Vector3::z()).unwrap();
    let out = reflect_mode(&mirror, &mode);
    println!("p  = {:?}  |p|  = {}", mode.momentum().as_array(), mode.energy());
    println!("Rp = {:?}  |Rp| = {}", out.momentum().as_array(), out.energy());
    println!("polarization after reflection {:?}", out.polarization().as_slice());
}
